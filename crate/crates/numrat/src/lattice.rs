//! Divisors and the intersection lattice of a resolution graph.
//!
//! A divisor is a finite formal sum of exceptional curves with rational
//! coefficients, stored sparsely by vertex id.  The intersection form is the
//! symmetric integer matrix of pairwise intersection numbers in a fixed
//! vertex order.  Everything is exact: coefficients are arbitrary-precision
//! rationals and definiteness is decided by signs of pivots, not by numerics.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::Error;

pub type Rational = BigRational;
pub type VertexId = String;

/// Rational from a machine integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational `n/d`; panics if `d == 0`.
pub fn frac(n: i64, d: i64) -> Rational {
    assert!(d != 0, "zero denominator");
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Sparse rational combination of exceptional curves.
///
/// Zero coefficients are never stored, so two divisors are equal iff their
/// maps are equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Divisor {
    coeffs: BTreeMap<VertexId, Rational>,
}

impl Divisor {
    pub fn zero() -> Self {
        Divisor::default()
    }

    /// The reduced divisor of a single vertex.
    pub fn single(id: &str) -> Self {
        let mut d = Divisor::zero();
        d.set(id, Rational::one());
        d
    }

    /// The reduced divisor of a support: coefficient 1 on every given vertex.
    pub fn reduced<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<VertexId>,
    {
        let mut d = Divisor::zero();
        for id in ids {
            d.coeffs.insert(id.into(), Rational::one());
        }
        d
    }

    /// Build from `(id, coefficient)` pairs; zero entries are dropped.
    pub fn from_coeffs<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<VertexId>,
    {
        let mut d = Divisor::zero();
        for (id, c) in entries {
            d.set(&id.into(), c);
        }
        d
    }

    /// Integer-coefficient convenience constructor.
    pub fn from_int_coeffs<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, i64)>,
        S: Into<VertexId>,
    {
        Divisor::from_coeffs(entries.into_iter().map(|(id, c)| (id, rat(c))))
    }

    pub fn coeff(&self, id: &str) -> Rational {
        self.coeffs.get(id).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, id: &str, c: Rational) {
        if c.is_zero() {
            self.coeffs.remove(id);
        } else {
            self.coeffs.insert(id.to_string(), c);
        }
    }

    pub fn add_to(&mut self, id: &str, c: &Rational) {
        let v = self.coeff(id) + c;
        self.set(id, v);
    }

    /// Iterate `(id, coefficient)` in id order; coefficients are nonzero.
    pub fn iter(&self) -> impl Iterator<Item = (&VertexId, &Rational)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> BTreeSet<VertexId> {
        self.coeffs.keys().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// All coefficients nonnegative (the zero divisor is effective).
    pub fn is_effective(&self) -> bool {
        self.coeffs.values().all(|c| c.is_positive())
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    pub fn scale(&self, r: &Rational) -> Divisor {
        if r.is_zero() {
            return Divisor::zero();
        }
        Divisor {
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), v * r)).collect(),
        }
    }

    /// Componentwise minimum; this is the gcd of two effective divisors.
    pub fn pointwise_min(a: &Divisor, b: &Divisor) -> Divisor {
        let mut out = Divisor::zero();
        for (id, ca) in a.iter() {
            let cb = b.coeff(id);
            out.set(id, ca.clone().min(cb));
        }
        // Keys absent from `a` have min(0, b) which is 0 for effective b;
        // for general divisors a negative b-coefficient still wins.
        for (id, cb) in b.iter() {
            if !a.coeffs.contains_key(id) && cb.is_negative() {
                out.set(id, cb.clone());
            }
        }
        out
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (id, c) in self.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_one() {
                write!(f, "{id}")?;
            } else {
                write!(f, "{c}*{id}")?;
            }
        }
        Ok(())
    }
}

impl Add for &Divisor {
    type Output = Divisor;
    fn add(self, rhs: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (id, c) in rhs.iter() {
            out.add_to(id, c);
        }
        out
    }
}

impl Sub for &Divisor {
    type Output = Divisor;
    fn sub(self, rhs: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (id, c) in rhs.iter() {
            let v = out.coeff(id) - c;
            out.set(id, v);
        }
        out
    }
}

impl Neg for &Divisor {
    type Output = Divisor;
    fn neg(self) -> Divisor {
        Divisor {
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }
}

impl AddAssign<&Divisor> for Divisor {
    fn add_assign(&mut self, rhs: &Divisor) {
        for (id, c) in rhs.iter() {
            self.add_to(id, c);
        }
    }
}

/// Symmetric integer intersection form in a fixed vertex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionForm {
    ids: Vec<VertexId>,
    index: BTreeMap<VertexId, usize>,
    entries: Vec<Vec<i64>>,
}

impl IntersectionForm {
    /// `entries` must be square, symmetric, and match `ids` in length.
    pub fn new(ids: Vec<VertexId>, entries: Vec<Vec<i64>>) -> Result<Self, Error> {
        let n = ids.len();
        if entries.len() != n || entries.iter().any(|row| row.len() != n) {
            return Err(Error::Input(format!(
                "intersection matrix must be {n}x{n} to match the vertex list"
            )));
        }
        for (i, row) in entries.iter().enumerate() {
            for j in 0..i {
                if row[j] != entries[j][i] {
                    return Err(Error::Input(format!(
                        "intersection matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let mut index = BTreeMap::new();
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::Input(format!("duplicate vertex id `{id}`")));
            }
        }
        Ok(IntersectionForm { ids, index, entries })
    }

    pub fn dim(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Result<usize, Error> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    /// Intersection number of two divisors.
    pub fn pair(&self, a: &Divisor, b: &Divisor) -> Result<Rational, Error> {
        let mut total = Rational::zero();
        for (ia, ca) in a.iter() {
            let i = self.index_of(ia)?;
            for (ib, cb) in b.iter() {
                let j = self.index_of(ib)?;
                let e = self.entries[i][j];
                if e != 0 {
                    total += ca * cb * rat(e);
                }
            }
        }
        Ok(total)
    }

    /// `d . E_id`, linear in the support of `d`.
    pub fn pair_with_vertex(&self, d: &Divisor, id: &str) -> Result<Rational, Error> {
        let j = self.index_of(id)?;
        let mut total = Rational::zero();
        for (i_id, c) in d.iter() {
            let i = self.index_of(i_id)?;
            let e = self.entries[i][j];
            if e != 0 {
                total += c * rat(e);
            }
        }
        Ok(total)
    }

    /// Exact Sylvester test: eliminate without row swaps and require every
    /// pivot negative.  A zero pivot already rules definiteness out.
    pub fn is_negative_definite(&self) -> bool {
        let n = self.dim();
        let mut m: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| rat(self.entries[i][j])).collect())
            .collect();
        for k in 0..n {
            let pivot = m[k][k].clone();
            if !pivot.is_negative() {
                return false;
            }
            let row_k = m[k].clone();
            for row in m.iter_mut().skip(k + 1) {
                if row[k].is_zero() {
                    continue;
                }
                let factor = &row[k] / &pivot;
                for (x, kv) in row[k..].iter_mut().zip(&row_k[k..]) {
                    *x -= &factor * kv;
                }
            }
        }
        true
    }

    /// Solve `I x = rhs` exactly; the form must be nonsingular.
    pub fn solve(&self, rhs: &[Rational]) -> Result<Vec<Rational>, Error> {
        let n = self.dim();
        if rhs.len() != n {
            return Err(Error::Input(format!(
                "right-hand side has length {} but the form has dimension {n}",
                rhs.len()
            )));
        }
        let mut m: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| rat(self.entries[i][j]))
                    .chain(std::iter::once(rhs[i].clone()))
                    .collect()
            })
            .collect();
        for k in 0..n {
            let pivot_row = (k..n).find(|&i| !m[i][k].is_zero()).ok_or(Error::SingularForm)?;
            m.swap(k, pivot_row);
            let pivot = m[k][k].clone();
            let row_k = m[k].clone();
            for (i, row) in m.iter_mut().enumerate() {
                if i == k || row[k].is_zero() {
                    continue;
                }
                let factor = &row[k] / &pivot;
                for (x, kv) in row[k..=n].iter_mut().zip(&row_k[k..=n]) {
                    *x -= &factor * kv;
                }
            }
        }
        Ok((0..n).map(|i| &m[i][n] / &m[i][i]).collect())
    }

    /// Dense coefficient vector of `d` in form order.
    pub fn to_dense(&self, d: &Divisor) -> Result<Vec<Rational>, Error> {
        let mut v = vec![Rational::zero(); self.dim()];
        for (id, c) in d.iter() {
            v[self.index_of(id)?] = c.clone();
        }
        Ok(v)
    }

    pub fn from_dense(&self, v: &[Rational]) -> Divisor {
        Divisor::from_coeffs(self.ids.iter().cloned().zip(v.iter().cloned()))
    }

    /// Connected components of a support set, with adjacency given by
    /// nonzero off-diagonal entries.  Components come out sorted by their
    /// smallest member.
    pub fn connected_components(
        &self,
        support: &BTreeSet<VertexId>,
    ) -> Result<Vec<BTreeSet<VertexId>>, Error> {
        for id in support {
            self.index_of(id)?;
        }
        let mut remaining: BTreeSet<VertexId> = support.clone();
        let mut components = Vec::new();
        while let Some(seed) = remaining.iter().next().cloned() {
            remaining.remove(&seed);
            let mut component = BTreeSet::new();
            let mut queue = VecDeque::new();
            queue.push_back(seed);
            while let Some(id) = queue.pop_front() {
                let i = self.index_of(&id)?;
                component.insert(id);
                let adjacent: Vec<VertexId> = remaining
                    .iter()
                    .filter(|other| {
                        let j = self.index_of(other).expect("support already checked");
                        self.entries[i][j] != 0
                    })
                    .cloned()
                    .collect();
                for other in adjacent {
                    remaining.remove(&other);
                    queue.push_back(other);
                }
            }
            components.push(component);
        }
        Ok(components)
    }

    /// Induced subform on a support set, keeping the ambient vertex order.
    pub fn restrict(&self, support: &BTreeSet<VertexId>) -> Result<IntersectionForm, Error> {
        for id in support {
            self.index_of(id)?;
        }
        let keep: Vec<usize> = (0..self.dim())
            .filter(|&i| support.contains(&self.ids[i]))
            .collect();
        let ids = keep.iter().map(|&i| self.ids[i].clone()).collect();
        let entries = keep
            .iter()
            .map(|&i| keep.iter().map(|&j| self.entries[i][j]).collect())
            .collect();
        IntersectionForm::new(ids, entries)
    }
}
