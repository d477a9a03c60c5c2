//! Euler-characteristic formulas for an order restricted to exceptional
//! divisors: the adjunction formula, a componentwise recursion that
//! recomputes it along a filtration, the Euler characteristic of the
//! ramified cover of a curve, and chi of the quotient by the radical ideal
//! along a curve.
//!
//! All formulas are evaluated formally in exact rational arithmetic for any
//! configuration, whether or not it is realizable by an actual order;
//! integrality is never assumed.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::lattice::{rat, Divisor, IntersectionForm, Rational, VertexId};
use crate::model::OrderConfig;
use crate::Error;

/// A linear form on the divisor lattice, given by its values on vertices.
/// Vertices absent from the map take the value zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearFunctional {
    pub values: BTreeMap<VertexId, Rational>,
}

impl LinearFunctional {
    pub fn new<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<VertexId>,
    {
        LinearFunctional {
            values: entries.into_iter().map(|(id, v)| (id.into(), v)).collect(),
        }
    }

    pub fn zero() -> Self {
        LinearFunctional::default()
    }

    pub fn value_at(&self, id: &str) -> Rational {
        self.values.get(id).cloned().unwrap_or_else(Rational::zero)
    }

    /// Linear extension to arbitrary divisors.
    pub fn value(&self, e: &Divisor) -> Rational {
        e.iter().map(|(v, c)| c * self.value_at(v)).sum()
    }

    /// The functional `E_i -> -K_A . E_i` of a configuration: the linear
    /// part of the positivity function that the rationality criterion
    /// inspects on special divisors.
    pub fn minus_canonical(config: &OrderConfig) -> Result<Self, Error> {
        let mut values = BTreeMap::new();
        for id in config.graph.vertex_ids() {
            let k = config.canonical_dot(&Divisor::single(&id))?;
            values.insert(id, -k);
        }
        Ok(LinearFunctional { values })
    }
}

/// `g(E) = -E^2 + ell(E)`: the quadratic-plus-linear shape shared by every
/// positivity function the rationality check evaluates.
pub fn g_value(
    form: &IntersectionForm,
    ell: &LinearFunctional,
    e: &Divisor,
) -> Result<Rational, Error> {
    Ok(-form.pair(e, e)? + ell.value(e))
}

/// `f(E) = -(K_A + E) . E`, the functional whose positivity on all effective
/// divisors is numerical rationality.
pub fn f_value(config: &OrderConfig, e: &Divisor) -> Result<Rational, Error> {
    let form = config.graph.intersection_form();
    Ok(-(config.canonical_dot(e)? + form.pair(e, e)?))
}

fn check_chi_argument(e: &Divisor) -> Result<(), Error> {
    if e.is_zero() {
        return Err(Error::Input("chi is evaluated on nonzero divisors only".into()));
    }
    if !e.is_effective() {
        return Err(Error::Input(format!("divisor {e} is not effective")));
    }
    if !e.is_integral() {
        return Err(Error::Input(format!("divisor {e} is not integral")));
    }
    Ok(())
}

/// Euler characteristic of the order restricted to an effective divisor:
/// `chi(A tensor O_E) = (r^2/2) * f(E)`.
pub fn chi_restriction(config: &OrderConfig, e: &Divisor) -> Result<Rational, Error> {
    check_chi_argument(e)?;
    Ok(config.half_rank() * f_value(config, e)?)
}

/// The same Euler characteristic computed along a filtration of `O_E` by
/// structure sheaves of the components: an independent evaluation path used
/// to cross-check `chi_restriction`.  The per-component value is
/// `(r^2/2) * (2(1 - g_i) - Delta . E_i)`.
pub fn chi_via_recursion(config: &OrderConfig, e: &Divisor) -> Result<Rational, Error> {
    check_chi_argument(e)?;
    let form = config.graph.intersection_form();
    let half = config.half_rank();
    let mut total = -half.clone() * form.pair(e, e)?;
    for (v, n) in e.iter() {
        let vertex = config.graph.require_vertex(v)?;
        let single = Divisor::single(v);
        let self_int = form.pair(&single, &single)?;
        let genus_term = rat(2) * rat(1 - vertex.genus as i64);
        let per_component = half.clone() * (genus_term - config.delta_dot(&single)?);
        total += n * (half.clone() * self_int + per_component);
    }
    Ok(total)
}

/// Euler characteristic of the degree-`e` cyclic cover of the curve at a
/// vertex, ramified where other ramified components meet it:
/// `e(1 - g) - (e/2) * sum (1 - 1/min{e, e_D}) (C . D)`.
///
/// Every intersection point contributes, so each summand carries the
/// intersection number `C . D`; components with `e = 1` or `e_D = 1`
/// contribute nothing.
pub fn cover_euler_char(config: &OrderConfig, vertex: &str) -> Result<Rational, Error> {
    let v = config.graph.require_vertex(vertex)?;
    let e = rat(config.exc_index(vertex) as i64);
    let mut branch = Rational::zero();
    for (w, mult) in config.graph.neighbours(vertex) {
        let e_d = rat(config.exc_index(&w).min(config.exc_index(vertex)) as i64);
        branch += (rat(1) - rat(1) / e_d) * rat(mult as i64);
    }
    for curve in &config.curves {
        if let Some(mult) = curve.meets.get(vertex) {
            let e_d = rat(curve.index.min(config.exc_index(vertex)) as i64);
            branch += (rat(1) - rat(1) / e_d) * rat(*mult as i64);
        }
    }
    Ok(e.clone() * rat(1 - v.genus as i64) - e / rat(2) * branch)
}

/// Euler characteristic of `A/J` along the curve at a vertex, where `J` is
/// the radical of `A` there:
/// `(r^2 / 2e) * (2(1 - g) - C . Delta + (1 - 1/e) C^2)`.
pub fn chi_a_mod_j(config: &OrderConfig, vertex: &str) -> Result<Rational, Error> {
    let v = config.graph.require_vertex(vertex)?;
    let e = rat(config.exc_index(vertex) as i64);
    let single = Divisor::single(vertex);
    let form = config.graph.intersection_form();
    let c2 = form.pair(&single, &single)?;
    let delta = config.delta_dot(&single)?;
    let genus_term = rat(2) * rat(1 - v.genus as i64);
    Ok(config.half_rank() / e.clone() * (genus_term - delta + (rat(1) - rat(1) / e) * c2))
}
