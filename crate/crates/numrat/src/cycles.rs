//! Numerical cycles, their saturation algorithm, special divisors,
//! multiplicities, and the two-part decomposition used by the positivity
//! argument.
//!
//! The numerical cycle of a connected support is the smallest effective
//! integral divisor on that support whose negative pairs nonpositively with
//! every curve of the support.  It is computed by saturation: starting from
//! a seed, repeatedly add any curve that still pairs positively.  The result
//! does not depend on the order curves are picked (tested below), so the
//! implementation always picks the lowest id for determinism.

use std::collections::BTreeSet;

use num_traits::Signed;

use crate::discrepancy::is_log_terminal_graph;
use crate::lattice::{rat, Divisor, IntersectionForm, Rational, VertexId};
use crate::model::ResolutionGraph;
use crate::Error;

/// Most connected subsets the special-divisor enumeration will emit before
/// giving up.  Chains have quadratically many, so long chains stay cheap;
/// high-degree graphs can explode combinatorially and hit this cap.
const SUBSET_CAP: usize = 100_000;

/// `D = d1 + sum(d2_components)` with `pair(d1, D - d1) <= 0` and every
/// component of the remainder connected, effective, and of strictly smaller
/// multiplicity than `D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub d1: Divisor,
    pub d2_components: Vec<Divisor>,
}

impl Decomposition {
    pub fn d2_total(&self) -> Divisor {
        let mut total = Divisor::zero();
        for c in &self.d2_components {
            total += c;
        }
        total
    }
}

fn check_saturation_input(graph: &ResolutionGraph, d: &Divisor) -> Result<(), Error> {
    if d.is_zero() {
        return Err(Error::Input("cannot saturate the zero divisor".into()));
    }
    if !d.is_effective() {
        return Err(Error::Input(format!("divisor {d} is not effective")));
    }
    if !d.is_integral() {
        return Err(Error::Input(format!("divisor {d} is not integral")));
    }
    for (v, _) in d.iter() {
        graph.require_vertex(v)?;
    }
    Ok(())
}

/// Saturation with a pluggable choice of which positive-pairing curve to add
/// next; the public entry point always takes the first candidate in id
/// order, and the order-independence of the result is a tested invariant.
fn saturate_by<F>(graph: &ResolutionGraph, d: &Divisor, mut pick: F) -> Result<Divisor, Error>
where
    F: FnMut(&[VertexId]) -> usize,
{
    check_saturation_input(graph, d)?;
    let form = graph.intersection_form();
    if !form.is_negative_definite() {
        return Err(Error::NotNegativeDefinite);
    }
    let mut ids = graph.vertex_ids();
    ids.sort();
    let mut cur = d.clone();
    loop {
        let positive: Vec<VertexId> = ids
            .iter()
            .filter(|id| {
                form.pair_with_vertex(&cur, id)
                    .expect("ids come from the graph")
                    .is_positive()
            })
            .cloned()
            .collect();
        if positive.is_empty() {
            return Ok(cur);
        }
        let choice = pick(&positive).min(positive.len() - 1);
        cur.add_to(&positive[choice], &rat(1));
    }
}

/// The smallest effective divisor `D' >= D` such that `-D'` pairs
/// nonpositively with every exceptional curve of the graph.  The support may
/// grow beyond that of `D`.
pub fn saturate(graph: &ResolutionGraph, d: &Divisor) -> Result<Divisor, Error> {
    saturate_by(graph, d, |_| 0)
}

/// The numerical cycle of a connected support: saturation of the reduced
/// divisor inside the subgraph induced on the support, so curves outside the
/// support play no role.
pub fn numerical_cycle(
    graph: &ResolutionGraph,
    support: &BTreeSet<VertexId>,
) -> Result<Divisor, Error> {
    if support.is_empty() {
        return Err(Error::BadSupport("support is empty".into()));
    }
    for id in support {
        graph.require_vertex(id)?;
    }
    let form = graph.intersection_form();
    let components = form.connected_components(support)?;
    if components.len() != 1 {
        return Err(Error::BadSupport(format!(
            "support has {} connected components, need 1",
            components.len()
        )));
    }
    let sub = graph.restrict(support)?;
    saturate(&sub, &Divisor::reduced(support.iter().cloned()))
}

/// All special divisors of the graph: the numerical cycle of every connected
/// subset of vertices, deduplicated and sorted.  Connected subsets are
/// enumerated directly (never the full power set), so long chains are cheap;
/// graphs whose connected-subset count exceeds the enumeration cap are
/// rejected rather than enumerated.
pub fn special_divisors(graph: &ResolutionGraph) -> Result<Vec<Divisor>, Error> {
    let mut supports: Vec<BTreeSet<VertexId>> = Vec::new();
    let mut ids = graph.vertex_ids();
    ids.sort();
    // Each connected subset is generated exactly once, rooted at its
    // smallest vertex: all smaller vertices start excluded, and each
    // frontier vertex branches into included vs excluded-forever.
    for (root_pos, root) in ids.iter().enumerate() {
        let mut excluded: BTreeSet<VertexId> = ids[..root_pos].iter().cloned().collect();
        let mut subset: Vec<VertexId> = vec![root.clone()];
        let frontier: Vec<VertexId> = graph
            .neighbours(root)
            .into_iter()
            .map(|(v, _)| v)
            .filter(|v| !excluded.contains(v))
            .collect();
        grow_subsets(graph, &mut subset, frontier, &mut excluded, &mut supports)?;
    }
    let mut out = BTreeSet::new();
    for support in supports {
        out.insert(numerical_cycle(graph, &support)?);
    }
    Ok(out.into_iter().collect())
}

/// Depth-first enumeration of the connected supersets of `subset` that
/// avoid `excluded`.  `frontier` holds the candidate extensions: vertices
/// adjacent to the subset, not in it, not excluded.  Each loop turn fixes
/// one candidate as included (the recursive call) and then as excluded for
/// every later branch of this frame, which is what makes the enumeration
/// duplicate-free.
fn grow_subsets(
    graph: &ResolutionGraph,
    subset: &mut Vec<VertexId>,
    frontier: Vec<VertexId>,
    excluded: &mut BTreeSet<VertexId>,
    supports: &mut Vec<BTreeSet<VertexId>>,
) -> Result<(), Error> {
    if supports.len() >= SUBSET_CAP {
        return Err(Error::EnumerationCap {
            vertices: graph.len(),
            cap: SUBSET_CAP,
        });
    }
    supports.push(subset.iter().cloned().collect());
    let mut remaining = frontier;
    let mut excluded_here: Vec<VertexId> = Vec::new();
    while let Some(next) = remaining.pop() {
        let mut extended = remaining.clone();
        for (v, _) in graph.neighbours(&next) {
            if !excluded.contains(&v) && !subset.contains(&v) && !extended.contains(&v) {
                extended.push(v);
            }
        }
        subset.push(next.clone());
        grow_subsets(graph, subset, extended, excluded, supports)?;
        subset.pop();
        excluded.insert(next.clone());
        excluded_here.push(next);
    }
    for v in excluded_here {
        excluded.remove(&v);
    }
    Ok(())
}

/// Multiplicity of the singularity obtained by contracting the support of
/// `d`: minus the self-intersection of the numerical cycle of that support.
/// On log terminal supports this equals `2 + sum(b_j - 2)` over the support,
/// which is asserted.
pub fn multiplicity(graph: &ResolutionGraph, d: &Divisor) -> Result<i64, Error> {
    if d.is_zero() {
        return Err(Error::Input("multiplicity of the zero divisor is undefined".into()));
    }
    if !d.is_effective() {
        return Err(Error::Input(format!("divisor {d} is not effective")));
    }
    let support = d.support();
    let z = numerical_cycle(graph, &support)?;
    let sub = graph.restrict(&support)?;
    let m_rat = -sub.intersection_form().pair(&z, &z)?;
    debug_assert!(m_rat.is_integer());
    let m = m_rat.to_integer();
    let m = i64::try_from(m).map_err(|_| Error::Internal("multiplicity overflows i64".into()))?;
    assert!(m > 0, "numerical cycle has nonnegative self-intersection");

    if is_log_terminal_graph(&sub) {
        let closed_form: i64 = 2 + sub
            .vertices()
            .iter()
            .map(|v| v.weight() - 2)
            .sum::<i64>();
        assert_eq!(
            m, closed_form,
            "multiplicity of a log terminal support must match its weight formula"
        );
    }
    Ok(m)
}

fn rational_ceil(x: &Rational) -> i64 {
    i64::try_from(x.ceil().to_integer()).expect("desk-scale coefficients fit in i64")
}

/// The smallest integer `s` with `d <= s * Z` where `Z` is the numerical
/// cycle of the graph's full support.
pub fn min_s(graph: &ResolutionGraph, d: &Divisor) -> Result<i64, Error> {
    if !d.is_effective() {
        return Err(Error::Input(format!("divisor {d} is not effective")));
    }
    if d.is_zero() {
        return Ok(0);
    }
    let z = numerical_cycle(graph, &graph.vertex_id_set())?;
    let mut s = 0i64;
    for (v, c) in d.iter() {
        let ratio = c / z.coeff(v);
        s = s.max(rational_ceil(&ratio));
    }
    Ok(s)
}

/// Split `d` into `d1 + d2` with nonpositive cross pairing and strictly
/// smaller multiplicities on the remainder components.
///
/// When the multiplicity is 2 the split is trivial (`d1 = d`).  Otherwise
/// `n` is the smallest coefficient of `d` on a vertex of weight > 2, `d1` is
/// the componentwise minimum of `n` times the numerical cycle and `d`, and
/// the remainder falls apart into connected components.
pub fn decompose(graph: &ResolutionGraph, d: &Divisor) -> Result<Decomposition, Error> {
    if !d.is_integral() {
        return Err(Error::Input(format!("divisor {d} is not integral")));
    }
    let m = multiplicity(graph, d)?;
    if m == 2 {
        return Ok(Decomposition {
            d1: d.clone(),
            d2_components: Vec::new(),
        });
    }
    let support = d.support();
    let n = d
        .iter()
        .filter(|(v, _)| graph.vertex(v).map(|g| g.weight() > 2).unwrap_or(false))
        .map(|(_, c)| c.to_integer())
        .min()
        .ok_or_else(|| {
            Error::Internal("multiplicity above 2 but no vertex of weight above 2".into())
        })?;
    let n = i64::try_from(n).map_err(|_| Error::Internal("coefficient overflows i64".into()))?;
    let z = numerical_cycle(graph, &support)?;
    let d1 = Divisor::pointwise_min(&z.scale(&rat(n)), d);
    let d2 = d - &d1;

    let form = graph.intersection_form();
    let cross = form.pair(&d1, &d2)?;
    assert!(
        cross <= rat(0),
        "decomposition cross term must be nonpositive, got {cross}"
    );

    let mut d2_components = Vec::new();
    if !d2.is_zero() {
        for comp in form.connected_components(&d2.support())? {
            let piece = Divisor::from_coeffs(comp.iter().map(|v| (v.clone(), d2.coeff(v))));
            let piece_mult = multiplicity(graph, &piece)?;
            assert!(
                piece_mult < m,
                "remainder component must have smaller multiplicity: {piece_mult} vs {m}"
            );
            d2_components.push(piece);
        }
    }
    let reassembled = d2_components
        .iter()
        .fold(d1.clone(), |acc, c| &acc + c);
    assert_eq!(reassembled, *d, "decomposition must reassemble the input");

    Ok(Decomposition { d1, d2_components })
}

/// Intersection form of the subgraph induced on a divisor's support.
pub fn support_form(graph: &ResolutionGraph, d: &Divisor) -> Result<IntersectionForm, Error> {
    Ok(graph.restrict(&d.support())?.intersection_form())
}
