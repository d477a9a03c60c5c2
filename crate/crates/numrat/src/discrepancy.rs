//! Discrepancies of the surface and of the order, and the classification
//! predicates built on them.
//!
//! Writing the canonical class upstairs as the pullback from downstairs plus
//! a combination of exceptional curves, the coefficients of that combination
//! are the discrepancies.  Two flavours appear here: `alpha` for the bare
//! surface (ramification ignored) and `a` for the order.  Both solve the
//! same kind of linear system over the intersection form, with different
//! right-hand sides.
//!
//! The headline predicates: the order is crepant when every `a_i` vanishes,
//! and log terminal when `min a_i e_i > -1` where `e_i` is the ramification
//! index on the i-th exceptional curve.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::lattice::{rat, Divisor, Rational, VertexId};
use crate::model::{OrderConfig, ResolutionGraph};
use crate::Error;

/// Discrepancy vectors and the predicates derived from them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    /// Order discrepancies a_i, keyed by vertex.
    pub a: BTreeMap<VertexId, Rational>,
    /// Surface discrepancies alpha_i (ramification ignored), keyed by vertex.
    pub alpha: BTreeMap<VertexId, Rational>,
    /// min over vertices of a_i * e_i; None on the empty graph.
    pub min_ae: Option<Rational>,
    pub crepant: bool,
    pub log_terminal: bool,
    /// Advisory notes, e.g. the configuration is not minimal.
    pub warnings: Vec<String>,
}

/// Surface discrepancies from `alpha = -I^{-1} v` with `v_i = E_i^2 + 2`.
///
/// That right-hand side encodes `K.E_i = -E_i^2 - 2`, which is only correct
/// for rational curves, so nonzero genus is rejected; use
/// [`order_discrepancies`] with an unramified config for curves of higher
/// genus (it uses `b_i + 2 g_i - 2`).
pub fn surface_discrepancies(
    graph: &ResolutionGraph,
) -> Result<BTreeMap<VertexId, Rational>, Error> {
    for v in graph.vertices() {
        if v.genus != 0 {
            return Err(Error::Hypothesis(format!(
                "vertex `{}` has genus {}; surface discrepancies assume rational curves",
                v.id, v.genus
            )));
        }
    }
    let form = graph.intersection_form();
    if !form.is_negative_definite() {
        return Err(Error::NotNegativeDefinite);
    }
    let rhs: Vec<Rational> = graph
        .vertices()
        .iter()
        .map(|v| rat(v.self_intersection + 2))
        .collect();
    let x = form.solve(&rhs)?;
    Ok(form
        .ids()
        .iter()
        .zip(x)
        .map(|(id, xi)| (id.clone(), -xi))
        .collect())
}

/// Order discrepancies: the solution of `I a = (K_A . E_j)_j`.
///
/// The pullback of the downstairs canonical class pairs to zero with every
/// exceptional curve, so pairing the definition of the discrepancies with
/// each `E_j` gives exactly this linear system.
pub fn order_discrepancies(
    config: &OrderConfig,
) -> Result<BTreeMap<VertexId, Rational>, Error> {
    let report = config.validate();
    if !report.ok() {
        return Err(Error::Hypothesis(format!(
            "configuration fails validation: {}",
            report.summary()
        )));
    }
    let form = config.graph.intersection_form();
    let mut rhs = Vec::with_capacity(config.graph.len());
    for v in config.graph.vertices() {
        rhs.push(config.canonical_dot(&Divisor::single(&v.id))?);
    }
    let a = form.solve(&rhs)?;
    Ok(form
        .ids()
        .iter()
        .zip(a)
        .map(|(id, ai)| (id.clone(), ai))
        .collect())
}

/// Full classification of a configuration.
///
/// `alpha` is computed through the unramified system (right-hand side
/// `b_i + 2 g_i - 2`), which agrees with [`surface_discrepancies`] on
/// genus-0 graphs and extends it to positive genus.
pub fn classify(config: &OrderConfig) -> Result<Classification, Error> {
    let a = order_discrepancies(config)?;
    let unram = OrderConfig::unramified(config.graph.clone());
    let alpha = order_discrepancies(&unram)?;

    let mut min_ae: Option<Rational> = None;
    for (v, ai) in &a {
        let e = config.exc_index(v);
        let ae = ai.clone() * rat(e as i64);
        if min_ae.as_ref().is_none_or(|m| ae < *m) {
            min_ae = Some(ae);
        }
    }
    let crepant = a.values().all(|ai| ai.is_zero());
    let log_terminal = min_ae.as_ref().is_none_or(|m| *m > rat(-1));

    let mut warnings = Vec::new();
    for v in config.graph.vertices() {
        if v.genus == 0 && v.self_intersection == -1 {
            let k = config.canonical_dot(&Divisor::single(&v.id))?;
            if k < Rational::zero() {
                warnings.push(format!(
                    "vertex `{}` is a contractible (-1)-curve with negative canonical pairing; \
                     the configuration is not minimal, consider minimalizing first",
                    v.id
                ));
            }
        }
    }

    Ok(Classification {
        a,
        alpha,
        min_ae,
        crepant,
        log_terminal,
        warnings,
    })
}

/// Whether the graph is the minimal resolution graph of a log terminal
/// surface singularity: every genus is zero, the form is negative definite,
/// and every surface discrepancy exceeds -1.
pub fn is_log_terminal_graph(graph: &ResolutionGraph) -> bool {
    match surface_discrepancies(graph) {
        Ok(alpha) => alpha.values().all(|ai| *ai > rat(-1)),
        Err(_) => false,
    }
}
