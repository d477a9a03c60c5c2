//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use numrat::birational::{blowup, BlowupCenter, ComponentRef};
use numrat::lattice::{rat, Divisor, VertexId};
use numrat::model::OrderConfig;
use rand::Rng;

/// All nonzero effective integral divisors on `ids` with coefficients up to
/// `max`, in ascending lexicographic order.
pub fn divisor_box(ids: &[VertexId], max: i64) -> impl Iterator<Item = Divisor> + '_ {
    let base = (max + 1) as u64;
    let total = base.pow(ids.len() as u32);
    (1..total).map(move |code| {
        let mut rest = code;
        let mut d = Divisor::zero();
        for id in ids.iter().rev() {
            let c = (rest % base) as i64;
            rest /= base;
            if c != 0 {
                d.add_to(id, &rat(c));
            }
        }
        d
    })
}

/// Every blowup centre the configuration admits: the anonymous smooth
/// point, generic points of each component, and the transverse nodes.
/// Filtered by actually attempting the blowup and revalidating the result,
/// so centres that would disconnect the exceptional locus are dropped.
pub fn admissible_centers(config: &OrderConfig) -> Vec<BlowupCenter> {
    let mut candidates = vec![BlowupCenter::smooth_point()];
    for v in config.graph.vertex_ids() {
        candidates.push(BlowupCenter::on_vertex(&v));
    }
    for c in &config.curves {
        candidates.push(BlowupCenter::on_curve(&c.id));
    }
    for ((a, b), _) in config.graph.edges() {
        candidates.push(BlowupCenter::node(
            ComponentRef::Vertex(a.clone()),
            ComponentRef::Vertex(b.clone()),
        ));
    }
    for c in &config.curves {
        for v in c.meets.keys() {
            candidates.push(BlowupCenter::node(
                ComponentRef::Curve(c.id.clone()),
                ComponentRef::Vertex(v.clone()),
            ));
        }
    }
    candidates
        .into_iter()
        .filter(|center| {
            blowup(config, center).is_ok_and(|(after, _)| after.validate().ok())
        })
        .collect()
}

/// Random nonzero effective integral divisor over `ids` with coefficients
/// in `0..=max`.
pub fn random_divisor<R: Rng>(rng: &mut R, ids: &[VertexId], max: i64) -> Divisor {
    loop {
        let mut d = Divisor::zero();
        for id in ids {
            d.add_to(id, &rat(rng.random_range(0..=max)));
        }
        if !d.is_zero() {
            return d;
        }
    }
}
