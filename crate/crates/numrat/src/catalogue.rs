//! Graph builders, worked-example fixtures, and seeded random generators.
//!
//! The deterministic builders cover the standard families: weighted chains,
//! three-armed stars, Hirzebruch-Jung chains of cyclic quotient
//! singularities, and the two decorated configurations used as end-to-end
//! oracles throughout the test suite (an elliptic-curve order that fails
//! numerical rationality and a crepant single-vertex order).
//!
//! Random generation is rejection sampling: draw a shape, check it with
//! [`discrepancy::is_log_terminal_graph`], resample on failure.  Everything
//! is deterministic from the seed.

use std::collections::BTreeMap;

use num_integer::Integer;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::discrepancy;
use crate::lattice::{frac, rat, Divisor, Rational, VertexId};
use crate::model::{GraphVertex, OrderConfig, RamCurve, ResolutionGraph};
use crate::Error;

/// Vertex ids for generated graphs: "v01", "v02", ... (1-based).
pub fn vid(i: usize) -> VertexId {
    format!("v{i:02}")
}

/// Chain of rational curves with the given weights `b_i = -E_i^2`.
pub fn chain_graph(weights: &[i64]) -> Result<ResolutionGraph, Error> {
    let vertices = weights
        .iter()
        .enumerate()
        .map(|(i, &b)| GraphVertex::new(&vid(i + 1), -b, 0))
        .collect();
    let edges = (1..weights.len())
        .map(|i| (vid(i), vid(i + 1), 1))
        .collect();
    ResolutionGraph::new(vertices, edges)
}

/// Star with a central vertex and chains as arms.  The centre is "v01";
/// arm vertices are numbered consecutively arm by arm, each arm attached to
/// the centre at its first vertex.
pub fn star_graph(center_weight: i64, arms: &[Vec<i64>]) -> Result<ResolutionGraph, Error> {
    let mut vertices = vec![GraphVertex::new(&vid(1), -center_weight, 0)];
    let mut edges = Vec::new();
    let mut next = 2;
    for arm in arms {
        for (k, &b) in arm.iter().enumerate() {
            vertices.push(GraphVertex::new(&vid(next), -b, 0));
            let prev = if k == 0 { vid(1) } else { vid(next - 1) };
            edges.push((prev, vid(next), 1));
            next += 1;
        }
    }
    ResolutionGraph::new(vertices, edges)
}

/// Weights of the Hirzebruch-Jung chain for `n/q`: the continued-fraction
/// expansion n/q = b1 - 1/(b2 - 1/(...)), all entries >= 2.
pub fn hj_weights(n: u64, q: u64) -> Result<Vec<i64>, Error> {
    if n < 2 || q == 0 || q >= n {
        return Err(Error::Input(format!(
            "cyclic type needs 0 < q < n and n >= 2, got ({n},{q})"
        )));
    }
    if n.gcd(&q) != 1 {
        return Err(Error::Input(format!("cyclic type needs gcd(n,q)=1, got ({n},{q})")));
    }
    let (mut n, mut q) = (n, q);
    let mut out = Vec::new();
    while q > 0 {
        let b = n.div_ceil(q);
        out.push(b as i64);
        let next_q = b * q - n;
        n = q;
        q = next_q;
    }
    Ok(out)
}

/// Resolution graph of the cyclic quotient singularity of type (n, q).
pub fn cyclic(n: u64, q: u64) -> Result<ResolutionGraph, Error> {
    chain_graph(&hj_weights(n, q)?)
}

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Quoted from the worked example this fixture reproduces.
    Reported,
    /// Immediate from a definition; no computation needed.
    Direct,
    /// Obtained by an independent hand computation.
    Derived,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpectedValue {
    Divisor(Divisor),
    Number(Rational),
    Flag(bool),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expected {
    pub provenance: Provenance,
    pub value: ExpectedValue,
}

/// A configuration bundled with values the library must reproduce exactly.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub config: OrderConfig,
    pub expected: BTreeMap<String, Expected>,
}

impl Fixture {
    fn new(name: &str, config: OrderConfig) -> Self {
        Fixture {
            name: name.to_string(),
            config,
            expected: BTreeMap::new(),
        }
    }

    fn expect(&mut self, key: &str, provenance: Provenance, value: ExpectedValue) {
        self.expected
            .insert(key.to_string(), Expected { provenance, value });
    }

    pub fn expected_divisor(&self, key: &str) -> Option<&Divisor> {
        match self.expected.get(key) {
            Some(Expected {
                value: ExpectedValue::Divisor(d),
                ..
            }) => Some(d),
            _ => None,
        }
    }

    pub fn expected_number(&self, key: &str) -> Option<&Rational> {
        match self.expected.get(key) {
            Some(Expected {
                value: ExpectedValue::Number(x),
                ..
            }) => Some(x),
            _ => None,
        }
    }

    pub fn expected_flag(&self, key: &str) -> Option<bool> {
        match self.expected.get(key) {
            Some(Expected {
                value: ExpectedValue::Flag(b),
                ..
            }) => Some(*b),
            _ => None,
        }
    }
}

/// Fork-plus-chain family: centre of weight 2 carrying two leaves, with a
/// chain hanging off the centre.  Vertices: v01 = centre, then the chain,
/// then the two leaves.  All weights must be >= 2.
///
/// The expected numerical cycle has coefficient 2 on the centre and on the
/// chain up to (not including) the first chain vertex of weight > 2, and 1
/// from there on; when the whole chain has weight 2 the prefix stops just
/// before the last chain vertex.  Both branches agree with the saturation
/// algorithm (checked in tests); the leaves always carry coefficient 1.
pub fn case1(chain_weights: &[i64], leaf_weights: (i64, i64)) -> Result<Fixture, Error> {
    if chain_weights.is_empty() {
        return Err(Error::Input("case1 needs a nonempty chain".into()));
    }
    if chain_weights.iter().any(|&b| b < 2) || leaf_weights.0 < 2 || leaf_weights.1 < 2 {
        return Err(Error::Input("case1 weights must all be >= 2".into()));
    }
    let k = chain_weights.len();
    let r = k + 3;
    let mut vertices = vec![GraphVertex::new(&vid(1), -2, 0)];
    let mut edges = Vec::new();
    for (i, &b) in chain_weights.iter().enumerate() {
        let g = i + 2;
        vertices.push(GraphVertex::new(&vid(g), -b, 0));
        edges.push((vid(g - 1), vid(g), 1));
    }
    vertices.push(GraphVertex::new(&vid(k + 2), -leaf_weights.0, 0));
    vertices.push(GraphVertex::new(&vid(k + 3), -leaf_weights.1, 0));
    edges.push((vid(1), vid(k + 2), 1));
    edges.push((vid(1), vid(k + 3), 1));
    let graph = ResolutionGraph::new(vertices, edges)?;

    // First chain vertex of weight > 2 ends the coefficient-2 prefix; if
    // there is none, the prefix ends before the last chain vertex.
    let j = chain_weights
        .iter()
        .position(|&b| b > 2)
        .map(|i| i + 2)
        .unwrap_or(k + 1);
    let mut cycle = Divisor::zero();
    for g in 1..=r {
        let c = if g < j { 2 } else { 1 };
        cycle.set(&vid(g), rat(c));
    }
    let total_weight: i64 = 2 + chain_weights.iter().sum::<i64>() + leaf_weights.0 + leaf_weights.1;
    let mult = 2 + (total_weight - 2 * (r as i64));

    let name = format!(
        "case1[{}|{},{}]",
        chain_weights
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(","),
        leaf_weights.0,
        leaf_weights.1
    );
    let mut fx = Fixture::new(&name, OrderConfig::unramified(graph));
    fx.expect("numerical_cycle", Provenance::Derived, ExpectedValue::Divisor(cycle));
    fx.expect("multiplicity", Provenance::Derived, ExpectedValue::Number(rat(mult)));
    Ok(fx)
}

fn case2(b1: i64, b2: i64, chain_mults: [i64; 5], hang_mult: i64) -> Fixture {
    let mut vertices: Vec<GraphVertex> = [b1, b2, 2, 2, 2]
        .iter()
        .enumerate()
        .map(|(i, &b)| GraphVertex::new(&vid(i + 1), -b, 0))
        .collect();
    vertices.push(GraphVertex::new(&vid(6), -2, 0));
    let mut edges: Vec<(String, String, u32)> =
        (1..5).map(|i| (vid(i), vid(i + 1), 1)).collect();
    edges.push((vid(3), vid(6), 1));
    let graph = ResolutionGraph::new(vertices, edges).expect("fixed shape is well formed");

    let mut cycle = Divisor::zero();
    for (i, &c) in chain_mults.iter().enumerate() {
        cycle.set(&vid(i + 1), rat(c));
    }
    cycle.set(&vid(6), rat(hang_mult));

    let name = format!("case2_{b1}{b2}");
    let mut fx = Fixture::new(&name, OrderConfig::unramified(graph));
    fx.expect("numerical_cycle", Provenance::Reported, ExpectedValue::Divisor(cycle));
    fx.expect("multiplicity", Provenance::Reported, ExpectedValue::Number(rat(3)));
    fx
}

/// Chain [2,3,2,2,2] with a -2 vertex hanging off the middle; the numerical
/// cycle is (1,1,2,2,1) along the chain and 1 on the hanging vertex.
pub fn case2_23() -> Fixture {
    case2(2, 3, [1, 1, 2, 2, 1], 1)
}

/// Chain [3,2,2,2,2] with a -2 vertex hanging off the middle; the numerical
/// cycle is (1,2,3,2,1) along the chain and 2 on the hanging vertex.
pub fn case2_32() -> Fixture {
    case2(3, 2, [1, 2, 3, 2, 1], 2)
}

/// Rank-4 order ramified with index 2 on a genus-1 (-3)-curve and on two
/// transverse curves that each meet it at three distinct points.  The
/// classic counterexample: log canonical but not log terminal, and not
/// numerically rational (the reduced exceptional curve has negative chi).
pub fn e6_tilde_order() -> Fixture {
    let graph = ResolutionGraph::new(vec![GraphVertex::new("E", -3, 1)], vec![]).unwrap();
    let curves = ["D1", "D2"]
        .iter()
        .map(|id| RamCurve::new(id, 2, BTreeMap::from([("E".to_string(), 3)])).unwrap())
        .collect();
    let config = OrderConfig::new(graph, BTreeMap::from([("E".to_string(), 2)]), curves, 2)
        .expect("fixed configuration is well formed");

    let mut fx = Fixture::new("e6-tilde-order", config);
    fx.expect("canonical_pairing", Provenance::Reported, ExpectedValue::Number(frac(9, 2)));
    // chi(mE) = 3m(2m - 3).
    for m in 1..=5i64 {
        fx.expect(
            &format!("chi_{m}"),
            Provenance::Reported,
            ExpectedValue::Number(rat(3 * m * (2 * m - 3))),
        );
    }
    fx.expect("order_discrepancy", Provenance::Derived, ExpectedValue::Number(frac(-3, 2)));
    fx.expect("min_ae", Provenance::Derived, ExpectedValue::Number(rat(-3)));
    fx.expect("log_terminal", Provenance::Derived, ExpectedValue::Flag(false));
    fx.expect("crepant", Provenance::Derived, ExpectedValue::Flag(false));
    fx.expect("rational", Provenance::Reported, ExpectedValue::Flag(false));
    fx.expect("witness", Provenance::Reported, ExpectedValue::Divisor(Divisor::single("E")));
    fx.expect("witness_chi", Provenance::Reported, ExpectedValue::Number(rat(-3)));
    fx
}

/// Rank-4 order ramified with index 2 on a single rational (-4)-curve: all
/// order discrepancies vanish, so it is crepant and numerically rational.
pub fn crepant_order() -> Fixture {
    let graph = ResolutionGraph::new(vec![GraphVertex::new("E", -4, 0)], vec![]).unwrap();
    let config = OrderConfig::new(graph, BTreeMap::from([("E".to_string(), 2)]), vec![], 2)
        .expect("fixed configuration is well formed");
    let mut fx = Fixture::new("crepant-order", config);
    fx.expect("crepant", Provenance::Derived, ExpectedValue::Flag(true));
    fx.expect("log_terminal", Provenance::Derived, ExpectedValue::Flag(true));
    // chi(E) = -(r^2/2) E^2 = -2 * (-4).
    fx.expect("chi_reduced", Provenance::Derived, ExpectedValue::Number(rat(8)));
    fx.expect("rational", Provenance::Reported, ExpectedValue::Flag(true));
    fx
}

/// Named fixture lookup for the command line.
pub fn fixture(name: &str) -> Result<Fixture, Error> {
    match name {
        "e6" | "e6_tilde" => Ok(e6_tilde_order()),
        "crepant" => Ok(crepant_order()),
        "case2_23" => Ok(case2_23()),
        "case2_32" => Ok(case2_32()),
        "case1" => case1(&[2, 3], (2, 2)),
        "d4" => case1(&[2], (2, 2)),
        other => Err(Error::Input(format!(
            "unknown fixture `{other}`; available: {}",
            fixture_names().join(", ")
        ))),
    }
}

pub fn fixture_names() -> Vec<&'static str> {
    vec!["e6", "crepant", "case2_23", "case2_32", "case1", "d4"]
}

/// The configurations swept by the exhaustive test suites.  All graphs have
/// at most 6 vertices so that coefficient boxes stay small.
pub fn roster() -> Vec<Fixture> {
    let mut out = vec![
        e6_tilde_order(),
        crepant_order(),
        case2_23(),
        case2_32(),
        case1(&[2, 3], (2, 2)).unwrap(),
        case1(&[2], (2, 2)).unwrap(),
    ];
    for (n, q, label) in [(12, 5, "cyclic-12-5"), (5, 2, "cyclic-5-2"), (2, 1, "cyclic-2-1")] {
        out.push(Fixture::new(
            label,
            OrderConfig::unramified(cyclic(n, q).unwrap()),
        ));
    }
    // A chain of (-2)-curves all carrying ramification index 2.
    let a3 = chain_graph(&[2, 2, 2]).unwrap();
    let ram: BTreeMap<VertexId, u32> = a3
        .vertex_ids()
        .into_iter()
        .map(|id| (id, 2))
        .collect();
    out.push(Fixture::new(
        "ramified-a3",
        OrderConfig::new(a3, ram, vec![], 2).unwrap(),
    ));
    // A ramified chain met transversally by one ramified curve.
    let g = chain_graph(&[3, 2]).unwrap();
    let curve = RamCurve::new("C", 2, BTreeMap::from([(vid(2), 1)])).unwrap();
    out.push(Fixture::new(
        "ramified-chain-curve",
        OrderConfig::new(
            g,
            BTreeMap::from([(vid(1), 2)]),
            vec![curve],
            2,
        )
        .unwrap(),
    ));
    out
}

const SAMPLER_RETRIES: usize = 400;

fn sample_weight<R: Rng>(rng: &mut R, max_weight: i64) -> i64 {
    rng.random_range(2..=max_weight.max(2))
}

fn sample_graph_shape<R: Rng>(
    rng: &mut R,
    max_vertices: usize,
    max_weight: i64,
) -> Result<ResolutionGraph, Error> {
    let max_vertices = max_vertices.clamp(1, 60);
    let shape = rng.random_range(0..4u8);
    match shape {
        1 if max_vertices >= 4 => {
            let budget = (max_vertices - 1) / 3;
            let arms: Vec<Vec<i64>> = (0..3)
                .map(|_| {
                    let len = rng.random_range(1..=budget.max(1));
                    (0..len).map(|_| sample_weight(rng, max_weight)).collect()
                })
                .collect();
            star_graph(sample_weight(rng, max_weight), &arms)
        }
        2 if max_vertices >= 4 => {
            let chain_len = rng.random_range(1..=(max_vertices - 3).max(1));
            let chain: Vec<i64> = (0..chain_len).map(|_| sample_weight(rng, max_weight)).collect();
            let leaves = (sample_weight(rng, max_weight), sample_weight(rng, max_weight));
            Ok(case1(&chain, leaves)?.config.graph)
        }
        3 if max_vertices >= 6 => {
            let fx = if rng.random_bool(0.5) { case2_23() } else { case2_32() };
            Ok(fx.config.graph)
        }
        _ => {
            let len = rng.random_range(1..=max_vertices.min(12));
            let weights: Vec<i64> = (0..len).map(|_| sample_weight(rng, max_weight)).collect();
            chain_graph(&weights)
        }
    }
}

/// Seed-deterministic log terminal resolution graph with at most
/// `max_vertices` vertices and weights at most `max_weight`, drawn by
/// rejection sampling from chains, three-armed stars, and the fork/chain
/// shapes above.
pub fn random_log_terminal(
    seed: u64,
    max_vertices: usize,
    max_weight: i64,
) -> Result<ResolutionGraph, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SAMPLER_RETRIES {
        let graph = sample_graph_shape(&mut rng, max_vertices, max_weight)?;
        if graph.len() <= max_vertices && discrepancy::is_log_terminal_graph(&graph) {
            return Ok(graph);
        }
    }
    Err(Error::Internal(format!(
        "log terminal sampling exhausted {SAMPLER_RETRIES} retries for seed {seed}"
    )))
}

/// Divisor chain of the rank root: a totally ordered (under divisibility)
/// set of candidate ramification indices, so that any two drawn indices
/// automatically satisfy the node comparability condition.
fn index_chain<R: Rng>(rng: &mut R) -> (u32, Vec<u32>) {
    match rng.random_range(0..5u8) {
        0 => (2, vec![1, 2]),
        1 => (3, vec![1, 3]),
        2 => (4, vec![1, 2, 4]),
        3 => (6, vec![1, 2, 6]),
        _ => (6, vec![1, 3, 6]),
    }
}

/// Seed-deterministic order configuration describing a log terminal order
/// on a minimal resolution: the graph is log terminal, the canonical
/// functional is nonnegative on every vertex, and `min a_i e_i > -1`.
/// Ramification indices are drawn from one divisibility chain, so the node
/// conditions hold by construction; a few transverse ramified curves may be
/// attached to vertices.
pub fn random_order_config(
    seed: u64,
    max_vertices: usize,
    max_weight: i64,
) -> Result<OrderConfig, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15);
    for attempt in 0..SAMPLER_RETRIES as u64 {
        let graph = random_log_terminal(
            seed.wrapping_add(attempt.wrapping_mul(0x5851_F42D_4C95_7F2D)),
            max_vertices,
            max_weight,
        )?;
        let (rank_root, chain) = index_chain(&mut rng);
        let ram_choices: Vec<u32> = chain.iter().copied().filter(|&e| e >= 2).collect();

        let mut exc_ram = BTreeMap::new();
        for id in graph.vertex_ids() {
            if rng.random_bool(0.5) {
                exc_ram.insert(id, ram_choices[rng.random_range(0..ram_choices.len())]);
            }
        }
        let mut curves = Vec::new();
        let n_curves = rng.random_range(0..=2u8);
        for c in 0..n_curves {
            let ids = graph.vertex_ids();
            let at = ids[rng.random_range(0..ids.len())].clone();
            let idx = ram_choices[rng.random_range(0..ram_choices.len())];
            curves.push(RamCurve::new(
                &format!("C{}", c + 1),
                idx,
                BTreeMap::from([(at, 1)]),
            )?);
        }
        let config = OrderConfig::new(graph, exc_ram, curves, rank_root)?;
        if !config.validate().ok() {
            continue;
        }
        // Keep only data that really describes a minimal resolution of a
        // log terminal order: canonical functional nef, min a_i e_i > -1.
        let nef = config.graph.vertices().iter().all(|v| {
            config
                .canonical_dot(&Divisor::single(&v.id))
                .map(|k| k >= rat(0))
                .unwrap_or(false)
        });
        if !nef {
            continue;
        }
        let cls = discrepancy::classify(&config)?;
        if cls.log_terminal {
            return Ok(config);
        }
    }
    Err(Error::Internal(format!(
        "order sampling exhausted {SAMPLER_RETRIES} retries for seed {seed}"
    )))
}
