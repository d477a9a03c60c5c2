//! Resolution graphs decorated with ramification data.
//!
//! A `ResolutionGraph` is the dual graph of a resolution: vertices carry a
//! self-intersection (negative) and a genus, edges carry an intersection
//! multiplicity.  An `OrderConfig` adds what is needed to describe an order
//! on the surface: ramification indices on exceptional curves (`exc_ram`, 1
//! where absent), strict transforms of ramification curves (`RamCurve`), and
//! the square root of the order's rank.
//!
//! Construction rejects structurally malformed data (duplicate ids, self
//! edges, nonnegative self-intersections).  Semantic requirements such as
//! negative definiteness, connectivity, index divisibility and transversality
//! are reported by [`OrderConfig::validate`] instead, so that formula
//! evaluation still works on configurations that fail them; only the
//! rationality and classification entry points insist on a clean report.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;

use crate::lattice::{rat, Divisor, IntersectionForm, Rational, VertexId};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphVertex {
    pub id: VertexId,
    /// Self-intersection of the exceptional curve; always negative.
    pub self_intersection: i64,
    pub genus: u32,
}

impl GraphVertex {
    pub fn new(id: &str, self_intersection: i64, genus: u32) -> Self {
        GraphVertex {
            id: id.to_string(),
            self_intersection,
            genus,
        }
    }

    /// `b = -E^2`, the weight used in most closed formulas.
    pub fn weight(&self) -> i64 {
        -self.self_intersection
    }
}

/// Dual graph of a resolution.  The empty graph is allowed: it is the
/// resolution of a smooth point and the base of towers built purely by
/// blowing up.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResolutionGraph {
    vertices: Vec<GraphVertex>,
    // Key is the unordered pair, stored sorted; multiplicity is >= 1.
    edges: BTreeMap<(VertexId, VertexId), u32>,
}

fn edge_key(a: &str, b: &str) -> (VertexId, VertexId) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl ResolutionGraph {
    pub fn empty() -> Self {
        ResolutionGraph::default()
    }

    /// Edges are `(a, b, mult)`.  Rejects duplicate ids, unknown endpoints,
    /// self edges, repeated pairs, zero multiplicities, and nonnegative
    /// self-intersections.
    pub fn new(
        vertices: Vec<GraphVertex>,
        edges: Vec<(String, String, u32)>,
    ) -> Result<Self, Error> {
        let mut ids = BTreeSet::new();
        for v in &vertices {
            if !ids.insert(v.id.clone()) {
                return Err(Error::Input(format!("duplicate vertex id `{}`", v.id)));
            }
            if v.self_intersection >= 0 {
                return Err(Error::Input(format!(
                    "vertex `{}` must have negative self-intersection, got {}",
                    v.id, v.self_intersection
                )));
            }
        }
        let mut edge_map = BTreeMap::new();
        for (a, b, mult) in edges {
            if a == b {
                return Err(Error::Input(format!("self edge at `{a}`")));
            }
            if !ids.contains(&a) {
                return Err(Error::UnknownVertex(a));
            }
            if !ids.contains(&b) {
                return Err(Error::UnknownVertex(b));
            }
            if mult == 0 {
                return Err(Error::Input(format!("edge {a}-{b} has multiplicity 0")));
            }
            if edge_map.insert(edge_key(&a, &b), mult).is_some() {
                return Err(Error::Input(format!("repeated edge {a}-{b}")));
            }
        }
        Ok(ResolutionGraph {
            vertices,
            edges: edge_map,
        })
    }

    pub fn vertices(&self) -> &[GraphVertex] {
        &self.vertices
    }

    pub fn vertex(&self, id: &str) -> Option<&GraphVertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    pub fn require_vertex(&self, id: &str) -> Result<&GraphVertex, Error> {
        self.vertex(id).ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn has_vertex(&self, id: &str) -> bool {
        self.vertex(id).is_some()
    }

    pub fn vertex_ids(&self) -> Vec<VertexId> {
        self.vertices.iter().map(|v| v.id.clone()).collect()
    }

    pub fn vertex_id_set(&self) -> BTreeSet<VertexId> {
        self.vertices.iter().map(|v| v.id.clone()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    /// Edges as `((a, b), mult)` with `a < b`, in key order.
    pub fn edges(&self) -> impl Iterator<Item = (&(VertexId, VertexId), &u32)> {
        self.edges.iter()
    }

    pub fn edge_mult(&self, a: &str, b: &str) -> u32 {
        self.edges.get(&edge_key(a, b)).copied().unwrap_or(0)
    }

    /// Neighbours of `id` with edge multiplicities, in id order.
    pub fn neighbours(&self, id: &str) -> Vec<(VertexId, u32)> {
        let mut out = Vec::new();
        for ((a, b), mult) in &self.edges {
            if a == id {
                out.push((b.clone(), *mult));
            } else if b == id {
                out.push((a.clone(), *mult));
            }
        }
        out.sort();
        out
    }

    pub fn intersection_form(&self) -> IntersectionForm {
        let n = self.vertices.len();
        let index: BTreeMap<&str, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.as_str(), i))
            .collect();
        let mut m = vec![vec![0i64; n]; n];
        for (i, v) in self.vertices.iter().enumerate() {
            m[i][i] = v.self_intersection;
        }
        for ((a, b), mult) in &self.edges {
            let i = index[a.as_str()];
            let j = index[b.as_str()];
            m[i][j] = *mult as i64;
            m[j][i] = *mult as i64;
        }
        IntersectionForm::new(self.vertex_ids(), m).expect("graph data is structurally sound")
    }

    /// The empty graph counts as connected.
    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let form = self.intersection_form();
        let support = self.vertex_id_set();
        form.connected_components(&support)
            .map(|c| c.len() == 1)
            .unwrap_or(false)
    }

    /// Induced subgraph on a subset of vertices, keeping vertex order.
    pub fn restrict(&self, support: &BTreeSet<VertexId>) -> Result<ResolutionGraph, Error> {
        for id in support {
            self.require_vertex(id)?;
        }
        let vertices = self
            .vertices
            .iter()
            .filter(|v| support.contains(&v.id))
            .cloned()
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|((a, b), _)| support.contains(a) && support.contains(b))
            .map(|((a, b), m)| (a.clone(), b.clone(), *m))
            .collect();
        ResolutionGraph::new(vertices, edges)
    }
}

/// Strict transform of a ramification curve: its index and how it meets the
/// exceptional curves.  `meets` records total intersection numbers;
/// `distinct_points` records at how many distinct points each meeting
/// happens (equal to the multiplicity when every crossing is transverse,
/// which is the default).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamCurve {
    pub id: String,
    pub index: u32,
    pub meets: BTreeMap<VertexId, u32>,
    pub distinct_points: BTreeMap<VertexId, u32>,
}

impl RamCurve {
    pub fn new(id: &str, index: u32, meets: BTreeMap<VertexId, u32>) -> Result<Self, Error> {
        let distinct = meets.clone();
        RamCurve::with_distinct_points(id, index, meets, distinct)
    }

    pub fn with_distinct_points(
        id: &str,
        index: u32,
        meets: BTreeMap<VertexId, u32>,
        mut distinct_points: BTreeMap<VertexId, u32>,
    ) -> Result<Self, Error> {
        if index < 2 {
            return Err(Error::Input(format!(
                "ramification curve `{id}` must have index >= 2, got {index}"
            )));
        }
        for (v, mult) in &meets {
            if *mult == 0 {
                return Err(Error::Input(format!(
                    "curve `{id}` meets `{v}` with multiplicity 0; drop the entry instead"
                )));
            }
            let points = *distinct_points.entry(v.clone()).or_insert(*mult);
            if points == 0 || points > *mult {
                return Err(Error::Input(format!(
                    "curve `{id}` at `{v}`: distinct point count {points} must be between 1 and the multiplicity {mult}"
                )));
            }
        }
        distinct_points.retain(|v, _| meets.contains_key(v));
        Ok(RamCurve {
            id: id.to_string(),
            index,
            meets,
            distinct_points,
        })
    }

    /// Intersection number with a divisor supported on the graph.
    pub fn dot(&self, d: &Divisor) -> Rational {
        let mut total = Rational::zero();
        for (v, mult) in &self.meets {
            total += d.coeff(v) * rat(*mult as i64);
        }
        total
    }
}

/// Everything needed to evaluate the order's numerical invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderConfig {
    pub graph: ResolutionGraph,
    // Only indices >= 2 are stored; absent means unramified.
    exc_ram: BTreeMap<VertexId, u32>,
    pub curves: Vec<RamCurve>,
    pub rank_root: u32,
}

impl OrderConfig {
    pub fn new(
        graph: ResolutionGraph,
        exc_ram: BTreeMap<VertexId, u32>,
        curves: Vec<RamCurve>,
        rank_root: u32,
    ) -> Result<Self, Error> {
        if rank_root == 0 {
            return Err(Error::Input("rank root must be positive".into()));
        }
        let mut normalized = BTreeMap::new();
        for (v, e) in exc_ram {
            graph.require_vertex(&v)?;
            if e == 0 {
                return Err(Error::Input(format!(
                    "ramification index 0 on `{v}`; use 1 for unramified"
                )));
            }
            if e >= 2 {
                normalized.insert(v, e);
            }
        }
        let mut curve_ids = BTreeSet::new();
        for c in &curves {
            if graph.has_vertex(&c.id) {
                return Err(Error::Input(format!(
                    "curve id `{}` collides with a vertex id",
                    c.id
                )));
            }
            if !curve_ids.insert(c.id.clone()) {
                return Err(Error::Input(format!("duplicate curve id `{}`", c.id)));
            }
            for v in c.meets.keys() {
                graph.require_vertex(v)?;
            }
        }
        Ok(OrderConfig {
            graph,
            exc_ram: normalized,
            curves,
            rank_root,
        })
    }

    /// Unramified configuration over a graph (trivial order of rank 1).
    pub fn unramified(graph: ResolutionGraph) -> Self {
        OrderConfig::new(graph, BTreeMap::new(), Vec::new(), 1)
            .expect("unramified configuration is always structurally sound")
    }

    /// Ramification index of an exceptional curve; 1 when unramified.
    pub fn exc_index(&self, id: &str) -> u32 {
        self.exc_ram.get(id).copied().unwrap_or(1)
    }

    /// Ramified exceptional curves with their indices (all >= 2).
    pub fn ramified_vertices(&self) -> impl Iterator<Item = (&VertexId, u32)> {
        self.exc_ram.iter().map(|(v, e)| (v, *e))
    }

    pub fn set_exc_index(&mut self, id: &str, e: u32) -> Result<(), Error> {
        self.graph.require_vertex(id)?;
        if e == 0 {
            return Err(Error::Input(format!(
                "ramification index 0 on `{id}`; use 1 for unramified"
            )));
        }
        if e >= 2 {
            self.exc_ram.insert(id.to_string(), e);
        } else {
            self.exc_ram.remove(id);
        }
        Ok(())
    }

    pub fn curve(&self, id: &str) -> Option<&RamCurve> {
        self.curves.iter().find(|c| c.id == id)
    }

    pub fn rank(&self) -> u64 {
        (self.rank_root as u64) * (self.rank_root as u64)
    }

    /// `rank / 2` as an exact rational, the prefactor of most chi formulas.
    pub fn half_rank(&self) -> Rational {
        rat(self.rank() as i64) / rat(2)
    }

    /// Discriminant pairing: sum of `(1 - 1/e_D) (D . E)` over all ramified
    /// components, exceptional and curve alike.
    pub fn delta_dot(&self, e: &Divisor) -> Result<Rational, Error> {
        let form = self.graph.intersection_form();
        let mut total = Rational::zero();
        for (v, idx) in &self.exc_ram {
            let factor = rat(1) - rat(1) / rat(*idx as i64);
            let pairing = form.pair_with_vertex(e, v)?;
            total += factor * pairing;
        }
        for c in &self.curves {
            let factor = rat(1) - rat(1) / rat(c.index as i64);
            total += factor * c.dot(e);
        }
        // Vertices named by `e` must exist even if the config is unramified.
        for (v, _) in e.iter() {
            self.graph.require_vertex(v)?;
        }
        Ok(total)
    }

    /// Canonical pairing of the order: `K . E` where `K` restricted to the
    /// exceptional locus has `K . E_i = b_i + 2 g_i - 2` plus the
    /// discriminant contribution.
    pub fn canonical_dot(&self, e: &Divisor) -> Result<Rational, Error> {
        let mut total = Rational::zero();
        for (v, coeff) in e.iter() {
            let vertex = self.graph.require_vertex(v)?;
            let k_dot = vertex.weight() + 2 * (vertex.genus as i64) - 2;
            total += coeff * rat(k_dot);
        }
        Ok(total + self.delta_dot(e)?)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let form = self.graph.intersection_form();
        if !form.is_negative_definite() {
            violations.push(Violation {
                code: ViolationCode::NotNegativeDefinite,
                subject: "graph".into(),
                message: "intersection form is not negative definite".into(),
            });
        }
        if !self.graph.is_connected() {
            violations.push(Violation {
                code: ViolationCode::Disconnected,
                subject: "graph".into(),
                message: "graph is not connected".into(),
            });
        }
        let root = self.rank_root as u64;
        for (v, e) in &self.exc_ram {
            if !root.is_multiple_of(*e as u64) {
                violations.push(Violation {
                    code: ViolationCode::IndexDivisibility,
                    subject: v.clone(),
                    message: format!(
                        "index {e} on `{v}` does not divide the rank root {root}"
                    ),
                });
            }
        }
        for c in &self.curves {
            if !root.is_multiple_of(c.index as u64) {
                violations.push(Violation {
                    code: ViolationCode::IndexDivisibility,
                    subject: c.id.clone(),
                    message: format!(
                        "index {} on curve `{}` does not divide the rank root {root}",
                        c.index, c.id
                    ),
                });
            }
        }
        // Meetings of two ramified components: indices must be comparable
        // under divisibility and every crossing transverse.
        for ((a, b), mult) in self.graph.edges() {
            let ea = self.exc_index(a);
            let eb = self.exc_index(b);
            if ea >= 2 && eb >= 2 {
                if !ea.is_multiple_of(eb) && !eb.is_multiple_of(ea) {
                    violations.push(Violation {
                        code: ViolationCode::IncomparableIndices,
                        subject: format!("{a}-{b}"),
                        message: format!(
                            "indices {ea} and {eb} at the node `{a}`-`{b}` divide neither way"
                        ),
                    });
                }
                if *mult != 1 {
                    violations.push(Violation {
                        code: ViolationCode::NonTransverseMeeting,
                        subject: format!("{a}-{b}"),
                        message: format!(
                            "ramified curves `{a}` and `{b}` meet with multiplicity {mult}, expected a single transverse point"
                        ),
                    });
                }
            }
        }
        for c in &self.curves {
            for (v, mult) in &c.meets {
                let ev = self.exc_index(v);
                if ev < 2 {
                    continue;
                }
                let ec = c.index;
                if !ec.is_multiple_of(ev) && !ev.is_multiple_of(ec) {
                    violations.push(Violation {
                        code: ViolationCode::IncomparableIndices,
                        subject: format!("{}-{v}", c.id),
                        message: format!(
                            "indices {ec} and {ev} at the node `{}`-`{v}` divide neither way",
                            c.id
                        ),
                    });
                }
                let points = c.distinct_points.get(v).copied().unwrap_or(*mult);
                if points != *mult {
                    violations.push(Violation {
                        code: ViolationCode::NonTransverseMeeting,
                        subject: format!("{}-{v}", c.id),
                        message: format!(
                            "curve `{}` meets `{v}` with multiplicity {mult} at {points} points; a transverse meeting needs {mult} distinct points",
                            c.id
                        ),
                    });
                }
            }
        }
        ValidationReport { violations }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationCode {
    NotNegativeDefinite,
    Disconnected,
    IndexDivisibility,
    IncomparableIndices,
    NonTransverseMeeting,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationCode::NotNegativeDefinite => "not-negative-definite",
            ViolationCode::Disconnected => "disconnected",
            ViolationCode::IndexDivisibility => "index-divisibility",
            ViolationCode::IncomparableIndices => "incomparable-indices",
            ViolationCode::NonTransverseMeeting => "non-transverse-meeting",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    pub subject: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.ok() {
            "ok".to_string()
        } else {
            self.violations
                .iter()
                .map(|v| format!("[{}] {}", v.code, v.message))
                .collect::<Vec<_>>()
                .join("; ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue;
    use crate::lattice::frac;

    fn single_vertex(b: i64, genus: u32) -> ResolutionGraph {
        ResolutionGraph::new(vec![GraphVertex::new("E", -b, genus)], vec![]).unwrap()
    }

    #[test]
    fn construction_rejects_structural_defects() {
        let dup = ResolutionGraph::new(
            vec![GraphVertex::new("a", -2, 0), GraphVertex::new("a", -3, 0)],
            vec![],
        );
        assert!(dup.is_err());
        let self_edge = ResolutionGraph::new(
            vec![GraphVertex::new("a", -2, 0)],
            vec![("a".into(), "a".into(), 1)],
        );
        assert!(self_edge.is_err());
        let nonneg = ResolutionGraph::new(vec![GraphVertex::new("a", 0, 0)], vec![]);
        assert!(nonneg.is_err());
    }

    #[test]
    fn unramified_config_validates_and_has_zero_delta() {
        let cfg = OrderConfig::unramified(catalogue::chain_graph(&[2, 2]).unwrap());
        assert!(cfg.validate().ok());
        let d = Divisor::from_int_coeffs([("v01", 1), ("v02", 1)]);
        assert_eq!(cfg.delta_dot(&d).unwrap(), rat(0));
        // K.(E1+E2) = 0 for a chain of -2 rational curves.
        assert_eq!(cfg.canonical_dot(&d).unwrap(), rat(0));
    }

    #[test]
    fn e6_tilde_pairings() {
        let cfg = catalogue::e6_tilde_order().config;
        let e = Divisor::single("E");
        assert_eq!(cfg.delta_dot(&e).unwrap(), frac(3, 2));
        assert_eq!(cfg.canonical_dot(&e).unwrap(), frac(9, 2));
        assert!(cfg.validate().ok());
    }

    #[test]
    fn crepant_vertex_pairings() {
        // One rational -4 curve, index 2, rank root 2.
        let graph = single_vertex(4, 0);
        let cfg = OrderConfig::new(
            graph,
            BTreeMap::from([("E".to_string(), 2)]),
            vec![],
            2,
        )
        .unwrap();
        let e = Divisor::single("E");
        assert_eq!(cfg.delta_dot(&e).unwrap(), rat(-2));
        assert_eq!(cfg.canonical_dot(&e).unwrap(), rat(0));
    }

    #[test]
    fn incomparable_indices_flagged_both_ways() {
        let graph = ResolutionGraph::new(
            vec![GraphVertex::new("a", -2, 0), GraphVertex::new("b", -2, 0)],
            vec![("a".into(), "b".into(), 1)],
        )
        .unwrap();
        let cfg = OrderConfig::new(
            graph,
            BTreeMap::from([("a".to_string(), 2), ("b".to_string(), 3)]),
            vec![],
            6,
        )
        .unwrap();
        let report = cfg.validate();
        assert!(!report.ok());
        assert!(report
            .violations
            .iter()
            .any(|v| v.code == ViolationCode::IncomparableIndices));
    }

    #[test]
    fn tangential_meeting_is_flagged_when_points_are_fewer_than_multiplicity() {
        let graph = single_vertex(3, 1);
        let curve = RamCurve::with_distinct_points(
            "D",
            2,
            BTreeMap::from([("E".to_string(), 3)]),
            BTreeMap::from([("E".to_string(), 1)]),
        )
        .unwrap();
        let cfg = OrderConfig::new(
            graph,
            BTreeMap::from([("E".to_string(), 2)]),
            vec![curve],
            2,
        )
        .unwrap();
        let report = cfg.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| v.code == ViolationCode::NonTransverseMeeting));
    }

    #[test]
    fn divisibility_checked_against_rank_root() {
        let cfg = OrderConfig::new(
            single_vertex(2, 0),
            BTreeMap::from([("E".to_string(), 3)]),
            vec![],
            2,
        )
        .unwrap();
        let report = cfg.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| v.code == ViolationCode::IndexDivisibility));
    }

    #[test]
    fn delta_is_linear() {
        let cfg = catalogue::e6_tilde_order().config;
        let e = Divisor::single("E");
        let e3 = e.scale(&rat(3));
        assert_eq!(
            cfg.delta_dot(&e3).unwrap(),
            rat(3) * cfg.delta_dot(&e).unwrap()
        );
    }

    #[test]
    fn restrict_keeps_interior_edges() {
        let g = catalogue::chain_graph(&[2, 3, 2]).unwrap();
        let support: BTreeSet<VertexId> = ["v01".to_string(), "v02".to_string()].into();
        let sub = g.restrict(&support).unwrap();
        assert_eq!(sub.len(), 2);
        assert_eq!(sub.edge_mult("v01", "v02"), 1);
        assert_eq!(sub.edge_mult("v02", "v03"), 0);
    }
}
