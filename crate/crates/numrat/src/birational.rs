//! Blowups and blowdowns of order configurations, divisor transport across
//! them, towers of such maps, the N-cycles obtained by contracting and
//! pulling back, the diagonalisation identity, and minimalization.
//!
//! Centres are restricted to points where at most two components meet, each
//! transversally with local multiplicity 1; that is the only situation the
//! ramification transport rules cover.  All transformations are pure: they
//! return new configurations and leave their inputs untouched.

use std::collections::BTreeMap;

use num_traits::Signed;

use crate::lattice::{rat, Divisor, Rational, VertexId};
use crate::model::{GraphVertex, OrderConfig, RamCurve, ResolutionGraph};
use crate::Error;

/// A component of the configuration that a centre point can lie on: an
/// exceptional curve (vertex of the graph) or a ramification curve.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ComponentRef {
    Vertex(VertexId),
    Curve(String),
}

impl std::fmt::Display for ComponentRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ComponentRef::Vertex(v) => write!(f, "vertex `{v}`"),
            ComponentRef::Curve(c) => write!(f, "curve `{c}`"),
        }
    }
}

/// Where to blow up: a point lying on zero, one, or two components.  Two
/// components must actually meet transversally.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BlowupCenter {
    pub through: Vec<ComponentRef>,
}

impl BlowupCenter {
    /// A point on no tracked component.
    pub fn smooth_point() -> Self {
        BlowupCenter { through: Vec::new() }
    }

    /// A generic point of one component.
    pub fn on(c: ComponentRef) -> Self {
        BlowupCenter { through: vec![c] }
    }

    /// A transverse intersection point of two components.
    pub fn node(a: ComponentRef, b: ComponentRef) -> Self {
        BlowupCenter { through: vec![a, b] }
    }

    pub fn on_vertex(id: &str) -> Self {
        BlowupCenter::on(ComponentRef::Vertex(id.to_string()))
    }

    pub fn on_curve(id: &str) -> Self {
        BlowupCenter::on(ComponentRef::Curve(id.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Blowup,
    Blowdown,
}

/// One elementary birational modification.  `vertex` is the exceptional
/// curve created (blowup) or removed (blowdown); `through` records which
/// components it meets, each transversally once.  This is enough to
/// replay the map and to transport divisors exactly in both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BirationalMap {
    pub kind: MapKind,
    pub vertex: VertexId,
    pub through: Vec<ComponentRef>,
}

impl BirationalMap {
    /// Multiplicity of the centre on a divisor of the smaller surface: the
    /// sum of the divisor's coefficients on the components through it.
    fn center_multiplicity(&self, d: &Divisor) -> Rational {
        let mut m = rat(0);
        for c in &self.through {
            if let ComponentRef::Vertex(v) = c {
                m += d.coeff(v);
            }
        }
        m
    }
}

/// Transport a divisor from the smaller surface to the larger one:
/// total transform, `D + (multiplicity of the centre on D) * E0`.  This is
/// an isometry of intersection lattices.
pub fn pullback(map: &BirationalMap, d: &Divisor) -> Divisor {
    let mut out = d.clone();
    let m = map.center_multiplicity(d);
    out.add_to(&map.vertex, &m);
    out
}

/// Transport a divisor from the larger surface to the smaller one: drop the
/// coefficient of the exceptional curve.
pub fn pushforward(map: &BirationalMap, d: &Divisor) -> Divisor {
    let mut out = d.clone();
    out.set(&map.vertex, rat(0));
    out
}

/// The ramification index `e1` governing the stability formula at a centre:
/// the largest ramification index among the components through it, or 1
/// when none is ramified.
pub fn center_index(config: &OrderConfig, center: &BlowupCenter) -> Result<u32, Error> {
    let mut e1 = 1u32;
    for c in &center.through {
        let e = match c {
            ComponentRef::Vertex(v) => {
                config.graph.require_vertex(v)?;
                config.exc_index(v)
            }
            ComponentRef::Curve(id) => {
                config
                    .curve(id)
                    .ok_or_else(|| Error::UnknownCurve(id.clone()))?
                    .index
            }
        };
        e1 = e1.max(e);
    }
    Ok(e1)
}

/// Smallest unused id of the form "E{k}".
fn fresh_vertex_id(config: &OrderConfig) -> VertexId {
    for k in 0.. {
        let id = format!("E{k}");
        if !config.graph.has_vertex(&id) && config.curve(&id).is_none() {
            return id;
        }
    }
    unreachable!()
}

fn rebuild_graph(
    vertices: Vec<GraphVertex>,
    edges: BTreeMap<(VertexId, VertexId), u32>,
) -> Result<ResolutionGraph, Error> {
    ResolutionGraph::new(
        vertices,
        edges.into_iter().map(|((a, b), m)| (a, b, m)).collect(),
    )
}

fn rebuild_config(
    graph: ResolutionGraph,
    exc_ram: BTreeMap<VertexId, u32>,
    curves: Vec<RamCurve>,
    rank_root: u32,
) -> Result<OrderConfig, Error> {
    OrderConfig::new(graph, exc_ram, curves, rank_root)
}

fn validate_center(config: &OrderConfig, center: &BlowupCenter) -> Result<(), Error> {
    if center.through.len() > 2 {
        return Err(Error::Input(format!(
            "a centre lies on at most 2 components, got {}",
            center.through.len()
        )));
    }
    if center.through.len() == 2 && center.through[0] == center.through[1] {
        return Err(Error::Input(
            "the two components through a centre must be distinct".into(),
        ));
    }
    for c in &center.through {
        match c {
            ComponentRef::Vertex(v) => {
                config.graph.require_vertex(v)?;
            }
            ComponentRef::Curve(id) => {
                config
                    .curve(id)
                    .ok_or_else(|| Error::UnknownCurve(id.clone()))?;
            }
        }
    }
    if center.through.len() == 2 {
        // The two components must meet with a spare transverse intersection.
        let (a, b) = (&center.through[0], &center.through[1]);
        match (a, b) {
            (ComponentRef::Vertex(u), ComponentRef::Vertex(v)) => {
                if config.graph.edge_mult(u, v) == 0 {
                    return Err(Error::Input(format!(
                        "vertices `{u}` and `{v}` do not meet"
                    )));
                }
            }
            (ComponentRef::Vertex(v), ComponentRef::Curve(c))
            | (ComponentRef::Curve(c), ComponentRef::Vertex(v)) => {
                let curve = config.curve(c).expect("checked above");
                let meets = curve.meets.get(v).copied().unwrap_or(0);
                if meets == 0 {
                    return Err(Error::Input(format!(
                        "curve `{c}` does not meet vertex `{v}`"
                    )));
                }
                let distinct = curve.distinct_points.get(v).copied().unwrap_or(0);
                if distinct != meets {
                    return Err(Error::Pattern(format!(
                        "curve `{c}` meets vertex `{v}` non-transversally; \
                         only nodal centres are supported"
                    )));
                }
            }
            // Curve-curve intersections are not tracked by the model, so a
            // node of two ramification curves is taken on trust.
            (ComponentRef::Curve(_), ComponentRef::Curve(_)) => {}
        }
        // Two ramified components through a node need comparable indices.
        let e_a = component_index(config, a);
        let e_b = component_index(config, b);
        if e_a >= 2 && e_b >= 2 {
            let (lo, hi) = (e_a.min(e_b), e_a.max(e_b));
            if hi % lo != 0 {
                return Err(Error::Hypothesis(format!(
                    "ramification indices {e_a} and {e_b} at the centre are \
                     incomparable under divisibility"
                )));
            }
        }
    }
    Ok(())
}

fn component_index(config: &OrderConfig, c: &ComponentRef) -> u32 {
    match c {
        ComponentRef::Vertex(v) => config.exc_index(v),
        ComponentRef::Curve(id) => config.curve(id).map(|c| c.index).unwrap_or(1),
    }
}

/// Blow up a point of the configuration.  The new exceptional curve has
/// self-intersection -1 and genus 0; each component through the centre
/// loses one mutual intersection and one from its self-intersection, and
/// meets the new curve transversally once.  The new curve is unramified
/// unless the centre is a node of the ramification divisor, in which case
/// it carries the smaller of the two indices.
pub fn blowup(
    config: &OrderConfig,
    center: &BlowupCenter,
) -> Result<(OrderConfig, BirationalMap), Error> {
    validate_center(config, center)?;
    let e0_id = fresh_vertex_id(config);

    let mut vertices: Vec<GraphVertex> = config.graph.vertices().to_vec();
    let mut edges: BTreeMap<(VertexId, VertexId), u32> =
        config.graph.edges().map(|(k, m)| (k.clone(), *m)).collect();
    let mut curves = config.curves.clone();
    let mut exc_ram: BTreeMap<VertexId, u32> = config
        .ramified_vertices()
        .map(|(v, e)| (v.clone(), e))
        .collect();

    vertices.push(GraphVertex::new(&e0_id, -1, 0));

    for c in &center.through {
        match c {
            ComponentRef::Vertex(v) => {
                let vert = vertices
                    .iter_mut()
                    .find(|x| x.id == *v)
                    .expect("validated above");
                vert.self_intersection -= 1;
                edges.insert(edge_key(v, &e0_id), 1);
            }
            ComponentRef::Curve(id) => {
                let curve = curves
                    .iter_mut()
                    .find(|x| x.id == *id)
                    .expect("validated above");
                curve.meets.insert(e0_id.clone(), 1);
                curve.distinct_points.insert(e0_id.clone(), 1);
            }
        }
    }

    if center.through.len() == 2 {
        match (&center.through[0], &center.through[1]) {
            (ComponentRef::Vertex(u), ComponentRef::Vertex(v)) => {
                let key = edge_key(u, v);
                let m = edges.get_mut(&key).expect("validated above");
                *m -= 1;
                if *m == 0 {
                    edges.remove(&key);
                }
            }
            (ComponentRef::Vertex(v), ComponentRef::Curve(c))
            | (ComponentRef::Curve(c), ComponentRef::Vertex(v)) => {
                let curve = curves
                    .iter_mut()
                    .find(|x| x.id == *c)
                    .expect("validated above");
                decrement_entry(&mut curve.meets, v);
                decrement_entry(&mut curve.distinct_points, v);
            }
            (ComponentRef::Curve(_), ComponentRef::Curve(_)) => {}
        }
        let e_min = component_index(config, &center.through[0])
            .min(component_index(config, &center.through[1]));
        if e_min >= 2 {
            exc_ram.insert(e0_id.clone(), e_min);
        }
    }

    let graph = rebuild_graph(vertices, edges)?;
    let after = rebuild_config(graph, exc_ram, curves, config.rank_root)?;
    let map = BirationalMap {
        kind: MapKind::Blowup,
        vertex: e0_id,
        through: center.through.clone(),
    };
    Ok((after, map))
}

fn edge_key(a: &str, b: &str) -> (VertexId, VertexId) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

fn decrement_entry(map: &mut BTreeMap<VertexId, u32>, key: &str) {
    if let Some(m) = map.get_mut(key) {
        *m -= 1;
        if *m == 0 {
            map.remove(key);
        }
    }
}

/// Contract a (-1)-curve whose incidence pattern is the image of a single
/// admissible blowup: genus 0, self-intersection -1, at most two incident
/// components each meeting it transversally once, and a ramification index
/// matching the blowup rules.  Inverse of `blowup`.
pub fn blowdown(
    config: &OrderConfig,
    vertex: &str,
) -> Result<(OrderConfig, BirationalMap), Error> {
    let v = config.graph.require_vertex(vertex)?;
    if v.self_intersection != -1 || v.genus != 0 {
        return Err(Error::Pattern(format!(
            "vertex `{vertex}` has self-intersection {} and genus {}; \
             only genus-0 (-1)-curves contract",
            v.self_intersection, v.genus
        )));
    }

    let mut through: Vec<ComponentRef> = Vec::new();
    for (w, mult) in config.graph.neighbours(vertex) {
        if mult != 1 {
            return Err(Error::Pattern(format!(
                "vertex `{vertex}` meets `{w}` with multiplicity {mult}; \
                 not a recognized blowup pattern"
            )));
        }
        through.push(ComponentRef::Vertex(w));
    }
    for curve in &config.curves {
        if let Some(&m) = curve.meets.get(vertex) {
            if m != 1 {
                return Err(Error::Pattern(format!(
                    "curve `{}` meets `{vertex}` with multiplicity {m}; \
                     not a recognized blowup pattern",
                    curve.id
                )));
            }
            through.push(ComponentRef::Curve(curve.id.clone()));
        }
    }
    if through.len() > 2 {
        return Err(Error::Pattern(format!(
            "vertex `{vertex}` meets {} components; not a recognized blowup pattern",
            through.len()
        )));
    }

    // The ramification index must match what a blowup would have assigned.
    let expected_e0 = if through.len() == 2 {
        let e_a = component_index(config, &through[0]);
        let e_b = component_index(config, &through[1]);
        if e_a >= 2 && e_b >= 2 && !e_a.max(e_b).is_multiple_of(e_a.min(e_b)) {
            return Err(Error::Pattern(format!(
                "indices {e_a}, {e_b} at `{vertex}` are incomparable; \
                 not a recognized blowup pattern"
            )));
        }
        e_a.min(e_b)
    } else {
        1
    };
    if config.exc_index(vertex) != expected_e0 {
        return Err(Error::Pattern(format!(
            "vertex `{vertex}` has ramification index {} where a blowup \
             would give {expected_e0}; not a recognized blowup pattern",
            config.exc_index(vertex)
        )));
    }

    // Incident vertices regain self-intersection; all meetings have
    // multiplicity 1, so each gain is exactly 1.
    for c in &through {
        if let ComponentRef::Vertex(w) = c {
            let gv = config.graph.require_vertex(w)?;
            if gv.self_intersection + 1 >= 0 {
                return Err(Error::Pattern(format!(
                    "contracting `{vertex}` would give `{w}` nonnegative \
                     self-intersection"
                )));
            }
        }
    }

    let mut vertices: Vec<GraphVertex> = config
        .graph
        .vertices()
        .iter()
        .filter(|x| x.id != vertex)
        .cloned()
        .collect();
    let mut edges: BTreeMap<(VertexId, VertexId), u32> = config
        .graph
        .edges()
        .filter(|((a, b), _)| a != vertex && b != vertex)
        .map(|(k, m)| (k.clone(), *m))
        .collect();
    let mut curves = config.curves.clone();
    for curve in &mut curves {
        curve.meets.remove(vertex);
        curve.distinct_points.remove(vertex);
    }
    let exc_ram: BTreeMap<VertexId, u32> = config
        .ramified_vertices()
        .filter(|(w, _)| w.as_str() != vertex)
        .map(|(w, e)| (w.clone(), e))
        .collect();

    for c in &through {
        if let ComponentRef::Vertex(w) = c {
            let vert = vertices.iter_mut().find(|x| x.id == *w).expect("present");
            vert.self_intersection += 1;
        }
    }
    if through.len() == 2 {
        match (&through[0], &through[1]) {
            (ComponentRef::Vertex(u), ComponentRef::Vertex(w)) => {
                *edges.entry(edge_key(u, w)).or_insert(0) += 1;
            }
            (ComponentRef::Vertex(w), ComponentRef::Curve(c))
            | (ComponentRef::Curve(c), ComponentRef::Vertex(w)) => {
                let curve = curves.iter_mut().find(|x| x.id == *c).expect("present");
                *curve.meets.entry(w.clone()).or_insert(0) += 1;
                *curve.distinct_points.entry(w.clone()).or_insert(0) += 1;
            }
            (ComponentRef::Curve(_), ComponentRef::Curve(_)) => {}
        }
    }

    let graph = rebuild_graph(vertices, edges)?;
    let after = rebuild_config(graph, exc_ram, curves, config.rank_root)?;
    let map = BirationalMap {
        kind: MapKind::Blowdown,
        vertex: vertex.to_string(),
        through,
    };
    Ok((after, map))
}

/// A chain of elementary maps.  Replaying `maps` from `base` reproduces
/// `top`; builders verify this.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tower {
    pub base: OrderConfig,
    pub maps: Vec<BirationalMap>,
    pub top: OrderConfig,
}

/// Apply one recorded map to a configuration.
fn apply_map(config: &OrderConfig, map: &BirationalMap) -> Result<OrderConfig, Error> {
    match map.kind {
        MapKind::Blowup => {
            let center = BlowupCenter {
                through: map.through.clone(),
            };
            let (after, m) = blowup(config, &center)?;
            if m.vertex != map.vertex {
                return Err(Error::Internal(format!(
                    "replay created `{}` where the record says `{}`",
                    m.vertex, map.vertex
                )));
            }
            Ok(after)
        }
        MapKind::Blowdown => Ok(blowdown(config, &map.vertex)?.0),
    }
}

impl Tower {
    pub fn identity(config: OrderConfig) -> Tower {
        Tower {
            base: config.clone(),
            maps: Vec::new(),
            top: config,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.maps.is_empty()
    }

    /// Build a tower by blowing up a sequence of centres, each given on the
    /// previously obtained configuration.
    pub fn from_blowups(base: OrderConfig, centers: &[BlowupCenter]) -> Result<Tower, Error> {
        let mut maps = Vec::new();
        let mut top = base.clone();
        for center in centers {
            let (next, map) = blowup(&top, center)?;
            maps.push(map);
            top = next;
        }
        Ok(Tower { base, maps, top })
    }

    /// Check the structural invariant: replaying the maps from the base
    /// reproduces the top configuration exactly.
    pub fn verify_replay(&self) -> Result<(), Error> {
        let mut cfg = self.base.clone();
        for map in &self.maps {
            cfg = apply_map(&cfg, map)?;
        }
        if cfg != self.top {
            return Err(Error::Internal(
                "tower replay does not reproduce the top configuration".into(),
            ));
        }
        Ok(())
    }

    /// Ids of the exceptional curves the tower's blowups created, in
    /// creation order.
    pub fn created_vertices(&self) -> Vec<VertexId> {
        self.maps
            .iter()
            .filter(|m| m.kind == MapKind::Blowup)
            .map(|m| m.vertex.clone())
            .collect()
    }

    /// Transport a divisor on the base to the top configuration.
    pub fn pullback_to_top(&self, d: &Divisor) -> Divisor {
        let mut out = d.clone();
        for map in &self.maps {
            out = match map.kind {
                MapKind::Blowup => pullback(map, &out),
                MapKind::Blowdown => pushforward(map, &out),
            };
        }
        out
    }

    /// Transport a divisor on the top configuration back to the base.
    pub fn pushforward_to_base(&self, d: &Divisor) -> Divisor {
        let mut out = d.clone();
        for map in self.maps.iter().rev() {
            out = match map.kind {
                MapKind::Blowup => pushforward(map, &out),
                MapKind::Blowdown => pullback(map, &out),
            };
        }
        out
    }
}

/// `N_i` for a vertex of the tower's top configuration: contract every
/// other contractible (-1)-curve, push the vertex down, and pull the result
/// back up.  For a tower over a minimal base this computes the cycle whose
/// pairings diagonalise the created part of the lattice.
pub fn n_cycle(tower: &Tower, vertex: &str) -> Result<Divisor, Error> {
    tower.top.graph.require_vertex(vertex)?;
    let mut cfg = tower.top.clone();
    let mut applied: Vec<BirationalMap> = Vec::new();
    loop {
        let mut candidates: Vec<VertexId> = cfg
            .graph
            .vertices()
            .iter()
            .filter(|v| v.id != vertex && v.self_intersection == -1 && v.genus == 0)
            .map(|v| v.id.clone())
            .collect();
        candidates.sort();
        if candidates.is_empty() {
            break;
        }
        let mut contracted = false;
        let mut last_err = None;
        for cand in &candidates {
            match blowdown(&cfg, cand) {
                Ok((next, map)) => {
                    cfg = next;
                    applied.push(map);
                    contracted = true;
                    break;
                }
                Err(e) => last_err = Some(e),
            }
        }
        if !contracted {
            return Err(last_err.unwrap_or_else(|| {
                Error::Internal("contraction blocked with no diagnostic".into())
            }));
        }
    }
    let mut d = Divisor::single(vertex);
    for map in applied.iter().rev() {
        d = pullback(map, &d);
    }
    Ok(d)
}

/// Contract canonically negative (-1)-curves in id order until the
/// canonical functional is nonnegative on every vertex, returning the
/// minimal configuration and the tower of contractions (base: the input,
/// top: the minimal configuration).
pub fn minimalize(config: &OrderConfig) -> Result<(OrderConfig, Tower), Error> {
    let report = config.validate();
    if !report.ok() {
        return Err(Error::Hypothesis(format!(
            "configuration is not valid: {}",
            report.summary()
        )));
    }
    let mut cfg = config.clone();
    let mut maps = Vec::new();
    loop {
        let mut candidates: Vec<VertexId> = Vec::new();
        for v in cfg.graph.vertices() {
            if v.self_intersection == -1 && v.genus == 0 {
                let k = cfg.canonical_dot(&Divisor::single(&v.id))?;
                if k.is_negative() {
                    candidates.push(v.id.clone());
                }
            }
        }
        candidates.sort();
        let Some(vertex) = candidates.into_iter().next() else { break };
        let (next, map) = blowdown(&cfg, &vertex)?;
        maps.push(map);
        cfg = next;
    }
    let tower = Tower {
        base: config.clone(),
        maps,
        top: cfg.clone(),
    };
    Ok((cfg, tower))
}
