//! Instances of the stable matching problem with thresholds, critical
//! vertices/edges and per-vertex matroid constraints.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matroid::{rank, Matroid, MatroidError, MatroidSpec};
use crate::value::{Value, GRID_STEP, HALF_STEP};

/// Preference value of being unassigned.
pub const UNMATCHED_VALUE: Value = Value::ZERO;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    U,
    W,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::U => Side::W,
            Side::W => Side::U,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexRef {
    pub side: Side,
    pub index: usize,
}

impl VertexRef {
    pub const fn u(index: usize) -> Self {
        VertexRef { side: Side::U, index }
    }

    pub const fn w(index: usize) -> Self {
        VertexRef { side: Side::W, index }
    }
}

impl fmt::Display for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:{}", self.side, self.index)
    }
}

impl FromStr for VertexRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Format(format!("bad vertex key {s:?}, expected \"U:<n>\" or \"W:<n>\""));
        let (side, index) = s.split_once(':').ok_or_else(bad)?;
        let side = match side {
            "U" => Side::U,
            "W" => Side::W,
            _ => return Err(bad()),
        };
        let index = index.parse().map_err(|_| bad())?;
        Ok(VertexRef { side, index })
    }
}

/// An acceptable contract between `u` and `w`. Parallel edges are allowed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: usize,
    pub u: usize,
    pub w: usize,
    pub p_u: Value,
    pub p_w: Value,
    pub gamma_u: Value,
    pub delta_u: Value,
    pub gamma_w: Value,
    pub delta_w: Value,
    pub critical: bool,
}

impl Edge {
    /// Edge with the smallest thresholds (half and one grid step), which make
    /// any strict improvement on the grid count.
    pub fn new(id: usize, u: usize, w: usize, p_u: Value, p_w: Value) -> Edge {
        let (gamma, delta) = (Value::from_units(HALF_STEP), Value::from_units(GRID_STEP));
        Edge { id, u, w, p_u, p_w, gamma_u: gamma, delta_u: delta, gamma_w: gamma, delta_w: delta, critical: false }
    }

    pub fn with_u_thresholds(mut self, gamma: Value, delta: Value) -> Edge {
        self.gamma_u = gamma;
        self.delta_u = delta;
        self
    }

    pub fn with_w_thresholds(mut self, gamma: Value, delta: Value) -> Edge {
        self.gamma_w = gamma;
        self.delta_w = delta;
        self
    }

    pub fn critical(mut self) -> Edge {
        self.critical = true;
        self
    }

    pub fn endpoint(&self, side: Side) -> VertexRef {
        match side {
            Side::U => VertexRef::u(self.u),
            Side::W => VertexRef::w(self.w),
        }
    }

    pub fn pref(&self, side: Side) -> Value {
        match side {
            Side::U => self.p_u,
            Side::W => self.p_w,
        }
    }

    pub fn gamma(&self, side: Side) -> Value {
        match side {
            Side::U => self.gamma_u,
            Side::W => self.gamma_w,
        }
    }

    pub fn delta(&self, side: Side) -> Value {
        match side {
            Side::U => self.delta_u,
            Side::W => self.delta_w,
        }
    }

    /// Free edges never block: both thresholds infinite on both sides.
    pub fn is_free(&self) -> bool {
        [self.gamma_u, self.delta_u, self.gamma_w, self.delta_w].iter().all(|&v| v == Value::Infinity)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Instance {
    pub u_count: usize,
    pub w_count: usize,
    /// `edges[i].id == i` for valid instances.
    pub edges: Vec<Edge>,
    pub critical_vertices: BTreeSet<VertexRef>,
    /// Absent vertices have capacity 1.
    pub constraints: BTreeMap<VertexRef, MatroidSpec>,
}

/// Incident edge ids per vertex, ascending.
#[derive(Clone, Debug)]
pub struct Adjacency {
    pub u: Vec<Vec<usize>>,
    pub w: Vec<Vec<usize>>,
}

impl Adjacency {
    pub fn of(&self, v: VertexRef) -> &[usize] {
        match v.side {
            Side::U => &self.u[v.index],
            Side::W => &self.w[v.index],
        }
    }
}

impl Instance {
    pub fn new(u_count: usize, w_count: usize) -> Instance {
        Instance { u_count, w_count, ..Instance::default() }
    }

    /// Appends an edge, overwriting its id with the next dense id.
    pub fn push_edge(&mut self, mut edge: Edge) -> usize {
        edge.id = self.edges.len();
        self.edges.push(edge);
        self.edges.len() - 1
    }

    pub fn vertex_count(&self, side: Side) -> usize {
        match side {
            Side::U => self.u_count,
            Side::W => self.w_count,
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexRef> + '_ {
        (0..self.u_count).map(VertexRef::u).chain((0..self.w_count).map(VertexRef::w))
    }

    pub fn is_critical(&self, v: VertexRef) -> bool {
        self.critical_vertices.contains(&v)
    }

    pub fn adjacency(&self) -> Adjacency {
        let mut adj = Adjacency { u: vec![Vec::new(); self.u_count], w: vec![Vec::new(); self.w_count] };
        for e in &self.edges {
            adj.u[e.u].push(e.id);
            adj.w[e.w].push(e.id);
        }
        adj
    }

    /// Constraint of `v`, defaulting to capacity 1.
    pub fn constraint(&self, v: VertexRef) -> MatroidSpec {
        self.constraints.get(&v).cloned().unwrap_or(MatroidSpec::Capacity { q: 1 })
    }

    /// True iff every vertex has capacity 1.
    pub fn is_one_to_one(&self) -> bool {
        self.constraints.values().all(MatroidSpec::is_unit_capacity)
    }

    pub fn critical_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.critical).count()
    }

    /// Critical places contributed by one edge when matched.
    pub fn edge_weight(&self, e: &Edge) -> usize {
        if !e.critical {
            return 0;
        }
        usize::from(self.is_critical(VertexRef::u(e.u))) + usize::from(self.is_critical(VertexRef::w(e.w)))
    }

    /// Upper bound on the critical places fillable on `side`: the number of
    /// critical vertices for one-to-one instances, the sum of their matroid
    /// ranks otherwise. Assumes a valid instance.
    pub fn critical_capacity(&self, side: Side) -> usize {
        let critical = self.critical_vertices.iter().filter(|v| v.side == side);
        if self.is_one_to_one() {
            return critical.count();
        }
        let adj = self.adjacency();
        critical
            .map(|&v| self.constraint(v).oracle(adj.of(v).to_vec()).map(|m| rank(m.as_ref())).unwrap_or(0))
            .sum()
    }

    /// Per-vertex matroid oracles over incident edge ids.
    pub fn matroids(&self) -> Result<VertexMatroids> {
        let adjacency = self.adjacency();
        let build = |v: VertexRef| self.constraint(v).oracle(adjacency.of(v).to_vec());
        let u = (0..self.u_count).map(|i| build(VertexRef::u(i))).collect::<Result<Vec<_>, _>>()?;
        let w = (0..self.w_count).map(|i| build(VertexRef::w(i))).collect::<Result<Vec<_>, _>>()?;
        Ok(VertexMatroids { u, w, adjacency })
    }

    /// Marks every critical edge without a critical endpoint as non-critical.
    pub fn normalize(&self) -> Instance {
        let mut out = self.clone();
        for e in &mut out.edges {
            if e.critical && !self.is_critical(VertexRef::u(e.u)) && !self.is_critical(VertexRef::w(e.w)) {
                e.critical = false;
            }
        }
        out
    }

    pub fn is_normalized(&self) -> bool {
        self.edges.iter().all(|e| !e.critical || self.is_critical(VertexRef::u(e.u)) || self.is_critical(VertexRef::w(e.w)))
    }

    /// Σ over critical vertices of matched critical edges at that vertex.
    /// Does not check feasibility; see [`criticality_score`].
    pub fn criticality_count(&self, edge_ids: &[usize]) -> usize {
        edge_ids.iter().map(|&id| self.edge_weight(&self.edges[id])).sum()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        for (pos, e) in self.edges.iter().enumerate() {
            if e.id != pos {
                v.push(Violation::EdgeIdNotDense { position: pos, id: e.id });
            }
            if e.u >= self.u_count {
                v.push(Violation::EndpointOutOfRange { edge: e.id, vertex: VertexRef::u(e.u) });
            }
            if e.w >= self.w_count {
                v.push(Violation::EndpointOutOfRange { edge: e.id, vertex: VertexRef::w(e.w) });
            }
            for side in [Side::U, Side::W] {
                let p = e.pref(side);
                if !p.is_finite() {
                    v.push(Violation::NonFinitePreference { edge: e.id, side });
                } else if p < Value::ZERO {
                    v.push(Violation::NegativePreference { edge: e.id, side });
                }
                let (gamma, delta) = (e.gamma(side), e.delta(side));
                if gamma <= Value::ZERO {
                    v.push(Violation::NonPositiveThreshold { edge: e.id, side });
                } else if gamma >= delta && !(gamma == Value::Infinity && delta == Value::Infinity) {
                    v.push(Violation::ThresholdOrder { edge: e.id, side });
                }
            }
        }
        for c in &self.critical_vertices {
            if c.index >= self.vertex_count(c.side) {
                v.push(Violation::VertexOutOfRange { vertex: *c, context: "critical vertex" });
            }
        }
        let adjacency = self.adjacency_lenient();
        for (vertex, spec) in &self.constraints {
            if vertex.index >= self.vertex_count(vertex.side) {
                v.push(Violation::VertexOutOfRange { vertex: *vertex, context: "constraint" });
                continue;
            }
            if let Err(error) = spec.oracle(adjacency.of(*vertex).to_vec()) {
                v.push(Violation::MalformedMatroid { vertex: *vertex, error });
            }
        }
        ValidationReport { violations: v }
    }

    /// Adjacency that skips out-of-range endpoints.
    fn adjacency_lenient(&self) -> Adjacency {
        let mut adj = Adjacency { u: vec![Vec::new(); self.u_count], w: vec![Vec::new(); self.w_count] };
        for e in &self.edges {
            if e.u < self.u_count && e.w < self.w_count {
                adj.u[e.u].push(e.id);
                adj.w[e.w].push(e.id);
            }
        }
        adj
    }

    pub fn validated(&self) -> Result<()> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(Error::Invalid(report))
        }
    }
}

/// Σ over critical vertices `v` of `|M(v) ∩ E_c|`, rejecting infeasible sets.
pub fn criticality_score(instance: &Instance, m: &Matching) -> Result<usize> {
    let matroids = instance.matroids()?;
    if !matroids.is_feasible(instance, m.edges()) {
        return Err(Error::Precondition(format!("edge set {:?} is not a common independent set", m.edges())));
    }
    Ok(instance.criticality_count(m.edges()))
}

/// Oracles of every vertex, keyed by side and index.
pub struct VertexMatroids {
    u: Vec<Box<dyn Matroid>>,
    w: Vec<Box<dyn Matroid>>,
    adjacency: Adjacency,
}

impl VertexMatroids {
    pub fn at(&self, v: VertexRef) -> &dyn Matroid {
        match v.side {
            Side::U => self.u[v.index].as_ref(),
            Side::W => self.w[v.index].as_ref(),
        }
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    /// `M(v)` restricted to `set`.
    pub fn restrict(&self, instance: &Instance, v: VertexRef, set: &[usize]) -> Vec<usize> {
        set.iter().copied().filter(|&id| instance.edges[id].endpoint(v.side) == v).collect()
    }

    /// Common independence: every vertex's part of `set` is independent.
    /// `set` must hold distinct, in-range edge ids.
    pub fn is_feasible(&self, instance: &Instance, set: &[usize]) -> bool {
        let mut by_vertex: BTreeMap<VertexRef, Vec<usize>> = BTreeMap::new();
        for &id in set {
            let Some(e) = instance.edges.get(id) else { return false };
            by_vertex.entry(VertexRef::u(e.u)).or_default().push(id);
            by_vertex.entry(VertexRef::w(e.w)).or_default().push(id);
        }
        let distinct = set.iter().collect::<BTreeSet<_>>().len() == set.len();
        distinct && by_vertex.iter().all(|(v, part)| self.at(*v).is_independent(part))
    }
}

/// A set of original edge ids, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Matching(Vec<usize>);

impl Matching {
    pub fn new() -> Matching {
        Matching(Vec::new())
    }

    pub fn edges(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.0.binary_search(&id).is_ok()
    }
}

impl FromIterator<usize> for Matching {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Matching {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Matching(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EdgeIdNotDense { position: usize, id: usize },
    EndpointOutOfRange { edge: usize, vertex: VertexRef },
    NegativePreference { edge: usize, side: Side },
    NonFinitePreference { edge: usize, side: Side },
    NonPositiveThreshold { edge: usize, side: Side },
    ThresholdOrder { edge: usize, side: Side },
    VertexOutOfRange { vertex: VertexRef, context: &'static str },
    MalformedMatroid { vertex: VertexRef, error: MatroidError },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EdgeIdNotDense { position, id } => {
                write!(f, "edge at position {position} has id {id}: ids must be unique and dense")
            }
            Violation::EndpointOutOfRange { edge, vertex } => write!(f, "edge {edge}: endpoint {vertex} out of range"),
            Violation::NegativePreference { edge, side } => {
                write!(f, "edge {edge}: preferences nonnegative (p_{} < 0)", side_name(*side))
            }
            Violation::NonFinitePreference { edge, side } => {
                write!(f, "edge {edge}: preference p_{} must be finite", side_name(*side))
            }
            Violation::NonPositiveThreshold { edge, side } => {
                write!(f, "edge {edge}: gamma_{} must be positive", side_name(*side))
            }
            Violation::ThresholdOrder { edge, side } => {
                write!(f, "edge {edge}: gamma < delta required on side {}", side_name(*side))
            }
            Violation::VertexOutOfRange { vertex, context } => write!(f, "{context} {vertex} out of range"),
            Violation::MalformedMatroid { vertex, error } => write!(f, "constraint of {vertex}: {error}"),
        }
    }
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::U => "u",
        Side::W => "w",
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("OK");
        }
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::LaminarSet;

    fn two_by_two() -> Instance {
        let mut inst = Instance::new(2, 2);
        inst.push_edge(Edge::new(0, 0, 0, Value::int(2), Value::int(1)));
        inst.push_edge(Edge::new(0, 0, 1, Value::int(1), Value::int(2)));
        inst.push_edge(Edge::new(0, 1, 0, Value::int(1), Value::int(1)));
        inst.push_edge(Edge::new(0, 1, 1, Value::int(2), Value::int(2)));
        inst
    }

    #[test]
    fn well_formed_instance_validates() {
        assert!(two_by_two().validate().is_ok());
    }

    #[test]
    fn gamma_equal_delta_is_rejected() {
        let mut inst = two_by_two();
        inst.edges[1].gamma_u = Value::int(1);
        inst.edges[1].delta_u = Value::int(1);
        let report = inst.validate();
        assert_eq!(report.violations, vec![Violation::ThresholdOrder { edge: 1, side: Side::U }]);
        assert!(report.to_string().contains("gamma < delta required"));
    }

    #[test]
    fn negative_preference_is_rejected() {
        let mut inst = two_by_two();
        inst.edges[2].p_u = Value::int(-1);
        let report = inst.validate();
        assert_eq!(report.violations, vec![Violation::NegativePreference { edge: 2, side: Side::U }]);
        assert!(report.to_string().contains("preferences nonnegative"));
    }

    #[test]
    fn infinite_threshold_rules() {
        let mut inst = two_by_two();
        inst.edges[0] = inst.edges[0].with_u_thresholds(Value::Infinity, Value::Infinity);
        inst.edges[1] = inst.edges[1].with_w_thresholds(Value::int(1), Value::Infinity);
        assert!(inst.validate().is_ok());
        inst.edges[2] = inst.edges[2].with_w_thresholds(Value::Infinity, Value::int(3));
        assert_eq!(inst.validate().violations, vec![Violation::ThresholdOrder { edge: 2, side: Side::W }]);
    }

    #[test]
    fn structural_violations_are_all_reported() {
        let mut inst = two_by_two();
        inst.edges[3].id = 7;
        inst.edges[0].w = 5;
        inst.edges[1].gamma_w = Value::ZERO;
        inst.critical_vertices.insert(VertexRef::u(9));
        inst.constraints.insert(
            VertexRef::u(0),
            MatroidSpec::Laminar {
                sets: vec![LaminarSet { edges: vec![0, 1], quota: 1 }, LaminarSet { edges: vec![1, 3], quota: 1 }],
            },
        );
        let report = inst.validate();
        assert_eq!(report.violations.len(), 5, "{report}");
    }

    #[test]
    fn normalize_demotes_isolated_critical_edges() {
        let mut inst = two_by_two();
        inst.edges[0].critical = true;
        inst.edges[3].critical = true;
        inst.critical_vertices.insert(VertexRef::w(1));
        let norm = inst.normalize();
        assert!(!norm.edges[0].critical);
        assert!(norm.edges[3].critical);
        assert_eq!(norm.normalize(), norm);
    }

    #[test]
    fn normalize_fixed_points() {
        let mut all = two_by_two();
        all.critical_vertices = all.vertices().collect();
        for e in &mut all.edges {
            e.critical = true;
        }
        assert_eq!(all.normalize(), all);
        let none = two_by_two();
        assert_eq!(none.normalize(), none);
    }

    #[test]
    fn criticality_scores() {
        let mut inst = two_by_two();
        assert_eq!(criticality_score(&inst, &Matching::from_iter([0, 3])).unwrap(), 0);
        inst.edges[0].critical = true;
        inst.critical_vertices.insert(VertexRef::u(0));
        inst.critical_vertices.insert(VertexRef::w(0));
        assert_eq!(criticality_score(&inst, &Matching::from_iter([0])).unwrap(), 2);
        assert!(criticality_score(&inst, &Matching::from_iter([0, 1])).is_err());
    }

    #[test]
    fn one_to_one_and_capacity_bounds() {
        let mut inst = two_by_two();
        inst.critical_vertices.insert(VertexRef::u(0));
        inst.critical_vertices.insert(VertexRef::u(1));
        assert!(inst.is_one_to_one());
        assert_eq!(inst.critical_capacity(Side::U), 2);
        inst.constraints.insert(VertexRef::u(0), MatroidSpec::Capacity { q: 2 });
        assert!(!inst.is_one_to_one());
        assert_eq!(inst.critical_capacity(Side::U), 3);
        assert_eq!(inst.critical_capacity(Side::W), 0);
    }

    #[test]
    fn vertex_ref_keys() {
        assert_eq!("W:3".parse::<VertexRef>().unwrap(), VertexRef::w(3));
        assert_eq!(VertexRef::u(4).to_string(), "U:4");
        assert!("X:1".parse::<VertexRef>().is_err());
        assert!("U-1".parse::<VertexRef>().is_err());
    }
}
