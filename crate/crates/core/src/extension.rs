//! The strict-preference extended instance.
//!
//! Every original edge is replaced by typed parallel copies. Each vertex ranks
//! its copies by a template: a sequence of segments, where a `Tier` holds one
//! copy type ranked by preference value and a `Band` interleaves a base type
//! with offset types whose key is `p - gamma` (gamma group) or `p - delta`
//! (delta group). Ranking is a lexicographic sort on [`RankingKey`].

use std::cmp::Reverse;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};
use crate::matroid::{GreedyBuilder, Matroid, MatroidSpec};
use crate::model::{Edge, Instance, Side, VertexRef};
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CopyKind {
    A,
    B0,
    B1,
    C,
    /// 1-based index.
    X(usize),
    /// 1-based index.
    Z(usize),
    Y0,
    Y1,
}

impl CopyKind {
    /// Distinct small index per kind, for table lookups.
    fn dense(self) -> usize {
        match self {
            CopyKind::A => 0,
            CopyKind::B0 => 1,
            CopyKind::B1 => 2,
            CopyKind::C => 3,
            CopyKind::Y0 => 4,
            CopyKind::Y1 => 5,
            CopyKind::X(i) => 4 + 2 * i,
            CopyKind::Z(j) => 5 + 2 * j,
        }
    }
}

impl fmt::Display for CopyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CopyKind::A => f.write_str("a"),
            CopyKind::B0 => f.write_str("b0"),
            CopyKind::B1 => f.write_str("b1"),
            CopyKind::C => f.write_str("c"),
            CopyKind::X(i) => write!(f, "x{i}"),
            CopyKind::Z(j) => write!(f, "z{j}"),
            CopyKind::Y0 => f.write_str("y0"),
            CopyKind::Y1 => f.write_str("y1"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CopyEdge {
    pub id: usize,
    pub orig: usize,
    pub kind: CopyKind,
    pub u: usize,
    pub w: usize,
}

impl CopyEdge {
    pub fn endpoint(&self, side: Side) -> VertexRef {
        match side {
            Side::U => VertexRef::u(self.u),
            Side::W => VertexRef::w(self.w),
        }
    }
}

impl fmt::Display for CopyEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.kind, self.orig)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Segment {
    Tier(CopyKind),
    Band { base: CopyKind, gamma: Vec<CopyKind>, delta: Vec<CopyKind> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Tier,
    Base,
    Gamma,
    Delta,
}

#[derive(Clone, Copy, Debug)]
struct Slot {
    segment: usize,
    role: Role,
    within: usize,
}

/// One side's ranking rule.
#[derive(Clone, Debug)]
pub struct SegmentTemplate {
    segments: Vec<Segment>,
    slots: Vec<Option<Slot>>,
}

impl SegmentTemplate {
    pub fn new(segments: Vec<Segment>) -> Result<SegmentTemplate> {
        let mut slots: Vec<Option<Slot>> = Vec::new();
        let mut place = |kind: CopyKind, slot: Slot| {
            let i = kind.dense();
            if slots.len() <= i {
                slots.resize(i + 1, None);
            }
            if slots[i].replace(slot).is_some() {
                Err(Error::Precondition(format!("copy type {kind} appears twice in template")))
            } else {
                Ok(())
            }
        };
        for (segment, seg) in segments.iter().enumerate() {
            match seg {
                Segment::Tier(kind) => place(*kind, Slot { segment, role: Role::Tier, within: 0 })?,
                Segment::Band { base, gamma, delta } => {
                    place(*base, Slot { segment, role: Role::Base, within: 0 })?;
                    for (within, kind) in gamma.iter().enumerate() {
                        place(*kind, Slot { segment, role: Role::Gamma, within })?;
                    }
                    for (within, kind) in delta.iter().enumerate() {
                        place(*kind, Slot { segment, role: Role::Delta, within })?;
                    }
                }
            }
        }
        Ok(SegmentTemplate { segments, slots })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Template for instances whose every edge at a critical vertex is critical.
    pub fn simple(side: Side, s: usize, t: usize) -> SegmentTemplate {
        use CopyKind::*;
        let mut segs = Vec::new();
        match side {
            Side::U => {
                segs.extend((1..=t).map(|i| Segment::Tier(X(i))));
                segs.push(Segment::Band { base: A, gamma: vec![B0], delta: vec![B1] });
                segs.push(Segment::Tier(C));
                segs.extend((1..=s).rev().map(|j| Segment::Tier(Z(j))));
            }
            Side::W => {
                segs.extend((1..=s).map(|j| Segment::Tier(Z(j))));
                segs.push(Segment::Band { base: C, gamma: vec![B1], delta: vec![B0] });
                segs.push(Segment::Tier(A));
                segs.extend((1..=t).rev().map(|i| Segment::Tier(X(i))));
            }
        }
        SegmentTemplate::new(segs).expect("built-in template is consistent")
    }

    /// Template for arbitrary critical edge sets (normalized instances).
    pub fn general(side: Side, s: usize, t: usize) -> SegmentTemplate {
        use CopyKind::*;
        let band = |base, gamma: Vec<CopyKind>, delta: Vec<CopyKind>| Segment::Band { base, gamma, delta };
        let mut segs = Vec::new();
        match side {
            Side::U => {
                segs.push(band(X(1), vec![X(2)], vec![X(3)]));
                segs.extend((4..=t + 4).map(|i| Segment::Tier(X(i))));
                segs.push(band(Z(s + 7), vec![Y0, Z(s + 6)], vec![Y1, Z(s + 5)]));
                segs.extend((4..=s + 4).rev().map(|j| Segment::Tier(Z(j))));
                segs.push(band(A, vec![B0, Z(3), X(t + 5)], vec![B1, Z(2), X(t + 6)]));
                segs.push(Segment::Tier(Z(1)));
                segs.push(Segment::Tier(X(t + 7)));
                segs.push(Segment::Tier(C));
            }
            Side::W => {
                segs.push(band(Z(1), vec![Z(2)], vec![Z(3)]));
                segs.extend((4..=s + 4).map(|j| Segment::Tier(Z(j))));
                segs.push(band(X(t + 7), vec![Y1, X(t + 6)], vec![Y0, X(t + 5)]));
                segs.extend((4..=t + 4).rev().map(|i| Segment::Tier(X(i))));
                segs.push(band(C, vec![B1, X(3), Z(s + 5)], vec![B0, X(2), Z(s + 6)]));
                segs.push(Segment::Tier(X(1)));
                segs.push(Segment::Tier(Z(s + 7)));
                segs.push(Segment::Tier(A));
            }
        }
        SegmentTemplate::new(segs).expect("built-in template is consistent")
    }
}

/// Sort key of a copy at one of its endpoints; smaller is better.
///
/// Order: segment, then value descending, then group (delta before gamma
/// before base at equal value), then edge id, then position inside the group.
/// Copies pushed to `-inf` by an infinite threshold keep gamma before delta.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RankingKey {
    pub segment: usize,
    pub value: Reverse<Value>,
    pub group: u8,
    pub edge: usize,
    pub within: usize,
}

pub fn ranking_key(side: Side, edge: &Edge, kind: CopyKind, template: &SegmentTemplate) -> Result<RankingKey> {
    let slot = template
        .slots
        .get(kind.dense())
        .copied()
        .flatten()
        .ok_or_else(|| Error::Precondition(format!("copy type {kind} is not part of the {side:?}-side template")))?;
    let p = edge.pref(side);
    let value = match slot.role {
        Role::Tier | Role::Base => p,
        Role::Gamma => p - edge.gamma(side),
        Role::Delta => p - edge.delta(side),
    };
    let sunk = value == Value::NegInfinity;
    let group = match slot.role {
        Role::Delta if sunk => 1,
        Role::Gamma if sunk => 0,
        Role::Delta => 0,
        Role::Gamma => 1,
        Role::Tier | Role::Base => 2,
    };
    Ok(RankingKey { segment: slot.segment, value: Reverse(value), group, edge: edge.id, within: slot.within })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Simple,
    General,
}

/// Per-vertex lists stored back to back.
#[derive(Clone, Debug, Default)]
pub struct Orders {
    offsets: Vec<usize>,
    items: Vec<usize>,
}

impl Orders {
    pub fn len(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> + '_ {
        (0..self.len()).map(move |i| &self[i])
    }
}

impl Index<usize> for Orders {
    type Output = [usize];

    fn index(&self, i: usize) -> &[usize] {
        &self.items[self.offsets[i]..self.offsets[i + 1]]
    }
}

/// The extended instance with per-vertex strict orders (best first).
#[derive(Clone, Debug)]
pub struct ExtendedInstance {
    pub construction: Construction,
    pub s: usize,
    pub t: usize,
    pub u_count: usize,
    pub w_count: usize,
    /// Indexed by copy id; ids follow `(edge id, kind)` order.
    pub copies: Vec<CopyEdge>,
    pub u_orders: Orders,
    pub w_orders: Orders,
    u_specs: Vec<MatroidSpec>,
    w_specs: Vec<MatroidSpec>,
    u_edges: Vec<Vec<usize>>,
    w_edges: Vec<Vec<usize>>,
}

impl ExtendedInstance {
    pub fn order(&self, v: VertexRef) -> &[usize] {
        match v.side {
            Side::U => &self.u_orders[v.index],
            Side::W => &self.w_orders[v.index],
        }
    }

    pub fn back_map(&self, copy: usize) -> usize {
        self.copies[copy].orig
    }

    pub fn spec(&self, v: VertexRef) -> &MatroidSpec {
        match v.side {
            Side::U => &self.u_specs[v.index],
            Side::W => &self.w_specs[v.index],
        }
    }

    /// Original edges incident to `v`.
    pub fn original_edges(&self, v: VertexRef) -> &[usize] {
        match v.side {
            Side::U => &self.u_edges[v.index],
            Side::W => &self.w_edges[v.index],
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexRef> + '_ {
        (0..self.u_count).map(VertexRef::u).chain((0..self.w_count).map(VertexRef::w))
    }

    /// The first vertex whose constraint is not capacity 1, if any.
    pub fn non_unit_vertex(&self) -> Option<VertexRef> {
        self.vertices().find(|&v| !self.spec(v).is_unit_capacity())
    }

    /// Position of every copy in its `side` endpoint's order.
    pub fn positions(&self, side: Side) -> Vec<usize> {
        let orders = match side {
            Side::U => &self.u_orders,
            Side::W => &self.w_orders,
        };
        let mut pos = vec![0; self.copies.len()];
        for order in orders.iter() {
            for (rank, &c) in order.iter().enumerate() {
                pos[c] = rank;
            }
        }
        pos
    }

    /// Parallel-extension matroid of `v` over its copies.
    pub fn vertex_matroid(&self, v: VertexRef) -> Result<ExtendedMatroid> {
        let copies: Vec<(usize, usize)> = self.order(v).iter().map(|&c| (c, self.copies[c].orig)).collect();
        extend_matroid(self.spec(v), self.original_edges(v).to_vec(), &copies)
    }

    /// One line per vertex: the label, then the order as `type(edge)` tokens.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for v in self.vertices() {
            out.push_str(&v.to_string());
            for &c in self.order(v) {
                out.push(' ');
                out.push_str(&self.copies[c].to_string());
            }
            out.push('\n');
        }
        out
    }
}

fn kinds_simple(inst: &Instance, e: &Edge, s: usize, t: usize) -> Vec<CopyKind> {
    let mut kinds = vec![CopyKind::A, CopyKind::B0, CopyKind::B1, CopyKind::C];
    if inst.is_critical(VertexRef::w(e.w)) {
        kinds.extend((1..=t).map(CopyKind::X));
    }
    if inst.is_critical(VertexRef::u(e.u)) {
        kinds.extend((1..=s).map(CopyKind::Z));
    }
    kinds
}

fn kinds_general(inst: &Instance, e: &Edge, s: usize, t: usize) -> Vec<CopyKind> {
    let mut kinds = vec![CopyKind::A, CopyKind::B0, CopyKind::B1, CopyKind::C];
    let (u_crit, w_crit) = (inst.is_critical(VertexRef::u(e.u)), inst.is_critical(VertexRef::w(e.w)));
    if e.critical && w_crit {
        kinds.extend((1..=t + 7).map(CopyKind::X));
    }
    if e.critical && u_crit {
        kinds.extend((1..=s + 7).map(CopyKind::Z));
    }
    if e.critical && u_crit && w_crit {
        kinds.extend([CopyKind::Y0, CopyKind::Y1]);
    }
    kinds
}

/// True when every edge with a critical endpoint is critical, so only the
/// critical vertices matter and the simple construction applies.
pub fn simple_applies(inst: &Instance) -> bool {
    inst.edges
        .iter()
        .all(|e| e.critical || !(inst.is_critical(VertexRef::u(e.u)) || inst.is_critical(VertexRef::w(e.w))))
}

/// Extended instance for the case where critical edges are all edges.
pub fn build_simple(inst: &Instance) -> Result<ExtendedInstance> {
    inst.validated()?;
    if !simple_applies(inst) {
        return Err(Error::Precondition(
            "simple construction needs every edge at a critical vertex to be critical".into(),
        ));
    }
    let (s, t) = (inst.critical_capacity(Side::U), inst.critical_capacity(Side::W));
    assemble(inst, Construction::Simple, s, t, |e| kinds_simple(inst, e, s, t))
}

/// Extended instance for arbitrary critical edge sets.
pub fn build_general(inst: &Instance) -> Result<ExtendedInstance> {
    inst.validated()?;
    if !inst.is_normalized() {
        return Err(Error::Precondition("general construction needs a normalized instance".into()));
    }
    let (s, t) = (inst.critical_capacity(Side::U), inst.critical_capacity(Side::W));
    assemble(inst, Construction::General, s, t, |e| kinds_general(inst, e, s, t))
}

fn assemble(
    inst: &Instance,
    construction: Construction,
    s: usize,
    t: usize,
    kinds: impl Fn(&Edge) -> Vec<CopyKind>,
) -> Result<ExtendedInstance> {
    let (u_tmpl, w_tmpl) = match construction {
        Construction::Simple => (SegmentTemplate::simple(Side::U, s, t), SegmentTemplate::simple(Side::W, s, t)),
        Construction::General => (SegmentTemplate::general(Side::U, s, t), SegmentTemplate::general(Side::W, s, t)),
    };
    let mut copies = Vec::new();
    let mut u_keyed = Keyed::new(inst.u_count);
    let mut w_keyed = Keyed::new(inst.w_count);
    let mut per_edge = Vec::with_capacity(inst.edges.len());
    for e in &inst.edges {
        let mut ks = kinds(e);
        ks.sort_unstable();
        u_keyed.count(e.u, ks.len());
        w_keyed.count(e.w, ks.len());
        per_edge.push(ks);
    }
    u_keyed.reserve();
    w_keyed.reserve();
    for (e, ks) in inst.edges.iter().zip(per_edge) {
        for kind in ks {
            let id = copies.len();
            copies.push(CopyEdge { id, orig: e.id, kind, u: e.u, w: e.w });
            u_keyed.put(e.u, ranking_key(Side::U, e, kind, &u_tmpl)?, id);
            w_keyed.put(e.w, ranking_key(Side::W, e, kind, &w_tmpl)?, id);
        }
    }
    let adjacency = inst.adjacency();
    Ok(ExtendedInstance {
        construction,
        s,
        t,
        u_count: inst.u_count,
        w_count: inst.w_count,
        copies,
        u_orders: u_keyed.finish(),
        w_orders: w_keyed.finish(),
        u_specs: (0..inst.u_count).map(|i| inst.constraint(VertexRef::u(i))).collect(),
        w_specs: (0..inst.w_count).map(|i| inst.constraint(VertexRef::w(i))).collect(),
        u_edges: adjacency.u,
        w_edges: adjacency.w,
    })
}

/// Builds [`Orders`] in two passes: sizes first, then keyed entries.
struct Keyed {
    offsets: Vec<usize>,
    fill: Vec<usize>,
    entries: Vec<(RankingKey, usize)>,
}

impl Keyed {
    fn new(vertices: usize) -> Keyed {
        Keyed { offsets: vec![0; vertices + 1], fill: Vec::new(), entries: Vec::new() }
    }

    fn count(&mut self, v: usize, n: usize) {
        self.offsets[v + 1] += n;
    }

    fn reserve(&mut self) {
        for i in 1..self.offsets.len() {
            self.offsets[i] += self.offsets[i - 1];
        }
        self.fill = self.offsets[..self.offsets.len() - 1].to_vec();
        let blank = RankingKey { segment: 0, value: Reverse(Value::ZERO), group: 0, edge: 0, within: 0 };
        self.entries = vec![(blank, 0); *self.offsets.last().unwrap_or(&0)];
    }

    fn put(&mut self, v: usize, key: RankingKey, copy: usize) {
        self.entries[self.fill[v]] = (key, copy);
        self.fill[v] += 1;
    }

    fn finish(mut self) -> Orders {
        for w in self.offsets.windows(2) {
            self.entries[w[0]..w[1]].sort_unstable();
        }
        Orders { offsets: self.offsets, items: self.entries.into_iter().map(|(_, c)| c).collect() }
    }
}

/// Independence over copies: at most one copy per original edge, and the
/// projection is independent in the original vertex matroid.
pub struct ExtendedMatroid {
    ground: Vec<usize>,
    orig_of: HashMap<usize, usize>,
    base: Box<dyn Matroid>,
}

/// `copies` lists `(copy id, original edge id)` pairs over `original_ground`.
pub fn extend_matroid(
    spec: &MatroidSpec,
    original_ground: Vec<usize>,
    copies: &[(usize, usize)],
) -> Result<ExtendedMatroid> {
    let base = spec.oracle(original_ground)?;
    let mut ground: Vec<usize> = copies.iter().map(|&(c, _)| c).collect();
    ground.sort_unstable();
    ground.dedup();
    Ok(ExtendedMatroid { ground, orig_of: copies.iter().copied().collect(), base })
}

impl ExtendedMatroid {
    fn project(&self, set: &[usize]) -> Option<Vec<usize>> {
        let mut seen = HashSet::with_capacity(set.len());
        let mut out = Vec::with_capacity(set.len());
        for c in set {
            let &orig = self.orig_of.get(c)?;
            if !seen.insert(orig) {
                return None;
            }
            out.push(orig);
        }
        Some(out)
    }
}

impl Matroid for ExtendedMatroid {
    fn ground(&self) -> &[usize] {
        &self.ground
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        self.project(set).is_some_and(|p| self.base.is_independent(&p))
    }

    fn builder(&self) -> Box<dyn GreedyBuilder + '_> {
        Box::new(ExtendedBuilder { matroid: self, inner: self.base.builder(), seen: HashSet::new() })
    }
}

struct ExtendedBuilder<'a> {
    matroid: &'a ExtendedMatroid,
    inner: Box<dyn GreedyBuilder + 'a>,
    seen: HashSet<usize>,
}

impl GreedyBuilder for ExtendedBuilder<'_> {
    fn try_add(&mut self, x: usize) -> bool {
        let Some(&orig) = self.matroid.orig_of.get(&x) else {
            return false;
        };
        if self.seen.contains(&orig) || !self.inner.try_add(orig) {
            return false;
        }
        self.seen.insert(orig);
        true
    }
}
