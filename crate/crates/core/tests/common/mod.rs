//! Brute force written straight from the definitions, sharing nothing with
//! the crate's own oracle except the per-vertex independence tests.
#![allow(dead_code)]

use dupmatch::model::{Edge, Instance, Side, VertexRef};
use dupmatch::value::Value;

/// Threshold test on raw units; infinite thresholds are never met.
pub fn clears(improvement: i64, threshold: Value) -> bool {
    match threshold {
        Value::Finite(t) => improvement >= t,
        Value::Infinity => false,
        Value::NegInfinity => true,
    }
}

fn units(v: Value) -> i64 {
    match v {
        Value::Finite(x) => x,
        _ => panic!("preferences are finite"),
    }
}

pub struct Brute<'a> {
    pub inst: &'a Instance,
    /// Feasible sets as sorted id lists.
    pub sets: Vec<Vec<usize>>,
    pub opt: usize,
}

impl<'a> Brute<'a> {
    pub fn new(inst: &'a Instance) -> Brute<'a> {
        let n = inst.edges.len();
        assert!(n <= 16, "brute force is for tiny instances");
        let sets: Vec<Vec<usize>> = (0u32..1 << n)
            .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|s| feasible(inst, s))
            .collect();
        let opt = sets.iter().map(|s| score(inst, s)).max().unwrap_or(0);
        Brute { inst, sets, opt }
    }

    /// Whether `e` cγ-blocks the critical set `m`.
    pub fn blocks(&self, m: &[usize], e: usize) -> bool {
        let inst = self.inst;
        let edge = &inst.edges[e];
        let at = |side: Side| -> Vec<Option<usize>> {
            let v = edge.endpoint(side);
            std::iter::once(None)
                .chain(m.iter().copied().filter(|&id| inst.edges[id].endpoint(side) == v).map(Some))
                .collect()
        };
        let p = |slot: Option<usize>, side: Side| slot.map_or(0, |id| units(inst.edges[id].pref(side)));
        for f in at(Side::U) {
            let minus_f: Vec<usize> = m.iter().copied().filter(|&x| Some(x) != f).chain([e]).collect();
            if !independent_at(inst, &minus_f, edge.endpoint(Side::U)) {
                continue;
            }
            for g in at(Side::W) {
                let minus_g: Vec<usize> = m.iter().copied().filter(|&x| Some(x) != g).chain([e]).collect();
                if !independent_at(inst, &minus_g, edge.endpoint(Side::W)) {
                    continue;
                }
                let iu = units(edge.p_u) - p(f, Side::U);
                let iw = units(edge.p_w) - p(g, Side::W);
                let thresholds = (clears(iu, edge.gamma_u) && clears(iw, edge.delta_w))
                    || (clears(iu, edge.delta_u) && clears(iw, edge.gamma_w));
                let swapped: Vec<usize> =
                    m.iter().copied().filter(|&x| Some(x) != f && Some(x) != g).chain([e]).collect();
                if thresholds && score(inst, &swapped) == self.opt {
                    return true;
                }
            }
        }
        false
    }

    pub fn blocking(&self, m: &[usize]) -> Vec<usize> {
        (0..self.inst.edges.len()).filter(|e| !m.contains(e)).filter(|&e| self.blocks(m, e)).collect()
    }

    pub fn is_stable(&self, m: &[usize]) -> bool {
        score(self.inst, m) == self.opt && self.blocking(m).is_empty()
    }

    pub fn max_stable(&self) -> Option<usize> {
        self.sets.iter().filter(|s| self.is_stable(s)).map(Vec::len).max()
    }
}

pub fn independent_at(inst: &Instance, set: &[usize], v: VertexRef) -> bool {
    let incident: Vec<usize> = inst.edges.iter().filter(|e| e.endpoint(v.side) == v).map(|e| e.id).collect();
    let part: Vec<usize> = set.iter().copied().filter(|id| incident.contains(id)).collect();
    if inst.constraint(v).is_unit_capacity() {
        return part.len() <= 1;
    }
    inst.constraint(v).oracle(incident).expect("valid constraint").is_independent(&part)
}

pub fn feasible(inst: &Instance, set: &[usize]) -> bool {
    inst.vertices().all(|v| independent_at(inst, set, v))
}

/// Σ over critical vertices of incident matched critical edges.
pub fn score(inst: &Instance, set: &[usize]) -> usize {
    let crit = |v: VertexRef| inst.critical_vertices.contains(&v);
    set.iter()
        .map(|&id| &inst.edges[id])
        .filter(|e| e.critical)
        .map(|e| usize::from(crit(VertexRef::u(e.u))) + usize::from(crit(VertexRef::w(e.w))))
        .sum()
}

/// The 5-edge path `w0 - u0 - w1 - u2 - w2 - u1` where the solver keeps the
/// two inner edges and the best stable matching takes the three outer ones.
pub fn tight_path() -> Instance {
    let v = |s: &str| s.parse::<Value>().unwrap();
    let mut inst = Instance::new(3, 3);
    let rows = [
        (0, 1, "1", "1", "1", "1.5", "0.5", "1"),
        (2, 1, "1", "0", "1", "1.5", "0.5", "1.5"),
        (1, 2, "0", "0", "1", "1.5", "0.5", "1.5"),
        (2, 2, "1", "1", "0.5", "1.5", "0.5", "1"),
        (0, 0, "1", "1", "1", "2", "1", "2"),
    ];
    for (u, w, pu, pw, gu, du, gw, dw) in rows {
        inst.push_edge(Edge::new(0, u, w, v(pu), v(pw)).with_u_thresholds(v(gu), v(du)).with_w_thresholds(v(gw), v(dw)));
    }
    inst
}
