//! Stable common independent sets under two families of ordered matroids.
//!
//! Two-sided greedy choice with permanent rejection: every U vertex proposes
//! its greedy base over the copies it still has, every W vertex keeps the
//! greedy base of what it was offered, and offered copies a W vertex drops are
//! gone for good. The fixed point is the output.

use crate::error::Result;
use crate::extension::{ExtendedInstance, ExtendedMatroid};
use crate::matroid::{fundamental_circuit, Matroid};
use crate::model::{Side, VertexRef};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelOutcome {
    /// Copy ids, ascending.
    pub copies: Vec<usize>,
    pub rounds: usize,
    /// Calls to greedy `try_add` across both sides.
    pub oracle_calls: usize,
}

struct Sides {
    u: Vec<ExtendedMatroid>,
    w: Vec<ExtendedMatroid>,
}

impl Sides {
    fn new(ext: &ExtendedInstance) -> Result<Sides> {
        let u = (0..ext.u_count).map(|i| ext.vertex_matroid(VertexRef::u(i))).collect::<Result<_>>()?;
        let w = (0..ext.w_count).map(|i| ext.vertex_matroid(VertexRef::w(i))).collect::<Result<_>>()?;
        Ok(Sides { u, w })
    }

    fn at(&self, v: VertexRef) -> &ExtendedMatroid {
        match v.side {
            Side::U => &self.u[v.index],
            Side::W => &self.w[v.index],
        }
    }
}

pub fn solve_kernel(ext: &ExtendedInstance) -> Result<Vec<usize>> {
    Ok(solve_kernel_traced(ext)?.copies)
}

pub fn solve_kernel_traced(ext: &ExtendedInstance) -> Result<KernelOutcome> {
    let sides = Sides::new(ext)?;
    let mut rejected = vec![false; ext.copies.len()];
    let mut offered = vec![false; ext.copies.len()];
    let w_pos = ext.positions(Side::W);
    let mut rounds = 0;
    let mut oracle_calls = 0;

    loop {
        rounds += 1;
        offered.iter_mut().for_each(|o| *o = false);
        let mut inbox: Vec<Vec<usize>> = vec![Vec::new(); ext.w_count];
        for (u, order) in ext.u_orders.iter().enumerate() {
            let mut builder = sides.u[u].builder();
            for &c in order.iter().filter(|&&c| !rejected[c]) {
                oracle_calls += 1;
                if builder.try_add(c) {
                    offered[c] = true;
                    inbox[ext.copies[c].w].push(c);
                }
            }
        }
        let mut changed = false;
        for (w, mut offers) in inbox.into_iter().enumerate() {
            offers.sort_unstable_by_key(|&c| w_pos[c]);
            let mut builder = sides.w[w].builder();
            for c in offers {
                oracle_calls += 1;
                if !builder.try_add(c) {
                    rejected[c] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            let copies = (0..ext.copies.len()).filter(|&c| offered[c]).collect();
            return Ok(KernelOutcome { copies, rounds, oracle_calls });
        }
    }
}

fn part(ext: &ExtendedInstance, set: &[usize], v: VertexRef) -> Vec<usize> {
    set.iter().copied().filter(|&c| ext.copies[c].endpoint(v.side) == v).collect()
}

/// Independent in every vertex's extended matroid.
pub fn is_common_independent(ext: &ExtendedInstance, set: &[usize]) -> Result<bool> {
    let sides = Sides::new(ext)?;
    Ok(ext.vertices().all(|v| sides.at(v).is_independent(&part(ext, set, v))))
}

/// Copies outside `set` dominated at neither endpoint. `set` must be common
/// independent.
pub fn blocking_copies(ext: &ExtendedInstance, set: &[usize]) -> Result<Vec<usize>> {
    let sides = Sides::new(ext)?;
    let positions = [ext.positions(Side::U), ext.positions(Side::W)];
    let mut out = Vec::new();
    for c in &ext.copies {
        if set.contains(&c.id) {
            continue;
        }
        let mut dominated = false;
        for (side, pos) in [Side::U, Side::W].into_iter().zip(&positions) {
            let v = c.endpoint(side);
            let held = part(ext, set, v);
            if let Some(circuit) = fundamental_circuit(sides.at(v), &held, c.id)? {
                if circuit.iter().all(|&d| d == c.id || pos[d] < pos[c.id]) {
                    dominated = true;
                    break;
                }
            }
        }
        if !dominated {
            out.push(c.id);
        }
    }
    Ok(out)
}

/// No outside copy can be added while staying common independent.
pub fn is_maximal(ext: &ExtendedInstance, set: &[usize]) -> Result<bool> {
    let sides = Sides::new(ext)?;
    Ok(ext.copies.iter().filter(|c| !set.contains(&c.id)).all(|c| {
        [Side::U, Side::W].into_iter().any(|side| {
            let v = c.endpoint(side);
            let mut with = part(ext, set, v);
            with.push(c.id);
            !sides.at(v).is_independent(&with)
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{build_general, build_simple};
    use crate::generate::{generate, GenParams};
    use crate::gs::solve_gs;
    use crate::matroid::MatroidSpec;
    use crate::model::{Edge, Instance};
    use crate::value::Value;
    use proptest::prelude::*;

    #[test]
    fn capacity_two_takes_best_two() {
        let mut inst = Instance::new(1, 3);
        for (w, p) in [(0, 3), (1, 2), (2, 1)] {
            inst.push_edge(Edge::new(0, 0, w, Value::int(p), Value::int(1)));
        }
        inst.constraints.insert(VertexRef::u(0), MatroidSpec::Capacity { q: 2 });
        let ext = build_simple(&inst).unwrap();
        let out = solve_kernel(&ext).unwrap();
        let mut orig: Vec<usize> = out.iter().map(|&c| ext.back_map(c)).collect();
        orig.sort_unstable();
        assert_eq!(orig, vec![0, 1]);
        assert!(out.iter().all(|&c| ext.copies[c].kind == crate::extension::CopyKind::A));
    }

    #[test]
    fn empty() {
        let ext = build_simple(&Instance::new(1, 1)).unwrap();
        let out = solve_kernel_traced(&ext).unwrap();
        assert!(out.copies.is_empty());
        assert_eq!(out.rounds, 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn agrees_with_gs_on_unit_capacity(seed in 0u64..10_000) {
            let inst = generate(seed, &GenParams::default()).unwrap();
            let ext = build_general(&inst).unwrap();
            prop_assert_eq!(solve_kernel(&ext).unwrap(), solve_gs(&ext).unwrap());
        }

        #[test]
        fn stable_and_maximal_with_capacities(seed in 0u64..10_000) {
            let params = GenParams { capacity_max: 2, edge_count: 7, ..GenParams::default() };
            let inst = generate(seed, &params).unwrap();
            let ext = build_general(&inst).unwrap();
            let out = solve_kernel_traced(&ext).unwrap();
            prop_assert!(is_common_independent(&ext, &out.copies).unwrap());
            prop_assert!(blocking_copies(&ext, &out.copies).unwrap().is_empty());
            prop_assert!(is_maximal(&ext, &out.copies).unwrap());
            prop_assert!(out.rounds <= ext.copies.len() + 1);
        }
    }
}
