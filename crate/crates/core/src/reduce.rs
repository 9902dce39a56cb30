//! Instances encoding classic stability notions.
//!
//! All source values must lie on the `10^-6` grid. Thresholds placed half a
//! grid step away from a grid point turn the `>=` tests of cγ-blocking into
//! the strict or `>= Δ` tests of the source notion: on the grid, an
//! improvement of at least half a step is an improvement of at least a full
//! step.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{Edge, Instance, VertexRef};
use crate::value::{Value, GRID_STEP, HALF_STEP};

/// A bipartite market with weak preferences and no thresholds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Market {
    pub u_count: usize,
    pub w_count: usize,
    pub edges: Vec<MarketEdge>,
    pub critical_vertices: BTreeSet<VertexRef>,
    pub critical_edges: BTreeSet<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MarketEdge {
    pub u: usize,
    pub w: usize,
    pub p_u: Value,
    pub p_w: Value,
}

impl Market {
    pub fn new(u_count: usize, w_count: usize) -> Market {
        Market { u_count, w_count, ..Market::default() }
    }

    pub fn edge(mut self, u: usize, w: usize, p_u: Value, p_w: Value) -> Market {
        self.edges.push(MarketEdge { u, w, p_u, p_w });
        self
    }
}

/// Blocking rule of the source model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    /// Both agents strictly improve.
    Weak,
    /// Both agents improve by at least Δ.
    DeltaMin(Value),
    /// Both strictly improve and one of them by at least Δ.
    DeltaMax(Value),
}

impl Stability {
    /// `(gamma, delta)` placed on both sides of every non-free edge.
    fn thresholds(self) -> Result<(Value, Value)> {
        let half = Value::from_units(HALF_STEP);
        match self {
            Stability::Weak => Ok((half, Value::from_units(GRID_STEP))),
            Stability::DeltaMin(d) => {
                check_delta(d)?;
                Ok((d - half, d))
            }
            Stability::DeltaMax(d) => {
                check_delta(d)?;
                Ok((half, d))
            }
        }
    }
}

fn check_delta(d: Value) -> Result<()> {
    if !d.on_grid() {
        return Err(Error::Precondition(format!("delta {d} is not on the 1e-6 grid")));
    }
    if d <= Value::ZERO {
        return Err(Error::Precondition(format!("delta {d} must be positive")));
    }
    Ok(())
}

fn build(market: &Market, stability: Stability, free: &BTreeSet<usize>) -> Result<Instance> {
    let (gamma, delta) = stability.thresholds()?;
    let mut inst = Instance::new(market.u_count, market.w_count);
    for (id, e) in market.edges.iter().enumerate() {
        if !e.p_u.on_grid() || !e.p_w.on_grid() {
            return Err(Error::Precondition(format!("edge {id}: preference values must lie on the 1e-6 grid")));
        }
        let (g, d) = if free.contains(&id) { (Value::Infinity, Value::Infinity) } else { (gamma, delta) };
        let mut edge = Edge::new(id, e.u, e.w, e.p_u, e.p_w).with_u_thresholds(g, d).with_w_thresholds(g, d);
        edge.critical = market.critical_edges.contains(&id);
        inst.push_edge(edge);
    }
    if let Some(&bad) = free.iter().find(|&&id| id >= market.edges.len()) {
        return Err(Error::Precondition(format!("free edge {bad} does not exist")));
    }
    inst.critical_vertices = market.critical_vertices.clone();
    inst.validated()?;
    Ok(inst)
}

pub fn from_weak_stability(market: &Market) -> Result<Instance> {
    build(market, Stability::Weak, &BTreeSet::new())
}

pub fn from_delta_min(market: &Market, delta: Value) -> Result<Instance> {
    build(market, Stability::DeltaMin(delta), &BTreeSet::new())
}

pub fn from_delta_max(market: &Market, delta: Value) -> Result<Instance> {
    build(market, Stability::DeltaMax(delta), &BTreeSet::new())
}

/// Edges in `free` get infinite thresholds; the rest follow `base`.
pub fn from_free_edges(market: &Market, free: &BTreeSet<usize>, base: Stability) -> Result<Instance> {
    build(market, base, free)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Matching;
    use crate::verify::Oracle;

    /// u0 - w0 (edge 0), u0 - w1 (edge 1), u1 - w1 (edge 2). Matching {1}
    /// leaves edge 0 with improvements (p_u(0) - p_u(1), p_w(0) - 0).
    fn single_swap(du: i64, pw: i64) -> Market {
        Market::new(2, 2)
            .edge(0, 0, Value::int(1 + du), Value::int(pw))
            .edge(0, 1, Value::int(1), Value::int(1))
            .edge(1, 1, Value::int(1), Value::int(1))
    }

    fn blocks(inst: &Instance, m: &[usize], e: usize) -> bool {
        let oracle = Oracle::new(inst, 20).unwrap();
        let opt = oracle.criticality_optimum();
        oracle.cgamma_blocks(&Matching::from_iter(m.iter().copied()), e, opt).unwrap().is_some()
    }

    #[test]
    fn delta_min_needs_both_improvements() {
        let inst = from_delta_min(&single_swap(2, 2), Value::int(2)).unwrap();
        assert!(blocks(&inst, &[1], 0));
        let inst = from_delta_min(&single_swap(2, 1), Value::int(2)).unwrap();
        assert!(!blocks(&inst, &[1], 0));
    }

    #[test]
    fn delta_max_needs_one_large_improvement() {
        // improvements (2, 1e-6)
        let market = Market::new(2, 2)
            .edge(0, 0, Value::int(3), Value::steps(1))
            .edge(0, 1, Value::int(1), Value::int(1))
            .edge(1, 1, Value::int(1), Value::int(1));
        assert!(blocks(&from_delta_max(&market, Value::int(2)).unwrap(), &[1], 0));
        let inst = from_delta_max(&single_swap(1, 1), Value::int(2)).unwrap();
        assert!(!blocks(&inst, &[1], 0));
    }

    #[test]
    fn weak_stability_is_strict_improvement() {
        assert!(blocks(&from_weak_stability(&single_swap(1, 1)).unwrap(), &[1], 0));
        assert!(!blocks(&from_weak_stability(&single_swap(0, 1)).unwrap(), &[1], 0));
        // w0 is unmatched; p_w = 0 is no improvement over p(∅) = 0
        assert!(!blocks(&from_weak_stability(&single_swap(1, 0)).unwrap(), &[1], 0));
    }

    #[test]
    fn free_edges_never_block() {
        let free = BTreeSet::from([0]);
        for base in [Stability::Weak, Stability::DeltaMin(Value::int(1)), Stability::DeltaMax(Value::int(1))] {
            let inst = from_free_edges(&single_swap(50, 50), &free, base).unwrap();
            assert!(inst.edges[0].is_free());
            assert!(!blocks(&inst, &[1], 0));
            assert!(!blocks(&inst, &[], 0));
        }
    }

    #[test]
    fn rejects_off_grid_and_nonpositive_delta() {
        let m = single_swap(1, 1);
        assert!(from_delta_min(&m, Value::from_units(HALF_STEP)).is_err());
        assert!(from_delta_min(&m, Value::ZERO).is_err());
        assert!(from_delta_max(&m, Value::int(-1)).is_err());
        assert!(from_delta_max(&m, Value::Infinity).is_err());
        let off = Market::new(1, 1).edge(0, 0, Value::from_units(3), Value::int(1));
        assert!(from_weak_stability(&off).is_err());
        assert!(from_free_edges(&m, &BTreeSet::from([9]), Stability::Weak).is_err());
    }
}
