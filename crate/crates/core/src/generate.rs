//! Seeded random instances.
//!
//! Output depends only on `(seed, params)`: the stream is ChaCha8 and every
//! draw goes through integer ranges or `gen_bool`, both platform independent.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matroid::{Explicit, Laminar, LaminarSet, MatroidSpec};
use crate::model::{Edge, Instance, VertexRef};
use crate::value::{Value, UNITS_PER_ONE};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub u_count: usize,
    pub w_count: usize,
    pub edge_count: usize,
    /// Preferences are integers in `0..=p_max`.
    pub p_max: u32,
    pub crit_vertex_prob: f64,
    pub crit_edge_prob: f64,
    /// Capacities are drawn from `1..=capacity_max`; 1 gives one-to-one instances.
    pub capacity_max: usize,
    /// Probability that an edge is free (all thresholds infinite).
    pub free_edge_prob: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            u_count: 4,
            w_count: 4,
            edge_count: 9,
            p_max: 3,
            crit_vertex_prob: 0.3,
            crit_edge_prob: 0.5,
            capacity_max: 1,
            free_edge_prob: 0.1,
        }
    }
}

impl GenParams {
    pub fn check(&self) -> Result<()> {
        let probs = [self.crit_vertex_prob, self.crit_edge_prob, self.free_edge_prob];
        if self.u_count == 0 || self.w_count == 0 || self.edge_count == 0 || self.capacity_max == 0 {
            return Err(Error::Precondition("vertex counts, edge_count and capacity_max must be positive".into()));
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Precondition("probabilities must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Half-unit multiple in `1..=max_halves`.
fn halves(rng: &mut ChaCha8Rng, max_halves: i64) -> Value {
    Value::from_units(rng.random_range(1..=max_halves) * UNITS_PER_ONE / 2)
}

/// Normalized, valid instance drawn from `params`.
pub fn generate(seed: u64, params: &GenParams) -> Result<Instance> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inst = Instance::new(params.u_count, params.w_count);
    let spread = 2 * i64::from(params.p_max.max(1));

    for v in (0..params.u_count).map(VertexRef::u).chain((0..params.w_count).map(VertexRef::w)) {
        if rng.random_bool(params.crit_vertex_prob) {
            inst.critical_vertices.insert(v);
        }
    }

    for _ in 0..params.edge_count {
        let u = rng.random_range(0..params.u_count);
        let w = rng.random_range(0..params.w_count);
        let p_u = Value::int(i64::from(rng.random_range(0..=params.p_max)));
        let p_w = Value::int(i64::from(rng.random_range(0..=params.p_max)));
        let mut edge = Edge::new(0, u, w, p_u, p_w);
        if rng.random_bool(params.free_edge_prob) {
            edge = edge.with_u_thresholds(Value::Infinity, Value::Infinity).with_w_thresholds(Value::Infinity, Value::Infinity);
        } else {
            let gu = halves(&mut rng, spread);
            let gw = halves(&mut rng, spread);
            // occasionally only the delta side is infinite
            let du = if rng.random_bool(params.free_edge_prob / 2.0) { Value::Infinity } else { gu + halves(&mut rng, spread) };
            let dw = if rng.random_bool(params.free_edge_prob / 2.0) { Value::Infinity } else { gw + halves(&mut rng, spread) };
            edge = edge.with_u_thresholds(gu, du).with_w_thresholds(gw, dw);
        }
        edge.critical = rng.random_bool(params.crit_edge_prob);
        inst.push_edge(edge);
    }

    if params.capacity_max > 1 {
        let adjacency = inst.adjacency();
        let vertices: Vec<VertexRef> = inst.vertices().collect();
        for v in vertices {
            let incident = adjacency.of(v).to_vec();
            let q = rng.random_range(1..=params.capacity_max);
            let spec = match rng.random_range(0..4) {
                0 | 1 => MatroidSpec::Capacity { q },
                kind => {
                    let sets = laminar_family(&mut rng, &incident, q);
                    if kind == 2 || incident.len() > 12 {
                        MatroidSpec::Laminar { sets }
                    } else {
                        let family = sets.iter().map(|s| (s.edges.clone(), s.quota)).collect();
                        let table = Explicit::from_oracle(&Laminar::new(incident.clone(), family)?)?;
                        MatroidSpec::Explicit { independent_sets: table.bases() }
                    }
                }
            };
            if !spec.is_unit_capacity() {
                inst.constraints.insert(v, spec);
            }
        }
    }

    let inst = inst.normalize();
    debug_assert!(inst.validate().is_ok());
    Ok(inst)
}

/// Whole-neighbourhood quota `q` plus a random nested subset with quota 1.
fn laminar_family(rng: &mut ChaCha8Rng, incident: &[usize], q: usize) -> Vec<LaminarSet> {
    let mut sets = vec![LaminarSet { edges: incident.to_vec(), quota: q }];
    if incident.len() >= 2 {
        let mut pool = incident.to_vec();
        pool.shuffle(rng);
        let take = rng.random_range(2..=pool.len());
        let mut sub = pool[..take].to_vec();
        sub.sort_unstable();
        sets.push(LaminarSet { edges: sub, quota: 1 });
    }
    sets
}
