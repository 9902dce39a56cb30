//! Exhaustive ground truth for small instances.
//!
//! Everything here enumerates feasible edge sets directly and evaluates the
//! definitions on them; nothing goes through the extended instance.

use std::cell::OnceCell;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::{simple_applies, Construction};
use crate::generate::{generate, GenParams};
use crate::model::{Instance, Matching, Side, VertexMatroids, VertexRef, UNMATCHED_VALUE};
use crate::solver::{run, ConstructionChoice, Engine};
use crate::value::Value;

pub const DEFAULT_CAP: usize = 20;

/// The `(f, g)` pair that lets an edge block; `None` stands for the empty slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub f: Option<usize>,
    pub g: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingEdge {
    pub edge: usize,
    pub f: Option<usize>,
    pub g: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub feasible: bool,
    pub criticality_score: usize,
    pub criticality_optimum: usize,
    pub blocking_edges: Vec<BlockingEdge>,
    pub is_critical: bool,
    pub is_cgamma_stable: bool,
}

pub struct Oracle<'a> {
    instance: &'a Instance,
    matroids: VertexMatroids,
    feasible: OnceCell<Vec<Matching>>,
    optimum: OnceCell<usize>,
}

impl<'a> Oracle<'a> {
    /// Fails on invalid instances and on more than `cap` edges.
    pub fn new(instance: &'a Instance, cap: usize) -> Result<Oracle<'a>> {
        instance.validated()?;
        if instance.edges.len() > cap {
            return Err(Error::CapExceeded { edges: instance.edges.len(), cap });
        }
        Ok(Oracle { instance, matroids: instance.matroids()?, feasible: OnceCell::new(), optimum: OnceCell::new() })
    }

    pub fn instance(&self) -> &Instance {
        self.instance
    }

    fn part(&self, set: &[usize], v: VertexRef) -> Vec<usize> {
        self.matroids.restrict(self.instance, v, set)
    }

    fn independent_at(&self, set: &[usize], v: VertexRef) -> bool {
        self.matroids.at(v).is_independent(&self.part(set, v))
    }

    pub fn is_feasible(&self, m: &Matching) -> bool {
        self.matroids.is_feasible(self.instance, m.edges())
    }

    /// All feasible edge sets, in lexicographic order of their sorted id lists.
    pub fn enumerate_feasible(&self) -> &[Matching] {
        self.feasible.get_or_init(|| {
            let mut out = Vec::new();
            let mut current = Vec::new();
            self.extend(&mut current, 0, &mut out);
            out
        })
    }

    fn extend(&self, current: &mut Vec<usize>, from: usize, out: &mut Vec<Matching>) {
        out.push(Matching::from_iter(current.iter().copied()));
        for id in from..self.instance.edges.len() {
            let e = &self.instance.edges[id];
            current.push(id);
            if self.independent_at(current, VertexRef::u(e.u)) && self.independent_at(current, VertexRef::w(e.w)) {
                self.extend(current, id + 1, out);
            }
            current.pop();
        }
    }

    pub fn criticality_optimum(&self) -> usize {
        *self.optimum.get_or_init(|| {
            self.enumerate_feasible().iter().map(|m| self.instance.criticality_count(m.edges())).max().unwrap_or(0)
        })
    }

    /// First `(f, g)` witness that lets `e` cγ-block `m`. `m` must be feasible
    /// with score `opt`, and `e` must lie outside it.
    pub fn cgamma_blocks(&self, m: &Matching, e: usize, opt: usize) -> Result<Option<Witness>> {
        if e >= self.instance.edges.len() {
            return Err(Error::Precondition(format!("edge {e} does not exist")));
        }
        if m.contains(e) {
            return Err(Error::Precondition(format!("edge {e} is already in the matching")));
        }
        if !self.is_feasible(m) {
            return Err(Error::Precondition("matching is not feasible".into()));
        }
        let score = self.instance.criticality_count(m.edges());
        if score != opt {
            return Err(Error::Precondition(format!("matching has score {score}, expected {opt}")));
        }
        Ok(self.witness(m, e, opt))
    }

    fn witness(&self, m: &Matching, e: usize, opt: usize) -> Option<Witness> {
        let edge = &self.instance.edges[e];
        let (u, w) = (VertexRef::u(edge.u), VertexRef::w(edge.w));
        let slots = |v: VertexRef| -> Vec<Option<usize>> {
            std::iter::once(None).chain(self.part(m.edges(), v).into_iter().map(Some)).collect()
        };
        let pref = |slot: Option<usize>, side: Side| slot.map_or(UNMATCHED_VALUE, |id| self.instance.edges[id].pref(side));
        let swapped = |drop: &[Option<usize>]| -> Vec<usize> {
            let mut s: Vec<usize> = m.edges().iter().copied().filter(|id| !drop.contains(&Some(*id))).collect();
            s.push(e);
            s
        };
        let clears = |imp: Value, side: Side| (imp >= edge.gamma(side), imp >= edge.delta(side));

        for f in slots(u) {
            if !self.independent_at(&swapped(&[f]), u) {
                continue;
            }
            let (u_gamma, u_delta) = clears(edge.p_u - pref(f, Side::U), Side::U);
            if !u_gamma {
                continue;
            }
            for g in slots(w) {
                if !self.independent_at(&swapped(&[g]), w) {
                    continue;
                }
                let (w_gamma, w_delta) = clears(edge.p_w - pref(g, Side::W), Side::W);
                if !((u_gamma && w_delta) || (u_delta && w_gamma)) {
                    continue;
                }
                if self.instance.criticality_count(&swapped(&[f, g])) == opt {
                    return Some(Witness { f, g });
                }
            }
        }
        None
    }

    pub fn certify(&self, m: &Matching) -> Certificate {
        let opt = self.criticality_optimum();
        let in_range = m.edges().iter().all(|&id| id < self.instance.edges.len());
        if !in_range || !self.is_feasible(m) {
            return Certificate {
                feasible: false,
                criticality_score: 0,
                criticality_optimum: opt,
                blocking_edges: Vec::new(),
                is_critical: false,
                is_cgamma_stable: false,
            };
        }
        let score = self.instance.criticality_count(m.edges());
        let blocking_edges: Vec<BlockingEdge> = (0..self.instance.edges.len())
            .filter(|&e| !m.contains(e))
            .filter_map(|e| self.witness(m, e, opt).map(|w| BlockingEdge { edge: e, f: w.f, g: w.g }))
            .collect();
        let is_critical = score == opt;
        Certificate {
            feasible: true,
            criticality_score: score,
            criticality_optimum: opt,
            is_cgamma_stable: is_critical && blocking_edges.is_empty(),
            blocking_edges,
            is_critical,
        }
    }

    fn is_stable(&self, m: &Matching) -> bool {
        let opt = self.criticality_optimum();
        self.instance.criticality_count(m.edges()) == opt
            && (0..self.instance.edges.len()).filter(|&e| !m.contains(e)).all(|e| self.witness(m, e, opt).is_none())
    }

    /// Largest critical cγ-stable set; the first in enumeration order among
    /// equals. `None` only if no stable set exists.
    pub fn max_cgamma_stable(&self) -> Option<(usize, Matching)> {
        let opt = self.criticality_optimum();
        let mut critical: Vec<&Matching> =
            self.enumerate_feasible().iter().filter(|m| self.instance.criticality_count(m.edges()) == opt).collect();
        critical.sort_by_key(|m| std::cmp::Reverse(m.len()));
        critical.into_iter().find(|m| self.is_stable(m)).map(|m| (m.len(), m.clone()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantReport {
    pub engine: String,
    pub construction: Construction,
    pub alg_size: usize,
    pub certified: bool,
    pub ratio_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub seed: u64,
    /// Size produced by the default engine and construction.
    pub alg_size: usize,
    pub opt_stable_size: usize,
    /// `2 * opt <= 3 * alg` for every variant.
    pub ratio_ok: bool,
    /// Every variant's output is critical and cγ-stable.
    pub certified: bool,
    pub variants: Vec<VariantReport>,
    /// Present on failure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<serde_json::Value>,
}

impl RatioReport {
    pub fn ok(&self) -> bool {
        self.ratio_ok && self.certified
    }
}

/// Every engine and construction that applies to `instance`.
pub fn variants(instance: &Instance) -> Vec<(Engine, ConstructionChoice)> {
    let engines: &[Engine] = if instance.is_one_to_one() { &[Engine::Gs, Engine::Kernel] } else { &[Engine::Kernel] };
    let constructions: &[ConstructionChoice] = if simple_applies(&instance.normalize()) {
        &[ConstructionChoice::Simple, ConstructionChoice::General]
    } else {
        &[ConstructionChoice::General]
    };
    engines.iter().flat_map(|&e| constructions.iter().map(move |&c| (e, c))).collect()
}

/// Checks one instance: every variant certified, ratio against brute force.
pub fn check_instance(seed: u64, instance: &Instance, cap: usize) -> Result<RatioReport> {
    let oracle = Oracle::new(instance, cap)?;
    let (opt_stable_size, _) = oracle
        .max_cgamma_stable()
        .ok_or_else(|| Error::Precondition("no cγ-stable matching found".into()))?;
    let alg_size = run(instance, Engine::Auto, ConstructionChoice::Auto)?.matching.len();
    let mut reports = Vec::new();
    for (engine, construction) in variants(instance) {
        let solved = run(instance, engine, construction)?;
        let cert = oracle.certify(&solved.matching);
        let alg = solved.matching.len();
        reports.push(VariantReport {
            engine: solved.engine.to_string(),
            construction: solved.construction,
            alg_size: alg,
            certified: cert.is_cgamma_stable,
            ratio_ok: 2 * opt_stable_size <= 3 * alg,
        });
    }
    let ratio_ok = reports.iter().all(|r| r.ratio_ok);
    let certified = reports.iter().all(|r| r.certified);
    let failed = !(ratio_ok && certified);
    Ok(RatioReport {
        seed,
        alg_size,
        opt_stable_size,
        ratio_ok,
        certified,
        variants: reports,
        instance: failed.then(|| crate::format::to_json_value(instance)),
    })
}

/// Seeds `0..seed_count`, checked in parallel, reported in seed order.
pub fn ratio_harness(seed_count: u64, params: &GenParams, cap: usize) -> Result<Vec<RatioReport>> {
    params.check()?;
    if params.edge_count > cap {
        return Err(Error::CapExceeded { edges: params.edge_count, cap });
    }
    (0..seed_count)
        .into_par_iter()
        .map(|seed| check_instance(seed, &generate(seed, params)?, cap))
        .collect()
}
