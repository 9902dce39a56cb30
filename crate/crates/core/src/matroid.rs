//! Matroid oracles over integer element ids.
//!
//! Every oracle owns its ground set (sorted, distinct) and answers
//! independence queries for sets of distinct ground elements. Elements outside
//! the ground set make a query dependent.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

/// Largest ground set accepted by table-backed and exhaustively checked matroids.
pub const MAX_TABLE_GROUND: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatroidError {
    #[error("element {0} is not in the ground set")]
    OutsideGround(usize),
    #[error("element {0} listed twice")]
    Duplicate(usize),
    #[error("laminar sets {0} and {1} overlap without nesting")]
    NotLaminar(usize, usize),
    #[error("ground set of {0} elements exceeds the table limit of {MAX_TABLE_GROUND}")]
    GroundTooLarge(usize),
    #[error("independence family violates the exchange axiom: {0:?} cannot be augmented from {1:?}")]
    ExchangeViolated(Vec<usize>, Vec<usize>),
    #[error("independence family is not closed under subsets: {0:?} is dependent but contained in {1:?}")]
    NotDownwardClosed(Vec<usize>, Vec<usize>),
    #[error("direct sum operands share element {0}")]
    OverlappingGrounds(usize),
    #[error("set {0:?} is dependent")]
    Dependent(Vec<usize>),
}

/// Independence oracle.
pub trait Matroid: Send + Sync {
    /// Ground set, ascending.
    fn ground(&self) -> &[usize];

    /// `set` must hold distinct elements.
    fn is_independent(&self, set: &[usize]) -> bool;

    /// Incremental independence tester used by greedy algorithms.
    fn builder(&self) -> Box<dyn GreedyBuilder + '_> {
        Box::new(ProbeBuilder { matroid: self, set: Vec::new() })
    }
}

/// Grows an independent set one element at a time.
pub trait GreedyBuilder {
    /// Adds `x` and returns true if the current set plus `x` is independent;
    /// otherwise leaves the set unchanged.
    fn try_add(&mut self, x: usize) -> bool;
}

struct ProbeBuilder<'a, M: ?Sized> {
    matroid: &'a M,
    set: Vec<usize>,
}

impl<M: Matroid + ?Sized> GreedyBuilder for ProbeBuilder<'_, M> {
    fn try_add(&mut self, x: usize) -> bool {
        if self.set.contains(&x) {
            return false;
        }
        self.set.push(x);
        if self.matroid.is_independent(&self.set) {
            true
        } else {
            self.set.pop();
            false
        }
    }
}

fn sorted_ground(mut ground: Vec<usize>) -> Result<Vec<usize>, MatroidError> {
    ground.sort_unstable();
    if let Some(w) = ground.windows(2).find(|w| w[0] == w[1]) {
        return Err(MatroidError::Duplicate(w[0]));
    }
    Ok(ground)
}

fn contains(ground: &[usize], x: usize) -> bool {
    ground.binary_search(&x).is_ok()
}

// ---------------------------------------------------------------------------
// Concrete oracles

/// Uniform matroid: any `q` ground elements are independent.
#[derive(Debug, Clone)]
pub struct Capacity {
    ground: Vec<usize>,
    q: usize,
}

impl Capacity {
    pub fn new(ground: Vec<usize>, q: usize) -> Result<Self, MatroidError> {
        Ok(Capacity { ground: sorted_ground(ground)?, q })
    }
}

impl Matroid for Capacity {
    fn ground(&self) -> &[usize] {
        &self.ground
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        set.len() <= self.q && set.iter().all(|&x| contains(&self.ground, x))
    }

    fn builder(&self) -> Box<dyn GreedyBuilder + '_> {
        Box::new(CapacityBuilder { ground: &self.ground, room: self.q, taken: Vec::new() })
    }
}

struct CapacityBuilder<'a> {
    ground: &'a [usize],
    room: usize,
    taken: Vec<usize>,
}

impl GreedyBuilder for CapacityBuilder<'_> {
    fn try_add(&mut self, x: usize) -> bool {
        if self.room == 0 || !contains(self.ground, x) || self.taken.contains(&x) {
            return false;
        }
        self.room -= 1;
        self.taken.push(x);
        true
    }
}

/// Laminar matroid: `|I ∩ S| <= q_S` for every set `S` of a laminar family.
#[derive(Debug, Clone)]
pub struct Laminar {
    ground: Vec<usize>,
    quotas: Vec<usize>,
    /// element -> indices of the family sets containing it
    membership: HashMap<usize, Vec<usize>>,
}

impl Laminar {
    pub fn new(ground: Vec<usize>, family: Vec<(Vec<usize>, usize)>) -> Result<Self, MatroidError> {
        let ground = sorted_ground(ground)?;
        let mut sets: Vec<BTreeSet<usize>> = Vec::with_capacity(family.len());
        for (members, _) in &family {
            let mut set = BTreeSet::new();
            for &x in members {
                if !contains(&ground, x) {
                    return Err(MatroidError::OutsideGround(x));
                }
                if !set.insert(x) {
                    return Err(MatroidError::Duplicate(x));
                }
            }
            sets.push(set);
        }
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                let (a, b) = (&sets[i], &sets[j]);
                if !(a.is_disjoint(b) || a.is_subset(b) || b.is_subset(a)) {
                    return Err(MatroidError::NotLaminar(i, j));
                }
            }
        }
        let mut membership: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, set) in sets.iter().enumerate() {
            for &x in set {
                membership.entry(x).or_default().push(i);
            }
        }
        let quotas = family.into_iter().map(|(_, q)| q).collect();
        Ok(Laminar { ground, quotas, membership })
    }
}

impl Matroid for Laminar {
    fn ground(&self) -> &[usize] {
        &self.ground
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        let mut counts = vec![0usize; self.quotas.len()];
        for &x in set {
            if !contains(&self.ground, x) {
                return false;
            }
            for &s in self.membership.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                counts[s] += 1;
                if counts[s] > self.quotas[s] {
                    return false;
                }
            }
        }
        true
    }

    fn builder(&self) -> Box<dyn GreedyBuilder + '_> {
        Box::new(LaminarBuilder { matroid: self, counts: vec![0; self.quotas.len()], taken: Vec::new() })
    }
}

struct LaminarBuilder<'a> {
    matroid: &'a Laminar,
    counts: Vec<usize>,
    taken: Vec<usize>,
}

impl GreedyBuilder for LaminarBuilder<'_> {
    fn try_add(&mut self, x: usize) -> bool {
        if !contains(&self.matroid.ground, x) || self.taken.contains(&x) {
            return false;
        }
        let sets = self.matroid.membership.get(&x).map(Vec::as_slice).unwrap_or(&[]);
        if sets.iter().any(|&s| self.counts[s] >= self.matroid.quotas[s]) {
            return false;
        }
        for &s in sets {
            self.counts[s] += 1;
        }
        self.taken.push(x);
        true
    }
}

/// Table-backed matroid given by generating independent sets; the family is
/// their downward closure, checked against the exchange axiom on construction.
#[derive(Debug, Clone)]
pub struct Explicit {
    ground: Vec<usize>,
    index: HashMap<usize, usize>,
    table: Vec<bool>,
}

impl Explicit {
    pub fn new(ground: Vec<usize>, generators: &[Vec<usize>]) -> Result<Self, MatroidError> {
        let ground = sorted_ground(ground)?;
        if ground.len() > MAX_TABLE_GROUND {
            return Err(MatroidError::GroundTooLarge(ground.len()));
        }
        let index: HashMap<usize, usize> = ground.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut table = vec![false; 1 << ground.len()];
        table[0] = true;
        for set in generators {
            let mut mask = 0usize;
            for &x in set {
                let bit = 1 << *index.get(&x).ok_or(MatroidError::OutsideGround(x))?;
                if mask & bit != 0 {
                    return Err(MatroidError::Duplicate(x));
                }
                mask |= bit;
            }
            table[mask] = true;
        }
        for mask in (1..table.len()).rev() {
            if table[mask] {
                let mut rest = mask;
                while rest != 0 {
                    let bit = rest & rest.wrapping_neg();
                    table[mask ^ bit] = true;
                    rest ^= bit;
                }
            }
        }
        let m = Explicit { ground, index, table };
        verify_axioms(&m)?;
        Ok(m)
    }

    /// Table of an arbitrary oracle over a small ground set.
    pub fn from_oracle(m: &dyn Matroid) -> Result<Self, MatroidError> {
        let ground = m.ground().to_vec();
        if ground.len() > MAX_TABLE_GROUND {
            return Err(MatroidError::GroundTooLarge(ground.len()));
        }
        let index = ground.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let table = (0..1usize << ground.len()).map(|mask| m.is_independent(&members(&ground, mask))).collect();
        Ok(Explicit { ground, index, table })
    }

    /// Inclusion-wise maximal independent sets, ascending by bitmask.
    pub fn bases(&self) -> Vec<Vec<usize>> {
        let n = self.ground.len();
        (0..self.table.len())
            .filter(|&mask| self.table[mask] && (0..n).all(|i| mask & (1 << i) != 0 || !self.table[mask | 1 << i]))
            .map(|mask| members(&self.ground, mask))
            .collect()
    }

    fn mask_of(&self, set: &[usize]) -> Option<usize> {
        let mut mask = 0usize;
        for x in set {
            mask |= 1 << self.index.get(x)?;
        }
        Some(mask)
    }
}

impl Matroid for Explicit {
    fn ground(&self) -> &[usize] {
        &self.ground
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        self.mask_of(set).is_some_and(|mask| self.table[mask])
    }

    fn builder(&self) -> Box<dyn GreedyBuilder + '_> {
        Box::new(ExplicitBuilder { matroid: self, mask: 0 })
    }
}

struct ExplicitBuilder<'a> {
    matroid: &'a Explicit,
    mask: usize,
}

impl GreedyBuilder for ExplicitBuilder<'_> {
    fn try_add(&mut self, x: usize) -> bool {
        let Some(&i) = self.matroid.index.get(&x) else {
            return false;
        };
        let next = self.mask | 1 << i;
        if next == self.mask || !self.matroid.table[next] {
            return false;
        }
        self.mask = next;
        true
    }
}

fn members(ground: &[usize], mask: usize) -> Vec<usize> {
    ground.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &x)| x).collect()
}

// ---------------------------------------------------------------------------
// Constructions

/// `M1 ⊕ M2` over disjoint ground sets.
pub struct DirectSum {
    ground: Vec<usize>,
    parts: Vec<Box<dyn Matroid>>,
}

pub fn direct_sum(a: Box<dyn Matroid>, b: Box<dyn Matroid>) -> Result<DirectSum, MatroidError> {
    if let Some(&x) = a.ground().iter().find(|&&x| contains(b.ground(), x)) {
        return Err(MatroidError::OverlappingGrounds(x));
    }
    let mut ground: Vec<usize> = a.ground().iter().chain(b.ground()).copied().collect();
    ground.sort_unstable();
    Ok(DirectSum { ground, parts: vec![a, b] })
}

impl Matroid for DirectSum {
    fn ground(&self) -> &[usize] {
        &self.ground
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        if !set.iter().all(|&x| contains(&self.ground, x)) {
            return false;
        }
        self.parts.iter().all(|part| {
            let restricted: Vec<usize> = set.iter().copied().filter(|&x| contains(part.ground(), x)).collect();
            part.is_independent(&restricted)
        })
    }
}

/// Truncation to sets of size at most `k`.
pub struct Truncation {
    inner: Box<dyn Matroid>,
    k: usize,
}

pub fn truncate(inner: Box<dyn Matroid>, k: usize) -> Truncation {
    Truncation { inner, k }
}

impl Matroid for Truncation {
    fn ground(&self) -> &[usize] {
        self.inner.ground()
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        set.len() <= self.k && self.inner.is_independent(set)
    }
}

/// `M \ J`: ground `E - J`, independence inherited.
pub struct Deletion {
    ground: Vec<usize>,
    inner: Box<dyn Matroid>,
}

pub fn delete(inner: Box<dyn Matroid>, removed: &[usize]) -> Deletion {
    let ground = inner.ground().iter().copied().filter(|x| !removed.contains(x)).collect();
    Deletion { ground, inner }
}

impl Matroid for Deletion {
    fn ground(&self) -> &[usize] {
        &self.ground
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        set.iter().all(|&x| contains(&self.ground, x)) && self.inner.is_independent(set)
    }
}

/// `M / J` for independent `J`: `I` independent iff `I ∪ J` is.
pub struct Contraction {
    ground: Vec<usize>,
    contracted: Vec<usize>,
    inner: Box<dyn Matroid>,
}

pub fn contract(inner: Box<dyn Matroid>, contracted: &[usize]) -> Result<Contraction, MatroidError> {
    if !inner.is_independent(contracted) {
        return Err(MatroidError::Dependent(contracted.to_vec()));
    }
    let ground = inner.ground().iter().copied().filter(|x| !contracted.contains(x)).collect();
    Ok(Contraction { ground, contracted: contracted.to_vec(), inner })
}

impl Matroid for Contraction {
    fn ground(&self) -> &[usize] {
        &self.ground
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        if !set.iter().all(|&x| contains(&self.ground, x)) {
            return false;
        }
        let mut union = self.contracted.clone();
        union.extend_from_slice(set);
        self.inner.is_independent(&union)
    }
}

// ---------------------------------------------------------------------------
// Algorithms

/// Size of a greedily grown maximal independent set.
pub fn rank(m: &dyn Matroid) -> usize {
    let mut builder = m.builder();
    m.ground().iter().filter(|&&x| builder.try_add(x)).count()
}

/// The unique circuit in `independent + x`, or `None` when that set is
/// independent. Found by single-removal probing: `y` lies on the circuit iff
/// `independent + x - y` is independent.
pub fn fundamental_circuit(
    m: &dyn Matroid,
    independent: &[usize],
    x: usize,
) -> Result<Option<Vec<usize>>, MatroidError> {
    if !m.is_independent(independent) {
        return Err(MatroidError::Dependent(independent.to_vec()));
    }
    let mut extended = independent.to_vec();
    extended.push(x);
    if m.is_independent(&extended) {
        return Ok(None);
    }
    let mut circuit: Vec<usize> = independent
        .iter()
        .copied()
        .filter(|&y| {
            let probe: Vec<usize> = extended.iter().copied().filter(|&z| z != y).collect();
            m.is_independent(&probe)
        })
        .collect();
    circuit.push(x);
    circuit.sort_unstable();
    Ok(Some(circuit))
}

/// Greedy base for `order` (best first). The result keeps the order's sequence.
pub fn optimal_base(m: &dyn Matroid, order: &[usize]) -> Vec<usize> {
    let mut builder = m.builder();
    order.iter().copied().filter(|&x| builder.try_add(x)).collect()
}

/// Exhaustive check of downward closure and the exchange axiom.
///
/// Uses the rank table: the family is a matroid iff, for every independent
/// `A`, the elements that cannot extend `A` together with `A` itself span no
/// independent set larger than `A`.
pub fn verify_axioms(m: &dyn Matroid) -> Result<(), MatroidError> {
    let ground = m.ground();
    let n = ground.len();
    if n > MAX_TABLE_GROUND {
        return Err(MatroidError::GroundTooLarge(n));
    }
    let size = 1usize << n;
    let indep: Vec<bool> = (0..size).map(|mask| m.is_independent(&members(ground, mask))).collect();
    if !indep[0] {
        return Err(MatroidError::Dependent(Vec::new()));
    }
    let mut rank_of = vec![0u8; size];
    for mask in 1..size {
        if indep[mask] {
            rank_of[mask] = mask.count_ones() as u8;
            let mut rest = mask;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                if !indep[mask ^ bit] {
                    return Err(MatroidError::NotDownwardClosed(members(ground, mask ^ bit), members(ground, mask)));
                }
                rest ^= bit;
            }
        } else {
            let mut best = 0;
            let mut rest = mask;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                best = best.max(rank_of[mask ^ bit]);
                rest ^= bit;
            }
            rank_of[mask] = best;
        }
    }
    let full = size - 1;
    for a in 0..size {
        if !indep[a] {
            continue;
        }
        let mut stuck = a;
        let mut outside = full & !a;
        while outside != 0 {
            let bit = outside & outside.wrapping_neg();
            if !indep[a | bit] {
                stuck |= bit;
            }
            outside ^= bit;
        }
        if rank_of[stuck] as u32 > a.count_ones() {
            // find a concrete witness B
            let witness = (0..size)
                .find(|&b| b & !stuck == 0 && indep[b] && b.count_ones() == a.count_ones() + 1)
                .unwrap_or(stuck);
            return Err(MatroidError::ExchangeViolated(members(ground, a), members(ground, witness)));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Serializable specifications

/// One set of a laminar family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaminarSet {
    pub edges: Vec<usize>,
    pub quota: usize,
}

/// Per-vertex constraint as it appears in instance files. The ground set is
/// always the vertex's incident edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MatroidSpec {
    Capacity { q: usize },
    Laminar { sets: Vec<LaminarSet> },
    Explicit { independent_sets: Vec<Vec<usize>> },
}

impl MatroidSpec {
    pub fn is_unit_capacity(&self) -> bool {
        matches!(self, MatroidSpec::Capacity { q: 1 })
    }

    pub fn oracle(&self, ground: Vec<usize>) -> Result<Box<dyn Matroid>, MatroidError> {
        Ok(match self {
            MatroidSpec::Capacity { q } => Box::new(Capacity::new(ground, *q)?),
            MatroidSpec::Laminar { sets } => {
                Box::new(Laminar::new(ground, sets.iter().map(|s| (s.edges.clone(), s.quota)).collect())?)
            }
            MatroidSpec::Explicit { independent_sets } => Box::new(Explicit::new(ground, independent_sets)?),
        })
    }

    /// Canonical form: sorted member lists, sorted generator list.
    pub fn canonical(&self) -> MatroidSpec {
        match self {
            MatroidSpec::Capacity { q } => MatroidSpec::Capacity { q: *q },
            MatroidSpec::Laminar { sets } => {
                let mut sets: Vec<LaminarSet> = sets
                    .iter()
                    .map(|s| {
                        let mut edges = s.edges.clone();
                        edges.sort_unstable();
                        LaminarSet { edges, quota: s.quota }
                    })
                    .collect();
                sets.sort_by(|a, b| (&a.edges, a.quota).cmp(&(&b.edges, b.quota)));
                MatroidSpec::Laminar { sets }
            }
            MatroidSpec::Explicit { independent_sets } => {
                let mut sets: Vec<Vec<usize>> = independent_sets
                    .iter()
                    .map(|s| {
                        let mut s = s.clone();
                        s.sort_unstable();
                        s
                    })
                    .collect();
                sets.sort();
                sets.dedup();
                MatroidSpec::Explicit { independent_sets: sets }
            }
        }
    }
}
