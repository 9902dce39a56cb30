//! U-proposing deferred acceptance on the extended instance.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::extension::ExtendedInstance;
use crate::model::{Matching, Side};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GsOutcome {
    /// Matched copy ids, ascending.
    pub copies: Vec<usize>,
    pub proposals: usize,
}

fn require_unit(ext: &ExtendedInstance) -> Result<()> {
    match ext.non_unit_vertex() {
        Some(v) => Err(Error::EngineMismatch { engine: "gs", vertex: v.to_string() }),
        None => Ok(()),
    }
}

/// The U-optimal stable matching of copies.
pub fn solve_gs(ext: &ExtendedInstance) -> Result<Vec<usize>> {
    let queue: Vec<usize> = (0..ext.u_count).collect();
    Ok(solve_gs_with_queue(ext, &queue)?.copies)
}

/// Same as [`solve_gs`] with an explicit initial proposer order, which must
/// be a permutation of the U vertices.
pub fn solve_gs_with_queue(ext: &ExtendedInstance, queue: &[usize]) -> Result<GsOutcome> {
    require_unit(ext)?;
    let mut seen = vec![false; ext.u_count];
    for &u in queue {
        if u >= ext.u_count || std::mem::replace(&mut seen[u], true) {
            return Err(Error::Precondition("proposer queue must be a permutation of U".into()));
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Precondition("proposer queue must be a permutation of U".into()));
    }

    let w_pos = ext.positions(Side::W);
    let mut cursor = vec![0usize; ext.u_count];
    let mut held: Vec<Option<usize>> = vec![None; ext.w_count];
    let mut queue: VecDeque<usize> = queue.iter().copied().collect();
    let mut proposals = 0;

    while let Some(u) = queue.pop_front() {
        let list = &ext.u_orders[u];
        while let Some(&c) = list.get(cursor[u]) {
            proposals += 1;
            let w = ext.copies[c].w;
            match held[w] {
                None => {
                    held[w] = Some(c);
                    break;
                }
                Some(h) if w_pos[c] < w_pos[h] => {
                    held[w] = Some(c);
                    let loser = ext.copies[h].u;
                    cursor[loser] += 1;
                    queue.push_back(loser);
                    break;
                }
                Some(_) => cursor[u] += 1,
            }
        }
    }

    let mut copies: Vec<usize> = held.into_iter().flatten().collect();
    copies.sort_unstable();
    Ok(GsOutcome { copies, proposals })
}

/// Original edges of the given copies.
pub fn project(ext: &ExtendedInstance, copies: &[usize]) -> Matching {
    copies.iter().map(|&c| ext.back_map(c)).collect()
}

/// True when `copies` uses every vertex at most once.
pub fn is_matching(ext: &ExtendedInstance, copies: &[usize]) -> bool {
    let mut u_used = vec![false; ext.u_count];
    let mut w_used = vec![false; ext.w_count];
    copies.iter().all(|&c| {
        let e = &ext.copies[c];
        !std::mem::replace(&mut u_used[e.u], true) && !std::mem::replace(&mut w_used[e.w], true)
    })
}

/// Copies outside `matched` that both endpoints prefer to their current
/// copy (or to being unassigned). `matched` must be a matching.
pub fn blocking_copies(ext: &ExtendedInstance, matched: &[usize]) -> Vec<usize> {
    let u_pos = ext.positions(Side::U);
    let w_pos = ext.positions(Side::W);
    let mut u_has = vec![usize::MAX; ext.u_count];
    let mut w_has = vec![usize::MAX; ext.w_count];
    let mut inside = vec![false; ext.copies.len()];
    for &c in matched {
        let e = &ext.copies[c];
        u_has[e.u] = u_pos[c];
        w_has[e.w] = w_pos[c];
        inside[c] = true;
    }
    ext.copies
        .iter()
        .filter(|e| !inside[e.id] && u_pos[e.id] < u_has[e.u] && w_pos[e.id] < w_has[e.w])
        .map(|e| e.id)
        .collect()
}
