//! Sorting by transpositions.
//!
//! Three engines share the [`SortResult`] contract:
//!
//! * [`exact_distance`]: bidirectional breadth-first search on the glued
//!   permutation, returning a shortest sorting sequence.
//! * [`fpt_sort`]: bounded search tree over the transpositions of the glued
//!   permutation, pruned by the breakpoint lower bound.
//! * [`greedy_sort`]: repeatedly moves a whole block next to its value
//!   neighbour, removing at least one breakpoint per step.
//!
//! [`DistanceTable`] is a plain breadth-first search over every permutation of
//! `[n]`, with no gluing or pruning, meant as an oracle for small `n`.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use thiserror::Error;

use crate::perm::{self, PermError, Permutation, Transposition};

/// Default input-size cap for [`exact_distance`].
pub const DEFAULT_EXACT_CAP: usize = 10;

/// Largest glued length the packed search state can hold.
const MAX_PACKED_LEN: usize = 16;

/// Largest `n` accepted by [`DistanceTable`].
pub const MAX_TABLE_LEN: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SbtError {
    #[error("permutation of length {n} exceeds the exact-search cap of {cap}")]
    SizeCapExceeded { n: usize, cap: usize },
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// A sorting sequence: applying `sequence` left to right to the input yields
/// the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortResult {
    pub sequence: Vec<Transposition>,
    pub distance: usize,
}

impl SortResult {
    fn new(sequence: Vec<Transposition>) -> Self {
        let distance = sequence.len();
        SortResult { sequence, distance }
    }

    fn empty() -> Self {
        SortResult::new(Vec::new())
    }
}

/// Exact transposition distance with a shortest sorting sequence, using the
/// default size cap.
pub fn exact_distance(pi: &Permutation) -> Result<SortResult, SbtError> {
    exact_distance_with_cap(pi, DEFAULT_EXACT_CAP)
}

pub fn exact_distance_with_cap(pi: &Permutation, cap: usize) -> Result<SortResult, SbtError> {
    let cap = cap.min(MAX_PACKED_LEN);
    if pi.len() > cap {
        return Err(SbtError::SizeCapExceeded { n: pi.len(), cap });
    }
    if pi.is_identity() {
        return Ok(SortResult::empty());
    }
    let gluing = pi.gluing()?;
    let glued_seq = bidirectional_search(gluing.glued().as_slice());
    Ok(SortResult::new(gluing.expand(&glued_seq)?))
}

fn pack(elems: &[usize]) -> u64 {
    elems
        .iter()
        .enumerate()
        .fold(0u64, |acc, (p, &v)| acc | (((v - 1) as u64) << (4 * p)))
}

fn unpack(code: u64, m: usize, out: &mut [usize; MAX_PACKED_LEN]) {
    for (p, slot) in out.iter_mut().enumerate().take(m) {
        *slot = ((code >> (4 * p)) & 0xF) as usize + 1;
    }
}

/// Every transposition on `m` elements.
pub fn all_transpositions(m: usize) -> Vec<Transposition> {
    let mut out = Vec::new();
    for i in 1..=m {
        for j in i + 1..=m {
            for k in j + 1..=m + 1 {
                out.push(Transposition::new(i, j, k).expect("ordered by construction"));
            }
        }
    }
    out
}

/// Parent links for one side of the bidirectional search: the state we
/// came from and the move that was applied to it.
type Parents = HashMap<u64, Option<(u64, Transposition)>>;

fn bidirectional_search(start: &[usize]) -> Vec<Transposition> {
    let m = start.len();
    let moves = all_transpositions(m);
    let source = pack(start);
    let target = pack(&(1..=m).collect::<Vec<_>>());
    if source == target {
        return Vec::new();
    }

    let mut fwd: Parents = HashMap::from([(source, None)]);
    let mut bwd: Parents = HashMap::from([(target, None)]);
    let mut fwd_frontier = vec![source];
    let mut bwd_frontier = vec![target];
    let mut buf = [0usize; MAX_PACKED_LEN];

    let meet = 'search: loop {
        let forward = fwd_frontier.len() <= bwd_frontier.len();
        let (frontier, own, other) = if forward {
            (&mut fwd_frontier, &mut fwd, &bwd)
        } else {
            (&mut bwd_frontier, &mut bwd, &fwd)
        };
        let mut next = Vec::new();
        for &code in frontier.iter() {
            for t in &moves {
                unpack(code, m, &mut buf);
                perm::apply_to_slice(&mut buf[..m], t);
                let child = pack(&buf[..m]);
                if let Entry::Vacant(slot) = own.entry(child) {
                    slot.insert(Some((code, *t)));
                    if other.contains_key(&child) {
                        break 'search child;
                    }
                    next.push(child);
                }
            }
        }
        assert!(!next.is_empty(), "permutation graph is connected");
        *frontier = next;
    };

    // source -> meet
    let mut path = Vec::new();
    let mut cur = meet;
    while let Some(Some((parent, t))) = fwd.get(&cur) {
        path.push(*t);
        cur = *parent;
    }
    path.reverse();
    // meet -> target: undo the moves that led from the identity to `meet`
    let mut cur = meet;
    while let Some(Some((parent, t))) = bwd.get(&cur) {
        path.push(t.inverse());
        cur = *parent;
    }
    path
}

/// Change in breakpoints caused by applying `t` to `elems`.
fn breakpoint_delta(elems: &[usize], t: &Transposition) -> isize {
    let m = elems.len();
    let at = |p: usize| -> usize {
        if p == 0 {
            0
        } else if p == m + 1 {
            m + 1
        } else {
            elems[p - 1]
        }
    };
    let broken = |x: usize, y: usize| (x + 1 != y) as isize;
    let (i, j, k) = (t.i(), t.j(), t.k());
    let before = broken(at(i - 1), at(i)) + broken(at(j - 1), at(j)) + broken(at(k - 1), at(k));
    let after = broken(at(i - 1), at(j)) + broken(at(k - 1), at(i)) + broken(at(j - 1), at(k));
    after - before
}

fn extended_breakpoints(elems: &[usize]) -> usize {
    let m = elems.len();
    let mut bp = (elems[0] != 1) as usize + (elems[m - 1] != m) as usize;
    bp += elems.windows(2).filter(|w| w[0] + 1 != w[1]).count();
    bp
}

/// Search-tree statistics reported by [`fpt_sort_with_stats`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Search-tree nodes visited across all deepening rounds.
    pub nodes: u64,
}

/// Finds a sorting sequence of length at most `k`, or `None` if none
/// exists. The returned sequence is a shortest one.
pub fn fpt_sort(pi: &Permutation, k: usize) -> Option<SortResult> {
    fpt_sort_with_stats(pi, k).0
}

pub fn fpt_sort_with_stats(pi: &Permutation, k: usize) -> (Option<SortResult>, SearchStats) {
    let mut stats = SearchStats::default();
    if pi.is_identity() {
        return (Some(SortResult::empty()), stats);
    }
    if pi.breakpoints() > 3 * k {
        return (None, stats);
    }
    let gluing = pi.gluing().expect("non-identity");
    let glued = gluing.glued();
    let m = glued.len();
    let moves = all_transpositions(m);
    let mut state = glued.as_slice().to_vec();
    let mut path = Vec::new();
    for depth in glued.transposition_lower_bound()..=k {
        let bp = extended_breakpoints(&state);
        if depth_limited(&mut state, bp, depth, &moves, &mut path, &mut stats) {
            let seq = gluing.expand(&path).expect("glued moves fit the glued length");
            return (Some(SortResult::new(seq)), stats);
        }
    }
    (None, stats)
}

fn depth_limited(
    state: &mut [usize],
    bp: usize,
    remaining: usize,
    moves: &[Transposition],
    path: &mut Vec<Transposition>,
    stats: &mut SearchStats,
) -> bool {
    stats.nodes += 1;
    if bp == 0 {
        return true;
    }
    // one transposition touches three adjacencies
    if bp > 3 * remaining {
        return false;
    }
    for t in moves {
        let next_bp = (bp as isize + breakpoint_delta(state, t)) as usize;
        if next_bp > 3 * (remaining - 1) {
            continue;
        }
        perm::apply_to_slice(state, t);
        path.push(*t);
        if depth_limited(state, next_bp, remaining - 1, moves, path, stats) {
            return true;
        }
        path.pop();
        perm::apply_to_slice(state, &t.inverse());
    }
    false
}

/// Sorts by moving one block at a time next to its value neighbour: the
/// block starting with `x` goes right after `x - 1`, or the block ending
/// with `y` goes right before `y + 1` (front/end for `x = 1` / `y = n`).
///
/// Each step takes the move removing the most breakpoints, preferring the
/// block with the smaller first value and then the "after predecessor"
/// move. On a non-identity permutation some such move always removes at
/// least one breakpoint, so the result has at most `bp(pi)` steps.
pub fn greedy_sort(pi: &Permutation) -> SortResult {
    let n = pi.len();
    let mut elems = pi.as_slice().to_vec();
    let mut pos = vec![0usize; n + 2];
    let mut seq = Vec::new();
    let mut bp = pi.breakpoints();
    while bp > 0 {
        for (p, &v) in elems.iter().enumerate() {
            pos[v] = p + 1;
        }
        // (delta, first value, kind) -> smaller is better
        let mut best: Option<((isize, usize, u8), Transposition)> = None;
        let mut start = 1;
        while start <= n {
            let mut end = start;
            while end < n && elems[end - 1] + 1 == elems[end] {
                end += 1;
            }
            let first = elems[start - 1];
            let last = elems[end - 1];
            let before_gap = if first == 1 { 1 } else { pos[first - 1] + 1 };
            let after_gap = if last == n { n + 1 } else { pos[last + 1] };
            let candidates = [
                (0u8, perm::move_segment(start, end, before_gap)),
                (1u8, perm::move_segment(start, end, after_gap)),
            ];
            for (kind, t) in candidates {
                let Some(t) = t else { continue };
                let key = (breakpoint_delta(&elems, &t), first, kind);
                if best.as_ref().is_none_or(|(b, _)| key < *b) {
                    best = Some((key, t));
                }
            }
            start = end + 1;
        }
        let ((delta, _, _), t) = best.expect("a non-identity permutation has a movable block");
        assert!(delta < 0, "greedy step must remove a breakpoint");
        perm::apply_to_slice(&mut elems, &t);
        bp = (bp as isize + delta) as usize;
        seq.push(t);
    }
    SortResult::new(seq)
}

/// True iff `seq` sorts `pi` and has at most `k` steps. Errors if a
/// transposition does not fit the permutation's length.
pub fn verify_sequence(pi: &Permutation, seq: &[Transposition], k: usize) -> Result<bool, SbtError> {
    let sorted = pi.apply_all(seq)?;
    Ok(sorted.is_identity() && seq.len() <= k)
}

/// A sorting backend for the approximation pipeline.
///
/// With [`GreedySorter`] the pipeline sorts the breakpoint-minimal leaf order
/// in at most `bp_min` steps, which is within a factor 3 of the optimum
/// because every order needs at least `bp / 3` steps. A backend that needs
/// at most `3/4 * bp` steps would tighten this to 2.25.
pub trait Sorter {
    fn name(&self) -> &'static str;
    fn sort(&self, pi: &Permutation) -> Result<SortResult, SbtError>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GreedySorter;

impl Sorter for GreedySorter {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn sort(&self, pi: &Permutation) -> Result<SortResult, SbtError> {
        Ok(greedy_sort(pi))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExactSorter {
    pub cap: usize,
}

impl Default for ExactSorter {
    fn default() -> Self {
        ExactSorter {
            cap: DEFAULT_EXACT_CAP,
        }
    }
}

impl Sorter for ExactSorter {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn sort(&self, pi: &Permutation) -> Result<SortResult, SbtError> {
        exact_distance_with_cap(pi, self.cap)
    }
}

/// Transposition distance of every permutation of `[n]`, from a single
/// breadth-first search rooted at the identity.
///
/// Distances from the identity and to the identity coincide because the
/// inverse of a transposition is again a transposition.
#[derive(Debug, Clone)]
pub struct DistanceTable {
    n: usize,
    dist: Vec<u8>,
}

impl DistanceTable {
    pub fn new(n: usize) -> Result<Self, SbtError> {
        if n == 0 || n > MAX_TABLE_LEN {
            return Err(SbtError::SizeCapExceeded {
                n,
                cap: MAX_TABLE_LEN,
            });
        }
        let total = factorial(n);
        let moves = all_transpositions(n);
        let mut dist = vec![u8::MAX; total];
        let id: Vec<usize> = (1..=n).collect();
        dist[rank(&id)] = 0;
        let mut frontier = vec![rank(&id)];
        let mut level = 0u8;
        let mut buf = vec![0usize; n];
        while !frontier.is_empty() {
            level += 1;
            let mut next = Vec::new();
            for &r in &frontier {
                for t in &moves {
                    unrank(r, &mut buf);
                    perm::apply_to_slice(&mut buf, t);
                    let child = rank(&buf);
                    if dist[child] == u8::MAX {
                        dist[child] = level;
                        next.push(child);
                    }
                }
            }
            frontier = next;
        }
        Ok(DistanceTable { n, dist })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn distance(&self, pi: &Permutation) -> usize {
        assert_eq!(pi.len(), self.n, "permutation length must match the table");
        self.dist[rank(pi.as_slice())] as usize
    }

    /// Largest distance in the table.
    pub fn diameter(&self) -> usize {
        self.dist.iter().copied().max().unwrap_or(0) as usize
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Lexicographic rank of a permutation of `1..=n`.
fn rank(elems: &[usize]) -> usize {
    let n = elems.len();
    let mut r = 0;
    for p in 0..n {
        let smaller_after = elems[p + 1..].iter().filter(|&&v| v < elems[p]).count();
        r = r * (n - p) + smaller_after;
    }
    r
}

fn unrank(mut r: usize, out: &mut [usize]) {
    let n = out.len();
    let mut digits = vec![0usize; n];
    for p in (0..n).rev() {
        let base = n - p;
        digits[p] = r % base;
        r /= base;
    }
    let mut pool: Vec<usize> = (1..=n).collect();
    for p in 0..n {
        out[p] = pool.remove(digits[p]);
    }
}
