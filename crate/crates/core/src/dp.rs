//! Leaf orders with the fewest blocks or breakpoints.
//!
//! Both solvers minimize a path cost: every adjacent pair `(a, b)` of the
//! order costs 1 unless `b = a + 1`. Without sentinels the cost plus one is
//! the number of blocks. With sentinels `0` in front and `n + 1` at the end
//! the cost is exactly the number of breakpoints.
//!
//! * [`min_blocks_binary`] works on any binary tree in `O(n^3)` time by
//!   computing, per inner node, the cheapest order of its leaves for every
//!   choice of first and last leaf.
//! * [`min_blocks_complete`] works on complete binary trees in `O(n^2)`
//!   time by building the order left to right: once a leaf is fixed at a
//!   position, the set of leaves that may precede it is exactly one subtree.

use thiserror::Error;

use crate::perm::Permutation;
use crate::sbt::{SbtError, Sorter};
use crate::tree::{NodeId, RootedTree};
use crate::witness::Witness;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DpError {
    #[error("tree is not binary")]
    NotBinary,
    #[error("tree is not a complete binary tree")]
    NotCompleteBinary,
    #[error(transparent)]
    Sort(#[from] SbtError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    Blocks,
    Breakpoints,
}

/// How [`min_blocks_complete`] keeps its tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpaceMode {
    /// One row per position, then a single backward pass.
    #[default]
    Full,
    /// Two rows at a time; the order is rebuilt by splitting at the middle
    /// and recursing on both halves.
    Compact,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    pub permutation: Permutation,
    pub value: usize,
}

const INF: u32 = u32::MAX / 4;

fn step(a: usize, b: usize) -> u32 {
    u32::from(b != a + 1)
}

fn finish(objective: Objective, cost: u32, permutation: Permutation) -> Optimum {
    let value = match objective {
        Objective::Blocks => cost as usize + 1,
        Objective::Breakpoints => cost as usize,
    };
    debug_assert_eq!(
        value,
        match objective {
            Objective::Blocks => permutation.blocks(),
            Objective::Breakpoints => permutation.breakpoints(),
        }
    );
    Optimum { permutation, value }
}

/// Binary trees, `O(n^3)` time and `O(n^2)` space.
pub fn min_blocks_binary(t: &RootedTree, objective: Objective) -> Result<Optimum, DpError> {
    if !t.is_binary() {
        return Err(DpError::NotBinary);
    }
    let n = t.leaf_count();
    if n == 1 {
        return Ok(finish(objective, 0, Permutation::identity(1)));
    }
    let table = PairTable::build(t);
    let (lo, hi) = (t.children(t.root())[0], t.children(t.root())[1]);

    let sentinel = |i: usize, j: usize| match objective {
        Objective::Blocks => 0,
        Objective::Breakpoints => step(0, i) + step(j, n + 1),
    };
    let mut best: Option<(u32, usize, usize)> = None;
    for (a, b) in [(lo, hi), (hi, lo)] {
        for &i in t.leaves_under(a) {
            for &j in t.leaves_under(b) {
                let c = table.get(i, j) + sentinel(i, j);
                if best.is_none_or(|(bc, bi, bj)| (c, i, j) < (bc, bi, bj)) {
                    best = Some((c, i, j));
                }
            }
        }
    }
    let (cost, i, j) = best.unwrap();
    let mut row = Vec::with_capacity(n);
    table.unfold(t, t.root(), i, j, &mut row);
    Ok(finish(objective, cost, Permutation::from_vec_unchecked(row)))
}

/// Cheapest internal cost `B(v, i, j)` of an order of `T(v)` running from
/// leaf `i` to leaf `j`, stored for every pair with `lca(i, j) = v`. Each
/// unordered pair has exactly one such node, so one `n x n` matrix holds
/// all of them, both orientations included.
struct PairTable {
    n: usize,
    cost: Vec<u32>,
    /// Position of each label in the tree's current leaf row.
    pos: Vec<usize>,
}

impl PairTable {
    fn get(&self, i: usize, j: usize) -> u32 {
        self.cost[(i - 1) * self.n + (j - 1)]
    }

    fn set(&mut self, i: usize, j: usize, c: u32) {
        self.cost[(i - 1) * self.n + (j - 1)] = c;
    }

    /// `B(w, i, h)` if `lca(i, h) = w`, else infinity.
    fn at(&self, t: &RootedTree, w: NodeId, i: usize, h: usize) -> u32 {
        if t.is_leaf(w) {
            return if i == h { 0 } else { INF };
        }
        let split = self.split(t, w);
        let (pi, ph) = (self.pos[i], self.pos[h]);
        let (lo, hi) = span(t, w, &self.pos);
        if ph < lo || ph >= hi || (pi < split) == (ph < split) {
            INF
        } else {
            self.get(i, h)
        }
    }

    fn split(&self, t: &RootedTree, w: NodeId) -> usize {
        let right = t.children(w)[1];
        self.pos[t.leaves_under(right)[0]]
    }

    fn build(t: &RootedTree) -> PairTable {
        let n = t.leaf_count();
        let mut pos = vec![0; n + 1];
        for (p, &x) in t.current_leaf_order().as_slice().iter().enumerate() {
            pos[x] = p;
        }
        let mut table = PairTable {
            n,
            cost: vec![INF; n * n],
            pos,
        };
        for x in 1..=n {
            table.set(x, x, 0);
        }
        // temp[l] for l in the second child, reused across (v, i)
        let mut temp = vec![INF; n + 1];
        for v in t.post_order() {
            if t.is_leaf(v) {
                continue;
            }
            let (c0, c1) = (t.children(v)[0], t.children(v)[1]);
            for (w, x) in [(c0, c1), (c1, c0)] {
                let right_end: Vec<usize> = t.leaves_under(x).to_vec();
                for &i in t.leaves_under(w) {
                    // cheapest way to end T(w) anywhere, then pay 1 to enter T(x)
                    let partners: &[usize] = if t.is_leaf(w) {
                        std::slice::from_ref(&i)
                    } else {
                        other_side(t, w, i, &table.pos)
                    };
                    let any_end = partners.iter().map(|&h| table.get(i, h)).min().unwrap_or(INF);
                    for &l in &right_end {
                        let mut best = any_end.saturating_add(1);
                        if l >= 2 {
                            best = best.min(table.at(t, w, i, l - 1));
                        }
                        temp[l] = best;
                    }
                    for &j in &right_end {
                        let mut best = INF;
                        for &l in &right_end {
                            let c = temp[l].saturating_add(table.at(t, x, l, j));
                            best = best.min(c);
                        }
                        table.set(i, j, best);
                    }
                }
            }
        }
        table
    }

    /// Appends an optimal order of `T(v)` from `i` to `j`; among equal
    /// choices of the crossing pair `(h, l)` the smallest wins.
    fn unfold(&self, t: &RootedTree, v: NodeId, i: usize, j: usize, out: &mut Vec<usize>) {
        if t.is_leaf(v) {
            out.push(i);
            return;
        }
        let (c0, c1) = (t.children(v)[0], t.children(v)[1]);
        let (w, x) = if t.leaves_under(c0).contains(&i) { (c0, c1) } else { (c1, c0) };
        let target = self.get(i, j);
        let mut pick = None;
        let mut hs = t.leaves_under(w).to_vec();
        let mut ls = t.leaves_under(x).to_vec();
        hs.sort_unstable();
        ls.sort_unstable();
        'outer: for &h in &hs {
            let left = self.at(t, w, i, h);
            if left >= INF {
                continue;
            }
            for &l in &ls {
                if left + step(h, l) + self.at(t, x, l, j) == target {
                    pick = Some((h, l));
                    break 'outer;
                }
            }
        }
        let (h, l) = pick.expect("table entry is realizable");
        self.unfold(t, w, i, h, out);
        self.unfold(t, x, l, j, out);
    }
}

fn span(t: &RootedTree, v: NodeId, pos: &[usize]) -> (usize, usize) {
    let leaves = t.leaves_under(v);
    (pos[leaves[0]], pos[leaves[0]] + leaves.len())
}

/// Leaves of the child of `w` that does not contain `i`.
fn other_side<'a>(t: &'a RootedTree, w: NodeId, i: usize, pos: &[usize]) -> &'a [usize] {
    let (a, b) = (t.children(w)[0], t.children(w)[1]);
    let (lo, hi) = span(t, a, pos);
    if (lo..hi).contains(&pos[i]) {
        t.leaves_under(b)
    } else {
        t.leaves_under(a)
    }
}

/// Index of the lowest set bit of `p - 1`, counted from 1.
///
/// When a leaf sits at position `p` (1-based) of an order of a complete
/// tree, the leaves that may stand at `p - 1` are exactly those of the
/// sibling of its ancestor `rob(p) - 1` levels up.
pub fn rob(p: usize) -> usize {
    assert!(p >= 2, "position 1 has no predecessor");
    (p - 1).trailing_zeros() as usize + 1
}

/// Complete binary trees with `2^k` leaves, `O(n^2)` time.
pub fn min_blocks_complete(t: &RootedTree, objective: Objective) -> Result<Optimum, DpError> {
    min_blocks_complete_with(t, objective, SpaceMode::default())
}

pub fn min_blocks_complete_with(t: &RootedTree, objective: Objective, mode: SpaceMode) -> Result<Optimum, DpError> {
    if !t.is_complete_binary() {
        return Err(DpError::NotCompleteBinary);
    }
    let heap = Heap::new(t);
    let n = heap.n;
    let (before, after) = match objective {
        Objective::Blocks => (None, None),
        Objective::Breakpoints => (Some(0), Some(n + 1)),
    };
    let (cost, row) = match mode {
        SpaceMode::Full => heap.solve_full(before, after),
        SpaceMode::Compact => {
            let mut row = Vec::with_capacity(n);
            let cost = heap.solve_compact(
                1,
                heap.k,
                Bounds {
                    before,
                    after,
                    first: None,
                    last: None,
                },
                &mut row,
            );
            (cost, row)
        }
    };
    Ok(finish(objective, cost, Permutation::from_vec_unchecked(row)))
}

/// A complete tree in heap numbering: the root is 1, node `h` has children
/// `2h` and `2h + 1`, and the leaf at slot `s` of the current row is `n + s`.
struct Heap {
    n: usize,
    k: usize,
    label: Vec<usize>,
    /// Heap index of each label's leaf.
    leaf: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
struct Bounds {
    before: Option<usize>,
    after: Option<usize>,
    first: Option<usize>,
    last: Option<usize>,
}

/// Which way an order is built.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Dir {
    Forward,
    Backward,
}

impl Heap {
    fn new(t: &RootedTree) -> Heap {
        let row = t.current_leaf_order().into_vec();
        let n = row.len();
        let mut leaf = vec![0; n + 2];
        for (s, &x) in row.iter().enumerate() {
            leaf[x] = n + s;
        }
        Heap {
            n,
            k: n.trailing_zeros() as usize,
            label: row,
            leaf,
        }
    }

    fn label_of(&self, g: usize) -> usize {
        self.label[g - self.n]
    }

    /// Builds orders of `T(root)` (height `height`) one position at a time,
    /// for `len` positions, calling `visit(p, row)` after each position.
    /// `row` is indexed by leaf offset inside the subtree and holds the
    /// cheapest cost of a partial order whose newest element is that leaf.
    ///
    /// Backward runs build from the right end; the adjacency test flips
    /// accordingly and `bound`/`fixed` then describe the right end.
    #[allow(clippy::too_many_arguments)]
    fn sweep(
        &self,
        root: usize,
        height: usize,
        len: usize,
        dir: Dir,
        bound: Option<usize>,
        fixed: Option<usize>,
        mut visit: impl FnMut(usize, &[u32]),
    ) -> Vec<u32> {
        let m = 1usize << height;
        let base = root << height;
        let mut row = vec![INF; m];
        for (off, cell) in row.iter_mut().enumerate() {
            let x = self.label_of(base + off);
            if fixed.is_some_and(|f| f != x) {
                continue;
            }
            *cell = match (bound, dir) {
                (None, _) => 0,
                (Some(b), Dir::Forward) => step(b, x),
                (Some(b), Dir::Backward) => step(x, b),
            };
        }
        visit(1, &row);
        // mins[local heap index] over the previous row
        let mut mins = vec![INF; 2 * m];
        let mut next = vec![INF; m];
        for p in 2..=len {
            mins[m..].copy_from_slice(&row);
            for q in (1..m).rev() {
                mins[q] = mins[2 * q].min(mins[2 * q + 1]);
            }
            let r = rob(p);
            for (off, cell) in next.iter_mut().enumerate() {
                let g = base + off;
                let prec = (g >> (r - 1)) ^ 1;
                let depth = height - (r - 1);
                let local = (1 << depth) + prec - (root << depth);
                let mut best = mins[local].saturating_add(1);
                let x = self.label_of(g);
                let partner = match dir {
                    Dir::Forward => x.checked_sub(1).filter(|&y| y >= 1),
                    Dir::Backward => Some(x + 1).filter(|&y| y <= self.n),
                };
                if let Some(y) = partner {
                    let gy = self.leaf[y];
                    if gy >> (r - 1) == prec {
                        best = best.min(row[gy - base]);
                    }
                }
                *cell = best;
            }
            std::mem::swap(&mut row, &mut next);
            visit(p, &row);
        }
        row
    }

    fn solve_full(&self, before: Option<usize>, after: Option<usize>) -> (u32, Vec<usize>) {
        let n = self.n;
        let mut table: Vec<u32> = Vec::with_capacity(n * n);
        let last = self.sweep(1, self.k, n, Dir::Forward, before, None, |_, row| {
            table.extend_from_slice(row)
        });
        let end_cost = |off: usize| after.map_or(0, |b| step(self.label_of(n + off), b));
        let (cost, mut cur) = (0..n)
            .map(|off| (last[off].saturating_add(end_cost(off)), off))
            .min_by_key(|&(c, off)| (c, self.label_of(n + off)))
            .unwrap();
        let mut out = vec![0; n];
        out[n - 1] = self.label_of(n + cur);
        for p in (2..=n).rev() {
            let here = table[(p - 1) * n + cur];
            let prev = &table[(p - 2) * n..(p - 1) * n];
            let r = rob(p);
            let prec = ((n + cur) >> (r - 1)) ^ 1;
            let x = self.label_of(n + cur);
            let (lo, hi) = (prec << (r - 1), (prec + 1) << (r - 1));
            cur = (lo..hi)
                .map(|g| g - n)
                .filter(|&off| prev[off].saturating_add(step(self.label_of(n + off), x)) == here)
                .min_by_key(|&off| self.label_of(n + off))
                .expect("backtrack finds a predecessor");
            out[p - 2] = self.label_of(n + cur);
        }
        (cost, out)
    }

    /// Appends an optimal order of `T(root)` under `b` to `out` and returns
    /// its cost, counting the boundary pairs in `b`.
    fn solve_compact(&self, root: usize, height: usize, b: Bounds, out: &mut Vec<usize>) -> u32 {
        if height == 0 {
            let x = self.label_of(root);
            out.push(x);
            return b.before.map_or(0, |a| step(a, x)) + b.after.map_or(0, |z| step(x, z));
        }
        let half = 1usize << (height - 1);
        let base = root << height;
        let left = self.sweep(root, height, half, Dir::Forward, b.before, b.first, |_, _| {});
        let right = self.sweep(root, height, half, Dir::Backward, b.after, b.last, |_, _| {});
        let side = |off: usize| off >= half;

        // cheapest right-half start on each side, for the "pay 1" crossing
        let mut right_min = [INF; 2];
        for (off, &c) in right.iter().enumerate() {
            let s = usize::from(side(off));
            right_min[s] = right_min[s].min(c);
        }
        let pair_cost = |j_off: usize, i_off: usize| {
            left[j_off]
                .saturating_add(right[i_off])
                .saturating_add(step(self.label_of(base + j_off), self.label_of(base + i_off)))
        };
        let best_for = |j_off: usize| -> u32 {
            let other = usize::from(!side(j_off));
            let mut best = left[j_off].saturating_add(right_min[other]).saturating_add(1);
            let y = self.label_of(base + j_off) + 1;
            if y <= self.n {
                let gy = self.leaf[y];
                if gy >> height == root && side(gy - base) != side(j_off) {
                    best = best.min(pair_cost(j_off, gy - base));
                }
            }
            best
        };
        let mut by_label: Vec<usize> = (0..1usize << height).collect();
        by_label.sort_unstable_by_key(|&off| self.label_of(base + off));
        let value = by_label.iter().map(|&j| best_for(j)).min().unwrap();
        let j_off = *by_label.iter().find(|&&j| best_for(j) == value).unwrap();
        let i_off = *by_label
            .iter()
            .find(|&&i| side(i) != side(j_off) && pair_cost(j_off, i) == value)
            .unwrap();

        let (j, i) = (self.label_of(base + j_off), self.label_of(base + i_off));
        let (left_root, right_root) = (2 * root + usize::from(side(j_off)), 2 * root + usize::from(side(i_off)));
        let left_bounds = Bounds {
            before: b.before,
            after: None,
            first: b.first,
            last: Some(j),
        };
        let right_bounds = Bounds {
            before: None,
            after: b.after,
            first: Some(i),
            last: b.last,
        };
        let a = self.solve_compact(left_root, height - 1, left_bounds, out);
        let c = self.solve_compact(right_root, height - 1, right_bounds, out);
        debug_assert_eq!(a + c + step(j, i), value);
        value
    }
}

/// Breakpoint-minimal leaf order, sorted by `sorter`. Complete trees take
/// the quadratic solver, other binary trees the cubic one.
pub fn approximate_otbcm(t: &RootedTree, sorter: &dyn Sorter) -> Result<Witness, DpError> {
    let best = if t.is_complete_binary() {
        min_blocks_complete(t, Objective::Breakpoints)?
    } else {
        min_blocks_binary(t, Objective::Breakpoints)?
    };
    let sorted = sorter.sort(&best.permutation)?;
    Ok(Witness::new(best.permutation, sorted.sequence))
}
