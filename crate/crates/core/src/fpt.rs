//! Exact solver for binary trees, parameterized by the number of block
//! crossings `k`.
//!
//! 1. Sibling leaves `x, x + 1` are contracted into one leaf `x` until no
//!    such pair is left; the contraction never changes the optimum.
//! 2. A search tree then fixes child orders bottom-up. Before each branch,
//!    a leaf whose decided sibling starts with its successor or ends with its
//!    predecessor is joined to it for free. Branches whose fixed adjacencies
//!    already hold more than `3k` breakpoints are cut, which bounds the
//!    search depth by `6k`.
//! 3. Once the root is fixed, the resulting order goes to the bounded
//!    transposition sorter, and a witness found on the contracted tree is
//!    lifted back to the input tree.

use thiserror::Error;

use crate::perm::{Permutation, Transposition};
use crate::sbt::fpt_sort_with_stats;
use crate::tree::{NodeId, RootedTree, Subtree};
use crate::witness::{Verdict, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FptError {
    #[error("tree is not binary")]
    NotBinary,
    #[error("no undecided node has both children decided")]
    NoEligibleNode,
}

/// Fixed order of `T(v)`, kept as its end points plus the child order; the
/// full sequence is rebuilt on demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Decided {
    first: usize,
    last: usize,
    /// Second child placed first.
    swapped: bool,
}

/// Partial assignment of leaf orders to tree nodes. Leaves are always
/// decided; an inner node is decided only after both of its children, and
/// its order is one child's order followed by the other's.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderAssignment {
    slots: Vec<Option<Decided>>,
    /// Breakpoints among adjacencies fixed so far, kept up to date at seams.
    bp: usize,
}

impl OrderAssignment {
    /// Every leaf fixed to itself, every inner node open.
    pub fn initial(t: &RootedTree) -> Self {
        let slots = t
            .node_ids()
            .map(|v| {
                t.label(v).map(|x| Decided {
                    first: x,
                    last: x,
                    swapped: false,
                })
            })
            .collect();
        OrderAssignment { slots, bp: 0 }
    }

    pub fn is_decided(&self, v: NodeId) -> bool {
        self.slots[v.index()].is_some()
    }

    /// First and last leaf of the fixed order of `T(v)`.
    pub fn ends(&self, v: NodeId) -> Option<(usize, usize)> {
        self.slots[v.index()].map(|d| (d.first, d.last))
    }

    /// Number of breakpoints among the adjacencies fixed so far.
    pub fn bp(&self) -> usize {
        self.bp
    }

    /// Fixes `v` with `first_child` in front, where `first_child` is 0 or 1.
    /// Both children must be decided and `v` open.
    pub fn decide(&mut self, t: &RootedTree, v: NodeId, first_child: usize) {
        assert!(!self.is_decided(v), "node already decided");
        let ch = t.children(v);
        let (a, b) = (ch[first_child], ch[1 - first_child]);
        let (fa, la) = self.ends(a).expect("child decided");
        let (fb, lb) = self.ends(b).expect("child decided");
        self.bp += usize::from(la + 1 != fb);
        self.slots[v.index()] = Some(Decided {
            first: fa,
            last: lb,
            swapped: first_child == 1,
        });
    }

    /// The fixed order of `T(v)`, if any.
    pub fn sequence(&self, t: &RootedTree, v: NodeId) -> Option<Vec<usize>> {
        self.slots[v.index()]?;
        let mut out = Vec::with_capacity(t.subtree_size(v));
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            match t.label(u) {
                Some(x) => out.push(x),
                None => {
                    let d = self.slots[u.index()].expect("descendants of a decided node are decided");
                    let ch = t.children(u);
                    let (a, b) = if d.swapped { (ch[1], ch[0]) } else { (ch[0], ch[1]) };
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
        Some(out)
    }
}

/// Recounts the fixed breakpoints from scratch. Every adjacency inside a
/// decided order is the seam of exactly one decided descendant, so counting
/// seams counts each adjacency once.
pub fn bp_of_f(t: &RootedTree, f: &OrderAssignment) -> usize {
    t.internal_nodes()
        .filter_map(|v| {
            let d = f.slots[v.index()]?;
            let ch = t.children(v);
            let (a, b) = if d.swapped { (ch[1], ch[0]) } else { (ch[0], ch[1]) };
            let (_, la) = f.ends(a)?;
            let (fb, _) = f.ends(b)?;
            Some(usize::from(la + 1 != fb))
        })
        .sum()
}

/// One contraction: leaves `x` and `x + 1` under `parent` became leaf `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Contraction {
    pub x: usize,
    pub y: usize,
    /// The merged node, as numbered in the tree before the contraction.
    pub parent: NodeId,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReductionTrace {
    pub steps: Vec<Contraction>,
}

impl ReductionTrace {
    /// Turns a witness of the contracted tree into one of the original tree
    /// by undoing the contractions last to first.
    pub fn lift(&self, w: &Witness) -> Witness {
        let mut row = w.permutation.as_slice().to_vec();
        let mut seq = w.sequence.clone();
        for step in self.steps.iter().rev() {
            (row, seq) = expand(&row, &seq, step.x);
        }
        Witness::new(Permutation::from_vec_unchecked(row), seq)
    }
}

/// Replaces `x` by the pair `x, x + 1` (shifting larger values up) and
/// rewrites `seq` so that it moves the pair wherever it moved `x`.
fn expand(row: &[usize], seq: &[Transposition], x: usize) -> (Vec<usize>, Vec<Transposition>) {
    let mut out = Vec::with_capacity(row.len() + 1);
    for &v in row {
        match v.cmp(&x) {
            std::cmp::Ordering::Less => out.push(v),
            std::cmp::Ordering::Equal => out.extend([x, x + 1]),
            std::cmp::Ordering::Greater => out.push(v + 1),
        }
    }
    // position of x in the contracted permutation as the sequence runs
    let mut at = row.iter().position(|&v| v == x).unwrap() + 1;
    let widen = |cut: usize, at: usize| if cut > at { cut + 1 } else { cut };
    let mut lifted = Vec::with_capacity(seq.len());
    for t in seq {
        let (i, j, k) = (t.i(), t.j(), t.k());
        lifted.push(Transposition::new(widen(i, at), widen(j, at), widen(k, at)).expect("cuts stay ordered"));
        // the segment [i, j) moves right by k - j, the segment [j, k) left by j - i
        if (i..j).contains(&at) {
            at += k - j;
        } else if (j..k).contains(&at) {
            at -= j - i;
        }
    }
    (out, lifted)
}

/// Contracts sibling leaves `x, x + 1` until none are left.
pub fn reduce_rule1(t: &RootedTree) -> (RootedTree, ReductionTrace) {
    let mut trace = ReductionTrace::default();
    let mut current = t.clone();
    loop {
        let pair = current.internal_nodes().find_map(|v| {
            let ch = current.children(v);
            if ch.len() != 2 {
                return None;
            }
            let (a, b) = (current.label(ch[0])?, current.label(ch[1])?);
            (a.abs_diff(b) == 1).then_some((v, a.min(b)))
        });
        let Some((parent, x)) = pair else {
            return (current, trace);
        };
        trace.steps.push(Contraction { x, y: x + 1, parent });
        let merged = contract(&current.to_subtree(), x);
        current = RootedTree::from_subtree(&merged).expect("contraction keeps labels 1..=n-1");
    }
}

fn contract(s: &Subtree, x: usize) -> Subtree {
    match s {
        Subtree::Leaf(v) => Subtree::Leaf(if *v > x + 1 { v - 1 } else { *v }),
        Subtree::Node(ch) => {
            if let [Subtree::Leaf(a), Subtree::Leaf(b)] = ch.as_slice() {
                if a.min(b) == &x && a.abs_diff(*b) == 1 {
                    return Subtree::Leaf(x);
                }
            }
            Subtree::Node(ch.iter().map(|c| contract(c, x)).collect())
        }
    }
}

/// Joins every open node whose children are a leaf `x` and a decided `w`
/// with `f(w)` starting at `x + 1` (giving `x, f(w)`) or ending at `x - 1`
/// (giving `f(w), x`). One bottom-up pass reaches the fixed point because
/// a join can only enable joins further up.
pub fn reduce_rule2(t: &RootedTree, f: &mut OrderAssignment) {
    for v in t.post_order() {
        if f.is_decided(v) || t.is_leaf(v) {
            continue;
        }
        let ch = t.children(v);
        for (leaf_side, other) in [(0, 1), (1, 0)] {
            let Some(x) = t.label(ch[leaf_side]) else { continue };
            let Some((first, last)) = f.ends(ch[other]) else { continue };
            if first == x + 1 {
                f.decide(t, v, leaf_side);
                break;
            }
            if last + 1 == x {
                f.decide(t, v, other);
                break;
            }
        }
    }
}

/// The deepest open node with both children decided, leftmost among equals.
fn branch_node(t: &RootedTree, f: &OrderAssignment) -> Option<NodeId> {
    t.internal_nodes()
        .filter(|&v| !f.is_decided(v) && t.children(v).iter().all(|&c| f.is_decided(c)))
        .max_by_key(|&v| (t.depth(v), std::cmp::Reverse(v)))
}

/// Both child orders at the chosen node: tree order first, then reversed.
pub fn branch_rule1(t: &RootedTree, f: &OrderAssignment) -> Result<(OrderAssignment, OrderAssignment), FptError> {
    let v = branch_node(t, f).ok_or(FptError::NoEligibleNode)?;
    let mut alpha = f.clone();
    alpha.decide(t, v, 0);
    let mut beta = f.clone();
    beta.decide(t, v, 1);
    Ok((alpha, beta))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Deepest branching level reached (the root call is level 0).
    pub max_depth: usize,
    /// Search-tree nodes visited.
    pub nodes: u64,
    /// Fully decided leaf orders handed to the sorter.
    pub sorted_orders: u64,
    /// Contractions applied before the search.
    pub contractions: usize,
}

/// A witness with at most `k` steps, or `None` if the tree has none.
pub fn solve(t: &RootedTree, k: usize) -> Result<Option<Witness>, FptError> {
    solve_with_stats(t, k).map(|(w, _)| w)
}

pub fn solve_with_stats(t: &RootedTree, k: usize) -> Result<(Option<Witness>, SolveStats), FptError> {
    if !t.is_binary() {
        return Err(FptError::NotBinary);
    }
    let mut stats = SolveStats::default();
    let identity = Permutation::identity(t.leaf_count());
    if t.is_consistent(&identity).expect("lengths match") {
        return Ok((Some(Witness::new(identity, Vec::new())), stats));
    }
    if k == 0 {
        return Ok((None, stats));
    }

    let (reduced, trace) = reduce_rule1(t);
    stats.contractions = trace.steps.len();
    let found = search(&reduced, OrderAssignment::initial(&reduced), k, 0, &mut stats);
    let witness = found.map(|w| trace.lift(&w));
    if let Some(w) = &witness {
        assert_eq!(
            w.check(t, Some(k)).expect("lengths match"),
            Verdict::Valid,
            "lifted witness must certify the input tree"
        );
    }
    Ok((witness, stats))
}

fn search(t: &RootedTree, mut f: OrderAssignment, k: usize, depth: usize, stats: &mut SolveStats) -> Option<Witness> {
    stats.nodes += 1;
    stats.max_depth = stats.max_depth.max(depth);
    reduce_rule2(t, &mut f);
    if f.bp() > 3 * k {
        return None;
    }
    if let Some(row) = f.sequence(t, t.root()) {
        stats.sorted_orders += 1;
        let pi = Permutation::from_vec_unchecked(row);
        let (sorted, _) = fpt_sort_with_stats(&pi, k);
        return sorted.map(|s| Witness::new(pi, s.sequence));
    }
    let (alpha, beta) = branch_rule1(t, &f).expect("an open node always has a decided frontier");
    search(t, alpha, k, depth + 1, stats).or_else(|| search(t, beta, k, depth + 1, stats))
}
