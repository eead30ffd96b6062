//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the solvers it is used to check.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use itertools::Itertools;
use tangle_core::tree::{NodeId, RootedTree};

/// Packs a short sequence of small values into one word, 4 bits each.
pub fn pack(xs: &[usize]) -> u64 {
    xs.iter().fold(0u64, |acc, &x| (acc << 4) | x as u64)
}

/// Every transposition `(i, j, k)` with `1 <= i < j < k <= n + 1`.
pub fn transpositions(n: usize) -> Vec<(usize, usize, usize)> {
    (1..=n + 1).tuple_combinations().collect()
}

pub fn apply(xs: &mut [usize], (i, j, _k): (usize, usize, usize), k: usize) {
    xs[i - 1..k - 1].rotate_left(j - i);
}

/// Exact transposition distance of every permutation of `1..=n`, by plain
/// breadth-first search outward from the identity.
pub struct Distances {
    n: usize,
    dist: HashMap<u64, u8>,
}

impl Distances {
    pub fn new(n: usize) -> Self {
        assert!(n <= 12);
        let moves = transpositions(n);
        let start: Vec<usize> = (1..=n).collect();
        let mut dist = HashMap::new();
        dist.insert(pack(&start), 0u8);
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            let d = dist[&pack(&p)];
            for &t in &moves {
                let mut q = p.clone();
                apply(&mut q, t, t.2);
                let key = pack(&q);
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(key) {
                    e.insert(d + 1);
                    queue.push_back(q);
                }
            }
        }
        Distances { n, dist }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, xs: &[usize]) -> usize {
        assert_eq!(xs.len(), self.n);
        self.dist[&pack(xs)] as usize
    }
}

/// Breakpoints of `(0) xs (n+1)`.
pub fn breakpoints(xs: &[usize]) -> usize {
    let n = xs.len();
    let ext: Vec<usize> = std::iter::once(0).chain(xs.iter().copied()).chain([n + 1]).collect();
    ext.windows(2).filter(|w| w[1] != w[0] + 1).count()
}

/// Maximal runs of consecutive increasing values.
pub fn blocks(xs: &[usize]) -> usize {
    if xs.is_empty() {
        return 0;
    }
    1 + xs.windows(2).filter(|w| w[1] != w[0] + 1).count()
}

/// Every leaf order of `t`, by trying all child permutations at every node.
pub fn all_orders(t: &RootedTree) -> Vec<Vec<usize>> {
    orders_below(t, t.root())
}

fn orders_below(t: &RootedTree, v: NodeId) -> Vec<Vec<usize>> {
    if let Some(x) = t.label(v) {
        return vec![vec![x]];
    }
    let per_child: Vec<Vec<Vec<usize>>> = t.children(v).iter().map(|&c| orders_below(t, c)).collect();
    let mut out = Vec::new();
    for perm in (0..per_child.len()).permutations(per_child.len()) {
        for pick in perm.iter().map(|&c| per_child[c].iter()).multi_cartesian_product() {
            out.push(pick.into_iter().flatten().copied().collect());
        }
    }
    out
}

/// Minimum number of blocks over all leaf orders, computed from tables of
/// the cheapest order of each subtree for every pair of end leaves. Only the
/// end leaves of a subtree interact with the rest, so this is exhaustive.
/// A node with many children is accepted only when its children are leaves
/// with no two consecutive labels: then every order costs the same and every
/// ordered pair of distinct ends is reachable.
pub fn min_blocks_by_ends(t: &RootedTree) -> usize {
    let table = ends_table(t, t.root());
    table.values().min().unwrap() + 1
}

type Ends = HashMap<(usize, usize), usize>;

fn ends_table(t: &RootedTree, v: NodeId) -> Ends {
    if let Some(x) = t.label(v) {
        return HashMap::from([((x, x), 0)]);
    }
    let ch = t.children(v);
    let labels: Option<Vec<usize>> = ch.iter().map(|&c| t.label(c)).collect();
    if ch.len() > 6 {
        let labels = labels.expect("wide nodes must have only leaf children");
        assert!(
            labels.iter().all(|a| !labels.contains(&(a + 1))),
            "wide node with consecutive labels"
        );
        let mut out = HashMap::new();
        for (&a, &b) in labels.iter().tuple_combinations() {
            out.insert((a, b), ch.len() - 1);
            out.insert((b, a), ch.len() - 1);
        }
        return out;
    }
    let tables: Vec<Ends> = ch.iter().map(|&c| ends_table(t, c)).collect();
    let mut out: Ends = HashMap::new();
    for perm in (0..ch.len()).permutations(ch.len()) {
        let mut acc = tables[perm[0]].clone();
        for &c in &perm[1..] {
            let mut next: Ends = HashMap::new();
            for (&(f, l), &cost) in &acc {
                for (&(f2, l2), &cost2) in &tables[c] {
                    let total = cost + cost2 + usize::from(f2 != l + 1);
                    let e = next.entry((f, l2)).or_insert(usize::MAX);
                    *e = (*e).min(total);
                }
            }
            acc = next;
        }
        for (key, cost) in acc {
            let e = out.entry(key).or_insert(usize::MAX);
            *e = (*e).min(cost);
        }
    }
    out
}

/// Ordered full binary tree shapes with `n` leaves, as Newick with `_`
/// standing for each leaf.
pub fn binary_shapes(n: usize) -> Vec<String> {
    if n == 1 {
        return vec!["_".into()];
    }
    let mut out = Vec::new();
    for left in 1..n {
        for a in binary_shapes(left) {
            for b in binary_shapes(n - left) {
                out.push(format!("({a},{b})"));
            }
        }
    }
    out
}

/// Fills the placeholders of `shape` with `labels` left to right.
pub fn label_shape(shape: &str, labels: &[usize]) -> RootedTree {
    let mut it = labels.iter();
    let mut text = String::new();
    for ch in shape.chars() {
        if ch == '_' {
            text.push_str(&it.next().unwrap().to_string());
        } else {
            text.push(ch);
        }
    }
    text.push(';');
    RootedTree::parse(&text).unwrap()
}
