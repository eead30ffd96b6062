//! Instance generators: the trees behind the hardness reductions, plus
//! seeded random trees for testing.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::perm::Permutation;
use crate::tree::{RootedTree, Subtree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HardnessError {
    #[error("permutation length {0} is not of the form 2^p - 1")]
    BadLength(usize),
    #[error("vertex {0} has no incident arc")]
    IsolatedVertex(usize),
    #[error("arc ({0},{0}) is a loop")]
    SelfLoop(usize),
    #[error("arc ({0},{1}) appears twice")]
    DuplicateArc(usize, usize),
    #[error("digraph has no arcs")]
    NoArcs,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no {shape} tree has {n} leaves")]
    BadShape { shape: Shape, n: usize },
}

/// A generated tree with the decision threshold its reduction pairs it with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardnessInstance {
    pub tree: RootedTree,
    pub threshold: usize,
    /// What the tree was built from, for humans.
    pub provenance: String,
}

/// Grows the last element into a run so the length becomes `2^p - 1` for
/// the smallest such `p`; the glued permutation does not change.
pub fn pad_permutation(pi: &Permutation) -> Permutation {
    let n = pi.len();
    let target = (n + 1).next_power_of_two() - 1;
    let extra = target - n;
    if extra == 0 {
        return pi.clone();
    }
    let row = pi.as_slice();
    let e = row[n - 1];
    let mut out: Vec<usize> = row[..n - 1].iter().map(|&v| if v > e { v + extra } else { v }).collect();
    out.extend(e..=e + extra);
    Permutation::new(out).expect("padding keeps a permutation")
}

/// Complete binary tree on `2^(p+1)` leaves reading
/// `1, 2*pi_1, 2*pi_1 + 1, ..., 2*pi_m, 2*pi_m + 1, 2^(p+1)`. Its current
/// order has as many breakpoints as `pi` and is the unique order of the
/// tree with the fewest breakpoints; the threshold is `bp(pi) / 3`.
pub fn build_sbt_tree(pi: &Permutation) -> Result<HardnessInstance, HardnessError> {
    let m = pi.len();
    if !(m + 1).is_power_of_two() {
        return Err(HardnessError::BadLength(m));
    }
    let mut row = Vec::with_capacity(m * 2 + 2);
    row.push(1);
    for &v in pi.as_slice() {
        row.extend([2 * v, 2 * v + 1]);
    }
    row.push(2 * m + 2);
    let tree = RootedTree::from_subtree(&Subtree::complete(&row)).expect("labels are 1..=2m+2");
    Ok(HardnessInstance {
        tree,
        threshold: pi.breakpoints() / 3,
        provenance: format!("permutation {pi}"),
    })
}

/// Directed graph on vertices `1..=vertices` with arcs in input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    vertices: usize,
    arcs: Vec<(usize, usize)>,
}

impl Digraph {
    /// Rejects loops, repeated arcs and vertices without arcs. The vertex
    /// count is the largest id used.
    pub fn new(arcs: Vec<(usize, usize)>) -> Result<Self, HardnessError> {
        if arcs.is_empty() {
            return Err(HardnessError::NoArcs);
        }
        let vertices = arcs.iter().map(|&(u, v)| u.max(v)).max().unwrap();
        let mut seen = std::collections::HashSet::new();
        let mut touched = vec![false; vertices + 1];
        for &(u, v) in &arcs {
            if u == v {
                return Err(HardnessError::SelfLoop(u));
            }
            if !seen.insert((u, v)) {
                return Err(HardnessError::DuplicateArc(u, v));
            }
            touched[u] = true;
            touched[v] = true;
        }
        if let Some(iso) = (1..=vertices).find(|&x| !touched[x]) {
            return Err(HardnessError::IsolatedVertex(iso));
        }
        Ok(Digraph { vertices, arcs })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }
}

impl FromStr for Digraph {
    type Err = HardnessError;

    /// One arc `u v` per line; blank lines and `#` comments are skipped.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut arcs = Vec::new();
        for (idx, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| HardnessError::Parse { line: idx + 1, message };
            let ids = line
                .split_whitespace()
                .map(|t| match t.parse::<usize>() {
                    Ok(0) | Err(_) => Err(parse_err(format!("bad vertex id {t:?}"))),
                    Ok(v) => Ok(v),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let [u, v] = ids[..] else {
                return Err(parse_err(format!("expected 2 vertex ids, found {}", ids.len())));
            };
            arcs.push((u, v));
        }
        Digraph::new(arcs)
    }
}

impl fmt::Display for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (u, v) in &self.arcs {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}

/// Tree whose leaf orders with at most `|V| + 3|E|` blocks exist exactly
/// when the digraph has a Hamiltonian path.
///
/// The root has children `c1` and `c2`. `c1` holds the leaves `1, 3, ...,
/// 2|V| - 1` and `2|V| + 1 + 3(j - 1)` for each arc `j`. `c2` holds one node
/// per vertex `i` with leaf `2i`, plus `2|V| + 3(j - 1) + 2` for each arc `j`
/// leaving `i` and `2|V| + 3(j - 1) + 3` for each arc `j` entering `i`.
pub fn build_hp_tree(g: &Digraph) -> HardnessInstance {
    let (nv, ne) = (g.vertices, g.arcs.len());
    let mut c1: Vec<Subtree> = (1..=nv).map(|i| Subtree::Leaf(2 * i - 1)).collect();
    c1.extend((1..=ne).map(|j| Subtree::Leaf(2 * nv + 3 * (j - 1) + 1)));
    let mut per_vertex: Vec<Vec<Subtree>> = (1..=nv).map(|i| vec![Subtree::Leaf(2 * i)]).collect();
    for (j, &(src, dst)) in g.arcs.iter().enumerate() {
        per_vertex[src - 1].push(Subtree::Leaf(2 * nv + 3 * j + 2));
        per_vertex[dst - 1].push(Subtree::Leaf(2 * nv + 3 * j + 3));
    }
    let c2 = per_vertex.into_iter().map(Subtree::Node).collect();
    let shape = Subtree::Node(vec![Subtree::Node(c1), Subtree::Node(c2)]);
    HardnessInstance {
        tree: RootedTree::from_subtree(&shape).expect("construction uses 1..=2|V|+3|E| once each"),
        threshold: nv + 3 * ne,
        provenance: format!("digraph with {nv} vertices and {ne} arcs"),
    }
}

/// Shifts every label of `t` up by one and hangs it next to a new cherry
/// `(1, n + 2)`. Some order of `t` has at most `k` blocks iff some order of
/// the result has at most `k + 2` breakpoints.
pub fn build_bp_tree(t: &RootedTree, k: usize) -> HardnessInstance {
    let n = t.leaf_count();
    let shifted = t.to_subtree().map_labels(&|x| x + 1);
    let cherry = Subtree::Node(vec![Subtree::Leaf(1), Subtree::Leaf(n + 2)]);
    let shape = Subtree::Node(vec![shifted, cherry]);
    HardnessInstance {
        tree: RootedTree::from_subtree(&shape).expect("labels are 1..=n+2"),
        threshold: k + 2,
        provenance: format!("tree {t} with block budget {k}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    /// Uniform over ordered full binary tree shapes.
    Binary,
    /// Perfectly balanced binary tree; needs a power of two leaves.
    Complete,
    /// A uniform binary shape with each inner edge contracted with
    /// probability 1/2, giving mixed degrees.
    Arbitrary,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Binary => "binary",
            Shape::Complete => "complete",
            Shape::Arbitrary => "arbitrary",
        })
    }
}

impl FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "binary" => Ok(Shape::Binary),
            "complete" => Ok(Shape::Complete),
            "arbitrary" => Ok(Shape::Arbitrary),
            other => Err(format!("unknown shape {other:?}")),
        }
    }
}

/// A random tree on `n` leaves with uniformly shuffled labels, determined
/// by `seed`.
pub fn random_instance(seed: u64, n: usize, shape: Shape) -> Result<RootedTree, HardnessError> {
    if n == 0 || (shape == Shape::Complete && !n.is_power_of_two()) {
        return Err(HardnessError::BadShape { shape, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<usize> = (1..=n).collect();
    labels.shuffle(&mut rng);
    let sub = match shape {
        Shape::Complete => Subtree::complete(&labels),
        Shape::Binary => remy(&mut rng, n).map_labels(&|x| labels[x - 1]),
        Shape::Arbitrary => {
            let binary = remy(&mut rng, n).map_labels(&|x| labels[x - 1]);
            collapse(binary, &mut rng)
        }
    };
    Ok(RootedTree::from_subtree(&sub).expect("labels are a permutation of 1..=n"))
}

/// Rémy's algorithm: insert leaves one at a time above a uniformly chosen
/// node, on a uniformly chosen side. Leaf `i` is the `i`-th inserted.
fn remy(rng: &mut impl Rng, n: usize) -> Subtree {
    // children[v] = Some((left, right)) for inner nodes
    let mut children: Vec<Option<(usize, usize)>> = vec![None];
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut leaf_label = vec![1usize];
    let mut root = 0;
    for label in 2..=n {
        let target = rng.gen_range(0..children.len());
        let leaf = children.len();
        children.push(None);
        parent.push(None);
        leaf_label.push(label);
        let inner = children.len();
        let pair = if rng.gen_bool(0.5) { (target, leaf) } else { (leaf, target) };
        children.push(Some(pair));
        parent.push(parent[target]);
        leaf_label.push(0);
        match parent[target] {
            None => root = inner,
            Some(p) => {
                let (a, b) = children[p].unwrap();
                children[p] = Some(if a == target { (inner, b) } else { (a, inner) });
            }
        }
        parent[target] = Some(inner);
        parent[leaf] = Some(inner);
    }
    fn build(v: usize, children: &[Option<(usize, usize)>], labels: &[usize]) -> Subtree {
        match children[v] {
            None => Subtree::Leaf(labels[v]),
            Some((a, b)) => Subtree::Node(vec![build(a, children, labels), build(b, children, labels)]),
        }
    }
    build(root, &children, &leaf_label)
}

/// Contracts each non-root inner edge with probability 1/2.
fn collapse(s: Subtree, rng: &mut impl Rng) -> Subtree {
    let Subtree::Node(ch) = s else { return s };
    let mut out = Vec::new();
    for c in ch {
        match collapse(c, rng) {
            Subtree::Node(grand) if rng.gen_bool(0.5) => out.extend(grand),
            other => out.push(other),
        }
    }
    Subtree::Node(out)
}
