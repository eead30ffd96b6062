//! Ordered rooted trees whose leaves carry the labels `1..=n`.
//!
//! Nodes live in an arena indexed by [`NodeId`]; ids are assigned in
//! preorder, so the root is always `NodeId(0)` and, among nodes of equal
//! depth, a smaller id means further left.
//!
//! Text format (one tree per file, whitespace ignored between tokens):
//!
//! ```text
//! tree    := subtree ";"
//! subtree := leaf | "(" subtree ("," subtree)+ ")"
//! leaf    := decimal integer >= 1
//! ```

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::perm::Permutation;

/// Default cap on `|Π(T)|` for [`RootedTree::enumerate_orders`].
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("leaf labels must be exactly 1..=n (missing {missing:?}, duplicated {duplicate:?})")]
    LabelSet {
        missing: Vec<usize>,
        duplicate: Vec<usize>,
    },
    #[error("internal node has {0} child(ren); at least 2 are required")]
    TooFewChildren(usize),
    #[error("permutation has length {actual}, tree has {expected} leaves")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("tree has {count} leaf orders, more than the cap of {cap}")]
    CapExceeded { count: String, cap: u128 },
    #[error("permutation {0} is not a leaf order of the tree")]
    Inconsistent(Permutation),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }

    /// The node with preorder number `index`.
    pub fn from_index(index: usize) -> NodeId {
        NodeId(index)
    }
}

/// Owned nested form of a tree, handy for building and rewriting trees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Subtree {
    Leaf(usize),
    Node(Vec<Subtree>),
}

impl Subtree {
    pub fn node(children: Vec<Subtree>) -> Subtree {
        Subtree::Node(children)
    }

    /// Complete binary tree over `row`, whose length must be a power of two.
    pub fn complete(row: &[usize]) -> Subtree {
        assert!(row.len().is_power_of_two(), "complete tree needs 2^k leaves");
        if row.len() == 1 {
            Subtree::Leaf(row[0])
        } else {
            let (l, r) = row.split_at(row.len() / 2);
            Subtree::Node(vec![Subtree::complete(l), Subtree::complete(r)])
        }
    }

    pub fn map_labels(&self, f: &impl Fn(usize) -> usize) -> Subtree {
        match self {
            Subtree::Leaf(x) => Subtree::Leaf(f(*x)),
            Subtree::Node(ch) => Subtree::Node(ch.iter().map(|c| c.map_labels(f)).collect()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Subtree::Leaf(_) => 1,
            Subtree::Node(ch) => ch.iter().map(Subtree::leaf_count).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    label: Option<usize>,
    depth: usize,
    /// Half-open range into `RootedTree::leaf_row`.
    span: (usize, usize),
}

/// An ordered rooted tree with leaf set `[n]`.
#[derive(Clone, PartialEq, Eq)]
pub struct RootedTree {
    nodes: Vec<Node>,
    leaf_by_label: Vec<NodeId>,
    /// Leaf labels left to right in the current child order.
    leaf_row: Vec<usize>,
}

impl RootedTree {
    pub fn from_subtree(shape: &Subtree) -> Result<Self, TreeError> {
        let mut nodes: Vec<Node> = Vec::new();
        let mut leaf_row = Vec::new();
        // (subtree, parent, depth); children pushed in reverse keep preorder ids
        let mut stack = vec![(shape, None::<NodeId>, 0usize)];
        while let Some((sub, parent, depth)) = stack.pop() {
            let id = NodeId(nodes.len());
            if let Some(p) = parent {
                nodes[p.0].children.push(id);
            }
            let label = match sub {
                Subtree::Leaf(x) => {
                    leaf_row.push(*x);
                    Some(*x)
                }
                Subtree::Node(children) => {
                    if children.len() < 2 {
                        return Err(TreeError::TooFewChildren(children.len()));
                    }
                    for c in children.iter().rev() {
                        stack.push((c, Some(id), depth + 1));
                    }
                    None
                }
            };
            nodes.push(Node {
                parent,
                children: Vec::new(),
                label,
                depth,
                span: (0, 0),
            });
        }

        let n = leaf_row.len();
        let mut count = vec![0usize; n + 1];
        let mut extra = Vec::new();
        for &x in &leaf_row {
            if x == 0 || x > n {
                extra.push(x);
            } else {
                count[x] += 1;
            }
        }
        let missing: Vec<usize> = (1..=n).filter(|&x| count[x] == 0).collect();
        let duplicate: Vec<usize> = (1..=n).filter(|&x| count[x] > 1).collect();
        if !missing.is_empty() || !duplicate.is_empty() || !extra.is_empty() {
            return Err(TreeError::LabelSet { missing, duplicate });
        }

        let mut leaf_by_label = vec![NodeId(0); n];
        // preorder ids: a node's descendants follow it contiguously, so one
        // reverse sweep fills the leaf spans bottom-up
        let mut next_leaf = n;
        for idx in (0..nodes.len()).rev() {
            if let Some(x) = nodes[idx].label {
                next_leaf -= 1;
                nodes[idx].span = (next_leaf, next_leaf + 1);
                leaf_by_label[x - 1] = NodeId(idx);
            } else {
                let first = nodes[idx].children[0].0;
                let last = *nodes[idx].children.last().unwrap();
                nodes[idx].span = (nodes[first].span.0, nodes[last.0].span.1);
            }
        }
        Ok(RootedTree {
            nodes,
            leaf_by_label,
            leaf_row,
        })
    }

    pub fn parse(text: &str) -> Result<Self, TreeError> {
        RootedTree::from_subtree(&parse_subtree(text)?)
    }

    pub fn to_subtree(&self) -> Subtree {
        self.subtree_at(self.root())
    }

    pub fn subtree_at(&self, id: NodeId) -> Subtree {
        match self.label(id) {
            Some(x) => Subtree::Leaf(x),
            None => Subtree::Node(self.children(id).iter().map(|&c| self.subtree_at(c)).collect()),
        }
    }

    /// Newick-style text, e.g. `((1,3),(2,4));`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        enum Step {
            Open(NodeId),
            Text(&'static str),
        }
        let mut stack = vec![Step::Text(";"), Step::Open(self.root())];
        while let Some(step) = stack.pop() {
            match step {
                Step::Text(s) => out.push_str(s),
                Step::Open(id) => match self.label(id) {
                    Some(x) => out.push_str(&x.to_string()),
                    None => {
                        out.push('(');
                        stack.push(Step::Text(")"));
                        for (idx, &c) in self.children(id).iter().enumerate().rev() {
                            stack.push(Step::Open(c));
                            if idx > 0 {
                                stack.push(Step::Text(","));
                            }
                        }
                    }
                },
            }
        }
        out
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_row.len()
    }

    pub fn node_ids(&self) -> impl DoubleEndedIterator<Item = NodeId> + ExactSizeIterator {
        (0..self.nodes.len()).map(NodeId)
    }

    /// Internal nodes in preorder.
    pub fn internal_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(|&v| !self.is_leaf(v))
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id.0].children
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.0].parent
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[id.0].label.is_some()
    }

    pub fn label(&self, id: NodeId) -> Option<usize> {
        self.nodes[id.0].label
    }

    /// The leaf node carrying `label`.
    pub fn leaf(&self, label: usize) -> NodeId {
        self.leaf_by_label[label - 1]
    }

    pub fn depth(&self, id: NodeId) -> usize {
        self.nodes[id.0].depth
    }

    /// Leaf labels of `T(id)` in the current child order.
    pub fn leaves_under(&self, id: NodeId) -> &[usize] {
        let (lo, hi) = self.nodes[id.0].span;
        &self.leaf_row[lo..hi]
    }

    pub fn subtree_size(&self, id: NodeId) -> usize {
        let (lo, hi) = self.nodes[id.0].span;
        hi - lo
    }

    /// True iff `descendant` lies in `T(ancestor)` (a node is its own descendant).
    pub fn contains(&self, ancestor: NodeId, descendant: NodeId) -> bool {
        let (lo, hi) = self.nodes[ancestor.0].span;
        let (dlo, dhi) = self.nodes[descendant.0].span;
        // spans nest; for an internal `descendant` the id order breaks ties
        lo <= dlo && dhi <= hi && ancestor.0 <= descendant.0 && self.depth(ancestor) <= self.depth(descendant)
    }

    pub fn lca(&self, a: NodeId, b: NodeId) -> NodeId {
        let (mut a, mut b) = (a, b);
        while self.depth(a) > self.depth(b) {
            a = self.parent(a).unwrap();
        }
        while self.depth(b) > self.depth(a) {
            b = self.parent(b).unwrap();
        }
        while a != b {
            a = self.parent(a).unwrap();
            b = self.parent(b).unwrap();
        }
        a
    }

    /// Children before parents.
    pub fn post_order(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root(), false)];
        while let Some((id, expanded)) = stack.pop() {
            if expanded || self.is_leaf(id) {
                out.push(id);
            } else {
                stack.push((id, true));
                for &c in self.children(id).iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    pub fn is_binary(&self) -> bool {
        self.nodes.iter().all(|n| n.label.is_some() || n.children.len() == 2)
    }

    /// Binary with every leaf at the same depth, hence `2^depth` leaves.
    pub fn is_complete_binary(&self) -> bool {
        let d = self.depth(self.leaf(1));
        self.is_binary() && self.leaf_by_label.iter().all(|&l| self.depth(l) == d)
    }

    pub fn current_leaf_order(&self) -> Permutation {
        Permutation::from_vec_unchecked(self.leaf_row.clone())
    }

    /// True iff `pi` is in `Π(T)`: every subtree's leaves occupy a
    /// contiguous stretch of `pi`.
    pub fn is_consistent(&self, pi: &Permutation) -> Result<bool, TreeError> {
        if pi.len() != self.leaf_count() {
            return Err(TreeError::LengthMismatch {
                expected: self.leaf_count(),
                actual: pi.len(),
            });
        }
        let pos = pi.positions();
        let mut lo = vec![usize::MAX; self.nodes.len()];
        let mut hi = vec![0usize; self.nodes.len()];
        for id in self.node_ids().rev() {
            if let Some(x) = self.label(id) {
                lo[id.0] = pos[x];
                hi[id.0] = pos[x];
            } else {
                for &c in self.children(id) {
                    lo[id.0] = lo[id.0].min(lo[c.0]);
                    hi[id.0] = hi[id.0].max(hi[c.0]);
                }
            }
            if hi[id.0] - lo[id.0] + 1 != self.subtree_size(id) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The same tree with child lists reordered so that its leaves read `pi`.
    pub fn reordered(&self, pi: &Permutation) -> Result<RootedTree, TreeError> {
        if !self.is_consistent(pi)? {
            return Err(TreeError::Inconsistent(pi.clone()));
        }
        let pos = pi.positions();
        let first_pos = |id: NodeId| self.leaves_under(id).iter().map(|&x| pos[x]).min().unwrap();
        fn build(t: &RootedTree, id: NodeId, key: &impl Fn(NodeId) -> usize) -> Subtree {
            match t.label(id) {
                Some(x) => Subtree::Leaf(x),
                None => {
                    let mut ch = t.children(id).to_vec();
                    ch.sort_by_key(|&c| key(c));
                    Subtree::Node(ch.into_iter().map(|c| build(t, c, key)).collect())
                }
            }
        }
        RootedTree::from_subtree(&build(self, self.root(), &first_pos))
    }

    /// `|Π(T)|`, the product of `deg(v)!` over internal nodes; `None` on overflow.
    pub fn order_count(&self) -> Option<u128> {
        self.internal_nodes().try_fold(1u128, |acc, v| {
            let f = (1..=self.children(v).len() as u128).try_fold(1u128, |a, b| a.checked_mul(b))?;
            acc.checked_mul(f)
        })
    }

    pub fn enumerate_orders(&self) -> Result<LeafOrders<'_>, TreeError> {
        self.enumerate_orders_with_cap(DEFAULT_ENUMERATION_CAP)
    }

    /// Streams every member of `Π(T)` exactly once. Binary trees are walked
    /// in reflected Gray-code order (one child flip between consecutive
    /// orders); other trees step through child permutations
    /// lexicographically, last internal node fastest.
    pub fn enumerate_orders_with_cap(&self, cap: u128) -> Result<LeafOrders<'_>, TreeError> {
        match self.order_count() {
            Some(c) if c <= cap => Ok(LeafOrders::new(self, c)),
            Some(c) => Err(TreeError::CapExceeded {
                count: c.to_string(),
                cap,
            }),
            None => Err(TreeError::CapExceeded {
                count: "more than 2^128".into(),
                cap,
            }),
        }
    }
}

impl fmt::Debug for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RootedTree({})", self.serialize())
    }
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl FromStr for RootedTree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RootedTree::parse(s)
    }
}

fn syntax(position: usize, message: impl Into<String>) -> TreeError {
    TreeError::Syntax {
        position,
        message: message.into(),
    }
}

fn parse_subtree(text: &str) -> Result<Subtree, TreeError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    // open groups, innermost last
    let mut open: Vec<(usize, Vec<Subtree>)> = Vec::new();
    let root = loop {
        skip_ws(&mut pos);
        let Some(&c) = bytes.get(pos) else {
            return Err(syntax(pos, "unexpected end of input"));
        };
        let item = if c == b'(' {
            open.push((pos, Vec::new()));
            pos += 1;
            continue;
        } else if c.is_ascii_digit() {
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let label: usize = text[start..pos]
                .parse()
                .map_err(|_| syntax(start, "leaf label does not fit in an integer"))?;
            if label == 0 {
                return Err(syntax(start, "leaf labels start at 1"));
            }
            Subtree::Leaf(label)
        } else {
            return Err(syntax(pos, format!("expected '(' or a leaf label, found {:?}", c as char)));
        };

        // attach `item`, closing as many groups as the input says
        let mut item = item;
        let done = loop {
            let Some((_, siblings)) = open.last_mut() else {
                break Some(item);
            };
            siblings.push(item);
            skip_ws(&mut pos);
            match bytes.get(pos) {
                Some(b',') => {
                    pos += 1;
                    break None;
                }
                Some(b')') => {
                    let (at, children) = open.pop().unwrap();
                    if children.len() < 2 {
                        return Err(syntax(at, "a group needs at least two subtrees"));
                    }
                    pos += 1;
                    item = Subtree::Node(children);
                }
                Some(&c) => return Err(syntax(pos, format!("expected ',' or ')', found {:?}", c as char))),
                None => return Err(syntax(pos, "unexpected end of input")),
            }
        };
        if let Some(root) = done {
            break root;
        }
    };
    skip_ws(&mut pos);
    match bytes.get(pos) {
        Some(b';') => pos += 1,
        Some(&c) => return Err(syntax(pos, format!("expected ';', found {:?}", c as char))),
        None => return Err(syntax(pos, "missing ';'")),
    }
    skip_ws(&mut pos);
    if pos != bytes.len() {
        return Err(syntax(pos, "trailing input after ';'"));
    }
    Ok(root)
}

/// Iterator over `Π(T)`; see [`RootedTree::enumerate_orders_with_cap`].
pub struct LeafOrders<'a> {
    tree: &'a RootedTree,
    internal: Vec<NodeId>,
    /// Child order per internal node, as indices into `children(v)`.
    orders: Vec<Vec<usize>>,
    binary: bool,
    emitted: u128,
    total: u128,
}

impl<'a> LeafOrders<'a> {
    fn new(tree: &'a RootedTree, total: u128) -> Self {
        let internal: Vec<NodeId> = tree.internal_nodes().collect();
        let orders = internal.iter().map(|&v| (0..tree.children(v).len()).collect()).collect();
        LeafOrders {
            tree,
            internal,
            orders,
            binary: tree.is_binary(),
            emitted: 0,
            total,
        }
    }

    fn advance(&mut self) {
        if self.binary {
            let flip = self.emitted.trailing_zeros() as usize;
            self.orders[flip].swap(0, 1);
        } else {
            for slot in self.orders.iter_mut().rev() {
                if next_permutation(slot) {
                    return;
                }
                // wrapped around to sorted; carry into the next node
            }
        }
    }

    fn current(&self) -> Permutation {
        let t = self.tree;
        let mut which = vec![usize::MAX; t.node_count()];
        for (idx, &v) in self.internal.iter().enumerate() {
            which[v.0] = idx;
        }
        let mut row = Vec::with_capacity(t.leaf_count());
        let mut stack = vec![t.root()];
        while let Some(id) = stack.pop() {
            match t.label(id) {
                Some(x) => row.push(x),
                None => {
                    let ch = t.children(id);
                    for &c in self.orders[which[id.0]].iter().rev() {
                        stack.push(ch[c]);
                    }
                }
            }
        }
        Permutation::from_vec_unchecked(row)
    }
}

impl Iterator for LeafOrders<'_> {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.emitted >= self.total {
            return None;
        }
        if self.emitted > 0 {
            self.advance();
        }
        self.emitted += 1;
        Some(self.current())
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = usize::try_from(self.total - self.emitted).unwrap_or(usize::MAX);
        (left, Some(left))
    }
}

/// Lexicographic successor in place; on the last permutation, resets to
/// sorted order and returns false.
fn next_permutation(a: &mut [usize]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        a.reverse();
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}
