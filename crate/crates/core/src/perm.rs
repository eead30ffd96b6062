//! Permutations of `[n]`, block transpositions and the breakpoint machinery
//! built on top of them.
//!
//! Values and positions are 1-based everywhere in the public API. The
//! extended permutation `(0) * pi * (n+1)` is never materialized; its two
//! sentinels only show up while counting breakpoints.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("permutation must contain at least one element")]
    Empty,
    #[error("value {value} is not in 1..={n}")]
    ValueOutOfRange { value: usize, n: usize },
    #[error("value {0} appears more than once")]
    Duplicate(usize),
    #[error("transposition ({i},{j},{k}) violates 1 <= i < j < k")]
    BadOrdering { i: usize, j: usize, k: usize },
    #[error("transposition ({i},{j},{k}) does not fit a permutation of length {n}")]
    IndexOutOfRange { i: usize, j: usize, k: usize, n: usize },
    #[error("glue is undefined for the identity permutation")]
    IdentityGlue,
    #[error("cannot remove an element from a permutation of length {0}")]
    TooShort(usize),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("malformed permutation text: {0}")]
    Parse(String),
}

/// A bijection of `[n]`, stored as the sequence `(pi_1, ..., pi_n)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    elems: Vec<usize>,
}

impl Permutation {
    pub fn new(elems: Vec<usize>) -> Result<Self, PermError> {
        let n = elems.len();
        if n == 0 {
            return Err(PermError::Empty);
        }
        let mut seen = vec![false; n + 1];
        for &v in &elems {
            if v == 0 || v > n {
                return Err(PermError::ValueOutOfRange { value: v, n });
            }
            if seen[v] {
                return Err(PermError::Duplicate(v));
            }
            seen[v] = true;
        }
        Ok(Permutation { elems })
    }

    /// Caller guarantees `elems` is a permutation of `1..=elems.len()`.
    pub(crate) fn from_vec_unchecked(elems: Vec<usize>) -> Self {
        debug_assert!(Permutation::new(elems.clone()).is_ok());
        Permutation { elems }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "identity permutation needs n >= 1");
        Permutation {
            elems: (1..=n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.elems
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.elems
    }

    /// The element at 1-based position `pos`.
    pub fn at(&self, pos: usize) -> usize {
        self.elems[pos - 1]
    }

    /// `positions()[v]` is the 1-based position of value `v`; index 0 is unused.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.len() + 1];
        for (p, &v) in self.elems.iter().enumerate() {
            pos[v] = p + 1;
        }
        pos
    }

    pub fn position_of(&self, value: usize) -> Option<usize> {
        self.elems.iter().position(|&v| v == value).map(|p| p + 1)
    }

    pub fn inverse(&self) -> Permutation {
        let pos = self.positions();
        Permutation {
            elems: pos[1..].to_vec(),
        }
    }

    /// `self ∘ other`, i.e. `(self ∘ other)(p) = self(other(p))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.len() != other.len() {
            return Err(PermError::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(Permutation {
            elems: other.elems.iter().map(|&p| self.elems[p - 1]).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.elems.iter().enumerate().all(|(p, &v)| v == p + 1)
    }

    /// Returns `self ∘ τ(i,j,k)`: the segments at positions `i..j` and `j..k`
    /// trade places.
    pub fn apply(&self, t: &Transposition) -> Result<Permutation, PermError> {
        let mut out = self.clone();
        out.apply_in_place(t)?;
        Ok(out)
    }

    pub fn apply_in_place(&mut self, t: &Transposition) -> Result<(), PermError> {
        t.check_fits(self.len())?;
        apply_to_slice(&mut self.elems, t);
        Ok(())
    }

    /// Applies a whole sequence left to right.
    pub fn apply_all<'a, I>(&self, seq: I) -> Result<Permutation, PermError>
    where
        I: IntoIterator<Item = &'a Transposition>,
    {
        let mut out = self.clone();
        for t in seq {
            out.apply_in_place(t)?;
        }
        Ok(out)
    }

    /// Number of maximal runs `x, x+1, ..., y` of consecutive positions.
    pub fn blocks(&self) -> usize {
        1 + self
            .elems
            .windows(2)
            .filter(|w| w[0] + 1 != w[1])
            .count()
    }

    /// Adjacent pairs `(x, y)` of the extended permutation with `x + 1 != y`.
    pub fn breakpoints(&self) -> usize {
        self.extended_pairs().filter(|&(x, y)| x + 1 != y).count()
    }

    /// The left element of every breakpoint pair; may contain the sentinel 0.
    pub fn breakpoint_elements(&self) -> BTreeSet<usize> {
        self.extended_pairs()
            .filter(|&(x, y)| x + 1 != y)
            .map(|(x, _)| x)
            .collect()
    }

    fn extended_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        let first = std::iter::once((0, self.elems[0]));
        let inner = self.elems.windows(2).map(|w| (w[0], w[1]));
        let last = std::iter::once((self.elems[n - 1], n + 1));
        first.chain(inner).chain(last)
    }

    /// `max(ceil((blocks - 1) / 3), ceil(bp / 3))`, a lower bound on the
    /// transposition distance.
    pub fn transposition_lower_bound(&self) -> usize {
        let by_blocks = (self.blocks() - 1).div_ceil(3);
        let by_bp = self.breakpoints().div_ceil(3);
        by_blocks.max(by_bp)
    }

    /// Collapses every block into one element. See [`Gluing`].
    pub fn glue(&self) -> Result<Permutation, PermError> {
        Ok(self.gluing()?.glued)
    }

    pub fn gluing(&self) -> Result<Gluing, PermError> {
        Gluing::new(self)
    }

    /// `pi ⊖ value`: delete `value`, then decrement every larger value.
    pub fn remove(&self, value: usize) -> Result<Permutation, PermError> {
        let n = self.len();
        if n < 2 {
            return Err(PermError::TooShort(n));
        }
        if value == 0 || value > n {
            return Err(PermError::ValueOutOfRange { value, n });
        }
        let elems = self
            .elems
            .iter()
            .filter(|&&v| v != value)
            .map(|&v| if v > value { v - 1 } else { v })
            .collect();
        Ok(Permutation { elems })
    }

    /// The transposition that moves `x` directly behind `x - 1` (to the
    /// front when `x = 1`), or `None` when `x` is already there.
    pub fn shift_after_predecessor_move(&self, x: usize) -> Result<Option<Transposition>, PermError> {
        let n = self.len();
        if x == 0 || x > n {
            return Err(PermError::ValueOutOfRange { value: x, n });
        }
        let pos = self.positions();
        let i = pos[x];
        // position after which x should sit; 0 means "at the front"
        let anchor = if x == 1 { 0 } else { pos[x - 1] };
        Ok(move_single(i, anchor + 1))
    }

    /// The transposition that moves `x` directly in front of `x + 1` (to the
    /// end when `x = n`), or `None` when `x` is already there.
    pub fn shift_before_successor_move(&self, x: usize) -> Result<Option<Transposition>, PermError> {
        let n = self.len();
        if x == 0 || x > n {
            return Err(PermError::ValueOutOfRange { value: x, n });
        }
        let pos = self.positions();
        let i = pos[x];
        let anchor = if x == n { n + 1 } else { pos[x + 1] };
        Ok(move_single(i, anchor))
    }

    /// Moves `x` directly after `x - 1`, or to the front if `x = 1`.
    pub fn shift_after_predecessor(&self, x: usize) -> Result<Permutation, PermError> {
        match self.shift_after_predecessor_move(x)? {
            Some(t) => self.apply(&t),
            None => Ok(self.clone()),
        }
    }

    /// Moves `x` directly before `x + 1`, or to the end if `x = n`.
    pub fn shift_before_successor(&self, x: usize) -> Result<Permutation, PermError> {
        match self.shift_before_successor_move(x)? {
            Some(t) => self.apply(&t),
            None => Ok(self.clone()),
        }
    }
}

/// Transposition moving the single element at position `from` so that it
/// ends up immediately before the element currently at position `gap`
/// (`gap` in `1..=n+1`).
fn move_single(from: usize, gap: usize) -> Option<Transposition> {
    move_segment(from, from, gap)
}

/// Transposition moving the segment at positions `start..=end` in front of
/// the element at position `gap`; `None` if that is a no-op.
pub(crate) fn move_segment(start: usize, end: usize, gap: usize) -> Option<Transposition> {
    if (start..=end + 1).contains(&gap) {
        None
    } else if gap < start {
        Some(Transposition { i: gap, j: start, k: end + 1 })
    } else {
        Some(Transposition { i: start, j: end + 1, k: gap })
    }
}

pub(crate) fn apply_to_slice<T>(elems: &mut [T], t: &Transposition) {
    elems[t.i - 1..t.k - 1].rotate_left(t.j - t.i);
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (idx, v) in self.elems.iter().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Accepts whitespace- and/or comma-separated values with optional
/// surrounding parentheses, e.g. `3 1 2` or `(3,1,2)`.
impl FromStr for Permutation {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let elems = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|tok| !tok.is_empty())
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| PermError::Parse(format!("bad element {tok:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Permutation::new(elems)
    }
}

/// The block transposition `τ(i,j,k)` with `1 <= i < j < k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transposition {
    i: usize,
    j: usize,
    k: usize,
}

/// What a permutation looks like when read as a candidate transposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TranspositionShape {
    Identity,
    Transposition(Transposition),
    Other,
}

impl Transposition {
    pub fn new(i: usize, j: usize, k: usize) -> Result<Self, PermError> {
        if i == 0 || i >= j || j >= k {
            return Err(PermError::BadOrdering { i, j, k });
        }
        Ok(Transposition { i, j, k })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Errors unless `k <= n + 1`.
    pub fn check_fits(&self, n: usize) -> Result<(), PermError> {
        if self.k > n + 1 {
            return Err(PermError::IndexOutOfRange {
                i: self.i,
                j: self.j,
                k: self.k,
                n,
            });
        }
        Ok(())
    }

    /// The transposition undoing this one.
    pub fn inverse(&self) -> Transposition {
        Transposition {
            i: self.i,
            j: self.i + self.k - self.j,
            k: self.k,
        }
    }

    /// The permutation `(1,…,i-1, j,…,k-1, i,…,j-1, k,…,n)`.
    pub fn as_permutation(&self, n: usize) -> Result<Permutation, PermError> {
        self.check_fits(n)?;
        Permutation::identity(n).apply(self)
    }

    /// Reads `perm` back as a transposition if it has that shape.
    pub fn classify(perm: &Permutation) -> TranspositionShape {
        let e = perm.as_slice();
        let n = e.len();
        let Some(start) = e.iter().enumerate().position(|(p, &v)| v != p + 1) else {
            return TranspositionShape::Identity;
        };
        let i = start + 1;
        let j = e[start];
        if j <= i {
            return TranspositionShape::Other;
        }
        // run j, j+1, ..., k-1 starting at position i
        let mut p = start;
        let mut expect = j;
        while p < n && e[p] == expect {
            p += 1;
            expect += 1;
        }
        let k = expect;
        let candidate = Transposition { i, j, k };
        if k > n + 1 {
            return TranspositionShape::Other;
        }
        match candidate.as_permutation(n) {
            Ok(ref q) if q == perm => TranspositionShape::Transposition(candidate),
            _ => TranspositionShape::Other,
        }
    }

    /// `τ ⊖ position`: treats the transposition as a permutation of `[n]`
    /// and removes the value `position` from it. Returns `None` when the
    /// result is the identity on `[n-1]`.
    ///
    /// Used to replay a sorting sequence on a permutation with one element
    /// deleted; see [`simulate_removal`].
    pub fn remove_position(&self, position: usize, n: usize) -> Result<Option<Transposition>, PermError> {
        let as_perm = self.as_permutation(n)?;
        let reduced = as_perm.remove(position)?;
        match Transposition::classify(&reduced) {
            TranspositionShape::Identity => Ok(None),
            TranspositionShape::Transposition(t) => Ok(Some(t)),
            TranspositionShape::Other => unreachable!(
                "removing a value from {self:?} over n={n} yields {reduced}, which is not a transposition"
            ),
        }
    }
}

impl fmt::Debug for Transposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "τ({},{},{})", self.i, self.j, self.k)
    }
}

impl fmt::Display for Transposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.i, self.j, self.k)
    }
}

/// Given a sequence `seq` applied to `pi`, produces the companion sequence
/// that does the same job on `pi ⊖ value`. Steps that collapse to the
/// identity are dropped, so the result is never longer than `seq`.
pub fn simulate_removal(
    pi: &Permutation,
    seq: &[Transposition],
    value: usize,
) -> Result<Vec<Transposition>, PermError> {
    let n = pi.len();
    let mut current = pi.clone();
    let mut out = Vec::with_capacity(seq.len());
    for t in seq {
        t.check_fits(n)?;
        let at = current
            .position_of(value)
            .ok_or(PermError::ValueOutOfRange { value, n })?;
        if let Some(u) = t.remove_position(at, n)? {
            out.push(u);
        }
        current.apply_in_place(t)?;
    }
    Ok(out)
}

/// The result of collapsing the blocks of a non-identity permutation, plus
/// enough bookkeeping to turn a sorting sequence for the glued permutation
/// back into one for the original.
#[derive(Debug, Clone)]
pub struct Gluing {
    glued: Permutation,
    /// Length of the dropped leading block `1..=a` (0 if none).
    prefix: usize,
    /// Length of each kept block, in position order.
    block_lens: Vec<usize>,
}

impl Gluing {
    fn new(pi: &Permutation) -> Result<Self, PermError> {
        if pi.is_identity() {
            return Err(PermError::IdentityGlue);
        }
        let n = pi.len();
        let e = pi.as_slice();
        // (first value, length) per block
        let mut blocks: Vec<(usize, usize)> = Vec::new();
        for &v in e {
            match blocks.last_mut() {
                Some((first, len)) if *first + *len == v => *len += 1,
                _ => blocks.push((v, 1)),
            }
        }
        let mut prefix = 0;
        if blocks[0].0 == 1 {
            prefix = blocks[0].1;
            blocks.remove(0);
        }
        if let Some(&(first, len)) = blocks.last() {
            if first + len - 1 == n {
                blocks.pop();
            }
        }
        let mut order: Vec<usize> = (0..blocks.len()).collect();
        order.sort_by_key(|&b| blocks[b].0);
        let mut rank = vec![0; blocks.len()];
        for (r, &b) in order.iter().enumerate() {
            rank[b] = r + 1;
        }
        Ok(Gluing {
            glued: Permutation::from_vec_unchecked(rank),
            prefix,
            block_lens: blocks.iter().map(|&(_, len)| len).collect(),
        })
    }

    pub fn glued(&self) -> &Permutation {
        &self.glued
    }

    /// Rewrites transpositions on the glued permutation as transpositions on
    /// the original one by moving whole blocks.
    pub fn expand(&self, seq: &[Transposition]) -> Result<Vec<Transposition>, PermError> {
        let m = self.glued.len();
        let mut lens = self.block_lens.clone();
        let mut out = Vec::with_capacity(seq.len());
        for t in seq {
            t.check_fits(m)?;
            // start[p] = original position of glued position p+1; start[m] = one past the last kept block
            let mut start = Vec::with_capacity(m + 1);
            let mut acc = self.prefix + 1;
            for &len in &lens {
                start.push(acc);
                acc += len;
            }
            start.push(acc);
            out.push(Transposition {
                i: start[t.i - 1],
                j: start[t.j - 1],
                k: start[t.k - 1],
            });
            apply_to_slice(&mut lens, t);
        }
        Ok(out)
    }
}
