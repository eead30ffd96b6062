//! A leaf order together with a transposition sequence that sorts it.
//!
//! On disk the first line holds the permutation, space separated, and every
//! further line holds one transposition as `i j k`, in application order.
//! Lines end with LF and carry no trailing whitespace, so files diff cleanly.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::perm::{PermError, Permutation, Transposition};
use crate::tree::{RootedTree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Witness {
    pub permutation: Permutation,
    pub sequence: Vec<Transposition>,
}

/// Why a witness fails to certify a drawing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    NotALeafOrder,
    DoesNotSort,
    TooLong { length: usize, budget: usize },
}

impl Witness {
    pub fn new(permutation: Permutation, sequence: Vec<Transposition>) -> Self {
        Witness { permutation, sequence }
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// Checks that the permutation is a leaf order of `tree` and that the
    /// sequence sorts it, within `budget` steps when one is given.
    pub fn check(&self, tree: &RootedTree, budget: Option<usize>) -> Result<Verdict, WitnessError> {
        if !tree.is_consistent(&self.permutation)? {
            return Ok(Verdict::NotALeafOrder);
        }
        let n = self.permutation.len();
        if self.sequence.iter().any(|t| t.check_fits(n).is_err()) {
            return Ok(Verdict::DoesNotSort);
        }
        if !self.permutation.apply_all(self.sequence.iter())?.is_identity() {
            return Ok(Verdict::DoesNotSort);
        }
        match budget {
            Some(k) if self.sequence.len() > k => Ok(Verdict::TooLong {
                length: self.sequence.len(),
                budget: k,
            }),
            _ => Ok(Verdict::Valid),
        }
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<Self, WitnessError> {
        let err = |line: usize, message: String| WitnessError::Parse { line, message };
        if text.contains('\r') {
            let line = text[..text.find('\r').unwrap()].matches('\n').count() + 1;
            return Err(err(line, "carriage return; line endings must be LF".into()));
        }
        let body = text.strip_suffix('\n').unwrap_or(text);
        let mut lines = body.split('\n').enumerate().map(|(i, l)| (i + 1, l));
        let (_, first) = lines.next().ok_or_else(|| err(1, "empty witness".into()))?;
        check_spacing(1, first)?;
        let values = first
            .split(' ')
            .map(|tok| tok.parse::<usize>().map_err(|_| err(1, format!("not an integer: {tok:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let permutation = Permutation::new(values).map_err(|e| err(1, e.to_string()))?;
        let n = permutation.len();
        let mut sequence = Vec::new();
        for (line, text) in lines {
            check_spacing(line, text)?;
            let nums = text
                .split(' ')
                .map(|tok| tok.parse::<usize>().map_err(|_| err(line, format!("not an integer: {tok:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let [i, j, k] = nums[..] else {
                return Err(err(line, format!("expected 3 indices, found {}", nums.len())));
            };
            let t = Transposition::new(i, j, k).map_err(|e| err(line, e.to_string()))?;
            t.check_fits(n).map_err(|e| err(line, e.to_string()))?;
            sequence.push(t);
        }
        Ok(Witness { permutation, sequence })
    }
}

fn check_spacing(line: usize, text: &str) -> Result<(), WitnessError> {
    if text.is_empty() {
        return Err(WitnessError::Parse {
            line,
            message: "empty line".into(),
        });
    }
    if text.starts_with(' ') || text.ends_with(' ') || text.contains("  ") || text.contains('\t') {
        return Err(WitnessError::Parse {
            line,
            message: "fields must be separated by single spaces".into(),
        });
    }
    Ok(())
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row: Vec<String> = self.permutation.as_slice().iter().map(usize::to_string).collect();
        writeln!(f, "{}", row.join(" "))?;
        for t in &self.sequence {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

impl FromStr for Witness {
    type Err = WitnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Witness::parse(s)
    }
}
