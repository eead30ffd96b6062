//! Block-crossing minimization for one-sided tanglegrams.
//!
//! The left tree of the tanglegram is fixed with leaf order `1..n`; the right
//! tree `T` may permute the children of its internal nodes. A drawing is a
//! leaf order `pi` in `Π(T)` together with a sequence of block transpositions
//! sorting `pi` to the identity, one per block crossing.

pub mod dp;
pub mod fpt;
pub mod hardness;
pub mod perm;
pub mod render;
pub mod sbt;
pub mod tree;
pub mod witness;

pub use perm::{Permutation, Transposition};
