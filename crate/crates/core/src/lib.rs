//! Instrumented Shellsort, the simple process and its minor sequence, a
//! lossless permutation codec built from pass traces, and the Monte Carlo
//! machinery used to measure average-case inversion counts.

pub mod analytics;
pub mod codec;
pub mod increments;
pub mod perm;
pub mod simple;
pub mod sorter;
pub mod verify;

pub use increments::{generate, validate, Family, IncrementSequence, SequenceError};
pub use perm::{PermError, Permutation, Seed};
pub use sorter::{shellsort, MoveMatrix, SortTrace};
