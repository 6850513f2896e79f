//! Empirical and logarithmic empirical measures of symbolic sequences,
//! finite estimates of their limit sets, and correlation sums of the
//! Möbius, Liouville and squarefree sequences.

pub mod arith;
pub mod averaging;
pub mod chowla;
pub mod error;
pub mod grid;
pub mod limitsets;
pub mod measures;
pub mod numeric;
pub mod symbolic;
pub mod verify;

pub use arith::{ArithmeticKind, Sieve};
pub use averaging::AveragingMode;
pub use error::{Error, Result};
pub use grid::Grid;
pub use measures::CylinderMeasure;
pub use numeric::Rational;
pub use symbolic::{example_sequence, Alphabet, ExampleName, SymbolicSequence};
