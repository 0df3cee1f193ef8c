//! Block-symmetric Fiedler-like linearizations of matrix polynomials.
//!
//! The crate builds block-symmetric generalized Fiedler pencils (with
//! repetition), reduces them by block-permutation congruence to one of four
//! explicit block-structure families, and checks the structural and
//! spectral claims involved. Structural work is exact over [`Rational`];
//! spectral checks use complex floating point and LAPACK's QZ.

pub mod blockpencil;
pub mod congruence;
pub mod error;
pub mod families;
pub mod fiedler;
pub mod matpoly;
pub mod matrix;
pub mod minbases;
pub mod random;
pub mod scalar;
pub mod suite;
pub mod symbolic;
pub mod tuples;
pub mod verify;

pub use blockpencil::{BlockPencil, BlockPermutation};
pub use error::{Error, Result};
pub use matpoly::{MatrixPolynomial, PolyMatrix};
pub use matrix::Matrix;
pub use num_complex::Complex64;
pub use scalar::{rat, ratio, Field, Rational, Scalar};
pub use tuples::IndexTuple;

pub type RationalMatrix = Matrix<Rational>;
pub type ComplexMatrix = Matrix<Complex64>;
pub type RationalPolynomial = MatrixPolynomial<Rational>;
pub type ComplexPolynomial = MatrixPolynomial<Complex64>;
pub type RationalPencil = BlockPencil<Rational>;
pub type ComplexPencil = BlockPencil<Complex64>;
