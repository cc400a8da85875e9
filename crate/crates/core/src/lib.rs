//! Exact-arithmetic toolkit for the K3 lattice and its period domain.
//!
//! The crate builds the even unimodular lattice of signature (3,19) that
//! models the second cohomology of a K3 surface, manipulates its integer
//! isometries and +/-2-reflections, decides whether a positive 3-plane is a
//! smooth period point (no roots in its orthogonal complement) or an
//! orbifold point, classifies orbifold singularities by ADE type, and
//! produces fixed-plane certificates for reflection generators.
//!
//! All lattice arithmetic is exact over arbitrary-precision integers and
//! rationals; floating point only enters in [`grassmann`], where planes are
//! compared and measured. The matrix and elimination kernels are generic
//! over the scalar via `num-traits`; the concrete instantiations used
//! throughout are the aliases below.

pub mod ade;
pub mod error;
pub mod grassmann;
pub mod io;
pub mod isometry;
pub mod lattice;
pub mod linalg;
pub mod matrix;
pub mod period;

/// Arbitrary-precision integer scalar.
pub type Int = num_bigint::BigInt;
/// Arbitrary-precision rational scalar, always in lowest terms.
pub type Rat = num_rational::BigRational;
/// Exact integer matrix.
pub type IntMatrix = matrix::Matrix<Int>;
/// Exact rational matrix.
pub type RatMatrix = matrix::Matrix<Rat>;
/// Floating-point matrix, used only by the plane geometry.
pub type FloatMatrix = matrix::Matrix<f64>;

pub use error::{Error, Result};
pub use lattice::{Lattice, LatticeVector};

/// Seed for randomized test corpora; override with `K3_PERIOD_SEED`.
pub fn test_seed() -> u64 {
    std::env::var("K3_PERIOD_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0x4b33_7065)
}
