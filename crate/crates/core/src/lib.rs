//! Verification toolkit for ternary sums of primes congruent to 1 mod 3.
//!
//! The crate is split along the lines of the argument it checks:
//!
//! * [`residue_ring`]: squarefree moduli, residue sets, CRT and exact sumsets.
//! * [`local_verifier`]: the local (mod m) sumset theorem, checked exhaustively
//!   for indicator weights and by randomized search for general weights.
//! * [`lp_certifier`]: the exact linear programs over support profiles on Z_15.
//! * [`inequality_lab`]: interval certification of the n = 6 region bounds and
//!   randomized counterexample search for the averaged sequence lemmas.
//! * [`goldbach_engine`]: sieving, representation counting, the W-trick
//!   pipeline, majorants and Fourier diagnostics.
//! * [`report`]: the shared JSON/CSV report schema.
//!
//! Exact code paths are generic over [`Scalar`]; the interval code is generic
//! over [`RoundedFloat`]. The aliases below name the instantiations used by the
//! command line tool.

pub mod goldbach_engine;
pub mod inequality_lab;
pub mod local_verifier;
pub mod lp_certifier;
pub mod report;
pub mod residue_ring;
mod scalar;

pub use scalar::{RoundedFloat, Scalar};

/// Arbitrary precision rational, used for every certificate.
pub type Rational = num_rational::BigRational;
/// Machine-word rational for hot loops with small denominators.
pub type SmallRational = num_rational::Ratio<i64>;

pub type Interval64 = inequality_lab::Interval<f64>;
pub type ExactLp = lp_certifier::LpInstance<Rational>;
pub type ExactCertificate = lp_certifier::LpCertificate<Rational>;
pub type ExactWeight = local_verifier::UnitWeight<SmallRational>;
pub type RealWeight = local_verifier::UnitWeight<f64>;
