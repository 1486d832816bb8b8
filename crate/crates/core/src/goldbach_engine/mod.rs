//! Ternary representations by primes from a dense subset of the primes 1 mod 3.

mod ntt;
pub mod pipeline;
pub mod represent;
pub mod sieve;
pub mod spectrum;
pub mod subset;

use thiserror::Error;

pub use ntt::{cube_counts, MAX_TRANSFORM_LEN};
pub use pipeline::{
    build_majorant, choose_cyclic_prime, decay_bound, pipeline_weights, run_pipeline, sieve_modulus, verify_decay,
    ClassStage, ClassWeight, DecayReport, LocalWeights, MajorantProfile, PipelineParams, PipelineReport,
};
pub use represent::{
    convolution_counts, count_representations, direct_counts, is_admissible_target, scan_counts, scan_targets,
    CountMethod, ScanReport, Targets,
};
pub use sieve::{is_prime_small, next_prime, sieve_primes, sieve_primes_with_budget, PrimeTable, DEFAULT_MAX_LIMIT};
pub use spectrum::{
    dft, dft_direct, direct_triple_sum, spectrum, spectrum_with_q, transference_diagnostics, SpectrumReport,
    TransferenceReport,
};
pub use subset::{build_subset, DensitySubset, SubsetRule, SubsetSummary};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GoldbachError {
    #[error("sieve limit {limit} exceeds the budget {max}")]
    LimitTooLarge { limit: u64, max: u64 },
    #[error("invalid subset rule: {0}")]
    InvalidRule(String),
    #[error("target {n} exceeds three times the sieve limit ({max})")]
    TargetOutOfRange { n: u64, max: u64 },
    #[error("bad target {n}: {reason}")]
    BadTarget { n: u64, reason: String },
    #[error("transform length {len} exceeds {max}")]
    TransformTooLarge { len: u64, max: u64 },
    #[error("sieve level {z} exceeds the maximum {max}")]
    SieveLevelTooLarge { z: u64, max: u64 },
    #[error("sieve level {0} is below 3")]
    SieveLevelTooSmall(u64),
    #[error("kappa must be positive, got {0}")]
    NonPositiveKappa(f64),
    #[error("no prime in [{lo}, {hi}]")]
    NoPrimeInInterval { lo: u64, hi: u64 },
    #[error("{b} is not a reduced residue mod {w}")]
    NotReducedResidue { b: u64, w: u64 },
    #[error("input sequences have different or zero lengths")]
    MismatchedLength,
    #[error("local weight total {total} does not exceed phi(m)/4 = {quarter_phi}")]
    HypothesisFailed { total: f64, quarter_phi: f64 },
    #[error("no class triple with weight sum above 3/2 reaches {target}")]
    NoWitness { target: u64 },
    #[error("stage {stage} failed: {detail}")]
    StageFailed { stage: String, detail: String },
    #[error("sieve covers {have} but {needed} is needed")]
    InsufficientSieve { needed: u64, have: u64 },
}
