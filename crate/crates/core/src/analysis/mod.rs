//! Exact correlations, complementary-set checks, coherence and PAPR.

mod coherence;
mod correlation;
mod histogram;
mod papr;
mod spreading;

pub use coherence::{
    coherence_bruteforce, coherence_by_rank, coherence_naive, find_orthogonality_violation,
    CoherenceMethod, CoherenceReport, ColumnPair,
};
pub use correlation::{aperiodic_correlation, cs_check, inner_product_exact};
pub use histogram::{is_zero_sum, CycloInt, ExponentHistogram};
pub use papr::{
    papr_columns, papr_critical, papr_critical_set, papr_estimate, papr_grid, papr_of_sequences, papr_per_block, papr_set,
    PaprEstimator, DEFAULT_OVERSAMPLE, MIN_OVERSAMPLE,
};
pub use spreading::{
    mem_budget, overloading_factor, PhaseMatrix, SpreadingMatrix, DEFAULT_MEM_BUDGET,
    MEM_BUDGET_ENV,
};
