//! Chordal multiple SLE at `κ = 3`.
//!
//! `2n` curves grow from boundary points of ℍ under the Loewner flow
//! `dg_t(w) = Σ_i 2/(g_t(w) − X^i_t) dt`. The driving points carry the
//! drift `3∂_i log Z + Σ_{l≠i} 2/(X^i − X^l)` with `Z = Pf[1/(x_i − x_j)]`,
//! which makes `J_t χ(X_t; g_t(W))/Z(X_t)` a local martingale. The same
//! cancellation at the level of states is `(−2L_{−2} + (3/2)L_{−1}²)ψ = 0`,
//! so `G_t ψ_{−1/2}|0⟩` has no drift.

mod generator;
mod loewner;
mod martingale;
mod partition;

pub use generator::{
    basis_levels_twice, evolve_martingale_generator, generator_drift_on_psi, generator_matrices, generator_mc_test, GeneratorMatrices, GeneratorMcReport,
    GeneratorSeries,
};
pub use loewner::{kappa_consistency, Driving, GFlow, LoewnerEnsemble, Tracked, DEFAULT_DT, DEFAULT_SWALLOW_EPS, KAPPA};
pub use martingale::{martingale_mc_test, observable, McCheckpoint, McConfig, McReport, ObservableSpec, MAX_SWALLOWED_FRACTION, MIN_PATHS};
pub use partition::{grad_log_partition, partition_function, pde_residuals, PdeReport};
