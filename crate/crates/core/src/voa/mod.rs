//! The Clifford vertex operator algebra on the Neveu–Schwarz Fock space.
//!
//! States are finite rational combinations of `ψ_{−k_r−1/2}⋯ψ_{−k_1−1/2}|0⟩`
//! with `k_r > ⋯ > k_1 ≥ 0`, truncated at a maximal level `L`. All
//! structure constants are dyadic, so every identity here is checked with
//! exact arithmetic.
//!
//! The Virasoro modes come from the Sugawara form
//! `L_m = −½ Σ_k (k + m/2) :ψ_{m+k}ψ_{−k}: + a0 δ_{m,0}`. With `a0 = 0` they
//! satisfy the Virasoro algebra at `c = 1/2`; `a0 = 1/16` is kept as an
//! option and breaks `[L_m, L_{−m}]`, which [`commutator_tables`] reports.
//!
//! [`chi_correlator`] maps tensor products of states to correlation
//! functions. On ℍ a monomial state is the fully normal-ordered product of
//! fermion derivatives, so the value is a Pfaffian with same-point
//! contractions removed.

mod chi;
mod fock;
mod vertex;
mod virasoro;

pub use chi::{chi_correlator, chi_ope_remainders, descendant_decomposition, pbw_strings, ChiValue};
pub use fock::{apply_psi_mode, basis_states, monomial_level_twice, FockVector, ModeIndex, Monomial, TruncationConfig, Q};
pub use vertex::vertex_mode;
pub use virasoro::{
    apply_virasoro_mode, apply_virasoro_string, commutator_tables, singular_vector, CommutatorEntry, CommutatorKind, CommutatorReport,
};
