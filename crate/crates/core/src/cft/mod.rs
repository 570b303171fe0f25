//! Continuum free-fermion CFT on domains mapped to the upper half-plane.
//!
//! A [`ConformalChart`] `g: D → ℍ` carries its first three derivatives, so
//! correlators transport as `⟨Πψ(z_i)⟩_D = Π g′(z_i)^{1/2} ⟨Πψ(g z_i)⟩_ℍ` with
//! the ℍ two-point function `1/(z − w)` and the Pfaffian for higher points.
//! `T = −½:ψ∂ψ:` picks up `S_g/24` under transport.

mod chart;
mod correlator;
mod descendant;
mod ope;
mod ward;

pub use chart::{schwarzian, ConformalChart, Jet};
pub use correlator::{
    derivative_correlator, f_down_halfplane, f_up_halfplane, halfplane_derivative_correlator, halfplane_kernel,
    halfplane_wick, npoint, two_point, two_point_expansion_remainder, two_point_table, wick_pairing_oracle,
    CorrelatorRequest, HInsertion, MAX_DERIVATIVE_ORDER, WICK_MAX_POINTS,
};
pub use descendant::{descendant_correlator, descendant_operator, null_field_residual, null_field_terms, DiffOp};
pub use ope::{ope_singularity_check, OpePair, OpeReport, OPE_SEPARATIONS};
pub use ward::{
    t_domain, t_halfplane_subtracted, virasoro_halfplane, ward_domain, ward_domain_expanded, ward_halfplane,
    TInsertion, T_SUBTRACTION_ETA,
};
