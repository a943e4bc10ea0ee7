//! Banach spaces with a Schauder basis: the coefficient representation ξ,
//! its norm program, and the two concrete instances C([0,1]) with the
//! Faber–Schauder system and Lᵖ([0,1]) with the p-normalized Haar system.

mod fs;
mod haar;
mod piecewise;
mod xi;

pub use fs::{
    delta_square_name, dsq_query, dsq_to_xi, dsq_value, fs_active, fs_basis, fs_coeffs, fs_coeffs_of, fs_eval,
    fs_partial_sum, fs_partial_sum_eval, fs_separation, packing_certificate, pl_modulus, pl_modulus_fn, sup_error,
    xi_to_dsq, FaberSchauder, PackingCertificate, FS_ALPHA,
};
pub use haar::{
    approx_check, chi_expand, haar_active, haar_coeffs, haar_coeffs_of, haar_eval, haar_integral, haar_sum_integral,
    haar_unit_norm, lp_modulus, lp_modulus_check, lp_modulus_fn, lp_name, lp_query, lp_to_xi, lp_value, smooth,
    xi_to_lp, HaarSystem, HaarValue,
};
pub use piecewise::{Piece, PiecewiseFn};
pub use xi::{
    banach_name, banach_norm, coeff_query, norm_answer, norm_query, parse_xi_query, xi_coefficient, BanachNorm,
    BanachParams, VectorSum, XiQuery,
};

use crate::num::{Interval, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormKind {
    Sup,
    Lp(Q),
}

/// A normalized basis of a Banach space of functions on [0,1].
pub trait SchauderSystem: Send + Sync {
    fn label(&self) -> String;
    fn norm_kind(&self) -> NormKind;
    /// Enclosure of ‖Σ c_i b_i‖ whose width shrinks as `bits` grows.
    fn norm_enclosure(&self, coeffs: &[Q], bits: u32) -> Interval;
}
