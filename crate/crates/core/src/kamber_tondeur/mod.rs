//! Numerical Kamber-Tondeur cochains of smooth families of invertible
//! complex matrices over `Delta^{2k}`.
//!
//! The integral runs over `Delta^{2k} x I` with the `u` direction as the
//! last coordinate. Derivatives of `h^u` in simplex directions use the
//! divided-difference formula in the eigenbasis of `h`.

mod checks;
mod cochain;
mod family;

pub use checks::{
    catalog_fixtures, kt_direct_sum_check, kt_involution_check, kt_self_consistency_check,
    kt_unitary_invariance_check, phase_unitary, random_unitary, scalar_fixtures, KT_TOL,
};
pub use cochain::{kt_cochain, KTValue, QuadratureSpec, CONDITION_CAP};
pub use family::{cmatrix_json, Catalog, CMatrix, Derivative, EdgeMatrix, MatrixFamily, C64};
