//! Pairings against the moduli space of hat bundles: torus restriction,
//! split Chern polynomials, Berezin integration, iterated residues, and the
//! two residue formulas built from them.

mod berezin;
mod diag;
mod pairing;
mod residue;
mod split;
mod weights;

pub use berezin::{berezin_integral, Berezin, BerezinSign};
pub use diag::{closed_form_check, closed_form_log, dvandermonde_jacobian_check};
pub use pairing::{pairing_thm_10_2, pairing_thm_10_3, PairingOptions, Thm103Input};
pub use residue::{iterated_residue, LinearForm, ResidueExpr, ResidueTerm};
pub use split::{
    degree_shift_factor, denominator_expand, hat_images, open_split_ring, root_poly, s_inverse, s_series, split_chern_poly,
    split_chern_poly_in, split_log_in, split_pair_ring, torus_restrict_hat, torus_restrict_series, SplitHatRing,
};
pub use weights::{c_hat, fundamental_domain, positive_roots, split_degrees, torus_coordinates, weyl_group, WeightVector};

use thiserror::Error;

use crate::exactalg::AlgError;
use crate::relgen::RelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PairingError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("hat rank and degree must be coprime, got ({nh}, {dh})")]
    NotCoprime { nh: i64, dh: i64 },
    #[error("η involves the generator {0}; only â_r and b̂_r^j are allowed")]
    FGenerator(String),
    #[error("expression has an unbounded principal part")]
    EssentialSingularity,
    #[error("Vandermonde denominator fails to clear")]
    DenominatorNotCleared,
    #[error("cap: {0}")]
    Cap(String),
    #[error("ε_2 must be nonzero")]
    ZeroEpsilon,
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error(transparent)]
    Rel(#[from] RelError),
}

#[cfg(test)]
mod tests;
