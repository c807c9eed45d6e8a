//! Numerical laboratory for weighted Bergman spaces on planar domains and on
//! Hartogs domains built over them.
//!
//! Planar domains are discs minus finitely many closed discs and points. Kernels
//! come from Gram orthonormalization of polynomial and Laurent bases under an
//! adaptive quadrature; Hartogs kernels are assembled fiber by fiber.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod basis;
pub mod criteria;
pub mod dyadic;
pub mod error;
pub mod experiment;
pub mod gap_bounds;
pub mod geometry;
pub mod hartogs;
pub mod kernel;
pub mod linalg;
pub mod metric;
pub mod quadrature;

pub use error::{Error, Result};
pub use geometry::{
    dk_bound_check, neighborhood_gap_profile, signed_distance, tube_membership,
    zalcman_shrink_family, Component, Disc, FamilyRule, HartogsDomain, NeighborhoodFamily,
    PlanarDomain, SignedDistance, TubeDomain,
};

pub type C64 = num_complex::Complex64;
