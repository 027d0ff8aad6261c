//! Numerical toolkit for weighted nonisotropic potential theory on the unit
//! sphere of C^n.
//!
//! Everything is built on a quadrature grid for the normalized surface
//! measure: A_p weights and doubling orders, Riesz and Cauchy potentials,
//! (s,p)-energies, Wolff potentials, Riesz capacities solved as convex
//! programs, holomorphic Hardy–Sobolev / Triebel–Lizorkin norms, and Carleson
//! embedding constants for measures on the ball. The point of the crate is to
//! compute *both* sides of the classical two-sided estimates and report the
//! observed constants.
//!
//! Dimensions n = 1 and n = 2 are supported; grids are immutable after
//! construction and everything is safe to share across threads. Reductions
//! are ordered deterministically, so outputs are reproducible bit-for-bit for
//! a fixed seed and configuration regardless of thread count
//! (`RAYON_NUM_THREADS` caps the worker pool).

pub mod capacity;
pub mod carleson;
pub mod error;
pub mod holo;
pub mod norms;
pub mod potential;
pub mod report;
pub mod sphere;
pub mod weights;

pub use error::{PotlabError, Result};
