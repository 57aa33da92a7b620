//! Exact verification of higher prequantum structures on polynomial data over ℚ.
//!
//! Forms and multivector fields live on a single coordinate patch with polynomial
//! coefficients. Every identity is checked with zero residual, either exhaustively on
//! finite-dimensional truncations or on seeded random samples. [`suites`] groups the
//! checks into named suites that produce a [`report::VerificationReport`].

pub mod bundle;
pub mod calculus;
pub mod cech;
pub mod complex;
pub mod config;
pub mod courant;
pub mod element;
pub mod extensions;
pub mod fd;
pub mod fiber;
pub mod forms;
pub mod kks_fiber;
pub mod lie;
pub mod linalg;
pub mod linfty;
pub mod observables;
pub mod perm;
pub mod poly;
pub mod quantomorphism;
pub mod rational;
pub mod report;
pub mod sample;
pub mod suites;

pub use forms::{Patch, PolyForm, PolyMultivector};
pub use poly::Poly;
pub use rational::Rational;
