//! Exact core and balancedness decisions for TU games, including games over
//! the naturals on finite/cofinite coalitions.

pub mod core_solver;
pub mod error;
pub mod exact_lp;
pub mod game_model;
pub mod infinite_harness;
pub mod rational;
pub mod set_algebra;
pub mod witness_builder;

pub use error::{Error, Result};
pub use rational::Rational;
