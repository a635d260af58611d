//! Distributed detection with censoring sensors and randomised transmission
//! over Rayleigh-fading channels with correlated observation noise.

pub mod analysis;
pub mod composition;
pub mod config;
pub mod error;
pub mod experiment;
pub mod fusion;
pub mod gp;
pub mod gaussian;
pub mod model;
pub mod normal;
pub mod perf;
pub mod poly;
pub mod problem_o;
pub mod problem_s;
pub mod quadrature;
pub mod rng;
pub mod search;
pub mod workspace;

pub use error::{Error, Result};
