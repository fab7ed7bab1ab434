//! Exact analysis of missingness mechanisms on finite full distributions.
//!
//! The crate works with a finite data space `Y`, a set of missingness patterns `R`
//! and exact rational probability tables on `Omega = Y x R`. On top of that it
//! decides whether a mechanism `g(r|y)` is constant on observable data events
//! (missing at random), builds the sup/inf observed-data mechanism, and checks the
//! consequences that follow from it by brute force.

pub mod cli;
pub mod distribution;
pub mod figure;
pub mod mar_analysis;
pub mod mechanism_lab;
pub mod model_file;
pub mod prob;
pub mod rng;
pub mod sample_space;

pub use distribution::{
    marginal_r, marginal_y, pattern_mixture_factorize, selection_factorize, DensityFamily,
    FullDensity, Marginal, Mechanism, PatternMixture, SelectionModel,
};
pub use prob::Prob;
pub use sample_space::{
    project_missing, project_observed, DataSpace, Level, MissingnessPattern, ObservableDataEvent,
    ObservedData, Omega, PatternSet, Point, Variable,
};
