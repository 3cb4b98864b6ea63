//! Simulation and verification tools for directed first-passage percolation
//! in the generalized Seppäläinen–Johansson model, where a Bernoulli switch
//! at every vertex puts weight on exactly one of its two incoming edges.

pub mod env;
pub mod error;
pub mod fpp;
pub mod lemma;
pub mod mc;
pub mod rng;
pub mod shape;
pub mod web;
pub mod weight;

pub use env::{
    sample_environment, sample_value, ArithmeticMode, DistributionSpec, Edge, EdgePair, EdgeWeights,
    EnvironmentConfig, Orientation, WeightEnvironment, WeightTable,
};
pub use error::{Error, Result};
pub use fpp::{
    brute_force_value, departure_point, entry_point, first_passage_between, first_passage_grid, geodesic,
    increments, passage_triple, Geodesic, IncrementGrids, StorageMode, ValueGrid, Variant,
};
pub use shape::ShapeCoefficients;
pub use weight::Weight;
