//! Random regular graphs: uniform generation, local resampling by
//! switchings, Green's functions of graphs and of weighted tree extensions,
//! Kesten–McKay scalar functions, and local-law experiments.

pub mod error;
pub mod experiments;
pub mod graph;
pub mod green;
pub mod resample;
pub mod scalar;

pub use error::{Error, Result};
pub use graph::{Adjacency, DeficitGraph, Graph, Neighborhood, RegularGraph};
pub use scalar::SpectralParam;
