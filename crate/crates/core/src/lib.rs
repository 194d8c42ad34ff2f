pub mod curvature;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod generators;
pub mod graph;
pub mod io;
pub mod normalization;
pub mod pipeline;
pub mod sensitivity;
pub mod stats;
