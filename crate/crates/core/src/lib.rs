//! Hardware-performance-counter malware detection toolkit.
//!
//! The crate covers the full batch pipeline: dataset ingestion and
//! synthesis, a zero-day family split, mutual-information feature
//! selection, seven classifiers behind one prediction contract, a
//! confusion-matrix/ROC metrics engine, and an abstract hardware cost
//! model for comparing inference datapaths.

pub mod cost;
pub mod dataset;
pub mod error;
pub mod feature_selection;
pub mod knn;
pub mod linear;
pub mod metrics;
pub mod mlp;
pub mod model;
pub mod rng;
pub mod rules;
pub mod tree;

pub use dataset::{Dataset, Family, HpcSample, Label};
pub use error::{Error, Result};
pub use model::{ModelType, Prediction, TrainedModel};
