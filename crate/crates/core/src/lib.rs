//! Descriptive classification of short social-media posts.
//!
//! The pipeline normalizes raw post text, grows per-category word corpora
//! from seed words over a synonym/antonym graph, weak-labels documents by
//! corpus hits, and trains one of three from-scratch classifiers (Naive
//! Bayes, maximum entropy, linear SVM) on those weak labels to assign every
//! document to a category.
//!
//! Classifier math is generic over the floating-point scalar via
//! [`scalar::Scalar`]; the `f64`-backed aliases below are what the pipeline
//! and CLI use.

pub mod classify;
pub mod defaults;
pub mod error;
pub mod features;
pub mod ingest;
pub mod lexicon;
pub mod normalize;
pub mod pipeline;
pub mod scalar;

pub use error::{Error, Result};

/// Concrete `f64` aliases for the scalar-generic classifier types.
pub type NbModelF64 = classify::NbModel<f64>;
pub type MaxEntModelF64 = classify::MaxEntModel<f64>;
pub type SvmModelF64 = classify::SvmModel<f64>;
pub type ModelF64 = classify::Model<f64>;
pub type TrainConfigF64 = classify::TrainConfig<f64>;

/// Concrete `f32` aliases.
pub type NbModelF32 = classify::NbModel<f32>;
pub type MaxEntModelF32 = classify::MaxEntModel<f32>;
pub type SvmModelF32 = classify::SvmModel<f32>;
pub type ModelF32 = classify::Model<f32>;
pub type TrainConfigF32 = classify::TrainConfig<f32>;
