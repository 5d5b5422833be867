//! Supervised word sense disambiguation for Hindi lexical-sample tasks.
//!
//! The pipeline runs [`text`] tokenization, [`corpus`] loading and splitting,
//! [`features`] extraction over a ±j context window, per-word
//! [`classifier::NaiveBayesModel`] training, and [`eval`] scoring across a
//! method × window grid. [`cli`] wires these into the `hwsd` binary.

pub mod classifier;
pub mod cli;
pub mod corpus;
pub mod eval;
pub mod features;
pub mod synthetic;
pub mod text;

pub use classifier::{NaiveBayesModel, Prediction};
pub use corpus::{Corpus, CorpusStats, Instance, SenseId};
pub use eval::{EvaluationReport, MethodResult, Scores, SweepConfig};
pub use features::{FeatureAtom, FeatureSet, Method, MethodSpec, Resources, WindowSize};
pub use text::{Token, TokenSequence};
