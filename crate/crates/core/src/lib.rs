//! Numerical laboratory for the tipping point of a single self-attention head.
//!
//! A greedy decoder built on one attention head (identity Key/Query/Value,
//! unscaled dot-product scores) keeps emitting a Good token `G` until the
//! context vector swings toward a Bad token `B`. The iteration at which that
//! happens is given in closed form by [`tipping::n_star_exact`]; the
//! simulator in [`attention`] reproduces it step by step.
//!
//! - [`geometry`]: embeddings, dot products, Gram-matrix realization, orthogonal padding
//! - [`attention`]: softmax, context vector, decoding loop
//! - [`tipping`]: exact and approximate `n*`, regime classification
//! - [`experiments`]: verification, sweeps, random scenarios, dynamics labels
//! - [`io`]: JSON scenarios and traces, CSV sweep tables

pub mod attention;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod io;
pub mod tipping;

pub use attention::{
    context_vector, decode_step, generate, softmax_row, CandidateSet, GenerationTrace, Scenario,
    StepRecord, TokenClass, VocabEntry,
};
pub use error::{Error, Result};
pub use geometry::{dot, orthogonal_pad, vectors_from_gram, Embedding, GramMatrix};
pub use tipping::{
    classify_regime, n_star_approx, n_star_exact, predicted_tip_index, NetMode, Regime,
    TippingPrediction,
};
