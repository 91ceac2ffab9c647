//! prosoforge: a speech prosody toolkit.
//!
//! Converts read-style speech toward conversational delivery (pitch, tempo,
//! pause, and emphasis transforms), computes mel spectrograms and MFCCs,
//! vocodes mel spectrograms back to audio (Griffin-Lim or a small neural
//! generator trained with simultaneous-perturbation updates), and scores
//! converted speech against references with mel-cepstral distortion, pitch
//! contour distance, and duration error.

pub mod error;
pub mod mat;
pub mod signal;

pub mod cli;
pub mod dataset;
pub mod melspec;
pub mod metrics;
pub mod prosody;
pub mod rng;
pub mod synth;
pub mod vocoder;

pub use error::{Error, Result};
