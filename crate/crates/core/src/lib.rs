//! Biomedical signal processing toolkit.
//!
//! * [`signal`]: the [`Signal`] type, CSV ingestion, normalization, windowing,
//!   resampling and notch filtering.
//! * [`wavelet`]: orthogonal wavelet filter banks and scale/frequency helpers.
//! * [`dwt`]: multilevel decomposition and reconstruction.
//! * [`denoise`]: threshold selection, shrinkage, the denoising pipeline and
//!   quality metrics.
//! * [`timefreq`]: STFT, spectrograms, CWT scalograms and variance changepoints.
//! * [`encode`]: Gramian angular fields, recurrence plots, Markov transition
//!   fields, three-channel fusion and grayscale export.
//! * [`qrs`]: Pan-Tompkins R-peak detection.
//! * [`harness`]: k-NN classification, evaluation and the batch pipeline.
//! * [`synth`]: seeded synthetic test signals.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod denoise;
pub mod dwt;
pub mod encode;
mod error;
mod fsutil;
pub mod harness;
pub mod qrs;
pub mod signal;
pub mod synth;
pub mod timefreq;
pub mod wavelet;

pub use error::{Error, Result};
pub use signal::Signal;
