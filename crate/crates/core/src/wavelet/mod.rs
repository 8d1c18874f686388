//! Orthogonal wavelet filter banks.
//!
//! Every shipped wavelet is defined by its decomposition low-pass filter; the
//! other three filters follow from it:
//!
//! * `rec_lo[n] = dec_lo[nw - 1 - n]`
//! * `dec_hi[n] = (-1)^(n + 1) * rec_lo[n]` (alternating flip)
//! * `rec_hi[n] = dec_hi[nw - 1 - n]`

mod tables;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Orthogonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveletSpec {
    pub name: String,
    pub dec_lo: Vec<f64>,
    pub dec_hi: Vec<f64>,
    pub rec_lo: Vec<f64>,
    pub rec_hi: Vec<f64>,
    pub family: Family,
}

impl WaveletSpec {
    /// Build the full orthogonal bank from a decomposition low-pass filter.
    pub fn orthogonal(name: impl Into<String>, dec_lo: &[f64]) -> Self {
        let nw = dec_lo.len();
        let rec_lo: Vec<f64> = dec_lo.iter().rev().copied().collect();
        let dec_hi: Vec<f64> = (0..nw)
            .map(|n| if n % 2 == 0 { -rec_lo[n] } else { rec_lo[n] })
            .collect();
        let rec_hi = dec_hi.iter().rev().copied().collect();
        Self {
            name: name.into(),
            dec_lo: dec_lo.to_vec(),
            dec_hi,
            rec_lo,
            rec_hi,
            family: Family::Orthogonal,
        }
    }

    /// Filter length in taps.
    pub fn nw(&self) -> usize {
        self.dec_lo.len()
    }
}

const REGISTRY: &[(&str, &[f64])] = &[
    ("haar", &tables::HAAR),
    ("db2", &tables::DB2),
    ("db3", &tables::DB3),
    ("db4", &tables::DB4),
    ("db5", &tables::DB5),
    ("db6", &tables::DB6),
    ("db7", &tables::DB7),
    ("db8", &tables::DB8),
    ("db9", &tables::DB9),
    ("db10", &tables::DB10),
    ("sym2", &tables::SYM2),
    ("sym3", &tables::SYM3),
    ("sym4", &tables::SYM4),
    ("sym5", &tables::SYM5),
    ("sym6", &tables::SYM6),
    ("sym7", &tables::SYM7),
    ("sym8", &tables::SYM8),
];

/// Names accepted by [`get_wavelet`], in registry order.
pub fn wavelet_names() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().map(|(n, _)| *n)
}

pub fn get_wavelet(name: &str) -> Result<WaveletSpec> {
    let key = name.trim().to_ascii_lowercase();
    REGISTRY
        .iter()
        .find(|(n, _)| *n == key)
        .map(|(n, taps)| WaveletSpec::orthogonal(*n, taps))
        .ok_or_else(|| Error::UnknownWavelet(name.to_string()))
}

/// Number of cascade iterations used to approximate the wavelet function.
pub const CASCADE_DEPTH: u32 = 8;

/// Sampled wavelet function `psi` after [`CASCADE_DEPTH`] synthesis
/// iterations, together with the length of its support (in units of the
/// undilated wavelet). One zero is prepended, and trailing zeros pad the
/// grid to `(nw - 1) * 2^depth + 1` points.
pub fn wavelet_function(w: &WaveletSpec) -> (Vec<f64>, f64) {
    let p = 1usize << CASCADE_DEPTH;
    let nw = w.nw();
    let mut psi = upsample_full(&[(2f64).powf(CASCADE_DEPTH as f64 / 2.0)], &w.rec_hi);
    for _ in 1..CASCADE_DEPTH {
        psi = upsample_full(&psi, &w.rec_lo);
    }
    let keep = psi.len();
    let out_len = ((nw - 1) * p + 1).max(keep + 2);
    let mut grid = Vec::with_capacity(out_len);
    grid.push(0.0);
    grid.extend_from_slice(&psi);
    grid.resize(out_len, 0.0);
    let domain = (out_len - 1) as f64 / p as f64;
    (grid, domain)
}

/// Insert zeros between samples, then full convolution with `f`.
fn upsample_full(x: &[f64], f: &[f64]) -> Vec<f64> {
    let n = 2 * x.len() + f.len() - 2;
    let mut out = vec![0.0; n];
    for (k, &c) in x.iter().enumerate() {
        for (j, &h) in f.iter().enumerate() {
            out[2 * k + j] += c * h;
        }
    }
    out
}

/// Dominant frequency of the wavelet function, in cycles per unit of
/// the undilated wavelet's time axis.
///
/// The wavelet is refined by [`CASCADE_DEPTH`] cascade iterations and the
/// frequency of its largest non-DC spectral bin is returned, folded into the
/// lower half of the spectrum.
pub fn center_frequency(w: &WaveletSpec) -> f64 {
    let (psi, domain) = wavelet_function(w);
    let len = psi.len();
    let mut buf: Vec<Complex64> = psi.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let mut best = 1;
    for k in 2..len {
        if buf[k].norm() > buf[best].norm() {
            best = k;
        }
    }
    let bin = if (best + 1) as f64 > len as f64 / 2.0 {
        len - best
    } else {
        best
    };
    bin as f64 / domain
}

/// Pseudo-frequency in Hz of scale `a` for a wavelet with normalized center
/// frequency `fc`: `fc * fs / a`.
pub fn pseudo_frequency_from_center(fc: f64, scale: f64, fs: f64) -> Result<f64> {
    if !(scale > 0.0) {
        return Err(Error::NonPositiveScale(scale));
    }
    Ok(fc * fs / scale)
}

/// Pseudo-frequency in Hz of scale `a`. With `fs = 1` this is the
/// normalized form `fc / a`.
pub fn pseudo_frequency(w: &WaveletSpec, scale: f64, fs: f64) -> Result<f64> {
    pseudo_frequency_from_center(center_frequency(w), scale, fs)
}
