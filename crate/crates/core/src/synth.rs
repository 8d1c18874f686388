//! Seeded synthetic signals with known ground truth.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};

/// The generator every seeded routine in this crate uses.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sine(freq: f64, fs: f64, n: usize, amplitude: f64, phase: f64) -> Vec<f64> {
    (0..n)
        .map(|i| amplitude * (2.0 * PI * freq * i as f64 / fs + phase).sin())
        .collect()
}

/// Linear chirp sweeping `f0 -> f1` Hz over `n` samples.
pub fn chirp(f0: f64, f1: f64, fs: f64, n: usize, amplitude: f64, phase: f64) -> Vec<f64> {
    let duration = n as f64 / fs;
    let rate = (f1 - f0) / duration;
    (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            amplitude * (2.0 * PI * (f0 * t + 0.5 * rate * t * t) + phase).sin()
        })
        .collect()
}

pub fn white_noise(n: usize, sigma: f64, rng: &mut impl Rng) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            sigma * z
        })
        .collect()
}

/// Noise standard deviation giving `snr_db` relative to the mean power of `x`.
pub fn noise_sigma_for_snr(x: &[f64], snr_db: f64) -> f64 {
    let power = x.iter().map(|v| v * v).sum::<f64>() / x.len().max(1) as f64;
    (power / 10f64.powf(snr_db / 10.0)).sqrt()
}

/// `x` plus white Gaussian noise at the given SNR.
pub fn add_noise(x: &[f64], snr_db: f64, rng: &mut impl Rng) -> Vec<f64> {
    let sigma = noise_sigma_for_snr(x, snr_db);
    x.iter()
        .zip(white_noise(x.len(), sigma, rng))
        .map(|(a, b)| a + b)
        .collect()
}

/// Zero-mean Gaussian noise whose standard deviation switches from
/// `sigma_before` to `sigma_after` at sample `at`.
pub fn variance_switch(
    n: usize,
    at: usize,
    sigma_before: f64,
    sigma_after: f64,
    rng: &mut impl Rng,
) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let z: f64 = StandardNormal.sample(rng);
            z * if i < at { sigma_before } else { sigma_after }
        })
        .collect()
}

/// One Gaussian bump of a heartbeat template, relative to the R wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wave {
    pub offset_s: f64,
    pub amplitude: f64,
    pub width_s: f64,
}

/// P, Q, R, S and T waves.
pub const PQRST: [Wave; 5] = [
    Wave {
        offset_s: -0.20,
        amplitude: 0.15,
        width_s: 0.025,
    },
    Wave {
        offset_s: -0.025,
        amplitude: -0.15,
        width_s: 0.010,
    },
    Wave {
        offset_s: 0.0,
        amplitude: 1.0,
        width_s: 0.012,
    },
    Wave {
        offset_s: 0.025,
        amplitude: -0.25,
        width_s: 0.010,
    },
    Wave {
        offset_s: 0.25,
        amplitude: 0.30,
        width_s: 0.040,
    },
];

#[derive(Debug, Clone, PartialEq)]
pub struct PulseTrain {
    pub samples: Vec<f64>,
    /// Sample index of every R wave.
    pub r_peaks: Vec<usize>,
}

/// ECG-like pulse train: one [`PQRST`] beat every `60 / bpm` seconds, the
/// first R wave half an interval in. `rr_jitter` is the standard deviation of
/// beat-to-beat interval changes as a fraction of the interval.
pub fn ecg_pulse_train(
    bpm: f64,
    fs: f64,
    duration_s: f64,
    rr_jitter: f64,
    rng: &mut impl Rng,
) -> Result<PulseTrain> {
    if !(bpm > 0.0 && fs > 0.0 && duration_s > 0.0 && rr_jitter >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "pulse train needs positive bpm, fs and duration, got {bpm}, {fs}, {duration_s}"
        )));
    }
    let n = (duration_s * fs).round() as usize;
    let rr = 60.0 / bpm;
    let jitter = Normal::new(0.0, rr_jitter * rr).expect("finite, nonnegative deviation");
    let mut samples = vec![0.0; n];
    let mut r_peaks = Vec::new();
    let mut t = 0.5 * rr;
    while t + PQRST[4].offset_s + 3.0 * PQRST[4].width_s < duration_s {
        let r = (t * fs).round() as usize;
        r_peaks.push(r);
        for w in PQRST {
            let center = r as f64 / fs + w.offset_s;
            let reach = (4.0 * w.width_s * fs).ceil() as isize;
            let c = (center * fs).round() as isize;
            for i in (c - reach).max(0)..(c + reach + 1).min(n as isize) {
                let dt = i as f64 / fs - center;
                samples[i as usize] += w.amplitude * (-0.5 * (dt / w.width_s).powi(2)).exp();
            }
        }
        t += (rr + jitter.sample(rng)).max(0.3 * rr);
    }
    Ok(PulseTrain { samples, r_peaks })
}

/// Two-class set of noisy fixed-frequency sines and noisy linear chirps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineChirpSpec {
    pub per_class: usize,
    pub fs: f64,
    pub len: usize,
    pub sine_hz: f64,
    pub chirp_from_hz: f64,
    pub chirp_to_hz: f64,
    pub snr_db: f64,
}

impl Default for SineChirpSpec {
    fn default() -> Self {
        Self {
            per_class: 100,
            fs: 100.0,
            len: 256,
            sine_hz: 5.0,
            chirp_from_hz: 1.0,
            chirp_to_hz: 15.0,
            snr_db: 10.0,
        }
    }
}

/// Records labelled `sine` and `chirp`, each with a uniformly random phase
/// and an amplitude in `[0.8, 1.2]`, interleaved sine, chirp, sine, ...
pub fn sine_chirp_dataset(spec: &SineChirpSpec, seed: u64) -> Result<Vec<crate::Signal>> {
    let mut g = rng(seed);
    let mut out = Vec::with_capacity(2 * spec.per_class);
    for i in 0..spec.per_class {
        for label in ["sine", "chirp"] {
            let phase = g.random_range(0.0..2.0 * PI);
            let amp = g.random_range(0.8..1.2);
            let clean = match label {
                "sine" => sine(spec.sine_hz, spec.fs, spec.len, amp, phase),
                _ => chirp(
                    spec.chirp_from_hz,
                    spec.chirp_to_hz,
                    spec.fs,
                    spec.len,
                    amp,
                    phase,
                ),
            };
            let noisy = add_noise(&clean, spec.snr_db, &mut g);
            out.push(crate::Signal::with_meta(
                noisy,
                spec.fs,
                format!("{label}-{i:04}"),
                Some(label.to_string()),
            )?);
        }
    }
    Ok(out)
}
