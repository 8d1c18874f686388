//! Wavelet shrinkage denoising.
//!
//! The pipeline has three phases: decompose with [`wavedec`], shrink each
//! detail level with a threshold chosen from that level's coefficients and a
//! noise scale, then reconstruct with [`waverec`]. The approximation
//! coefficients pass through untouched.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dwt::{wavedec, waverec, Decomposition};
use crate::error::{Error, Result};
use crate::signal::Signal;
use crate::wavelet::get_wavelet;

/// Median absolute deviation of Gaussian noise relative to its standard deviation.
pub const MAD_TO_SIGMA: f64 = 0.6745;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdFn {
    Soft,
    Hard,
}

/// Threshold selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Minimizer of Stein's unbiased risk estimate.
    Rigrsure,
    /// Universal threshold `sqrt(2 ln M)`.
    Sqtwolog,
    /// Universal threshold for sparse levels, otherwise the smaller of
    /// SURE and universal.
    Heursure,
    /// Minimax-risk threshold.
    Minimax,
}

/// How the noise level is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rescale {
    /// No rescaling, sigma = 1.
    One,
    /// One estimate from the finest detail level, used for every level.
    Sln,
    /// An independent estimate for each level.
    Mln,
}

macro_rules! parse_enum {
    ($ty:ty, $what:literal, { $($s:literal => $v:expr),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($s => Ok($v),)+
                    other => Err(Error::InvalidParameter(format!(
                        concat!("unknown ", $what, " {:?}"), other
                    ))),
                }
            }
        }
    };
}

parse_enum!(ThresholdFn, "threshold function", { "soft" => ThresholdFn::Soft, "hard" => ThresholdFn::Hard });
parse_enum!(Rule, "threshold rule", {
    "rigrsure" => Rule::Rigrsure,
    "sqtwolog" => Rule::Sqtwolog,
    "heursure" => Rule::Heursure,
    "minimax" => Rule::Minimax,
});
parse_enum!(Rescale, "rescaling", { "one" => Rescale::One, "sln" => Rescale::Sln, "mln" => Rescale::Mln });

/// The five knobs of wavelet denoising.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenoiseParams {
    pub wavelet: String,
    pub threshold_fn: ThresholdFn,
    pub level: usize,
    pub rule: Rule,
    pub rescale: Rescale,
}

impl DenoiseParams {
    pub fn new(
        wavelet: &str,
        threshold_fn: ThresholdFn,
        level: usize,
        rule: Rule,
        rescale: Rescale,
    ) -> Self {
        Self {
            wavelet: wavelet.to_string(),
            threshold_fn,
            level,
            rule,
            rescale,
        }
    }
}

impl Default for DenoiseParams {
    fn default() -> Self {
        Self::new("db6", ThresholdFn::Soft, 3, Rule::Sqtwolog, Rescale::Sln)
    }
}

fn universal(m: usize) -> f64 {
    (2.0 * (m as f64).ln()).sqrt()
}

/// SURE-minimizing soft threshold for unit-variance coefficients.
fn sure_threshold(y: &[f64]) -> f64 {
    let n = y.len();
    let mut sq: Vec<f64> = y.iter().map(|v| v * v).collect();
    sq.sort_by(f64::total_cmp);
    let nf = n as f64;
    let mut cum = 0.0;
    let mut best = (f64::INFINITY, 0.0);
    for (i, &s) in sq.iter().enumerate() {
        cum += s;
        let k = (i + 1) as f64;
        let risk = (nf - 2.0 * k + cum + (nf - k) * s) / nf;
        if risk < best.0 {
            best = (risk, s);
        }
    }
    best.1.sqrt()
}

/// Threshold for one level of coefficients with noise scale `sigma`.
///
/// Data-driven rules (rigrsure, heursure) work on `coeffs / sigma` and scale
/// the result back; `sigma = 0` always yields 0.
pub fn threshold_value(coeffs: &[f64], rule: Rule, sigma: f64) -> Result<f64> {
    let m = coeffs.len();
    if m == 0 {
        return Err(Error::EmptyCoefficients);
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise scale must be finite and >= 0, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(0.0);
    }
    let unit = match rule {
        Rule::Sqtwolog => universal(m),
        Rule::Minimax => {
            if m > 32 {
                0.3936 + 0.1829 * (m as f64).log2()
            } else {
                0.0
            }
        }
        Rule::Rigrsure => {
            let y: Vec<f64> = coeffs.iter().map(|c| c / sigma).collect();
            sure_threshold(&y)
        }
        Rule::Heursure => {
            let y: Vec<f64> = coeffs.iter().map(|c| c / sigma).collect();
            let mf = m as f64;
            let energy: f64 = y.iter().map(|v| v * v).sum();
            let sparsity = (energy - mf) / mf;
            let critical = mf.log2().powf(1.5) / mf.sqrt();
            let univ = universal(m);
            if sparsity <= critical {
                univ
            } else {
                sure_threshold(&y).min(univ)
            }
        }
    };
    Ok(sigma * unit)
}

/// Soft: `sign(c) * max(|c| - t, 0)`. Hard: `c` when `|c| > t`, else 0.
pub fn apply_threshold(coeffs: &[f64], t: f64, f: ThresholdFn) -> Result<Vec<f64>> {
    if !(t >= 0.0) {
        return Err(Error::NegativeThreshold(t));
    }
    Ok(match f {
        ThresholdFn::Soft => coeffs
            .iter()
            .map(|&c| c.signum() * (c.abs() - t).max(0.0))
            .map(|v| if v == 0.0 { 0.0 } else { v })
            .collect(),
        ThresholdFn::Hard => coeffs
            .iter()
            .map(|&c| if c.abs() > t { c } else { 0.0 })
            .collect(),
    })
}

pub(crate) fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn mad_sigma(c: &[f64]) -> f64 {
    let abs: Vec<f64> = c.iter().map(|v| v.abs()).collect();
    median(&abs) / MAD_TO_SIGMA
}

/// Per-level noise scale, index 0 for `cD_1`.
pub fn noise_sigma(d: &Decomposition, rescale: Rescale) -> Vec<f64> {
    let levels = d.levels();
    match rescale {
        Rescale::One => vec![1.0; levels],
        Rescale::Sln => vec![d.detail(1).map(mad_sigma).unwrap_or(0.0); levels],
        Rescale::Mln => d.details.iter().map(|c| mad_sigma(c)).collect(),
    }
}

/// Thresholds actually applied per level by [`denoise`].
pub fn level_thresholds(d: &Decomposition, p: &DenoiseParams) -> Result<Vec<f64>> {
    noise_sigma(d, p.rescale)
        .iter()
        .zip(&d.details)
        .map(|(&s, c)| threshold_value(c, p.rule, s))
        .collect()
}

/// Shrink the detail levels of a decomposition in place.
pub fn shrink(d: &mut Decomposition, p: &DenoiseParams) -> Result<()> {
    let thr = level_thresholds(d, p)?;
    for (c, t) in d.details.iter_mut().zip(thr) {
        *c = apply_threshold(c, t, p.threshold_fn)?;
    }
    Ok(())
}

pub fn denoise_samples(x: &[f64], p: &DenoiseParams) -> Result<Vec<f64>> {
    let w = get_wavelet(&p.wavelet)?;
    let mut d = wavedec(x, &w, p.level)?;
    shrink(&mut d, p)?;
    waverec(&d)
}

/// Decompose, shrink details, reconstruct. Output has the input's length.
pub fn denoise(s: &Signal, p: &DenoiseParams) -> Result<Signal> {
    s.derive(denoise_samples(s.samples(), p)?, s.fs())
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

/// `10 log10(sum x^2 / sum (x - xhat)^2)` in dB.
pub fn snr(x: &[f64], xhat: &[f64]) -> Result<f64> {
    check_lengths(x, xhat)?;
    let num: f64 = x.iter().map(|v| v * v).sum();
    if num == 0.0 {
        return Err(Error::ZeroReference);
    }
    let den: f64 = x.iter().zip(xhat).map(|(a, b)| (a - b) * (a - b)).sum();
    if den == 0.0 {
        return Err(Error::IdenticalSignals);
    }
    Ok(10.0 * (num / den).log10())
}

pub fn mse(x: &[f64], xhat: &[f64]) -> Result<f64> {
    check_lengths(x, xhat)?;
    Ok(x.iter()
        .zip(xhat)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / x.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    /// `cD_7`
    Alpha,
    /// `cD_6`
    Beta,
}

impl Band {
    pub fn level(self) -> usize {
        match self {
            Band::Alpha => 7,
            Band::Beta => 6,
        }
    }
}

pub fn extract_band(d: &Decomposition, band: Band) -> Result<Vec<f64>> {
    let level = band.level();
    d.detail(level)
        .map(<[f64]>::to_vec)
        .ok_or(Error::InsufficientLevels {
            needed: level,
            got: d.levels(),
        })
}

/// Two candidates whose MSE differs by less than this fraction of the clean
/// signal's mean power count as tied.
pub const GRID_TIE_RTOL: f64 = 1e-9;

/// Exhaustive search for the parameters minimizing `mse(clean, denoise(noisy))`.
///
/// Candidates are evaluated in parallel. Among tied candidates the earliest
/// in `space` wins.
pub fn grid_search_params(
    clean: &Signal,
    noisy: &Signal,
    space: &[DenoiseParams],
) -> Result<(DenoiseParams, f64)> {
    if space.is_empty() {
        return Err(Error::EmptySpace);
    }
    check_lengths(clean.samples(), noisy.samples())?;
    let scores: Vec<f64> = space
        .par_iter()
        .map(|p| denoise_samples(noisy.samples(), p).and_then(|y| mse(clean.samples(), &y)))
        .collect::<Result<_>>()?;
    let power = clean.samples().iter().map(|v| v * v).sum::<f64>() / clean.len() as f64;
    let tol = GRID_TIE_RTOL * power.max(f64::MIN_POSITIVE);
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s < scores[best] - tol {
            best = i;
        }
    }
    Ok((space[best].clone(), scores[best]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(n: usize, sigma: f64, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                sigma * z
            })
            .collect::<Vec<f64>>()
    }

    // Direct evaluation of SURE(t) = M - 2 #{|y| <= t} + sum min(y^2, t^2)
    // at every candidate |y_k|, first minimum wins.
    fn sure_oracle(y: &[f64]) -> f64 {
        let m = y.len() as f64;
        let mut cands: Vec<f64> = y.iter().map(|v| v.abs()).collect();
        cands.sort_by(f64::total_cmp);
        let mut best = (f64::INFINITY, 0.0);
        for &t in &cands {
            let kept = y.iter().filter(|v| v.abs() <= t).count() as f64;
            let risk = m - 2.0 * kept + y.iter().map(|v| (v * v).min(t * t)).sum::<f64>();
            if risk < best.0 - 1e-12 {
                best = (risk, t);
            }
        }
        best.1
    }

    #[test]
    fn universal_threshold_values() {
        assert_eq!(threshold_value(&[5.0], Rule::Sqtwolog, 1.0).unwrap(), 0.0);
        let t = threshold_value(&vec![0.0; 1000], Rule::Sqtwolog, 1.0).unwrap();
        assert!((t - 3.7169).abs() < 1e-4, "{t}");
        assert!((t - (2.0 * 1000f64.ln()).sqrt()).abs() < 1e-15);
        let t2 = threshold_value(&vec![0.0; 1000], Rule::Sqtwolog, 2.5).unwrap();
        assert!((t2 - 2.5 * t).abs() < 1e-12);
        assert!(matches!(
            threshold_value(&[], Rule::Sqtwolog, 1.0),
            Err(Error::EmptyCoefficients)
        ));
        let mut last = 0.0;
        for m in 1..300 {
            let t = threshold_value(&vec![0.0; m], Rule::Sqtwolog, 1.0).unwrap();
            assert!(t >= last);
            last = t;
        }
    }

    #[test]
    fn sure_matches_exhaustive_oracle() {
        let y = [0.0, 0.0, 0.0, 1.0];
        assert_eq!(
            threshold_value(&y, Rule::Rigrsure, 1.0).unwrap(),
            sure_oracle(&y)
        );
        assert_eq!(sure_oracle(&y), 1.0);
        for seed in 0..20 {
            let mut v = noise(64, 1.0, seed);
            v[3] += 6.0;
            v[40] -= 9.0;
            let got = threshold_value(&v, Rule::Rigrsure, 1.0).unwrap();
            assert!((got - sure_oracle(&v)).abs() < 1e-12, "seed {seed}");
            // sigma rescales
            let scaled: Vec<f64> = v.iter().map(|c| 3.0 * c).collect();
            let got3 = threshold_value(&scaled, Rule::Rigrsure, 3.0).unwrap();
            assert!((got3 - 3.0 * got).abs() < 1e-9);
        }
    }

    #[test]
    fn heursure_and_minimax() {
        // pure noise is "sparse" by the energy test: universal threshold
        let v = noise(512, 1.0, 11);
        let h = threshold_value(&v, Rule::Heursure, 1.0).unwrap();
        assert_eq!(h, threshold_value(&v, Rule::Sqtwolog, 1.0).unwrap());
        // strong signal: min(SURE, universal)
        let mut s = noise(512, 1.0, 12);
        for c in s.iter_mut().take(200) {
            *c += 8.0;
        }
        let h = threshold_value(&s, Rule::Heursure, 1.0).unwrap();
        let expect = threshold_value(&s, Rule::Rigrsure, 1.0)
            .unwrap()
            .min(threshold_value(&s, Rule::Sqtwolog, 1.0).unwrap());
        assert_eq!(h, expect);
        assert_eq!(
            threshold_value(&[1.0; 32], Rule::Minimax, 1.0).unwrap(),
            0.0
        );
        let mm = threshold_value(&[1.0; 64], Rule::Minimax, 2.0).unwrap();
        assert!((mm - 2.0 * (0.3936 + 0.1829 * 6.0)).abs() < 1e-12);
        assert_eq!(threshold_value(&s, Rule::Rigrsure, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn shrinkage_rules() {
        assert_eq!(
            apply_threshold(&[3.0, -0.5, -3.0], 1.0, ThresholdFn::Soft).unwrap(),
            vec![2.0, 0.0, -2.0]
        );
        assert_eq!(
            apply_threshold(&[3.0, 0.5, -1.0], 1.0, ThresholdFn::Hard).unwrap(),
            vec![3.0, 0.0, 0.0]
        );
        let x = [1.5, -2.0, 0.0, 1e-9];
        assert_eq!(
            apply_threshold(&x, 0.0, ThresholdFn::Soft).unwrap(),
            x.to_vec()
        );
        assert_eq!(
            apply_threshold(&x, 0.0, ThresholdFn::Hard).unwrap(),
            vec![1.5, -2.0, 0.0, 1e-9]
        );
        assert!(matches!(
            apply_threshold(&x, -1.0, ThresholdFn::Soft),
            Err(Error::NegativeThreshold(_))
        ));
    }

    #[test]
    fn noise_scale_estimates() {
        let w = get_wavelet("db4").unwrap();
        let x = noise(4096, 1.0, 21);
        let d = wavedec(&x, &w, 4).unwrap();
        assert_eq!(noise_sigma(&d, Rescale::One), vec![1.0; 4]);
        let sln = noise_sigma(&d, Rescale::Sln);
        assert!((sln[0] - 1.0).abs() < 0.1, "{}", sln[0]);
        assert!(sln.iter().all(|&s| s == sln[0]));

        // detail levels with sigma doubling per level
        let mut d = wavedec(&noise(8192, 1.0, 22), &w, 4).unwrap();
        for (i, c) in d.details.iter_mut().enumerate() {
            let fresh = noise(c.len(), 2f64.powi(i as i32), 100 + i as u64);
            c.copy_from_slice(&fresh);
        }
        let mln = noise_sigma(&d, Rescale::Mln);
        for pair in mln.windows(2) {
            let r = pair[1] / pair[0];
            assert!((r - 2.0).abs() < 0.3, "ratio {r}");
        }
    }

    #[test]
    fn denoising_improves_snr() {
        let fs = 360.0;
        let n = 2048;
        let clean: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * 10.0 * i as f64 / fs).sin())
            .collect();
        // 5 dB input SNR
        let p_sig = clean.iter().map(|v| v * v).sum::<f64>() / n as f64;
        let sigma = (p_sig / 10f64.powf(0.5)).sqrt();
        let noisy: Vec<f64> = clean
            .iter()
            .zip(noise(n, sigma, 31))
            .map(|(a, b)| a + b)
            .collect();
        let s = Signal::new(noisy.clone(), fs).unwrap();
        let out = denoise(&s, &DenoiseParams::default()).unwrap();
        assert_eq!(out.len(), n);
        let before = snr(&clean, &noisy).unwrap();
        let after = snr(&clean, out.samples()).unwrap();
        assert!((before - 5.0).abs() < 0.5);
        assert!(after > before + 3.0, "{before} -> {after}");
    }

    #[test]
    fn constant_signal_is_fixed_point() {
        let s = Signal::new(vec![0.75; 512], 100.0).unwrap();
        let once = denoise(&s, &DenoiseParams::default()).unwrap();
        let twice = denoise(&once, &DenoiseParams::default()).unwrap();
        let rms = |a: &[f64], b: &[f64]| {
            (a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64).sqrt()
        };
        assert!(rms(s.samples(), once.samples()) < 1e-9);
        assert!(rms(once.samples(), twice.samples()) < 1e-9);
    }

    #[test]
    fn noiseless_input_passes_nearly_unchanged() {
        // piecewise-smooth, noise free: sln sigma is tiny, so is the damage
        let fs = 360.0;
        let x: Vec<f64> = (0..1024)
            .map(|i| {
                let t = i as f64 / fs;
                (2.0 * std::f64::consts::PI * 2.0 * t).sin() + 0.5
            })
            .collect();
        let s = Signal::new(x.clone(), fs).unwrap();
        let y = denoise(&s, &DenoiseParams::default()).unwrap();
        let err = y
            .samples()
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>();
        let ref_e = x.iter().map(|v| v * v).sum::<f64>();
        assert!((err / ref_e).sqrt() < 1e-6, "{}", (err / ref_e).sqrt());
    }

    #[test]
    fn level_out_of_range_propagates() {
        let s = Signal::new(vec![0.0; 64], 1.0).unwrap();
        let p = DenoiseParams {
            level: 9,
            ..DenoiseParams::default()
        };
        assert!(matches!(
            denoise(&s, &p),
            Err(Error::LevelOutOfRange { .. })
        ));
    }

    #[test]
    fn snr_examples() {
        assert!((snr(&[1.0, 2.0], &[0.0, 0.0]).unwrap()).abs() < 1e-12);
        assert!((snr(&[1.0, 1.0], &[1.0, 0.0]).unwrap() - 3.0103).abs() < 1e-4);
        assert!(matches!(
            snr(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::IdenticalSignals)
        ));
        assert!(matches!(
            snr(&[1.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            snr(&[0.0, 0.0], &[1.0, 2.0]),
            Err(Error::ZeroReference)
        ));
    }

    #[test]
    fn bands() {
        let w = get_wavelet("db8").unwrap();
        let x = noise(8192, 1.0, 41);
        let d = crate::dwt::wavedec_any_depth(&x, &w, 8, crate::dwt::Boundary::Symmetric).unwrap();
        assert_eq!(extract_band(&d, Band::Alpha).unwrap(), d.details[6]);
        assert_eq!(extract_band(&d, Band::Beta).unwrap(), d.details[5]);
        let d5 = wavedec(&x, &w, 5).unwrap();
        assert!(matches!(
            extract_band(&d5, Band::Alpha),
            Err(Error::InsufficientLevels { needed: 7, got: 5 })
        ));
    }

    fn space() -> Vec<DenoiseParams> {
        vec![
            DenoiseParams::new("db4", ThresholdFn::Soft, 3, Rule::Sqtwolog, Rescale::Sln),
            DenoiseParams::new("db6", ThresholdFn::Hard, 3, Rule::Sqtwolog, Rescale::Sln),
            DenoiseParams::new("sym4", ThresholdFn::Soft, 4, Rule::Rigrsure, Rescale::Mln),
            DenoiseParams::new("haar", ThresholdFn::Soft, 2, Rule::Minimax, Rescale::Sln),
        ]
    }

    #[test]
    fn grid_search_matches_brute_force() {
        let fs = 250.0;
        let clean: Vec<f64> = (0..1024)
            .map(|i| (2.0 * std::f64::consts::PI * 6.0 * i as f64 / fs).sin())
            .collect();
        let noisy: Vec<f64> = clean
            .iter()
            .zip(noise(1024, 0.4, 51))
            .map(|(a, b)| a + b)
            .collect();
        let c = Signal::new(clean.clone(), fs).unwrap();
        let n = Signal::new(noisy.clone(), fs).unwrap();
        let (best, score) = grid_search_params(&c, &n, &space()).unwrap();

        let mut oracle = (f64::INFINITY, 0);
        for (i, p) in space().iter().enumerate() {
            let y = denoise_samples(&noisy, p).unwrap();
            let m = clean
                .iter()
                .zip(&y)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                / 1024.0;
            if m < oracle.0 {
                oracle = (m, i);
            }
        }
        assert_eq!(best, space()[oracle.1]);
        assert!((score - oracle.0).abs() < 1e-15);
    }

    #[test]
    fn grid_search_ties_go_to_first() {
        let c = Signal::new(vec![2.0; 256], 100.0).unwrap();
        let (best, score) = grid_search_params(&c, &c, &space()).unwrap();
        assert_eq!(best, space()[0]);
        assert!(score < 1e-20);
        assert!(matches!(
            grid_search_params(&c, &c, &[]),
            Err(Error::EmptySpace)
        ));
    }
}
