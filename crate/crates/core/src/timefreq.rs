//! Time-frequency maps and variance changepoints.
//!
//! Maps are stored with one row per frequency bin (STFT) or per scale (CWT)
//! and one column per time position.

use std::f64::consts::PI;
use std::fmt::Write as _;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{Signal, WindowSpec};
use crate::wavelet::pseudo_frequency_from_center;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Stft,
    Spectrogram,
    Cwt,
    Scalogram,
}

impl MapKind {
    pub fn name(self) -> &'static str {
        match self {
            MapKind::Stft => "stft",
            MapKind::Spectrogram => "spectrogram",
            MapKind::Cwt => "cwt",
            MapKind::Scalogram => "scalogram",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapValues {
    Complex(Array2<Complex64>),
    Real(Array2<f64>),
}

impl MapValues {
    pub fn dim(&self) -> (usize, usize) {
        match self {
            MapValues::Complex(m) => m.dim(),
            MapValues::Real(m) => m.dim(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeFrequencyMap {
    pub kind: MapKind,
    pub values: MapValues,
    /// Seconds, one entry per column.
    pub time_axis: Vec<f64>,
    /// Hz, one entry per row. For wavelet maps this is the pseudo-frequency
    /// of each scale.
    pub freq_axis: Vec<f64>,
    /// Scales in samples, one per row, for wavelet maps only.
    pub scales: Option<Vec<f64>>,
}

impl TimeFrequencyMap {
    /// `(rows, cols)`.
    pub fn dim(&self) -> (usize, usize) {
        self.values.dim()
    }

    /// Real view of the map: the map itself when real, `|z|` when complex.
    pub fn magnitude(&self) -> Array2<f64> {
        match &self.values {
            MapValues::Real(m) => m.clone(),
            MapValues::Complex(m) => m.mapv(|z| z.norm()),
        }
    }

    /// Whitespace-separated text matrix of [`Self::magnitude`], one row per line.
    pub fn to_text(&self) -> String {
        let m = self.magnitude();
        let mut out = String::new();
        for row in m.rows() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(" ")).expect("write to String");
        }
        out
    }
}

/// Short-time Fourier transform.
///
/// Frame `m` covers samples `m * hop .. m * hop + win`; all `win` DFT bins
/// are kept, bin `k` sitting at `k * fs / win` Hz. Partial trailing frames
/// are dropped. Time stamps are frame centers.
pub fn stft(s: &Signal, w: &WindowSpec, hop: usize) -> Result<TimeFrequencyMap> {
    let x = s.samples();
    let win = w.length;
    if win > x.len() {
        return Err(Error::WindowTooLong {
            window: win,
            len: x.len(),
        });
    }
    if hop == 0 {
        return Err(Error::InvalidParameter("hop must be >= 1".into()));
    }
    let frames = (x.len() - win) / hop + 1;
    let weights = w.weights();
    let fft = FftPlanner::new().plan_fft_forward(win);

    let columns: Vec<Vec<Complex64>> = (0..frames)
        .into_par_iter()
        .map(|m| {
            let mut buf: Vec<Complex64> = x[m * hop..m * hop + win]
                .iter()
                .zip(&weights)
                .map(|(v, g)| Complex64::new(v * g, 0.0))
                .collect();
            fft.process(&mut buf);
            buf
        })
        .collect();

    let mut values = Array2::<Complex64>::zeros((win, frames));
    for (m, col) in columns.iter().enumerate() {
        for (k, z) in col.iter().enumerate() {
            values[[k, m]] = *z;
        }
    }
    let fs = s.fs();
    Ok(TimeFrequencyMap {
        kind: MapKind::Stft,
        values: MapValues::Complex(values),
        time_axis: (0..frames)
            .map(|m| (m * hop) as f64 / fs + (win - 1) as f64 / (2.0 * fs))
            .collect(),
        freq_axis: (0..win).map(|k| k as f64 * fs / win as f64).collect(),
        scales: None,
    })
}

/// `|X|^2` of an STFT map.
pub fn spectrogram(m: &TimeFrequencyMap) -> Result<TimeFrequencyMap> {
    match (&m.kind, &m.values) {
        (MapKind::Stft, MapValues::Complex(v)) => Ok(TimeFrequencyMap {
            kind: MapKind::Spectrogram,
            values: MapValues::Real(v.mapv(|z| z.norm_sqr())),
            time_axis: m.time_axis.clone(),
            freq_axis: m.freq_axis.clone(),
            scales: None,
        }),
        _ => Err(Error::WrongKind {
            expected: MapKind::Stft.name(),
            got: m.kind.name(),
        }),
    }
}

/// Continuous mother wavelets, each with unit Gaussian envelope width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mother {
    /// Complex Morlet, `pi^(-1/4) e^(i w0 t) e^(-t^2/2)` with `w0 = 6`.
    Morlet,
    /// Negative normalized second derivative of a Gaussian.
    MexicanHat,
    /// First derivative of a Gaussian.
    GaussianDerivative,
}

/// Morlet carrier in radians per unit time.
pub const MORLET_W0: f64 = 6.0;

/// Envelope half-width, in units of the dilated time axis, beyond which the
/// mother wavelet is treated as zero.
pub const SUPPORT_HALF_WIDTH: f64 = 8.0;

impl Mother {
    pub fn eval(self, t: f64) -> Complex64 {
        let g = (-0.5 * t * t).exp();
        match self {
            Mother::Morlet => Complex64::from_polar(PI.powf(-0.25) * g, MORLET_W0 * t),
            Mother::MexicanHat => {
                Complex64::new(2.0 / (3f64.sqrt() * PI.powf(0.25)) * (1.0 - t * t) * g, 0.0)
            }
            Mother::GaussianDerivative => {
                Complex64::new(-(2.0f64).sqrt() / PI.powf(0.25) * t * g, 0.0)
            }
        }
    }

    /// Peak of the Fourier magnitude in cycles per unit time.
    pub fn center_frequency(self) -> f64 {
        match self {
            Mother::Morlet => MORLET_W0 / (2.0 * PI),
            Mother::MexicanHat => 2f64.sqrt() / (2.0 * PI),
            Mother::GaussianDerivative => 1.0 / (2.0 * PI),
        }
    }
}

fn validate_scales(scales: &[f64]) -> Result<()> {
    if scales.is_empty() {
        return Err(Error::EmptyScales);
    }
    if let Some(&a) = scales.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
        return Err(Error::NonPositiveScale(a));
    }
    Ok(())
}

/// Complex CWT by direct convolution. Scales are in samples; the signal is
/// zero outside its support.
pub fn cwt(s: &Signal, mother: Mother, scales: &[f64]) -> Result<TimeFrequencyMap> {
    validate_scales(scales)?;
    let x = s.samples();
    let n = x.len();
    let rows: Vec<Vec<Complex64>> = scales
        .par_iter()
        .map(|&a| {
            let half = (SUPPORT_HALF_WIDTH * a).floor() as isize;
            let norm = 1.0 / a.sqrt();
            // kernel[j] = conj(psi(t / a)) / sqrt(a) at t = j - half
            let kernel: Vec<Complex64> = (-half..=half)
                .map(|t| mother.eval(t as f64 / a).conj() * norm)
                .collect();
            (0..n as isize)
                .map(|tau| {
                    let lo = (tau - half).max(0);
                    let hi = (tau + half).min(n as isize - 1);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for t in lo..=hi {
                        acc += kernel[(t - tau + half) as usize] * x[t as usize];
                    }
                    acc
                })
                .collect()
        })
        .collect();

    let mut values = Array2::<Complex64>::zeros((scales.len(), n));
    for (r, row) in rows.iter().enumerate() {
        values
            .row_mut(r)
            .iter_mut()
            .zip(row)
            .for_each(|(d, v)| *d = *v);
    }
    let fs = s.fs();
    let fc = mother.center_frequency();
    Ok(TimeFrequencyMap {
        kind: MapKind::Cwt,
        values: MapValues::Complex(values),
        time_axis: (0..n).map(|i| i as f64 / fs).collect(),
        freq_axis: scales
            .iter()
            .map(|&a| pseudo_frequency_from_center(fc, a, fs))
            .collect::<Result<_>>()?,
        scales: Some(scales.to_vec()),
    })
}

/// `|CWT|`, one row per scale.
pub fn cwt_scalogram(s: &Signal, mother: Mother, scales: &[f64]) -> Result<TimeFrequencyMap> {
    let c = cwt(s, mother, scales)?;
    Ok(TimeFrequencyMap {
        kind: MapKind::Scalogram,
        values: MapValues::Real(c.magnitude()),
        ..c
    })
}

/// Row index of the largest value in each column.
pub fn ridge(m: &TimeFrequencyMap) -> Vec<usize> {
    let mag = m.magnitude();
    mag.axis_iter(Axis(1))
        .map(|col| {
            let mut best = 0;
            for (i, &v) in col.iter().enumerate() {
                if v > col[best] {
                    best = i;
                }
            }
            best
        })
        .collect()
}

/// Shortest segment a changepoint may create.
pub const MIN_SEGMENT: usize = 5;

/// Zero-mean Gaussian segment cost `-2 log L = n ln(sum x^2 / n)` (constants dropped).
fn segment_cost(prefix: &[f64], a: usize, b: usize) -> f64 {
    let n = (b - a) as f64;
    let ss = (prefix[b] - prefix[a]).max(f64::MIN_POSITIVE * n);
    n * (ss / n).ln()
}

/// Best split of `[a, b)`: `(index, log-likelihood gain)`.
fn best_split(prefix: &[f64], a: usize, b: usize) -> Option<(usize, f64)> {
    if b - a < 2 * MIN_SEGMENT {
        return None;
    }
    let whole = segment_cost(prefix, a, b);
    let mut best: Option<(usize, f64)> = None;
    for t in a + MIN_SEGMENT..=b - MIN_SEGMENT {
        let gain = 0.5 * (whole - segment_cost(prefix, a, t) - segment_cost(prefix, t, b));
        if best.is_none_or(|(_, g)| gain > g) {
            best = Some((t, gain));
        }
    }
    best
}

/// Variance changepoints of a zero-mean sequence by binary segmentation.
///
/// Each step splits the segment offering the largest likelihood gain, as
/// long as that gain is at least `ln N`. At most `k` splits are made. The
/// returned indices are the first samples of each new segment, sorted.
pub fn variance_changepoints(coeffs: &[f64], k: usize) -> Result<Vec<usize>> {
    let n = coeffs.len();
    if n < 4 {
        return Err(Error::TooShort { needed: 4, got: n });
    }
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in coeffs {
        prefix.push(prefix.last().unwrap() + v * v);
    }
    let penalty = (n as f64).ln();
    let mut bounds = vec![0, n];
    let mut out = Vec::new();
    while out.len() < k {
        let candidate = bounds
            .windows(2)
            .filter_map(|w| best_split(&prefix, w[0], w[1]))
            .fold(None, |acc: Option<(usize, f64)>, c| match acc {
                Some(a) if a.1 >= c.1 => Some(a),
                _ => Some(c),
            });
        match candidate {
            Some((t, gain)) if gain >= penalty => {
                out.push(t);
                let pos = bounds.partition_point(|&b| b < t);
                bounds.insert(pos, t);
            }
            _ => break,
        }
    }
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::WindowKind;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gauss(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    fn rect(len: usize) -> WindowSpec {
        WindowSpec::new(WindowKind::Rectangular, len).unwrap()
    }

    fn naive_dft(x: &[f64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(i, &v)| Complex64::from_polar(v, -2.0 * PI * (k * i) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn stft_matches_naive_dft() {
        let x = gauss(300, 1);
        let s = Signal::new(x.clone(), 100.0).unwrap();
        let w = WindowSpec::new(WindowKind::Hann, 64).unwrap();
        let m = stft(&s, &w, 20).unwrap();
        assert_eq!(m.dim(), (64, (300 - 64) / 20 + 1));
        assert_eq!(m.time_axis.len(), m.dim().1);
        assert_eq!(m.freq_axis.len(), 64);
        let MapValues::Complex(v) = &m.values else {
            panic!()
        };
        let g = w.weights();
        for frame in [0, 5, 11] {
            let seg: Vec<f64> = (0..64).map(|i| x[frame * 20 + i] * g[i]).collect();
            for (k, z) in naive_dft(&seg).iter().enumerate() {
                assert!((v[[k, frame]] - z).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn stft_examples() {
        let s = Signal::new(vec![2.0; 128], 8.0).unwrap();
        let m = stft(&s, &rect(32), 16).unwrap();
        let mag = m.magnitude();
        for col in mag.columns() {
            assert!((col[0] - 64.0).abs() < 1e-9);
            assert!(col.iter().skip(1).all(|v| *v < 1e-9));
        }
        let j = 5;
        let x: Vec<f64> = (0..256)
            .map(|i| (2.0 * PI * j as f64 * i as f64 / 32.0).cos())
            .collect();
        let m = stft(&Signal::new(x, 1.0).unwrap(), &rect(32), 8).unwrap();
        for col in m.magnitude().columns() {
            let argmax = (0..16).max_by(|&a, &b| col[a].total_cmp(&col[b])).unwrap();
            assert_eq!(argmax, j);
        }
        assert!(matches!(
            stft(&Signal::new(vec![0.0; 10], 1.0).unwrap(), &rect(11), 1),
            Err(Error::WindowTooLong {
                window: 11,
                len: 10
            })
        ));
    }

    #[test]
    fn parseval_with_rectangular_tiles() {
        let x = gauss(1000, 2);
        let win = 64;
        let m = stft(&Signal::new(x.clone(), 1.0).unwrap(), &rect(win), win).unwrap();
        let sp = spectrogram(&m).unwrap();
        let covered = m.dim().1 * win;
        let lhs = sp.magnitude().sum() / win as f64;
        let rhs: f64 = x[..covered].iter().map(|v| v * v).sum();
        assert!(((lhs - rhs) / rhs).abs() < 1e-6);
    }

    #[test]
    fn spectrogram_examples() {
        let mut v = Array2::<Complex64>::zeros((2, 2));
        v[[1, 0]] = Complex64::new(3.0, 4.0);
        let m = TimeFrequencyMap {
            kind: MapKind::Stft,
            values: MapValues::Complex(v),
            time_axis: vec![0.0, 1.0],
            freq_axis: vec![0.0, 1.0],
            scales: None,
        };
        let sp = spectrogram(&m).unwrap();
        let r = sp.magnitude();
        assert_eq!(r[[1, 0]], 25.0);
        assert_eq!(r.sum(), 25.0);
        let sc = cwt_scalogram(
            &Signal::new(vec![1.0; 16], 1.0).unwrap(),
            Mother::MexicanHat,
            &[1.0],
        )
        .unwrap();
        assert!(matches!(
            spectrogram(&sc),
            Err(Error::WrongKind {
                expected: "stft",
                got: "scalogram"
            })
        ));
    }

    fn tone(f: f64, fs: f64, n: usize) -> Signal {
        Signal::new(
            (0..n)
                .map(|i| (2.0 * PI * f * i as f64 / fs).sin())
                .collect(),
            fs,
        )
        .unwrap()
    }

    fn central_ridge(m: &TimeFrequencyMap) -> usize {
        let r = ridge(m);
        let mid = &r[r.len() / 4..3 * r.len() / 4];
        let mut counts = std::collections::BTreeMap::new();
        for &i in mid {
            *counts.entry(i).or_insert(0) += 1;
        }
        counts.into_iter().max_by_key(|&(_, c)| c).unwrap().0
    }

    #[test]
    fn morlet_ridge_tracks_pseudo_frequency() {
        let fs = 360.0;
        let scales: Vec<f64> = (20..=50).map(|a| a as f64).collect();
        let m = cwt_scalogram(&tone(10.0, fs, 1440), Mother::Morlet, &scales).unwrap();
        let row = central_ridge(&m);
        // scale whose pseudo-frequency is nearest 10 Hz
        let fc = Mother::Morlet.center_frequency();
        let target = (0..scales.len())
            .min_by(|&a, &b| {
                let fa = (fc * fs / scales[a] - 10.0).abs();
                let fb = (fc * fs / scales[b] - 10.0).abs();
                fa.total_cmp(&fb)
            })
            .unwrap();
        assert!(row.abs_diff(target) <= 1, "ridge {row} target {target}");
        assert!((m.freq_axis[target] - 10.0).abs() < 0.5);
    }

    #[test]
    fn scalogram_properties() {
        let x = gauss(256, 3);
        let s = Signal::new(x.clone(), 1.0).unwrap();
        let scales = [1.0, 2.5, 4.0, 9.0];
        for mother in [
            Mother::Morlet,
            Mother::MexicanHat,
            Mother::GaussianDerivative,
        ] {
            let a = cwt_scalogram(&s, mother, &scales).unwrap();
            let sx = Signal::new(x.iter().map(|v| -3.0 * v).collect(), 1.0).unwrap();
            let b = cwt_scalogram(&sx, mother, &scales).unwrap();
            let (ma, mb) = (a.magnitude(), b.magnitude());
            assert!(ma.iter().all(|v| *v >= 0.0));
            assert_eq!(a.dim(), (4, 256));
            for (p, q) in ma.iter().zip(mb.iter()) {
                assert!((3.0 * p - q).abs() < 1e-9 * (1.0 + q));
            }
        }
        assert!(matches!(
            cwt_scalogram(&s, Mother::Morlet, &[]),
            Err(Error::EmptyScales)
        ));
        assert!(matches!(
            cwt_scalogram(&s, Mother::Morlet, &[1.0, 0.0]),
            Err(Error::NonPositiveScale(_))
        ));
    }

    #[test]
    fn ridge_scale_covariance() {
        let fs = 200.0;
        let scales: Vec<f64> = (8..=30).map(|a| a as f64).collect();
        let doubled: Vec<f64> = scales.iter().map(|a| 2.0 * a).collect();
        for mother in [Mother::Morlet, Mother::MexicanHat] {
            let fc = mother.center_frequency();
            let f = fc * fs / 15.0;
            let r1 = central_ridge(&cwt_scalogram(&tone(f, fs, 1600), mother, &scales).unwrap());
            let r2 =
                central_ridge(&cwt_scalogram(&tone(f / 2.0, fs, 3200), mother, &doubled).unwrap());
            assert_eq!(r1, r2, "{mother:?}");
        }
    }

    #[test]
    fn mothers_are_unit_energy_and_centered() {
        for mother in [
            Mother::Morlet,
            Mother::MexicanHat,
            Mother::GaussianDerivative,
        ] {
            let dt = 1e-3;
            let e: f64 = (-10_000..=10_000)
                .map(|i| mother.eval(i as f64 * dt).norm_sqr() * dt)
                .sum();
            assert!((e - 1.0).abs() < 1e-3, "{mother:?} {e}");
            // Fourier magnitude at fc beats its neighbours
            let spectrum = |f: f64| -> f64 {
                (-10_000..=10_000)
                    .map(|i| {
                        let t = i as f64 * dt;
                        mother.eval(t) * Complex64::from_polar(dt, -2.0 * PI * f * t)
                    })
                    .sum::<Complex64>()
                    .norm()
            };
            let fc = mother.center_frequency();
            assert!(spectrum(fc) > spectrum(fc * 0.95) && spectrum(fc) > spectrum(fc * 1.05));
        }
    }

    fn switch(n: usize, seed: u64) -> Vec<f64> {
        gauss(n, seed)
            .into_iter()
            .enumerate()
            .map(|(i, v)| if i < n / 2 { v } else { 5.0 * v })
            .collect()
    }

    #[test]
    fn changepoint_examples() {
        let cp = variance_changepoints(&switch(2048, 7), 1).unwrap();
        assert_eq!(cp.len(), 1);
        assert!(cp[0].abs_diff(1024) <= 102, "{cp:?}");
        assert!(variance_changepoints(&gauss(2048, 8), 1)
            .unwrap()
            .is_empty());
        assert!(variance_changepoints(&switch(2048, 7), 0)
            .unwrap()
            .is_empty());
        assert!(matches!(
            variance_changepoints(&[1.0, 2.0, 3.0], 1),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn changepoints_multiple_segments() {
        let mut x = gauss(3000, 9);
        for v in &mut x[1000..2000] {
            *v *= 6.0;
        }
        let cp = variance_changepoints(&x, 5).unwrap();
        assert!(cp.len() >= 2);
        assert!(cp.windows(2).all(|w| w[0] < w[1]));
        assert!(cp.iter().any(|&c| c.abs_diff(1000) < 50));
        assert!(cp.iter().any(|&c| c.abs_diff(2000) < 50));
        assert!(cp.iter().all(|&c| c > 0 && c < 3000));
    }

    #[test]
    fn text_export() {
        let m = TimeFrequencyMap {
            kind: MapKind::Spectrogram,
            values: MapValues::Real(ndarray::arr2(&[[0.0, 1.5], [2.0, 3.0]])),
            time_axis: vec![0.0, 1.0],
            freq_axis: vec![0.0, 1.0],
            scales: None,
        };
        assert_eq!(m.to_text(), "0 1.5\n2 3\n");
    }
}
