//! Uniformly sampled signals and the preprocessing shared by every other
//! module: ingestion, min-max rescaling, windowing, resampling by two and
//! line-noise removal.

mod filter;
mod io;
mod window;

pub use filter::{filtfilt_cascade, notch_filter, Biquad};
pub use io::{load_csv, write_csv};
pub use window::{WindowKind, WindowSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniformly sampled, finite, real-valued waveform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    samples: Vec<f64>,
    fs: f64,
    id: String,
    label: Option<String>,
}

impl Signal {
    pub fn new(samples: Vec<f64>, fs: f64) -> Result<Self> {
        Self::with_meta(samples, fs, String::new(), None)
    }

    pub fn with_meta(
        samples: Vec<f64>,
        fs: f64,
        id: impl Into<String>,
        label: Option<String>,
    ) -> Result<Self> {
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::InvalidSignal(format!(
                "sampling rate must be positive, got {fs}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::InvalidSignal("no samples".into()));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSignal(format!(
                "sample {i} is not finite ({})",
                samples[i]
            )));
        }
        Ok(Self {
            samples,
            fs,
            id: id.into(),
            label,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }

    /// Same metadata, new samples and rate. Re-validates the samples.
    pub fn derive(&self, samples: Vec<f64>, fs: f64) -> Result<Self> {
        Self::with_meta(samples, fs, self.id.clone(), self.label.clone())
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn with_label(mut self, label: Option<String>) -> Self {
        self.label = label;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormRange {
    NegOneOne,
    ZeroOne,
}

/// Min-max rescaling onto `[-1, 1]` or `[0, 1]`.
///
/// For `NegOneOne` the map is `((x - max) + (x - min)) / (max - min)`, which
/// sends the minimum to exactly -1 and the maximum to exactly +1.
pub fn normalize_minmax(s: &Signal, range: NormRange) -> Result<Signal> {
    let out = normalize_samples(s.samples(), range)?;
    s.derive(out, s.fs())
}

pub fn normalize_samples(x: &[f64], range: NormRange) -> Result<Vec<f64>> {
    let (min, max) = min_max(x).ok_or(Error::EmptyInput)?;
    let span = max - min;
    if span <= 0.0 {
        return Err(Error::DegenerateRange);
    }
    let out = match range {
        NormRange::NegOneOne => x
            .iter()
            .map(|&v| (((v - max) + (v - min)) / span).clamp(-1.0, 1.0))
            .collect(),
        NormRange::ZeroOne => x
            .iter()
            .map(|&v| ((v - min) / span).clamp(0.0, 1.0))
            .collect(),
    };
    Ok(out)
}

pub(crate) fn min_max(x: &[f64]) -> Option<(f64, f64)> {
    let first = *x.first()?;
    Some(
        x.iter()
            .fold((first, first), |(lo, hi), &v| (lo.min(v), hi.max(v))),
    )
}

/// Fixed-width sliding windows. The window is `round(window_seconds * fs)`
/// samples and the hop is `round(window * (1 - overlap))`; a trailing partial
/// window is dropped.
pub fn segment(s: &Signal, window_seconds: f64, overlap_fraction: f64) -> Result<Vec<Signal>> {
    if !(0.0..1.0).contains(&overlap_fraction) {
        return Err(Error::InvalidParameter(format!(
            "overlap fraction must lie in [0, 1), got {overlap_fraction}"
        )));
    }
    if !(window_seconds.is_finite() && window_seconds > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "window must be positive, got {window_seconds} s"
        )));
    }
    let win = (window_seconds * s.fs()).round() as usize;
    let hop = ((win as f64) * (1.0 - overlap_fraction)).round().max(1.0) as usize;
    segment_samples(s, win, hop)
}

/// Sliding windows given directly in samples.
pub fn segment_samples(s: &Signal, win: usize, hop: usize) -> Result<Vec<Signal>> {
    if win == 0 || hop == 0 {
        return Err(Error::InvalidParameter(
            "window and hop must be at least one sample".into(),
        ));
    }
    let n = s.len();
    if win > n {
        return Err(Error::WindowTooLong {
            window: win,
            len: n,
        });
    }
    let count = (n - win) / hop + 1;
    (0..count)
        .map(|k| {
            let start = k * hop;
            Signal::with_meta(
                s.samples()[start..start + win].to_vec(),
                s.fs(),
                format!("{}#w{k}", s.id()),
                s.label.clone(),
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resample {
    Up,
    Down,
}

/// Change the sampling rate by a factor of two.
///
/// `Down` keeps the even-index samples without prefiltering. `Up` inserts
/// the midpoint between neighbours and repeats the final sample so the output
/// has exactly `2N` samples.
pub fn resample_by2(s: &Signal, direction: Resample) -> Result<Signal> {
    let x = s.samples();
    if x.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: x.len(),
        });
    }
    match direction {
        Resample::Down => s.derive(x.iter().step_by(2).copied().collect(), s.fs() / 2.0),
        Resample::Up => {
            let mut out = Vec::with_capacity(2 * x.len());
            for w in x.windows(2) {
                out.push(w[0]);
                out.push(0.5 * (w[0] + w[1]));
            }
            let last = x[x.len() - 1];
            out.push(last);
            out.push(last);
            s.derive(out, s.fs() * 2.0)
        }
    }
}

/// Decimate by two after a zero-phase Butterworth low-pass at 0.4 of the
/// new Nyquist frequency.
pub fn decimate_by2(s: &Signal) -> Result<Signal> {
    if s.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: s.len(),
        });
    }
    let lp = Biquad::lowpass(0.1 * s.fs(), s.fs())?;
    let smoothed = lp.filtfilt(s.samples());
    resample_by2(&s.derive(smoothed, s.fs())?, Resample::Down)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(x: &[f64], fs: f64) -> Signal {
        Signal::new(x.to_vec(), fs).unwrap()
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(Signal::new(vec![], 1.0).is_err());
        assert!(Signal::new(vec![1.0], 0.0).is_err());
        assert!(Signal::new(vec![1.0, f64::NAN], 1.0).is_err());
        assert!(Signal::new(vec![f64::INFINITY], 1.0).is_err());
    }

    #[test]
    fn minmax_examples() {
        let s = sig(&[0.0, 5.0, 10.0], 1.0);
        let a = normalize_minmax(&s, NormRange::NegOneOne).unwrap();
        assert_eq!(a.samples(), &[-1.0, 0.0, 1.0]);
        let b = normalize_minmax(&s, NormRange::ZeroOne).unwrap();
        assert_eq!(b.samples(), &[0.0, 0.5, 1.0]);
        assert!(matches!(
            normalize_minmax(&sig(&[3.0, 3.0, 3.0], 1.0), NormRange::ZeroOne),
            Err(Error::DegenerateRange)
        ));
    }

    #[test]
    fn har_windows() {
        let s = sig(&vec![0.0; 1000], 50.0);
        let w = segment(&s, 2.56, 0.5).unwrap();
        assert!(w.iter().all(|w| w.len() == 128));
        assert_eq!(w.len(), (1000 - 128) / 64 + 1);
        assert_eq!(w[1].id(), "#w1");

        let one = segment_samples(&sig(&vec![1.0; 128], 1.0), 128, 64).unwrap();
        assert_eq!(one.len(), 1);
        let two = segment_samples(&sig(&vec![1.0; 192], 1.0), 128, 64).unwrap();
        assert_eq!(two.len(), 2);
        assert!(matches!(
            segment_samples(&sig(&[1.0; 10], 1.0), 11, 1),
            Err(Error::WindowTooLong {
                window: 11,
                len: 10
            })
        ));
        assert!(segment(&s, 2.56, 1.0).is_err());
    }

    #[test]
    fn windows_tile_at_hop() {
        let x: Vec<f64> = (0..300).map(f64::from).collect();
        let w = segment_samples(&sig(&x, 10.0), 50, 20).unwrap();
        for (k, win) in w.iter().enumerate() {
            assert_eq!(win.samples()[0], (k * 20) as f64);
            assert_eq!(win.len(), 50);
        }
    }

    #[test]
    fn resample_examples() {
        let d = resample_by2(&sig(&[1.0, 2.0, 3.0, 4.0], 100.0), Resample::Down).unwrap();
        assert_eq!(d.samples(), &[1.0, 3.0]);
        assert_eq!(d.fs(), 50.0);
        let u = resample_by2(&sig(&[1.0, 3.0], 100.0), Resample::Up).unwrap();
        assert_eq!(u.samples(), &[1.0, 2.0, 3.0, 3.0]);
        assert_eq!(u.fs(), 200.0);
        assert!(matches!(
            resample_by2(&sig(&[5.0], 1.0), Resample::Up),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn down_after_up_is_identity_on_ramp() {
        let ramp: Vec<f64> = (0..37).map(|i| 0.25 * i as f64 - 3.0).collect();
        let s = sig(&ramp, 8.0);
        let back = resample_by2(&resample_by2(&s, Resample::Up).unwrap(), Resample::Down).unwrap();
        assert_eq!(back.samples(), s.samples());
        assert_eq!(back.fs(), 8.0);
    }

    #[test]
    fn decimate_suppresses_high_band() {
        let fs = 200.0;
        let x: Vec<f64> = (0..2000)
            .map(|i| {
                let t = i as f64 / fs;
                (2.0 * std::f64::consts::PI * 2.0 * t).sin()
                    + (2.0 * std::f64::consts::PI * 80.0 * t).sin()
            })
            .collect();
        let d = decimate_by2(&sig(&x, fs)).unwrap();
        assert_eq!(d.len(), 1000);
        // the 80 Hz tone would alias to 20 Hz; what remains is dominated by the 2 Hz tone
        let mid = &d.samples()[200..800];
        let peak = mid.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(peak < 1.1, "peak {peak}");
    }
}
