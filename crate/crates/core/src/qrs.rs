//! Pan-Tompkins R-peak detection.
//!
//! Stages: zero-phase 5-15 Hz bandpass, centered five-point derivative,
//! squaring, centered moving-window integration. Every stage is centered, so
//! stage outputs stay aligned with the input and need no delay correction.
//! Peaks of the integrated signal are classified with adaptive signal and
//! noise levels, then located on the input as the largest sample nearby.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{filtfilt_cascade, Biquad, Signal};

pub const MIN_FS: f64 = 100.0;
pub const BAND_LOW_HZ: f64 = 5.0;
pub const BAND_HIGH_HZ: f64 = 15.0;
pub const INTEGRATION_S: f64 = 0.150;
pub const REFRACTORY_S: f64 = 0.200;
pub const LEARNING_S: f64 = 2.0;
/// Half-width of the window searched on the input for the R sample.
pub const LOCATE_S: f64 = 0.100;
pub const SEARCHBACK_RR: f64 = 1.66;
/// RR intervals averaged for the search-back limit.
pub const RR_HISTORY: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct PtStages {
    pub bandpassed: Vec<f64>,
    pub derivative: Vec<f64>,
    pub squared: Vec<f64>,
    pub integrated: Vec<f64>,
    /// Integration window in samples.
    pub window: usize,
}

/// Thresholds in force when one candidate peak was classified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPoint {
    /// Candidate position in the integrated signal.
    pub index: usize,
    /// Primary threshold: `noise + 0.25 (signal - noise)`.
    pub signal_threshold: f64,
    /// Search-back threshold, half the primary one.
    pub noise_threshold: f64,
    pub signal_level: f64,
    pub noise_level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QrsResult {
    pub fs: f64,
    pub peaks: Vec<usize>,
    /// Seconds between consecutive peaks.
    pub rr_intervals: Vec<f64>,
    /// `None` with fewer than two peaks.
    pub heart_rate_bpm: Option<f64>,
    pub threshold_trace: Vec<ThresholdPoint>,
}

impl QrsResult {
    fn from_peaks(fs: f64, peaks: Vec<usize>, threshold_trace: Vec<ThresholdPoint>) -> Self {
        let rr_intervals: Vec<f64> = peaks
            .windows(2)
            .map(|w| (w[1] - w[0]) as f64 / fs)
            .collect();
        let heart_rate_bpm = (!rr_intervals.is_empty())
            .then(|| 60.0 * rr_intervals.len() as f64 / rr_intervals.iter().sum::<f64>());
        Self {
            fs,
            peaks,
            rr_intervals,
            heart_rate_bpm,
            threshold_trace,
        }
    }

    /// `peak_index,time_s,rr_s`, one row per peak; the first row has no RR.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("peak_index,time_s,rr_s\n");
        for (k, &p) in self.peaks.iter().enumerate() {
            let rr = if k == 0 {
                String::new()
            } else {
                self.rr_intervals[k - 1].to_string()
            };
            writeln!(out, "{p},{},{rr}", p as f64 / self.fs).expect("write to String");
        }
        out
    }
}

fn samples_for(seconds: f64, fs: f64) -> usize {
    (seconds * fs).round() as usize
}

fn check_input(s: &Signal) -> Result<()> {
    if s.fs() < MIN_FS {
        return Err(Error::SamplingTooLow {
            fs: s.fs(),
            min: MIN_FS,
        });
    }
    let needed = (LEARNING_S * s.fs()).ceil() as usize;
    if s.len() < needed {
        return Err(Error::TooShort {
            needed,
            got: s.len(),
        });
    }
    Ok(())
}

/// Centered moving average with zeros beyond the ends.
fn moving_average(x: &[f64], width: usize) -> Vec<f64> {
    let n = x.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in x {
        prefix.push(prefix.last().unwrap() + v);
    }
    let before = (width - 1) / 2;
    let after = width - 1 - before;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(before);
            let hi = (i + after + 1).min(n);
            ((prefix[hi] - prefix[lo]) / width as f64).max(0.0)
        })
        .collect()
}

pub fn pt_stages(s: &Signal) -> Result<PtStages> {
    check_input(s)?;
    let fs = s.fs();
    let x = s.samples();
    let sections = [
        Biquad::lowpass(BAND_HIGH_HZ, fs)?,
        Biquad::highpass(BAND_LOW_HZ, fs)?,
    ];
    let bandpassed = filtfilt_cascade(&sections, x);

    let n = bandpassed.len();
    let at = |i: isize| bandpassed[i.clamp(0, n as isize - 1) as usize];
    let derivative: Vec<f64> = (0..n as isize)
        .map(|i| (-at(i - 2) - 2.0 * at(i - 1) + 2.0 * at(i + 1) + at(i + 2)) * fs / 8.0)
        .collect();
    let squared: Vec<f64> = derivative.iter().map(|d| d * d).collect();
    let window = samples_for(INTEGRATION_S, fs).max(1);
    let integrated = moving_average(&squared, window);
    Ok(PtStages {
        bandpassed,
        derivative,
        squared,
        integrated,
        window,
    })
}

/// Indices of local maxima (first sample of a plateau), endpoints excluded.
fn local_maxima(y: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < y.len() {
        if y[i] > y[i - 1] {
            let mut j = i;
            while j + 1 < y.len() && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < y.len() && y[j + 1] < y[i] {
                out.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Local maxima kept greedily from the tallest down, none within `distance`
/// of a taller one. Returned in time order.
fn candidate_peaks(y: &[f64], distance: usize) -> Vec<usize> {
    let mut maxima = local_maxima(y);
    maxima.sort_by(|&a, &b| y[b].total_cmp(&y[a]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for m in maxima {
        let pos = kept.partition_point(|&k| k < m);
        let clear_left = pos == 0 || m - kept[pos - 1] >= distance;
        let clear_right = pos == kept.len() || kept[pos] - m >= distance;
        if clear_left && clear_right {
            kept.insert(pos, m);
        }
    }
    kept
}

fn argmax_near(x: &[f64], center: usize, half: usize) -> usize {
    let lo = center.saturating_sub(half);
    let hi = (center + half + 1).min(x.len());
    (lo..hi).fold(lo, |best, i| if x[i] > x[best] { i } else { best })
}

struct Detector {
    spki: f64,
    npki: f64,
    peaks: Vec<usize>,
}

impl Detector {
    fn thresholds(&self) -> (f64, f64) {
        let t1 = self.npki + 0.25 * (self.spki - self.npki);
        (t1, 0.5 * t1)
    }

    fn rr_average(&self) -> Option<f64> {
        let n = self.peaks.len();
        if n < 2 {
            return None;
        }
        let first = n.saturating_sub(RR_HISTORY + 1);
        let span = self.peaks[n - 1] - self.peaks[first];
        Some(span as f64 / (n - 1 - first) as f64)
    }
}

pub fn detect_qrs(s: &Signal) -> Result<QrsResult> {
    let stages = pt_stages(s)?;
    let fs = s.fs();
    let x = s.samples();
    let y = &stages.integrated;
    let refractory = (REFRACTORY_S * fs).ceil() as usize;
    let locate = samples_for(LOCATE_S, fs);

    let learn = samples_for(LEARNING_S, fs).min(y.len());
    let head = &y[..learn];
    let mut det = Detector {
        spki: 0.25 * head.iter().cloned().fold(0.0, f64::max),
        npki: 0.5 * head.iter().sum::<f64>() / learn as f64,
        peaks: Vec::new(),
    };
    let mut trace = Vec::new();
    let candidates = candidate_peaks(y, refractory);
    let clear_of_last =
        |peaks: &[usize], r: usize| peaks.last().is_none_or(|&p| r >= p + refractory);

    for (ci, &c) in candidates.iter().enumerate() {
        // search back over skipped candidates when a beat is overdue
        if let (Some(rr), Some(&last)) = (det.rr_average(), det.peaks.last()) {
            if (c - last.min(c)) as f64 > SEARCHBACK_RR * rr {
                let (_, t2) = det.thresholds();
                let best = candidates[..ci]
                    .iter()
                    .copied()
                    .filter(|&k| k > last && y[k] > t2)
                    .map(|k| (k, argmax_near(x, k, locate)))
                    .filter(|&(_, r)| r >= last + refractory)
                    .max_by(|a, b| y[a.0].total_cmp(&y[b.0]));
                if let Some((k, r)) = best {
                    det.spki = 0.25 * y[k] + 0.75 * det.spki;
                    det.peaks.push(r);
                }
            }
        }

        let (t1, t2) = det.thresholds();
        trace.push(ThresholdPoint {
            index: c,
            signal_threshold: t1,
            noise_threshold: t2,
            signal_level: det.spki,
            noise_level: det.npki,
        });
        let p = y[c];
        let r = argmax_near(x, c, locate);
        if p > t1 && clear_of_last(&det.peaks, r) {
            det.spki = 0.125 * p + 0.875 * det.spki;
            det.peaks.push(r);
        } else {
            det.npki = 0.125 * p + 0.875 * det.npki;
        }
    }
    Ok(QrsResult::from_peaks(fs, det.peaks, trace))
}

/// `60 / mean(RR)`.
pub fn heart_rate(r: &QrsResult) -> Result<f64> {
    if r.peaks.len() < 2 {
        return Err(Error::TooFewPeaks(r.peaks.len()));
    }
    Ok(60.0 * r.rr_intervals.len() as f64 / r.rr_intervals.iter().sum::<f64>())
}

/// Local maxima of the raw signal above `min_height`, scanned left to right,
/// skipping any within `refractory_s` of the last one kept.
pub fn find_r_peaks_simple(s: &Signal, min_height: f64, refractory_s: f64) -> Result<Vec<usize>> {
    if !(refractory_s >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "refractory period must be >= 0, got {refractory_s}"
        )));
    }
    let refractory = samples_for(refractory_s, s.fs());
    let x = s.samples();
    let mut out: Vec<usize> = Vec::new();
    for m in local_maxima(x) {
        if x[m] > min_height && out.last().is_none_or(|&p| m - p >= refractory) {
            out.push(m);
        }
    }
    Ok(out)
}

/// Matches of detected peaks to reference peaks within `tolerance` samples,
/// each reference used at most once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeakMatch {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

impl PeakMatch {
    pub fn sensitivity(&self) -> f64 {
        ratio(
            self.true_positives,
            self.true_positives + self.false_negatives,
        )
    }

    pub fn positive_predictivity(&self) -> f64 {
        ratio(
            self.true_positives,
            self.true_positives + self.false_positives,
        )
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Greedy in-order matching of two sorted index lists.
pub fn match_peaks(reference: &[usize], detected: &[usize], tolerance: usize) -> PeakMatch {
    let (mut i, mut j, mut tp) = (0, 0, 0);
    while i < reference.len() && j < detected.len() {
        let (r, d) = (reference[i], detected[j]);
        if r.abs_diff(d) <= tolerance {
            tp += 1;
            i += 1;
            j += 1;
        } else if d < r {
            j += 1;
        } else {
            i += 1;
        }
    }
    PeakMatch {
        true_positives: tp,
        false_positives: detected.len() - tp,
        false_negatives: reference.len() - tp,
    }
}
