//! k-NN classification, evaluation metrics and the batch pipeline.
//!
//! The pipeline reads labelled records, optionally denoises them, encodes
//! each one as a fused three-channel image, splits the set by label with a
//! seeded shuffle, classifies the held-out part with k-NN and writes the
//! images, a report and a flat metrics file.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::denoise::{denoise, snr, DenoiseParams};
use crate::encode::{encode_fused, fused_raster, EncoderParams, FusedImage, GrayMapping};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::signal::{load_csv, normalize_samples, NormRange, Signal};
use crate::synth::rng;

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Majority vote among the `k` nearest training vectors (Euclidean).
///
/// Vote ties go to the label whose neighbours are closer on average, then to
/// the lexically smallest label.
pub fn knn_predict(
    train_x: &[Vec<f64>],
    train_y: &[String],
    test_x: &[Vec<f64>],
    k: usize,
) -> Result<Vec<String>> {
    if train_x.len() != train_y.len() {
        return Err(Error::LengthMismatch {
            left: train_x.len(),
            right: train_y.len(),
        });
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if k > train_x.len() {
        return Err(Error::KTooLarge {
            k,
            train: train_x.len(),
        });
    }
    let dim = train_x[0].len();
    for v in train_x.iter().chain(test_x) {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
    }
    Ok(test_x
        .par_iter()
        .map(|q| {
            let mut dists: Vec<(f64, usize)> = train_x
                .iter()
                .enumerate()
                .map(|(i, t)| (squared_distance(q, t), i))
                .collect();
            dists.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut votes: BTreeMap<&str, (usize, f64)> = BTreeMap::new();
            for &(d, i) in &dists[..k] {
                let e = votes.entry(train_y[i].as_str()).or_insert((0, 0.0));
                e.0 += 1;
                e.1 += d.sqrt();
            }
            let mut best: Option<(&str, usize, f64)> = None;
            for (label, (count, total)) in votes {
                let mean = total / count as f64;
                let better = match best {
                    None => true,
                    Some((_, c, m)) => count > c || (count == c && mean < m),
                };
                if better {
                    best = Some((label, count, mean));
                }
            }
            best.expect("k >= 1 neighbours").0.to_string()
        })
        .collect())
}

/// [`knn_predict`] on flattened fused images.
pub fn knn_classify(
    train: &[(FusedImage, String)],
    test: &[FusedImage],
    k: usize,
) -> Result<Vec<String>> {
    let train_x: Vec<Vec<f64>> = train.iter().map(|(img, _)| img.features()).collect();
    let train_y: Vec<String> = train.iter().map(|(_, l)| l.clone()).collect();
    let test_x: Vec<Vec<f64>> = test.iter().map(FusedImage::features).collect();
    knn_predict(&train_x, &train_y, &test_x, k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    /// Sorted union of true and predicted labels.
    pub labels: Vec<String>,
    /// `confusion[truth][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
    pub accuracy: f64,
}

fn safe_div(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

pub fn evaluate(truth: &[String], pred: &[String]) -> Result<EvaluationReport> {
    if truth.len() != pred.len() {
        return Err(Error::LengthMismatch {
            left: truth.len(),
            right: pred.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput);
    }
    let labels: Vec<String> = truth
        .iter()
        .chain(pred)
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index = |l: &String| labels.binary_search(l).expect("label in union");
    let c = labels.len();
    let mut confusion = vec![vec![0usize; c]; c];
    for (t, p) in truth.iter().zip(pred) {
        confusion[index(t)][index(p)] += 1;
    }
    let mut precision = Vec::with_capacity(c);
    let mut recall = Vec::with_capacity(c);
    let mut f1 = Vec::with_capacity(c);
    #[allow(clippy::needless_range_loop)]
    for i in 0..c {
        let tp = confusion[i][i] as f64;
        let predicted: usize = (0..c).map(|r| confusion[r][i]).sum();
        let actual: usize = confusion[i].iter().sum();
        let p = safe_div(tp, predicted as f64);
        let r = safe_div(tp, actual as f64);
        precision.push(p);
        recall.push(r);
        f1.push(safe_div(2.0 * p * r, p + r));
    }
    let correct: usize = (0..c).map(|i| confusion[i][i]).sum();
    Ok(EvaluationReport {
        labels,
        confusion,
        precision,
        recall,
        f1,
        accuracy: correct as f64 / truth.len() as f64,
    })
}

impl EvaluationReport {
    pub fn to_text(&self) -> String {
        let width = self
            .labels
            .iter()
            .map(String::len)
            .max()
            .unwrap_or(0)
            .max(9);
        let mut out = String::new();
        writeln!(out, "accuracy: {:.4}", self.accuracy).unwrap();
        writeln!(out, "\nconfusion (rows = truth, columns = predicted)").unwrap();
        write!(out, "{:width$}", "").unwrap();
        for l in &self.labels {
            write!(out, " {l:>width$}").unwrap();
        }
        writeln!(out).unwrap();
        for (l, row) in self.labels.iter().zip(&self.confusion) {
            write!(out, "{l:width$}").unwrap();
            for v in row {
                write!(out, " {v:>width$}").unwrap();
            }
            writeln!(out).unwrap();
        }
        writeln!(
            out,
            "\n{:width$} {:>9} {:>9} {:>9}",
            "class", "precision", "recall", "f1"
        )
        .unwrap();
        for (i, l) in self.labels.iter().enumerate() {
            writeln!(
                out,
                "{l:width$} {:>9.4} {:>9.4} {:>9.4}",
                self.precision[i], self.recall[i], self.f1[i]
            )
            .unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Distance {
    #[default]
    Euclidean,
}

impl FromStr for Distance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "euclidean" => Ok(Distance::Euclidean),
            other => Err(Error::Config(format!("unsupported distance {other:?}"))),
        }
    }
}

/// Batch pipeline settings, read from a flat `key = value` file.
///
/// | key | meaning | default |
/// |---|---|---|
/// | `input` | comma-separated CSV paths | required |
/// | `output_dir` | where artifacts go | required |
/// | `fs` | sampling rate in Hz, else the `# fs=` header | none |
/// | `label_column` | header name of the class column | `label` |
/// | `denoise` | `true` to denoise before encoding | `false` |
/// | `denoise.wavelet`, `.threshold`, `.level`, `.rule`, `.rescale` | denoising knobs | `db6`, `soft`, `3`, `sqtwolog`, `sln` |
/// | `reference` | clean CSV aligned row by row with the input, for SNR | none |
/// | `gaf` | `gasf` or `gadf` | `gasf` |
/// | `rp_eps` | recurrence threshold; absent means raw distances | none |
/// | `mtf_bins` | quantile bins | `8` |
/// | `fuse_size` | side of each fused channel | `64` |
/// | `k` | neighbours | `3` |
/// | `distance` | `euclidean` | `euclidean` |
/// | `train_fraction` | share of each class used for training | `0.7` |
/// | `seed` | split seed | `0` |
///
/// Relative paths in a file are taken relative to that file's directory.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub inputs: Vec<PathBuf>,
    pub output_dir: PathBuf,
    pub fs: Option<f64>,
    pub label_column: String,
    pub denoise: Option<DenoiseParams>,
    pub reference: Option<PathBuf>,
    pub encoder: EncoderParams,
    pub k: usize,
    pub distance: Distance,
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            output_dir: PathBuf::new(),
            fs: None,
            label_column: "label".into(),
            denoise: None,
            reference: None,
            encoder: EncoderParams::default(),
            k: 3,
            distance: Distance::Euclidean,
            train_fraction: 0.7,
            seed: 0,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!(
            "{key}: expected true or false, got {value:?}"
        ))),
    }
}

fn as_config<T>(key: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Config(format!("{key}: {e}")))
}

impl PipelineConfig {
    /// Apply one `key = value` setting. `base` resolves relative paths.
    pub fn set(&mut self, key: &str, value: &str, base: Option<&Path>) -> Result<()> {
        let path = |v: &str| -> PathBuf {
            let p = PathBuf::from(v.trim());
            match base {
                Some(b) if p.is_relative() => b.join(p),
                _ => p,
            }
        };
        let denoise = |cfg: &mut Self| {
            cfg.denoise
                .get_or_insert_with(DenoiseParams::default)
                .clone()
        };
        match key {
            "input" => {
                self.inputs = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(path)
                    .collect();
            }
            "output_dir" => self.output_dir = path(value),
            "fs" => self.fs = Some(parse_value(key, value)?),
            "label_column" => self.label_column = value.trim().to_string(),
            "denoise" => {
                if parse_bool(key, value)? {
                    self.denoise.get_or_insert_with(DenoiseParams::default);
                } else {
                    self.denoise = None;
                }
            }
            "denoise.wavelet" => {
                let mut p = denoise(self);
                p.wavelet = as_config(key, crate::wavelet::get_wavelet(value))?.name;
                self.denoise = Some(p);
            }
            "denoise.threshold" => {
                let mut p = denoise(self);
                p.threshold_fn = as_config(key, value.parse())?;
                self.denoise = Some(p);
            }
            "denoise.level" => {
                let mut p = denoise(self);
                p.level = parse_value(key, value)?;
                self.denoise = Some(p);
            }
            "denoise.rule" => {
                let mut p = denoise(self);
                p.rule = as_config(key, value.parse())?;
                self.denoise = Some(p);
            }
            "denoise.rescale" => {
                let mut p = denoise(self);
                p.rescale = as_config(key, value.parse())?;
                self.denoise = Some(p);
            }
            "reference" => self.reference = Some(path(value)),
            "gaf" => self.encoder.gaf = as_config(key, value.parse())?,
            "rp_eps" => {
                self.encoder.rp_eps = match value.trim() {
                    "" | "none" => None,
                    v => Some(parse_value(key, v)?),
                }
            }
            "mtf_bins" => self.encoder.mtf_bins = parse_value(key, value)?,
            "fuse_size" => self.encoder.fuse_size = parse_value(key, value)?,
            "k" => self.k = parse_value(key, value)?,
            "distance" => self.distance = value.parse()?,
            "train_fraction" => self.train_fraction = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Parse the text of a config file. Blank lines and `#` comments are
    /// skipped; repeated keys are rejected.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!(
                    "line {}: duplicate key {key:?}",
                    i + 1
                )));
            }
            cfg.set(key, value, base)
                .map_err(|e| Error::Config(format!("line {}: {}", i + 1, strip_prefix(&e))))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path.parent())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.inputs.is_empty() {
            return fail("input: at least one path is required".into());
        }
        if self.output_dir.as_os_str().is_empty() {
            return fail("output_dir is required".into());
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return fail(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            ));
        }
        if self.k == 0 {
            return fail("k must be >= 1".into());
        }
        if let Some(fs) = self.fs {
            if !(fs > 0.0 && fs.is_finite()) {
                return fail(format!("fs must be positive, got {fs}"));
            }
        }
        if let Some(e) = self.encoder.rp_eps {
            if !(e > 0.0) {
                return fail(format!("rp_eps must be positive, got {e}"));
            }
        }
        if self.encoder.mtf_bins < 2 {
            return fail(format!(
                "mtf_bins must be >= 2, got {}",
                self.encoder.mtf_bins
            ));
        }
        if self.encoder.fuse_size == 0 {
            return fail("fuse_size must be >= 1".into());
        }
        if self.reference.is_some() && self.denoise.is_none() {
            return fail("reference is only used with denoise = true".into());
        }
        Ok(())
    }
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::Config(m) => m.clone(),
        other => other.to_string(),
    }
}

/// Seeded split stratified by label. Returns `(train, test)` record indices,
/// each sorted. Every class with at least two members lands in both parts.
pub fn stratified_split(
    labels: &[String],
    train_fraction: f64,
    seed: u64,
) -> (Vec<usize>, Vec<usize>) {
    let mut by_label: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        by_label.entry(l).or_default().push(i);
    }
    let mut g = rng(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (_, mut idx) in by_label {
        idx.shuffle(&mut g);
        let n = idx.len();
        let n_train = if n < 2 {
            n
        } else {
            ((n as f64 * train_fraction).round() as usize).clamp(1, n - 1)
        };
        train.extend_from_slice(&idx[..n_train]);
        test.extend_from_slice(&idx[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// File name for a record's image: the id with path-hostile characters replaced.
pub fn image_file_name(id: &str) -> String {
    let safe: String = id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-_.#".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("{safe}.pgm")
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutcome {
    pub report: EvaluationReport,
    /// Accuracy of k-NN on the raw normalized samples over the same split,
    /// when all records share one length.
    pub baseline_accuracy: Option<f64>,
    pub metrics: BTreeMap<String, String>,
    pub ids: Vec<String>,
    pub test_ids: Vec<String>,
    pub predictions: Vec<String>,
}

fn load_inputs(cfg: &PipelineConfig, paths: &[PathBuf]) -> Result<Vec<Signal>> {
    let mut out = Vec::new();
    for p in paths {
        out.extend(load_csv(p, cfg.fs, Some(&cfg.label_column))?);
    }
    Ok(out)
}

/// Mean SNR of the noisy and the denoised records against the clean ones.
fn snr_summary(clean: &[Signal], noisy: &[Signal], denoised: &[Signal]) -> Result<(f64, f64)> {
    if clean.len() != noisy.len() {
        return Err(Error::Config(format!(
            "reference has {} records, input has {}",
            clean.len(),
            noisy.len()
        )));
    }
    let mut sums = (0.0, 0.0);
    for ((c, n), d) in clean.iter().zip(noisy).zip(denoised) {
        sums.0 += snr(c.samples(), n.samples()).map_err(|e| e.in_record(n.id()))?;
        sums.1 += snr(c.samples(), d.samples()).map_err(|e| e.in_record(n.id()))?;
    }
    let m = clean.len() as f64;
    Ok((sums.0 / m, sums.1 / m))
}

/// Run the whole pipeline and write `images/*.pgm`, `predictions.csv`,
/// `report.txt` and `metrics.txt` under `output_dir`.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutcome> {
    cfg.validate()?;
    let records = load_inputs(cfg, &cfg.inputs)?;
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let labels: Vec<String> = records
        .iter()
        .map(|r| {
            r.label()
                .map(str::to_string)
                .ok_or_else(|| Error::InvalidSignal("record has no label".into()).in_record(r.id()))
        })
        .collect::<Result<_>>()?;

    let mut metrics = BTreeMap::new();
    let prepared: Vec<Signal> = match &cfg.denoise {
        None => records.clone(),
        Some(p) => {
            let out: Vec<Signal> = records
                .par_iter()
                .map(|r| denoise(r, p).map_err(|e| e.in_record(r.id())))
                .collect::<Result<_>>()?;
            if let Some(reference) = &cfg.reference {
                let clean = load_csv(reference, cfg.fs, Some(&cfg.label_column))?;
                let (before, after) = snr_summary(&clean, &records, &out)?;
                metrics.insert("snr_in_mean_db".into(), before.to_string());
                metrics.insert("snr_out_mean_db".into(), after.to_string());
                metrics.insert("snr_gain_mean_db".into(), (after - before).to_string());
            }
            out
        }
    };

    let normalized: Vec<Vec<f64>> = prepared
        .par_iter()
        .map(|r| {
            normalize_samples(r.samples(), NormRange::NegOneOne).map_err(|e| e.in_record(r.id()))
        })
        .collect::<Result<_>>()?;
    let images: Vec<FusedImage> = normalized
        .par_iter()
        .zip(&prepared)
        .map(|(x, r)| encode_fused(x, &cfg.encoder).map_err(|e| e.in_record(r.id())))
        .collect::<Result<_>>()?;

    let image_dir = cfg.output_dir.join("images");
    fs::create_dir_all(&image_dir).map_err(|e| Error::io(&image_dir, e))?;
    images.par_iter().zip(&prepared).try_for_each(|(img, r)| {
        let bytes = fused_raster(img, GrayMapping::LinearGray)?.to_pgm();
        write_atomic(&image_dir.join(image_file_name(r.id())), &bytes)
    })?;

    let (train, test) = stratified_split(&labels, cfg.train_fraction, cfg.seed);
    if test.is_empty() {
        return Err(Error::Config(
            "split left no test records; every class needs at least two".into(),
        ));
    }
    let pick = |idx: &[usize], feats: &dyn Fn(usize) -> Vec<f64>| -> Vec<Vec<f64>> {
        idx.iter().map(|&i| feats(i)).collect()
    };
    let train_y: Vec<String> = train.iter().map(|&i| labels[i].clone()).collect();
    let truth: Vec<String> = test.iter().map(|&i| labels[i].clone()).collect();
    let image_feats = |i: usize| images[i].features();
    let predictions = as_config(
        "k",
        knn_predict(
            &pick(&train, &image_feats),
            &train_y,
            &pick(&test, &image_feats),
            cfg.k,
        ),
    )?;
    let report = evaluate(&truth, &predictions)?;

    let same_length = normalized.iter().all(|x| x.len() == normalized[0].len());
    let baseline_accuracy = if same_length {
        let raw = |i: usize| normalized[i].clone();
        let pred = knn_predict(&pick(&train, &raw), &train_y, &pick(&test, &raw), cfg.k)?;
        Some(evaluate(&truth, &pred)?.accuracy)
    } else {
        None
    };

    metrics.insert("accuracy".into(), report.accuracy.to_string());
    if let Some(b) = baseline_accuracy {
        metrics.insert("baseline_accuracy".into(), b.to_string());
    }
    metrics.insert("records".into(), records.len().to_string());
    metrics.insert("train_records".into(), train.len().to_string());
    metrics.insert("test_records".into(), test.len().to_string());
    metrics.insert("k".into(), cfg.k.to_string());
    metrics.insert("seed".into(), cfg.seed.to_string());
    for (i, l) in report.labels.iter().enumerate() {
        metrics.insert(format!("precision.{l}"), report.precision[i].to_string());
        metrics.insert(format!("recall.{l}"), report.recall[i].to_string());
        metrics.insert(format!("f1.{l}"), report.f1[i].to_string());
    }

    let ids: Vec<String> = records.iter().map(|r| r.id().to_string()).collect();
    let test_ids: Vec<String> = test.iter().map(|&i| ids[i].clone()).collect();

    let mut pred_csv = String::from("id,truth,predicted\n");
    for ((id, t), p) in test_ids.iter().zip(&truth).zip(&predictions) {
        writeln!(pred_csv, "{id},{t},{p}").unwrap();
    }
    let mut report_text = report.to_text();
    if let Some(b) = baseline_accuracy {
        writeln!(report_text, "\nraw-sample k-NN baseline accuracy: {b:.4}").unwrap();
    }
    write_atomic(&cfg.output_dir.join("predictions.csv"), pred_csv.as_bytes())?;
    write_atomic(&cfg.output_dir.join("report.txt"), report_text.as_bytes())?;
    write_atomic(
        &cfg.output_dir.join("metrics.txt"),
        format_metrics(&metrics).as_bytes(),
    )?;

    Ok(PipelineOutcome {
        report,
        baseline_accuracy,
        metrics,
        ids,
        test_ids,
        predictions,
    })
}

/// `key=value` lines in key order.
pub fn format_metrics(m: &BTreeMap<String, String>) -> String {
    m.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

pub fn parse_metrics(text: &str) -> Result<BTreeMap<String, String>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| {
                    Error::InvalidParameter(format!("metrics line {}: expected key=value", i + 1))
                })
        })
        .collect()
}
