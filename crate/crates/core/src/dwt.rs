//! Multilevel discrete wavelet transform.
//!
//! One analysis step convolves the (extended) input with `dec_lo` and
//! `dec_hi` and keeps every second output. With symmetric (half-sample)
//! extension each level of length `n` yields `floor((n + nw - 1) / 2)`
//! coefficients per branch; with periodization it yields `ceil(n / 2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavelet::{get_wavelet, WaveletSpec};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Half-sample symmetric extension: `x[-1] = x[0]`, `x[-2] = x[1]`, ...
    #[default]
    Symmetric,
    /// Circular extension. Orthogonal (energy preserving) whenever every
    /// level has even length; odd lengths are padded by repeating the last
    /// sample.
    Periodization,
}

/// Approximation at the deepest level plus the details of every level.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub wavelet: WaveletSpec,
    pub approx: Vec<f64>,
    /// `details[i]` holds `cD_{i+1}`; `details[0]` is the finest level.
    pub details: Vec<Vec<f64>>,
    pub orig_len: usize,
    pub boundary: Boundary,
}

impl Decomposition {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Detail coefficients of `level` (1-based).
    pub fn detail(&self, level: usize) -> Option<&[f64]> {
        level
            .checked_sub(1)
            .and_then(|i| self.details.get(i))
            .map(Vec::as_slice)
    }

    /// Coefficient counts `[len_0 = orig_len, len_1, ..., len_L]` implied by
    /// the original length, filter length and boundary mode.
    pub fn expected_lengths(&self) -> Vec<usize> {
        level_lengths(
            self.orig_len,
            self.wavelet.nw(),
            self.boundary,
            self.levels(),
        )
    }

    /// Sum of squares over every coefficient.
    pub fn energy(&self) -> f64 {
        let sq = |v: &[f64]| v.iter().map(|c| c * c).sum::<f64>();
        sq(&self.approx) + self.details.iter().map(|d| sq(d)).sum::<f64>()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&DecompositionFile::from(self)).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DecompositionFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("bad decomposition json: {e}")))?;
        if file.levels != file.details.len() {
            return Err(Error::ShapeMismatch(format!(
                "levels = {} but {} detail arrays",
                file.levels,
                file.details.len()
            )));
        }
        let d = Decomposition {
            wavelet: get_wavelet(&file.wavelet)?,
            approx: file.approx,
            details: file.details,
            orig_len: file.orig_len,
            boundary: file.boundary,
        };
        d.check_shape()?;
        Ok(d)
    }

    fn check_shape(&self) -> Result<()> {
        let expect = self.expected_lengths();
        for (i, d) in self.details.iter().enumerate() {
            if d.len() != expect[i + 1] {
                return Err(Error::ShapeMismatch(format!(
                    "cD{} has {} coefficients, expected {}",
                    i + 1,
                    d.len(),
                    expect[i + 1]
                )));
            }
        }
        let last = *expect.last().expect("len_0 always present");
        if self.approx.len() != last {
            return Err(Error::ShapeMismatch(format!(
                "cA{} has {} coefficients, expected {last}",
                self.levels(),
                self.approx.len()
            )));
        }
        Ok(())
    }
}

/// On-disk form used by `inspect`: wavelet by name, coefficients as full
/// precision decimals.
#[derive(Debug, Serialize, Deserialize)]
struct DecompositionFile {
    wavelet: String,
    levels: usize,
    orig_len: usize,
    boundary: Boundary,
    approx: Vec<f64>,
    details: Vec<Vec<f64>>,
}

impl From<&Decomposition> for DecompositionFile {
    fn from(d: &Decomposition) -> Self {
        Self {
            wavelet: d.wavelet.name.clone(),
            levels: d.levels(),
            orig_len: d.orig_len,
            boundary: d.boundary,
            approx: d.approx.clone(),
            details: d.details.clone(),
        }
    }
}

fn level_lengths(n: usize, nw: usize, boundary: Boundary, levels: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(levels + 1);
    out.push(n);
    for _ in 0..levels {
        let prev = *out.last().expect("nonempty");
        out.push(match boundary {
            Boundary::Symmetric => (prev + nw - 1) / 2,
            Boundary::Periodization => prev.div_ceil(2),
        });
    }
    out
}

/// Largest useful decomposition depth: `round(log2(n / nw - 1))`, or 0 when
/// the argument of the logarithm is at most 1.
pub fn max_level(n: usize, nw: usize) -> usize {
    if nw == 0 {
        return 0;
    }
    let arg = n as f64 / nw as f64 - 1.0;
    if arg <= 1.0 {
        return 0;
    }
    arg.log2().round() as usize
}

#[inline]
fn reflect(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let r = i.rem_euclid(period) as usize;
    if r < n {
        r
    } else {
        2 * n - 1 - r
    }
}

/// One analysis step with symmetric extension.
pub fn dwt_single(x: &[f64], w: &WaveletSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    dwt_step(x, w, Boundary::Symmetric)
}

pub fn dwt_step(x: &[f64], w: &WaveletSpec, boundary: Boundary) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = x.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    let nw = w.nw();
    match boundary {
        Boundary::Symmetric => {
            let out = (n + nw - 1) / 2;
            let mut ca = Vec::with_capacity(out);
            let mut cd = Vec::with_capacity(out);
            for k in 0..out {
                let centre = 2 * k as isize + 1;
                let (mut a, mut d) = (0.0, 0.0);
                for j in 0..nw {
                    let v = x[reflect(centre - j as isize, n)];
                    a += w.dec_lo[j] * v;
                    d += w.dec_hi[j] * v;
                }
                ca.push(a);
                cd.push(d);
            }
            Ok((ca, cd))
        }
        Boundary::Periodization => {
            let padded;
            let x = if n % 2 == 1 {
                padded = x
                    .iter()
                    .chain(std::iter::once(&x[n - 1]))
                    .copied()
                    .collect::<Vec<_>>();
                &padded[..]
            } else {
                x
            };
            let m = x.len();
            let out = m / 2;
            let mut ca = Vec::with_capacity(out);
            let mut cd = Vec::with_capacity(out);
            for k in 0..out {
                let centre = 2 * k as isize + 1;
                let (mut a, mut d) = (0.0, 0.0);
                for j in 0..nw {
                    let v = x[(centre - j as isize).rem_euclid(m as isize) as usize];
                    a += w.dec_lo[j] * v;
                    d += w.dec_hi[j] * v;
                }
                ca.push(a);
                cd.push(d);
            }
            Ok((ca, cd))
        }
    }
}

/// One synthesis step producing `out_len` samples.
pub fn idwt_step(
    ca: &[f64],
    cd: &[f64],
    w: &WaveletSpec,
    boundary: Boundary,
    out_len: usize,
) -> Result<Vec<f64>> {
    if ca.len() != cd.len() {
        return Err(Error::ShapeMismatch(format!(
            "approximation has {} coefficients, detail has {}",
            ca.len(),
            cd.len()
        )));
    }
    let n = ca.len();
    let nw = w.nw();
    match boundary {
        Boundary::Symmetric => {
            // upsample, full convolution with the synthesis filters, keep the
            // centre 2n - nw + 2 samples
            let full_len = 2 * n + nw - 2;
            let mut y = vec![0.0; full_len];
            for k in 0..n {
                for j in 0..nw {
                    y[2 * k + j] += ca[k] * w.rec_lo[j] + cd[k] * w.rec_hi[j];
                }
            }
            let start = nw - 2;
            let avail = full_len.saturating_sub(start + nw - 2);
            if out_len > avail {
                return Err(Error::ShapeMismatch(format!(
                    "{n} coefficients cannot reconstruct {out_len} samples"
                )));
            }
            Ok(y[start..start + out_len].to_vec())
        }
        Boundary::Periodization => {
            let m = 2 * n;
            if out_len > m || out_len + 1 < m {
                return Err(Error::ShapeMismatch(format!(
                    "{n} coefficients cannot reconstruct {out_len} samples"
                )));
            }
            let mut y = vec![0.0; m];
            for k in 0..n {
                let centre = 2 * k as isize + 1;
                for j in 0..nw {
                    let idx = (centre - j as isize).rem_euclid(m as isize) as usize;
                    y[idx] += w.dec_lo[j] * ca[k] + w.dec_hi[j] * cd[k];
                }
            }
            y.truncate(out_len);
            Ok(y)
        }
    }
}

/// Multilevel decomposition, `1 <= levels <= max_level(n, nw)`.
pub fn wavedec(x: &[f64], w: &WaveletSpec, levels: usize) -> Result<Decomposition> {
    let max = max_level(x.len(), w.nw());
    if levels == 0 || levels > max {
        return Err(Error::LevelOutOfRange { level: levels, max });
    }
    decompose(x, w, levels, Boundary::Symmetric)
}

/// Multilevel decomposition without the [`max_level`] cap. Deep levels are
/// dominated by boundary coefficients but the bank still reconstructs
/// exactly; the only requirement is that every analysed level has at least
/// two samples.
pub fn wavedec_any_depth(
    x: &[f64],
    w: &WaveletSpec,
    levels: usize,
    boundary: Boundary,
) -> Result<Decomposition> {
    let lens = level_lengths(x.len(), w.nw(), boundary, levels);
    let structural = lens.iter().take_while(|&&l| l >= 2).count();
    if levels == 0 || levels > structural {
        return Err(Error::LevelOutOfRange {
            level: levels,
            max: structural,
        });
    }
    decompose(x, w, levels, boundary)
}

fn decompose(
    x: &[f64],
    w: &WaveletSpec,
    levels: usize,
    boundary: Boundary,
) -> Result<Decomposition> {
    let mut approx = x.to_vec();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (ca, cd) = dwt_step(&approx, w, boundary)?;
        details.push(cd);
        approx = ca;
    }
    Ok(Decomposition {
        wavelet: w.clone(),
        approx,
        details,
        orig_len: x.len(),
        boundary,
    })
}

/// Inverse of [`wavedec`]: synthesis cascade cropped to the original length.
pub fn waverec(d: &Decomposition) -> Result<Vec<f64>> {
    if d.levels() == 0 {
        return Err(Error::ShapeMismatch("decomposition has no levels".into()));
    }
    d.check_shape()?;
    let lens = d.expected_lengths();
    let mut a = d.approx.clone();
    for level in (1..=d.levels()).rev() {
        a = idwt_step(
            &a,
            &d.details[level - 1],
            &d.wavelet,
            d.boundary,
            lens[level - 1],
        )?;
    }
    Ok(a)
}
