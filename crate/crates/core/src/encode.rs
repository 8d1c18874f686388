//! Time-series to image encoders and grayscale export.
//!
//! * Gramian angular fields (GASF/GADF) from the polar encoding
//!   `phi = arccos(x)`, `r = i / N`.
//! * Recurrence plots, raw distances or thresholded.
//! * Markov transition fields over quantile bins.
//! * Three-channel fusion by area-weighted mean pooling.

use std::io;
use std::path::Path;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::timefreq::TimeFrequencyMap;

/// Samples may exceed `[-1, 1]` by this much before [`to_polar`] rejects them.
pub const NORM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PolarSeries {
    /// Angles in `[0, pi]`.
    pub phi: Vec<f64>,
    /// `i / N` for `i = 1..=N`.
    pub r: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageKind {
    Gasf,
    Gadf,
    RpRaw,
    RpBinary,
    Mtf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedImage {
    pub kind: ImageKind,
    pub values: Array2<f64>,
}

impl EncodedImage {
    /// Side length of a square image.
    pub fn size(&self) -> usize {
        self.values.nrows()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GafKind {
    #[default]
    Gasf,
    Gadf,
}

impl FromStr for GafKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gasf" => Ok(GafKind::Gasf),
            "gadf" => Ok(GafKind::Gadf),
            other => Err(Error::InvalidParameter(format!(
                "unknown angular field {other:?}, expected gasf or gadf"
            ))),
        }
    }
}

pub fn to_polar(x: &[f64]) -> Result<PolarSeries> {
    if let Some((index, &value)) = x
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.abs() <= 1.0 + NORM_SLACK))
    {
        return Err(Error::NotNormalized { index, value });
    }
    let n = x.len() as f64;
    Ok(PolarSeries {
        phi: x.iter().map(|v| v.clamp(-1.0, 1.0).acos()).collect(),
        r: (1..=x.len()).map(|i| i as f64 / n).collect(),
    })
}

/// Fill an `n x n` matrix from `f(i, j)` evaluated on the upper triangle,
/// mirroring with `mirror` for the lower one.
fn pairwise(n: usize, f: impl Fn(usize, usize) -> f64, mirror: impl Fn(f64) -> f64) -> Array2<f64> {
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v = f(i, j);
            m[[i, j]] = v;
            m[[j, i]] = if i == j { v } else { mirror(v) };
        }
    }
    m
}

/// `cos(phi_i + phi_j)` for GASF, `sin(phi_i - phi_j)` for GADF.
pub fn gaf(x: &[f64], kind: GafKind) -> Result<EncodedImage> {
    let p = to_polar(x)?;
    let phi = &p.phi;
    let n = phi.len();
    Ok(match kind {
        GafKind::Gasf => EncodedImage {
            kind: ImageKind::Gasf,
            values: pairwise(n, |i, j| (phi[i] + phi[j]).cos(), |v| v),
        },
        GafKind::Gadf => EncodedImage {
            kind: ImageKind::Gadf,
            values: pairwise(
                n,
                |i, j| if i == j { 0.0 } else { (phi[i] - phi[j]).sin() },
                |v| -v,
            ),
        },
    })
}

/// `|x_i - x_j|`, or with `eps` the indicator `|x_i - x_j| <= eps`.
pub fn recurrence_plot(x: &[f64], eps: Option<f64>) -> Result<EncodedImage> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = x.len();
    let dist = |i: usize, j: usize| (x[i] - x[j]).abs();
    Ok(match eps {
        None => EncodedImage {
            kind: ImageKind::RpRaw,
            values: pairwise(n, dist, |v| v),
        },
        Some(e) if e > 0.0 => EncodedImage {
            kind: ImageKind::RpBinary,
            values: pairwise(
                n,
                |i, j| if e - dist(i, j) >= 0.0 { 1.0 } else { 0.0 },
                |v| v,
            ),
        },
        Some(e) => return Err(Error::NonPositiveEpsilon(e)),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantileBinning {
    pub q: usize,
    /// `q - 1` nondecreasing thresholds.
    pub edges: Vec<f64>,
    /// Bin of each sample, in `1..=q`.
    pub assignment: Vec<usize>,
}

impl QuantileBinning {
    /// Bin of a value: one more than the number of edges strictly below it.
    pub fn bin_of(&self, v: f64) -> usize {
        1 + self.edges.partition_point(|&e| e < v)
    }
}

/// Empirical quantile with linear interpolation between order statistics.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Split samples into `q` bins at the `k / q` quantiles.
pub fn quantile_bins(x: &[f64], q: usize) -> Result<QuantileBinning> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 bins, got {q}"
        )));
    }
    if x.len() < q {
        return Err(Error::TooFewSamples {
            got: x.len(),
            bins: q,
        });
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted[0] == sorted[sorted.len() - 1] {
        return Err(Error::DegenerateData);
    }
    let edges: Vec<f64> = (1..q)
        .map(|k| quantile_sorted(&sorted, k as f64 / q as f64))
        .collect();
    let mut b = QuantileBinning {
        q,
        edges,
        assignment: Vec::new(),
    };
    b.assignment = x.iter().map(|&v| b.bin_of(v)).collect();
    Ok(b)
}

/// Everything computed on the way to a Markov transition field.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovTransition {
    pub binning: QuantileBinning,
    /// `counts[a][b]`: transitions from bin `a + 1` to bin `b + 1`.
    pub counts: Array2<f64>,
    /// Row-normalized `counts`; rows without transitions are uniform.
    pub w: Array2<f64>,
    pub field: EncodedImage,
}

pub fn markov_transition(x: &[f64], q: usize) -> Result<MarkovTransition> {
    let binning = quantile_bins(x, q)?;
    let a = &binning.assignment;
    let mut counts = Array2::<f64>::zeros((q, q));
    for pair in a.windows(2) {
        counts[[pair[0] - 1, pair[1] - 1]] += 1.0;
    }
    let mut w = counts.clone();
    for mut row in w.rows_mut() {
        let total = row.sum();
        if total > 0.0 {
            row.mapv_inplace(|c| c / total);
        } else {
            row.fill(1.0 / q as f64);
        }
    }
    let n = a.len();
    let values = Array2::from_shape_fn((n, n), |(i, j)| w[[a[i] - 1, a[j] - 1]]);
    Ok(MarkovTransition {
        binning,
        counts,
        w,
        field: EncodedImage {
            kind: ImageKind::Mtf,
            values,
        },
    })
}

/// `M_ij = W[bin(x_i)][bin(x_j)]`.
pub fn mtf(x: &[f64], q: usize) -> Result<EncodedImage> {
    Ok(markov_transition(x, q)?.field)
}

/// Channels in the order (angular field, recurrence plot, transition field).
#[derive(Debug, Clone, PartialEq)]
pub struct FusedImage {
    pub channels: [EncodedImage; 3],
}

impl FusedImage {
    pub fn size(&self) -> usize {
        self.channels[0].size()
    }

    /// All pixels, channel after channel, each in row-major order.
    pub fn features(&self) -> Vec<f64> {
        self.channels
            .iter()
            .flat_map(|c| c.values.iter().copied())
            .collect()
    }
}

/// `size x n` averaging operator: output cell `o` covers source interval
/// `[o n / size, (o + 1) n / size)` and weights each source cell by overlap.
fn pooling_operator(n: usize, size: usize) -> Array2<f64> {
    let mut p = Array2::zeros((size, n));
    let step = n as f64 / size as f64;
    for o in 0..size {
        let (lo, hi) = (o as f64 * step, (o + 1) as f64 * step);
        let first = lo.floor() as usize;
        let last = (hi.ceil() as usize).min(n);
        for i in first..last {
            let overlap = hi.min(i as f64 + 1.0) - lo.max(i as f64);
            if overlap > 0.0 {
                p[[o, i]] = overlap / step;
            }
        }
    }
    p
}

fn pool(m: &Array2<f64>, size: usize) -> Array2<f64> {
    let n = m.nrows();
    if n == size {
        return m.clone();
    }
    let p = pooling_operator(n, size);
    p.dot(m).dot(&p.t())
}

/// Resize three square channels to `size x size` and stack them.
pub fn fuse(
    gaf: &EncodedImage,
    rp: &EncodedImage,
    mtf: &EncodedImage,
    size: usize,
) -> Result<FusedImage> {
    if size == 0 {
        return Err(Error::InvalidParameter(
            "fused image size must be >= 1".into(),
        ));
    }
    for (channel, img) in [gaf, rp, mtf].into_iter().enumerate() {
        let (rows, cols) = img.values.dim();
        if rows != cols || rows == 0 {
            return Err(Error::NonSquareChannel {
                channel,
                rows,
                cols,
            });
        }
    }
    let resize = |img: &EncodedImage| EncodedImage {
        kind: img.kind,
        values: pool(&img.values, size),
    };
    Ok(FusedImage {
        channels: [resize(gaf), resize(rp), resize(mtf)],
    })
}

/// Parameters of [`encode_fused`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncoderParams {
    pub gaf: GafKind,
    pub rp_eps: Option<f64>,
    pub mtf_bins: usize,
    pub fuse_size: usize,
}

impl Default for EncoderParams {
    fn default() -> Self {
        Self {
            gaf: GafKind::Gasf,
            rp_eps: None,
            mtf_bins: 8,
            fuse_size: 64,
        }
    }
}

/// Angular field, recurrence plot and transition field of one normalized
/// series, fused.
pub fn encode_fused(x: &[f64], p: &EncoderParams) -> Result<FusedImage> {
    fuse(
        &gaf(x, p.gaf)?,
        &recurrence_plot(x, p.rp_eps)?,
        &mtf(x, p.mtf_bins)?,
        p.fuse_size,
    )
}

/// Anything that can be rendered as a single grayscale matrix.
pub trait GrayMatrix {
    fn gray_values(&self) -> Array2<f64>;
}

impl GrayMatrix for Array2<f64> {
    fn gray_values(&self) -> Array2<f64> {
        self.clone()
    }
}

impl GrayMatrix for EncodedImage {
    fn gray_values(&self) -> Array2<f64> {
        self.values.clone()
    }
}

impl GrayMatrix for TimeFrequencyMap {
    fn gray_values(&self) -> Array2<f64> {
        self.magnitude()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrayMapping {
    /// Minimum to 0, maximum to 255, linear in between; constant maps to 128.
    #[default]
    LinearGray,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageFormat {
    /// Binary portable graymap (P5).
    Pgm,
    Png,
}

impl ImageFormat {
    /// `.png` selects PNG, anything else PGM.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("png") => ImageFormat::Png,
            _ => ImageFormat::Pgm,
        }
    }
}

/// 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayRaster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayRaster {
    pub fn from_matrix(m: &Array2<f64>, mapping: GrayMapping) -> Result<Self> {
        let (height, width) = m.dim();
        if m.is_empty() {
            return Err(Error::EmptyInput);
        }
        let GrayMapping::LinearGray = mapping;
        let (lo, hi) = m
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            });
        let pixels = if hi > lo {
            m.iter()
                .map(|&v| ((v - lo) / (hi - lo) * 255.0).round().clamp(0.0, 255.0) as u8)
                .collect()
        } else {
            vec![128; width * height]
        };
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Place rasters of equal height next to each other, left to right.
    pub fn side_by_side(panels: &[GrayRaster]) -> Result<Self> {
        let height = panels.first().ok_or(Error::EmptyInput)?.height;
        if let Some(p) = panels.iter().find(|p| p.height != height) {
            return Err(Error::DimensionMismatch {
                expected: height,
                got: p.height,
            });
        }
        let width = panels.iter().map(|p| p.width).sum();
        let mut pixels = Vec::with_capacity(width * height);
        for row in 0..height {
            for p in panels {
                pixels.extend_from_slice(&p.pixels[row * p.width..(row + 1) * p.width]);
            }
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn to_png(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        let to_io = |e: png::EncodingError| Error::io("<png encoder>", io::Error::other(e));
        {
            let mut enc = png::Encoder::new(&mut out, self.width as u32, self.height as u32);
            enc.set_color(png::ColorType::Grayscale);
            enc.set_depth(png::BitDepth::Eight);
            let mut w = enc.write_header().map_err(to_io)?;
            w.write_image_data(&self.pixels).map_err(to_io)?;
        }
        Ok(out)
    }

    /// Write atomically in the given format.
    pub fn save(&self, path: &Path, format: ImageFormat) -> Result<()> {
        let bytes = match format {
            ImageFormat::Pgm => self.to_pgm(),
            ImageFormat::Png => self.to_png()?,
        };
        write_atomic(path, &bytes)
    }
}

/// Render a matrix-like value to an 8-bit grayscale file.
pub fn export_image(
    m: &impl GrayMatrix,
    path: impl AsRef<Path>,
    mapping: GrayMapping,
    format: ImageFormat,
) -> Result<()> {
    GrayRaster::from_matrix(&m.gray_values(), mapping)?.save(path.as_ref(), format)
}

/// Three panels side by side, each channel mapped to gray independently.
pub fn fused_raster(f: &FusedImage, mapping: GrayMapping) -> Result<GrayRaster> {
    let panels = f
        .channels
        .iter()
        .map(|c| GrayRaster::from_matrix(&c.values, mapping))
        .collect::<Result<Vec<_>>>()?;
    GrayRaster::side_by_side(&panels)
}

pub fn export_fused(
    f: &FusedImage,
    path: impl AsRef<Path>,
    mapping: GrayMapping,
    format: ImageFormat,
) -> Result<()> {
    fused_raster(f, mapping)?.save(path.as_ref(), format)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;
    use std::f64::consts::PI;

    fn close(a: &Array2<f64>, b: &Array2<f64>, tol: f64) -> bool {
        a.dim() == b.dim() && a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn polar_examples() {
        let p = to_polar(&[1.0, -1.0]).unwrap();
        assert_eq!(p.phi, vec![0.0, PI]);
        assert_eq!(p.r, vec![0.5, 1.0]);
        let p = to_polar(&[0.0]).unwrap();
        assert_eq!(p.phi, vec![PI / 2.0]);
        assert_eq!(p.r, vec![1.0]);
        assert!(matches!(
            to_polar(&[0.0, 1.5]),
            Err(Error::NotNormalized { index: 1, .. })
        ));
        assert!(to_polar(&[1.0 + 1e-13]).is_ok());
        assert!(to_polar(&[f64::NAN]).is_err());
    }

    #[test]
    fn gaf_examples() {
        let s = gaf(&[1.0, -1.0], GafKind::Gasf).unwrap();
        assert!(close(&s.values, &arr2(&[[1.0, -1.0], [-1.0, 1.0]]), 1e-12));
        let d = gaf(&[1.0, -1.0], GafKind::Gadf).unwrap();
        assert!(close(&d.values, &arr2(&[[0.0, 0.0], [0.0, 0.0]]), 1e-12));
        let x = [0.3, -0.8, 0.99, 0.0];
        let s = gaf(&x, GafKind::Gasf).unwrap();
        for (i, v) in x.iter().enumerate() {
            assert!((s.values[[i, i]] - (2.0 * v * v - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn recurrence_examples() {
        let r = recurrence_plot(&[0.0, 3.0, 0.0], None).unwrap();
        assert_eq!(r.kind, ImageKind::RpRaw);
        assert_eq!(
            r.values,
            arr2(&[[0.0, 3.0, 0.0], [3.0, 0.0, 3.0], [0.0, 3.0, 0.0]])
        );
        let b = recurrence_plot(&[0.0, 3.0, 0.0], Some(1.0)).unwrap();
        assert_eq!(
            b.values,
            arr2(&[[1.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 1.0]])
        );
        assert_eq!(
            recurrence_plot(&[5.0], None).unwrap().values,
            arr2(&[[0.0]])
        );
        // distance exactly eps counts as a recurrence
        assert_eq!(
            recurrence_plot(&[0.0, 1.0], Some(1.0)).unwrap().values,
            arr2(&[[1.0, 1.0], [1.0, 1.0]])
        );
        assert!(matches!(
            recurrence_plot(&[1.0], Some(0.0)),
            Err(Error::NonPositiveEpsilon(_))
        ));
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(
            quantile_bins(&[1.0, 2.0, 3.0, 4.0], 2).unwrap().assignment,
            vec![1, 1, 2, 2]
        );
        let b = quantile_bins(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 3).unwrap();
        assert_eq!(b.assignment, vec![1, 1, 2, 2, 3, 3]);
        assert!((b.edges[0] - 8.0 / 3.0).abs() < 1e-12 && (b.edges[1] - 13.0 / 3.0).abs() < 1e-12);
        assert!(matches!(
            quantile_bins(&[7.0, 7.0, 7.0], 2),
            Err(Error::DegenerateData)
        ));
        assert!(matches!(
            quantile_bins(&[1.0, 2.0], 3),
            Err(Error::TooFewSamples { got: 2, bins: 3 })
        ));
        assert!(quantile_bins(&[1.0, 2.0], 1).is_err());
        // a value equal to an edge goes to the lower bin
        let b = quantile_bins(&[1.0, 2.0, 3.0], 2).unwrap();
        assert_eq!(b.edges, vec![2.0]);
        assert_eq!(b.assignment, vec![1, 1, 2]);
    }

    #[test]
    fn mtf_examples() {
        let up = markov_transition(&[1.0, 2.0, 3.0, 4.0], 2).unwrap();
        assert_eq!(up.w, arr2(&[[0.5, 0.5], [0.0, 1.0]]));
        assert_eq!(up.field.values[[0, 3]], 0.5);
        assert_eq!(up.field.values[[3, 0]], 0.0);
        assert_eq!(up.field.values[[2, 3]], 1.0);
        let down = markov_transition(&[4.0, 3.0, 2.0, 1.0], 2).unwrap();
        assert_eq!(down.w, arr2(&[[1.0, 0.0], [0.5, 0.5]]));
        assert_eq!(down.counts, up.counts.t());
        // bin 3 is only ever the last sample: no outgoing transitions
        let t = markov_transition(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 3).unwrap();
        assert_eq!(t.w.row(2).to_vec(), vec![0.0, 0.0, 1.0]);
        let t = markov_transition(&[1.0, 5.0, 2.0, 6.0, 3.0, 9.0], 3).unwrap();
        for row in t.w.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
        }
        let empty_row = markov_transition(&[2.0, 1.0, 3.0, 5.0, 4.0, 6.0, 9.0], 3).unwrap();
        assert!(empty_row
            .field
            .values
            .iter()
            .all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn fuse_examples() {
        let img = |v: Array2<f64>, kind| EncodedImage { kind, values: v };
        let a = img(
            Array2::from_shape_fn((64, 64), |(i, j)| (i * 64 + j) as f64),
            ImageKind::Gasf,
        );
        let f = fuse(&a, &a, &a, 64).unwrap();
        assert_eq!(f.channels[0].values, a.values);

        let c = img(Array2::from_elem((4, 4), 2.5), ImageKind::Mtf);
        let f = fuse(&c, &c, &c, 2).unwrap();
        assert!(close(
            &f.channels[2].values,
            &Array2::from_elem((2, 2), 2.5),
            1e-15
        ));

        let m = Array2::from_shape_fn((4, 4), |(i, j)| (i * 4 + j) as f64);
        let f = fuse(&img(m.clone(), ImageKind::Gasf), &c, &c, 2).unwrap();
        for bi in 0..2 {
            for bj in 0..2 {
                let block: f64 = (0..2)
                    .flat_map(|di| (0..2).map(move |dj| (di, dj)))
                    .map(|(di, dj)| m[[2 * bi + di, 2 * bj + dj]])
                    .sum::<f64>()
                    / 4.0;
                assert!((f.channels[0].values[[bi, bj]] - block).abs() < 1e-12);
            }
        }

        let rect = img(Array2::zeros((3, 4)), ImageKind::RpRaw);
        assert!(matches!(
            fuse(&c, &rect, &c, 2),
            Err(Error::NonSquareChannel {
                channel: 1,
                rows: 3,
                cols: 4
            })
        ));
    }

    #[test]
    fn fuse_preserves_mean_for_any_size() {
        let m = Array2::from_shape_fn((10, 10), |(i, j)| ((i * 7 + j * 3) % 11) as f64);
        let e = EncodedImage {
            kind: ImageKind::Gasf,
            values: m.clone(),
        };
        for size in [1, 3, 4, 5, 7, 10, 13] {
            let f = fuse(&e, &e, &e, size).unwrap();
            assert_eq!(f.size(), size);
            let mean = f.channels[0].values.mean().unwrap();
            assert!((mean - m.mean().unwrap()).abs() < 1e-10, "size {size}");
        }
    }

    #[test]
    fn gray_mapping() {
        let r = GrayRaster::from_matrix(&arr2(&[[0.0, 1.0], [1.0, 0.0]]), GrayMapping::LinearGray)
            .unwrap();
        assert_eq!(r.pixels, vec![0, 255, 255, 0]);
        let c = GrayRaster::from_matrix(&Array2::from_elem((3, 2), -4.0), GrayMapping::LinearGray)
            .unwrap();
        assert_eq!((c.width, c.height), (2, 3));
        assert!(c.pixels.iter().all(|&p| p == 128));
        let mid =
            GrayRaster::from_matrix(&arr2(&[[0.0, 0.5, 1.0]]), GrayMapping::LinearGray).unwrap();
        assert_eq!(mid.pixels, vec![0, 128, 255]);
        assert!(GrayRaster::from_matrix(&Array2::zeros((0, 0)), GrayMapping::LinearGray).is_err());
    }

    #[test]
    fn fused_golden_bytes() {
        let gasf = gaf(&[1.0, -1.0], GafKind::Gasf).unwrap();
        let rp = recurrence_plot(&[0.0, 3.0], None).unwrap();
        let flat = EncodedImage {
            kind: ImageKind::Mtf,
            values: Array2::from_elem((2, 2), 0.5),
        };
        let f = fuse(&gasf, &rp, &flat, 2).unwrap();
        let mut expected = b"P5\n6 2\n255\n".to_vec();
        expected.extend_from_slice(&[255, 0, 0, 255, 128, 128, 0, 255, 255, 0, 128, 128]);
        assert_eq!(
            fused_raster(&f, GrayMapping::LinearGray).unwrap().to_pgm(),
            expected
        );
    }

    #[test]
    fn files_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let m = arr2(&[[0.0, 2.0, 4.0], [4.0, 2.0, 0.0]]);
        let pgm = dir.path().join("m.pgm");
        let png_path = dir.path().join("m.png");
        export_image(&m, &pgm, GrayMapping::LinearGray, ImageFormat::Pgm).unwrap();
        export_image(
            &m,
            &png_path,
            GrayMapping::LinearGray,
            ImageFormat::from_path(&png_path),
        )
        .unwrap();
        let bytes = std::fs::read(&pgm).unwrap();
        assert_eq!(&bytes[..11], b"P5\n3 2\n255\n");
        assert_eq!(&bytes[11..], &[0, 128, 255, 255, 128, 0]);

        let decoder = png::Decoder::new(std::io::BufReader::new(
            std::fs::File::open(&png_path).unwrap(),
        ));
        let mut reader = decoder.read_info().unwrap();
        let mut buf = vec![0; reader.output_buffer_size().unwrap()];
        let info = reader.next_frame(&mut buf).unwrap();
        assert_eq!((info.width, info.height), (3, 2));
        assert_eq!(&buf[..info.buffer_size()], &bytes[11..]);

        let bad = dir.path().join("missing").join("x.pgm");
        assert!(export_image(&m, &bad, GrayMapping::LinearGray, ImageFormat::Pgm).is_err());
    }
}
