use std::f64::consts::PI;

use num_complex::Complex64;

use super::Signal;
use crate::error::{Error, Result};

/// Second-order IIR section, normalized so that `a0 = 1`.
///
/// Designs follow the bilinear-transform cookbook forms. Filtering uses the
/// transposed direct form II and starts from the steady state for the first
/// input sample, so a constant input produces a constant output from the
/// first sample on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 3],
}

impl Biquad {
    fn from_raw(b: [f64; 3], a: [f64; 3]) -> Self {
        let a0 = a[0];
        Self {
            b: [b[0] / a0, b[1] / a0, b[2] / a0],
            a: [1.0, a[1] / a0, a[2] / a0],
        }
    }

    fn check(f0: f64, fs: f64) -> Result<()> {
        let nyquist = fs / 2.0;
        if !(f0 > 0.0 && f0 < nyquist) {
            return Err(Error::InvalidFrequency { f0, nyquist });
        }
        Ok(())
    }

    /// Notch with a zero pair on the unit circle at `f0`; bandwidth `f0 / q`.
    pub fn notch(f0: f64, q: f64, fs: f64) -> Result<Self> {
        Self::check(f0, fs)?;
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quality factor must be positive, got {q}"
            )));
        }
        let w0 = 2.0 * PI * f0 / fs;
        let alpha = w0.sin() / (2.0 * q);
        let c = w0.cos();
        Ok(Self::from_raw(
            [1.0, -2.0 * c, 1.0],
            [1.0 + alpha, -2.0 * c, 1.0 - alpha],
        ))
    }

    /// Butterworth (Q = 1/sqrt 2) low-pass.
    pub fn lowpass(fc: f64, fs: f64) -> Result<Self> {
        Self::check(fc, fs)?;
        let w0 = 2.0 * PI * fc / fs;
        let alpha = w0.sin() / (2.0 * std::f64::consts::FRAC_1_SQRT_2);
        let c = w0.cos();
        Ok(Self::from_raw(
            [(1.0 - c) / 2.0, 1.0 - c, (1.0 - c) / 2.0],
            [1.0 + alpha, -2.0 * c, 1.0 - alpha],
        ))
    }

    /// Butterworth (Q = 1/sqrt 2) high-pass.
    pub fn highpass(fc: f64, fs: f64) -> Result<Self> {
        Self::check(fc, fs)?;
        let w0 = 2.0 * PI * fc / fs;
        let alpha = w0.sin() / (2.0 * std::f64::consts::FRAC_1_SQRT_2);
        let c = w0.cos();
        Ok(Self::from_raw(
            [(1.0 + c) / 2.0, -(1.0 + c), (1.0 + c) / 2.0],
            [1.0 + alpha, -2.0 * c, 1.0 - alpha],
        ))
    }

    /// Complex frequency response at `f` Hz.
    pub fn response(&self, f: f64, fs: f64) -> Complex64 {
        let z1 = Complex64::from_polar(1.0, -2.0 * PI * f / fs);
        let z2 = z1 * z1;
        (self.b[0] + self.b[1] * z1 + self.b[2] * z2) / (1.0 + self.a[1] * z1 + self.a[2] * z2)
    }

    pub fn dc_gain(&self) -> f64 {
        (self.b[0] + self.b[1] + self.b[2]) / (1.0 + self.a[1] + self.a[2])
    }

    /// Internal state that a constant unit input would settle to.
    fn unit_steady_state(&self) -> [f64; 2] {
        let g = self.dc_gain();
        let z2 = self.b[2] - self.a[2] * g;
        let z1 = self.b[1] - self.a[1] * g + z2;
        [z1, z2]
    }

    pub fn filter(&self, x: &[f64]) -> Vec<f64> {
        let Some(&x0) = x.first() else {
            return Vec::new();
        };
        let zi = self.unit_steady_state();
        self.run(x, [zi[0] * x0, zi[1] * x0])
    }

    fn run(&self, x: &[f64], mut z: [f64; 2]) -> Vec<f64> {
        let [b0, b1, b2] = self.b;
        let [_, a1, a2] = self.a;
        x.iter()
            .map(|&v| {
                let y = b0 * v + z[0];
                z[0] = b1 * v - a1 * y + z[1];
                z[1] = b2 * v - a2 * y;
                y
            })
            .collect()
    }

    /// Zero-phase forward-backward filtering with odd-reflection padding.
    pub fn filtfilt(&self, x: &[f64]) -> Vec<f64> {
        filtfilt_cascade(std::slice::from_ref(self), x)
    }
}

/// Forward-backward application of a cascade of sections. The effective
/// magnitude response is the squared product of the sections and the phase
/// is zero.
pub fn filtfilt_cascade(sections: &[Biquad], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let pad = (3 * 3 * sections.len()).min(n - 1);
    let mut ext = Vec::with_capacity(n + 2 * pad);
    for i in (1..=pad).rev() {
        ext.push(2.0 * x[0] - x[i]);
    }
    ext.extend_from_slice(x);
    for i in 1..=pad {
        ext.push(2.0 * x[n - 1] - x[n - 1 - i]);
    }
    for s in sections {
        ext = s.filter(&ext);
    }
    ext.reverse();
    for s in sections {
        ext = s.filter(&ext);
    }
    ext.reverse();
    ext[pad..pad + n].to_vec()
}

/// Second-order IIR notch at `f0` Hz with quality factor `q`.
pub fn notch_filter(s: &Signal, f0: f64, q: f64) -> Result<Signal> {
    let nf = Biquad::notch(f0, q, s.fs())?;
    s.derive(nf.filter(s.samples()), s.fs())
}
