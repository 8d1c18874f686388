use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Rectangular,
    Hamming,
    Hann,
    Blackman,
    Kaiser { beta: f64 },
}

/// A symmetric analysis window of fixed length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub kind: WindowKind,
    pub length: usize,
}

impl WindowSpec {
    pub fn new(kind: WindowKind, length: usize) -> Result<Self> {
        if length == 0 {
            return Err(Error::InvalidParameter("window length must be >= 1".into()));
        }
        if let WindowKind::Kaiser { beta } = kind {
            if !(beta.is_finite() && beta >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "kaiser beta must be >= 0, got {beta}"
                )));
            }
        }
        Ok(Self { kind, length })
    }

    pub fn weights(&self) -> Vec<f64> {
        let n = self.length;
        if n == 1 {
            return vec![1.0];
        }
        let m = (n - 1) as f64;
        (0..n)
            .map(|i| {
                let x = i as f64 / m;
                let w = match self.kind {
                    WindowKind::Rectangular => 1.0,
                    WindowKind::Hamming => 0.54 - 0.46 * (2.0 * PI * x).cos(),
                    WindowKind::Hann => 0.5 - 0.5 * (2.0 * PI * x).cos(),
                    WindowKind::Blackman => {
                        0.42 - 0.5 * (2.0 * PI * x).cos() + 0.08 * (4.0 * PI * x).cos()
                    }
                    WindowKind::Kaiser { beta } => {
                        let r = 2.0 * x - 1.0;
                        bessel_i0(beta * (1.0 - r * r).max(0.0).sqrt()) / bessel_i0(beta)
                    }
                };
                w.max(0.0)
            })
            .collect()
    }
}

/// Modified Bessel function of the first kind, order zero (power series).
pub(crate) fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        term *= q / (k * k) as f64;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}
