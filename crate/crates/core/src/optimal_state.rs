//! Amplitudes of two-mode pure states `sum_mu psi_mu |j+mu>_a |j-mu>_b`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spin::{HalfInt, SpinRange, MAX_PHOTONS};

/// Normalization tolerance for externally supplied amplitudes.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Real amplitudes `psi_mu`, stored densely from `mu = -j` to `mu = +j`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector {
    j: HalfInt,
    psi: Vec<f64>,
}

impl AmplitudeVector {
    /// Wraps caller-supplied amplitudes ordered from `mu = -j` upward.
    ///
    /// The vector must already be normalized; it is never rescaled here.
    pub fn from_amplitudes(psi: Vec<f64>) -> Result<Self> {
        if psi.is_empty() {
            return Err(Error::LengthMismatch { expected: 1, got: 0 });
        }
        let n = (psi.len() - 1) as u32;
        if n > MAX_PHOTONS {
            return Err(Error::TooManyPhotons { n, max: MAX_PHOTONS });
        }
        if let Some(i) = psi.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFiniteAmplitude(i));
        }
        let norm_sqr: f64 = psi.iter().map(|p| p * p).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(AmplitudeVector {
            j: HalfInt::from_photon_number(n),
            psi,
        })
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn photon_number(&self) -> u32 {
        self.j.twice() as u32
    }

    pub fn range(&self) -> SpinRange {
        SpinRange::new(self.j).expect("j is non-negative")
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.psi
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    /// `psi_mu`, or `None` when `mu` is not in `-j..=j`.
    pub fn get(&self, mu: HalfInt) -> Option<f64> {
        self.range().index_of(mu).map(|i| self.psi[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (HalfInt, f64)> + '_ {
        self.range().iter().zip(self.psi.iter().copied())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.psi.iter().map(|p| p * p).sum()
    }
}

/// The state minimizing the Holevo variance of a lossless canonical phase
/// measurement with `n` photons:
/// `psi_mu = sin((mu + j + 1) pi / (2j + 2)) / sqrt(j + 1)`.
pub fn optimal_amplitudes(n: u32) -> Result<AmplitudeVector> {
    if n == 0 {
        return Err(Error::TooFewPhotons { n, min: 1 });
    }
    if n > MAX_PHOTONS {
        return Err(Error::TooManyPhotons { n, max: MAX_PHOTONS });
    }
    let j = HalfInt::from_photon_number(n);
    let j1 = j.to_f64() + 1.0;
    let scale = j1.sqrt().recip();
    // mu + j + 1 runs over 1..=n+1.
    let psi = (1..=n + 1)
        .map(|p| scale * (f64::from(p) * PI / (2.0 * j1)).sin())
        .collect();
    Ok(AmplitudeVector { j, psi })
}
