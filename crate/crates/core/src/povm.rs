//! Canonical phase measurement: the phase distribution `P(phi)`, its
//! sharpness `|<e^{i phi}>|` and the Holevo variance.
//!
//! The canonical POVM only resolves states with all `2j` photons inside the
//! interferometer, so under loss `P(phi)` integrates to less than one. The
//! default [`SharpnessMode::Raw`] uses that sub-normalized distribution as is;
//! [`SharpnessMode::Normalized`] divides the sharpness by the total weight.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::loss_channel::{LossChannel, ReducedDensity};
use crate::optimal_state::AmplitudeVector;
use crate::spin::HalfInt;

/// Sharpness values this far above one are treated as rounding and clamped.
const SHARPNESS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SharpnessMode {
    /// First Fourier coefficient of the sub-normalized distribution.
    #[default]
    Raw,
    /// Raw sharpness divided by the integral of `P(phi)`. Not the quantity
    /// the optimal state was derived for.
    Normalized,
}

impl SharpnessMode {
    pub fn label(self) -> &'static str {
        match self {
            SharpnessMode::Raw => "raw",
            SharpnessMode::Normalized => "normalized",
        }
    }
}

/// `P(phi) = sum_{mu,nu} c_{mu nu} e^{i (nu - mu) phi}` over `mu, nu` in `-j..=j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDistribution {
    j: HalfInt,
    coeff: DMatrix<f64>,
    // g with c = g g^T / (2 pi), when known
    factor: Option<DVector<f64>>,
    // diagonal sums: diag[q + 2j] = sum_{nu - mu = q} c_{mu nu}
    diag: Vec<f64>,
}

impl PhaseDistribution {
    fn from_coefficients(j: HalfInt, coeff: DMatrix<f64>, factor: Option<DVector<f64>>) -> Self {
        let size = coeff.nrows();
        let mut diag = vec![0.0; 2 * size - 1];
        for mu in 0..size {
            for nu in 0..size {
                diag[nu + size - 1 - mu] += coeff[(mu, nu)];
            }
        }
        PhaseDistribution {
            j,
            coeff,
            factor,
            diag,
        }
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    /// `c_{mu nu}`, rows and columns ordered from `-j`.
    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.coeff
    }

    fn diagonal_sum(&self, q: i64) -> f64 {
        let offset = q + self.coeff.nrows() as i64 - 1;
        usize::try_from(offset)
            .ok()
            .and_then(|i| self.diag.get(i).copied())
            .unwrap_or(0.0)
    }

    /// `P(phi)`; real because the coefficient matrix is symmetric. Factorized
    /// distributions are evaluated as `|sum_mu g_mu e^{-i mu phi}|^2 / (2 pi)`,
    /// which is non-negative by construction.
    pub fn eval(&self, phi: f64) -> f64 {
        if let Some(g) = &self.factor {
            let (mut re, mut im) = (0.0, 0.0);
            for (i, &gi) in g.iter().enumerate() {
                let (s, c) = (i as f64 * phi).sin_cos();
                re += gi * c;
                im += gi * s;
            }
            return (re * re + im * im) / (2.0 * PI);
        }
        let top = self.coeff.nrows() as i64 - 1;
        let mut p = self.diagonal_sum(0);
        for q in 1..=top {
            p += (self.diagonal_sum(q) + self.diagonal_sum(-q)) * (q as f64 * phi).cos();
        }
        p
    }

    /// `int_0^{2 pi} P(phi) e^{i q phi} d phi`, exact for the trigonometric
    /// polynomial. Real since the coefficients are.
    pub fn fourier(&self, q: i64) -> f64 {
        2.0 * PI * self.diagonal_sum(-q)
    }

    /// `int_0^{2 pi} P(phi) d phi`.
    pub fn integral(&self) -> f64 {
        self.fourier(0)
    }

    /// `|<e^{i phi}>|` with the mean phase taken as zero.
    pub fn sharpness(&self, mode: SharpnessMode) -> f64 {
        let s = self.fourier(1).abs();
        match mode {
            SharpnessMode::Raw => s,
            SharpnessMode::Normalized => s / self.integral(),
        }
    }

    /// `P(phi)` on `samples` equally spaced points of `[0, 2 pi)`.
    pub fn sample(&self, samples: usize) -> Result<Vec<(f64, f64)>> {
        let min = nyquist_samples(self.j);
        if samples < min {
            return Err(Error::TooFewSamples {
                what: "phase distribution",
                min,
                got: samples,
            });
        }
        let step = 2.0 * PI / samples as f64;
        Ok((0..samples)
            .map(|i| {
                let phi = i as f64 * step;
                (phi, self.eval(phi))
            })
            .collect())
    }
}

/// Smallest sample count that resolves every harmonic of a spin-`j` distribution.
pub fn nyquist_samples(j: HalfInt) -> usize {
    4 * (j.twice() as usize + 1)
}

/// Weights `g_mu = psi_mu (1 - L)^{(j + mu) / 2}`: amplitude left in the
/// zero-lost-photon sector.
fn surviving_amplitudes(state: &AmplitudeVector, ch: &LossChannel) -> Vec<f64> {
    let ln_t = ch.ln_transmission();
    state
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &psi)| {
            // j + mu = i photons in arm a
            if i == 0 {
                psi
            } else {
                psi * (0.5 * i as f64 * ln_t).exp()
            }
        })
        .collect()
}

/// Phase distribution of `state` after loss, built in factorized form
/// `c_{mu nu} = g_mu g_nu / (2 pi)`.
pub fn distribution(state: &AmplitudeVector, ch: &LossChannel) -> PhaseDistribution {
    let g = DVector::from_vec(surviving_amplitudes(state, ch));
    let coeff = (&g * g.transpose()) / (2.0 * PI);
    PhaseDistribution::from_coefficients(state.j(), coeff, Some(g))
}

/// Phase distribution from `Tr[rho' F(phi)]`.
///
/// The POVM elements act on the `2j`-photon sector, so only the zero-lost-photon
/// block of `rho'` contributes.
pub fn distribution_from_density(rho: &ReducedDensity) -> PhaseDistribution {
    let size = rho.j().twice() as usize + 1;
    let coeff = match rho.block(0) {
        Some(block) => block.matrix() / (2.0 * PI),
        None => DMatrix::zeros(size, size),
    };
    PhaseDistribution::from_coefficients(rho.j(), coeff, None)
}

/// `int P(phi) d phi = sum_mu psi_mu^2 (1 - L)^{j + mu}` without building the distribution.
pub fn total_weight(state: &AmplitudeVector, ch: &LossChannel) -> f64 {
    surviving_amplitudes(state, ch).iter().map(|g| g * g).sum()
}

/// Sharpness after loss in closed form:
/// `sum_mu psi_mu psi_{mu-1} (1 - L)^{j + mu - 1/2}`.
pub fn sharpness_closed(state: &AmplitudeVector, ch: &LossChannel) -> Result<f64> {
    sharpness_closed_with(state, ch, SharpnessMode::Raw)
}

pub fn sharpness_closed_with(
    state: &AmplitudeVector,
    ch: &LossChannel,
    mode: SharpnessMode,
) -> Result<f64> {
    if state.photon_number() == 0 {
        return Err(Error::TooFewPhotons { n: 0, min: 1 });
    }
    let ln_t = ch.ln_transmission();
    let psi = state.as_slice();
    // Pair (mu - 1, mu) with mu at dense index i: exponent j + mu - 1/2 = i - 1/2.
    let raw: f64 = (1..psi.len())
        .map(|i| {
            let weight = if ln_t == 0.0 {
                1.0
            } else {
                ((i as f64 - 0.5) * ln_t).exp()
            };
            psi[i] * psi[i - 1] * weight
        })
        .sum::<f64>()
        .abs();
    Ok(match mode {
        SharpnessMode::Raw => raw,
        SharpnessMode::Normalized => raw / total_weight(state, ch),
    })
}

/// Sharpness together with the Holevo variance `S^{-2} - 1` it implies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseEstimate {
    pub sharpness: f64,
    pub holevo_variance: f64,
    pub min_detectable_phase: f64,
}

impl PhaseEstimate {
    /// True when the sharpness vanished and the variance is infinite.
    pub fn is_divergent(&self) -> bool {
        self.holevo_variance.is_infinite()
    }
}

/// Holevo variance for a given sharpness. Zero sharpness gives an infinite
/// variance rather than an error.
pub fn holevo(sharpness: f64) -> Result<PhaseEstimate> {
    if !(0.0..=1.0 + SHARPNESS_SLACK).contains(&sharpness) {
        return Err(Error::InvalidSharpness(sharpness));
    }
    let sharpness = sharpness.min(1.0);
    let holevo_variance = if sharpness == 0.0 {
        f64::INFINITY
    } else {
        (sharpness * sharpness).recip() - 1.0
    };
    Ok(PhaseEstimate {
        sharpness,
        holevo_variance,
        min_detectable_phase: holevo_variance.sqrt(),
    })
}

/// Holevo variance `tan^2(pi / (N + 2))` of the lossless optimal state.
pub fn lossless_reference(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::TooFewPhotons { n, min: 1 });
    }
    Ok((PI / (f64::from(n) + 2.0)).tan().powi(2))
}

/// Runs the closed-form pipeline for the optimal `n`-photon state.
pub fn optimal_estimate(n: u32, ch: &LossChannel, mode: SharpnessMode) -> Result<PhaseEstimate> {
    let state = crate::optimal_state::optimal_amplitudes(n)?;
    holevo(sharpness_closed_with(&state, ch, mode)?)
}
