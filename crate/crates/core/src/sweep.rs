//! Minimum detectable phase versus photon number, the optimal photon number
//! for a given loss, and the largest photon number that still beats the
//! shot-noise limit.
//!
//! Every point uses the closed-form sharpness, so a scan is `O(N^2)` overall.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::loss_channel::LossChannel;
use crate::povm::{optimal_estimate, SharpnessMode};

/// Default upper end of photon-number scans.
pub const DEFAULT_N_MAX: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub n: u32,
    /// `sqrt` of the Holevo variance; infinite when the sharpness vanished.
    pub delta_phi: f64,
    /// `1 / sqrt(N)`
    pub shot_noise: f64,
    /// `tan(pi / (N + 2))`, the lossless optimum.
    pub heisenberg: f64,
}

impl CurvePoint {
    pub fn is_sub_shot_noise(&self) -> bool {
        self.delta_phi < self.shot_noise
    }
}

/// Result of locating a photon number inside a finite scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanOutcome {
    Found(u32),
    /// The feature runs into the upper end of the scan.
    AtBoundary,
    /// Nothing in the scanned range qualifies.
    Absent,
}

impl ScanOutcome {
    pub fn value(self) -> Option<u32> {
        match self {
            ScanOutcome::Found(n) => Some(n),
            _ => None,
        }
    }

    /// Text used in data files for outcomes without a number.
    pub fn label(self) -> String {
        match self {
            ScanOutcome::Found(n) => n.to_string(),
            ScanOutcome::AtBoundary | ScanOutcome::Absent => "none".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub loss: f64,
    pub mode: SharpnessMode,
    pub points: Vec<CurvePoint>,
    pub n_opt: ScanOutcome,
    pub n_subshot_max: ScanOutcome,
}

fn check_range(n_min: u32, n_max: u32) -> Result<()> {
    if n_min == 0 || n_min > n_max {
        return Err(Error::InvalidRange { lo: n_min, hi: n_max });
    }
    Ok(())
}

/// `delta_phi(N)` for every `N` in `n_min..=n_max`.
pub fn curve(loss: f64, n_min: u32, n_max: u32) -> Result<SweepResult> {
    curve_with(loss, n_min, n_max, SharpnessMode::Raw)
}

pub fn curve_with(loss: f64, n_min: u32, n_max: u32, mode: SharpnessMode) -> Result<SweepResult> {
    check_range(n_min, n_max)?;
    let ch = LossChannel::from_loss(loss)?;
    let points = (n_min..=n_max)
        .into_par_iter()
        .map(|n| {
            let est = optimal_estimate(n, &ch, mode)?;
            let nf = f64::from(n);
            Ok(CurvePoint {
                n,
                delta_phi: est.min_detectable_phase,
                shot_noise: nf.sqrt().recip(),
                heisenberg: (std::f64::consts::PI / (nf + 2.0)).tan(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n_opt = optimal_number(&points);
    let n_subshot_max = subshot_bound(&points);
    Ok(SweepResult {
        loss,
        mode,
        points,
        n_opt,
        n_subshot_max,
    })
}

/// Position of the smallest `delta_phi`, ties going to the smaller `N`.
fn argmin(points: &[CurvePoint]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, p) in points.iter().enumerate() {
        if p.delta_phi.is_nan() {
            continue;
        }
        match best {
            Some(b) if points[b].delta_phi <= p.delta_phi => {}
            _ => best = Some(i),
        }
    }
    best.filter(|&i| points[i].delta_phi.is_finite())
}

fn optimal_number(points: &[CurvePoint]) -> ScanOutcome {
    match argmin(points) {
        None => ScanOutcome::Absent,
        Some(i) if i + 1 == points.len() => ScanOutcome::AtBoundary,
        Some(i) => ScanOutcome::Found(points[i].n),
    }
}

/// End of the sub-shot-noise run that contains the curve minimum. If the
/// minimum itself is above shot noise, the last sub-shot-noise run before it
/// is used, else the first one after it.
fn subshot_bound(points: &[CurvePoint]) -> ScanOutcome {
    let Some(anchor) = argmin(points) else {
        return ScanOutcome::Absent;
    };
    let sub: Vec<bool> = points.iter().map(CurvePoint::is_sub_shot_noise).collect();
    let seed = if sub[anchor] {
        Some(anchor)
    } else {
        (0..anchor)
            .rev()
            .find(|&i| sub[i])
            .or_else(|| (anchor + 1..sub.len()).find(|&i| sub[i]))
    };
    let Some(mut end) = seed else {
        return ScanOutcome::Absent;
    };
    while end + 1 < sub.len() && sub[end + 1] {
        end += 1;
    }
    if end + 1 == sub.len() {
        ScanOutcome::AtBoundary
    } else {
        ScanOutcome::Found(points[end].n)
    }
}

/// Optimal photon number in `1..=n_max`. [`ScanOutcome::AtBoundary`] means
/// the curve is still decreasing at `n_max`.
pub fn find_n_opt(loss: f64, n_max: u32) -> Result<ScanOutcome> {
    Ok(curve(loss, 1, n_max)?.n_opt)
}

/// Largest photon number that still gives a sub-shot-noise estimate.
pub fn find_subshot_bound(loss: f64, n_max: u32) -> Result<ScanOutcome> {
    Ok(curve(loss, 1, n_max)?.n_subshot_max)
}

/// `N_opt` for each loss of an ascending grid.
pub fn nopt_vs_loss(loss_grid: &[f64], n_max: u32) -> Result<Vec<(f64, ScanOutcome)>> {
    nopt_vs_loss_with(loss_grid, n_max, SharpnessMode::Raw)
}

pub fn nopt_vs_loss_with(
    loss_grid: &[f64],
    n_max: u32,
    mode: SharpnessMode,
) -> Result<Vec<(f64, ScanOutcome)>> {
    for &loss in loss_grid {
        LossChannel::from_loss(loss)?;
    }
    if let Some(w) = loss_grid.windows(2).find(|w| w[1] < w[0]) {
        return Err(Error::MalformedGrid(format!(
            "loss grid must be ascending: {} follows {}",
            w[1], w[0]
        )));
    }
    loss_grid
        .iter()
        .map(|&loss| Ok((loss, curve_with(loss, 1, n_max, mode)?.n_opt)))
        .collect()
}

/// `count` losses from `lo` to `hi`, linearly or logarithmically spaced.
/// Both ends are included exactly.
pub fn loss_grid(lo: f64, hi: f64, count: usize, log: bool) -> Result<Vec<f64>> {
    if count == 0 || lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::MalformedGrid(format!("{lo}:{hi}:{count}")));
    }
    if log && lo <= 0.0 {
        return Err(Error::MalformedGrid("log-spaced grid needs lo > 0".into()));
    }
    for v in [lo, hi] {
        LossChannel::from_loss(v)?;
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let last = (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == count - 1 {
                hi
            } else {
                let t = i as f64 / last;
                if log {
                    lo * (hi / lo).powf(t)
                } else {
                    lo + (hi - lo) * t
                }
            }
        })
        .collect())
}
