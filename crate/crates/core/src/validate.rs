//! Cross-check harness: every production path against its brute-force
//! reference, reported as a pass/fail table.

use std::f64::consts::PI;

use crate::error::Result;
use crate::loss_channel::{channel_from_loss, reduced_density, LossChannel};
use crate::optimal_state::optimal_amplitudes;
use crate::oracle::{
    bs_unitary, pure_lossy_state_via_unitary, quadrature_sharpness, rotation_from_unitary,
    trace_out_explicit, MAX_ORACLE_TWO_J, MAX_TRACE_OUT_PHOTONS,
};
use crate::povm::{
    distribution, distribution_from_density, holevo, lossless_reference, sharpness_closed,
    total_weight, SharpnessMode,
};
use crate::spin::{HalfInt, SpinRange};

pub const ANGLES: [f64; 4] = [0.1, 0.7, PI / 2.0, 2.5];
pub const DENSITY_LOSSES: [f64; 3] = [0.1, 0.3, 0.7];
pub const PATH_LOSSES: [f64; 4] = [0.0, 0.1, 0.3, 0.5];

pub const D_ORACLE_TOL: f64 = 1e-8;
pub const ROW_NORM_TOL: f64 = 1e-10;
pub const TRACE_OUT_TOL: f64 = 1e-12;
pub const PATH_TOL: f64 = 1e-10;
pub const QUADRATURE_TOL: f64 = 1e-10;
pub const QUADRATURE_IMAG_TOL: f64 = 1e-12;
pub const LOSSLESS_REL_TOL: f64 = 1e-9;
pub const WEIGHT_TOL: f64 = 1e-10;

/// Signature of a rotation-element implementation under test.
pub type DElementFn = dyn Fn(HalfInt, HalfInt, HalfInt, f64) -> Result<f64> + Sync;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    /// Largest `2j` for the rotation-element comparisons.
    pub max_two_j: u32,
    /// Largest photon number for the explicit partial trace.
    pub max_trace_out_n: u32,
    /// Largest photon number for the two sharpness paths.
    pub max_path_n: u32,
    /// Largest photon number for the lossless anchor.
    pub max_anchor_n: u32,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            max_two_j: 12,
            max_trace_out_n: 8,
            max_path_n: 20,
            max_anchor_n: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub tolerance: f64,
    pub worst: f64,
    pub passed: bool,
    /// Where the comparison first failed, or the worst case when it passed.
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Tracks the worst deviation of one comparison family.
struct Tally {
    name: &'static str,
    tolerance: f64,
    worst: f64,
    witness: String,
    failure: Option<String>,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Tally {
            name,
            tolerance,
            worst: 0.0,
            witness: String::new(),
            failure: None,
        }
    }

    fn record(&mut self, deviation: f64, witness: impl FnOnce() -> String) {
        let bad = deviation.is_nan() || deviation > self.tolerance;
        if bad || deviation > self.worst || self.witness.is_empty() {
            let w = witness();
            if bad && self.failure.is_none() {
                self.failure = Some(w.clone());
            }
            if deviation > self.worst || deviation.is_nan() {
                self.worst = deviation;
                self.witness = w;
            } else if self.witness.is_empty() {
                self.witness = w;
            }
        }
    }

    fn error(&mut self, witness: String) {
        self.worst = f64::INFINITY;
        if self.failure.is_none() {
            self.failure = Some(witness);
        }
    }

    fn finish(self) -> Check {
        let passed = self.failure.is_none();
        Check {
            name: self.name,
            tolerance: self.tolerance,
            worst: self.worst,
            passed,
            witness: self.failure.unwrap_or(self.witness),
        }
    }
}

/// Runs every comparison against the crate's own rotation elements.
pub fn run(opts: &ValidateOptions) -> Report {
    run_with(opts, &crate::wigner::d_element)
}

/// Runs every comparison, taking rotation elements from `d`.
pub fn run_with(opts: &ValidateOptions, d: &DElementFn) -> Report {
    let checks = vec![
        check_d_oracle(opts, d),
        check_row_norm(opts, d),
        check_trace_out(opts),
        check_paths(opts),
        check_quadrature(opts),
        check_lossless(opts),
        check_weight(opts),
    ];
    Report { checks }
}

fn check_d_oracle(opts: &ValidateOptions, d: &DElementFn) -> Check {
    let mut t = Tally::new("rotation elements vs exp(i theta Jx)", D_ORACLE_TOL);
    let max = (opts.max_two_j as i32).min(MAX_ORACLE_TWO_J);
    for two_j in 0..=max {
        let j = HalfInt::from_twice(two_j);
        let range = SpinRange::new(j).expect("non-negative");
        for &theta in &ANGLES {
            let u = match bs_unitary(j, theta) {
                Ok(u) => u,
                Err(e) => {
                    t.error(format!("j={j} theta={theta}: {e}"));
                    continue;
                }
            };
            for a in range.iter() {
                for b in range.iter() {
                    let reference = rotation_from_unitary(&u, j, a, b).expect("in range");
                    match d(j, a, b, theta) {
                        Ok(v) => {
                            let dev = (v - reference.re).abs().max(reference.im.abs());
                            t.record(dev, || {
                                format!(
                                    "j={j} a={a} b={b} theta={theta}: d={v:.12} oracle={:.12}",
                                    reference.re
                                )
                            });
                        }
                        Err(e) => t.error(format!("j={j} a={a} b={b} theta={theta}: {e}")),
                    }
                }
            }
        }
    }
    t.finish()
}

fn check_row_norm(opts: &ValidateOptions, d: &DElementFn) -> Check {
    let mut t = Tally::new("rotation rows normalized", ROW_NORM_TOL);
    for two_j in 0..=opts.max_two_j as i32 {
        let j = HalfInt::from_twice(two_j);
        let range = SpinRange::new(j).expect("non-negative");
        for &theta in &ANGLES {
            for a in range.iter() {
                let norm: Result<f64> = range
                    .iter()
                    .map(|b| d(j, a, b, theta).map(|v| v * v))
                    .sum();
                match norm {
                    Ok(s) => t.record((s - 1.0).abs(), || {
                        format!("j={j} a={a} theta={theta}: sum d^2 = {s:.15}")
                    }),
                    Err(e) => t.error(format!("j={j} a={a} theta={theta}: {e}")),
                }
            }
        }
    }
    t.finish()
}

fn check_trace_out(opts: &ValidateOptions) -> Check {
    let mut t = Tally::new("reduced density vs explicit partial trace", TRACE_OUT_TOL);
    let max_n = opts.max_trace_out_n.min(MAX_TRACE_OUT_PHOTONS);
    for n in 1..=max_n {
        let state = optimal_amplitudes(n).expect("n >= 1");
        for &loss in &DENSITY_LOSSES {
            let ch = channel_from_loss(loss).expect("valid loss");
            let result = reduced_density(&state, &ch).and_then(|fast| {
                let pure = pure_lossy_state_via_unitary(&state, &ch)?;
                Ok(fast.max_abs_diff(&trace_out_explicit(&pure, loss)?))
            });
            match result {
                Ok(dev) => t.record(dev, || format!("N={n} L={loss}: max diff {dev:.3e}")),
                Err(e) => t.error(format!("N={n} L={loss}: {e}")),
            }
        }
    }
    t.finish()
}

fn check_paths(opts: &ValidateOptions) -> Check {
    let mut t = Tally::new("closed-form vs density-matrix sharpness", PATH_TOL);
    for n in 1..=opts.max_path_n {
        let state = optimal_amplitudes(n).expect("n >= 1");
        for &loss in &PATH_LOSSES {
            let ch = channel_from_loss(loss).expect("valid loss");
            let result = sharpness_closed(&state, &ch).and_then(|closed| {
                let rho = reduced_density(&state, &ch)?;
                Ok((closed, distribution_from_density(&rho).sharpness(SharpnessMode::Raw)))
            });
            match result {
                Ok((closed, fourier)) => t.record((closed - fourier).abs(), || {
                    format!("N={n} L={loss}: closed={closed:.15} density={fourier:.15}")
                }),
                Err(e) => t.error(format!("N={n} L={loss}: {e}")),
            }
        }
    }
    t.finish()
}

fn check_quadrature(opts: &ValidateOptions) -> Check {
    let mut t = Tally::new("trapezoid quadrature vs Fourier sharpness", QUADRATURE_TOL);
    for n in 1..=opts.max_path_n {
        let state = optimal_amplitudes(n).expect("n >= 1");
        for &loss in &PATH_LOSSES {
            let ch = channel_from_loss(loss).expect("valid loss");
            let dist = distribution(&state, &ch);
            let exact = dist.sharpness(SharpnessMode::Raw);
            match quadrature_sharpness(&dist, 4096) {
                Ok(q) => {
                    let dev = (q.re - exact).abs();
                    if q.im.abs() > QUADRATURE_IMAG_TOL {
                        t.error(format!("N={n} L={loss}: imaginary part {:.3e}", q.im));
                    }
                    t.record(dev, || format!("N={n} L={loss}: quad={:.15} exact={exact:.15}", q.re));
                }
                Err(e) => t.error(format!("N={n} L={loss}: {e}")),
            }
        }
    }
    t.finish()
}

fn check_lossless(opts: &ValidateOptions) -> Check {
    let mut t = Tally::new("lossless variance vs tan^2(pi/(N+2))", LOSSLESS_REL_TOL);
    let lossless = LossChannel::lossless();
    for n in 1..=opts.max_anchor_n {
        let state = optimal_amplitudes(n).expect("n >= 1");
        let result = sharpness_closed(&state, &lossless)
            .and_then(holevo)
            .and_then(|e| Ok((e.holevo_variance, lossless_reference(n)?)));
        match result {
            Ok((got, want)) => t.record((got - want).abs() / want, || {
                format!("N={n}: variance={got:.15} reference={want:.15}")
            }),
            Err(e) => t.error(format!("N={n}: {e}")),
        }
    }
    t.finish()
}

fn check_weight(opts: &ValidateOptions) -> Check {
    let mut t = Tally::new("integral of P vs sum psi^2 (1-L)^(j+mu)", WEIGHT_TOL);
    for n in 1..=opts.max_path_n {
        let state = optimal_amplitudes(n).expect("n >= 1");
        for &loss in &[0.0, 0.1, 0.3, 0.5, 0.9] {
            let ch = channel_from_loss(loss).expect("valid loss");
            let got = distribution(&state, &ch).integral();
            // independent sum, powers taken directly
            let want: f64 = state
                .as_slice()
                .iter()
                .enumerate()
                .map(|(i, p)| p * p * (1.0 - loss).powi(i as i32))
                .sum();
            t.record((got - want).abs(), || format!("N={n} L={loss}: {got:.15} vs {want:.15}"));
            debug_assert!((total_weight(&state, &ch) - got).abs() < 1e-12);
        }
    }
    t.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes() {
        let report = run(&ValidateOptions::default());
        for c in &report.checks {
            assert!(c.passed, "{}: {}", c.name, c.witness);
        }
        assert!(report.passed());
    }

    #[test]
    fn sign_flip_is_caught_with_witness() {
        let flipped = |j: HalfInt, a: HalfInt, b: HalfInt, t: f64| {
            let v = crate::wigner::d_element(j, a, b, t)?;
            Ok(if j == HalfInt::ONE && a == HalfInt::ZERO && b == HalfInt::ONE {
                -v
            } else {
                v
            })
        };
        let report = run_with(&ValidateOptions::default(), &flipped);
        assert!(!report.passed());
        let fail = report.first_failure().unwrap();
        assert_eq!(fail.name, "rotation elements vs exp(i theta Jx)");
        assert!(fail.witness.starts_with("j=1 a=0 b=1 theta=0.1"), "{}", fail.witness);
        // row norms are blind to signs
        assert!(report.checks[1].passed);
    }
}
