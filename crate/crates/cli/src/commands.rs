use std::fmt;
use std::time::Instant;

use canonphase::loss_channel::LossChannel;
use canonphase::optimal_state::optimal_amplitudes;
use canonphase::povm::{distribution, nyquist_samples, SharpnessMode};
use canonphase::sweep::{curve_with, loss_grid, nopt_vs_loss_with};
use canonphase::validate::{self, ValidateOptions};

use crate::args::{CurveArgs, DistArgs, NoptArgs, OutputArgs, ValidateArgs};
use crate::output::{emit, Cell, PlotKind, Table};

/// Smallest accepted `--phi-samples`.
pub const MIN_PHI_SAMPLES: usize = 64;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Validation(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Validation(m) => f.write_str(m),
        }
    }
}

impl From<canonphase::Error> for Failure {
    fn from(e: canonphase::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn mode(out: &OutputArgs) -> SharpnessMode {
    if out.normalized {
        SharpnessMode::Normalized
    } else {
        SharpnessMode::Raw
    }
}

fn write(table: &Table, out: &OutputArgs, kind: PlotKind) -> Result<(), Failure> {
    let script = emit(table, out.format, out.out.as_deref(), kind).map_err(|e| {
        let target = out
            .out
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "stdout".into());
        Failure::Io(format!("cannot write {target}: {e}"))
    })?;
    if let Some(script) = script {
        eprintln!("plot script: {}", script.display());
    }
    Ok(())
}

pub fn run_curve(args: &CurveArgs) -> Result<(), Failure> {
    LossChannel::from_loss(args.loss)?;
    let mode = mode(&args.output);
    let r = curve_with(args.loss, args.n_range.lo, args.n_range.hi, mode)?;
    let table = Table {
        columns: &["n", "delta_phi", "shot_noise", "heisenberg"],
        config: vec![
            ("command", Cell::Text("curve".into())),
            ("loss", Cell::Float(args.loss)),
            (
                "n_range",
                Cell::Text(format!("{}:{}", args.n_range.lo, args.n_range.hi)),
            ),
            ("sharpness", Cell::Text(mode.label().into())),
        ],
        summary: vec![
            ("n_opt", Cell::Text(r.n_opt.label())),
            ("n_subshot_max", Cell::Text(r.n_subshot_max.label())),
        ],
        rows: r
            .points
            .iter()
            .map(|p| {
                vec![
                    Cell::Int(u64::from(p.n)),
                    Cell::Float(p.delta_phi),
                    Cell::Float(p.shot_noise),
                    Cell::Float(p.heisenberg),
                ]
            })
            .collect(),
    };
    write(&table, &args.output, PlotKind::Curve)
}

pub fn run_nopt(args: &NoptArgs) -> Result<(), Failure> {
    let g = args.loss_grid;
    let grid = loss_grid(g.lo, g.hi, g.count, g.log)?;
    if args.n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let mode = mode(&args.output);
    let results = nopt_vs_loss_with(&grid, args.n, mode)?;
    let table = Table {
        columns: &["loss", "n_opt"],
        config: vec![
            ("command", Cell::Text("nopt".into())),
            (
                "loss_grid",
                Cell::Text(format!(
                    "{}:{}:{}{}",
                    g.lo,
                    g.hi,
                    g.count,
                    if g.log { ":log" } else { "" }
                )),
            ),
            ("n_max", Cell::Int(u64::from(args.n))),
            ("sharpness", Cell::Text(mode.label().into())),
        ],
        summary: vec![],
        rows: results
            .iter()
            .map(|(loss, outcome)| {
                let n_opt = match outcome.value() {
                    Some(n) => Cell::Int(u64::from(n)),
                    None => Cell::Text(outcome.label()),
                };
                vec![Cell::Float(*loss), n_opt]
            })
            .collect(),
    };
    write(&table, &args.output, PlotKind::Nopt)
}

pub fn run_dist(args: &DistArgs) -> Result<(), Failure> {
    let ch = LossChannel::from_loss(args.loss)?;
    let state = optimal_amplitudes(args.n)?;
    let min = nyquist_samples(state.j()).max(MIN_PHI_SAMPLES);
    if args.phi_samples < min {
        return Err(Failure::Usage(format!(
            "--phi-samples must be at least {min} for N = {}, got {}",
            args.n, args.phi_samples
        )));
    }
    let dist = distribution(&state, &ch);
    let mode = mode(&args.output);
    let integral = dist.integral();
    let scale = match mode {
        SharpnessMode::Raw => 1.0,
        SharpnessMode::Normalized => integral.recip(),
    };
    let samples = dist.sample(args.phi_samples)?;
    let table = Table {
        columns: &["phi", "p"],
        config: vec![
            ("command", Cell::Text("dist".into())),
            ("n", Cell::Int(u64::from(args.n))),
            ("loss", Cell::Float(args.loss)),
            ("phi_samples", Cell::Int(args.phi_samples as u64)),
            ("sharpness", Cell::Text(mode.label().into())),
        ],
        summary: vec![
            ("integral", Cell::Float(integral)),
            ("sharpness_value", Cell::Float(dist.sharpness(mode))),
        ],
        rows: samples
            .into_iter()
            .map(|(phi, p)| vec![Cell::Float(phi), Cell::Float(p * scale)])
            .collect(),
    };
    write(&table, &args.output, PlotKind::Dist)
}

pub fn run_validate(args: &ValidateArgs) -> Result<(), Failure> {
    if args.max_two_j > canonphase::oracle::MAX_ORACLE_TWO_J as u32 {
        return Err(Failure::Usage(format!(
            "--max-2j must be at most {}",
            canonphase::oracle::MAX_ORACLE_TWO_J
        )));
    }
    let opts = ValidateOptions {
        max_two_j: args.max_two_j,
        ..ValidateOptions::default()
    };
    let start = Instant::now();
    let report = validate::run(&opts);
    for c in &report.checks {
        println!(
            "{}  {:<46} worst={:.3e} tol={:.0e}  {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.worst,
            c.tolerance,
            c.witness
        );
    }
    println!("elapsed {:.2}s", start.elapsed().as_secs_f64());
    match report.first_failure() {
        None => Ok(()),
        Some(c) => Err(Failure::Validation(format!(
            "{} failed at {}",
            c.name, c.witness
        ))),
    }
}
