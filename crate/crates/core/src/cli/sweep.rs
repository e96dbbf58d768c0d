use std::fmt::Write as _;

use clap::{Args, ValueEnum};
use rayon::prelude::*;

use super::output::{fixed6, format_sig17};
use super::{CliError, Format, Outcome, RunConfig, EXIT_OK};
use crate::ci;
use crate::error::Result;
use crate::info::mi;
use crate::measures::{self, Direction};
use crate::optim::OptimizerConfig;
use crate::rng::split;
use crate::states::preset::{family15, PresetName};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepQuantity {
    Entropy,
    MutualInfo,
    OneWayCi,
    Discord,
    OnewayUpper,
    OnewayGap,
    CiBounds,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub quantity: SweepQuantity,
    /// Preset with one scalar parameter
    #[arg(long, default_value = "family15")]
    pub preset: String,
    #[arg(long)]
    pub start: f64,
    #[arg(long)]
    pub stop: f64,
    #[arg(long)]
    pub steps: usize,
    #[command(flatten)]
    pub run: RunConfig,
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub direction: Direction,
    pub seed: u64,
}

/// Evenly spaced points from `start` to `stop` inclusive.
pub fn grid(start: f64, stop: f64, steps: usize) -> std::result::Result<Vec<f64>, CliError> {
    if steps == 0 {
        return Err(CliError::input("--steps must be at least 1"));
    }
    if !start.is_finite() || !stop.is_finite() {
        return Err(CliError::input("range ends must be finite"));
    }
    if stop < start {
        return Err(CliError::input(format!("empty range: stop {stop} < start {start}")));
    }
    if steps == 1 {
        if stop != start {
            return Err(CliError::input("a single step needs start = stop"));
        }
        return Ok(vec![start]);
    }
    let h = (stop - start) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| if i + 1 == steps { stop } else { start + h * i as f64 })
        .collect())
}

fn row(q: SweepQuantity, c: f64, cfg: &OptimizerConfig) -> Result<SweepRow> {
    let rho = family15(c)?;
    let exact = |v: f64| (v, v, v, Direction::Exact);
    let (value, lower, upper, direction) = match q {
        SweepQuantity::Entropy => exact(rho.entropy()),
        SweepQuantity::MutualInfo => exact(mi(&rho, &["A"], &["B", "C"])?),
        SweepQuantity::OneWayCi => {
            let e = measures::one_way_ci(&rho, &["A"], "B", &["C"], cfg)?;
            let up = ci::ci_upper(&rho, &["A"], &["B"], &["C"])?;
            (e.value, e.value, up, e.direction)
        }
        SweepQuantity::Discord => {
            let e = measures::discord(&rho, &["A", "C"], "B", cfg)?;
            (e.value, 0.0, e.value, e.direction)
        }
        SweepQuantity::OnewayUpper => {
            let u = ci::oneway_ci_upper(&rho, &["A"], "B", &["C"], cfg)?;
            (u.value, u.value, u.certified, Direction::UpperBoundEstimate)
        }
        SweepQuantity::OnewayGap => {
            let r = ci::family15_separation_report(c, cfg, None)?;
            let certified = r.two_round - r.oneway_upper_certified;
            (r.gap, certified, r.gap, Direction::UpperBoundEstimate)
        }
        SweepQuantity::CiBounds => {
            let r = ci::ci_lower(&rho, &["A"], "B", &["C"], cfg)?;
            (r.lower, r.lower, r.upper, Direction::LowerBoundEstimate)
        }
    };
    Ok(SweepRow {
        param: c,
        value,
        lower,
        upper,
        direction,
        seed: cfg.seed,
    })
}

/// Computes every row; row `i` uses the seed `split(seed, i)`.
pub fn sweep_rows(
    q: SweepQuantity,
    params: &[f64],
    base: &OptimizerConfig,
) -> Result<Vec<SweepRow>> {
    params
        .par_iter()
        .enumerate()
        .map(|(i, &c)| row(q, c, &base.clone().with_seed(split(base.seed, i as u64))))
        .collect()
}

pub(super) fn run(args: &SweepArgs) -> std::result::Result<Outcome, CliError> {
    let cfg = args.run.optimizer()?;
    let preset: PresetName = args.preset.parse()?;
    if preset != PresetName::Family15 {
        return Err(CliError::input(format!(
            "preset `{}` has no single scalar parameter to sweep; use family15",
            args.preset
        )));
    }
    let params = grid(args.start, args.stop, args.steps)?;
    let rows = sweep_rows(args.quantity, &params, &cfg)?;
    if args.quantity == SweepQuantity::CiBounds {
        if let Some(r) = rows.iter().find(|r| r.lower > r.upper + ci::TOL) {
            return Err(CliError::invariant(format!(
                "bound chain broken at c = {}: lower {} exceeds upper {}",
                r.param, r.lower, r.upper
            )));
        }
    }
    let mut body = String::new();
    match args.run.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            body.push_str("param,value,lower,upper,direction,seed\n");
            for r in &rows {
                let _ = writeln!(
                    body,
                    "{},{},{},{},{},{}",
                    format_sig17(r.param),
                    format_sig17(r.value),
                    format_sig17(r.lower),
                    format_sig17(r.upper),
                    r.direction.tag(),
                    r.seed
                );
            }
        }
        Format::Text => {
            let _ = writeln!(body, "{:>10} {:>10} {:>10} {:>10}  direction", "param", "value", "lower", "upper");
            for r in &rows {
                let _ = writeln!(
                    body,
                    "{:>10} {:>10} {:>10} {:>10}  {}",
                    fixed6(r.param),
                    fixed6(r.value),
                    fixed6(r.lower),
                    fixed6(r.upper),
                    r.direction.tag()
                );
            }
            let _ = writeln!(body, "{}", super::config_echo(&cfg));
        }
    }
    Ok(Outcome { body, code: EXIT_OK })
}
