use std::f64::consts::PI;
use std::fmt::Write as _;

use clap::{Args, ValueEnum};
use rand::Rng as _;
use rayon::prelude::*;

use super::output::{fixed6, format_sig17};
use super::{config_echo, CliError, Format, Outcome, RunConfig, EXIT_INVARIANT, EXIT_OK};
use crate::ci;
use crate::error::Result;
use crate::info::{self, mi};
use crate::measures::{self, Direction};
use crate::optim::{haar_unitary, rank1_povm, OptimizerConfig};
use crate::rng::{seeded, split, split_named};
use crate::states::preset::family15;
use crate::states::random::{depolarize, random_mstate, random_pure};
use crate::states::{Mstate, SystemLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    BoundsChain,
    PureConsistency,
    Family15,
    Additivity,
    KwCross,
    CmiIdentity,
    Continuity,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::BoundsChain,
        Suite::PureConsistency,
        Suite::Family15,
        Suite::Additivity,
        Suite::KwCross,
        Suite::CmiIdentity,
        Suite::Continuity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::BoundsChain => "bounds-chain",
            Suite::PureConsistency => "pure-consistency",
            Suite::Family15 => "family15",
            Suite::Additivity => "additivity",
            Suite::KwCross => "kw-cross",
            Suite::CmiIdentity => "cmi-identity",
            Suite::Continuity => "continuity",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
    Above,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Above => ">",
        }
    }

    fn holds(self, measured: f64, threshold: f64) -> bool {
        match self {
            Relation::AtMost => measured <= threshold,
            Relation::AtLeast => measured >= threshold,
            Relation::Above => measured > threshold,
        }
    }
}

/// One verification line: a measured number against a threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub group: &'static str,
    pub index: Option<usize>,
    pub what: String,
    pub measured: f64,
    pub direction: Direction,
    pub relation: Relation,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn new(
        group: &'static str,
        index: Option<usize>,
        what: impl Into<String>,
        measured: f64,
        direction: Direction,
        relation: Relation,
        threshold: f64,
    ) -> Self {
        Check {
            group,
            index,
            what: what.into(),
            measured,
            direction,
            relation,
            threshold,
            pass: relation.holds(measured, threshold),
        }
    }

    fn name(&self) -> String {
        match self.index {
            Some(i) => format!("{}[{i:02}]", self.group),
            None => self.group.to_string(),
        }
    }

    fn text(&self) -> String {
        let measured = if self.threshold != 0.0 && self.threshold.abs() < 1e-4 {
            format!("{:.3e}", self.measured)
        } else {
            fixed6(self.measured)
        };
        let threshold = if self.threshold != 0.0 && self.threshold.abs() < 1e-4 {
            format!("{:e}", self.threshold)
        } else {
            let short = format!("{}", self.threshold);
            if short.len() <= 8 { short } else { fixed6(self.threshold) }
        };
        format!(
            "{:<24} {} = {} ({}) {} {}  {}",
            self.name(),
            self.what,
            measured,
            self.direction.tag(),
            self.relation.symbol(),
            threshold,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

fn estimate_dir(dirs: &[Direction]) -> Direction {
    dirs.iter()
        .copied()
        .find(|d| *d != Direction::Exact)
        .unwrap_or(Direction::Exact)
}

fn qubits3() -> SystemLayout {
    SystemLayout::qubits(&["A", "B", "C"]).expect("static layout")
}

/// Per-check seeds: `(state seed, optimizer config)`.
fn check_seeds(suite_seed: u64, i: usize, base: &OptimizerConfig) -> (u64, OptimizerConfig) {
    let s = split(suite_seed, i as u64);
    (split(s, 0), base.clone().with_seed(split(s, 1)))
}

fn parallel<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

fn pure_consistency(seed: u64, base: &OptimizerConfig) -> Result<Vec<Check>> {
    const N: usize = 20;
    let g = family_ghz()?;
    let ghz = ci::ci_pure_regularized(&g, &["A"], &["B"], &["C"])?;
    let mut out = vec![Check::new(
        "ghz-regularized",
        None,
        "|value - 2|",
        (ghz - 2.0).abs(),
        Direction::Exact,
        Relation::AtMost,
        1e-9,
    )];
    let per = parallel(N, |i| {
        let (s, cfg) = check_seeds(seed, i, base);
        let psi = random_pure(&qubits3(), s).to_mstate();
        let ow = measures::one_way_ci(&psi, &["A"], "B", &["C"], &cfg)?;
        let route = ci::ci_pure_oneway(&psi, &["A"], &["B"], &["C"], &cfg)?;
        let reg = ci::ci_pure_regularized(&psi, &["A"], &["B"], &["C"])?;
        Ok((ow, route, reg))
    })?;
    for (i, (ow, route, _)) in per.iter().enumerate() {
        out.push(Check::new(
            "dual-route",
            Some(i),
            "|one-way - (S(A) + E_a(AC))|",
            (ow.value - route.value).abs(),
            estimate_dir(&[ow.direction, route.direction]),
            Relation::AtMost,
            5e-3,
        ));
    }
    for (i, (ow, _, reg)) in per.iter().enumerate() {
        out.push(Check::new(
            "regularized-dominates",
            Some(i),
            "regularized - one-way",
            reg - ow.value,
            ow.direction,
            Relation::AtLeast,
            -5e-3,
        ));
    }
    Ok(out)
}

fn family_ghz() -> Result<Mstate> {
    Ok(crate::states::preset("ghz", &[])?.to_mstate())
}

fn bounds_chain(seed: u64, base: &OptimizerConfig) -> Result<Vec<Check>> {
    const N: usize = 50;
    let per = parallel(N, |i| {
        let (s, cfg) = check_seeds(seed, i, base);
        let rho = random_mstate(&qubits3(), 2 + i % 7, s);
        ci::ci_lower(&rho, &["A"], "B", &["C"], &cfg)
    })?;
    let mut out = Vec::new();
    for (i, r) in per.iter().enumerate() {
        out.push(Check::new(
            "one-way-below-upper",
            Some(i),
            "one-way - upper",
            r.one_way.value - r.upper,
            r.one_way.direction,
            Relation::AtMost,
            2e-2,
        ));
    }
    for (i, r) in per.iter().enumerate() {
        out.push(Check::new(
            "report-ordered",
            Some(i),
            "lower - upper",
            r.lower - r.upper,
            Direction::LowerBoundEstimate,
            Relation::AtMost,
            1e-9,
        ));
    }
    Ok(out)
}

fn family15_suite(seed: u64, base: &OptimizerConfig) -> Result<Vec<Check>> {
    let c = (PI / 8.0).cos();
    let cfg = base.clone().with_seed(split(seed, 0));
    let rho = family15(c)?;
    let bc = rho.reduce(&["B", "C"])?;
    let mixed = Mstate::maximally_mixed(bc.layout().clone())?;
    let rep = ci::family15_separation_report(c, &cfg, None)?;
    let mut out = vec![
        Check::new("bc-maximally-mixed", None, "T(rho_BC, I/4)", info::trace_distance(&bc, &mixed)?, Direction::Exact, Relation::AtMost, 1e-12),
        Check::new("bc-uncorrelated", None, "I(B:C)", rep.i_bc, Direction::Exact, Relation::AtMost, 1e-12),
        Check::new("total-mi", None, "|I(A:BC) - 1|", (rep.total_mi - 1.0).abs(), Direction::Exact, Relation::AtMost, 1e-9),
        Check::new("discord-positive", None, "discord(AC|B)", rep.discord.value, rep.discord.direction, Relation::Above, 0.01),
        Check::new("one-way-bound", None, "one-way upper", rep.oneway_upper, Direction::UpperBoundEstimate, Relation::AtMost, 0.99),
        Check::new("two-round", None, "|two-round - I(A:BC)|", (rep.two_round - rep.total_mi).abs(), Direction::Exact, Relation::AtMost, 1e-9),
        Check::new("gap", None, "two-round - one-way upper", rep.gap, Direction::LowerBoundEstimate, Relation::Above, 0.01),
    ];
    let sweep = parallel(9, |k| {
        let c = ((k + 1) as f64 * PI / 20.0).sin();
        ci::family15_separation_report(c, &base.clone().with_seed(split(seed, k as u64 + 1)), None)
    })?;
    for (k, r) in sweep.iter().enumerate() {
        out.push(Check::new(
            "separation-sweep",
            Some(k + 1),
            format!("gap at c=sin({}pi/20)", k + 1),
            r.gap,
            Direction::LowerBoundEstimate,
            Relation::Above,
            ci::TOL,
        ));
    }
    Ok(out)
}

fn additivity(seed: u64, base: &OptimizerConfig) -> Result<Vec<Check>> {
    let cfg = base.clone().with_seed(split(seed, 0));
    let rho = family15((PI / 8.0).cos())?;
    let r = ci::discord_additivity_check(&rho, &["A", "C"], "B", &cfg, None)?;
    Ok(vec![
        Check::new("two-copy", None, "|d(rho x rho) - 2 d(rho)|", r.deviation, r.double.direction, Relation::AtMost, 2e-2),
        Check::new(
            "product-measurement",
            None,
            "product value - 2 d(rho)",
            r.product_povm - 2.0 * r.single.value,
            r.single.direction,
            Relation::AtMost,
            1e-6,
        ),
    ])
}

fn kw_cross(seed: u64, base: &OptimizerConfig) -> Result<Vec<Check>> {
    let xy = SystemLayout::qubits(&["X", "Y"])?;
    let per = parallel(10, |i| {
        let (s, cfg) = check_seeds(seed, i, base);
        let rho = random_mstate(&xy, 2, s);
        let d = measures::discord(&rho, &["X"], "Y", &cfg)?;
        let kw = measures::kw_discord(&rho, &["X"], &["Y"], &cfg)?;
        Ok(Check::new(
            "kw-cross",
            Some(i),
            "|discord - kw route|",
            (d.value - kw.value).abs(),
            estimate_dir(&[d.direction, kw.direction]),
            Relation::AtMost,
            2e-2,
        ))
    })?;
    Ok(per)
}

fn cmi_identity(seed: u64, _base: &OptimizerConfig) -> Result<Vec<Check>> {
    parallel(10, |i| {
        let s = split(seed, i as u64);
        let rho = random_mstate(&qubits3(), 1 + i % 8, split(s, 0));
        let povm = rank1_povm(&haar_unitary(2, split(s, 1)), 2)?;
        let sigma = ci::dilated_protocol_state(&rho, &povm, "B")?;
        let (l, r) = ci::cmi_identity_sides(&rho, &sigma, &["A"], "B", &["C"])?;
        Ok(Check::new(
            "cmi-identity",
            Some(i),
            "|I(A:BE|CR) - (I(A:BC) - I(A:CR))|",
            (l - r).abs(),
            Direction::Exact,
            Relation::AtMost,
            1e-9,
        ))
    })
}

fn continuity(seed: u64, _base: &OptimizerConfig) -> Result<Vec<Check>> {
    parallel(100, |i| {
        let s = split(seed, i as u64);
        let rho = random_mstate(&qubits3(), 1 + i % 8, split(s, 0));
        let p: f64 = seeded(split(s, 1)).random();
        let sigma = depolarize(&rho, p);
        let t = info::trace_distance(&rho, &sigma)?;
        let bound = info::mi_continuity_bound(t, rho.dim())?;
        let diff = (mi(&rho, &["A"], &["B", "C"])? - mi(&sigma, &["A"], &["B", "C"])?).abs();
        Ok(Check::new(
            "continuity",
            Some(i),
            "|I(rho) - I(sigma)|",
            diff,
            Direction::Exact,
            Relation::AtMost,
            bound.value,
        ))
    })
}

/// Runs one suite (not `all`) with a seed derived from `base.seed` and the
/// suite name, so suites give the same lines alone or inside `all`.
pub fn run_suite(suite: Suite, base: &OptimizerConfig) -> Result<Vec<Check>> {
    let seed = split_named(base.seed, suite.name());
    match suite {
        Suite::BoundsChain => bounds_chain(seed, base),
        Suite::PureConsistency => pure_consistency(seed, base),
        Suite::Family15 => family15_suite(seed, base),
        Suite::Additivity => additivity(seed, base),
        Suite::KwCross => kw_cross(seed, base),
        Suite::CmiIdentity => cmi_identity(seed, base),
        Suite::Continuity => continuity(seed, base),
        Suite::All => {
            let mut all = Vec::new();
            for s in Suite::EACH {
                all.extend(run_suite(s, base)?);
            }
            Ok(all)
        }
    }
}

fn summary(checks: &[Check]) -> Vec<(&'static str, usize, usize)> {
    let mut groups: Vec<(&'static str, usize, usize)> = Vec::new();
    for c in checks {
        match groups.iter_mut().find(|g| g.0 == c.group) {
            Some(g) => {
                g.1 += c.pass as usize;
                g.2 += 1;
            }
            None => groups.push((c.group, c.pass as usize, 1)),
        }
    }
    groups
}

pub(super) fn run(args: &VerifyArgs) -> std::result::Result<Outcome, CliError> {
    let cfg = args.run.optimizer()?;
    let suites: Vec<Suite> = match args.suite {
        Suite::All => Suite::EACH.to_vec(),
        s => vec![s],
    };
    let mut checks = Vec::new();
    let mut sections = Vec::new();
    for s in suites {
        let cs = run_suite(s, &cfg)?;
        sections.push((s, checks.len(), checks.len() + cs.len()));
        checks.extend(cs);
    }
    let all_pass = checks.iter().all(|c| c.pass);
    let mut body = String::new();
    match args.run.format.unwrap_or(Format::Text) {
        Format::Text => {
            for (s, from, to) in &sections {
                let _ = writeln!(body, "suite {}", s.name());
                for c in &checks[*from..*to] {
                    let _ = writeln!(body, "  {}", c.text());
                }
                for (g, pass, total) in summary(&checks[*from..*to]) {
                    let verdict = if pass == total { "PASS" } else { "FAIL" };
                    let _ = writeln!(body, "  {g}: {pass}/{total} {verdict}");
                }
            }
            let _ = writeln!(body, "{}", config_echo(&cfg));
            let _ = writeln!(body, "overall: {}", if all_pass { "PASS" } else { "FAIL" });
        }
        Format::Csv => {
            body.push_str("check,measured,relation,threshold,direction,result,seed\n");
            for c in &checks {
                let _ = writeln!(
                    body,
                    "{},{},{},{},{},{},{}",
                    c.name(),
                    format_sig17(c.measured),
                    c.relation.symbol(),
                    format_sig17(c.threshold),
                    c.direction.tag(),
                    if c.pass { "PASS" } else { "FAIL" },
                    cfg.seed
                );
            }
        }
    }
    Ok(Outcome {
        body,
        code: if all_pass { EXIT_OK } else { EXIT_INVARIANT },
    })
}
