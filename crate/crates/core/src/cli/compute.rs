use std::path::PathBuf;

use clap::{Args, ValueEnum};

use super::output::{render_csv, render_text, Row};
use super::{as_strs, config_echo, split_labels, CliError, Format, Outcome, RunConfig, EXIT_OK};
use crate::ci;
use crate::info::{self, Partition};
use crate::measures::{self, Direction, MeasureEstimate};
use crate::optim::OptimizerConfig;
use crate::states::file::read_state_file;
use crate::states::Mstate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Entropy,
    MutualInfo,
    CondEntropy,
    Cmi,
    Discord,
    Eoa,
    Eof,
    KwDiscord,
    LogNeg,
    EdInterval,
    OneWayCi,
    CiBounds,
    CiPure,
    CiPureReg,
    CiProductReg,
    LqsmBound,
    MergeCheck,
    MonotoneCheck,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[arg(value_enum)]
    pub quantity: Quantity,
    /// JSON state file
    pub state_file: PathBuf,
    /// Alice's parties, comma separated (default: first party)
    #[arg(long)]
    pub alice: Option<String>,
    /// Bob's parties (default: second party; second and third for ci-product-reg)
    #[arg(long)]
    pub bob: Option<String>,
    /// Charlie's parties (default: all remaining)
    #[arg(long)]
    pub charlie: Option<String>,
    /// Parties for `entropy` (default: the whole state)
    #[arg(long)]
    pub subset: Option<String>,
    /// Concentrated-information value for `lqsm-bound` (default: best achievable lower end)
    #[arg(long)]
    pub ci: Option<f64>,
    #[command(flatten)]
    pub run: RunConfig,
}

struct Roles {
    alice: Vec<String>,
    bob: Vec<String>,
    charlie: Vec<String>,
}

impl Roles {
    fn resolve(args: &ComputeArgs, rho: &Mstate) -> Self {
        let labels: Vec<String> = rho.layout().labels().iter().map(|s| s.to_string()).collect();
        let n_bob = if args.quantity == Quantity::CiProductReg { 2 } else { 1 };
        let alice = args
            .alice
            .as_deref()
            .map(split_labels)
            .unwrap_or_else(|| labels.iter().take(1).cloned().collect());
        let bob = args.bob.as_deref().map(split_labels).unwrap_or_else(|| {
            labels
                .iter()
                .filter(|l| !alice.contains(l))
                .take(n_bob)
                .cloned()
                .collect()
        });
        let charlie = args.charlie.as_deref().map(split_labels).unwrap_or_else(|| {
            labels
                .iter()
                .filter(|l| !alice.contains(l) && !bob.contains(l))
                .cloned()
                .collect()
        });
        Roles { alice, bob, charlie }
    }

    fn single_bob(&self) -> Result<&str, CliError> {
        match self.bob.as_slice() {
            [b] => Ok(b),
            _ => Err(CliError::input("--bob must name exactly one party for this quantity")),
        }
    }

    fn require_charlie(&self) -> Result<(), CliError> {
        if self.charlie.is_empty() {
            Err(CliError::input("--charlie names no party"))
        } else {
            Ok(())
        }
    }
}

fn j(v: &[String]) -> String {
    v.concat()
}

fn est_row(label: String, e: &MeasureEstimate, note: &str) -> Row {
    let r = Row::bits(label, e.value, e.direction);
    if note.is_empty() {
        r
    } else {
        r.note(note)
    }
}

fn k_note(e: &MeasureEstimate) -> String {
    match &e.config {
        Some(c) => format!("K={}", c.outcomes.unwrap_or_default()),
        None => String::new(),
    }
}

pub(super) fn run(args: &ComputeArgs) -> Result<Outcome, CliError> {
    let cfg = args.run.optimizer()?;
    let rho = read_state_file(&args.state_file)?.to_mstate();
    let roles = Roles::resolve(args, &rho);
    let rows = evaluate(args, &rho, &roles, &cfg)?;
    let body = match args.run.format.unwrap_or(Format::Text) {
        Format::Text => {
            let header = vec![
                format!("quantity: {}", quantity_name(args.quantity)),
                format!(
                    "parties: {}; alice={} bob={} charlie={}",
                    rho.layout(),
                    roles.alice.join(","),
                    roles.bob.join(","),
                    if roles.charlie.is_empty() { "-".into() } else { roles.charlie.join(",") }
                ),
            ];
            render_text(&header, &rows, &[config_echo(&cfg)])
        }
        Format::Csv => render_csv(&rows, cfg.seed),
    };
    Ok(Outcome { body, code: EXIT_OK })
}

fn quantity_name(q: Quantity) -> String {
    q.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

fn evaluate(
    args: &ComputeArgs,
    rho: &Mstate,
    roles: &Roles,
    cfg: &OptimizerConfig,
) -> Result<Vec<Row>, CliError> {
    let a = as_strs(&roles.alice);
    let b = as_strs(&roles.bob);
    let c = as_strs(&roles.charlie);
    let (an, bn, cn) = (j(&roles.alice), j(&roles.bob), j(&roles.charlie));
    let ab_cut = || Partition::new(&a, &b);
    let rows = match args.quantity {
        Quantity::Entropy => {
            let subset = args.subset.as_deref().map(split_labels);
            let labels = match &subset {
                Some(s) => as_strs(s),
                None => rho.layout().labels(),
            };
            vec![Row::bits(format!("S({})", labels.concat()), rho.entropy_of(&labels)?, Direction::Exact)]
        }
        Quantity::MutualInfo => vec![Row::bits(
            format!("I({an}:{bn})"),
            info::mi(rho, &a, &b)?,
            Direction::Exact,
        )],
        Quantity::CondEntropy => vec![Row::bits(
            format!("S({an}|{bn})"),
            info::conditional_entropy(rho, &a, &b)?,
            Direction::Exact,
        )],
        Quantity::Cmi => {
            roles.require_charlie()?;
            vec![Row::bits(
                format!("I({an}:{bn}|{cn})"),
                info::conditional_mutual_info(rho, &a, &b, &c)?,
                Direction::Exact,
            )]
        }
        Quantity::Discord => {
            let e = measures::discord(rho, &a, roles.single_bob()?, cfg)?;
            vec![est_row(format!("discord({an}|{bn})"), &e, &k_note(&e))]
        }
        Quantity::Eoa | Quantity::Eof => {
            let keep: Vec<&str> = a.iter().chain(&b).copied().collect();
            let r = rho.reduce(&keep)?;
            let (name, e) = if args.quantity == Quantity::Eoa {
                ("E_a", measures::eoa(&r, &a, cfg)?)
            } else {
                ("E_f", measures::eof(&r, &a, cfg)?)
            };
            vec![est_row(format!("{name}({an}:{bn})"), &e, &k_note(&e))]
        }
        Quantity::KwDiscord => {
            let e = measures::kw_discord(rho, &a, &b, cfg)?;
            vec![est_row(format!("discord({an}|{bn})"), &e, "entanglement-of-formation route")]
        }
        Quantity::LogNeg => vec![Row::bits(
            format!("E_N({an}:{bn})"),
            measures::log_negativity(rho, &ab_cut())?,
            Direction::Exact,
        )],
        Quantity::EdInterval => {
            let ed = measures::ed_interval(rho, &ab_cut())?;
            let label = format!("E_d({an}:{bn})");
            if ed.exact {
                vec![Row::bits(label, ed.lower, Direction::Exact).note("maximally correlated, hashing value")]
            } else {
                vec![
                    Row::bits(format!("{label} lower"), ed.lower, Direction::LowerBoundEstimate)
                        .note("hashing bound"),
                    Row::bits(format!("{label} upper"), ed.upper, Direction::UpperBoundEstimate)
                        .note("log-negativity"),
                ]
            }
        }
        Quantity::OneWayCi => {
            roles.require_charlie()?;
            let e = measures::one_way_ci(rho, &a, roles.single_bob()?, &c, cfg)?;
            vec![est_row("one-way CI".into(), &e, &k_note(&e))]
        }
        Quantity::CiBounds => {
            roles.require_charlie()?;
            let r = ci::ci_lower(rho, &a, roles.single_bob()?, &c, cfg)?;
            if r.lower > r.upper + ci::TOL {
                return Err(CliError::invariant(format!(
                    "bound chain broken: lower {} exceeds upper {}",
                    r.lower, r.upper
                )));
            }
            let mut rows = vec![
                Row::bits("CI lower", r.lower, Direction::LowerBoundEstimate)
                    .note(r.lower_source.tag())
                    .interval(r.lower, r.upper),
                Row::bits("CI upper", r.upper, Direction::UpperBoundEstimate).note(r.upper_source.tag()),
            ];
            for cand in &r.lower_candidates {
                rows.push(
                    Row::bits(format!("  lower candidate {}", cand.source), cand.value, Direction::LowerBoundEstimate)
                        .note(match cand.source {
                            ci::LowerSource::TrivialProtocol => "no communication",
                            ci::LowerSource::DiscordTerm => "I(A:B) minus discord estimate",
                            ci::LowerSource::OptimizedOneWay => "rank-1 POVM search",
                        }),
                );
            }
            for cand in &r.upper_candidates {
                rows.push(Row::bits(
                    format!("  upper candidate {}", cand.source),
                    cand.value,
                    Direction::UpperBoundEstimate,
                ));
            }
            rows
        }
        Quantity::CiPure => {
            roles.require_charlie()?;
            let e = ci::ci_pure_oneway(rho, &a, &b, &c, cfg)?;
            vec![est_row("one-way CI".into(), &e, "pure-state route S(A) + E_a(AC)")]
        }
        Quantity::CiPureReg => {
            roles.require_charlie()?;
            vec![Row::bits("regularized CI", ci::ci_pure_regularized(rho, &a, &b, &c)?, Direction::Exact)
                .note("regularized pure-state closed form")]
        }
        Quantity::CiProductReg => {
            let (b1, b2) = match b.as_slice() {
                [b1, b2] => (*b1, *b2),
                _ => return Err(CliError::input("--bob must name exactly two parties for ci-product-reg")),
            };
            let (a1, c1) = match (a.as_slice(), c.as_slice()) {
                ([a1], [c1]) => (*a1, *c1),
                _ => return Err(CliError::input("--alice and --charlie must name one party each")),
            };
            let r = ci::ci_product_regularized(rho, a1, b1, b2, c1)?;
            if r.exact {
                vec![Row::bits("regularized CI", r.lower, Direction::Exact).note("product closed form")]
            } else {
                vec![
                    Row::bits("regularized CI lower", r.lower, Direction::LowerBoundEstimate)
                        .note("hashing bound on the distillable term"),
                    Row::bits("regularized CI upper", r.upper, Direction::UpperBoundEstimate)
                        .note("log-negativity bound on the distillable term"),
                ]
            }
        }
        Quantity::LqsmBound => {
            roles.require_charlie()?;
            let bc: Vec<&str> = b.iter().chain(&c).copied().collect();
            let total = info::mi(rho, &a, &bc)?;
            let (ci_value, dir, note) = match args.ci {
                Some(v) => (v, Direction::Exact, "supplied CI"),
                None => {
                    let r = ci::ci_lower(rho, &a, roles.single_bob()?, &c, cfg)?;
                    (r.lower, Direction::LowerBoundEstimate, "best achievable CI found")
                }
            };
            let f = ci::lqsm_fidelity_bound(total, ci_value)?;
            vec![
                Row::bits(format!("I({an}:{bn}{cn})"), total, Direction::Exact),
                Row::bits("CI used", ci_value, dir).note(note),
                Row::unitless("merging fidelity lower bound", f, dir),
            ]
        }
        Quantity::MergeCheck => {
            roles.require_charlie()?;
            let m = ci::merge_conditional_entropy_check(rho, &b, &c)?;
            vec![
                Row::bits(format!("S({bn}|{cn})"), m.conditional_entropy, Direction::Exact),
                Row::verdict("merge condition", m.passes).note(if m.passes {
                    "non-positive conditional entropy, merging possible"
                } else {
                    "positive conditional entropy"
                }),
            ]
        }
        Quantity::MonotoneCheck => {
            roles.require_charlie()?;
            let m = ci::monotone_necessary_check(rho, &a, &b, &c)?;
            vec![
                Row::bits(format!("E_N({an}{bn}:{cn})"), m.lhs, Direction::Exact),
                Row::bits(format!("E_N({an}:{bn}{cn})"), m.rhs, Direction::Exact),
                Row::verdict("monotone condition", m.passes).note(if m.passes {
                    "perfect merging not excluded"
                } else {
                    "perfect merging impossible"
                }),
            ]
        }
    };
    Ok(rows)
}
