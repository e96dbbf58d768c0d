//! Concentrated information: bounds, closed forms, merging checks and the
//! explicit protocols for the separating state family.
//!
//! Roles: Alice holds `A`, Bob holds `B` and Charlie holds `C` plus a
//! register `R`. The concentrated information is the largest `I^{A:CR}`
//! Bob and Charlie can reach by LOCC; its one-way version restricts to a
//! single message from Bob to Charlie.

use std::fmt;

use crate::error::{Error, Result};
use crate::info::{self, mi, Partition};
use crate::measures::{
    self, discord_at, discord_with, ed_interval, flag_state, measure_ensemble, one_way_ci,
    one_way_ci_with, Direction, MeasureEstimate,
};
use crate::optim::{complete_unitary, rank1_povm, OptimizerConfig, Povm, SearchOptions};
use crate::qmat::{check_dim, CMatrix, C64};
use crate::states::preset::{family15, family15_bob_states};
use crate::states::{embed_operator, Mstate, Party, SystemLayout};

/// Tolerance for comparisons between exactly evaluated entropic quantities.
pub const TOL: f64 = 1e-9;

fn labels_disjoint(layout: &SystemLayout, sets: &[&[&str]]) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for set in sets {
        if set.is_empty() {
            return Err(Error::InvalidPartition("empty role".into()));
        }
        for &l in set.iter() {
            layout.index_of(l)?;
            if seen.contains(&l) {
                return Err(Error::InvalidPartition(format!(
                    "party `{l}` appears in more than one role"
                )));
            }
            seen.push(l);
        }
    }
    Ok(())
}

fn cat<'a>(a: &[&'a str], b: &[&'a str]) -> Vec<&'a str> {
    a.iter().chain(b).copied().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerSource {
    /// Bob does nothing: `I^{A:C}`.
    TrivialProtocol,
    /// `I^{A:B} − δ^{A|B}` with the discord estimate.
    DiscordTerm,
    /// Optimized one-way rank-1 POVM.
    OptimizedOneWay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpperSource {
    /// `I^{A:BC}`
    TotalMutualInfo,
    /// `S(A)` plus an upper bound on distillable entanglement across `AB:C`.
    DistillableTerm,
    /// `I^{A:BC} + I^{B:C} − δ^{AC|B}` for the one-way quantity.
    OneWayBound,
}

impl LowerSource {
    pub fn tag(self) -> &'static str {
        match self {
            LowerSource::TrivialProtocol => "trivial-protocol",
            LowerSource::DiscordTerm => "discord-term",
            LowerSource::OptimizedOneWay => "optimized-one-way",
        }
    }
}

impl UpperSource {
    pub fn tag(self) -> &'static str {
        match self {
            UpperSource::TotalMutualInfo => "total-mi",
            UpperSource::DistillableTerm => "ed-term",
            UpperSource::OneWayBound => "one-way-bound",
        }
    }
}

impl fmt::Display for LowerSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl fmt::Display for UpperSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerCandidate {
    pub source: LowerSource,
    pub value: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpperCandidate {
    pub source: UpperSource,
    pub value: f64,
}

/// Interval for the concentrated information with the provenance of both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct CiReport {
    pub lower: f64,
    pub lower_source: LowerSource,
    pub upper: f64,
    pub upper_source: UpperSource,
    pub lower_candidates: Vec<LowerCandidate>,
    pub upper_candidates: Vec<UpperCandidate>,
    /// Optimized one-way estimate, also the last lower candidate.
    pub one_way: MeasureEstimate,
    pub notes: Vec<String>,
    pub config: OptimizerConfig,
}

/// Upper bound `min(I^{A:BC}, S(A) + E_d^{AB:C} upper bound)` with its source.
pub fn ci_upper_with_source(
    rho: &Mstate,
    alice: &[&str],
    bob: &[&str],
    charlie: &[&str],
) -> Result<(f64, UpperSource, Vec<UpperCandidate>)> {
    labels_disjoint(rho.layout(), &[alice, bob, charlie])?;
    let bc = cat(bob, charlie);
    let total = mi(rho, alice, &bc)?;
    let ab = cat(alice, bob);
    let ed = ed_interval(rho, &Partition::new(&ab, charlie))?;
    let second = rho.entropy_of(alice)? + ed.upper;
    let cands = vec![
        UpperCandidate {
            source: UpperSource::TotalMutualInfo,
            value: total,
        },
        UpperCandidate {
            source: UpperSource::DistillableTerm,
            value: second,
        },
    ];
    Ok(if total <= second {
        (total, UpperSource::TotalMutualInfo, cands)
    } else {
        (second, UpperSource::DistillableTerm, cands)
    })
}

/// Upper bound on the concentrated information.
pub fn ci_upper(rho: &Mstate, alice: &[&str], bob: &[&str], charlie: &[&str]) -> Result<f64> {
    Ok(ci_upper_with_source(rho, alice, bob, charlie)?.0)
}

/// Lower end from achievable protocols plus the upper end from
/// [`ci_upper`]. All lower candidates are values of explicit protocols:
/// the discord term equals the classical correlation reached by the
/// optimized measurement, so it stays achievable even though the discord
/// itself is only estimated.
pub fn ci_lower(
    rho: &Mstate,
    alice: &[&str],
    bob: &str,
    charlie: &[&str],
    config: &OptimizerConfig,
) -> Result<CiReport> {
    labels_disjoint(rho.layout(), &[alice, &[bob], charlie])?;
    let trivial = mi(rho, alice, charlie)?;
    let i_ab = mi(rho, alice, &[bob])?;
    let delta = measures::discord(rho, alice, bob, config)?;
    let one_way = one_way_ci(rho, alice, bob, charlie, config)?;
    let lower_candidates = vec![
        LowerCandidate {
            source: LowerSource::TrivialProtocol,
            value: trivial,
            direction: Direction::Exact,
        },
        LowerCandidate {
            source: LowerSource::DiscordTerm,
            value: i_ab - delta.value,
            direction: Direction::LowerBoundEstimate,
        },
        LowerCandidate {
            source: LowerSource::OptimizedOneWay,
            value: one_way.value,
            direction: Direction::LowerBoundEstimate,
        },
    ];
    let best = lower_candidates
        .iter()
        .fold(&lower_candidates[0], |b, c| if c.value > b.value { c } else { b });
    let (upper, upper_source, upper_candidates) =
        ci_upper_with_source(rho, alice, &[bob], charlie)?;
    let notes = vec![
        "lower end is achieved by an explicit protocol; optimized terms approach the supremum from below".into(),
        "discord term uses an estimated discord, which equals the achieved classical correlation".into(),
    ];
    Ok(CiReport {
        lower: best.value,
        lower_source: best.source,
        upper,
        upper_source,
        lower_candidates: lower_candidates.clone(),
        upper_candidates,
        one_way,
        notes,
        config: config.clone(),
    })
}

fn require_pure(rho: &Mstate) -> Result<()> {
    let p = rho.purity();
    if p < 1.0 - TOL {
        return Err(Error::NotPure(p));
    }
    Ok(())
}

/// `S(A) + E_a(ρ^{AC})` for a pure tripartite state.
pub fn ci_pure_oneway(
    psi: &Mstate,
    alice: &[&str],
    bob: &[&str],
    charlie: &[&str],
    config: &OptimizerConfig,
) -> Result<MeasureEstimate> {
    require_pure(psi)?;
    labels_disjoint(psi.layout(), &[alice, bob, charlie])?;
    let ac = psi.reduce(&cat(alice, charlie))?;
    let ea = measures::eoa(&ac, alice, config)?;
    Ok(MeasureEstimate {
        value: psi.entropy_of(alice)? + ea.value,
        direction: ea.direction,
        config: ea.config,
        achiever: ea.achiever,
    })
}

/// Regularized concentrated information of a pure state,
/// `S(A) + min(S(A), S(C))`. Exact.
pub fn ci_pure_regularized(
    psi: &Mstate,
    alice: &[&str],
    bob: &[&str],
    charlie: &[&str],
) -> Result<f64> {
    require_pure(psi)?;
    labels_disjoint(psi.layout(), &[alice, bob, charlie])?;
    let sa = psi.entropy_of(alice)?;
    Ok(sa + sa.min(psi.entropy_of(charlie)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductRegularized {
    pub lower: f64,
    pub upper: f64,
    /// Both ends coincide because the distillable entanglement is known.
    pub exact: bool,
}

/// `S(A) + min(S(A), E_d(ρ^{B2C}))` for `ρ = |ψ⟩⟨ψ|^{A B1} ⊗ ρ^{B2 C}`,
/// bracketed by the distillable-entanglement interval.
pub fn ci_product_regularized(
    rho: &Mstate,
    a: &str,
    b1: &str,
    b2: &str,
    c: &str,
) -> Result<ProductRegularized> {
    labels_disjoint(rho.layout(), &[&[a], &[b1], &[b2], &[c]])?;
    let ab = rho.reduce(&[a, b1])?;
    let bc = rho.reduce(&[b2, c])?;
    if ab.purity() < 1.0 - TOL {
        return Err(Error::ShapeMismatch(format!(
            "`{a}{b1}` marginal is not pure (purity {})",
            ab.purity()
        )));
    }
    let ordered = rho.reduce(&[a, b1, b2, c])?.permute(&[a, b1, b2, c])?;
    let product = ab.permute(&[a, b1])?.tensor(&bc.permute(&[b2, c])?)?;
    let dev = ordered.matrix().max_abs_diff(product.matrix());
    if rho.layout().len() != 4 || dev > TOL {
        return Err(Error::ShapeMismatch(format!(
            "state does not factorize as {a}{b1} ⊗ {b2}{c} (deviation {dev:e})"
        )));
    }
    let sa = rho.entropy_of(&[a])?;
    let ed = ed_interval(&bc, &Partition::new(&[b2], &[c]))?;
    let lower = sa + sa.min(ed.lower);
    let upper = sa + sa.min(ed.upper);
    Ok(ProductRegularized {
        lower,
        upper,
        exact: ed.exact || (upper - lower).abs() <= TOL,
    })
}

/// Discord `δ^{A|B}` through the one-way concentrated information of
/// `ρ^{AB} ⊗ |0⟩⟨0|^C`.
pub fn discord_via_ci(
    rho: &Mstate,
    a: &[&str],
    b: &str,
    config: &OptimizerConfig,
) -> Result<MeasureEstimate> {
    labels_disjoint(rho.layout(), &[a, &[b]])?;
    let rho = rho.reduce(&cat(a, &[b]))?;
    let c = rho.layout().fresh_label("C");
    let ext = rho.tensor(&Mstate::basis(&c, 2, 0)?)?;
    let ow = one_way_ci(&ext, a, b, &[c.as_str()], config)?;
    let i_ab = mi(&rho, a, &[b])?;
    Ok(MeasureEstimate {
        value: (i_ab - ow.value).max(0.0),
        direction: Direction::UpperBoundEstimate,
        config: ow.config,
        achiever: ow.achiever,
    })
}

/// Merging fidelity bound `2^{−(I^{A:BC} − 𝓘)/2}` from the total mutual
/// information and a concentrated-information value.
pub fn lqsm_fidelity_bound(total_mi: f64, ci_value: f64) -> Result<f64> {
    let gap = total_mi - ci_value;
    if !gap.is_finite() {
        return Err(Error::InvalidArgument("non-finite gap".into()));
    }
    if gap < -TOL {
        return Err(Error::InvalidArgument(format!(
            "value {ci_value} exceeds the total mutual information {total_mi}"
        )));
    }
    Ok((-gap.max(0.0) / 2.0).exp2())
}

/// [`lqsm_fidelity_bound`] with `I^{A:BC}` evaluated on `rho`.
pub fn lqsm_fidelity_lower(
    rho: &Mstate,
    alice: &[&str],
    bob: &[&str],
    charlie: &[&str],
    ci_value: f64,
) -> Result<f64> {
    labels_disjoint(rho.layout(), &[alice, bob, charlie])?;
    lqsm_fidelity_bound(mi(rho, alice, &cat(bob, charlie))?, ci_value)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneWayUpper {
    /// `I^{A:BC} + I^{B:C} − δ_est`; tight but relies on the discord estimate.
    pub value: f64,
    /// Same expression with `known_discord` (or 0) in place of the estimate,
    /// valid whatever the optimizer reached.
    pub certified: f64,
    pub discord: MeasureEstimate,
    pub total_mi: f64,
    pub i_bc: f64,
}

/// Upper bound on the one-way concentrated information,
/// `I^{A:BC} + I^{B:C} − δ^{AC|B}`.
pub fn oneway_ci_upper(
    rho: &Mstate,
    alice: &[&str],
    bob: &str,
    charlie: &[&str],
    config: &OptimizerConfig,
) -> Result<OneWayUpper> {
    oneway_ci_upper_with(rho, alice, bob, charlie, config, None, &SearchOptions::default())
}

pub fn oneway_ci_upper_with(
    rho: &Mstate,
    alice: &[&str],
    bob: &str,
    charlie: &[&str],
    config: &OptimizerConfig,
    known_discord: Option<f64>,
    opts: &SearchOptions<'_>,
) -> Result<OneWayUpper> {
    labels_disjoint(rho.layout(), &[alice, &[bob], charlie])?;
    let total_mi = mi(rho, alice, &cat(&[bob], charlie))?;
    let i_bc = mi(rho, &[bob], charlie)?;
    let ac = cat(alice, charlie);
    let discord = discord_with(rho, &ac, bob, config, opts)?;
    Ok(OneWayUpper {
        value: total_mi + i_bc - discord.value,
        certified: total_mi + i_bc - known_discord.unwrap_or(0.0).max(0.0),
        discord,
        total_mi,
        i_bc,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeCheck {
    /// `S(BC) − S(C)`
    pub conditional_entropy: f64,
    pub passes: bool,
}

/// Non-positive `S(BC) − S(C)` suffices for asymptotically perfect merging.
pub fn merge_conditional_entropy_check(
    rho: &Mstate,
    bob: &[&str],
    charlie: &[&str],
) -> Result<MergeCheck> {
    let h = info::conditional_entropy(rho, bob, charlie)?;
    Ok(MergeCheck {
        conditional_entropy: h,
        passes: h <= TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneCheck {
    /// Log-negativity across `AB:C`.
    pub lhs: f64,
    /// Log-negativity across `A:BC`.
    pub rhs: f64,
    /// A failure rules out perfect merging.
    pub passes: bool,
}

/// Necessary condition `E^{AB:C} ≥ E^{A:BC}` for perfect merging, with the
/// log-negativity as the monotone.
pub fn monotone_necessary_check(
    rho: &Mstate,
    alice: &[&str],
    bob: &[&str],
    charlie: &[&str],
) -> Result<MonotoneCheck> {
    labels_disjoint(rho.layout(), &[alice, bob, charlie])?;
    let lhs = measures::log_negativity(rho, &Partition::new(&cat(alice, bob), charlie))?;
    let rhs = measures::log_negativity(rho, &Partition::new(alice, &cat(bob, charlie)))?;
    Ok(MonotoneCheck {
        lhs,
        rhs,
        passes: lhs >= rhs - TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub sender: String,
    pub symbol: String,
    pub operation: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergeOutcome {
    pub achieved_mi: f64,
    pub rounds: usize,
    pub transcript: Vec<Message>,
    /// Final state on A, C, R.
    pub final_state: Mstate,
}

fn projector(v: &[f64; 2]) -> CMatrix {
    CMatrix::outer(&[C64::new(v[0], 0.0), C64::new(v[1], 0.0)])
}

/// Two-round protocol for the separating family: Charlie measures `C` and
/// tells Bob the bit; Bob measures in the basis that bit selects and sends
/// his outcome, which Charlie stores in `R`.
pub fn family15_two_round_merge(c: f64) -> Result<MergeOutcome> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidArgument(format!("overlap must lie in (0, 1), got {c}")));
    }
    let rho = family15(c)?;
    let states = family15_bob_states(c)?;
    let bases = [[states[0], states[2]], [states[1], states[3]]];
    let acr = SystemLayout::qubits(&["A", "C", "R"])?;
    let mut fin = CMatrix::zeros(8, 8);
    for (k, basis) in bases.iter().enumerate() {
        let pc = projector(&if k == 0 { [1.0, 0.0] } else { [0.0, 1.0] });
        let after_c = rho.sandwich("C", &pc)?;
        for (j, b) in basis.iter().enumerate() {
            let branch = Mstate::from_parts(rho.layout().clone(), after_c.clone())
                .sandwich("B", &projector(b))?;
            let ac = Mstate::from_parts(rho.layout().clone(), branch).partial_trace(&["B"])?;
            let flag = Mstate::basis("R", 2, j)?;
            fin.add_scaled(&ac.matrix().kron(flag.matrix()), 1.0);
        }
    }
    let final_state = Mstate::from_parts(acr, fin);
    let transcript = vec![
        Message {
            sender: "Charlie".into(),
            symbol: "c in {0,1}".into(),
            operation: "measure C in the computational basis, send the outcome to Bob".into(),
        },
        Message {
            sender: "Bob".into(),
            symbol: "b in {0,1}".into(),
            operation: "measure B in {|0>,|1>} if c = 0, in {|psi>,|psi_perp>} if c = 1; Charlie writes b into R"
                .into(),
        },
    ];
    Ok(MergeOutcome {
        achieved_mi: mi(&final_state, &["A"], &["C", "R"])?,
        rounds: transcript.len(),
        transcript,
        final_state,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationReport {
    pub c: f64,
    pub total_mi: f64,
    pub i_bc: f64,
    /// `δ^{AC|B}`, upper-bound estimate.
    pub discord: MeasureEstimate,
    pub oneway_upper: f64,
    pub oneway_upper_certified: f64,
    pub two_round: f64,
    /// `two_round − oneway_upper`
    pub gap: f64,
    /// Two rounds beat the one-way bound.
    pub verdict: bool,
}

impl SeparationReport {
    pub fn verdict_line(&self) -> String {
        if self.verdict {
            format!(
                "two-round protocol reaches {:.6} bits, above the one-way bound {:.6} (gap {:.6})",
                self.two_round, self.oneway_upper, self.gap
            )
        } else {
            format!(
                "no separation resolved: two-round {:.6} vs one-way bound {:.6}",
                self.two_round, self.oneway_upper
            )
        }
    }
}

/// Everything needed to see the two-way / one-way separation at overlap `c`.
pub fn family15_separation_report(
    c: f64,
    config: &OptimizerConfig,
    progress: Option<&(dyn Fn(usize, f64) + Sync)>,
) -> Result<SeparationReport> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidArgument(format!("overlap must lie in (0, 1), got {c}")));
    }
    let rho = family15(c)?;
    let opts = SearchOptions {
        warm_starts: Vec::new(),
        progress,
    };
    let up = oneway_ci_upper_with(&rho, &["A"], "B", &["C"], config, None, &opts)?;
    let merge = family15_two_round_merge(c)?;
    let gap = merge.achieved_mi - up.value;
    Ok(SeparationReport {
        c,
        total_mi: up.total_mi,
        i_bc: up.i_bc,
        discord: up.discord,
        oneway_upper: up.value,
        oneway_upper_certified: up.certified,
        two_round: merge.achieved_mi,
        gap,
        verdict: gap > TOL,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdditivityReport {
    pub single: MeasureEstimate,
    pub double: MeasureEstimate,
    /// Two-copy discord at the product of the single-copy measurement.
    pub product_povm: f64,
    /// `|double − 2·single|`
    pub deviation: f64,
}

/// Checks `ρ^{XY} = Σ p_i |i⟩⟨i|^X ⊗ |ψ_i⟩⟨ψ_i|^Y` in the computational
/// basis of `X` (a single party).
fn check_classical_pure_pattern(rho: &Mstate, x: &str, y: &str) -> Result<()> {
    let m = rho.permute(&[x, y])?;
    let dx = m.layout().dim_of(x)?;
    let dy = m.layout().dim_of(y)?;
    let mm = m.matrix();
    for i in 0..dx {
        for j in 0..dx {
            let mut block = CMatrix::zeros(dy, dy);
            for a in 0..dy {
                for b in 0..dy {
                    block[(a, b)] = mm[(i * dy + a, j * dy + b)];
                }
            }
            if i != j {
                if block.max_abs() > TOL {
                    return Err(Error::ShapeMismatch(format!(
                        "`{x}` is not classical: block ({i},{j}) is non-zero"
                    )));
                }
            } else {
                let p = block.trace().re;
                let purity: f64 = block.data().iter().map(|z| z.norm_sqr()).sum();
                if (purity - p * p).abs() > TOL {
                    return Err(Error::ShapeMismatch(format!(
                        "conditional state of `{y}` for `{x}` = {i} is not pure"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Discord of one and two copies of a classical-quantum state with pure
/// conditionals. The two-copy run measures the merged pair of `Y` systems
/// with restarts doubled and the product of the single-copy measurement
/// as an extra starting point.
pub fn discord_additivity_check(
    rho: &Mstate,
    x: &[&str],
    y: &str,
    config: &OptimizerConfig,
    progress: Option<&(dyn Fn(usize, f64) + Sync)>,
) -> Result<AdditivityReport> {
    labels_disjoint(rho.layout(), &[x, &[y]])?;
    let rho = rho.reduce(&cat(x, &[y]))?;
    let xy = rho.merge(x, "X")?.relabel(&[(y, "Y")])?;
    check_classical_pure_pattern(&xy, "X", "Y")?;

    let single = measures::discord(&xy, &["X"], "Y", config)?;
    let v1 = single
        .povm()
        .expect("discord returns its measurement")
        .isometry()?;

    let two = xy.tensor(&xy.suffixed("2"))?;
    let two = two.merge(&["X", "X2"], "XX")?.merge(&["Y", "Y2"], "YY")?;
    let v2 = v1.kron(&v1);
    let product_povm = discord_at(&two, &["XX"], "YY", &rank1_povm(&v2, v2.cols())?)?;

    let mut cfg2 = config.clone();
    cfg2.restarts = config.restarts * 2;
    if let Some(k) = config.outcomes {
        cfg2.outcomes = Some(k * k);
    }
    let opts = SearchOptions {
        warm_starts: vec![complete_unitary(&v2)],
        progress,
    };
    let double = discord_with(&two, &["XX"], "YY", &cfg2, &opts)?;
    let deviation = (double.value - 2.0 * single.value).abs();
    Ok(AdditivityReport {
        single,
        double,
        product_povm,
        deviation,
    })
}

/// Applies the dilation of a rank-1 POVM on `bob`:
/// `|b⟩ ↦ Σ_i ⟨v_i|b⟩ |i⟩^B |i⟩^R |i⟩^E`, with `R` and `E` appended.
/// A one-outcome POVM `{I}` dilates to the identity with `R` and `E` in `|0⟩`.
pub fn dilated_protocol_state(rho: &Mstate, povm: &Povm, bob: &str) -> Result<Mstate> {
    let layout = rho.layout();
    let pb = layout.index_of(bob)?;
    let d = layout.dims()[pb];
    if povm.party_dim() != d {
        return Err(Error::LayoutMismatch(format!(
            "POVM acts on dimension {}, `{bob}` has dimension {d}",
            povm.party_dim()
        )));
    }
    let r_label = layout.fresh_label("R");
    let e_label = {
        let mut l = layout.fresh_label("E");
        if l == r_label {
            l.push('_');
        }
        l
    };
    let trivial = povm.len() == 1 && povm.elements()[0].max_abs_diff(&CMatrix::identity(d)) < TOL;
    let (kb, kr) = if trivial { (d, 2) } else { (povm.len(), povm.len().max(2)) };
    check_dim(rho.dim() / d * kb * kr * kr)?;
    let mut w = CMatrix::zeros(kb * kr * kr, d);
    if trivial {
        for b in 0..d {
            w[(b * kr * kr, b)] = C64::new(1.0, 0.0);
        }
    } else {
        let vs = povm.rank1_vectors()?;
        for (i, v) in vs.iter().enumerate() {
            let row = i * kr * kr + i * kr + i;
            for b in 0..d {
                w[(row, b)] = v[b].conj();
            }
        }
    }
    let op = embed_operator(&layout.dims(), pb, &w);
    let m = op.matmul(rho.matrix()).matmul(&op.adjoint());
    let mut parties: Vec<Party> = Vec::new();
    for (i, p) in layout.parties().iter().enumerate() {
        if i == pb {
            parties.push(Party {
                label: p.label.clone(),
                dim: kb,
            });
            parties.push(Party {
                label: r_label.clone(),
                dim: kr,
            });
            parties.push(Party {
                label: e_label.clone(),
                dim: kr,
            });
        } else {
            parties.push(p.clone());
        }
    }
    let tmp = Mstate::from_parts(SystemLayout::from_parties(parties)?, m);
    let mut order: Vec<&str> = layout.labels();
    order.push(&r_label);
    order.push(&e_label);
    tmp.permute(&order)
}

/// `(I(A:BE|CR), I^{A:BC}(ρ) − I^{A:CR}(σ))` for the dilated state `σ`; the
/// two agree exactly.
pub fn cmi_identity_sides(
    rho: &Mstate,
    sigma: &Mstate,
    alice: &[&str],
    bob: &str,
    charlie: &[&str],
) -> Result<(f64, f64)> {
    let labels = sigma.layout().labels();
    let n = labels.len();
    let (r, e) = (labels[n - 2], labels[n - 1]);
    let cr = cat(charlie, &[r]);
    let lhs = info::conditional_mutual_info(sigma, alice, &[bob, e], &cr)?;
    let rhs = mi(rho, alice, &cat(&[bob], charlie))? - mi(sigma, alice, &cr)?;
    Ok((lhs, rhs))
}

/// Flagged post-measurement state, as a one-way protocol leaves it.
pub fn one_way_final_state(rho: &Mstate, povm: &Povm, bob: &str) -> Result<Mstate> {
    let e = measure_ensemble(rho, povm, bob)?;
    flag_state(&e, &rho.layout().fresh_label("R"))
}

/// One-way estimate with a progress callback.
pub fn one_way_ci_progress(
    rho: &Mstate,
    alice: &[&str],
    bob: &str,
    charlie: &[&str],
    config: &OptimizerConfig,
    progress: Option<&(dyn Fn(usize, f64) + Sync)>,
) -> Result<MeasureEstimate> {
    let opts = SearchOptions {
        warm_starts: Vec::new(),
        progress,
    };
    one_way_ci_with(rho, alice, bob, charlie, config, &opts)
}
