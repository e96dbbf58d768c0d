//! Correlation measures built on measured ensembles.
//!
//! Optimized quantities are one-sided: the search only ever evaluates
//! achievable measurements or decompositions, so a maximization approaches
//! its supremum from below and a minimization its infimum from above.
//! Each estimate carries a [`Direction`] saying which side it sits on.

use std::fmt;

use crate::error::{Error, Result};
use crate::info::{self, Partition};
use crate::optim::{
    maximize_isometry, minimize_isometry, rank1_povm, OptimizerConfig, Optimum, Povm, SearchOptions,
};
use crate::qmat::{self, CMatrix, C64, ZERO_CLIP};
use crate::states::{
    entropy_of_spectrum, permute_matrix, Ensemble, EnsembleMember, Mstate, SystemLayout, TraceMap,
};

/// Outcomes with probability below this are dropped.
pub const ZERO_PROB: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Exact,
    /// True value is at least this large (up to optimizer convergence).
    LowerBoundEstimate,
    /// True value is at most this large (up to optimizer convergence).
    UpperBoundEstimate,
}

impl Direction {
    pub fn tag(self) -> &'static str {
        match self {
            Direction::Exact => "exact",
            Direction::LowerBoundEstimate => "lower-est",
            Direction::UpperBoundEstimate => "upper-est",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Achiever {
    Povm(Povm),
    Ensemble(Ensemble),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureEstimate {
    pub value: f64,
    pub direction: Direction,
    /// Configuration used, with the outcome count filled in.
    pub config: Option<OptimizerConfig>,
    pub achiever: Option<Achiever>,
}

impl MeasureEstimate {
    pub fn exact(value: f64) -> Self {
        MeasureEstimate {
            value,
            direction: Direction::Exact,
            config: None,
            achiever: None,
        }
    }

    pub fn povm(&self) -> Option<&Povm> {
        match &self.achiever {
            Some(Achiever::Povm(p)) => Some(p),
            _ => None,
        }
    }

    pub fn ensemble(&self) -> Option<&Ensemble> {
        match &self.achiever {
            Some(Achiever::Ensemble(e)) => Some(e),
            _ => None,
        }
    }
}

impl fmt::Display for MeasureEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6} bits ({})", self.value, self.direction)
    }
}

/// `−Σ λ log₂ λ` of an unnormalized PSD matrix.
fn h(m: &CMatrix) -> f64 {
    entropy_of_spectrum(&qmat::eigenvalues_unchecked(m))
}

/// Blocks of a state relative to one measured party: for a rank-1 outcome
/// `|u⟩⟨u|`, the unnormalized conditional state on the other parties is
/// `σ[r][r'] = Σ_ab conj(u_a) ρ[(a,r),(b,r')] u_b`. Only non-zero blocks
/// on or above the diagonal are stored.
#[derive(Debug, Clone)]
pub(crate) struct CondKernel {
    d: usize,
    rest_dim: usize,
    blocks: Vec<(usize, usize, Vec<C64>)>,
}

impl CondKernel {
    pub(crate) fn new(rho: &Mstate, measured: usize) -> Self {
        let dims = rho.layout().dims();
        let mut order = vec![measured];
        order.extend((0..dims.len()).filter(|&i| i != measured));
        let m = permute_matrix(rho.matrix(), &dims, &order);
        let d = dims[measured];
        let rd = rho.dim() / d;
        let mut blocks = Vec::new();
        for r in 0..rd {
            for r2 in r..rd {
                let mut blk = vec![C64::new(0.0, 0.0); d * d];
                let mut nonzero = false;
                for a in 0..d {
                    for b in 0..d {
                        let z = m[(a * rd + r, b * rd + r2)];
                        nonzero |= z != C64::new(0.0, 0.0);
                        blk[a * d + b] = z;
                    }
                }
                if nonzero {
                    blocks.push((r, r2, blk));
                }
            }
        }
        CondKernel {
            d,
            rest_dim: rd,
            blocks,
        }
    }

    fn conditional(&self, u: &[C64], out: &mut CMatrix) {
        let d = self.d;
        out.data_mut().fill(C64::new(0.0, 0.0));
        for (r, r2, blk) in &self.blocks {
            let mut s = C64::new(0.0, 0.0);
            for a in 0..d {
                let mut row = C64::new(0.0, 0.0);
                for b in 0..d {
                    row += blk[a * d + b] * u[b];
                }
                s += u[a].conj() * row;
            }
            if r == r2 {
                out[(*r, *r)] = C64::new(s.re, 0.0);
            } else {
                out[(*r, *r2)] = s;
                out[(*r2, *r)] = s.conj();
            }
        }
    }
}

/// `constant + Σ_i [H(plus(σ_i)) − H(minus(σ_i))]` over the rank-1 outcomes
/// encoded by a `K × d` isometry.
pub(crate) struct MeasuredObjective {
    kernel: CondKernel,
    plus: TraceMap,
    minus: TraceMap,
    constant: f64,
}

impl MeasuredObjective {
    /// `plus` and `minus` list party labels of `rho` other than `measured`.
    pub(crate) fn new(
        rho: &Mstate,
        measured: &str,
        plus: &[&str],
        minus: &[&str],
        constant: f64,
    ) -> Result<Self> {
        let layout = rho.layout();
        let mi = layout.index_of(measured)?;
        let rest: Vec<usize> = (0..layout.len()).filter(|&i| i != mi).collect();
        let rest_dims: Vec<usize> = rest.iter().map(|&i| layout.dims()[i]).collect();
        let local = |labels: &[&str]| -> Result<Vec<usize>> {
            let mut idx = Vec::new();
            for &l in labels {
                let g = layout.index_of(l)?;
                let pos = rest.iter().position(|&r| r == g).ok_or_else(|| {
                    Error::InvalidPartition(format!("`{l}` is the measured party"))
                })?;
                idx.push(pos);
            }
            idx.sort_unstable();
            idx.dedup();
            Ok(idx)
        };
        Ok(MeasuredObjective {
            kernel: CondKernel::new(rho, mi),
            plus: TraceMap::new(&rest_dims, &local(plus)?),
            minus: TraceMap::new(&rest_dims, &local(minus)?),
            constant,
        })
    }

    pub(crate) fn measured_dim(&self) -> usize {
        self.kernel.d
    }

    pub(crate) fn value(&self, v: &CMatrix) -> f64 {
        let d = self.kernel.d;
        let rd = self.kernel.rest_dim;
        let mut sigma = CMatrix::zeros(rd, rd);
        let mut plus = CMatrix::zeros(self.plus.keep_dim(), self.plus.keep_dim());
        let mut minus = CMatrix::zeros(self.minus.keep_dim(), self.minus.keep_dim());
        let mut u = vec![C64::new(0.0, 0.0); d];
        let mut acc = 0.0;
        let term = |map: &TraceMap, sigma: &CMatrix, buf: &mut CMatrix| {
            if map.is_identity() {
                h(sigma)
            } else {
                map.apply_into(sigma, buf);
                h(buf)
            }
        };
        for i in 0..v.rows() {
            for a in 0..d {
                u[a] = v[(i, a)].conj();
            }
            self.kernel.conditional(&u, &mut sigma);
            if sigma.trace().re < ZERO_PROB {
                continue;
            }
            acc += term(&self.plus, &sigma, &mut plus) - term(&self.minus, &sigma, &mut minus);
        }
        self.constant + acc
    }

    /// `(p_i, σ_i / p_i)` for every kept outcome.
    pub(crate) fn outcomes(&self, v: &CMatrix) -> Vec<(f64, CMatrix)> {
        let d = self.kernel.d;
        let mut out = Vec::new();
        let mut u = vec![C64::new(0.0, 0.0); d];
        for i in 0..v.rows() {
            let mut sigma = CMatrix::zeros(self.kernel.rest_dim, self.kernel.rest_dim);
            for a in 0..d {
                u[a] = v[(i, a)].conj();
            }
            self.kernel.conditional(&u, &mut sigma);
            let p = sigma.trace().re;
            if p >= ZERO_PROB {
                out.push((p, sigma.scale(1.0 / p)));
            }
        }
        out
    }
}

fn rest_layout(layout: &SystemLayout, drop: &str) -> Result<SystemLayout> {
    SystemLayout::from_parties(
        layout
            .parties()
            .iter()
            .filter(|p| p.label != drop)
            .cloned()
            .collect(),
    )
}

fn ensemble_from_outcomes(layout: &SystemLayout, outs: Vec<(f64, CMatrix)>) -> Result<Ensemble> {
    let total: f64 = outs.iter().map(|o| o.0).sum();
    let weights = outs.iter().map(|o| o.0 / total).collect();
    let members = outs
        .into_iter()
        .map(|(_, m)| EnsembleMember::Mixed(Mstate::from_parts(layout.clone(), m)))
        .collect();
    Ensemble::new(weights, members)
}

fn check_disjoint(layout: &SystemLayout, sets: &[&[&str]]) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for set in sets {
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

/// Post-measurement ensemble on the unmeasured parties.
pub fn measure_ensemble(rho: &Mstate, povm: &Povm, party: &str) -> Result<Ensemble> {
    let layout = rho.layout();
    let pi = layout.index_of(party)?;
    let d = layout.dims()[pi];
    if povm.party_dim() != d {
        return Err(Error::LayoutMismatch(format!(
            "POVM acts on dimension {}, party `{party}` has dimension {d}",
            povm.party_dim()
        )));
    }
    if layout.len() < 2 {
        return Err(Error::InvalidArgument("nothing left after measuring".into()));
    }
    let dims = layout.dims();
    let mut order = vec![pi];
    order.extend((0..dims.len()).filter(|&i| i != pi));
    let m = permute_matrix(rho.matrix(), &dims, &order);
    let rd = rho.dim() / d;
    let mut outs = Vec::new();
    for e in povm.elements() {
        // Tr_M[(E ⊗ I) ρ] = Σ_ab E[a][b] ρ[(b, ·), (a, ·)]
        let mut sigma = CMatrix::zeros(rd, rd);
        for a in 0..d {
            for b in 0..d {
                let w = e[(a, b)];
                if w == C64::new(0.0, 0.0) {
                    continue;
                }
                for r in 0..rd {
                    for r2 in 0..rd {
                        sigma[(r, r2)] += w * m[(b * rd + r, a * rd + r2)];
                    }
                }
            }
        }
        let p = sigma.trace().re;
        if p >= ZERO_PROB {
            outs.push((p, sigma.hermitian_part().scale(1.0 / p)));
        }
    }
    ensemble_from_outcomes(&rest_layout(layout, party)?, outs)
}

/// `Σ p_i ρ_i ⊗ |i⟩⟨i|` with the register appended last. A single-member
/// ensemble gets a two-level register in `|0⟩`.
pub fn flag_state(e: &Ensemble, register_label: &str) -> Result<Mstate> {
    let layout = e.layout();
    if layout.contains(register_label) {
        return Err(Error::DuplicateParty(register_label.to_string()));
    }
    let k = e.len().max(2);
    let full = layout.join(&SystemLayout::new([(register_label, k)])?)?;
    qmat::check_dim(full.total_dim())?;
    let n = layout.total_dim();
    let mut m = CMatrix::zeros(n * k, n * k);
    for (i, (w, member)) in e.weights().iter().zip(e.members()).enumerate() {
        let rho = member.to_mstate();
        for r in 0..n {
            for c in 0..n {
                m[(r * k + i, c * k + i)] = rho.matrix()[(r, c)] * *w;
            }
        }
    }
    Ok(Mstate::from_parts(full, m))
}

fn search_config(cfg: &OptimizerConfig, k: usize) -> OptimizerConfig {
    let mut c = cfg.clone();
    c.outcomes = Some(k);
    c
}

fn optimum_povm(o: &Optimum, d: usize) -> Result<Povm> {
    rank1_povm(&o.isometry(), d)
}

/// One-way concentrated information: the best `I^{A:CR}` after Bob
/// measures with a rank-1 POVM and sends the outcome to register `R`.
pub fn one_way_ci(
    rho: &Mstate,
    alice: &[&str],
    bob: &str,
    charlie: &[&str],
    config: &OptimizerConfig,
) -> Result<MeasureEstimate> {
    one_way_ci_with(rho, alice, bob, charlie, config, &SearchOptions::default())
}

pub fn one_way_ci_with(
    rho: &Mstate,
    alice: &[&str],
    bob: &str,
    charlie: &[&str],
    config: &OptimizerConfig,
    opts: &SearchOptions<'_>,
) -> Result<MeasureEstimate> {
    if alice.is_empty() {
        return Err(Error::InvalidPartition("Alice holds no party".into()));
    }
    check_disjoint(rho.layout(), &[alice, &[bob], charlie])?;
    let keep: Vec<&str> = alice.iter().chain([&bob]).chain(charlie).copied().collect();
    let rho = rho.reduce(&keep)?;
    let s_a = rho.entropy_of(alice)?;
    let ac: Vec<&str> = alice.iter().chain(charlie).copied().collect();
    let obj = MeasuredObjective::new(&rho, bob, charlie, &ac, s_a)?;
    let d = obj.measured_dim();
    let k = config.outcomes_for(d)?;
    let o = maximize_isometry(|v| obj.value(v), k, d, config, opts)?;
    Ok(MeasureEstimate {
        value: o.value,
        direction: Direction::LowerBoundEstimate,
        config: Some(search_config(config, k)),
        achiever: Some(Achiever::Povm(optimum_povm(&o, d)?)),
    })
}

/// Classical correlation `J = S(X) − Σ p_i S(ρ_i^X)` for a given POVM on `measured`.
pub fn classical_correlation_at(
    rho: &Mstate,
    unmeasured: &[&str],
    measured: &str,
    povm: &Povm,
) -> Result<f64> {
    check_disjoint(rho.layout(), &[unmeasured, &[measured]])?;
    let keep: Vec<&str> = unmeasured.iter().chain([&measured]).copied().collect();
    let rho = rho.reduce(&keep)?;
    let e = measure_ensemble(&rho, povm, measured)?;
    let avg: f64 = e
        .weights()
        .iter()
        .zip(e.members())
        .map(|(w, m)| w * m.to_mstate().entropy())
        .sum();
    Ok(rho.entropy_of(unmeasured)? - avg)
}

/// `I^{X:Y} − J` for a given POVM; an upper bound on the discord.
pub fn discord_at(rho: &Mstate, unmeasured: &[&str], measured: &str, povm: &Povm) -> Result<f64> {
    let i = info::mi(rho, unmeasured, &[measured])?;
    Ok((i - classical_correlation_at(rho, unmeasured, measured, povm)?).max(0.0))
}

/// Discord `δ^{X|Y}` with `Y = measured`: `I^{X:Y}` minus the best classical
/// correlation found, clipped at zero. Upper-bound estimate.
pub fn discord(
    rho: &Mstate,
    unmeasured: &[&str],
    measured: &str,
    config: &OptimizerConfig,
) -> Result<MeasureEstimate> {
    discord_with(rho, unmeasured, measured, config, &SearchOptions::default())
}

pub fn discord_with(
    rho: &Mstate,
    unmeasured: &[&str],
    measured: &str,
    config: &OptimizerConfig,
    opts: &SearchOptions<'_>,
) -> Result<MeasureEstimate> {
    if unmeasured.is_empty() {
        return Err(Error::InvalidPartition("no unmeasured party".into()));
    }
    check_disjoint(rho.layout(), &[unmeasured, &[measured]])?;
    let keep: Vec<&str> = unmeasured.iter().chain([&measured]).copied().collect();
    let rho = rho.reduce(&keep)?;
    let i_xy = info::mi(&rho, unmeasured, &[measured])?;
    let s_x = rho.entropy_of(unmeasured)?;
    let obj = MeasuredObjective::new(&rho, measured, &[], unmeasured, s_x)?;
    let d = obj.measured_dim();
    let k = config.outcomes_for(d)?;
    let o = maximize_isometry(|v| obj.value(v), k, d, config, opts)?;
    Ok(MeasureEstimate {
        value: (i_xy - o.value).clamp(0.0, i_xy.max(0.0)),
        direction: Direction::UpperBoundEstimate,
        config: Some(search_config(config, k)),
        achiever: Some(Achiever::Povm(optimum_povm(&o, d)?)),
    })
}

fn rank(rho: &Mstate) -> usize {
    rho.eigenvalues().iter().filter(|&&l| l > ZERO_CLIP).count()
}

/// Shared route for assisted entanglement and formation: purify, measure the
/// purifying ancilla, average the entanglement of the steered pure states.
fn steered(
    rho: &Mstate,
    alice: &[&str],
    config: &OptimizerConfig,
    maximize: bool,
) -> Result<MeasureEstimate> {
    if alice.is_empty() || alice.len() >= rho.layout().len() {
        return Err(Error::InvalidPartition(
            "Alice must hold some but not all parties".into(),
        ));
    }
    check_disjoint(rho.layout(), &[alice])?;
    let direction = if maximize {
        Direction::LowerBoundEstimate
    } else {
        Direction::UpperBoundEstimate
    };
    if rank(rho) == 1 {
        return Ok(MeasureEstimate {
            value: rho.entropy_of(alice)?,
            direction: Direction::Exact,
            config: None,
            achiever: Some(Achiever::Ensemble(Ensemble::new(
                vec![1.0],
                vec![EnsembleMember::Mixed(rho.clone())],
            )?)),
        });
    }
    let z = rho.layout().fresh_label("Z");
    let psi = rho.purify(&z)?.to_mstate();
    let obj = MeasuredObjective::new(&psi, &z, alice, &[], 0.0)?;
    let m = obj.measured_dim();
    let k = config.outcomes_for(m)?;
    let opts = SearchOptions::default();
    let o = if maximize {
        maximize_isometry(|v| obj.value(v), k, m, config, &opts)?
    } else {
        minimize_isometry(|v| obj.value(v), k, m, config, &opts)?
    };
    let ens = ensemble_from_outcomes(rho.layout(), obj.outcomes(&o.isometry()))?;
    Ok(MeasureEstimate {
        value: o.value.max(0.0),
        direction,
        config: Some(search_config(config, k)),
        achiever: Some(Achiever::Ensemble(ens)),
    })
}

/// Entanglement of assistance of `ρ^{AC}` across `alice : rest`.
pub fn eoa(rho: &Mstate, alice: &[&str], config: &OptimizerConfig) -> Result<MeasureEstimate> {
    steered(rho, alice, config, true)
}

/// Entanglement of formation of `ρ^{XZ}` across `x : rest`.
pub fn eof(rho: &Mstate, x: &[&str], config: &OptimizerConfig) -> Result<MeasureEstimate> {
    steered(rho, x, config, false)
}

/// Largest purifying ancilla [`kw_discord`] accepts.
pub const KW_MAX_ANCILLA: usize = 8;

/// Discord `δ^{X|Y}` through `E_f(ρ^{XZ}) − S(ρ^{XY}) + S(ρ^Y)` with `Z`
/// purifying `XY`.
pub fn kw_discord(
    rho: &Mstate,
    x: &[&str],
    y: &[&str],
    config: &OptimizerConfig,
) -> Result<MeasureEstimate> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::InvalidPartition("both sides must be non-empty".into()));
    }
    check_disjoint(rho.layout(), &[x, y])?;
    let keep: Vec<&str> = x.iter().chain(y).copied().collect();
    let rho = rho.reduce(&keep)?;
    let r = rank(&rho);
    if r > KW_MAX_ANCILLA {
        return Err(Error::AncillaTooLarge(r));
    }
    let z = rho.layout().fresh_label("Z");
    let psi = rho.purify(&z)?.to_mstate();
    let xz_labels: Vec<&str> = x.iter().copied().chain([z.as_str()]).collect();
    let xz = psi.reduce(&xz_labels)?;
    let ef = eof(&xz, x, config)?;
    let value = ef.value - rho.entropy() + rho.entropy_of(y)?;
    let direction = match ef.direction {
        Direction::Exact => Direction::Exact,
        _ => Direction::UpperBoundEstimate,
    };
    Ok(MeasureEstimate {
        value,
        direction,
        config: ef.config,
        achiever: ef.achiever,
    })
}

fn reduce_to_cut(rho: &Mstate, cut: &Partition) -> Result<Mstate> {
    cut.validate(rho.layout())?;
    let keep: Vec<&str> = cut.left().into_iter().chain(cut.right()).collect();
    rho.reduce(&keep)
}

/// `log₂ ‖ρ^{T_left}‖₁`
pub fn log_negativity(rho: &Mstate, cut: &Partition) -> Result<f64> {
    let r = reduce_to_cut(rho, cut)?;
    let pt = r.partial_transpose_many(&cut.left())?;
    Ok(qmat::trace_norm(&pt)?.log2().max(0.0))
}

/// Hashing bound `max(0, S(y) − S(xy), S(x) − S(xy))`.
pub fn coherent_info_lower(rho: &Mstate, cut: &Partition) -> Result<f64> {
    let r = reduce_to_cut(rho, cut)?;
    let s_xy = r.entropy();
    let s_x = r.entropy_of(&cut.left())?;
    let s_y = r.entropy_of(&cut.right())?;
    Ok((s_y - s_xy).max(s_x - s_xy).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdInterval {
    pub lower: f64,
    pub upper: f64,
    /// Set for maximally correlated states, where both ends are the hashing value.
    pub exact: bool,
}

/// Whether the state across `cut` has the form `Σ a_ij |ii⟩⟨jj|` in the
/// computational basis (within `1e-10`) with more than one populated level.
pub fn is_maximally_correlated(rho: &Mstate, cut: &Partition) -> Result<bool> {
    let r = reduce_to_cut(rho, cut)?;
    let dl = r.layout().dim_of_set(&cut.left())?;
    let dr = r.layout().dim_of_set(&cut.right())?;
    if dl != dr {
        return Ok(false);
    }
    let order: Vec<&str> = cut.left().into_iter().chain(cut.right()).collect();
    let m = r.permute(&order)?;
    let n = dl;
    let m = m.matrix();
    let mut populated = 0;
    for i in 0..n * n {
        let diag_i = i / n == i % n;
        if diag_i && m[(i, i)].re > 1e-10 {
            populated += 1;
        }
        for j in 0..n * n {
            let diag_j = j / n == j % n;
            if !(diag_i && diag_j) && m[(i, j)].norm() > 1e-10 {
                return Ok(false);
            }
        }
    }
    Ok(populated >= 2)
}

/// Distillable entanglement bracket: hashing bound below, log-negativity above.
pub fn ed_interval(rho: &Mstate, cut: &Partition) -> Result<EdInterval> {
    let lower = coherent_info_lower(rho, cut)?;
    if is_maximally_correlated(rho, cut)? {
        return Ok(EdInterval {
            lower,
            upper: lower,
            exact: true,
        });
    }
    let upper = log_negativity(rho, cut)?;
    Ok(EdInterval {
        lower,
        upper: upper.max(lower),
        exact: false,
    })
}

/// `min(S(ρ^A), S(ρ^C))` with `C` the parties not in `alice`.
pub fn regularized_eoa(rho: &Mstate, alice: &[&str]) -> Result<f64> {
    check_disjoint(rho.layout(), &[alice])?;
    let rest: Vec<&str> = rho
        .layout()
        .labels()
        .into_iter()
        .filter(|l| !alice.contains(l))
        .collect();
    if alice.is_empty() || rest.is_empty() {
        return Err(Error::LayoutMismatch("need a bipartite split".into()));
    }
    Ok(rho.entropy_of(alice)?.min(rho.entropy_of(&rest)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::mi;
    use crate::optim::haar_unitary;
    use crate::rng::SeedStream;
    use crate::states::preset::{bell_pair, family15};
    use crate::states::random::{random_mstate, random_pure};
    use crate::states::{preset, PureState};

    fn cfg() -> OptimizerConfig {
        OptimizerConfig::default().with_restarts(8)
    }

    fn ghz() -> Mstate {
        preset("ghz", &[]).unwrap().to_mstate()
    }

    fn bell() -> Mstate {
        preset("bell", &[]).unwrap().to_mstate()
    }

    fn x_basis() -> Povm {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        rank1_povm(&CMatrix::from_real_rows(&[&[h, h], &[h, -h]]), 2).unwrap()
    }

    fn classical_ab() -> Mstate {
        preset("classical_classical", &[0.3, 0.7]).unwrap().to_mstate()
    }

    /// Brute-force oracle: best (or worst) average entanglement over
    /// projective measurements of a qubit purifying ancilla, on a fine grid.
    /// Independent of the optimizer and of the kernel.
    fn grid_steering(rho: &Mstate, alice: &str, best: fn(f64, f64) -> f64, init: f64) -> f64 {
        let psi = rho.purify("Q").unwrap();
        assert_eq!(psi.layout().dim_of("Q").unwrap(), 2);
        let amps = psi.amplitudes();
        let n = amps.len() / 2;
        let mut out = init;
        for ti in 0..=60 {
            for pi in 0..=60 {
                let th = std::f64::consts::PI * ti as f64 / 60.0;
                let ph = 2.0 * std::f64::consts::PI * pi as f64 / 60.0;
                let e0 = [C64::new((th / 2.0).cos(), 0.0), C64::from_polar((th / 2.0).sin(), ph)];
                let e1 = [-e0[1].conj(), e0[0].conj()];
                let mut avg = 0.0;
                for e in [e0, e1] {
                    let v: Vec<C64> = (0..n)
                        .map(|i| e[0].conj() * amps[2 * i] + e[1].conj() * amps[2 * i + 1])
                        .collect();
                    let p: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                    if p < 1e-14 {
                        continue;
                    }
                    let s = PureState::normalized(rho.layout().clone(), v)
                        .unwrap()
                        .to_mstate()
                        .entropy_of(&[alice])
                        .unwrap();
                    avg += p * s;
                }
                out = best(out, avg);
            }
        }
        out
    }

    #[test]
    fn kernel_matches_measure_ensemble() {
        let l = SystemLayout::qubits(&["A", "B", "C"]).unwrap();
        let rho = random_mstate(&l, 5, 4);
        let v = crate::optim::UnitaryParam::identity(4)
            .with_base(haar_unitary(4, 2))
            .isometry(2);
        let povm = rank1_povm(&v, 2).unwrap();
        let e = measure_ensemble(&rho, &povm, "B").unwrap();
        let obj = MeasuredObjective::new(&rho, "B", &["C"], &["A", "C"], 0.0).unwrap();
        let outs = obj.outcomes(&v);
        assert_eq!(outs.len(), e.len());
        for ((p, s), (w, m)) in outs.iter().zip(e.weights().iter().zip(e.members())) {
            let total: f64 = outs.iter().map(|o| o.0).sum();
            assert!((p / total - w).abs() < 1e-12);
            assert!(s.max_abs_diff(m.to_mstate().matrix()) < 1e-12);
        }
        // value against flag-state mutual information
        let flagged = flag_state(&e, "R").unwrap();
        let direct = mi(&flagged, &["A"], &["C", "R"]).unwrap();
        let obj = MeasuredObjective::new(&rho, "B", &["C"], &["A", "C"], rho.entropy_of(&["A"]).unwrap()).unwrap();
        assert!((obj.value(&v) - direct).abs() < 1e-10);
    }

    #[test]
    fn measure_ensemble_examples() {
        // classical copy: deterministic conditionals
        let e = measure_ensemble(&classical_ab(), &Povm::computational(2), "B").unwrap();
        assert_eq!(e.len(), 2);
        for m in e.members() {
            assert!(m.to_mstate().purity() > 1.0 - 1e-12);
        }
        // GHZ, X basis on B: Bell states on AC
        let e = measure_ensemble(&ghz(), &x_basis(), "B").unwrap();
        assert_eq!(e.weights().len(), 2);
        let phi_plus = bell_pair("A", "C").to_mstate();
        let phi_minus = PureState::from_real(
            SystemLayout::qubits(&["A", "C"]).unwrap(),
            &[1.0, 0.0, 0.0, -1.0],
        )
        .unwrap()
        .to_mstate();
        assert!((e.weights()[0] - 0.5).abs() < 1e-12);
        assert!(e.members()[0].to_mstate().matrix().max_abs_diff(phi_plus.matrix()) < 1e-12);
        assert!(e.members()[1].to_mstate().matrix().max_abs_diff(phi_minus.matrix()) < 1e-12);
        // product: conditionals equal the marginal
        let a = random_mstate(&SystemLayout::qubits(&["A"]).unwrap(), 2, 1);
        let b = random_mstate(&SystemLayout::qubits(&["B"]).unwrap(), 2, 2);
        let prod = a.tensor(&b).unwrap();
        let povm = rank1_povm(&haar_unitary(4, 3), 2).unwrap();
        let e = measure_ensemble(&prod, &povm, "B").unwrap();
        for m in e.members() {
            assert!(m.to_mstate().matrix().max_abs_diff(a.matrix()) < 1e-12);
        }
        assert!(e.average().matrix().max_abs_diff(a.matrix()) < 1e-9);
        assert!(matches!(
            measure_ensemble(&prod, &Povm::computational(3), "B"),
            Err(Error::LayoutMismatch(_))
        ));
    }

    #[test]
    fn flag_state_examples() {
        let rho = random_mstate(&SystemLayout::qubits(&["A"]).unwrap(), 2, 5);
        let single = Ensemble::new(vec![1.0], vec![EnsembleMember::Mixed(rho.clone())]).unwrap();
        let f = flag_state(&single, "R").unwrap();
        assert!(f.matrix().max_abs_diff(rho.tensor(&Mstate::basis("R", 2, 0).unwrap()).unwrap().matrix()) < 1e-15);

        let zero = Mstate::basis("A", 2, 0).unwrap();
        let plus = PureState::from_real(SystemLayout::qubits(&["A"]).unwrap(), &[1.0, 1.0]).unwrap();
        let e = Ensemble::new(
            vec![0.5, 0.5],
            vec![EnsembleMember::Mixed(zero), EnsembleMember::Pure(plus)],
        )
        .unwrap();
        let f = flag_state(&e, "R").unwrap();
        assert!((f.entropy() - 1.0).abs() < 1e-12);

        // relabeling outcomes leaves I^{A:R} alone
        let rho = random_mstate(&SystemLayout::qubits(&["A", "B"]).unwrap(), 4, 6);
        let e = measure_ensemble(&rho, &rank1_povm(&haar_unitary(4, 1), 2).unwrap(), "B").unwrap();
        let mut w = e.weights().to_vec();
        let mut m = e.members().to_vec();
        w.reverse();
        m.reverse();
        let e2 = Ensemble::new(w, m).unwrap();
        let i1 = mi(&flag_state(&e, "R").unwrap(), &["A"], &["R"]).unwrap();
        let i2 = mi(&flag_state(&e2, "R").unwrap(), &["A"], &["R"]).unwrap();
        assert!((i1 - i2).abs() < 1e-12);
        assert!(matches!(flag_state(&e, "A"), Err(Error::DuplicateParty(_))));
    }

    #[test]
    fn one_way_ci_examples() {
        // classical-classical AB ⊗ |0⟩ on C: equals I^{A:B}
        let rho = classical_ab().tensor(&Mstate::basis("C", 2, 0).unwrap()).unwrap();
        let v = one_way_ci(&rho, &["A"], "B", &["C"], &cfg()).unwrap();
        let iab = mi(&rho, &["A"], &["B"]).unwrap();
        assert!((v.value - iab).abs() < 1e-6, "{} vs {iab}", v.value);
        assert_eq!(v.direction, Direction::LowerBoundEstimate);

        // GHZ: S(A) + E_a(ρ^{AC}), E_a from a brute-force grid oracle
        let g = ghz();
        let ea = grid_steering(&g.reduce(&["A", "C"]).unwrap(), "A", f64::max, 0.0);
        let oracle = g.entropy_of(&["A"]).unwrap() + ea;
        assert!((oracle - 2.0).abs() < 1e-9);
        let v = one_way_ci(&g, &["A"], "B", &["C"], &cfg()).unwrap();
        assert!((v.value - oracle).abs() <= 5e-3, "{}", v.value);

        // product with Alice: zero
        let a = random_mstate(&SystemLayout::qubits(&["A"]).unwrap(), 2, 8);
        let bc = random_mstate(&SystemLayout::qubits(&["B", "C"]).unwrap(), 3, 9);
        let v = one_way_ci(&a.tensor(&bc).unwrap(), &["A"], "B", &["C"], &cfg()).unwrap();
        assert!(v.value.abs() < 1e-9);
    }

    #[test]
    fn one_way_ci_within_chain() {
        let mut seeds = SeedStream::new(31);
        let l = SystemLayout::qubits(&["A", "B", "C"]).unwrap();
        for _ in 0..4 {
            let rho = random_mstate(&l, 3, seeds.next_seed());
            let v = one_way_ci(&rho, &["A"], "B", &["C"], &cfg()).unwrap().value;
            assert!(v >= mi(&rho, &["A"], &["C"]).unwrap() - 1e-9);
            assert!(v <= mi(&rho, &["A"], &["B", "C"]).unwrap() + 1e-9);
        }
    }

    #[test]
    fn discord_examples() {
        let d = discord(&classical_ab(), &["A"], "B", &cfg()).unwrap();
        assert!(d.value.abs() < 1e-6);
        assert_eq!(d.direction, Direction::UpperBoundEstimate);
        let d = discord(&bell(), &["A"], "B", &cfg()).unwrap();
        assert!((d.value - 1.0).abs() <= 5e-3);
        for c in [0.3, 0.7071, 0.9] {
            let f = family15(c).unwrap();
            let d = discord(&f, &["A", "C"], "B", &cfg()).unwrap();
            assert!(d.value > 0.0);
            assert!(d.value <= mi(&f, &["A", "C"], &["B"]).unwrap() + 1e-9);
        }
    }

    #[test]
    fn discord_zero_for_block_diagonal_in_local_basis() {
        // Σ p_i ρ_i^X ⊗ |b_i⟩⟨b_i| with {b_i} an orthonormal basis rotated by U
        let u = haar_unitary(2, 77);
        let mut m = CMatrix::zeros(4, 4);
        for i in 0..2 {
            let rx = random_mstate(&SystemLayout::qubits(&["X"]).unwrap(), 2, i as u64);
            let b: Vec<C64> = (0..2).map(|r| u[(r, i)]).collect();
            m.add_scaled(&rx.matrix().kron(&CMatrix::outer(&b)), [0.4, 0.6][i]);
        }
        let rho = Mstate::new(SystemLayout::qubits(&["X", "Y"]).unwrap(), m).unwrap();
        let d = discord(&rho, &["X"], "Y", &cfg()).unwrap();
        assert!(d.value <= 1e-6, "{}", d.value);
    }

    #[test]
    fn eoa_examples() {
        let psi = random_pure(&SystemLayout::qubits(&["A", "C"]).unwrap(), 3).to_mstate();
        let e = eoa(&psi, &["A"], &cfg()).unwrap();
        assert!((e.value - psi.entropy_of(&["A"]).unwrap()).abs() < 1e-12);
        assert_eq!(e.direction, Direction::Exact);

        let cc = preset("classical_classical", &[]).unwrap().to_mstate();
        let cc = cc.relabel(&[("B", "C")]).unwrap();
        let oracle = grid_steering(&cc, "A", f64::max, 0.0);
        assert!((oracle - 1.0).abs() < 1e-9);
        let e = eoa(&cc, &["A"], &cfg()).unwrap();
        assert!((e.value - 1.0).abs() <= 5e-3);
        assert_eq!(e.direction, Direction::LowerBoundEstimate);
        assert!(e.ensemble().is_some());

        // with one factor pure every decomposition is a product
        let a = random_pure(&SystemLayout::qubits(&["A"]).unwrap(), 1).to_mstate();
        let c = random_mstate(&SystemLayout::qubits(&["C"]).unwrap(), 2, 2);
        let e = eoa(&a.tensor(&c).unwrap(), &["A"], &cfg()).unwrap();
        assert!(e.value.abs() < 1e-6);
    }

    #[test]
    fn eoa_below_regularized_on_random_states() {
        let mut seeds = SeedStream::new(90);
        let l = SystemLayout::qubits(&["A", "C"]).unwrap();
        for _ in 0..4 {
            let rho = random_mstate(&l, 2, seeds.next_seed());
            let e = eoa(&rho, &["A"], &cfg()).unwrap();
            assert!(e.value <= regularized_eoa(&rho, &["A"]).unwrap() + 5e-3);
            assert!(e.value <= 1.0 + 1e-9);
        }
    }

    /// Two-qubit entanglement of formation from the concurrence.
    fn wootters_eof(rho: &Mstate) -> f64 {
        let sy = CMatrix::from_vec(
            2,
            2,
            vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
        )
        .unwrap();
        let yy = sy.kron(&sy);
        let conj = CMatrix::from_vec(4, 4, rho.matrix().data().iter().map(|z| z.conj()).collect())
            .unwrap();
        let tilde = yy.matmul(&conj).matmul(&yy);
        let s = qmat::psd_sqrt(rho.matrix()).unwrap();
        let r = s.matmul(&tilde).matmul(&s).hermitian_part();
        let mut l: Vec<f64> = qmat::herm_eigenvalues(&r)
            .unwrap()
            .iter()
            .map(|x| x.max(0.0).sqrt())
            .collect();
        l.sort_by(|a, b| b.total_cmp(a));
        let c = (l[0] - l[1] - l[2] - l[3]).max(0.0);
        let x = 0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt());
        info::binary_entropy(x.min(1.0)).unwrap()
    }

    #[test]
    fn eof_examples() {
        let psi = random_pure(&SystemLayout::qubits(&["X", "Z"]).unwrap(), 4).to_mstate();
        assert!((eof(&psi, &["X"], &cfg()).unwrap().value - psi.entropy_of(&["X"]).unwrap()).abs() < 1e-12);

        let zero = Mstate::basis("X", 2, 0).unwrap().tensor(&Mstate::basis("Z", 2, 1).unwrap()).unwrap();
        let plus = PureState::from_real(SystemLayout::qubits(&["X", "Z"]).unwrap(), &[1.0, 1.0, 1.0, 1.0])
            .unwrap()
            .to_mstate();
        let mut m = zero.matrix().scale(0.5);
        m.add_scaled(plus.matrix(), 0.5);
        let sep = Mstate::new(zero.layout().clone(), m).unwrap();
        assert!(eof(&sep, &["X"], &cfg()).unwrap().value.abs() < 1e-6);

        // concurrence oracle on random rank-2 two-qubit states
        let mut seeds = SeedStream::new(5);
        for _ in 0..3 {
            let rho = random_mstate(&SystemLayout::qubits(&["X", "Z"]).unwrap(), 2, seeds.next_seed());
            let e = eof(&rho, &["X"], &cfg()).unwrap();
            assert_eq!(e.direction, Direction::UpperBoundEstimate);
            let w = wootters_eof(&rho);
            assert!(e.value >= w - 1e-9);
            assert!(e.value - w <= 5e-3, "{} vs {w}", e.value);
        }
    }

    #[test]
    fn kw_discord_examples() {
        let k = kw_discord(&bell(), &["A"], &["B"], &cfg()).unwrap();
        assert!((k.value - 1.0).abs() < 1e-6);
        let cc = classical_ab();
        let k = kw_discord(&cc, &["A"], &["B"], &cfg()).unwrap();
        assert!(k.value.abs() <= 2e-2);
        let big = random_mstate(&SystemLayout::new([("X", 3), ("Y", 3)]).unwrap(), 9, 1);
        assert!(matches!(
            kw_discord(&big, &["X"], &["Y"], &cfg()),
            Err(Error::AncillaTooLarge(9))
        ));
    }

    #[test]
    fn log_negativity_examples() {
        let ab = Partition::new(&["A"], &["B"]);
        let a = random_mstate(&SystemLayout::qubits(&["A"]).unwrap(), 2, 1);
        let b = random_mstate(&SystemLayout::qubits(&["B"]).unwrap(), 2, 2);
        assert!(log_negativity(&a.tensor(&b).unwrap(), &ab).unwrap().abs() < 1e-12);
        assert!((log_negativity(&bell(), &ab).unwrap() - 1.0).abs() < 1e-12);
        let f = family15(0.7071).unwrap();
        let pt = f.partial_transpose_many(&["A", "B"]).unwrap();
        assert!(qmat::herm_eigenvalues(&pt).unwrap()[0] > -1e-12);
        assert!(log_negativity(&f, &Partition::new(&["A", "B"], &["C"])).unwrap().abs() < 1e-12);
        assert!(matches!(
            log_negativity(&bell(), &Partition::new(&["A"], &["A"])),
            Err(Error::InvalidPartition(_))
        ));
    }

    #[test]
    fn coherent_info_examples() {
        let ab = Partition::new(&["A"], &["B"]);
        assert!((coherent_info_lower(&bell(), &ab).unwrap() - 1.0).abs() < 1e-12);
        let mm = Mstate::maximally_mixed(SystemLayout::qubits(&["A", "B"]).unwrap()).unwrap();
        assert_eq!(coherent_info_lower(&mm, &ab).unwrap(), 0.0);
        let mut seeds = SeedStream::new(2);
        for _ in 0..5 {
            // separable: mixture of products
            let mut m = CMatrix::zeros(4, 4);
            for _ in 0..3 {
                let a = random_mstate(&SystemLayout::qubits(&["A"]).unwrap(), 2, seeds.next_seed());
                let b = random_mstate(&SystemLayout::qubits(&["B"]).unwrap(), 2, seeds.next_seed());
                m.add_scaled(&a.matrix().kron(b.matrix()), 1.0 / 3.0);
            }
            let sep = Mstate::new(SystemLayout::qubits(&["A", "B"]).unwrap(), m).unwrap();
            assert!(coherent_info_lower(&sep, &ab).unwrap() < 1e-9);
        }
    }

    #[test]
    fn ed_interval_examples() {
        let ab = Partition::new(&["A"], &["B"]);
        let e = ed_interval(&bell(), &ab).unwrap();
        assert!(e.exact && (e.lower - 1.0).abs() < 1e-12 && (e.upper - 1.0).abs() < 1e-12);

        let mut m = bell().matrix().scale(0.9);
        m.add_scaled(&CMatrix::identity(4), 0.1 / 4.0);
        let iso = Mstate::new(bell().layout().clone(), m).unwrap();
        let e = ed_interval(&iso, &ab).unwrap();
        assert!(!e.exact);
        assert!(e.lower <= e.upper + 1e-9);
        assert!(e.lower > 0.0);

        let mm = Mstate::maximally_mixed(SystemLayout::qubits(&["A", "B"]).unwrap()).unwrap();
        let e = ed_interval(&mm, &ab).unwrap();
        assert!(!e.exact && e.lower == 0.0 && e.upper.abs() < 1e-12);

        let mut seeds = SeedStream::new(66);
        for _ in 0..30 {
            let r = random_mstate(&SystemLayout::qubits(&["A", "B"]).unwrap(), 3, seeds.next_seed());
            let e = ed_interval(&r, &ab).unwrap();
            assert!(e.lower <= e.upper + 1e-9);
        }
    }

    #[test]
    fn regularized_eoa_examples() {
        assert!((regularized_eoa(&bell(), &["A"]).unwrap() - 1.0).abs() < 1e-12);
        let cc = preset("classical_classical", &[]).unwrap().to_mstate();
        assert!((regularized_eoa(&cc, &["A"]).unwrap() - 1.0).abs() < 1e-12);
        let prod = Mstate::basis("A", 2, 0)
            .unwrap()
            .tensor(&Mstate::maximally_mixed(SystemLayout::qubits(&["C"]).unwrap()).unwrap())
            .unwrap();
        assert!(regularized_eoa(&prod, &["A"]).unwrap().abs() < 1e-12);
    }
}
