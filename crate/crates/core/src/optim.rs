//! Derivative-free search over unitaries and rank-1 POVMs.
//!
//! A unitary of dimension `K` is parameterized by `K²` angles: `K(K−1)/2`
//! complex two-level rotations (two angles each) followed by `K` diagonal
//! phases, `U = G₁†⋯Gₙ† D`. The rotations are ordered as in Givens
//! elimination, so every unitary is reachable. When only the first `d`
//! columns matter, rotations acting solely on rows `≥ d` and phases on rows
//! `≥ d` have no effect and are left out of the search.
//!
//! Each restart starts from all-zero angles on top of its own Haar-random
//! base unitary, `U = base · decode(angles)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qmat::{CMatrix, C64};
use crate::rng::{seeded, split};
use crate::states::random::complex_gaussian;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub initial_step: f64,
    pub shrink_factor: f64,
    pub tol: f64,
    pub seed: u64,
    /// POVM outcome count; `None` means the square of the measured dimension.
    pub outcomes: Option<usize>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 32,
            max_iters: 2000,
            initial_step: 0.5,
            shrink_factor: 0.5,
            tol: 1e-6,
            seed: 7,
            outcomes: None,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::InvalidArgument("restarts must be >= 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("tol must be > 0".into()));
        }
        if !(self.shrink_factor > 0.0 && self.shrink_factor < 1.0) {
            return Err(Error::InvalidArgument("shrink factor must lie in (0, 1)".into()));
        }
        if !(self.initial_step > 0.0) || !self.initial_step.is_finite() {
            return Err(Error::InvalidArgument("initial step must be positive".into()));
        }
        if self.outcomes == Some(0) {
            return Err(Error::InvalidArgument("outcome count must be positive".into()));
        }
        Ok(())
    }

    /// Outcome count for a measured party of dimension `d`.
    pub fn outcomes_for(&self, d: usize) -> Result<usize> {
        let k = self.outcomes.unwrap_or(d * d);
        if k < d {
            return Err(Error::InvalidArgument(format!(
                "{k} outcomes cannot form a complete rank-1 POVM on dimension {d}"
            )));
        }
        Ok(k)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_outcomes(mut self, k: usize) -> Self {
        self.outcomes = Some(k);
        self
    }
}

/// Haar-random unitary: Gram–Schmidt on a complex Gaussian matrix, which is
/// QR with a positive diagonal in `R`.
pub fn haar_unitary(dim: usize, seed: u64) -> CMatrix {
    let mut rng = seeded(seed);
    let mut cols: Vec<Vec<C64>> = (0..dim)
        .map(|_| (0..dim).map(|_| complex_gaussian(&mut rng)).collect())
        .collect();
    for j in 0..dim {
        for k in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let q = &done[k];
            let v = &mut rest[0];
            let proj: C64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut cols[j] {
            *z /= norm;
        }
    }
    let mut u = CMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            u[(i, j)] = *z;
        }
    }
    u
}

/// Rotation planes in elimination order.
fn rotation_pairs(dim: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(dim * (dim.saturating_sub(1)) / 2);
    for c in 0..dim {
        for j in (c + 1..dim).rev() {
            pairs.push((c, j));
        }
    }
    pairs
}

/// Point in the angle domain plus the base unitary it is composed with.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryParam {
    pub dim: usize,
    pub angles: Vec<f64>,
    pub base: Option<CMatrix>,
}

impl UnitaryParam {
    /// All-zero angles, decoding to the identity.
    pub fn identity(dim: usize) -> Self {
        UnitaryParam {
            dim,
            angles: vec![0.0; dim * dim],
            base: None,
        }
    }

    pub fn from_angles(dim: usize, angles: Vec<f64>) -> Result<Self> {
        if angles.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "dimension {dim} needs {} angles, got {}",
                dim * dim,
                angles.len()
            )));
        }
        Ok(UnitaryParam {
            dim,
            angles,
            base: None,
        })
    }

    pub fn with_base(mut self, base: CMatrix) -> Self {
        self.base = Some(base);
        self
    }

    /// Indices of angles that influence the first `columns` columns.
    pub fn active_angles(dim: usize, columns: usize) -> Vec<usize> {
        let mut active = Vec::new();
        for (k, &(c, _)) in rotation_pairs(dim).iter().enumerate() {
            if c < columns {
                active.push(2 * k);
                active.push(2 * k + 1);
            }
        }
        let off = dim * (dim - 1);
        active.extend((0..columns.min(dim)).map(|r| off + r));
        active
    }

    /// The full unitary.
    pub fn decode(&self) -> CMatrix {
        self.isometry(self.dim)
    }

    /// First `columns` columns of the unitary.
    pub fn isometry(&self, columns: usize) -> CMatrix {
        let k = self.dim;
        let d = columns.min(k);
        let pairs = rotation_pairs(k);
        let off = k * (k - 1);
        let mut m = CMatrix::zeros(k, d);
        for r in 0..d {
            m[(r, r)] = C64::from_polar(1.0, self.angles[off + r]);
        }
        // U = G₁† ⋯ Gₙ† D, applied right to left
        for (idx, &(p, q)) in pairs.iter().enumerate().rev() {
            if p >= d {
                continue;
            }
            let (theta, phi) = (self.angles[2 * idx], self.angles[2 * idx + 1]);
            if theta == 0.0 {
                continue;
            }
            let (s, c) = theta.sin_cos();
            let e = C64::from_polar(s, phi);
            // G† = [[c, -s e^{iφ}], [s e^{-iφ}, c]]
            for col in 0..d {
                let a = m[(p, col)];
                let b = m[(q, col)];
                m[(p, col)] = a * c - e * b;
                m[(q, col)] = e.conj() * a + b * c;
            }
        }
        match &self.base {
            Some(base) => base.matmul(&m),
            None => m,
        }
    }
}

/// Positive operators on one party summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    party_dim: usize,
    elements: Vec<CMatrix>,
    /// `v_i` with `M_i = |v_i⟩⟨v_i|`, when known.
    vectors: Option<Vec<Vec<C64>>>,
}

impl Povm {
    pub fn new(party_dim: usize, elements: Vec<CMatrix>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidArgument("POVM needs at least one element".into()));
        }
        let mut sum = CMatrix::zeros(party_dim, party_dim);
        for (i, e) in elements.iter().enumerate() {
            if e.rows() != party_dim || e.cols() != party_dim {
                return Err(Error::LayoutMismatch(format!(
                    "POVM element {i} is {}x{}, party dimension {party_dim}",
                    e.rows(),
                    e.cols()
                )));
            }
            let eigs = crate::qmat::herm_eigenvalues(e)?;
            if eigs[0] < -1e-10 {
                return Err(Error::NotPsd(eigs[0]));
            }
            sum.add_scaled(e, 1.0);
        }
        let defect = sum.max_abs_diff(&CMatrix::identity(party_dim));
        if defect > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "POVM elements sum to identity only within {defect:e}"
            )));
        }
        Ok(Povm {
            party_dim,
            elements,
            vectors: None,
        })
    }

    /// Projective measurement in the computational basis.
    pub fn computational(d: usize) -> Self {
        rank1_povm(&CMatrix::identity(d), d).expect("identity is unitary")
    }

    /// The trivial one-outcome measurement `{I}`.
    pub fn trivial(d: usize) -> Self {
        Povm {
            party_dim: d,
            elements: vec![CMatrix::identity(d)],
            vectors: None,
        }
    }

    pub fn party_dim(&self) -> usize {
        self.party_dim
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn completeness_residual(&self) -> f64 {
        let mut sum = CMatrix::zeros(self.party_dim, self.party_dim);
        for e in &self.elements {
            sum.add_scaled(e, 1.0);
        }
        sum.max_abs_diff(&CMatrix::identity(self.party_dim))
    }

    /// Vectors `v_i` with `M_i = |v_i⟩⟨v_i|`, or the index of the first
    /// element whose rank exceeds one.
    pub fn rank1_vectors(&self) -> Result<Vec<Vec<C64>>> {
        if let Some(v) = &self.vectors {
            return Ok(v.clone());
        }
        let mut out = Vec::with_capacity(self.elements.len());
        for (i, e) in self.elements.iter().enumerate() {
            let eig = crate::qmat::herm_eigen(e)?;
            let n = eig.eigenvalues.len();
            let second = if n > 1 { eig.eigenvalues[n - 2] } else { 0.0 };
            if second > 1e-10 {
                return Err(Error::NotRankOne(i));
            }
            let top = eig.eigenvalues[n - 1].max(0.0).sqrt();
            out.push(eig.eigenvectors.column(n - 1).iter().map(|z| z * top).collect());
        }
        Ok(out)
    }
}

impl Povm {
    /// `K × d` isometry whose row `i` is `⟨v_i|`; inverse of [`rank1_povm`].
    pub fn isometry(&self) -> Result<CMatrix> {
        let vs = self.rank1_vectors()?;
        let mut v = CMatrix::zeros(vs.len(), self.party_dim);
        for (i, vi) in vs.iter().enumerate() {
            for (a, z) in vi.iter().enumerate() {
                v[(i, a)] = z.conj();
            }
        }
        Ok(v)
    }
}

/// Rank-1 POVM from the first `d` columns of `u`: row `i` is `⟨v_i|`, so
/// `M_i = |v_i⟩⟨v_i|` and `Σ M_i = V†V = I`.
pub fn rank1_povm(u: &CMatrix, d: usize) -> Result<Povm> {
    let k = u.rows();
    if d > k || d > u.cols() {
        return Err(Error::InvalidArgument(format!(
            "party dimension {d} exceeds outcome count {k}"
        )));
    }
    let vectors: Vec<Vec<C64>> = (0..k)
        .map(|i| (0..d).map(|a| u[(i, a)].conj()).collect())
        .collect();
    let elements = vectors.iter().map(|v| CMatrix::outer(v)).collect();
    Ok(Povm {
        party_dim: d,
        elements,
        vectors: Some(vectors),
    })
}

/// Extra inputs for [`maximize_isometry`] and friends.
#[derive(Default)]
pub struct SearchOptions<'a> {
    /// Base unitaries for additional runs placed before the random restarts.
    pub warm_starts: Vec<CMatrix>,
    /// Called once per finished run with (run index, best value of that run).
    pub progress: Option<&'a (dyn Fn(usize, f64) + Sync)>,
}

/// Result of a search. `run` counts warm starts first.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub value: f64,
    pub param: UnitaryParam,
    pub columns: usize,
    pub run: usize,
    pub evaluations: usize,
}

impl Optimum {
    pub fn isometry(&self) -> CMatrix {
        self.param.isometry(self.columns)
    }

    pub fn unitary(&self) -> CMatrix {
        self.param.decode()
    }
}

fn check_finite(v: f64, p: &UnitaryParam) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::ObjectiveError {
            value: v,
            angles: p.angles.clone(),
        })
    }
}

/// Coordinate pattern search from `p`, maximizing. Returns the best value
/// and the number of evaluations.
/// Gains at or below this are rounding noise and do not count as improvement.
const MIN_GAIN: f64 = 1e-12;

fn pattern_search(
    p: &mut UnitaryParam,
    active: &[usize],
    f: &(dyn Fn(&UnitaryParam) -> f64 + Sync),
    cfg: &OptimizerConfig,
) -> Result<(f64, usize)> {
    let mut best = check_finite(f(p), p)?;
    let mut evals = 1;
    let mut step = cfg.initial_step;
    let mut sweeps = 0;
    while step >= cfg.tol && sweeps < cfg.max_iters {
        let mut improved = false;
        for &i in active {
            let x0 = p.angles[i];
            let mut moved = false;
            for delta in [step, -step] {
                p.angles[i] = x0 + delta;
                let v = check_finite(f(p), p)?;
                evals += 1;
                if v > best + MIN_GAIN {
                    best = v;
                    moved = true;
                    break;
                }
            }
            if moved {
                improved = true;
            } else {
                p.angles[i] = x0;
            }
        }
        sweeps += 1;
        if !improved {
            step *= cfg.shrink_factor;
        }
    }
    Ok((best, evals))
}

fn search(
    dim: usize,
    columns: usize,
    f: &(dyn Fn(&UnitaryParam) -> f64 + Sync),
    cfg: &OptimizerConfig,
    opts: &SearchOptions<'_>,
) -> Result<Optimum> {
    cfg.validate()?;
    if dim == 0 || columns == 0 || columns > dim {
        return Err(Error::InvalidArgument(format!(
            "cannot search {columns} columns of a {dim}-dimensional unitary"
        )));
    }
    for w in &opts.warm_starts {
        if w.rows() != dim || w.cols() != dim {
            return Err(Error::InvalidArgument("warm start has the wrong shape".into()));
        }
    }
    let active = UnitaryParam::active_angles(dim, columns);
    let n_warm = opts.warm_starts.len();
    let runs: Vec<Result<(f64, UnitaryParam, usize)>> = (0..n_warm + cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let base = if r < n_warm {
                opts.warm_starts[r].clone()
            } else {
                haar_unitary(dim, split(cfg.seed, (r - n_warm) as u64))
            };
            let mut p = UnitaryParam::identity(dim).with_base(base);
            let (v, evals) = pattern_search(&mut p, &active, f, cfg)?;
            if let Some(cb) = opts.progress {
                cb(r, v);
            }
            Ok((v, p, evals))
        })
        .collect();
    let mut best: Option<Optimum> = None;
    let mut total = 0;
    for (r, run) in runs.into_iter().enumerate() {
        let (v, p, evals) = run?;
        total += evals;
        if best.as_ref().is_none_or(|b| v > b.value) {
            best = Some(Optimum {
                value: v,
                param: p,
                columns,
                run: r,
                evaluations: 0,
            });
        }
    }
    let mut best = best.expect("at least one run");
    best.evaluations = total;
    Ok(best)
}

/// Maximizes `objective` over unitaries of dimension `dim`.
pub fn maximize<F>(objective: F, dim: usize, config: &OptimizerConfig) -> Result<(f64, UnitaryParam)>
where
    F: Fn(&UnitaryParam) -> f64 + Sync,
{
    let o = search(dim, dim, &objective, config, &SearchOptions::default())?;
    Ok((o.value, o.param))
}

/// Minimizes `objective` over unitaries of dimension `dim`.
pub fn minimize<F>(objective: F, dim: usize, config: &OptimizerConfig) -> Result<(f64, UnitaryParam)>
where
    F: Fn(&UnitaryParam) -> f64 + Sync,
{
    let (v, p) = maximize(|p: &UnitaryParam| -objective(p), dim, config)?;
    Ok((-v, p))
}

/// Maximizes over `dim × columns` isometries (first columns of a unitary).
pub fn maximize_isometry<F>(
    objective: F,
    dim: usize,
    columns: usize,
    config: &OptimizerConfig,
    opts: &SearchOptions<'_>,
) -> Result<Optimum>
where
    F: Fn(&CMatrix) -> f64 + Sync,
{
    let f = |p: &UnitaryParam| objective(&p.isometry(columns));
    search(dim, columns, &f, config, opts)
}

/// Minimizing counterpart of [`maximize_isometry`].
pub fn minimize_isometry<F>(
    objective: F,
    dim: usize,
    columns: usize,
    config: &OptimizerConfig,
    opts: &SearchOptions<'_>,
) -> Result<Optimum>
where
    F: Fn(&CMatrix) -> f64 + Sync,
{
    let f = |p: &UnitaryParam| -objective(&p.isometry(columns));
    let mut o = search(dim, columns, &f, config, opts)?;
    o.value = -o.value;
    Ok(o)
}

/// Completes the orthonormal columns of `v` (`n × d`) to an `n × n` unitary.
pub fn complete_unitary(v: &CMatrix) -> CMatrix {
    let (n, d) = (v.rows(), v.cols());
    let mut cols: Vec<Vec<C64>> = (0..d).map(|j| (0..n).map(|i| v[(i, j)]).collect()).collect();
    for e in 0..n {
        if cols.len() == n {
            break;
        }
        let mut cand = vec![C64::new(0.0, 0.0); n];
        cand[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for q in &cols {
                let proj: C64 = q.iter().zip(&cand).map(|(a, b)| a.conj() * b).sum();
                for (c, qi) in cand.iter_mut().zip(q) {
                    *c -= proj * qi;
                }
            }
        }
        let norm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(cand.iter().map(|z| z / norm).collect());
        }
    }
    let mut u = CMatrix::zeros(n, n);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            u[(i, j)] = *z;
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedStream;
    use rand::Rng as _;

    fn unitarity_defect(u: &CMatrix) -> f64 {
        u.adjoint().matmul(u).max_abs_diff(&CMatrix::identity(u.cols()))
    }

    #[test]
    fn haar_examples() {
        let u1 = haar_unitary(1, 3);
        assert!((u1[(0, 0)].norm() - 1.0).abs() < 1e-12);
        let mut seeds = SeedStream::new(1);
        for dim in [2, 3, 4, 8, 16] {
            let u = haar_unitary(dim, seeds.next_seed());
            assert!(unitarity_defect(&u) < 1e-10);
        }
        assert_eq!(haar_unitary(4, 9), haar_unitary(4, 9));
    }

    #[test]
    fn decode_is_unitary_on_random_angles() {
        let mut rng = seeded(5);
        for trial in 0..1000 {
            let dim = 1 + trial % 5;
            let angles: Vec<f64> = (0..dim * dim).map(|_| rng.random_range(-10.0..10.0)).collect();
            let u = UnitaryParam::from_angles(dim, angles).unwrap().decode();
            assert!(unitarity_defect(&u) < 1e-10);
        }
    }

    #[test]
    fn isometry_matches_unitary_columns() {
        let mut rng = seeded(6);
        let angles: Vec<f64> = (0..16).map(|_| rng.random_range(-3.0..3.0)).collect();
        let p = UnitaryParam::from_angles(4, angles).unwrap();
        let u = p.decode();
        let v = p.isometry(2);
        for i in 0..4 {
            for j in 0..2 {
                assert!((u[(i, j)] - v[(i, j)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn active_angle_counts_match_stiefel_dimension() {
        // real dimension of K×d isometries: 2Kd − d²
        for (k, d) in [(4, 2), (16, 4), (3, 3), (8, 2)] {
            assert_eq!(UnitaryParam::active_angles(k, d).len(), 2 * k * d - d * d);
        }
    }

    #[test]
    fn inactive_angles_do_not_change_isometry() {
        let mut rng = seeded(8);
        let angles: Vec<f64> = (0..16).map(|_| rng.random_range(-3.0..3.0)).collect();
        let p = UnitaryParam::from_angles(4, angles).unwrap();
        let active = UnitaryParam::active_angles(4, 2);
        let mut q = p.clone();
        for i in 0..16 {
            if !active.contains(&i) {
                q.angles[i] += 1.234;
            }
        }
        assert!(p.isometry(2).max_abs_diff(&q.isometry(2)) < 1e-14);
    }

    #[test]
    fn decode_reaches_arbitrary_unitaries() {
        // fidelity |Tr(T†U)|/K to a fixed target reaches 1
        let target = haar_unitary(2, 99);
        let cfg = OptimizerConfig::default().with_restarts(8);
        let (v, p) = maximize(
            |p: &UnitaryParam| target.adjoint().matmul(&p.decode()).trace().norm() / 2.0,
            2,
            &cfg,
        )
        .unwrap();
        assert!(v >= 1.0 - 1e-6, "{v}");
        assert!(unitarity_defect(&p.decode()) < 1e-10);
    }

    #[test]
    fn rank1_povm_examples() {
        let z = rank1_povm(&CMatrix::identity(2), 2).unwrap();
        assert_eq!(z.elements()[0], CMatrix::from_diag(&[1.0, 0.0]));
        assert_eq!(z.elements()[1], CMatrix::from_diag(&[0.0, 1.0]));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let had = CMatrix::from_real_rows(&[&[h, h], &[h, -h]]);
        let x = rank1_povm(&had, 2).unwrap();
        let plus = CMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let minus = CMatrix::from_real_rows(&[&[0.5, -0.5], &[-0.5, 0.5]]);
        assert!(x.elements()[0].max_abs_diff(&plus) < 1e-15);
        assert!(x.elements()[1].max_abs_diff(&minus) < 1e-15);
        for seed in 0..10 {
            let p = rank1_povm(&haar_unitary(4, seed), 2).unwrap();
            assert_eq!(p.len(), 4);
            // summation oracle
            let mut sum = CMatrix::zeros(2, 2);
            for e in p.elements() {
                sum = &sum + e;
                assert!(crate::qmat::herm_eigenvalues(e).unwrap()[0] > -1e-12);
            }
            assert!(sum.max_abs_diff(&CMatrix::identity(2)) <= 1e-9);
            assert!(Povm::new(2, p.elements().to_vec()).is_ok());
        }
        assert!(rank1_povm(&CMatrix::identity(2), 3).is_err());
    }

    #[test]
    fn povm_validation() {
        assert!(Povm::new(2, vec![CMatrix::from_diag(&[1.0, 0.0])]).is_err());
        assert!(Povm::new(2, vec![CMatrix::from_diag(&[1.5, 1.0]), CMatrix::from_diag(&[-0.5, 0.0])]).is_err());
        let t = Povm::new(2, vec![CMatrix::identity(2)]).unwrap();
        assert!(matches!(t.rank1_vectors(), Err(Error::NotRankOne(0))));
    }

    #[test]
    fn constant_objective() {
        let cfg = OptimizerConfig::default().with_restarts(2);
        assert_eq!(maximize(|_: &UnitaryParam| 0.25, 3, &cfg).unwrap().0, 0.25);
        assert_eq!(minimize(|_: &UnitaryParam| -1.5, 3, &cfg).unwrap().0, -1.5);
    }

    #[test]
    fn minimize_is_negated_maximize() {
        let cfg = OptimizerConfig::default().with_restarts(3);
        let mut rng = seeded(12);
        for _ in 0..3 {
            let w: Vec<f64> = (0..9).map(|_| rng.random_range(-1.0..1.0)).collect();
            let c: Vec<f64> = (0..9).map(|_| rng.random_range(-1.0..1.0)).collect();
            let quad = move |p: &UnitaryParam| -> f64 {
                p.angles.iter().zip(&w).zip(&c).map(|((x, w), c)| w * (x - c).powi(2)).sum()
            };
            let q2 = quad.clone();
            let (min_v, min_p) = minimize(quad, 3, &cfg).unwrap();
            let (max_v, max_p) = maximize(move |p: &UnitaryParam| -q2(p), 3, &cfg).unwrap();
            assert!((min_v + max_v).abs() <= 1e-12);
            assert_eq!(min_p, max_p);
        }
    }

    #[test]
    fn deterministic_and_sequential_equivalent() {
        let target = haar_unitary(3, 4);
        let obj = |v: &CMatrix| target.adjoint().matmul(v).trace().norm();
        let cfg = OptimizerConfig {
            restarts: 4,
            tol: 1e-3,
            ..Default::default()
        };
        let a = maximize_isometry(obj, 3, 3, &cfg, &SearchOptions::default()).unwrap();
        let b = maximize_isometry(obj, 3, 3, &cfg, &SearchOptions::default()).unwrap();
        assert_eq!(a, b);
        // sequential reference: one restart at a time, lowest index wins ties
        let mut best: Option<(f64, usize)> = None;
        for r in 0..4 {
            let base = haar_unitary(3, split(cfg.seed, r as u64));
            let mut p = UnitaryParam::identity(3).with_base(base);
            let f = |p: &UnitaryParam| obj(&p.isometry(3));
            let (v, _) = pattern_search(&mut p, &UnitaryParam::active_angles(3, 3), &f, &cfg).unwrap();
            if best.is_none_or(|(bv, _)| v > bv) {
                best = Some((v, r));
            }
        }
        assert_eq!(best.unwrap(), (a.value, a.run));
    }

    #[test]
    fn never_below_initial_evaluation() {
        let cfg = OptimizerConfig {
            restarts: 3,
            max_iters: 1,
            ..Default::default()
        };
        let f = |v: &CMatrix| v[(0, 0)].re;
        let o = maximize_isometry(f, 2, 1, &cfg, &SearchOptions::default()).unwrap();
        let init = (0..3)
            .map(|r| f(&haar_unitary(2, split(cfg.seed, r))))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(o.value >= init);
    }

    #[test]
    fn non_finite_objective_is_an_error() {
        let cfg = OptimizerConfig::default().with_restarts(1);
        let r = maximize(|_: &UnitaryParam| f64::NAN, 2, &cfg);
        assert!(matches!(r, Err(Error::ObjectiveError { .. })));
    }

    #[test]
    fn warm_start_and_progress() {
        use std::sync::Mutex;
        let target = haar_unitary(2, 5);
        let seen = Mutex::new(Vec::new());
        let cb = |r: usize, v: f64| seen.lock().unwrap().push((r, v));
        let opts = SearchOptions {
            warm_starts: vec![target.clone()],
            progress: Some(&cb),
        };
        let cfg = OptimizerConfig::default().with_restarts(2);
        let o = maximize_isometry(
            |v: &CMatrix| target.adjoint().matmul(v).trace().norm() / 2.0,
            2,
            2,
            &cfg,
            &opts,
        )
        .unwrap();
        assert!((o.value - 1.0).abs() < 1e-12);
        assert_eq!(o.run, 0);
        let mut seen = seen.into_inner().unwrap();
        seen.sort_by_key(|x| x.0);
        assert_eq!(seen.iter().map(|x| x.0).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn complete_unitary_extends_columns() {
        let u = haar_unitary(4, 3);
        let p = UnitaryParam::identity(4).with_base(u);
        let v = p.isometry(2);
        let full = complete_unitary(&v);
        assert!(unitarity_defect(&full) < 1e-12);
        for i in 0..4 {
            for j in 0..2 {
                assert_eq!(full[(i, j)], v[(i, j)]);
            }
        }
    }
}
