//! Multipartite states on labelled parties.
//!
//! Index convention: the order of parties in a [`SystemLayout`] fixes tensor
//! significance, leftmost most significant. A basis index of the composite
//! system is the mixed-radix number whose digits are the local indices.

pub mod file;
pub mod preset;
pub mod random;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{self, check_dim, CMatrix, C64, ZERO_CLIP};

pub use preset::{preset, PresetName};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Party {
    pub label: String,
    pub dim: usize,
}

/// Ordered party labels with local dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemLayout {
    parties: Vec<Party>,
}

impl fmt::Display for SystemLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parties
            .iter()
            .map(|p| format!("{}({})", p.label, p.dim))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl SystemLayout {
    pub fn new<S: Into<String>>(parties: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let parties: Vec<Party> = parties
            .into_iter()
            .map(|(label, dim)| Party {
                label: label.into(),
                dim,
            })
            .collect();
        Self::from_parties(parties)
    }

    pub fn from_parties(parties: Vec<Party>) -> Result<Self> {
        if parties.is_empty() {
            return Err(Error::InvalidArgument("layout needs at least one party".into()));
        }
        let mut seen = HashSet::new();
        for p in &parties {
            if p.label.is_empty() {
                return Err(Error::InvalidArgument("empty party label".into()));
            }
            if p.dim < 2 {
                return Err(Error::InvalidArgument(format!(
                    "party `{}` has dimension {} (need >= 2)",
                    p.label, p.dim
                )));
            }
            if !seen.insert(p.label.as_str()) {
                return Err(Error::DuplicateParty(p.label.clone()));
            }
        }
        Ok(SystemLayout { parties })
    }

    /// Layout of `n` qubits labelled by the given names.
    pub fn qubits(labels: &[&str]) -> Result<Self> {
        Self::new(labels.iter().map(|&l| (l, 2)))
    }

    pub fn parties(&self) -> &[Party] {
        &self.parties
    }

    pub fn len(&self) -> usize {
        self.parties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parties.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parties.iter().map(|p| p.dim).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.parties.iter().map(|p| p.label.as_str()).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.parties.iter().map(|p| p.dim).product()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.parties.iter().any(|p| p.label == label)
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.parties
            .iter()
            .position(|p| p.label == label)
            .ok_or_else(|| Error::UnknownParty(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.parties[self.index_of(label)?].dim)
    }

    /// Sorted, de-duplicated party indices for `labels`.
    pub fn indices_of(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut idx = labels
            .iter()
            .map(|l| self.index_of(l))
            .collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        idx.dedup();
        Ok(idx)
    }

    pub fn dim_of_set(&self, labels: &[&str]) -> Result<usize> {
        Ok(self
            .indices_of(labels)?
            .iter()
            .map(|&i| self.parties[i].dim)
            .product())
    }

    fn subset(&self, indices: &[usize]) -> SystemLayout {
        SystemLayout {
            parties: indices.iter().map(|&i| self.parties[i].clone()).collect(),
        }
    }

    /// Concatenation; fails on a label collision.
    pub fn join(&self, other: &SystemLayout) -> Result<SystemLayout> {
        let mut parties = self.parties.clone();
        parties.extend(other.parties.iter().cloned());
        SystemLayout::from_parties(parties)
    }

    pub fn fresh_label(&self, base: &str) -> String {
        if !self.contains(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}{i}"))
            .find(|l| !self.contains(l))
            .expect("unbounded search")
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Precomputed index table for tracing out every party not in `keep`.
#[derive(Debug, Clone)]
pub(crate) struct TraceMap {
    keep_dim: usize,
    trace_dim: usize,
    table: Vec<usize>,
}

impl TraceMap {
    /// `keep` holds party indices in ascending order.
    pub(crate) fn new(dims: &[usize], keep: &[usize]) -> Self {
        let st = strides(dims);
        let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
        let offsets = |parties: &[usize]| -> Vec<usize> {
            let mut offs = vec![0usize];
            for &p in parties {
                let mut next = Vec::with_capacity(offs.len() * dims[p]);
                for &o in &offs {
                    for d in 0..dims[p] {
                        next.push(o + d * st[p]);
                    }
                }
                offs = next;
            }
            offs
        };
        let keep_offs = offsets(keep);
        let trace_offs = offsets(&traced);
        let mut table = Vec::with_capacity(keep_offs.len() * trace_offs.len());
        for &k in &keep_offs {
            for &t in &trace_offs {
                table.push(k + t);
            }
        }
        TraceMap {
            keep_dim: keep_offs.len(),
            trace_dim: trace_offs.len(),
            table,
        }
    }

    pub(crate) fn apply(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.keep_dim, self.keep_dim);
        self.apply_into(m, &mut out);
        out
    }

    pub(crate) fn keep_dim(&self) -> usize {
        self.keep_dim
    }

    /// Nothing is traced out.
    pub(crate) fn is_identity(&self) -> bool {
        self.trace_dim == 1
    }

    /// `out` must be `keep_dim × keep_dim`.
    pub(crate) fn apply_into(&self, m: &CMatrix, out: &mut CMatrix) {
        let n = m.cols();
        let data = m.data();
        let (kd, td) = (self.keep_dim, self.trace_dim);
        for i in 0..kd {
            let ri = &self.table[i * td..(i + 1) * td];
            for j in 0..kd {
                let rj = &self.table[j * td..(j + 1) * td];
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..td {
                    acc += data[ri[t] * n + rj[t]];
                }
                out[(i, j)] = acc;
            }
        }
    }
}

/// Index map for reordering parties: `map[new] = old`.
fn permutation_map(dims: &[usize], order: &[usize]) -> Vec<usize> {
    let old_st = strides(dims);
    let new_dims: Vec<usize> = order.iter().map(|&i| dims[i]).collect();
    let total: usize = dims.iter().product();
    let mut map = Vec::with_capacity(total);
    for new in 0..total {
        let mut rem = new;
        let mut old = 0;
        for k in (0..order.len()).rev() {
            let digit = rem % new_dims[k];
            rem /= new_dims[k];
            old += digit * old_st[order[k]];
        }
        map.push(old);
    }
    map
}

/// Partial trace on a raw matrix, keeping `keep` (ascending party indices).
pub(crate) fn trace_keep(m: &CMatrix, dims: &[usize], keep: &[usize]) -> CMatrix {
    TraceMap::new(dims, keep).apply(m)
}

pub(crate) fn permute_matrix(m: &CMatrix, dims: &[usize], order: &[usize]) -> CMatrix {
    let map = permutation_map(dims, order);
    let n = map.len();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = m[(map[i], map[j])];
        }
    }
    out
}

pub(crate) fn partial_transpose_matrix(m: &CMatrix, dims: &[usize], parties: &[usize]) -> CMatrix {
    let st = strides(dims);
    let n = m.rows();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (mut ni, mut nj) = (i, j);
            for &p in parties {
                let di = (i / st[p]) % dims[p];
                let dj = (j / st[p]) % dims[p];
                ni = ni - di * st[p] + dj * st[p];
                nj = nj - dj * st[p] + di * st[p];
            }
            out[(ni, nj)] = m[(i, j)];
        }
    }
    out
}

/// `I ⊗ op ⊗ I` with `op` on party `party`; `op` may change that party's dimension.
pub(crate) fn embed_operator(dims: &[usize], party: usize, op: &CMatrix) -> CMatrix {
    let left: usize = dims[..party].iter().product();
    let right: usize = dims[party + 1..].iter().product();
    CMatrix::identity(left)
        .kron(op)
        .kron(&CMatrix::identity(right))
}

pub(crate) fn entropy_of_spectrum(eigs: &[f64]) -> f64 {
    eigs.iter()
        .filter(|&&l| l > ZERO_CLIP)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Density matrix attached to a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Mstate {
    layout: SystemLayout,
    matrix: CMatrix,
}

impl Mstate {
    pub const TOL: f64 = 1e-10;

    /// Validated constructor: Hermitian, unit trace and PSD within `1e-10`.
    pub fn new(layout: SystemLayout, matrix: CMatrix) -> Result<Self> {
        let n = layout.total_dim();
        check_dim(n)?;
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::LayoutMismatch(format!(
                "layout has dimension {n}, matrix is {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = matrix.hermitian_defect();
        if defect > Self::TOL {
            return Err(Error::InvalidState(format!(
                "matrix is not Hermitian (max |M - M†| = {defect:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > Self::TOL || tr.im.abs() > Self::TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = qmat::eigenvalues_unchecked(&matrix)[0];
        if min < -Self::TOL {
            return Err(Error::InvalidState(format!(
                "matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(Mstate { layout, matrix })
    }

    /// For matrices produced by exact state operations on valid inputs.
    pub(crate) fn from_parts(layout: SystemLayout, matrix: CMatrix) -> Self {
        debug_assert_eq!(layout.total_dim(), matrix.rows());
        Mstate { layout, matrix }
    }

    pub fn maximally_mixed(layout: SystemLayout) -> Result<Self> {
        let n = layout.total_dim();
        check_dim(n)?;
        Ok(Mstate {
            layout,
            matrix: CMatrix::identity(n).scale(1.0 / n as f64),
        })
    }

    /// `|k⟩⟨k|` on a single party.
    pub fn basis(label: &str, dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidArgument(format!("basis index {k} >= dim {dim}")));
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(k, k)] = C64::new(1.0, 0.0);
        Ok(Mstate {
            layout: SystemLayout::new([(label, dim)])?,
            matrix: m,
        })
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn purity(&self) -> f64 {
        let m = &self.matrix;
        m.data().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        qmat::eigenvalues_unchecked(&self.matrix)
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        entropy_of_spectrum(&self.eigenvalues())
    }

    /// Kronecker product; parties of `other` are appended.
    pub fn tensor(&self, other: &Mstate) -> Result<Mstate> {
        let layout = self.layout.join(&other.layout)?;
        check_dim(layout.total_dim())?;
        Ok(Mstate {
            layout,
            matrix: self.matrix.kron(&other.matrix),
        })
    }

    /// Traces out the listed parties.
    pub fn partial_trace(&self, discard: &[&str]) -> Result<Mstate> {
        let drop = self.layout.indices_of(discard)?;
        let keep: Vec<usize> = (0..self.layout.len()).filter(|i| !drop.contains(i)).collect();
        if keep.is_empty() {
            return Err(Error::InvalidArgument("cannot trace out every party".into()));
        }
        Ok(self.keep_indices(&keep))
    }

    /// Reduced state on `keep` (layout order preserved).
    pub fn reduce(&self, keep: &[&str]) -> Result<Mstate> {
        let keep = self.layout.indices_of(keep)?;
        if keep.is_empty() {
            return Err(Error::InvalidArgument("reduced state needs at least one party".into()));
        }
        Ok(self.keep_indices(&keep))
    }

    fn keep_indices(&self, keep: &[usize]) -> Mstate {
        if keep.len() == self.layout.len() {
            return self.clone();
        }
        let dims = self.layout.dims();
        Mstate {
            layout: self.layout.subset(keep),
            matrix: trace_keep(&self.matrix, &dims, keep),
        }
    }

    /// Entropy of the reduced state on `labels`; zero for the empty set.
    pub fn entropy_of(&self, labels: &[&str]) -> Result<f64> {
        if labels.is_empty() {
            return Ok(0.0);
        }
        Ok(self.reduce(labels)?.entropy())
    }

    /// Transpose of one tensor factor.
    pub fn partial_transpose(&self, party: &str) -> Result<CMatrix> {
        self.partial_transpose_many(&[party])
    }

    pub fn partial_transpose_many(&self, parties: &[&str]) -> Result<CMatrix> {
        let idx = self.layout.indices_of(parties)?;
        Ok(partial_transpose_matrix(&self.matrix, &self.layout.dims(), &idx))
    }

    /// Reorders parties; `order` must list every label exactly once.
    pub fn permute(&self, order: &[&str]) -> Result<Mstate> {
        let idx = order
            .iter()
            .map(|l| self.layout.index_of(l))
            .collect::<Result<Vec<_>>>()?;
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.layout.len() || idx.len() != self.layout.len() {
            return Err(Error::InvalidArgument(
                "permutation must list every party exactly once".into(),
            ));
        }
        Ok(Mstate {
            layout: self.layout.subset(&idx),
            matrix: permute_matrix(&self.matrix, &self.layout.dims(), &idx),
        })
    }

    /// Fuses `labels` into a single party called `new_label`, placed where
    /// the first of them sits. The fused index keeps the listed order.
    pub fn merge(&self, labels: &[&str], new_label: &str) -> Result<Mstate> {
        if labels.is_empty() {
            return Err(Error::InvalidArgument("nothing to merge".into()));
        }
        let idx = labels
            .iter()
            .map(|l| self.layout.index_of(l))
            .collect::<Result<Vec<_>>>()?;
        let first = *idx.iter().min().expect("non-empty");
        let mut order: Vec<usize> = Vec::new();
        for i in 0..self.layout.len() {
            if i == first {
                order.extend(&idx);
            } else if !idx.contains(&i) {
                order.push(i);
            }
        }
        let matrix = permute_matrix(&self.matrix, &self.layout.dims(), &order);
        let merged_dim: usize = idx.iter().map(|&i| self.layout.parties[i].dim).product();
        let mut parties = Vec::new();
        for i in 0..self.layout.len() {
            if i == first {
                parties.push(Party {
                    label: new_label.to_string(),
                    dim: merged_dim,
                });
            } else if !idx.contains(&i) {
                parties.push(self.layout.parties[i].clone());
            }
        }
        Ok(Mstate {
            layout: SystemLayout::from_parties(parties)?,
            matrix,
        })
    }

    /// Renames parties according to `(old, new)` pairs.
    pub fn relabel(&self, pairs: &[(&str, &str)]) -> Result<Mstate> {
        let mut parties = self.layout.parties.clone();
        for (old, new) in pairs {
            let i = self.layout.index_of(old)?;
            parties[i].label = new.to_string();
        }
        Ok(Mstate {
            layout: SystemLayout::from_parties(parties)?,
            matrix: self.matrix.clone(),
        })
    }

    /// Appends a suffix to every label.
    pub fn suffixed(&self, suffix: &str) -> Mstate {
        let parties = self
            .layout
            .parties
            .iter()
            .map(|p| Party {
                label: format!("{}{suffix}", p.label),
                dim: p.dim,
            })
            .collect();
        Mstate {
            layout: SystemLayout { parties },
            matrix: self.matrix.clone(),
        }
    }

    /// `K ρ K†` with `K` acting on one party. Not renormalized.
    pub(crate) fn sandwich(&self, party: &str, op: &CMatrix) -> Result<CMatrix> {
        let p = self.layout.index_of(party)?;
        let d = self.layout.parties[p].dim;
        if op.cols() != d || op.rows() != d {
            return Err(Error::LayoutMismatch(format!(
                "operator is {}x{}, party `{party}` has dimension {d}",
                op.rows(),
                op.cols()
            )));
        }
        let full = embed_operator(&self.layout.dims(), p, op);
        Ok(full.matmul(&self.matrix).matmul(&full.adjoint()))
    }

    /// Pure state on the original parties plus an ancilla whose dimension is
    /// the rank of the state (at least 2). Tracing out the ancilla gives back
    /// the input.
    pub fn purify(&self, ancilla_label: &str) -> Result<PureState> {
        if self.layout.contains(ancilla_label) {
            return Err(Error::DuplicateParty(ancilla_label.to_string()));
        }
        let eig = qmat::herm_eigen(&self.matrix)?;
        let n = self.dim();
        // largest eigenvalues first
        let kept: Vec<usize> = (0..n)
            .rev()
            .filter(|&k| eig.eigenvalues[k] > ZERO_CLIP)
            .collect();
        let m = kept.len().max(2);
        let layout = self
            .layout
            .join(&SystemLayout::new([(ancilla_label, m)])?)?;
        check_dim(layout.total_dim())?;
        let mut amps = vec![C64::new(0.0, 0.0); n * m];
        for (slot, &k) in kept.iter().enumerate() {
            let w = eig.eigenvalues[k].sqrt();
            let mut v = eig.eigenvectors.column(k);
            fix_phase(&mut v);
            for i in 0..n {
                amps[i * m + slot] = v[i] * w;
            }
        }
        PureState::normalized(layout, amps)
    }

    /// Serializes to the JSON state document (matrix form).
    pub fn to_json(&self) -> String {
        file::to_json(self)
    }
}

/// Rotates `v` so its largest-magnitude entry is real and positive.
pub(crate) fn fix_phase(v: &mut [C64]) {
    let mut best = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() + 1e-12 {
            best = i;
        }
    }
    let r = v[best].norm();
    if r > 0.0 {
        let ph = v[best].conj() / r;
        for z in v.iter_mut() {
            *z *= ph;
        }
    }
}

/// State vector attached to a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: SystemLayout,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub const TOL: f64 = 1e-12;

    pub fn new(layout: SystemLayout, amplitudes: Vec<C64>) -> Result<Self> {
        let n = layout.total_dim();
        check_dim(n)?;
        if amplitudes.len() != n {
            return Err(Error::LayoutMismatch(format!(
                "layout has dimension {n}, got {} amplitudes",
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > Self::TOL {
            return Err(Error::InvalidState(format!("state vector has norm {norm}")));
        }
        Ok(PureState { layout, amplitudes })
    }

    /// Rescales to unit norm before validating.
    pub fn normalized(layout: SystemLayout, mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Self::new(layout, amplitudes)
    }

    pub fn from_real(layout: SystemLayout, amps: &[f64]) -> Result<Self> {
        Self::normalized(layout, amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn to_mstate(&self) -> Mstate {
        Mstate {
            layout: self.layout.clone(),
            matrix: CMatrix::outer(&self.amplitudes),
        }
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let layout = self.layout.join(&other.layout)?;
        check_dim(layout.total_dim())?;
        let mut amps = Vec::with_capacity(layout.total_dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        Ok(PureState {
            layout,
            amplitudes: amps,
        })
    }

    /// Tries to read a pure state off a density matrix (purity `≥ 1 − 1e-9`).
    pub fn from_mstate(rho: &Mstate) -> Result<PureState> {
        let purity = rho.purity();
        if purity < 1.0 - 1e-9 {
            return Err(Error::NotPure(purity));
        }
        let eig = qmat::herm_eigen(rho.matrix())?;
        let mut v = eig.eigenvectors.column(rho.dim() - 1);
        fix_phase(&mut v);
        PureState::normalized(rho.layout().clone(), v)
    }
}

/// Either representation, as produced by presets and state files.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyState {
    Mixed(Mstate),
    Pure(PureState),
}

impl AnyState {
    pub fn to_mstate(&self) -> Mstate {
        match self {
            AnyState::Mixed(m) => m.clone(),
            AnyState::Pure(p) => p.to_mstate(),
        }
    }

    pub fn layout(&self) -> &SystemLayout {
        match self {
            AnyState::Mixed(m) => m.layout(),
            AnyState::Pure(p) => p.layout(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            AnyState::Pure(p) => Some(p),
            AnyState::Mixed(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleMember {
    Mixed(Mstate),
    Pure(PureState),
}

impl EnsembleMember {
    pub fn layout(&self) -> &SystemLayout {
        match self {
            EnsembleMember::Mixed(m) => m.layout(),
            EnsembleMember::Pure(p) => p.layout(),
        }
    }

    pub fn to_mstate(&self) -> Mstate {
        match self {
            EnsembleMember::Mixed(m) => m.clone(),
            EnsembleMember::Pure(p) => p.to_mstate(),
        }
    }
}

/// Weighted collection of states on one layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    weights: Vec<f64>,
    members: Vec<EnsembleMember>,
}

impl Ensemble {
    pub fn new(weights: Vec<f64>, members: Vec<EnsembleMember>) -> Result<Self> {
        if weights.is_empty() || weights.len() != members.len() {
            return Err(Error::InvalidArgument(format!(
                "{} weights for {} members",
                weights.len(),
                members.len()
            )));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidArgument("weights must be non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("weights sum to {total}")));
        }
        let layout = members[0].layout();
        if members.iter().any(|m| m.layout() != layout) {
            return Err(Error::LayoutMismatch("ensemble members differ in layout".into()));
        }
        Ok(Ensemble { weights, members })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn layout(&self) -> &SystemLayout {
        self.members[0].layout()
    }

    /// `Σ p_i ρ_i`
    pub fn average(&self) -> Mstate {
        let n = self.layout().total_dim();
        let mut m = CMatrix::zeros(n, n);
        for (w, member) in self.weights.iter().zip(&self.members) {
            m.add_scaled(member.to_mstate().matrix(), *w);
        }
        Mstate::from_parts(self.layout().clone(), m)
    }
}
