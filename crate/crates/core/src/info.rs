//! Entropies, mutual informations and distances. All logarithms are base 2.

use crate::error::{Error, Result};
use crate::qmat::{self, CMatrix, ZERO_CLIP};
use crate::states::{entropy_of_spectrum, Mstate, SystemLayout};

/// Two disjoint sets of party labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub left: Vec<String>,
    pub right: Vec<String>,
}

impl Partition {
    pub fn new(left: &[&str], right: &[&str]) -> Self {
        Partition {
            left: left.iter().map(|s| s.to_string()).collect(),
            right: right.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn left(&self) -> Vec<&str> {
        self.left.iter().map(String::as_str).collect()
    }

    pub fn right(&self) -> Vec<&str> {
        self.right.iter().map(String::as_str).collect()
    }

    /// Checks both sides are non-empty, disjoint and present in `layout`.
    pub fn validate(&self, layout: &SystemLayout) -> Result<()> {
        if self.left.is_empty() || self.right.is_empty() {
            return Err(Error::InvalidPartition("both sides must be non-empty".into()));
        }
        disjoint(layout, &[&self.left(), &self.right()])
    }

    /// Validates and additionally requires the cut to cover every party.
    pub fn validate_covering(&self, layout: &SystemLayout) -> Result<()> {
        self.validate(layout)?;
        if self.left.len() + self.right.len() != layout.len() {
            return Err(Error::InvalidPartition(format!(
                "cut {self} does not cover layout {layout}"
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.left.join(""), self.right.join(""))
    }
}

fn disjoint(layout: &SystemLayout, sets: &[&[&str]]) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for set in sets {
        for &l in set.iter() {
            if !layout.contains(l) {
                return Err(Error::UnknownParty(l.to_string()));
            }
            if seen.contains(&l) {
                return Err(Error::InvalidPartition(format!(
                    "party `{l}` appears in more than one set"
                )));
            }
            seen.push(l);
        }
    }
    Ok(())
}

fn union<'a>(a: &[&'a str], b: &[&'a str]) -> Vec<&'a str> {
    a.iter().chain(b).copied().collect()
}

pub fn vn_entropy(rho: &Mstate) -> f64 {
    rho.entropy()
}

/// Entropy of a raw Hermitian PSD matrix.
pub fn matrix_entropy(m: &CMatrix) -> Result<f64> {
    Ok(entropy_of_spectrum(&qmat::herm_eigenvalues(m)?))
}

/// `S(left) + S(right) − S(left ∪ right)`; parties outside the cut are traced out.
pub fn mutual_info(rho: &Mstate, cut: &Partition) -> Result<f64> {
    cut.validate(rho.layout())?;
    let (l, r) = (cut.left(), cut.right());
    Ok(rho.entropy_of(&l)? + rho.entropy_of(&r)? - rho.entropy_of(&union(&l, &r))?)
}

/// Shorthand for `mutual_info` with label slices.
pub fn mi(rho: &Mstate, left: &[&str], right: &[&str]) -> Result<f64> {
    mutual_info(rho, &Partition::new(left, right))
}

/// `S(target ∪ given) − S(given)`
pub fn conditional_entropy(rho: &Mstate, target: &[&str], given: &[&str]) -> Result<f64> {
    if target.is_empty() {
        return Err(Error::InvalidPartition("empty target set".into()));
    }
    disjoint(rho.layout(), &[target, given])?;
    Ok(rho.entropy_of(&union(target, given))? - rho.entropy_of(given)?)
}

/// `I(x:y|z) = S(xz) + S(yz) − S(z) − S(xyz)`
pub fn conditional_mutual_info(rho: &Mstate, x: &[&str], y: &[&str], z: &[&str]) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::InvalidPartition("empty set in conditional mutual information".into()));
    }
    disjoint(rho.layout(), &[x, y, z])?;
    let xz = union(x, z);
    let yz = union(y, z);
    let xyz = union(&xz, y);
    Ok(rho.entropy_of(&xz)? + rho.entropy_of(&yz)? - rho.entropy_of(z)? - rho.entropy_of(&xyz)?)
}

fn same_layout(a: &Mstate, b: &Mstate) -> Result<()> {
    if a.layout() != b.layout() {
        return Err(Error::LayoutMismatch(format!("{} vs {}", a.layout(), b.layout())));
    }
    Ok(())
}

/// `Tr √(√ρ σ √ρ)`, the square-root fidelity.
pub fn uhlmann_fidelity(rho: &Mstate, sigma: &Mstate) -> Result<f64> {
    same_layout(rho, sigma)?;
    let s = qmat::psd_sqrt(rho.matrix())?;
    let inner = s.matmul(sigma.matrix()).matmul(&s).hermitian_part();
    let eigs = qmat::herm_eigenvalues(&inner)?;
    let f: f64 = eigs.iter().filter(|&&l| l > ZERO_CLIP).map(|l| l.sqrt()).sum();
    Ok(f.clamp(0.0, 1.0))
}

/// `½ ‖ρ − σ‖₁`
pub fn trace_distance(rho: &Mstate, sigma: &Mstate) -> Result<f64> {
    same_layout(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix();
    Ok((0.5 * qmat::trace_norm(&diff)?).clamp(0.0, 1.0))
}

pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!(
            "binary entropy needs x in [0, 1], got {x}"
        )));
    }
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    Ok(term(x) + term(1.0 - x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityBound {
    /// `3 T log₂ d + 3 h(T)`
    pub value: f64,
    /// Set when `T > 1/2`, outside the regime the bound is usually quoted for.
    pub beyond_half: bool,
}

/// Mutual-information continuity bound for states at trace distance `t`
/// on a system of total dimension `total_dim`.
pub fn mi_continuity_bound(t: f64, total_dim: usize) -> Result<ContinuityBound> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!(
            "trace distance must lie in [0, 1], got {t}"
        )));
    }
    if total_dim < 1 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let value = 3.0 * t * (total_dim as f64).log2() + 3.0 * binary_entropy(t)?;
    Ok(ContinuityBound {
        value,
        beyond_half: t > 0.5,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedStream;
    use crate::states::random::{depolarize, random_mstate, random_pure};
    use crate::states::{preset, PureState};
    use proptest::prelude::*;

    fn qubit(d: &[f64]) -> Mstate {
        Mstate::new(SystemLayout::qubits(&["A"]).unwrap(), CMatrix::from_diag(d)).unwrap()
    }

    fn ghz() -> Mstate {
        preset("ghz", &[]).unwrap().to_mstate()
    }

    fn bell() -> Mstate {
        preset("bell", &[]).unwrap().to_mstate()
    }

    fn abc() -> SystemLayout {
        SystemLayout::qubits(&["A", "B", "C"]).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert!(vn_entropy(&ghz()).abs() < 1e-12);
        assert!((vn_entropy(&qubit(&[0.5, 0.5])) - 1.0).abs() < 1e-15);
        let s = vn_entropy(&qubit(&[2.0 / 3.0, 1.0 / 3.0]));
        let oracle = -(2.0 / 3.0) * (2.0f64 / 3.0).log2() - (1.0 / 3.0) * (1.0f64 / 3.0).log2();
        assert!((s - oracle).abs() < 1e-12);
        assert!((s - 0.918296).abs() < 1e-6);
    }

    #[test]
    fn mutual_info_examples() {
        let prod = qubit(&[0.3, 0.7]).tensor(&qubit(&[0.5, 0.5]).relabel(&[("A", "B")]).unwrap()).unwrap();
        assert!(mi(&prod, &["A"], &["B"]).unwrap().abs() < 1e-12);
        assert!((mi(&bell(), &["A"], &["B"]).unwrap() - 2.0).abs() < 1e-12);
        for c in [0.2, 0.7071, 0.9] {
            let f = preset("family15", &[c]).unwrap().to_mstate();
            assert!(mi(&f, &["B"], &["C"]).unwrap().abs() < 1e-12);
        }
        assert!(matches!(
            mi(&bell(), &["A"], &["A", "B"]),
            Err(Error::InvalidPartition(_))
        ));
    }

    #[test]
    fn conditional_entropy_examples() {
        let cc = preset("classical_classical", &[]).unwrap().to_mstate();
        let cc = cc.relabel(&[("A", "B"), ("B", "C")]).unwrap();
        assert!(conditional_entropy(&cc, &["B"], &["C"]).unwrap().abs() < 1e-12);
        let b = bell().relabel(&[("A", "B"), ("B", "C")]).unwrap();
        assert!((conditional_entropy(&b, &["B"], &["C"]).unwrap() + 1.0).abs() < 1e-12);
        let g = ghz();
        let oracle = g.reduce(&["B", "C"]).unwrap().entropy() - g.reduce(&["C"]).unwrap().entropy();
        let v = conditional_entropy(&g, &["B"], &["C"]).unwrap();
        assert!((v - oracle).abs() < 1e-12 && v.abs() < 1e-12);
    }

    #[test]
    fn cmi_examples() {
        let l = abc();
        let a = random_mstate(&SystemLayout::qubits(&["A"]).unwrap(), 2, 1);
        let b = random_mstate(&SystemLayout::qubits(&["B"]).unwrap(), 2, 2);
        let c = random_mstate(&SystemLayout::qubits(&["C"]).unwrap(), 2, 3);
        let prod = a.tensor(&b).unwrap().tensor(&c).unwrap();
        assert!(conditional_mutual_info(&prod, &["A"], &["B"], &["C"]).unwrap().abs() < 1e-10);
        // S(AC) + S(BC) - S(C) - S(ABC) = 1 + 1 - 1 - 0
        let g = ghz();
        let oracle = g.reduce(&["A", "C"]).unwrap().entropy() + g.reduce(&["B", "C"]).unwrap().entropy()
            - g.reduce(&["C"]).unwrap().entropy()
            - g.entropy();
        let v = conditional_mutual_info(&g, &["A"], &["B"], &["C"]).unwrap();
        assert!((v - oracle).abs() < 1e-10 && (v - 1.0).abs() < 1e-10);
        let r = random_mstate(&l, 8, 4);
        assert!(conditional_mutual_info(&r, &["A"], &["B"], &["C"]).unwrap() >= -1e-9);
    }

    #[test]
    fn fidelity_examples() {
        let r = random_mstate(&abc(), 3, 9);
        assert!((uhlmann_fidelity(&r, &r).unwrap() - 1.0).abs() < 1e-9);
        let zero = qubit(&[1.0, 0.0]);
        let one = qubit(&[0.0, 1.0]);
        assert!(uhlmann_fidelity(&zero, &one).unwrap().abs() < 1e-12);
        let mixed = qubit(&[0.5, 0.5]);
        let f = uhlmann_fidelity(&zero, &mixed).unwrap();
        assert!((f - 0.5f64.sqrt()).abs() < 1e-9);
        assert!(matches!(uhlmann_fidelity(&zero, &bell()), Err(Error::LayoutMismatch(_))));
    }

    #[test]
    fn trace_distance_examples() {
        let zero = qubit(&[1.0, 0.0]);
        let one = qubit(&[0.0, 1.0]);
        assert_eq!(trace_distance(&zero, &zero).unwrap(), 0.0);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
        let mut seeds = SeedStream::new(21);
        for _ in 0..20 {
            let l = SystemLayout::qubits(&["A", "B"]).unwrap();
            let [a, b, c] = [0, 1, 2].map(|_| random_mstate(&l, 4, seeds.next_seed()));
            let ab = trace_distance(&a, &b).unwrap();
            let bc = trace_distance(&b, &c).unwrap();
            let ac = trace_distance(&a, &c).unwrap();
            assert!(ac <= ab + bc + 1e-9);
        }
    }

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((binary_entropy(1.0 / 3.0).unwrap() - 0.918296).abs() < 1e-6);
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn continuity_bound_examples() {
        assert_eq!(mi_continuity_bound(0.0, 8).unwrap().value, 0.0);
        let b = mi_continuity_bound(0.5, 4).unwrap();
        assert!((b.value - 6.0).abs() < 1e-12);
        assert!(!b.beyond_half);
        assert!(mi_continuity_bound(0.8, 4).unwrap().beyond_half);
        assert!(mi_continuity_bound(1.2, 4).is_err());
    }

    #[test]
    fn continuity_bound_holds_on_perturbed_pairs() {
        let mut seeds = SeedStream::new(3);
        let l = abc();
        for k in 0..25 {
            let rho = random_mstate(&l, 1 + k % 8, seeds.next_seed());
            let sigma = depolarize(&rho, 0.02 * (k % 10) as f64);
            let t = trace_distance(&rho, &sigma).unwrap();
            let gap = (mi(&rho, &["A"], &["B", "C"]).unwrap()
                - mi(&sigma, &["A"], &["B", "C"]).unwrap())
            .abs();
            assert!(gap <= mi_continuity_bound(t, 8).unwrap().value + 1e-12);
        }
    }

    #[test]
    fn pure_state_entropy_matches_marginals() {
        let psi: PureState = random_pure(&abc(), 77);
        let rho = psi.to_mstate();
        let sa = rho.entropy_of(&["A"]).unwrap();
        let sbc = rho.entropy_of(&["B", "C"]).unwrap();
        assert!((sa - sbc).abs() < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn mutual_info_bounds_and_data_processing(seed in any::<u64>(), rank in 1usize..=8) {
            let rho = random_mstate(&abc(), rank, seed);
            let full = mi(&rho, &["A"], &["B", "C"]).unwrap();
            let part = mi(&rho, &["A"], &["B"]).unwrap();
            prop_assert!(part >= -1e-9);
            prop_assert!(part <= full + 1e-9);
            prop_assert!(full <= 2.0 + 1e-9);
        }

        #[test]
        fn fuchs_van_de_graaf_band(s1 in any::<u64>(), s2 in any::<u64>()) {
            let l = SystemLayout::qubits(&["A", "B"]).unwrap();
            let a = random_mstate(&l, 2, s1);
            let b = random_mstate(&l, 3, s2);
            let f = uhlmann_fidelity(&a, &b).unwrap();
            let t = trace_distance(&a, &b).unwrap();
            prop_assert!(f * f + t * t <= 1.0 + 1e-9);
            prop_assert!(1.0 - f <= t + 1e-9);
            prop_assert!((f - uhlmann_fidelity(&b, &a).unwrap()).abs() < 1e-9);
        }
    }
}
