//! Named state families.
//!
//! | name                  | params            | parties          |
//! |-----------------------|-------------------|------------------|
//! | `ghz`                 | none              | A, B, C          |
//! | `w`                   | none              | A, B, C          |
//! | `bell`                | none              | A, B             |
//! | `family15`            | `[c]`, 0 < c < 1  | A, B, C          |
//! | `product_eq10`        | `[theta, p]`      | A, B1, B2, C     |
//! | `classical_classical` | probabilities     | A, B             |
//! | `max_correlated`      | re/im pairs       | X, Z             |
//!
//! `w` is not one of the families studied in the source material; it is
//! kept as a standard test point for assisted entanglement.

use std::f64::consts::FRAC_1_SQRT_2;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::qmat::{CMatrix, C64};

use super::{AnyState, Mstate, PureState, SystemLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetName {
    Ghz,
    W,
    Bell,
    Family15,
    ProductEq10,
    ClassicalClassical,
    MaxCorrelated,
}

impl PresetName {
    pub const ALL: [PresetName; 7] = [
        PresetName::Ghz,
        PresetName::W,
        PresetName::Bell,
        PresetName::Family15,
        PresetName::ProductEq10,
        PresetName::ClassicalClassical,
        PresetName::MaxCorrelated,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::Ghz => "ghz",
            PresetName::W => "w",
            PresetName::Bell => "bell",
            PresetName::Family15 => "family15",
            PresetName::ProductEq10 => "product_eq10",
            PresetName::ClassicalClassical => "classical_classical",
            PresetName::MaxCorrelated => "max_correlated",
        }
    }
}

impl FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PresetName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::InvalidPreset(format!("unknown preset `{s}`")))
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidPreset(msg.into())
}

fn expect_params(name: &str, params: &[f64], n: usize) -> Result<()> {
    if params.len() != n {
        return Err(bad(format!(
            "`{name}` takes {n} parameter(s), got {}",
            params.len()
        )));
    }
    if params.iter().any(|x| !x.is_finite()) {
        return Err(bad(format!("`{name}` parameters must be finite")));
    }
    Ok(())
}

fn abc() -> SystemLayout {
    SystemLayout::qubits(&["A", "B", "C"]).expect("static layout")
}

/// Builds a preset state. Pure families come back as [`AnyState::Pure`].
pub fn preset(name: &str, params: &[f64]) -> Result<AnyState> {
    match name.parse::<PresetName>()? {
        PresetName::Ghz => {
            expect_params(name, params, 0)?;
            let mut amps = [0.0; 8];
            amps[0] = FRAC_1_SQRT_2;
            amps[7] = FRAC_1_SQRT_2;
            Ok(AnyState::Pure(PureState::from_real(abc(), &amps)?))
        }
        PresetName::W => {
            expect_params(name, params, 0)?;
            let mut amps = [0.0; 8];
            for i in [1, 2, 4] {
                amps[i] = 1.0;
            }
            Ok(AnyState::Pure(PureState::from_real(abc(), &amps)?))
        }
        PresetName::Bell => {
            expect_params(name, params, 0)?;
            Ok(AnyState::Pure(bell_pair("A", "B")))
        }
        PresetName::Family15 => {
            expect_params(name, params, 1)?;
            Ok(AnyState::Mixed(family15(params[0])?))
        }
        PresetName::ProductEq10 => {
            let (theta, p) = match params {
                [] => (std::f64::consts::FRAC_PI_4, 1.0),
                _ => {
                    expect_params(name, params, 2)?;
                    (params[0], params[1])
                }
            };
            Ok(AnyState::Mixed(product_eq10(theta, p)?))
        }
        PresetName::ClassicalClassical => {
            let probs: Vec<f64> = if params.is_empty() {
                vec![0.5, 0.5]
            } else {
                params.to_vec()
            };
            Ok(AnyState::Mixed(classical_classical(&probs)?))
        }
        PresetName::MaxCorrelated => Ok(AnyState::Mixed(max_correlated(params)?)),
    }
}

/// `(|00⟩ + |11⟩)/√2` on the two given labels.
pub fn bell_pair(a: &str, b: &str) -> PureState {
    let layout = SystemLayout::new([(a, 2), (b, 2)]).expect("distinct labels");
    PureState::from_real(layout, &[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).expect("unit norm")
}

/// Bob's four states for the overlap `c`, indexed by the Alice/Charlie flag
/// `x = 2a + c`: `|0⟩, |ψ⟩, |1⟩, |ψ⊥⟩`.
pub fn family15_bob_states(c: f64) -> Result<[[f64; 2]; 4]> {
    if !(c > 0.0 && c < 1.0) {
        return Err(bad(format!("family15 overlap must lie in (0, 1), got {c}")));
    }
    let s = (1.0 - c * c).sqrt();
    Ok([[1.0, 0.0], [c, s], [0.0, 1.0], [s, -c]])
}

/// `¼ Σ |b_x⟩⟨b_x|^B ⊗ |a c⟩⟨a c|^{AC}` on layout (A, B, C).
pub fn family15(c: f64) -> Result<Mstate> {
    let bob = family15_bob_states(c)?;
    let mut m = CMatrix::zeros(8, 8);
    for (x, v) in bob.iter().enumerate() {
        let (a, cc) = (x >> 1, x & 1);
        for b1 in 0..2 {
            for b2 in 0..2 {
                let i = (a << 2) | (b1 << 1) | cc;
                let j = (a << 2) | (b2 << 1) | cc;
                m[(i, j)] += C64::new(0.25 * v[b1] * v[b2], 0.0);
            }
        }
    }
    Ok(Mstate::from_parts(abc(), m))
}

/// Coefficients `a_ij = √(p_i p_j) ⟨ψ_j|ψ_i⟩` of the maximally correlated
/// partner of family15 read as `X = AC`, `Y = B`, flattened as re/im pairs
/// for [`preset`]`("max_correlated", ..)`.
pub fn family15_partner_coefficients(c: f64) -> Result<Vec<f64>> {
    let bob = family15_bob_states(c)?;
    let mut out = Vec::with_capacity(32);
    for vi in &bob {
        for vj in &bob {
            out.push(0.25 * (vi[0] * vj[0] + vi[1] * vj[1]));
            out.push(0.0);
        }
    }
    Ok(out)
}

/// `(cos θ|00⟩ + sin θ|11⟩)^{A B1} ⊗ (p Φ⁺ + (1-p) I/4)^{B2 C}`.
pub fn product_eq10(theta: f64, p: f64) -> Result<Mstate> {
    if !(0.0..=1.0).contains(&p) {
        return Err(bad(format!("product_eq10 mixing weight must lie in [0, 1], got {p}")));
    }
    let ab = PureState::from_real(
        SystemLayout::qubits(&["A", "B1"])?,
        &[theta.cos(), 0.0, 0.0, theta.sin()],
    )?
    .to_mstate();
    let phi = bell_pair("B2", "C").to_mstate();
    let mut m = phi.matrix().scale(p);
    m.add_scaled(&CMatrix::identity(4), (1.0 - p) / 4.0);
    let bc = Mstate::from_parts(phi.layout().clone(), m);
    ab.tensor(&bc)
}

/// `Σ p_i |ii⟩⟨ii|` on (A, B), local dimension = number of probabilities.
pub fn classical_classical(probs: &[f64]) -> Result<Mstate> {
    let n = probs.len();
    if n < 2 {
        return Err(bad("classical_classical needs at least two probabilities"));
    }
    if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(bad("classical_classical probabilities must be non-negative"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(bad(format!("classical_classical probabilities sum to {total}")));
    }
    let layout = SystemLayout::new([("A", n), ("B", n)])?;
    let mut diag = vec![0.0; n * n];
    for (i, &p) in probs.iter().enumerate() {
        diag[i * n + i] = p;
    }
    Mstate::new(layout, CMatrix::from_diag(&diag)).map_err(|e| bad(e.to_string()))
}

/// `Σ a_ij |ii⟩⟨jj|` on (X, Z); `params` holds `a` row-major as re/im pairs.
pub fn max_correlated(params: &[f64]) -> Result<Mstate> {
    if params.is_empty() || params.len() % 2 != 0 {
        return Err(bad("max_correlated takes 2·n² numbers (re/im pairs)"));
    }
    let n2 = params.len() / 2;
    let n = (n2 as f64).sqrt().round() as usize;
    if n * n != n2 || n < 2 {
        return Err(bad(format!(
            "max_correlated needs n² coefficients with n >= 2, got {n2}"
        )));
    }
    if params.iter().any(|x| !x.is_finite()) {
        return Err(bad("max_correlated coefficients must be finite"));
    }
    let layout = SystemLayout::new([("X", n), ("Z", n)])?;
    let mut m = CMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let k = 2 * (i * n + j);
            m[(i * n + i, j * n + j)] = C64::new(params[k], params[k + 1]);
        }
    }
    Mstate::new(layout, m).map_err(|e| bad(format!("coefficient matrix: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::vn_entropy;

    #[test]
    fn ghz_amplitudes() {
        let g = preset("ghz", &[]).unwrap();
        let p = g.as_pure().unwrap();
        assert!((p.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((p.amplitudes()[7].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(p.amplitudes()[1..7].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn unknown_and_bad_params() {
        assert!(matches!(preset("nope", &[]), Err(Error::InvalidPreset(_))));
        assert!(matches!(preset("family15", &[0.0]), Err(Error::InvalidPreset(_))));
        assert!(matches!(preset("family15", &[1.0]), Err(Error::InvalidPreset(_))));
        assert!(matches!(preset("family15", &[]), Err(Error::InvalidPreset(_))));
        assert!(matches!(preset("ghz", &[1.0]), Err(Error::InvalidPreset(_))));
        assert!(matches!(preset("product_eq10", &[0.3, 1.5]), Err(Error::InvalidPreset(_))));
        assert!(matches!(
            preset("classical_classical", &[0.7, 0.7]),
            Err(Error::InvalidPreset(_))
        ));
        // not PSD
        assert!(matches!(
            preset("max_correlated", &[0.5, 0.0, 0.9, 0.0, 0.9, 0.0, 0.5, 0.0]),
            Err(Error::InvalidPreset(_))
        ));
    }

    #[test]
    fn family15_rank_and_entropy() {
        for k in 1..10 {
            let c = (k as f64 * std::f64::consts::PI / 20.0).sin();
            let rho = family15(c).unwrap();
            assert!(Mstate::new(rho.layout().clone(), rho.matrix().clone()).is_ok());
            let eigs = rho.eigenvalues();
            assert_eq!(eigs.iter().filter(|&&l| l > 1e-12).count(), 4);
            assert!((vn_entropy(&rho) - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn max_correlated_matches_partner_of_family15() {
        let c = 0.6;
        let coeffs = family15_partner_coefficients(c).unwrap();
        let xz = max_correlated(&coeffs).unwrap();
        // explicit purification Σ √p_x |x⟩^X |ψ_x⟩^Y |x⟩^Z, traced over Y
        let bob = family15_bob_states(c).unwrap();
        let layout = SystemLayout::new([("X", 4), ("Y", 2), ("Z", 4)]).unwrap();
        let mut amps = vec![C64::new(0.0, 0.0); 32];
        for (x, v) in bob.iter().enumerate() {
            for y in 0..2 {
                amps[x * 8 + y * 4 + x] = C64::new(0.5 * v[y], 0.0);
            }
        }
        let pure = PureState::new(layout, amps).unwrap().to_mstate();
        let reduced = pure.partial_trace(&["Y"]).unwrap();
        assert!(reduced.matrix().max_abs_diff(xz.matrix()) < 1e-15);
        // and the XY marginal is family15 with X = AC
        let xy = pure.partial_trace(&["Z"]).unwrap();
        let f = family15(c).unwrap().merge(&["A", "C"], "X").unwrap();
        assert!(xy.matrix().max_abs_diff(f.matrix()) < 1e-15);
    }

    #[test]
    fn product_eq10_layout() {
        let rho = preset("product_eq10", &[0.4, 0.3]).unwrap().to_mstate();
        assert_eq!(rho.layout().labels(), vec!["A", "B1", "B2", "C"]);
        let d = preset("product_eq10", &[]).unwrap().to_mstate();
        assert!((vn_entropy(&d)).abs() < 1e-9);
    }

    #[test]
    fn classical_classical_dims() {
        let rho = preset("classical_classical", &[0.2, 0.3, 0.5]).unwrap().to_mstate();
        assert_eq!(rho.layout().dims(), vec![3, 3]);
    }
}
