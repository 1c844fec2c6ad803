//! Classical and quantum entropies, Holevo quantity, and random-access-code
//! bounds. All logarithms are base 2.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::state::MixedState;

/// Eigenvalues with magnitude below this count as zero.
pub const EIGEN_ZERO_TOL: f64 = 1e-12;
/// Negative eigenvalues above `-EIGEN_CLAMP_TOL` are clamped to zero.
pub const EIGEN_CLAMP_TOL: f64 = 1e-9;
const SUM_TOL: f64 = 1e-9;

/// Probability vector: non-negative, sums to 1 within 1e-9.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteDistribution(Vec<f64>);

impl DiscreteDistribution {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        check_probabilities(&p)?;
        Ok(Self(p))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("empty distribution".into()));
        }
        Ok(Self(vec![1.0 / n as f64; n]))
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }
}

fn check_probabilities(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::Domain("empty distribution".into()));
    }
    if let Some(x) = p.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::Domain(format!("invalid probability {x}")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > SUM_TOL {
        return Err(Error::Domain(format!("probabilities sum to {s}")));
    }
    Ok(())
}

/// Joint distribution `p[x][y]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDistribution(Vec<Vec<f64>>);

impl JointDistribution {
    pub fn new(p: Vec<Vec<f64>>) -> Result<Self> {
        let cols = p.first().map(Vec::len).unwrap_or(0);
        if cols == 0 || p.iter().any(|row| row.len() != cols) {
            return Err(Error::Dimension("joint distribution must be a non-empty rectangle".into()));
        }
        check_probabilities(&p.concat())?;
        Ok(Self(p))
    }

    pub fn marginal_x(&self) -> DiscreteDistribution {
        DiscreteDistribution(self.0.iter().map(|row| row.iter().sum()).collect())
    }

    pub fn marginal_y(&self) -> DiscreteDistribution {
        let cols = self.0[0].len();
        DiscreteDistribution((0..cols).map(|y| self.0.iter().map(|row| row[y]).sum()).collect())
    }

    pub fn flattened(&self) -> DiscreteDistribution {
        DiscreteDistribution(self.0.concat())
    }
}

/// Weighted states `{(p_i, ρ_i)}` of equal dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<(f64, MixedState)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, MixedState)>) -> Result<Self> {
        let weights: Vec<f64> = members.iter().map(|m| m.0).collect();
        check_probabilities(&weights)?;
        let d = members[0].1.dims().to_vec();
        if members.iter().any(|m| m.1.dims() != d.as_slice()) {
            return Err(Error::Dimension("ensemble members differ in dimension".into()));
        }
        Ok(Self { members })
    }

    /// Equal weights over `states`.
    pub fn uniform(states: Vec<MixedState>) -> Result<Self> {
        let w = 1.0 / states.len().max(1) as f64;
        Self::new(states.into_iter().map(|s| (w, s)).collect())
    }

    pub fn members(&self) -> &[(f64, MixedState)] {
        &self.members
    }

    pub fn average(&self) -> MixedState {
        let d = self.members[0].1.dim();
        let mut m = crate::qcore::Matrix::zeros(d, d);
        for (p, s) in &self.members {
            m += s.matrix() * crate::qcore::linalg::r(*p);
        }
        MixedState::from_parts(self.members[0].1.dims().to_vec(), m)
    }
}

fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

pub fn shannon_entropy(d: &DiscreteDistribution) -> f64 {
    d.0.iter().map(|&p| plogp(p)).sum()
}

/// `H(p) = -p log p - (1-p) log(1-p)`.
pub fn binary_entropy(p: f64) -> f64 {
    plogp(p) + plogp(1.0 - p)
}

/// `H(X|Y) = H(X,Y) - H(Y)`.
pub fn conditional_entropy(j: &JointDistribution) -> f64 {
    shannon_entropy(&j.flattened()) - shannon_entropy(&j.marginal_y())
}

/// `I(X;Y) = H(X) - H(X|Y)`.
pub fn mutual_information(j: &JointDistribution) -> f64 {
    shannon_entropy(&j.marginal_x()) - conditional_entropy(j)
}

pub fn von_neumann_entropy(rho: &MixedState) -> Result<f64> {
    let mut s = 0.0;
    for lambda in rho.eigenvalues() {
        if lambda < -EIGEN_CLAMP_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {lambda:e}")));
        }
        if lambda.abs() >= EIGEN_ZERO_TOL {
            s += plogp(lambda.max(0.0));
        }
    }
    Ok(s)
}

/// `χ = S(Σ p_i ρ_i) - Σ p_i S(ρ_i)`, clamped at zero.
pub fn holevo_quantity(e: &Ensemble) -> Result<f64> {
    let avg = von_neumann_entropy(&e.average())?;
    let mut cond = 0.0;
    for (p, s) in &e.members {
        cond += p * von_neumann_entropy(s)?;
    }
    Ok((avg - cond).max(0.0))
}

/// Minimum qubits per classical bit for a random access code with success
/// probability `p`: `1 / (1 - H(p))`, defined on `(1/2, 1]`.
pub fn nayak_ratio(p: f64) -> Result<f64> {
    if !(p > 0.5 && p <= 1.0) {
        return Err(Error::Domain(format!("success probability {p} outside (1/2, 1]")));
    }
    Ok(1.0 / (1.0 - binary_entropy(p)))
}

/// Largest `m` with `(p - H(p)/k) m ≤ n + H(p)`.
pub fn multibit_bound_max_m(p: f64, k: u32, n: u32) -> Result<u64> {
    if k <= 1 {
        return Err(Error::Domain(format!("k = {k} must exceed 1")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
    }
    let h = binary_entropy(p);
    let coef = p - h / k as f64;
    if coef <= 0.0 {
        return Err(Error::VacuousBound(coef));
    }
    let rhs = n as f64 + h;
    let mut m = (rhs / coef).floor() as u64;
    while (m + 1) as f64 * coef <= rhs {
        m += 1;
    }
    while m > 0 && m as f64 * coef > rhs {
        m -= 1;
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub p: f64,
    pub ratio: f64,
}

/// `nayak_ratio` sampled at `points` evenly spaced values in `(1/2, 1]`.
pub fn nayak_curve(points: usize) -> Result<Vec<CurvePoint>> {
    if points == 0 {
        return Err(Error::Domain("curve needs at least one point".into()));
    }
    (1..=points)
        .map(|i| {
            let p = 0.5 + 0.5 * i as f64 / points as f64;
            Ok(CurvePoint { p, ratio: nayak_ratio(p)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{r, ONE, ZERO};
    use crate::qcore::{bell_vectors, Matrix, PureState};
    use proptest::prelude::*;

    // Independent entropy oracle over raw slices.
    fn h_oracle(p: &[f64]) -> f64 {
        p.iter().filter(|x| **x > 0.0).map(|x| -x * x.ln() / 2f64.ln()).sum()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn binary_entropy_spot_value() {
        let d = DiscreteDistribution::new(vec![0.9, 0.1]).unwrap();
        assert!(close(shannon_entropy(&d), 0.4690, 1e-4));
        assert!(close(shannon_entropy(&d), h_oracle(&[0.9, 0.1]), 1e-14));
    }

    #[test]
    fn correlated_bits_mutual_information() {
        let j = JointDistribution::new(vec![vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        let oracle = 1.0 - h_oracle(&[0.8, 0.2]);
        assert!(close(mutual_information(&j), oracle, 1e-12));
        assert!(close(mutual_information(&j), 0.2781, 1e-4));
    }

    #[test]
    fn w_marginal_entropy() {
        let s = r(1.0 / 3f64.sqrt());
        let w = PureState::from_amplitudes(vec![2, 2, 2], &[ZERO, s, s, ZERO, s, ZERO, ZERO, ZERO]).unwrap();
        let rho = w.partial_trace(&[0, 1]).unwrap();
        let oracle = 3f64.log2() - 2.0 / 3.0;
        assert!(close(von_neumann_entropy(&rho).unwrap(), oracle, 1e-12));
        assert!(close(oracle, 0.9183, 1e-4));
    }

    #[test]
    fn bell_ensemble_carries_two_bits() {
        let e = Ensemble::uniform(
            bell_vectors().iter().map(|v| PureState::new(vec![2, 2], v.clone()).unwrap().to_density()).collect(),
        )
        .unwrap();
        assert!(close(holevo_quantity(&e).unwrap(), 2.0, 1e-12));
    }

    #[test]
    fn zero_plus_ensemble() {
        let zero = PureState::qubits(1, 0).unwrap();
        let plus = PureState::from_amplitudes(vec![2], &[r(0.5f64.sqrt()), r(0.5f64.sqrt())]).unwrap();
        let e = Ensemble::uniform(vec![zero.to_density(), plus.to_density()]).unwrap();
        // average state has eigenvalues (1 ± 1/√2)/2
        let l = (1.0 + 0.5f64.sqrt()) / 2.0;
        assert!(close(holevo_quantity(&e).unwrap(), h_oracle(&[l, 1.0 - l]), 1e-12));
        assert!(close(holevo_quantity(&e).unwrap(), 0.6009, 1e-4));
    }

    #[test]
    fn nayak_spot_values() {
        assert_eq!(nayak_ratio(1.0).unwrap(), 1.0);
        assert!(close(nayak_ratio(0.99).unwrap(), 1.088, 1e-3));
        assert!(close(nayak_ratio(0.9).unwrap(), 1.0 / (1.0 - h_oracle(&[0.9, 0.1])), 1e-12));
        assert!(close(nayak_ratio(0.9).unwrap(), 1.884, 1e-3));
        for bad in [0.5, 0.3, 1.2, f64::NAN] {
            assert!(matches!(nayak_ratio(bad), Err(Error::Domain(_))));
        }
    }

    // Brute-force oracle: scan m upward.
    fn max_m_oracle(p: f64, k: u32, n: u32) -> u64 {
        let h = h_oracle(&[p, 1.0 - p]);
        let coef = p - h / k as f64;
        (0..10_000u64).take_while(|m| coef * *m as f64 <= n as f64 + h).last().unwrap()
    }

    #[test]
    fn multibit_spot_values() {
        assert_eq!(multibit_bound_max_m(0.9, 10, 10).unwrap(), 12);
        assert_eq!(multibit_bound_max_m(0.9, 10, 10).unwrap(), max_m_oracle(0.9, 10, 10));
        assert_eq!(multibit_bound_max_m(0.6, 2, 4).unwrap(), max_m_oracle(0.6, 2, 4));
        assert_eq!(multibit_bound_max_m(0.6, 2, 4).unwrap(), 43);
    }

    #[test]
    fn multibit_rejects_bad_inputs() {
        assert!(matches!(multibit_bound_max_m(0.9, 1, 10), Err(Error::Domain(_))));
        assert!(matches!(multibit_bound_max_m(0.3, 2, 10), Err(Error::VacuousBound(_))));
    }

    #[test]
    fn negative_eigenvalue_is_rejected() {
        let mut m = Matrix::zeros(2, 2);
        m[(0, 0)] = ONE + r(1e-6);
        m[(1, 1)] = r(-1e-6);
        let rho = MixedState::from_parts(vec![2], m);
        assert!(von_neumann_entropy(&rho).is_err());
    }

    fn arb_joint() -> impl Strategy<Value = JointDistribution> {
        proptest::collection::vec(0.01f64..1.0, 6).prop_map(|w| {
            let s: f64 = w.iter().sum();
            JointDistribution::new(w.chunks(3).map(|c| c.iter().map(|x| x / s).collect()).collect()).unwrap()
        })
    }

    fn arb_density(n: usize) -> impl Strategy<Value = MixedState> {
        (any::<u64>(), proptest::collection::vec(0.0f64..1.0, 3)).prop_map(move |(seed, w)| {
            let mut g = crate::rng::seeded(seed);
            let s: f64 = w.iter().sum::<f64>() + 1e-3;
            let members: Vec<(f64, PureState)> = w
                .iter()
                .map(|x| (x / s, crate::qcore::haar_random_pure(&vec![2; n], &mut g).unwrap()))
                .chain(std::iter::once((1e-3 / s, PureState::zeros(n))))
                .collect();
            MixedState::from_ensemble(&members).unwrap()
        })
    }

    proptest! {
        #[test]
        fn chain_rule(j in arb_joint()) {
            let lhs = shannon_entropy(&j.flattened());
            let rhs = shannon_entropy(&j.marginal_y()) + conditional_entropy(&j);
            prop_assert!((lhs - rhs).abs() < 1e-12);
            prop_assert!(mutual_information(&j) >= -1e-12);
        }

        #[test]
        fn entropy_is_bounded_by_log_dim(rho in arb_density(2)) {
            let s = von_neumann_entropy(&rho).unwrap();
            prop_assert!((-1e-12..=2.0 + 1e-12).contains(&s));
        }

        #[test]
        fn holevo_below_average_entropy(a in arb_density(1), b in arb_density(1), p in 0.05f64..0.95) {
            let e = Ensemble::new(vec![(p, a), (1.0 - p, b)]).unwrap();
            let chi = holevo_quantity(&e).unwrap();
            prop_assert!(chi <= von_neumann_entropy(&e.average()).unwrap() + 1e-12);
        }

        #[test]
        fn orthogonal_pure_ensemble_gives_shannon(p in 0.01f64..0.99) {
            let e = Ensemble::new(vec![
                (p, PureState::qubits(1, 0).unwrap().to_density()),
                (1.0 - p, PureState::qubits(1, 1).unwrap().to_density()),
            ]).unwrap();
            prop_assert!((holevo_quantity(&e).unwrap() - binary_entropy(p)).abs() < 1e-12);
        }

        #[test]
        fn nayak_ratio_decreases(a in 0.501f64..1.0, b in 0.501f64..1.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(nayak_ratio(lo).unwrap() >= nayak_ratio(hi).unwrap());
        }
    }
}
