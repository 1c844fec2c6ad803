//! Projective measurements on subsets of subsystems.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;

use super::linalg::{self, r, Matrix, Vector, ONE, ZERO};
use super::state::{MixedState, PureState};
use crate::error::{Error, Result};

pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Complete family of orthogonal projectors `P_k`: `P_j P_k = δ_jk P_k`,
/// `Σ P_k = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement {
    projectors: Vec<Matrix>,
}

/// Outcome index, its probability, and the normalized post-measurement state.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementResult<S> {
    pub outcome: usize,
    pub probability: f64,
    pub post_state: S,
}

impl ProjectiveMeasurement {
    pub fn from_projectors(projectors: Vec<Matrix>) -> Result<Self> {
        let first = projectors.first().ok_or_else(|| Error::IncompleteMeasurement("no projectors".into()))?;
        let d = first.nrows();
        let mut sum = Matrix::zeros(d, d);
        for (j, p) in projectors.iter().enumerate() {
            if p.nrows() != d || p.ncols() != d {
                return Err(Error::Dimension("projectors differ in dimension".into()));
            }
            if linalg::max_abs(&(p * p - p)) > COMPLETENESS_TOL || linalg::hermiticity_defect(p) > COMPLETENESS_TOL {
                return Err(Error::IncompleteMeasurement(format!("element {j} is not a projector")));
            }
            for (k, q) in projectors.iter().enumerate().skip(j + 1) {
                if linalg::max_abs(&(p * q)) > COMPLETENESS_TOL {
                    return Err(Error::IncompleteMeasurement(format!("elements {j} and {k} overlap")));
                }
            }
            sum += p;
        }
        let defect = linalg::max_abs(&(sum - Matrix::identity(d, d)));
        if defect > COMPLETENESS_TOL {
            return Err(Error::IncompleteMeasurement(format!("projectors sum to I only within {defect:e}")));
        }
        Ok(Self { projectors })
    }

    /// Rank-one projectors onto orthonormal `vectors`.
    pub fn from_vectors(vectors: &[Vector]) -> Result<Self> {
        Self::from_projectors(vectors.iter().map(linalg::projector).collect())
    }

    pub fn computational(dim: usize) -> Self {
        let projectors = (0..dim)
            .map(|k| {
                let mut m = Matrix::zeros(dim, dim);
                m[(k, k)] = ONE;
                m
            })
            .collect();
        Self { projectors }
    }

    /// Bell basis in the order Φ+, Φ-, Ψ+, Ψ-.
    pub fn bell() -> Self {
        Self::from_vectors(&bell_vectors()).expect("Bell basis is orthonormal")
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].nrows()
    }

    pub fn projectors(&self) -> &[Matrix] {
        &self.projectors
    }
}

/// Φ+, Φ-, Ψ+, Ψ-.
pub fn bell_vectors() -> [Vector; 4] {
    let s = r(FRAC_1_SQRT_2);
    [
        Vector::from_column_slice(&[s, ZERO, ZERO, s]),
        Vector::from_column_slice(&[s, ZERO, ZERO, -s]),
        Vector::from_column_slice(&[ZERO, s, s, ZERO]),
        Vector::from_column_slice(&[ZERO, s, -s, ZERO]),
    ]
}

fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (k, p) in probs.iter().enumerate() {
        if u < *p {
            return k;
        }
        u -= p;
    }
    probs.iter().rposition(|p| *p > 0.0).unwrap_or(probs.len() - 1)
}

pub(crate) fn sample<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    sample_index(probs, rng)
}

impl PureState {
    /// Outcome probabilities of `m` on `targets`; sums to 1.
    pub fn distribution(&self, m: &ProjectiveMeasurement, targets: &[usize]) -> Result<Vec<f64>> {
        m.projectors.iter().map(|p| Ok(self.apply_raw(targets, p)?.norm_squared())).collect()
    }

    /// Post-state for outcome `k` together with its probability; `None` when
    /// the outcome has zero probability.
    pub fn project(&self, m: &ProjectiveMeasurement, targets: &[usize], k: usize) -> Result<(f64, Option<PureState>)> {
        let p = m.projectors.get(k).ok_or_else(|| Error::Domain(format!("outcome {k} out of range")))?;
        let v = self.apply_raw(targets, p)?;
        let prob = v.norm_squared();
        if prob < 1e-300 {
            return Ok((0.0, None));
        }
        Ok((prob, Some(PureState::normalized(self.dims().to_vec(), v)?)))
    }

    pub fn measure<R: Rng + ?Sized>(
        &self,
        m: &ProjectiveMeasurement,
        targets: &[usize],
        rng: &mut R,
    ) -> Result<MeasurementResult<PureState>> {
        let probs = self.distribution(m, targets)?;
        let outcome = sample_index(&probs, rng);
        let (probability, post) = self.project(m, targets, outcome)?;
        Ok(MeasurementResult { outcome, probability, post_state: post.expect("sampled outcome has support") })
    }
}

impl MixedState {
    pub fn distribution(&self, m: &ProjectiveMeasurement, targets: &[usize]) -> Result<Vec<f64>> {
        m.projectors
            .iter()
            .map(|p| {
                let pr = linalg::apply_local_left(self.matrix(), self.dims(), targets, p)?;
                Ok(pr.trace().re.max(0.0))
            })
            .collect()
    }

    pub fn project(&self, m: &ProjectiveMeasurement, targets: &[usize], k: usize) -> Result<(f64, Option<MixedState>)> {
        let p = m.projectors.get(k).ok_or_else(|| Error::Domain(format!("outcome {k} out of range")))?;
        let post = linalg::conjugate_local(self.matrix(), self.dims(), targets, p)?;
        let prob = post.trace().re;
        if prob < 1e-300 {
            return Ok((0.0, None));
        }
        Ok((prob, Some(MixedState::from_parts(self.dims().to_vec(), post / r(prob)))))
    }

    pub fn measure<R: Rng + ?Sized>(
        &self,
        m: &ProjectiveMeasurement,
        targets: &[usize],
        rng: &mut R,
    ) -> Result<MeasurementResult<MixedState>> {
        let probs = self.distribution(m, targets)?;
        let outcome = sample_index(&probs, rng);
        let (probability, post) = self.project(m, targets, outcome)?;
        Ok(MeasurementResult { outcome, probability, post_state: post.expect("sampled outcome has support") })
    }

    /// Non-selective measurement: `Σ P_k ρ P_k`.
    pub fn dephase(&self, m: &ProjectiveMeasurement, targets: &[usize]) -> Result<MixedState> {
        let mut acc = Matrix::zeros(self.dim(), self.dim());
        for p in &m.projectors {
            acc += linalg::conjugate_local(self.matrix(), self.dims(), targets, p)?;
        }
        Ok(MixedState::from_parts(self.dims().to_vec(), acc))
    }
}
