//! Pure and mixed states over arbitrary subsystem dimensions.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::gate::Gate;
use super::linalg::{self, Matrix, Vector, C64, ONE};
use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

fn check_dims(dims: &[usize], len: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Dimension(format!("invalid subsystem dimensions {dims:?}")));
    }
    if linalg::total_dim(dims) != len {
        return Err(Error::Dimension(format!(
            "dims {dims:?} span {} but data has length {len}",
            linalg::total_dim(dims)
        )));
    }
    Ok(())
}

/// Normalized state vector. `‖amplitudes‖ = 1` within `NORM_TOL`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: Vector,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amplitudes: Vector) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let n = amplitudes.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(dims: Vec<usize>, amplitudes: Vector) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let n = amplitudes.norm();
        if n < 1e-300 || !n.is_finite() {
            return Err(Error::Degenerate("zero vector cannot be normalized".into()));
        }
        Ok(Self { dims, amplitudes: amplitudes / linalg::r(n) })
    }

    pub fn from_amplitudes(dims: Vec<usize>, amplitudes: &[C64]) -> Result<Self> {
        Self::new(dims, Vector::from_column_slice(amplitudes))
    }

    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let total = linalg::total_dim(&dims);
        if index >= total {
            return Err(Error::Domain(format!("basis index {index} >= dimension {total}")));
        }
        let mut v = Vector::zeros(total);
        v[index] = ONE;
        Self::new(dims, v)
    }

    /// `|0…0⟩` on `n` qubits.
    pub fn zeros(n: usize) -> Self {
        Self::basis(vec![2; n.max(1)], 0).expect("valid basis state")
    }

    /// Computational basis state of `n` qubits with label `index`
    /// (qubit 0 is the most significant bit).
    pub fn qubits(n: usize, index: usize) -> Result<Self> {
        Self::basis(vec![2; n], index)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Vector {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dims != other.dims {
            return Err(Error::Dimension(format!("{:?} vs {:?}", self.dims, other.dims)));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureState { dims, amplitudes: linalg::kron_vec(&self.amplitudes, &other.amplitudes) }
    }

    pub fn apply(&self, gate: &Gate) -> Result<PureState> {
        let amplitudes = linalg::apply_local_vec(&self.amplitudes, &self.dims, gate.targets(), gate.matrix())?;
        Ok(PureState { dims: self.dims.clone(), amplitudes })
    }

    /// Applies an arbitrary (possibly non-unitary) local operator without
    /// renormalizing.
    pub(crate) fn apply_raw(&self, targets: &[usize], op: &Matrix) -> Result<Vector> {
        linalg::apply_local_vec(&self.amplitudes, &self.dims, targets, op)
    }

    pub fn to_density(&self) -> MixedState {
        MixedState { dims: self.dims.clone(), matrix: linalg::projector(&self.amplitudes) }
    }

    /// Reduced state on `keep`, in ascending subsystem order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<MixedState> {
        let (matrix, dims) = linalg::partial_trace_vec(&self.amplitudes, &self.dims, keep)?;
        Ok(MixedState { dims, matrix })
    }

    /// Reorders subsystems: new subsystem `k` is old subsystem `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Result<PureState> {
        let (map, dims) = linalg::permutation_map(&self.dims, order)?;
        let amplitudes = Vector::from_iterator(map.len(), map.iter().map(|&o| self.amplitudes[o]));
        Ok(PureState { dims, amplitudes })
    }

    pub fn with_global_phase(&self, phase: f64) -> PureState {
        PureState { dims: self.dims.clone(), amplitudes: &self.amplitudes * linalg::cis(phase) }
    }
}

/// Density matrix: Hermitian within `HERMITIAN_TOL`, unit trace within
/// `TRACE_TOL`, eigenvalues above `-PSD_TOL`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    dims: Vec<usize>,
    matrix: Matrix,
}

impl MixedState {
    pub fn new(dims: Vec<usize>, matrix: Matrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension("density matrix must be square".into()));
        }
        check_dims(&dims, matrix.nrows())?;
        let h = linalg::hermiticity_defect(&matrix);
        if h > HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (defect {h:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = linalg::hermitian_eigenvalues(&matrix).first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { dims, matrix })
    }

    /// Trusted constructor for matrices produced by trace-preserving maps.
    pub(crate) fn from_parts(dims: Vec<usize>, matrix: Matrix) -> Self {
        Self { dims, matrix }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let d = linalg::total_dim(&dims);
        check_dims(&dims, d)?;
        Ok(Self { dims, matrix: Matrix::identity(d, d) / linalg::r(d as f64) })
    }

    /// `Σ p_i |ψ_i⟩⟨ψ_i|`; weights must be non-negative and sum to 1.
    pub fn from_ensemble(ensemble: &[(f64, PureState)]) -> Result<Self> {
        let first = ensemble.first().ok_or_else(|| Error::Degenerate("empty ensemble".into()))?;
        let dims = first.1.dims.clone();
        let d = first.1.dim();
        let mut m = Matrix::zeros(d, d);
        for (p, s) in ensemble {
            if s.dims != dims {
                return Err(Error::Dimension("ensemble members differ in dimension".into()));
            }
            if *p < 0.0 {
                return Err(Error::Domain(format!("negative weight {p}")));
            }
            m += linalg::projector(&s.amplitudes) * linalg::r(*p);
        }
        Self::new(dims, m)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn tensor(&self, other: &MixedState) -> MixedState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        MixedState { dims, matrix: linalg::kron(&self.matrix, &other.matrix) }
    }

    pub fn apply(&self, gate: &Gate) -> Result<MixedState> {
        self.conjugate(gate.targets(), gate.matrix())
    }

    /// `O ρ O†` with `O` acting on `targets`.
    pub fn conjugate(&self, targets: &[usize], op: &Matrix) -> Result<MixedState> {
        let matrix = linalg::conjugate_local(&self.matrix, &self.dims, targets, op)?;
        Ok(MixedState { dims: self.dims.clone(), matrix })
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<MixedState> {
        let (matrix, dims) = linalg::partial_trace_matrix(&self.matrix, &self.dims, keep)?;
        Ok(MixedState { dims, matrix })
    }

    pub fn permute(&self, order: &[usize]) -> Result<MixedState> {
        let (map, dims) = linalg::permutation_map(&self.dims, order)?;
        let n = map.len();
        let matrix = Matrix::from_fn(n, n, |i, j| self.matrix[(map[i], map[j])]);
        Ok(MixedState { dims, matrix })
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, psi: &PureState) -> Result<f64> {
        if psi.dims != self.dims {
            return Err(Error::Dimension(format!("{:?} vs {:?}", psi.dims, self.dims)));
        }
        Ok((psi.amplitudes.adjoint() * &self.matrix * &psi.amplitudes)[(0, 0)].re)
    }
}

/// Either kind of state, for operations that accept both.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(PureState),
    Mixed(MixedState),
}

impl State {
    pub fn dims(&self) -> &[usize] {
        match self {
            State::Pure(p) => p.dims(),
            State::Mixed(m) => m.dims(),
        }
    }

    pub fn to_density(&self) -> MixedState {
        match self {
            State::Pure(p) => p.to_density(),
            State::Mixed(m) => m.clone(),
        }
    }

    /// Tensor product of two states of the same kind.
    pub fn tensor(&self, other: &State) -> Result<State> {
        match (self, other) {
            (State::Pure(a), State::Pure(b)) => Ok(State::Pure(a.tensor(b))),
            (State::Mixed(a), State::Mixed(b)) => Ok(State::Mixed(a.tensor(b))),
            _ => Err(Error::MixedKinds),
        }
    }

    pub fn apply(&self, gate: &Gate) -> Result<State> {
        Ok(match self {
            State::Pure(p) => State::Pure(p.apply(gate)?),
            State::Mixed(m) => State::Mixed(m.apply(gate)?),
        })
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<MixedState> {
        match self {
            State::Pure(p) => p.partial_trace(keep),
            State::Mixed(m) => m.partial_trace(keep),
        }
    }
}

impl From<PureState> for State {
    fn from(p: PureState) -> Self {
        State::Pure(p)
    }
}

impl From<MixedState> for State {
    fn from(m: MixedState) -> Self {
        State::Mixed(m)
    }
}

/// Fidelity in the squared convention: `|⟨a|b⟩|²` for pure states,
/// `⟨ψ|ρ|ψ⟩` for pure against mixed, `(Tr √(√ρ σ √ρ))²` for two mixed states.
pub fn fidelity(a: &State, b: &State) -> Result<f64> {
    match (a, b) {
        (State::Pure(x), State::Pure(y)) => Ok(x.inner(y)?.norm_sqr()),
        (State::Pure(x), State::Mixed(m)) | (State::Mixed(m), State::Pure(x)) => m.expectation(x),
        (State::Mixed(x), State::Mixed(y)) => {
            if x.dims != y.dims {
                return Err(Error::Dimension(format!("{:?} vs {:?}", x.dims, y.dims)));
            }
            let s = linalg::psd_sqrt(&x.matrix);
            let inner = &s * &y.matrix * &s;
            let tr: f64 = linalg::hermitian_eigenvalues(&inner).iter().map(|v| v.max(0.0).sqrt()).sum();
            Ok(tr * tr)
        }
    }
}

/// `½ Tr|ρ - σ|`.
pub fn trace_distance(a: &State, b: &State) -> Result<f64> {
    let (x, y) = (a.to_density(), b.to_density());
    if x.dims != y.dims {
        return Err(Error::Dimension(format!("{:?} vs {:?}", x.dims, y.dims)));
    }
    let diff = &x.matrix - &y.matrix;
    Ok(0.5 * linalg::hermitian_eigenvalues(&diff).iter().map(|v| v.abs()).sum::<f64>())
}

/// True iff `|⟨a|b⟩| ≥ 1 - tol`.
pub fn equal_up_to_phase(a: &PureState, b: &PureState, tol: f64) -> bool {
    a.inner(b).map(|z| z.norm() >= 1.0 - tol).unwrap_or(false)
}

/// Haar-random pure state: i.i.d. complex Gaussian amplitudes, normalized.
pub fn haar_random_pure<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<PureState> {
    let d = linalg::total_dim(dims);
    check_dims(dims, d)?;
    let v = Vector::from_iterator(d, (0..d).map(|_| linalg::c(rng.sample(StandardNormal), rng.sample(StandardNormal))));
    PureState::normalized(dims.to_vec(), v)
}

/// Serializable summary of a density matrix.
#[derive(Debug, Clone, Serialize)]
pub struct DensitySummary {
    pub dims: Vec<usize>,
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
}

impl From<&MixedState> for DensitySummary {
    fn from(m: &MixedState) -> Self {
        let n = m.dim();
        let clean = |x: f64| if x.abs() < 1e-15 { 0.0 } else { x };
        Self {
            dims: m.dims.clone(),
            real: (0..n).map(|i| (0..n).map(|j| clean(m.matrix[(i, j)].re)).collect()).collect(),
            imag: (0..n).map(|i| (0..n).map(|j| clean(m.matrix[(i, j)].im)).collect()).collect(),
        }
    }
}
