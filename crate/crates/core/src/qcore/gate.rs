//! Unitary gates on named subsystems.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::Serialize;

use super::linalg::{self, c, cis, r, Matrix, I, ONE, ZERO};
use crate::error::{Error, Result};
use crate::network::NodeLabel;

pub const UNITARY_TOL: f64 = 1e-10;

/// Rotation axis on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Gate identity, used for resource accounting and display.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum GateKind {
    I,
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Cnot,
    Cz,
    Swap,
    Rotation(Axis, f64),
    /// `diag(1, e^{iφ})`.
    Phase(f64),
    /// Controlled `diag(1, e^{iφ})`.
    ControlledPhase(f64),
    Custom(String),
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::Rotation(a, t) => write!(f, "R{a:?}({t})"),
            GateKind::Phase(p) => write!(f, "P({p})"),
            GateKind::ControlledPhase(p) => write!(f, "CP({p})"),
            GateKind::Custom(n) => write!(f, "{n}"),
            other => write!(f, "{other:?}"),
        }
    }
}

/// A unitary acting on `targets`; the first target is the most significant
/// factor of `matrix`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    matrix: Matrix,
    targets: Vec<usize>,
    node: Option<NodeLabel>,
}

pub mod matrices {
    //! Standard single- and two-qubit matrices.
    use super::*;

    pub fn identity(d: usize) -> Matrix {
        Matrix::identity(d, d)
    }

    pub fn h() -> Matrix {
        let s = r(FRAC_1_SQRT_2);
        linalg::matrix(2, 2, &[s, s, s, -s])
    }

    pub fn x() -> Matrix {
        linalg::matrix(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> Matrix {
        linalg::matrix(2, 2, &[ZERO, -I, I, ZERO])
    }

    pub fn z() -> Matrix {
        linalg::matrix(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    pub fn phase(phi: f64) -> Matrix {
        linalg::matrix(2, 2, &[ONE, ZERO, ZERO, cis(phi)])
    }

    pub fn cnot() -> Matrix {
        controlled(&x())
    }

    pub fn cz() -> Matrix {
        controlled(&z())
    }

    pub fn swap() -> Matrix {
        let mut m = Matrix::zeros(4, 4);
        m[(0, 0)] = ONE;
        m[(1, 2)] = ONE;
        m[(2, 1)] = ONE;
        m[(3, 3)] = ONE;
        m
    }

    /// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ u`.
    pub fn controlled(u: &Matrix) -> Matrix {
        let d = u.nrows();
        let mut m = Matrix::identity(2 * d, 2 * d);
        m.view_mut((d, d), (d, d)).copy_from(u);
        m
    }

    /// `exp(-i θ σ/2)` for the Pauli matrix `σ` along `axis`.
    pub fn rotation(axis: Axis, theta: f64) -> Matrix {
        let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        match axis {
            Axis::X => linalg::matrix(2, 2, &[r(co), c(0.0, -si), c(0.0, -si), r(co)]),
            Axis::Y => linalg::matrix(2, 2, &[r(co), r(-si), r(si), r(co)]),
            Axis::Z => linalg::matrix(2, 2, &[cis(-theta / 2.0), ZERO, ZERO, cis(theta / 2.0)]),
        }
    }

    /// `|m⟩ → |m+1 mod d⟩`.
    pub fn shift(d: usize) -> Matrix {
        let mut m = Matrix::zeros(d, d);
        for k in 0..d {
            m[((k + 1) % d, k)] = ONE;
        }
        m
    }
}

impl Gate {
    fn std(kind: GateKind, matrix: Matrix, targets: Vec<usize>) -> Self {
        Self { kind, matrix, targets, node: None }
    }

    /// Arbitrary unitary; rejects non-unitary matrices.
    pub fn custom(name: impl Into<String>, matrix: Matrix, targets: Vec<usize>) -> Result<Self> {
        let defect = linalg::unitarity_defect(&matrix);
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        if targets.is_empty() {
            return Err(Error::InvalidSubsystems("gate without targets".into()));
        }
        Ok(Self::std(GateKind::Custom(name.into()), matrix, targets))
    }

    pub fn h(q: usize) -> Self {
        Self::std(GateKind::H, matrices::h(), vec![q])
    }
    pub fn x(q: usize) -> Self {
        Self::std(GateKind::X, matrices::x(), vec![q])
    }
    pub fn y(q: usize) -> Self {
        Self::std(GateKind::Y, matrices::y(), vec![q])
    }
    pub fn z(q: usize) -> Self {
        Self::std(GateKind::Z, matrices::z(), vec![q])
    }
    pub fn s(q: usize) -> Self {
        Self::std(GateKind::S, matrices::phase(std::f64::consts::FRAC_PI_2), vec![q])
    }
    pub fn sdg(q: usize) -> Self {
        Self::std(GateKind::Sdg, matrices::phase(-std::f64::consts::FRAC_PI_2), vec![q])
    }
    pub fn t(q: usize) -> Self {
        Self::std(GateKind::T, matrices::phase(std::f64::consts::FRAC_PI_4), vec![q])
    }
    pub fn tdg(q: usize) -> Self {
        Self::std(GateKind::Tdg, matrices::phase(-std::f64::consts::FRAC_PI_4), vec![q])
    }
    pub fn phase(q: usize, phi: f64) -> Self {
        Self::std(GateKind::Phase(phi), matrices::phase(phi), vec![q])
    }
    pub fn rotation(axis: Axis, q: usize, theta: f64) -> Self {
        Self::std(GateKind::Rotation(axis, theta), matrices::rotation(axis, theta), vec![q])
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Self::std(GateKind::Cnot, matrices::cnot(), vec![control, target])
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::std(GateKind::Cz, matrices::cz(), vec![a, b])
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Self::std(GateKind::Swap, matrices::swap(), vec![a, b])
    }
    pub fn cphase(control: usize, target: usize, phi: f64) -> Self {
        Self::std(GateKind::ControlledPhase(phi), matrices::controlled(&matrices::phase(phi)), vec![control, target])
    }

    /// Cyclic shift on a `d`-level subsystem.
    pub fn qudit_shift(d: usize, target: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("qudit dimension {d} < 2")));
        }
        Ok(Self::std(GateKind::Custom(format!("X{d}")), matrices::shift(d), vec![target]))
    }

    /// Attaches the executing node.
    pub fn at(mut self, node: NodeLabel) -> Self {
        self.node = Some(node);
        self
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }
    pub fn node(&self) -> Option<&NodeLabel> {
        self.node.as_ref()
    }
    pub fn arity(&self) -> usize {
        self.targets.len()
    }

    pub fn dagger(&self) -> Gate {
        let kind = match &self.kind {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::Rotation(a, t) => GateKind::Rotation(*a, -t),
            GateKind::Phase(p) => GateKind::Phase(-p),
            GateKind::ControlledPhase(p) => GateKind::ControlledPhase(-p),
            GateKind::Custom(n) => GateKind::Custom(format!("{n}†")),
            k => k.clone(),
        };
        Gate { kind, matrix: self.matrix.adjoint(), targets: self.targets.clone(), node: self.node.clone() }
    }

    /// Same gate on different subsystems.
    pub fn retarget(&self, targets: Vec<usize>) -> Result<Gate> {
        if targets.len() != self.targets.len() {
            return Err(Error::InvalidSubsystems("retarget changes arity".into()));
        }
        Ok(Gate { targets, ..self.clone() })
    }
}

/// `exp(-i θ σ/2)` about `axis`.
pub fn rotation(axis: Axis, theta: f64) -> Matrix {
    matrices::rotation(axis, theta)
}

/// Cyclic shift `|m⟩ → |m+1 mod d⟩`; errors for `d < 2`.
pub fn qudit_shift(d: usize) -> Result<Matrix> {
    if d < 2 {
        return Err(Error::Domain(format!("qudit dimension {d} < 2")));
    }
    Ok(matrices::shift(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_gates_are_unitary() {
        for g in [
            Gate::h(0),
            Gate::x(0),
            Gate::y(0),
            Gate::z(0),
            Gate::s(0),
            Gate::t(0),
            Gate::cnot(0, 1),
            Gate::cz(0, 1),
            Gate::swap(0, 1),
            Gate::cphase(0, 1, 0.3),
            Gate::rotation(Axis::X, 0, 1.1),
            Gate::rotation(Axis::Y, 0, 1.1),
            Gate::rotation(Axis::Z, 0, 1.1),
        ] {
            assert!(linalg::unitarity_defect(g.matrix()) < 1e-12, "{}", g.kind());
        }
    }

    #[test]
    fn non_unitary_custom_is_rejected() {
        let m = linalg::matrix(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(Gate::custom("bad", m, vec![0]), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn shift_cycles_levels() {
        let s = qudit_shift(3).unwrap();
        assert_eq!(s[(1, 0)], ONE);
        assert_eq!(s[(2, 1)], ONE);
        assert_eq!(s[(0, 2)], ONE);
        assert!(qudit_shift(1).is_err());
    }

    #[test]
    fn rotation_inverse_is_negated_angle() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let p = rotation(axis, 0.7) * rotation(axis, -0.7);
            assert!(linalg::max_abs(&(p - Matrix::identity(2, 2))) < 1e-12);
        }
    }

    #[test]
    fn rotation_by_pi_about_x_sends_zero_to_minus_i_one() {
        let m = rotation(Axis::X, std::f64::consts::PI);
        assert!((m[(1, 0)] - c(0.0, -1.0)).norm() < 1e-12);
        assert!(m[(0, 0)].norm() < 1e-12);
    }

    #[test]
    fn dagger_inverts() {
        let g = Gate::t(0);
        let p = g.matrix() * g.dagger().matrix();
        assert!(linalg::max_abs(&(p - Matrix::identity(2, 2))) < 1e-12);
        assert_eq!(g.dagger().kind(), &GateKind::Tdg);
    }
}
