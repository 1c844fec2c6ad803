//! Truncated Fock-space states for photonic ballot encodings.
//!
//! Modes are truncated at level `N`; a two-mode state stores `(N+1)²`
//! amplitudes with the first mode as the major index. Truncation adequacy
//! (level-`N` amplitude below [`TRUNCATION_TOL`]) is checked, never assumed.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::linalg::{self, cis, r, Matrix, Vector, C64};

pub const TRUNCATION_TOL: f64 = 1e-6;
pub const DEFAULT_CUTOFF: usize = 40;
pub const DEFAULT_TAU: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct FockMode {
    cutoff: usize,
    modes: usize,
    amplitudes: Vector,
}

impl FockMode {
    /// Normalizes `amplitudes`; errors on zero norm.
    pub fn new(cutoff: usize, modes: usize, amplitudes: Vector) -> Result<Self> {
        if !(1..=2).contains(&modes) || amplitudes.len() != (cutoff + 1).pow(modes as u32) {
            return Err(Error::Dimension(format!(
                "{} amplitudes for {modes} modes at cutoff {cutoff}",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        if norm < 1e-300 {
            return Err(Error::Degenerate("zero-norm Fock state".into()));
        }
        Ok(Self { cutoff, modes, amplitudes: amplitudes / r(norm) })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn amplitudes(&self) -> &Vector {
        &self.amplitudes
    }

    pub fn amplitude(&self, n: usize) -> C64 {
        self.amplitudes[n]
    }

    /// Two-mode amplitude `⟨n, m|ψ⟩`.
    pub fn amplitude2(&self, n: usize, m: usize) -> C64 {
        self.amplitudes[n * (self.cutoff + 1) + m]
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn mean_photon_number(&self) -> f64 {
        assert_eq!(self.modes, 1, "single-mode quantity");
        self.probabilities().iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    pub fn tensor(&self, other: &FockMode) -> Result<FockMode> {
        if self.modes != 1 || other.modes != 1 || self.cutoff != other.cutoff {
            return Err(Error::Dimension("tensor needs two single modes at equal cutoff".into()));
        }
        Ok(Self { cutoff: self.cutoff, modes: 2, amplitudes: linalg::kron_vec(&self.amplitudes, &other.amplitudes) })
    }

    pub fn inner(&self, other: &FockMode) -> Result<C64> {
        if self.modes != other.modes || self.cutoff != other.cutoff {
            return Err(Error::Dimension("inner product of mismatched Fock spaces".into()));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|⟨a|b⟩|²`.
    pub fn fidelity(&self, other: &FockMode) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Largest amplitude magnitude on any level-`N` state of any mode.
    pub fn edge_amplitude(&self) -> f64 {
        let n = self.cutoff + 1;
        match self.modes {
            1 => self.amplitudes[self.cutoff].norm(),
            _ => (0..n)
                .flat_map(|k| [self.amplitude2(k, self.cutoff).norm(), self.amplitude2(self.cutoff, k).norm()])
                .fold(0.0, f64::max),
        }
    }

    pub fn check_truncation(&self) -> Result<()> {
        let edge = self.edge_amplitude();
        if edge >= TRUNCATION_TOL {
            return Err(Error::Truncation { level: self.cutoff, amplitude: edge });
        }
        Ok(())
    }
}

/// Unnormalized `e^{-|α|²/2} αⁿ/√n!` for `n ≤ N`, computed by recurrence.
fn coherent_amplitudes(alpha: C64, cutoff: usize) -> Vector {
    let mut v = Vector::zeros(cutoff + 1);
    v[0] = r((-alpha.norm_sqr() / 2.0).exp());
    for n in 1..=cutoff {
        v[n] = v[n - 1] * alpha / r((n as f64).sqrt());
    }
    v
}

fn check_coherent(alpha: C64, cutoff: usize) -> Result<()> {
    let edge = coherent_amplitudes(alpha, cutoff)[cutoff].norm();
    if edge >= TRUNCATION_TOL {
        return Err(Error::Truncation { level: cutoff, amplitude: edge });
    }
    Ok(())
}

/// Smallest cutoff, at least [`DEFAULT_CUTOFF`], adequate for `|α|`.
pub fn cutoff_for(alpha: f64) -> usize {
    let mut n = DEFAULT_CUTOFF;
    while check_coherent(r(alpha), n).is_err() {
        n += 8;
    }
    n
}

pub fn coherent(alpha: C64, cutoff: usize) -> Result<FockMode> {
    check_coherent(alpha, cutoff)?;
    FockMode::new(cutoff, 1, coherent_amplitudes(alpha, cutoff))
}

/// `Σ_s e^{-2πi rs/d} |ω^s α⟩` with `ω = e^{2πi/d}`, normalized. Supported
/// on levels `n ≡ r (mod d)`.
pub fn cat(alpha: C64, legs: usize, index: usize, cutoff: usize) -> Result<FockMode> {
    if legs < 2 || index >= legs {
        return Err(Error::Domain(format!("cat index {index} with {legs} legs")));
    }
    check_coherent(alpha, cutoff)?;
    let d = legs as f64;
    let sum = (0..legs).fold(Vector::zeros(cutoff + 1), |acc, s| {
        let leg = coherent_amplitudes(alpha * cis(2.0 * PI * s as f64 / d), cutoff);
        acc + leg * cis(-2.0 * PI * (index * s) as f64 / d)
    });
    // Components cancel to rounding noise off the residue class.
    let cleaned = Vector::from_iterator(
        cutoff + 1,
        sum.iter().enumerate().map(|(n, a)| if n % legs == index { *a } else { C64::new(0.0, 0.0) }),
    );
    FockMode::new(cutoff, 1, cleaned)
        .map_err(|_| Error::Degenerate(format!("cat state of index {index} vanishes at alpha = {alpha}")))
}

/// `√(1-λ²) Σ_n λⁿ |n⟩|n⟩`.
pub fn two_mode_squeezed_vacuum(lambda: f64, cutoff: usize) -> Result<FockMode> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::Domain(format!("squeezing parameter {lambda} outside [0, 1)")));
    }
    let n = cutoff + 1;
    let norm = (1.0 - lambda * lambda).sqrt();
    let mut v = Vector::zeros(n * n);
    for k in 0..n {
        v[k * n + k] = r(norm * lambda.powi(k as i32));
    }
    let edge = v[cutoff * n + cutoff].norm();
    if edge >= TRUNCATION_TOL {
        return Err(Error::Truncation { level: cutoff, amplitude: edge });
    }
    FockMode::new(cutoff, 2, v)
}

/// `a` on a single mode, unnormalized.
fn annihilate(v: &Vector) -> Vector {
    let mut out = Vector::zeros(v.len());
    for n in 1..v.len() {
        out[n - 1] = v[n] * r((n as f64).sqrt());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Subtraction {
    /// Apply `a` and renormalize.
    Ideal,
    /// Beam splitter `exp[τ(a b† - a† b)]` with vacuum in `b`, heralded on
    /// one photon in `b`.
    BeamSplitter { tau: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Heralded {
    pub state: FockMode,
    /// Herald probability; 1 for the ideal method.
    pub probability: f64,
}

/// `exp(τ T_M)` on the block of total photon number `M`, basis
/// `|M-k⟩_a |k⟩_b` for `k = 0..=M`.
fn beam_splitter_block(total: usize, tau: f64) -> Matrix {
    let size = total + 1;
    // T is real antisymmetric, so H = iT is Hermitian and exp(τT) = exp(-iτH).
    let mut h = Matrix::zeros(size, size);
    for k in 0..total {
        let g = (((total - k) * (k + 1)) as f64).sqrt();
        h[(k + 1, k)] = C64::new(0.0, g);
        h[(k, k + 1)] = C64::new(0.0, -g);
    }
    let (values, vectors) = linalg::hermitian_eigen(&h);
    let phases = Matrix::from_diagonal(&Vector::from_iterator(size, values.iter().map(|l| cis(-tau * l))));
    &vectors * phases * vectors.adjoint()
}

pub fn photon_subtract(mode: &FockMode, method: Subtraction) -> Result<Heralded> {
    if mode.modes != 1 {
        return Err(Error::Dimension("photon subtraction acts on a single mode".into()));
    }
    let v = mode.amplitudes();
    let (out, probability) = match method {
        Subtraction::Ideal => (annihilate(v), 1.0),
        Subtraction::BeamSplitter { tau } => {
            let mut out = Vector::zeros(v.len());
            for m in 1..v.len() {
                // |m⟩_a|0⟩_b is column k = 0; the herald selects row k = 1.
                out[m - 1] = v[m] * beam_splitter_block(m, tau)[(1, 0)];
            }
            let p = out.norm_squared();
            (out, p)
        }
    };
    if out.norm() < 1e-300 {
        return Err(Error::Degenerate("photon subtraction from the vacuum".into()));
    }
    Ok(Heralded { state: FockMode::new(mode.cutoff, 1, out)?, probability })
}

/// Samples the herald click; `None` when no photon is detected.
pub fn photon_subtract_sampled<R: Rng + ?Sized>(
    mode: &FockMode,
    method: Subtraction,
    rng: &mut R,
) -> Result<Option<Heralded>> {
    let h = photon_subtract(mode, method)?;
    Ok((rng.random::<f64>() < h.probability).then_some(h))
}

/// Fidelity between the normalized cat-encoded ballot `Σ_r |cat_r^α⟩|cat_r^β⟩`
/// and the normalized coherent superposition `Σ_s |ω^s α⟩|ω^{-s} β⟩`.
pub fn cat_ballot_fidelity(alpha: f64, beta: f64, legs: usize, cutoff: usize) -> Result<f64> {
    if legs < 2 {
        return Err(Error::Domain(format!("{legs} legs")));
    }
    let (a, b) = (r(alpha), r(beta));
    let mut cats = Vector::zeros((cutoff + 1).pow(2));
    for idx in 0..legs {
        let pair = cat(a, legs, idx, cutoff)?.tensor(&cat(b, legs, idx, cutoff)?)?;
        cats += pair.amplitudes();
    }
    let d = legs as f64;
    let mut coh = Vector::zeros((cutoff + 1).pow(2));
    for s in 0..legs {
        let w = 2.0 * PI * s as f64 / d;
        coh += linalg::kron_vec(&coherent_amplitudes(a * cis(w), cutoff), &coherent_amplitudes(b * cis(-w), cutoff));
    }
    let left = FockMode::new(cutoff, 2, cats)?;
    let right = FockMode::new(cutoff, 2, coh)?;
    left.fidelity(&right)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RailDevice {
    /// Rail `j` feeds rail `j+1 mod d`.
    Yes,
    /// Straight-through wiring.
    No,
}

/// The device's action on `d` rails, each holding 0 or 1 photons; rail 0 is
/// the most significant occupation bit.
pub fn rail_unitary(d: usize, device: RailDevice) -> Matrix {
    let dim = 1usize << d;
    let mut u = Matrix::zeros(dim, dim);
    for occ in 0..dim {
        let mut image = 0usize;
        for j in 0..d {
            if occ >> (d - 1 - j) & 1 == 1 {
                let target = match device {
                    RailDevice::Yes => (j + 1) % d,
                    RailDevice::No => j,
                };
                image |= 1 << (d - 1 - target);
            }
        }
        u[(image, occ)] = r(1.0);
    }
    u
}

/// Restriction of the rail unitary to the single-photon subspace, with the
/// photon in rail `j` identified with qudit level `j`.
pub fn rail_qudit_operator(d: usize, device: RailDevice) -> Matrix {
    let u = rail_unitary(d, device);
    let level = |j: usize| 1usize << (d - 1 - j);
    Matrix::from_fn(d, d, |a, b| u[(level(a), level(b))])
}

/// True when the YES wiring equals the qudit shift on the single-photon
/// subspace and leaves that subspace invariant.
pub fn multimode_shift_check(d: usize) -> Result<bool> {
    let shift = crate::qcore::qudit_shift(d)?;
    let restricted = rail_qudit_operator(d, RailDevice::Yes);
    let preserved = (0..d).all(|j| {
        let u = rail_unitary(d, RailDevice::Yes);
        u.column(1 << (d - 1 - j)).iter().enumerate().all(|(row, a)| a.norm() == 0.0 || row.count_ones() == 1)
    });
    Ok(preserved && linalg::max_abs(&(restricted - shift)) < 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tmsv_joint_probabilities() {
        let lambda: f64 = 0.5;
        let s = two_mode_squeezed_vacuum(lambda, DEFAULT_CUTOFF).unwrap();
        for n in 0..=10 {
            let expect = (1.0 - lambda * lambda) * lambda.powi(2 * n as i32);
            assert!((s.amplitude2(n, n).norm_sqr() - expect).abs() < 1e-9);
            if n > 0 {
                assert_eq!(s.amplitude2(n, n - 1).norm(), 0.0);
            }
        }
        assert!(two_mode_squeezed_vacuum(1.0, 10).is_err());
        assert!(matches!(two_mode_squeezed_vacuum(0.9, 10), Err(Error::Truncation { .. })));
    }

    #[test]
    fn two_legged_cats_are_orthogonal() {
        let even = cat(r(2.0), 2, 0, DEFAULT_CUTOFF).unwrap();
        let odd = cat(r(2.0), 2, 1, DEFAULT_CUTOFF).unwrap();
        assert_eq!(even.inner(&odd).unwrap().norm(), 0.0);
    }

    #[test]
    fn three_legged_cats_live_on_residue_classes() {
        let cats: Vec<FockMode> = (0..3).map(|k| cat(r(2.0), 3, k, DEFAULT_CUTOFF).unwrap()).collect();
        for (k, c) in cats.iter().enumerate() {
            for (n, p) in c.probabilities().iter().enumerate() {
                if n % 3 != k {
                    assert_eq!(*p, 0.0);
                }
            }
            for other in &cats[k + 1..] {
                assert!(c.inner(other).unwrap().norm() < 1e-10);
            }
        }
    }

    #[test]
    fn cat_matches_projected_coherent_state() {
        // independent oracle: the residue-class projection of |α⟩
        let alpha = C64::new(1.3, 0.4);
        let coh = coherent(alpha, DEFAULT_CUTOFF).unwrap();
        for k in 0..3 {
            let c = cat(alpha, 3, k, DEFAULT_CUTOFF).unwrap();
            let proj = Vector::from_iterator(
                DEFAULT_CUTOFF + 1,
                coh.amplitudes().iter().enumerate().map(|(n, a)| if n % 3 == k { *a } else { r(0.0) }),
            );
            let proj = FockMode::new(DEFAULT_CUTOFF, 1, proj).unwrap();
            assert!((c.fidelity(&proj).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn truncation_is_asserted() {
        assert!(matches!(coherent(r(6.0), 20), Err(Error::Truncation { level: 20, .. })));
        assert!(coherent(r(2.5), DEFAULT_CUTOFF).unwrap().check_truncation().is_ok());
        assert!(cutoff_for(4.0) > DEFAULT_CUTOFF);
    }

    #[test]
    fn ideal_subtraction_on_fock_and_cat() {
        let one = FockMode::new(3, 1, Vector::from_column_slice(&[r(0.0), r(1.0), r(0.0), r(0.0)])).unwrap();
        let h = photon_subtract(&one, Subtraction::Ideal).unwrap();
        assert_eq!(h.state.amplitude(0), r(1.0));
        let vacuum = FockMode::new(3, 1, Vector::from_column_slice(&[r(1.0), r(0.0), r(0.0), r(0.0)])).unwrap();
        assert!(matches!(photon_subtract(&vacuum, Subtraction::Ideal), Err(Error::Degenerate(_))));

        let even = cat(r(2.0), 2, 0, DEFAULT_CUTOFF).unwrap();
        let odd = cat(r(2.0), 2, 1, DEFAULT_CUTOFF).unwrap();
        let out = photon_subtract(&even, Subtraction::Ideal).unwrap().state;
        assert!(out.fidelity(&odd).unwrap() >= 1.0 - 1e-6);
    }

    #[test]
    fn beam_splitter_block_matches_closed_form() {
        // ⟨m-1, 1| B(τ) |m, 0⟩ = √m cos^{m-1}τ sin τ
        let tau: f64 = 0.3;
        for m in 1..12usize {
            let got = beam_splitter_block(m, tau)[(1, 0)];
            let expect = (m as f64).sqrt() * tau.cos().powi(m as i32 - 1) * tau.sin();
            assert!((got - r(expect)).norm() < 1e-12, "m={m}");
            assert!(linalg::unitarity_defect(&beam_splitter_block(m, tau)) < 1e-10);
        }
    }

    #[test]
    fn herald_probability_leading_order() {
        let tau = DEFAULT_TAU;
        let alpha = 1.0;
        let h =
            photon_subtract(&coherent(r(alpha), DEFAULT_CUTOFF).unwrap(), Subtraction::BeamSplitter { tau }).unwrap();
        let leading = tau * tau * alpha * alpha;
        assert!((h.probability - leading).abs() / leading < 0.01);
        // a coherent state stays coherent with amplitude α cos τ
        let shrunk = coherent(r(alpha * tau.cos()), DEFAULT_CUTOFF).unwrap();
        assert!((h.state.fidelity(&shrunk).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cat_ballot_fidelity_grows_with_amplitude() {
        let grid = [1.0, 1.5, 2.0, 3.0, 4.0];
        let f: Vec<f64> = grid.iter().map(|&a| cat_ballot_fidelity(a, a, 2, cutoff_for(a)).unwrap()).collect();
        assert!(f[2] >= 0.99);
        for w in f.windows(2) {
            assert!(w[1] > w[0]);
        }
        assert!(matches!(cat_ballot_fidelity(0.0, 0.0, 2, DEFAULT_CUTOFF), Err(Error::Degenerate(_))));
    }

    #[test]
    fn cat_ballot_two_legs_closed_form() {
        // (A+B+ + A-B-)² / (2 (A+²B+² + A-²B-²)) with A± = √(1 ± e^{-2α²}),
        // the cat normalizations
        let (a, b): (f64, f64) = (1.2, 0.9);
        let (ea, eb) = ((-2.0 * a * a).exp(), (-2.0 * b * b).exp());
        let (ap, am, bp, bm) = ((1.0 + ea).sqrt(), (1.0 - ea).sqrt(), (1.0 + eb).sqrt(), (1.0 - eb).sqrt());
        let expect = (ap * bp + am * bm).powi(2) / (2.0 * (ap * ap * bp * bp + am * am * bm * bm));
        let got = cat_ballot_fidelity(a, b, 2, DEFAULT_CUTOFF).unwrap();
        assert!((got - expect).abs() < 1e-10, "{got} vs {expect}");
    }

    #[test]
    fn truncation_hygiene() {
        let f1 = cat_ballot_fidelity(2.0, 2.0, 2, DEFAULT_CUTOFF).unwrap();
        let f2 = cat_ballot_fidelity(2.0, 2.0, 2, 2 * DEFAULT_CUTOFF).unwrap();
        assert!((f1 - f2).abs() < 1e-8);
    }

    #[test]
    fn rail_devices() {
        assert!(multimode_shift_check(2).unwrap());
        assert!(multimode_shift_check(3).unwrap());
        assert!(multimode_shift_check(1).is_err());
        let id = rail_qudit_operator(4, RailDevice::No);
        assert_eq!(id, Matrix::identity(4, 4));
        let x = rail_qudit_operator(2, RailDevice::Yes);
        assert_eq!(x, crate::qcore::gate::matrices::x());
    }

    proptest! {
        #[test]
        fn subtraction_lowers_residue_class(legs in 2usize..=4, alpha in 0.5f64..2.5) {
            for k in 0..legs {
                let c = cat(r(alpha), legs, k, DEFAULT_CUTOFF).unwrap();
                let out = photon_subtract(&c, Subtraction::Ideal).unwrap().state;
                let target = cat(r(alpha), legs, (k + legs - 1) % legs, DEFAULT_CUTOFF).unwrap();
                prop_assert!(out.fidelity(&target).unwrap() > 1.0 - 1e-9);
            }
        }
    }
}
