//! Dense complex linear algebra over tensor-product index spaces.
//!
//! Subsystem 0 is the leftmost tensor factor and the most significant digit of
//! a basis index.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type Matrix = DMatrix<C64>;
pub type Vector = DVector<C64>;

pub const ZERO: C64 = Complex { re: 0.0, im: 0.0 };
pub const ONE: C64 = Complex { re: 1.0, im: 0.0 };
pub const I: C64 = Complex { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn r(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// Unit-modulus phase `e^{i theta}`.
pub fn cis(theta: f64) -> C64 {
    Complex::from_polar(1.0, theta)
}

pub fn matrix(rows: usize, cols: usize, entries: &[C64]) -> Matrix {
    Matrix::from_row_slice(rows, cols, entries)
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &Vector, b: &Vector) -> Vector {
    a.kronecker(b)
}

pub fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Checks that `targets` are distinct and in range.
pub fn check_targets(dims: &[usize], targets: &[usize]) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::InvalidSubsystems("empty subsystem set".into()));
    }
    for (k, &t) in targets.iter().enumerate() {
        if t >= dims.len() {
            return Err(Error::SubsystemOutOfRange { index: t, count: dims.len() });
        }
        if targets[..k].contains(&t) {
            return Err(Error::InvalidSubsystems(format!("subsystem {t} repeated")));
        }
    }
    Ok(())
}

/// Offsets of every joint basis state of `targets` (first target most
/// significant), plus the base indices at which all target digits vanish.
fn local_layout(dims: &[usize], targets: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let st = strides(dims);
    let tdims: Vec<usize> = targets.iter().map(|&t| dims[t]).collect();
    let local = total_dim(&tdims);
    let mut offsets = Vec::with_capacity(local);
    for k in 0..local {
        let mut rem = k;
        let mut off = 0;
        for j in (0..targets.len()).rev() {
            off += (rem % tdims[j]) * st[targets[j]];
            rem /= tdims[j];
        }
        offsets.push(off);
    }
    let total = total_dim(dims);
    let bases = (0..total).filter(|&idx| targets.iter().all(|&t| (idx / st[t]).is_multiple_of(dims[t]))).collect();
    (offsets, bases)
}

fn local_dim_check(dims: &[usize], targets: &[usize], op: &Matrix) -> Result<()> {
    check_targets(dims, targets)?;
    let local: usize = targets.iter().map(|&t| dims[t]).product();
    if op.nrows() != local || op.ncols() != local {
        return Err(Error::Dimension(format!(
            "operator is {}x{}, targets span dimension {local}",
            op.nrows(),
            op.ncols()
        )));
    }
    Ok(())
}

/// `(op on targets) ⊗ I` applied to a vector.
pub fn apply_local_vec(v: &Vector, dims: &[usize], targets: &[usize], op: &Matrix) -> Result<Vector> {
    local_dim_check(dims, targets, op)?;
    let (offsets, bases) = local_layout(dims, targets);
    let mut out = Vector::zeros(v.len());
    let mut buf = vec![ZERO; offsets.len()];
    for &b in &bases {
        for (k, &o) in offsets.iter().enumerate() {
            buf[k] = v[b + o];
        }
        for (row, &o) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (col, x) in buf.iter().enumerate() {
                acc += op[(row, col)] * x;
            }
            out[b + o] = acc;
        }
    }
    Ok(out)
}

/// `(op on targets) ⊗ I` multiplied onto every column of `m`.
pub fn apply_local_left(m: &Matrix, dims: &[usize], targets: &[usize], op: &Matrix) -> Result<Matrix> {
    local_dim_check(dims, targets, op)?;
    let (offsets, bases) = local_layout(dims, targets);
    let mut out = Matrix::zeros(m.nrows(), m.ncols());
    let mut buf = vec![ZERO; offsets.len()];
    for col in 0..m.ncols() {
        for &b in &bases {
            for (k, &o) in offsets.iter().enumerate() {
                buf[k] = m[(b + o, col)];
            }
            for (row, &o) in offsets.iter().enumerate() {
                let mut acc = ZERO;
                for (j, x) in buf.iter().enumerate() {
                    acc += op[(row, j)] * x;
                }
                out[(b + o, col)] = acc;
            }
        }
    }
    Ok(out)
}

/// `O ρ O†` with `O = op on targets ⊗ I`.
pub fn conjugate_local(rho: &Matrix, dims: &[usize], targets: &[usize], op: &Matrix) -> Result<Matrix> {
    let left = apply_local_left(rho, dims, targets, op)?;
    let both = apply_local_left(&left.adjoint(), dims, targets, op)?;
    Ok(both.adjoint())
}

/// Sorted, deduplicated complement of `keep`.
fn split(dims: &[usize], keep: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    check_targets(dims, keep)?;
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    let traced = (0..dims.len()).filter(|i| !kept.contains(i)).collect();
    Ok((kept, traced))
}

fn offsets_for(dims: &[usize], subset: &[usize]) -> Vec<usize> {
    if subset.is_empty() {
        return vec![0];
    }
    local_layout(dims, subset).0
}

/// Reduced density matrix on `keep` (returned in ascending subsystem order).
pub fn partial_trace_matrix(rho: &Matrix, dims: &[usize], keep: &[usize]) -> Result<(Matrix, Vec<usize>)> {
    let (kept, traced) = split(dims, keep)?;
    let ko = offsets_for(dims, &kept);
    let to = offsets_for(dims, &traced);
    let mut out = Matrix::zeros(ko.len(), ko.len());
    for (i, &oi) in ko.iter().enumerate() {
        for (j, &oj) in ko.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &to {
                acc += rho[(oi + t, oj + t)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok((out, kept.iter().map(|&k| dims[k]).collect()))
}

/// Reduced density matrix of a pure vector on `keep`.
pub fn partial_trace_vec(v: &Vector, dims: &[usize], keep: &[usize]) -> Result<(Matrix, Vec<usize>)> {
    let (kept, traced) = split(dims, keep)?;
    let ko = offsets_for(dims, &kept);
    let to = offsets_for(dims, &traced);
    let mut a = Matrix::zeros(ko.len(), to.len());
    for (i, &oi) in ko.iter().enumerate() {
        for (t, &ot) in to.iter().enumerate() {
            a[(i, t)] = v[oi + ot];
        }
    }
    Ok((&a * a.adjoint(), kept.iter().map(|&k| dims[k]).collect()))
}

/// Index map for reordering subsystems: new subsystem `k` is old `order[k]`.
/// Returns `map[new_index] = old_index` and the new dims.
pub fn permutation_map(dims: &[usize], order: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    if order.len() != dims.len() {
        return Err(Error::InvalidSubsystems(format!(
            "order has {} entries for {} subsystems",
            order.len(),
            dims.len()
        )));
    }
    check_targets(dims, order)?;
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let old_st = strides(dims);
    let total = total_dim(dims);
    let mut map = vec![0; total];
    for (new_idx, slot) in map.iter_mut().enumerate() {
        let mut rem = new_idx;
        let mut old = 0;
        for k in (0..order.len()).rev() {
            old += (rem % new_dims[k]) * old_st[order[k]];
            rem /= new_dims[k];
        }
        *slot = old;
    }
    Ok((map, new_dims))
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    let eig = SymmetricEigen::new(m.clone());
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Matrix::zeros(m.nrows(), m.ncols());
    for (new, &old) in idx.iter().enumerate() {
        vectors.set_column(new, &eig.eigenvectors.column(old));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &Matrix) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Square root of a positive semidefinite Hermitian matrix; negative
/// eigenvalues are clamped to zero.
pub fn psd_sqrt(m: &Matrix) -> Matrix {
    let (vals, vecs) = hermitian_eigen(m);
    let d = Matrix::from_diagonal(&Vector::from_iterator(vals.len(), vals.iter().map(|&x| r(x.max(0.0).sqrt()))));
    &vecs * d * vecs.adjoint()
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest entry of `|U†U - I|`.
pub fn unitarity_defect(u: &Matrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    max_abs(&(u.adjoint() * u - Matrix::identity(u.nrows(), u.ncols())))
}

pub fn hermiticity_defect(m: &Matrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn projector(v: &Vector) -> Matrix {
    v * v.adjoint()
}

/// Parity of the set bits of `x`.
pub fn parity(x: usize) -> u8 {
    (x.count_ones() & 1) as u8
}
