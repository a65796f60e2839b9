// Copyright 2026 The cloneforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Dense complex linear algebra shared by the other modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `exp(2πi·k/d)` with `k` reduced mod `d` first.
pub(crate) fn root_of_unity(k: usize, d: usize) -> Complex64 {
    let k = k % d;
    match (4 * k).is_multiple_of(d) {
        // exact values for the quarter turns
        true => match 4 * k / d {
            0 => ONE,
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        },
        false => Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64),
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.norm()
}

/// `‖M − M†‖_F`.
pub fn hermiticity_residual(m: &ComplexMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = m.nrows();
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .total_cmp(&eig.eigenvalues[j])
            .then(i.cmp(&j))
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    hermitian_eigen(m).0[0]
}

/// Number of singular values strictly above `threshold`.
pub fn numerical_rank(m: &ComplexMatrix, threshold: f64) -> usize {
    m.clone()
        .singular_values()
        .iter()
        .filter(|&&s| s > threshold)
        .count()
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

fn check_factorization(m: &ComplexMatrix, dims: &[usize]) -> Result<usize> {
    let n = ensure_square(m)?;
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || total != n {
        return Err(Error::BadFactorization(format!(
            "factors {dims:?} do not multiply to {n}"
        )));
    }
    Ok(n)
}

/// Partial trace of `op` over every subsystem not listed in `keep`.
///
/// `dims` is the tensor factorization of the row (= column) space, most
/// significant factor first. The kept factors stay in their original order.
pub fn partial_trace(op: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    check_factorization(op, dims)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.iter().any(|&k| k >= dims.len()) {
        return Err(Error::BadFactorization(format!(
            "kept subsystems {keep:?} out of range for {} factors",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();
    let full = strides(dims);

    // offsets contributed by each kept / traced multi-index
    let offsets = |subs: &[usize]| -> Vec<usize> {
        let sub_dims: Vec<usize> = subs.iter().map(|&i| dims[i]).collect();
        let count: usize = sub_dims.iter().product();
        let sub_strides = strides(&sub_dims);
        (0..count)
            .map(|flat| {
                subs.iter()
                    .zip(&sub_strides)
                    .zip(&sub_dims)
                    .map(|((&sys, &st), &dim)| (flat / st % dim) * full[sys])
                    .sum()
            })
            .collect()
    };
    let kept_off = offsets(&kept);
    let traced_off = offsets(&traced);

    let n = kept_off.len();
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        traced_off
            .iter()
            .map(|&t| op[(kept_off[r] + t, kept_off[c] + t)])
            .sum()
    }))
}

/// Partial transpose of subsystem `which`.
pub fn partial_transpose(
    op: &ComplexMatrix,
    dims: &[usize],
    which: usize,
) -> Result<ComplexMatrix> {
    let n = check_factorization(op, dims)?;
    if which >= dims.len() {
        return Err(Error::BadFactorization(format!(
            "subsystem {which} out of range for {} factors",
            dims.len()
        )));
    }
    let st = strides(dims)[which];
    let dw = dims[which];
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        let (ir, ic) = (r / st % dw, c / st % dw);
        let r2 = r - ir * st + ic * st;
        let c2 = c - ic * st + ir * st;
        op[(r2, c2)]
    }))
}

/// Outer product `|u⟩⟨v|`.
pub fn outer(u: &ComplexVector, v: &ComplexVector) -> ComplexMatrix {
    u * v.adjoint()
}

/// Max-abs entry distance between two equally shaped matrices.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
