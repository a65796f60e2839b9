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

//! Optimal covariant cloners.
//!
//! The average fidelity of either clone is linear in the Choi operator, hence
//! a linear functional `Tr[Φ r]` of the r-matrix. Over extremal cloners
//! (`r = a a†`) it becomes the quadratic form `a†Φa`. A linear functional on
//! the convex set of r-matrices is maximized at a rank-one point, so every
//! weighted objective `λF_A + (1−λ)F_B` is solved by a top eigenvector.

mod golden;

pub use golden::{golden_coefficients, golden_tradeoff, symmetric_fidelity, Preset};

use rayon::prelude::*;

use crate::choi::{t_entries, RMatrix};
use crate::cloner::{CloneLabel, CoefficientVector};
use crate::ensembles::Ensemble;
use crate::linalg::{hermitian_eigen, partial_transpose, ComplexMatrix, ComplexVector, ZERO};
use crate::wh_group::Dim;
use crate::{Error, Result};

/// Eigengap below which a scalarized optimum is flagged as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-9;
pub const DEFAULT_GRID_POINTS: usize = 201;
pub const DEFAULT_BISECTION_TOL: f64 = 1e-8;
const MAX_BISECTIONS: usize = 200;

/// The average fidelity of one clone as a Hermitian form on coefficient
/// vectors: `F̄(a) = a†Φa`.
#[derive(Clone, Debug, PartialEq)]
pub struct FidelityForm {
    d: Dim,
    clone: CloneLabel,
    matrix: ComplexMatrix,
}

impl FidelityForm {
    pub fn dim(&self) -> Dim {
        self.d
    }

    pub fn clone_label(&self) -> CloneLabel {
        self.clone
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eval(&self, a: &CoefficientVector) -> f64 {
        quad(&self.matrix, a.vector())
    }

    /// `Tr[Φ r]`, the fidelity of the general covariant cloner with
    /// coordinates `r`.
    pub fn eval_r(&self, r: &RMatrix) -> f64 {
        (&self.matrix * r.matrix()).trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).0
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().expect("non-empty form")
    }
}

fn quad(m: &ComplexMatrix, a: &ComplexVector) -> f64 {
    a.dotc(&(m * a)).re
}

/// Builds `Φ` with `Φ_ab = F̄(T_ba)`, where `F̄` is the linear extension of the
/// average fidelity to operators.
///
/// With `M = E[P_ψ ⊗ P_ψ]` the ensemble second moment, `F̄(X) = Tr[O X]` for
/// `O = M^{T_in}` on `clone_k ⊗ input` tensored with the identity on the
/// other clone.
pub fn fidelity_matrix(e: &Ensemble, which: CloneLabel) -> Result<FidelityForm> {
    let d = e.dim();
    let n = d.get();
    let y = partial_transpose(&e.second_moment(), &[n, n], 1)?;
    let k = which.subsystem();
    let split = |idx: usize| [idx / (n * n), (idx / n) % n, idx % n];
    let functional = |entries: &[(usize, usize, num_complex::Complex64)]| {
        let mut acc = ZERO;
        for &(row, col, v) in entries {
            // Tr[O T] = Σ O[col,row] T[row,col]
            let (r, c) = (split(row), split(col));
            if r[1 - k] == c[1 - k] {
                acc += y[(c[k] * n + c[2], r[k] * n + r[2])] * v;
            }
        }
        acc
    };
    let order = d.group_order();
    let mut phi = ComplexMatrix::zeros(order, order);
    for a in d.indices() {
        for b in d.indices() {
            if b.flat(d) < a.flat(d) {
                continue;
            }
            let v = functional(&t_entries(d, b, a)?);
            phi[(a.flat(d), b.flat(d))] = v;
            phi[(b.flat(d), a.flat(d))] = v.conj();
        }
    }
    Ok(FidelityForm {
        d,
        clone: which,
        matrix: phi,
    })
}

/// A point on a trade-off curve. `f_b` belongs to clone 2 and `f_e` to
/// clone 1.
#[derive(Clone, Debug, PartialEq)]
pub struct TradeoffPoint {
    pub lambda: f64,
    pub f_b: f64,
    pub f_e: f64,
    pub coefficients: CoefficientVector,
    /// Top eigenvalue of the scalarized form is (nearly) degenerate.
    pub degenerate: bool,
    /// The optimum can be written with non-negative real coefficients.
    pub nonnegative_real: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TradeoffCurve {
    pub ensemble: String,
    /// Sorted by `f_b`, ascending.
    pub points: Vec<TradeoffPoint>,
}

fn check_pair(phi_a: &FidelityForm, phi_b: &FidelityForm) -> Result<()> {
    phi_a.d.check(phi_b.d.get())
}

/// Maximizes `λF_A + (1−λ)F_B` over coefficient vectors.
pub fn scalarized_optimum(
    phi_a: &FidelityForm,
    phi_b: &FidelityForm,
    lambda: f64,
) -> Result<TradeoffPoint> {
    check_pair(phi_a, phi_b)?;
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::OutOfDomain {
            what: "lambda",
            value: lambda,
            domain: "[0, 1]".into(),
        });
    }
    let m = phi_a.matrix.scale(lambda) + phi_b.matrix.scale(1.0 - lambda);
    let (values, vectors) = hermitian_eigen(&m);
    let top = values.len() - 1;
    let gap = if top > 0 {
        values[top] - values[top - 1]
    } else {
        f64::INFINITY
    };
    let a = CoefficientVector::normalized(phi_a.d, vectors.column(top).into_owned())?.phase_fixed();
    Ok(TradeoffPoint {
        lambda,
        f_b: phi_b.eval(&a),
        f_e: phi_a.eval(&a),
        nonnegative_real: a.is_nonnegative_real(1e-9),
        degenerate: gap < DEGENERACY_GAP,
        coefficients: a,
    })
}

/// `n` evenly spaced points on `[0, 1]`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

/// Both fidelity forms of an ensemble: `(Φ_A, Φ_B)` for clone 1 and clone 2.
pub fn fidelity_forms(e: &Ensemble) -> Result<(FidelityForm, FidelityForm)> {
    Ok((
        fidelity_matrix(e, CloneLabel::Clone1)?,
        fidelity_matrix(e, CloneLabel::Clone2)?,
    ))
}

/// One scalarized optimum per `λ`, sorted by `F_B`.
pub fn pareto_sweep(e: &Ensemble, grid: &[f64]) -> Result<TradeoffCurve> {
    let (phi_a, phi_b) = fidelity_forms(e)?;
    sweep_forms(e.name(), &phi_a, &phi_b, grid)
}

pub fn sweep_forms(
    name: &str,
    phi_a: &FidelityForm,
    phi_b: &FidelityForm,
    grid: &[f64],
) -> Result<TradeoffCurve> {
    let mut points = grid
        .par_iter()
        .map(|&l| scalarized_optimum(phi_a, phi_b, l))
        .collect::<Result<Vec<_>>>()?;
    // stable: equal F_B keeps λ order
    points.sort_by(|x, y| x.f_b.total_cmp(&y.f_b));
    Ok(TradeoffCurve {
        ensemble: name.to_string(),
        points,
    })
}

/// Frontier point with `|F_B − target| ≤ tol`, found by bisection in `λ`.
///
/// `F_B` decreases from 1 at `λ = 0` to its minimum on the frontier at
/// `λ = 1`; targets outside that range are rejected.
pub fn constrained_optimum(e: &Ensemble, target: f64, tol: f64) -> Result<TradeoffPoint> {
    let (phi_a, phi_b) = fidelity_forms(e)?;
    constrained_from_forms(&phi_a, &phi_b, target, tol)
}

pub fn constrained_from_forms(
    phi_a: &FidelityForm,
    phi_b: &FidelityForm,
    target: f64,
    tol: f64,
) -> Result<TradeoffPoint> {
    let hi_pt = scalarized_optimum(phi_a, phi_b, 0.0)?;
    let lo_pt = scalarized_optimum(phi_a, phi_b, 1.0)?;
    let unreachable = || Error::Unreachable {
        target,
        low: lo_pt.f_b,
        high: hi_pt.f_b,
    };
    if !target.is_finite() || target > hi_pt.f_b + tol || target < lo_pt.f_b - tol {
        return Err(unreachable());
    }
    if (hi_pt.f_b - target).abs() <= tol {
        return Ok(hi_pt);
    }
    if (lo_pt.f_b - target).abs() <= tol {
        return Ok(lo_pt);
    }
    bisect(phi_a, phi_b, |p| p.f_b - target, tol).ok_or_else(unreachable)
}

/// Frontier point with `F_A = F_B` (within `tol`).
pub fn symmetric_optimum(e: &Ensemble, tol: f64) -> Result<TradeoffPoint> {
    let (phi_a, phi_b) = fidelity_forms(e)?;
    symmetric_from_forms(&phi_a, &phi_b, tol)
}

pub fn symmetric_from_forms(
    phi_a: &FidelityForm,
    phi_b: &FidelityForm,
    tol: f64,
) -> Result<TradeoffPoint> {
    let gap = |p: &TradeoffPoint| p.f_b - p.f_e;
    for l in [0.0, 1.0] {
        let p = scalarized_optimum(phi_a, phi_b, l)?;
        if gap(&p).abs() <= tol {
            return Ok(p);
        }
    }
    bisect(phi_a, phi_b, gap, tol).ok_or(Error::Unreachable {
        target: 0.0,
        low: f64::NAN,
        high: f64::NAN,
    })
}

/// Finds `λ ∈ (0,1)` with `|g(point(λ))| ≤ tol` for `g` decreasing in `λ`,
/// positive at 0 and negative at 1.
fn bisect<G>(phi_a: &FidelityForm, phi_b: &FidelityForm, g: G, tol: f64) -> Option<TradeoffPoint>
where
    G: Fn(&TradeoffPoint) -> f64,
{
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let p = scalarized_optimum(phi_a, phi_b, mid).ok()?;
        let v = g(&p);
        if v.abs() <= tol {
            return Some(p);
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON {
            break;
        }
    }
    None
}
