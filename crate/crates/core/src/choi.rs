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

//! Choi operators of 1→2 channels and the predicates checked on them.
//! Covariant operators also get coordinates in the `T_ab` basis.
//!
//! Subsystems are ordered `clone1(1) ⊗ clone2(2) ⊗ input(3)`, with an ancilla
//! `(4)` appended for purifications.

use num_complex::Complex64;

use crate::linalg::{
    ensure_square, hermiticity_residual, identity, min_eigenvalue, numerical_rank, partial_trace,
    ComplexMatrix, ComplexVector, ZERO,
};
use crate::wh_group::{bell_vector, choi_action, Dim, MonomialUnitary, WeylIndex};
use crate::{Error, Result};

/// Default tolerance for the structural predicates.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Commutator norm above which an operator is rejected as non-covariant by
/// operations that require covariance.
pub const COVARIANCE_GATE: f64 = 1e-8;

/// Validity tolerance for r-matrices and density matrices.
pub const STATE_TOL: f64 = 1e-10;

/// Choi operator `R = (M ⊗ I)|I⟩⟩⟨⟨I|` on `clone1 ⊗ clone2 ⊗ input`.
///
/// Only the shape is enforced on construction; positivity, normalization and
/// covariance are what the predicates in this module measure.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiOperator {
    d: Dim,
    matrix: ComplexMatrix,
}

impl ChoiOperator {
    pub fn new(d: Dim, matrix: ComplexMatrix) -> Result<Self> {
        let n = ensure_square(&matrix)?;
        let want = d.get().pow(3);
        if n != want {
            return Err(Error::DimensionMismatch {
                expected: want,
                found: n,
            });
        }
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::BadFactorization("non-finite entry".into()));
        }
        Ok(ChoiOperator { d, matrix })
    }

    pub fn dim(&self) -> Dim {
        self.d
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn hermiticity_residual(&self) -> f64 {
        hermiticity_residual(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix)
    }

    pub fn scaled(&self, s: f64) -> Self {
        ChoiOperator {
            d: self.d,
            matrix: self.matrix.scale(s),
        }
    }

    /// `w·self + (1−w)·other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        self.d.check(other.d.get())?;
        Ok(ChoiOperator {
            d: self.d,
            matrix: self.matrix.scale(w) + other.matrix.scale(1.0 - w),
        })
    }

    fn dims(&self) -> [usize; 3] {
        let d = self.d.get();
        [d, d, d]
    }
}

/// Outcome of a tolerance check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Check {
    pub pass: bool,
    pub residual: f64,
}

impl Check {
    fn against(residual: f64, tol: f64) -> Self {
        Check {
            pass: residual <= tol,
            residual,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtremalityCheck {
    pub pass: bool,
    /// `‖R² − R‖_F`.
    pub projector_residual: f64,
    /// Singular values above `√tol`.
    pub rank: usize,
}

/// A state on the input space.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        ensure_square(&matrix)?;
        let herm = hermiticity_residual(&matrix);
        if herm > STATE_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian ({herm:e})")));
        }
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let low = min_eigenvalue(&matrix);
        if low < -STATE_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {low:e}"
            )));
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn from_pure(psi: &crate::PureState) -> Self {
        DensityMatrix {
            matrix: psi.projector(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Joint output state of a channel applied to the input state `ρ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelOutput {
    /// Operator on `clone1 ⊗ clone2`.
    pub state: ComplexMatrix,
    pub trace: f64,
    /// Whether `R` passed the trace-preservation check (at [`COVARIANCE_GATE`]).
    /// A `false` here means `state` is not a normalized density matrix.
    pub trace_preserving: bool,
}

impl ChannelOutput {
    /// Reduced state of one clone (`0` = clone1, `1` = clone2).
    pub fn clone_state(&self, d: Dim, which: usize) -> Result<ComplexMatrix> {
        partial_trace(&self.state, &[d.get(), d.get()], &[which])
    }
}

/// `M(ρ) = Tr₃[(I ⊗ I ⊗ ρᵀ) R]`.
pub fn apply_channel(r: &ChoiOperator, rho: &DensityMatrix) -> Result<ChannelOutput> {
    let d = r.d.get();
    r.d.check(rho.dim())?;
    let state = channel_action(d, &r.matrix, &rho.matrix);
    let trace = state.trace().re;
    Ok(ChannelOutput {
        state,
        trace,
        trace_preserving: is_trace_preserving(r, COVARIANCE_GATE).pass,
    })
}

// out[x,y] = Σ_{ij} ρ_ji R[(x,j),(y,i)]
pub(crate) fn channel_action(d: usize, r: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    let n = d * d;
    ComplexMatrix::from_fn(n, n, |x, y| {
        let mut acc = ZERO;
        for j in 0..d {
            for i in 0..d {
                acc += rho[(j, i)] * r[(x * d + j, y * d + i)];
            }
        }
        acc
    })
}

/// `Tr₁₂[R] = I₃`, residual `‖Tr₁₂[R] − I‖_F`.
pub fn is_trace_preserving(r: &ChoiOperator, tol: f64) -> Check {
    let reduced = partial_trace(&r.matrix, &r.dims(), &[2]).expect("shape checked on construction");
    let residual = (reduced - identity(r.d.get())).norm();
    Check::against(residual, tol)
}

/// Max over the group of `‖[R, U ⊗ U ⊗ U*]‖_F`.
pub fn is_covariant(r: &ChoiOperator, tol: f64) -> Check {
    let residual =
        r.d.indices()
            .map(|g| {
                choi_action(r.d, g)
                    .expect("index from the same dimension")
                    .commutator_norm(&r.matrix)
            })
            .fold(0.0, f64::max);
    Check::against(residual, tol)
}

/// Uniform average of `V_g† R V_g` over the `d²` Weyl elements.
pub fn twirl(r: &ChoiOperator) -> ChoiOperator {
    let n = r.matrix.nrows();
    let mut acc = ComplexMatrix::zeros(n, n);
    for g in r.d.indices() {
        acc += choi_action(r.d, g)
            .expect("valid index")
            .conjugate(&r.matrix);
    }
    ChoiOperator {
        d: r.d,
        matrix: acc.unscale(r.d.group_order() as f64),
    }
}

/// Non-zero entries `(row, col, value)` of `T_ab`.
pub(crate) fn t_entries(
    d: Dim,
    a: WeylIndex,
    b: WeylIndex,
) -> Result<Vec<(usize, usize, Complex64)>> {
    let n = d.get();
    let ua = MonomialUnitary::weyl(d, a)?;
    let ub = MonomialUnitary::weyl(d, b)?;
    let w = ua.adjoint().compose(&ub);
    let va = sparse(&bell_vector(d, a)?);
    let vb = sparse(&bell_vector(d, b)?);
    let scale = 1.0 / n as f64;
    let mut out = Vec::with_capacity(n * n * n);
    for (i, j, wij) in w.entries() {
        for &(x, ax) in &va {
            for &(y, by) in &vb {
                out.push((i * n * n + x, j * n * n + y, wij * ax * by.conj() * scale));
            }
        }
    }
    Ok(out)
}

fn sparse(v: &ComplexVector) -> Vec<(usize, Complex64)> {
    v.iter()
        .enumerate()
        .filter(|(_, z)| z.norm_sqr() > 0.0)
        .map(|(i, &z)| (i, z))
        .collect()
}

/// `T_ab = (1/d) U_a†U_b ⊗ |U_a⟩⟩⟨⟨U_b|`, clone1 on the first factor and the
/// Bell dyad on `clone2 ⊗ input`.
pub fn isomorphism_t(d: Dim, a: WeylIndex, b: WeylIndex) -> Result<ComplexMatrix> {
    let n = d.get().pow(3);
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, j, v) in t_entries(d, a, b)? {
        m[(i, j)] += v;
    }
    Ok(m)
}

/// Projector onto `H ⊗ |U_rs⟩⟩` (equal to `T_{rs,rs}`).
pub fn subspace_projector(d: Dim, idx: WeylIndex) -> Result<ComplexMatrix> {
    isomorphism_t(d, idx, idx)
}

/// Coordinates `r` of a covariant operator in the `T_ab` basis:
/// `R = Σ r_ab T_ab`, indexed by `a.flat(d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RMatrix {
    d: Dim,
    matrix: ComplexMatrix,
}

impl RMatrix {
    /// Validating constructor: Hermitian, PSD, unit trace within [`STATE_TOL`].
    pub fn new(d: Dim, matrix: ComplexMatrix) -> Result<Self> {
        let r = RMatrix { d, matrix };
        r.validate()?;
        Ok(r)
    }

    /// `a a†` for a coefficient vector of length `d²`.
    pub fn rank_one(d: Dim, a: &ComplexVector) -> Result<Self> {
        d.check((a.len() as f64).sqrt().round() as usize)?;
        RMatrix::new(d, a * a.adjoint())
    }

    pub fn validate(&self) -> Result<()> {
        let n = ensure_square(&self.matrix)?;
        if n != self.d.group_order() {
            return Err(Error::DimensionMismatch {
                expected: self.d.group_order(),
                found: n,
            });
        }
        let herm = hermiticity_residual(&self.matrix);
        if herm > STATE_TOL {
            return Err(Error::InvalidRMatrix(format!("not Hermitian ({herm:e})")));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidRMatrix(format!("trace {tr}")));
        }
        let low = min_eigenvalue(&self.matrix);
        if low < -STATE_TOL {
            return Err(Error::InvalidRMatrix(format!(
                "negative eigenvalue {low:e}"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> Dim {
        self.d
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn rank(&self, tol: f64) -> usize {
        numerical_rank(&self.matrix, tol.sqrt())
    }
}

/// `r_ab = (1/d) Tr[T_ab† R]`; rejects operators whose commutator norm
/// exceeds [`COVARIANCE_GATE`].
///
/// The result is not validated: it is PSD with unit trace exactly when `R`
/// is a positive trace-preserving covariant operator.
pub fn r_matrix_from_choi(r: &ChoiOperator) -> Result<RMatrix> {
    let cov = is_covariant(r, COVARIANCE_GATE);
    if !cov.pass {
        return Err(Error::NotCovariant(cov.residual));
    }
    let d = r.d;
    let n = d.group_order();
    let scale = 1.0 / d.get() as f64;
    let mut m = ComplexMatrix::zeros(n, n);
    for a in d.indices() {
        for b in d.indices() {
            let mut acc = ZERO;
            for (i, j, t) in t_entries(d, a, b)? {
                acc += t.conj() * r.matrix[(i, j)];
            }
            m[(a.flat(d), b.flat(d))] = acc * scale;
        }
    }
    Ok(RMatrix { d, matrix: m })
}

/// `R = Σ_ab r_ab T_ab` for a valid r-matrix.
pub fn choi_from_r(r: &RMatrix) -> Result<ChoiOperator> {
    r.validate()?;
    Ok(choi_from_r_unchecked(r.d, &r.matrix))
}

/// Linear extension of [`choi_from_r`] to arbitrary `d²×d²` matrices.
pub(crate) fn choi_from_r_unchecked(d: Dim, r: &ComplexMatrix) -> ChoiOperator {
    let n = d.get().pow(3);
    let mut m = ComplexMatrix::zeros(n, n);
    for a in d.indices() {
        for b in d.indices() {
            let coeff = r[(a.flat(d), b.flat(d))];
            if coeff.norm_sqr() == 0.0 {
                continue;
            }
            for (i, j, t) in t_entries(d, a, b).expect("indices from d") {
                m[(i, j)] += coeff * t;
            }
        }
    }
    ChoiOperator { d, matrix: m }
}

/// Extremal covariant cloners are rank-`d` projectors: `‖R² − R‖_F ≤ tol`
/// and exactly `d` singular values above `√tol`.
pub fn is_extremal(r: &ChoiOperator, tol: f64) -> Result<ExtremalityCheck> {
    let cov = is_covariant(r, tol.max(COVARIANCE_GATE));
    if !cov.pass {
        return Err(Error::NotCovariant(cov.residual));
    }
    let projector_residual = (&r.matrix * &r.matrix - &r.matrix).norm();
    let rank = numerical_rank(&r.matrix, tol.sqrt());
    Ok(ExtremalityCheck {
        pass: projector_residual <= tol && rank == r.d.get(),
        projector_residual,
        rank,
    })
}

/// Pure state on `clone1 ⊗ clone2 ⊗ input ⊗ ancilla`, index
/// `((i1·d + i2)·d + i3)·d + i4`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointOutputState {
    d: Dim,
    amplitudes: ComplexVector,
}

impl JointOutputState {
    pub fn new(d: Dim, amplitudes: ComplexVector) -> Result<Self> {
        let want = d.get().pow(4);
        if amplitudes.len() != want {
            return Err(Error::DimensionMismatch {
                expected: want,
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > crate::PureState::NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(JointOutputState { d, amplitudes })
    }

    pub fn dim(&self) -> Dim {
        self.d
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    /// `R = d · Tr₄ |Ψ⟩⟨Ψ|`.
    pub fn choi(&self) -> ChoiOperator {
        let d = self.d.get();
        let n = d * d * d;
        // |Ψ⟩ reshaped to (clones+input) × ancilla
        let m = ComplexMatrix::from_fn(n, d, |row, anc| self.amplitudes[row * d + anc]);
        ChoiOperator {
            d: self.d,
            matrix: (&m * m.adjoint()).scale(d as f64),
        }
    }
}

/// Max over the group of `‖(U ⊗ U ⊗ U* ⊗ U*)|Ψ⟩ − |Ψ⟩‖`.
pub fn strong_covariance_residual(psi: &JointOutputState) -> f64 {
    psi.d
        .indices()
        .map(|g| {
            let u = MonomialUnitary::weyl(psi.d, g).expect("valid index");
            let uc = u.conj();
            let v = u.tensor(&u).tensor(&uc).tensor(&uc);
            (v.apply(&psi.amplitudes) - &psi.amplitudes).norm()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloner::{choi_from_coefficients, CoefficientVector};
    use crate::linalg::{kron, max_abs_diff, ONE};
    use crate::random;
    use crate::wh_group::{weyl_operator, PureState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dim(d: usize) -> Dim {
        Dim::new(d).unwrap()
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn trivial_cloner(d: Dim) -> ChoiOperator {
        choi_from_coefficients(&CoefficientVector::basis(d, WeylIndex::IDENTITY)).unwrap()
    }

    #[test]
    fn perfect_transmission_cloner() {
        let d = dim(2);
        let r = trivial_cloner(d);
        let mut g = rng(1);
        for _ in 0..5 {
            let rho = random::random_density(2, &mut g);
            let out = apply_channel(&r, &rho).unwrap();
            assert!(out.trace_preserving);
            let want = kron(&identity(2).unscale(2.0), rho.matrix());
            assert!(max_abs_diff(&out.state, &want) < 1e-12);
        }
    }

    #[test]
    fn channel_output_is_a_state_and_transforms_covariantly() {
        let mut g = rng(2);
        for n in [2, 3] {
            let d = dim(n);
            for _ in 0..20 {
                let a = random::random_coefficients(d, &mut g);
                let r = choi_from_coefficients(&a).unwrap();
                let rho = random::random_density(n, &mut g);
                let out = apply_channel(&r, &rho).unwrap();
                assert!((out.trace - 1.0).abs() < 1e-12);
                assert!(hermiticity_residual(&out.state) < 1e-12);
                assert!(min_eigenvalue(&out.state) > -1e-12);

                let gi = WeylIndex::from_flat(d, random::uniform_index(n * n, &mut g)).unwrap();
                let u = weyl_operator(d, gi).unwrap();
                let moved = DensityMatrix::new(&u * rho.matrix() * u.adjoint()).unwrap();
                let lhs = apply_channel(&r, &moved).unwrap().state;
                let uu = kron(&u, &u);
                let rhs = &uu * &out.state * uu.adjoint();
                assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
            }
        }
    }

    #[test]
    fn non_tp_operator_is_flagged_not_rejected() {
        let d = dim(2);
        let r = trivial_cloner(d).scaled(2.0);
        let rho = DensityMatrix::from_pure(&PureState::basis(2, 0));
        let out = apply_channel(&r, &rho).unwrap();
        assert!(!out.trace_preserving);
        assert!((out.trace - 2.0).abs() < 1e-12);
        let wrong = DensityMatrix::from_pure(&PureState::basis(3, 0));
        assert!(matches!(
            apply_channel(&r, &wrong),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_trace_of_maximally_entangled_projector() {
        let d = dim(2);
        let v = bell_vector(d, WeylIndex::IDENTITY).unwrap();
        let p = &v * v.adjoint();
        let t = partial_trace(&p, &[2, 2], &[0]).unwrap();
        // direct index sum
        let mut want = ComplexMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    want[(i, j)] += p[(i * 2 + k, j * 2 + k)];
                }
            }
        }
        assert!(max_abs_diff(&t, &want) < 1e-15);
        assert!(max_abs_diff(&t, &identity(2)) < 1e-15);
    }

    #[test]
    fn trace_preservation_predicate() {
        let mut g = rng(3);
        for n in [2, 3, 5] {
            let d = dim(n);
            let r = choi_from_coefficients(&random::random_coefficients(d, &mut g)).unwrap();
            let tp = is_trace_preserving(&r, 1e-12);
            assert!(tp.pass, "d={n}: {}", tp.residual);
            assert!(!is_trace_preserving(&r.scaled(2.0), 1e-10).pass);
        }
        // |I⟩⟩⟨⟨I|₁₂ ⊗ I₃ has Tr₁₂ = 2·I₃
        let d = dim(2);
        let v = bell_vector(d, WeylIndex::IDENTITY).unwrap();
        let m = kron(&(&v * v.adjoint()), &identity(2));
        let check = is_trace_preserving(&ChoiOperator::new(d, m).unwrap(), 1e-10);
        assert!(!check.pass);
        assert!((check.residual - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn covariance_predicate() {
        let mut g = rng(4);
        for n in [2, 3, 5] {
            let d = dim(n);
            let r = choi_from_coefficients(&random::random_coefficients(d, &mut g)).unwrap();
            let cov = is_covariant(&r, 1e-10);
            assert!(cov.pass, "d={n}: {}", cov.residual);
        }
        let d = dim(2);
        let raw = random::random_psd(8, &mut g);
        let r = ChoiOperator::new(d, raw).unwrap();
        assert!(!is_covariant(&r, 1e-10).pass);
        assert!(is_covariant(&twirl(&r), 1e-10).pass);
    }

    #[test]
    fn twirl_properties() {
        let mut g = rng(5);
        for n in [2, 3] {
            let d = dim(n);
            let r = random::random_channel_choi(d, n, &mut g);
            assert!(is_trace_preserving(&r, 1e-10).pass);
            let t = twirl(&r);
            assert!(is_covariant(&t, 1e-10).pass);
            assert!(is_trace_preserving(&t, 1e-10).pass);
            assert!(max_abs_diff(twirl(&t).matrix(), t.matrix()) < 1e-12);

            let cov = choi_from_coefficients(&random::random_coefficients(d, &mut g)).unwrap();
            assert!(max_abs_diff(twirl(&cov).matrix(), cov.matrix()) < 1e-12);

            // twirl commutes with mixing
            let r2 = random::random_channel_choi(d, 2, &mut g);
            let lhs = twirl(&r.mix(&r2, 0.3).unwrap());
            let rhs = t.mix(&twirl(&r2), 0.3).unwrap();
            assert!(max_abs_diff(lhs.matrix(), rhs.matrix()) < 1e-12);
        }
    }

    #[test]
    fn t_basis_structure() {
        for n in [2, 3] {
            let d = dim(n);
            let all: Vec<WeylIndex> = d.indices().collect();
            let ts: Vec<Vec<ComplexMatrix>> = all
                .iter()
                .map(|&a| {
                    all.iter()
                        .map(|&b| isomorphism_t(d, a, b).unwrap())
                        .collect()
                })
                .collect();
            for (ia, &a) in all.iter().enumerate() {
                // T_aa = (1/d) I ⊗ |U_a⟩⟩⟨⟨U_a|, idempotent, rank d
                let taa = &ts[ia][ia];
                let v = bell_vector(d, a).unwrap();
                let want = kron(&identity(n), &(&v * v.adjoint())).unscale(n as f64);
                assert!(max_abs_diff(taa, &want) < 1e-14);
                assert!(max_abs_diff(&(taa * taa), taa) < 1e-13);
                assert_eq!(numerical_rank(taa, 1e-5), n);

                for (ib, _) in all.iter().enumerate() {
                    let tab = &ts[ia][ib];
                    for gi in d.indices() {
                        assert!(choi_action(d, gi).unwrap().commutator_norm(tab) <= 1e-12);
                    }
                    // Hilbert-Schmidt products, explicit trace
                    for (ic, _) in all.iter().enumerate() {
                        for (id, _) in all.iter().enumerate() {
                            let hs = (tab.adjoint() * &ts[ic][id]).trace();
                            let want = if ia == ic && ib == id { n as f64 } else { 0.0 };
                            assert!((hs - Complex64::new(want, 0.0)).norm() < 1e-12);
                        }
                    }
                    // Tr₁₂ T_ab = δ_ab I
                    let red = partial_trace(tab, &[n, n, n], &[2]).unwrap();
                    let want = if ia == ib {
                        identity(n)
                    } else {
                        ComplexMatrix::zeros(n, n)
                    };
                    assert!(max_abs_diff(&red, &want) < 1e-13);
                }
            }
        }
    }

    #[test]
    fn irreducible_subspace_decomposition() {
        for n in [2, 3] {
            let d = dim(n);
            let ps: Vec<ComplexMatrix> = d
                .indices()
                .map(|i| subspace_projector(d, i).unwrap())
                .collect();
            let sum = ps
                .iter()
                .fold(ComplexMatrix::zeros(n.pow(3), n.pow(3)), |acc, p| acc + p);
            assert!(max_abs_diff(&sum, &identity(n.pow(3))) < 1e-12);
            for (i, p) in ps.iter().enumerate() {
                assert_eq!(numerical_rank(p, 1e-5), n);
                for (j, q) in ps.iter().enumerate() {
                    if i != j {
                        assert!((p * q).norm() < 1e-13);
                    }
                }
            }
        }
        assert!(subspace_projector(dim(2), WeylIndex { p: 2, q: 0 }).is_err());
    }

    #[test]
    fn r_matrix_round_trips() {
        let mut g = rng(6);
        for n in [2, 3] {
            let d = dim(n);
            // rank-one: r = a a†
            let a = random::random_coefficients(d, &mut g);
            let r = choi_from_coefficients(&a).unwrap();
            let rm = r_matrix_from_choi(&r).unwrap();
            let want = a.vector() * a.vector().adjoint();
            assert!(max_abs_diff(rm.matrix(), &want) < 1e-12);
            assert_eq!(rm.rank(1e-10), 1);

            for _ in 0..50 {
                let rr = random::random_r_matrix(d, &mut g);
                let choi = choi_from_r(&rr).unwrap();
                assert!(is_covariant(&choi, 1e-10).pass);
                assert!(is_trace_preserving(&choi, 1e-10).pass);
                let back = r_matrix_from_choi(&choi).unwrap();
                assert!(max_abs_diff(back.matrix(), rr.matrix()) < 1e-10);
                assert!(max_abs_diff(choi_from_r(&back).unwrap().matrix(), choi.matrix()) < 1e-10);
            }

            let tw = twirl(&random::random_channel_choi(d, 2, &mut g));
            let rt = r_matrix_from_choi(&tw).unwrap();
            assert!((rt.trace() - ONE).norm() < 1e-10);
            rt.validate().unwrap();

            // linearity under mixing
            let r1 = choi_from_coefficients(&random::random_coefficients(d, &mut g)).unwrap();
            let r2 = choi_from_coefficients(&random::random_coefficients(d, &mut g)).unwrap();
            let mixed = r_matrix_from_choi(&r1.mix(&r2, 0.5).unwrap()).unwrap();
            let halves = (r_matrix_from_choi(&r1).unwrap().matrix()
                + r_matrix_from_choi(&r2).unwrap().matrix())
            .scale(0.5);
            assert!(max_abs_diff(mixed.matrix(), &halves) < 1e-12);
        }
    }

    #[test]
    fn r_matrix_special_points() {
        let d = dim(2);
        let mut e0 = ComplexMatrix::zeros(4, 4);
        e0[(0, 0)] = ONE;
        let r = choi_from_r(&RMatrix::new(d, e0).unwrap()).unwrap();
        assert!(max_abs_diff(r.matrix(), trivial_cloner(d).matrix()) < 1e-14);

        for n in [2, 3] {
            let d = dim(n);
            let m = n * n;
            let flat = RMatrix::new(d, identity(m).unscale(m as f64)).unwrap();
            let r = choi_from_r(&flat).unwrap();
            let mut want = ComplexMatrix::zeros(n.pow(3), n.pow(3));
            for a in d.indices() {
                want += isomorphism_t(d, a, a).unwrap().unscale(m as f64);
            }
            assert!(max_abs_diff(r.matrix(), &want) < 1e-14);
            assert!(is_covariant(&r, 1e-10).pass && is_trace_preserving(&r, 1e-10).pass);
            assert!(!is_extremal(&r, 1e-10).unwrap().pass);
        }
    }

    #[test]
    fn r_matrix_validation_errors() {
        let d = dim(2);
        let twice = identity(4).unscale(2.0);
        assert!(matches!(
            RMatrix::new(d, twice),
            Err(Error::InvalidRMatrix(_))
        ));
        let mut neg = identity(4).unscale(2.0);
        neg[(0, 0)] = Complex64::new(-0.5, 0.0);
        neg[(1, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            RMatrix::new(d, neg),
            Err(Error::InvalidRMatrix(_))
        ));
        let mut g = rng(7);
        let generic = ChoiOperator::new(d, random::random_psd(8, &mut g)).unwrap();
        assert!(matches!(
            r_matrix_from_choi(&generic),
            Err(Error::NotCovariant(_))
        ));
        assert!(matches!(
            is_extremal(&generic, 1e-10),
            Err(Error::NotCovariant(_))
        ));
    }

    #[test]
    fn extremality() {
        let mut g = rng(8);
        for n in [2, 3] {
            let d = dim(n);
            let a = random::random_coefficients(d, &mut g);
            let r = choi_from_coefficients(&a).unwrap();
            let ext = is_extremal(&r, 1e-10).unwrap();
            assert!(ext.pass && ext.rank == n, "{ext:?}");

            // orthogonal partner: mixture has rank 2d
            let mut b = random::random_coefficients(d, &mut g).vector().clone();
            let overlap = a.vector().dotc(&b);
            b -= a.vector() * overlap;
            let b = CoefficientVector::normalized(d, b).unwrap();
            let mix = r.mix(&choi_from_coefficients(&b).unwrap(), 0.5).unwrap();
            let ext = is_extremal(&mix, 1e-10).unwrap();
            assert!(!ext.pass);
            assert_eq!(ext.rank, 2 * n);
            assert_eq!(r_matrix_from_choi(&mix).unwrap().rank(1e-10), 2);
        }
    }

    #[test]
    fn strong_covariance_of_simple_states() {
        let d = dim(2);
        let mut v = ComplexVector::zeros(16);
        v[0] = ONE;
        let psi = JointOutputState::new(d, v).unwrap();
        // σ_x^{⊗4}|0000⟩ = |1111⟩, distance √2
        assert!((strong_covariance_residual(&psi) - 2f64.sqrt()).abs() < 1e-12);
        assert!(JointOutputState::new(d, ComplexVector::zeros(16)).is_err());
        assert!(JointOutputState::new(d, ComplexVector::zeros(8)).is_err());
    }
}
