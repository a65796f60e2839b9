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

//! Discrete Weyl-Heisenberg operators and generalized Bell vectors.
//!
//! Conventions used throughout the crate:
//! - `ω = exp(+2πi/d)` on the computational basis `{|k⟩}`;
//! - `⊕` is addition mod `d`;
//! - `U_pq = Σ_k ω^{kq} |k⊕p⟩⟨k|`;
//! - `|m⟩|n⟩` sits at index `m·d + n`;
//! - `|A⟩⟩ = Σ_mn A_mn |m⟩|n⟩`.

use num_complex::Complex64;

use crate::linalg::{root_of_unity, ComplexMatrix, ComplexVector, ONE, ZERO};
use crate::{Error, Result};

/// Largest supported qudit dimension. Choi operators are `d³×d³`.
pub const MAX_DIM: usize = 64;

/// Qudit dimension, `2 ≤ d ≤ MAX_DIM`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dim(usize);

impl Dim {
    pub fn new(d: usize) -> Result<Self> {
        if (2..=MAX_DIM).contains(&d) {
            Ok(Dim(d))
        } else {
            Err(Error::DimensionOutOfRange(d))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Number of group elements (up to phase), `d²`.
    pub fn group_order(self) -> usize {
        self.0 * self.0
    }

    /// All labels `(p,q)` in row-major order, i.e. flat index `p·d + q`.
    pub fn indices(self) -> impl Iterator<Item = WeylIndex> + Clone {
        let d = self.0;
        (0..d * d).map(move |i| WeylIndex { p: i / d, q: i % d })
    }

    pub(crate) fn check(self, n: usize) -> Result<()> {
        if n == self.0 {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.0,
                found: n,
            })
        }
    }
}

impl std::fmt::Display for Dim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Group label `(p,q) ∈ Z_d × Z_d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylIndex {
    pub p: usize,
    pub q: usize,
}

impl WeylIndex {
    pub const IDENTITY: WeylIndex = WeylIndex { p: 0, q: 0 };

    pub fn new(d: Dim, p: usize, q: usize) -> Result<Self> {
        let idx = WeylIndex { p, q };
        idx.validate(d)?;
        Ok(idx)
    }

    pub fn validate(self, d: Dim) -> Result<()> {
        if self.p < d.0 && self.q < d.0 {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                d: d.0,
                p: self.p,
                q: self.q,
            })
        }
    }

    /// Position in coefficient vectors and r-matrices: `p·d + q`.
    pub fn flat(self, d: Dim) -> usize {
        self.p * d.0 + self.q
    }

    pub fn from_flat(d: Dim, i: usize) -> Result<Self> {
        WeylIndex::new(d, i / d.0, i % d.0)
    }
}

/// A unitary with exactly one non-zero entry per column:
/// `V|j⟩ = phase_j |target_j⟩`.
///
/// Weyl operators and their tensor products all have this form, which keeps
/// conjugations and commutators against dense `d³×d³` operators at O(n²).
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialUnitary {
    targets: Vec<usize>,
    sources: Vec<usize>,
    phases: Vec<Complex64>,
}

impl MonomialUnitary {
    fn from_parts(targets: Vec<usize>, phases: Vec<Complex64>) -> Self {
        let mut sources = vec![0; targets.len()];
        for (j, &t) in targets.iter().enumerate() {
            sources[t] = j;
        }
        MonomialUnitary {
            targets,
            sources,
            phases,
        }
    }

    /// `U_pq` in monomial form.
    pub fn weyl(d: Dim, idx: WeylIndex) -> Result<Self> {
        idx.validate(d)?;
        let n = d.get();
        let targets = (0..n).map(|k| (k + idx.p) % n).collect();
        let phases = (0..n).map(|k| root_of_unity(k * idx.q, n)).collect();
        Ok(Self::from_parts(targets, phases))
    }

    pub fn dim(&self) -> usize {
        self.targets.len()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let m = other.dim();
        let mut targets = Vec::with_capacity(self.dim() * m);
        let mut phases = Vec::with_capacity(self.dim() * m);
        for (t1, p1) in self.targets.iter().zip(&self.phases) {
            for (t2, p2) in other.targets.iter().zip(&other.phases) {
                targets.push(t1 * m + t2);
                phases.push(p1 * p2);
            }
        }
        Self::from_parts(targets, phases)
    }

    /// Entry-wise complex conjugate.
    pub fn conj(&self) -> Self {
        Self::from_parts(
            self.targets.clone(),
            self.phases.iter().map(|p| p.conj()).collect(),
        )
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim();
        let mut phases = vec![ZERO; n];
        for (&t, p) in self.targets.iter().zip(&self.phases) {
            phases[t] = p.conj();
        }
        Self::from_parts(self.sources.clone(), phases)
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        let targets = other.targets.iter().map(|&t| self.targets[t]).collect();
        let phases = other
            .targets
            .iter()
            .zip(&other.phases)
            .map(|(&t, p)| self.phases[t] * p)
            .collect();
        Self::from_parts(targets, phases)
    }

    /// Non-zero entries as `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.targets
            .iter()
            .zip(&self.phases)
            .enumerate()
            .map(|(j, (&t, &p))| (t, j, p))
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn apply(&self, v: &ComplexVector) -> ComplexVector {
        let mut out = ComplexVector::zeros(v.len());
        for (r, c, p) in self.entries() {
            out[r] = p * v[c];
        }
        out
    }

    /// `V† A V`.
    pub fn conjugate(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim();
        ComplexMatrix::from_fn(n, n, |i, j| {
            self.phases[i].conj() * a[(self.targets[i], self.targets[j])] * self.phases[j]
        })
    }

    /// `‖A V − V A‖_F`.
    pub fn commutator_norm(&self, a: &ComplexMatrix) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            let src = self.sources[i];
            let left_phase = self.phases[src];
            for j in 0..n {
                let av = a[(i, self.targets[j])] * self.phases[j];
                let va = left_phase * a[(src, j)];
                acc += (av - va).norm_sqr();
            }
        }
        acc.sqrt()
    }
}

/// The group action on `clone1 ⊗ clone2 ⊗ input` that covariant Choi
/// operators commute with: `U ⊗ U ⊗ U*`.
pub fn choi_action(d: Dim, idx: WeylIndex) -> Result<MonomialUnitary> {
    let u = MonomialUnitary::weyl(d, idx)?;
    Ok(u.tensor(&u).tensor(&u.conj()))
}

/// `U_pq` as a dense `d×d` matrix.
pub fn weyl_operator(d: Dim, idx: WeylIndex) -> Result<ComplexMatrix> {
    Ok(MonomialUnitary::weyl(d, idx)?.to_matrix())
}

/// `|U_rs⟩⟩ = Σ_k ω^{ks} |k⊕r⟩|k⟩`, norm `√d`.
pub fn bell_vector(d: Dim, idx: WeylIndex) -> Result<ComplexVector> {
    idx.validate(d)?;
    let n = d.get();
    let mut v = ComplexVector::zeros(n * n);
    for k in 0..n {
        v[((k + idx.p) % n) * n + k] = root_of_unity(k * idx.q, n);
    }
    Ok(v)
}

/// `|A⟩⟩ = Σ_mn A_mn |m⟩|n⟩`.
pub fn vectorize(a: &ComplexMatrix) -> Result<ComplexVector> {
    let n = crate::linalg::ensure_square(a)?;
    Ok(ComplexVector::from_fn(n * n, |i, _| a[(i / n, i % n)]))
}

/// Inverse of [`vectorize`]; `v` must have square length.
pub fn devectorize(v: &ComplexVector) -> Result<ComplexMatrix> {
    let n = (v.len() as f64).sqrt().round() as usize;
    if n == 0 || n * n != v.len() {
        return Err(Error::NotSquare {
            rows: v.len(),
            cols: 1,
        });
    }
    Ok(ComplexMatrix::from_fn(n, n, |m, k| v[m * n + k]))
}

/// Normalized pure state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: ComplexVector,
}

impl PureState {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::from_vector(ComplexVector::from_vec(amplitudes))
    }

    pub fn from_vector(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(PureState { amplitudes })
    }

    /// Rescales `v` to unit norm.
    pub fn normalized(v: ComplexVector) -> Result<Self> {
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized(norm));
        }
        Ok(PureState {
            amplitudes: v.unscale(norm),
        })
    }

    /// Computational basis state `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = ComplexVector::zeros(dim);
        v[k] = ONE;
        PureState { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn projector(&self) -> ComplexMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, a: &ComplexMatrix) -> Complex64 {
        self.amplitudes.dotc(&(a * &self.amplitudes))
    }

    pub fn transformed(&self, u: &MonomialUnitary) -> Self {
        PureState {
            amplitudes: u.apply(&self.amplitudes),
        }
    }
}
