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

//! Seeded random objects for tests and command-line helpers.
//!
//! Channels are built from Haar-like random isometries, so they are always
//! trace preserving.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::choi::{ChoiOperator, DensityMatrix, RMatrix};
use crate::cloner::CoefficientVector;
use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::wh_group::{Dim, PureState};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    // fill row-major so the stream layout does not depend on storage order
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = gaussian(rng);
        }
    }
    m
}

pub fn uniform_index<R: Rng + ?Sized>(n: usize, rng: &mut R) -> usize {
    rng.random_range(0..n)
}

/// Haar-distributed unit vector in `C^n`.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexVector {
    let v = ComplexVector::from_fn(n, |_, _| gaussian(rng));
    let norm = v.norm();
    v.unscale(norm)
}

pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> PureState {
    PureState::normalized(random_unit_vector(d, rng)).expect("non-zero gaussian vector")
}

pub fn random_coefficients<R: Rng + ?Sized>(d: Dim, rng: &mut R) -> CoefficientVector {
    CoefficientVector::normalized(d, random_unit_vector(d.group_order(), rng)).expect("unit vector")
}

/// `G G†` for a square complex Gaussian `G`.
pub fn random_psd<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = gaussian_matrix(n, n, rng);
    &g * g.adjoint()
}

fn unit_trace(m: ComplexMatrix) -> ComplexMatrix {
    let tr = m.trace().re;
    m.unscale(tr)
}

pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    let m = unit_trace(random_psd(n, rng));
    // symmetrize away rounding
    DensityMatrix::new((&m + m.adjoint()).scale(0.5)).expect("Wishart sample is a state")
}

/// Full-rank positive unit-trace r-matrix.
pub fn random_r_matrix<R: Rng + ?Sized>(d: Dim, rng: &mut R) -> RMatrix {
    let m = unit_trace(random_psd(d.group_order(), rng));
    RMatrix::new(d, (&m + m.adjoint()).scale(0.5)).expect("Wishart sample is valid")
}

/// `rows × cols` matrix with orthonormal columns.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    gaussian_matrix(rows, cols, rng).qr().q()
}

/// Choi operator of `ρ ↦ Tr_env[V ρ V†]` with `V: C^d → C^{d²} ⊗ C^{env}`
/// a random isometry. Always completely positive and trace preserving.
pub fn random_channel_choi<R: Rng + ?Sized>(d: Dim, env: usize, rng: &mut R) -> ChoiOperator {
    let n = d.get();
    let env = env.max(1);
    let v = random_isometry(n * n * env, n, rng);
    let big = n * n * n;
    let mut r = ComplexMatrix::zeros(big, big);
    for j in 0..env {
        // |K_j⟩⟩ with K_j[m, k] = V[(m, j), k]
        let k = ComplexVector::from_fn(big, |i, _| {
            let (m, col) = (i / n, i % n);
            v[(m * env + j, col)]
        });
        r += &k * k.adjoint();
    }
    ChoiOperator::new(d, r).expect("shape d³")
}

/// Deterministic stream used by seeded command-line helpers.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random channel with `d` Kraus operators drawn from `seeded(seed)`.
pub fn random_channel_from_seed(d: Dim, seed: u64) -> ChoiOperator {
    random_channel_choi(d, d.get(), &mut seeded(seed))
}
