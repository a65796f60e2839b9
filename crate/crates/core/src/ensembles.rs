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

//! Group-invariant input ensembles and their averaging rules.
//!
//! Three kinds are supported. Finite ensembles are explicit weighted lists.
//! Torus ensembles are phase-covariant families sampled on a uniform product
//! grid, which integrates fidelities exactly because they are trigonometric
//! polynomials of degree at most two in each phase. The Haar ensemble is
//! symbolic: quadratic integrands are averaged with the second-moment
//! identity, anything else needs an explicit Monte Carlo budget.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::linalg::{identity, kron, max_abs_diff, ComplexMatrix, ComplexVector, ONE, ZERO};
use crate::random::random_pure_state;
use crate::wh_group::{Dim, MonomialUnitary, PureState};
use crate::{Error, Result};

/// Default number of grid points per phase.
pub const DEFAULT_GRID: usize = 8;
/// Smallest grid that is exact for fidelity integrands.
pub const MIN_GRID: usize = 5;
/// Largest total number of torus points accepted.
pub const MAX_GRID_POINTS: usize = 1_000_000;
pub const MAX_MULTI_PHASE_DIM: usize = 5;

const WEIGHT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnsembleKind {
    Finite,
    Torus,
    Haar,
}

#[derive(Clone, Debug, PartialEq)]
enum Body {
    Finite(Vec<(PureState, f64)>),
    Torus { order: usize },
    Haar,
}

/// An invariant family of pure input states with a probability measure.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    d: Dim,
    name: String,
    body: Body,
}

/// `ψ ↦ ⟨ψ|⟨ψ| Q |ψ⟩|ψ⟩` for an operator `Q` on `C^d ⊗ C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticIntegrand {
    dim: usize,
    q: ComplexMatrix,
}

impl QuadraticIntegrand {
    pub fn new(dim: usize, q: ComplexMatrix) -> Result<Self> {
        if q.nrows() != dim * dim || q.ncols() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: q.nrows(),
            });
        }
        Ok(QuadraticIntegrand { dim, q })
    }

    /// `|⟨ψ|A|ψ⟩|²` as `Tr[(P⊗P)(A ⊗ A†)]`.
    pub fn squared_expectation(a: &ComplexMatrix) -> Result<Self> {
        let dim = crate::linalg::ensure_square(a)?;
        Self::new(dim, kron(a, &a.adjoint()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operator(&self) -> &ComplexMatrix {
        &self.q
    }

    pub fn eval(&self, psi: &PureState) -> f64 {
        let v = psi.amplitudes();
        let n = self.dim;
        let vv = ComplexVector::from_fn(n * n, |i, _| v[i / n] * v[i % n]);
        vv.dotc(&(&self.q * &vv)).re
    }

    /// Exact Haar mean `(Tr Q + Tr[SWAP·Q]) / (d(d+1))`.
    pub fn haar_average(&self) -> f64 {
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.q[(i * n + j, i * n + j)] + self.q[(j * n + i, i * n + j)];
            }
        }
        acc.re / (n * (n + 1)) as f64
    }
}

/// What to average over an ensemble.
#[derive(Clone, Copy)]
pub enum Integrand<'a> {
    Quadratic(&'a QuadraticIntegrand),
    Function(&'a (dyn Fn(&PureState) -> f64 + Sync)),
}

impl Integrand<'_> {
    fn eval(&self, psi: &PureState) -> f64 {
        match self {
            Integrand::Quadratic(q) => q.eval(psi),
            Integrand::Function(f) => f(psi),
        }
    }
}

/// Monte Carlo settings for Haar averages of non-quadratic integrands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleBudget {
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Average {
    pub value: f64,
    /// Zero for exact rules.
    pub std_error: f64,
}

fn qubit(re: [f64; 2], im: [f64; 2]) -> PureState {
    PureState::normalized(ComplexVector::from_vec(vec![
        Complex64::new(re[0], im[0]),
        Complex64::new(re[1], im[1]),
    ]))
    .expect("non-zero literal")
}

fn uniform(states: Vec<PureState>) -> Body {
    let w = 1.0 / states.len() as f64;
    Body::Finite(states.into_iter().map(|s| (s, w)).collect())
}

fn qubit_dim() -> Dim {
    Dim::new(2).expect("2 is in range")
}

impl Ensemble {
    /// Explicit weighted ensemble. Weights must be non-negative and sum to one.
    pub fn finite(d: Dim, name: &str, states: Vec<(PureState, f64)>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidEnsemble("no states".into()));
        }
        let mut total = 0.0;
        for (psi, w) in &states {
            d.check(psi.dim())?;
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::InvalidEnsemble(format!("weight {w}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
        }
        Ok(Ensemble {
            d,
            name: name.to_string(),
            body: Body::Finite(states),
        })
    }

    /// Eigenstates of σx and σy.
    pub fn bb84() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Ensemble {
            d: qubit_dim(),
            name: "bb84".into(),
            body: uniform(vec![
                qubit([s, s], [0.0, 0.0]),
                qubit([s, -s], [0.0, 0.0]),
                qubit([s, 0.0], [0.0, s]),
                qubit([s, 0.0], [0.0, -s]),
            ]),
        }
    }

    /// Eigenstates of all three Pauli matrices.
    pub fn six_state() -> Self {
        let mut states = vec![PureState::basis(2, 0), PureState::basis(2, 1)];
        states.extend(
            Self::bb84()
                .finite_states()
                .unwrap()
                .iter()
                .map(|(s, _)| s.clone()),
        );
        Ensemble {
            d: qubit_dim(),
            name: "six-state".into(),
            body: uniform(states),
        }
    }

    /// The eight states with Bloch vectors `(±1, ±1, ±1)/√3`.
    pub fn cube() -> Self {
        let mut states = Vec::with_capacity(8);
        for sx in [1.0, -1.0] {
            for sy in [1.0, -1.0] {
                for sz in [1.0, -1.0] {
                    states.push(bloch_state([sx, sy, sz].map(|x: f64| x / 3f64.sqrt())));
                }
            }
        }
        Ensemble {
            d: qubit_dim(),
            name: "cube".into(),
            body: uniform(states),
        }
    }

    /// Equatorial qubit states `(|0⟩ + e^{iφ}|1⟩)/√2` on an `order`-point grid.
    pub fn equatorial(order: usize) -> Result<Self> {
        let mut e = Self::multi_phase(qubit_dim(), order)?;
        e.name = "phase".into();
        Ok(e)
    }

    /// Computational basis plus its discrete Fourier transform, 1/(2d) each.
    pub fn fourier_pair(d: Dim) -> Self {
        let n = d.get();
        let mut states: Vec<PureState> = (0..n).map(|k| PureState::basis(n, k)).collect();
        let s = 1.0 / (n as f64).sqrt();
        for m in 0..n {
            let v =
                ComplexVector::from_fn(n, |k, _| crate::linalg::root_of_unity((m * k) % n, n) * s);
            states.push(PureState::from_vector(v).expect("DFT columns are unit vectors"));
        }
        Ensemble {
            d,
            name: "fourier".into(),
            body: uniform(states),
        }
    }

    /// `(|0⟩ + Σ_k e^{iφ_k}|k⟩)/√d` on a product grid of `order^{d−1}` points.
    pub fn multi_phase(d: Dim, order: usize) -> Result<Self> {
        if order < MIN_GRID {
            return Err(Error::OutOfDomain {
                what: "grid order",
                value: order as f64,
                domain: format!(">= {MIN_GRID}"),
            });
        }
        if d.get() > MAX_MULTI_PHASE_DIM {
            return Err(Error::OutOfDomain {
                what: "multi-phase dimension",
                value: d.get() as f64,
                domain: format!("<= {MAX_MULTI_PHASE_DIM}"),
            });
        }
        let points = (order as f64).powi(d.get() as i32 - 1);
        if points > MAX_GRID_POINTS as f64 {
            return Err(Error::OutOfDomain {
                what: "torus grid size",
                value: points,
                domain: format!("<= {MAX_GRID_POINTS}"),
            });
        }
        Ok(Ensemble {
            d,
            name: "multi-phase".into(),
            body: Body::Torus { order },
        })
    }

    /// All pure states with the unitarily invariant measure.
    pub fn universal(d: Dim) -> Self {
        Ensemble {
            d,
            name: "universal".into(),
            body: Body::Haar,
        }
    }

    /// Looks up a preset. `grid` is the per-phase order for torus families.
    pub fn by_name(name: &str, d: Dim, grid: Option<usize>) -> Result<Self> {
        let grid = grid.unwrap_or(DEFAULT_GRID);
        let qubit_only = |e: Ensemble| -> Result<Ensemble> {
            d.check(e.d.get())?;
            Ok(e)
        };
        match name {
            "bb84" => qubit_only(Self::bb84()),
            "six-state" | "six_state" | "sixstate" => qubit_only(Self::six_state()),
            "cube" => qubit_only(Self::cube()),
            "phase" | "equatorial" | "phase-covariant" => qubit_only(Self::equatorial(grid)?),
            "fourier" | "fourier-pair" => Ok(Self::fourier_pair(d)),
            "multi-phase" | "multiphase" => Self::multi_phase(d, grid),
            "universal" | "haar" => Ok(Self::universal(d)),
            _ => Err(Error::Unknown {
                kind: "ensemble",
                name: name.to_string(),
            }),
        }
    }

    pub fn dim(&self) -> Dim {
        self.d
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> EnsembleKind {
        match self.body {
            Body::Finite(_) => EnsembleKind::Finite,
            Body::Torus { .. } => EnsembleKind::Torus,
            Body::Haar => EnsembleKind::Haar,
        }
    }

    pub fn grid_order(&self) -> Option<usize> {
        match self.body {
            Body::Torus { order } => Some(order),
            _ => None,
        }
    }

    pub fn finite_states(&self) -> Option<&[(PureState, f64)]> {
        match &self.body {
            Body::Finite(s) => Some(s),
            _ => None,
        }
    }

    /// Weighted quadrature nodes: the states themselves for finite
    /// ensembles, the phase grid for tori, `None` for Haar.
    pub fn quadrature(&self) -> Option<Vec<(PureState, f64)>> {
        match &self.body {
            Body::Finite(s) => Some(s.clone()),
            Body::Torus { order } => Some(torus_grid(self.d.get(), *order)),
            Body::Haar => None,
        }
    }

    /// `E[P_ψ ⊗ P_ψ]` on `C^d ⊗ C^d`.
    pub fn second_moment(&self) -> ComplexMatrix {
        let n = self.d.get();
        match self.quadrature() {
            Some(nodes) => {
                let mut m = ComplexMatrix::zeros(n * n, n * n);
                for (psi, w) in nodes {
                    let v = psi.amplitudes();
                    let vv = ComplexVector::from_fn(n * n, |i, _| v[i / n] * v[i % n]);
                    m += (&vv * vv.adjoint()).scale(w);
                }
                m
            }
            None => {
                let mut m = identity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        m[(i * n + j, j * n + i)] += ONE;
                    }
                }
                m.unscale((n * (n + 1)) as f64)
            }
        }
    }

    /// Ensemble average of `f`.
    ///
    /// Node evaluations may run in parallel; the reduction is a serial sum in
    /// node order, so results do not depend on scheduling.
    pub fn average(&self, f: Integrand<'_>, budget: Option<SampleBudget>) -> Result<Average> {
        if let Integrand::Quadratic(q) = f {
            self.d.check(q.dim())?;
        }
        match (&self.body, f) {
            (Body::Haar, Integrand::Quadratic(q)) => Ok(Average {
                value: q.haar_average(),
                std_error: 0.0,
            }),
            (Body::Haar, _) => match budget {
                Some(b) => Ok(self.monte_carlo(f, b)),
                None => Err(Error::NeedsSampleBudget),
            },
            _ => {
                let nodes = self.quadrature().expect("non-Haar ensembles have nodes");
                let values: Vec<f64> = nodes.par_iter().map(|(psi, w)| w * f.eval(psi)).collect();
                Ok(Average {
                    value: values.iter().sum(),
                    std_error: 0.0,
                })
            }
        }
    }

    /// Plain Monte Carlo over Haar-random states from a seeded stream.
    pub fn monte_carlo(&self, f: Integrand<'_>, budget: SampleBudget) -> Average {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        let n = budget.samples.max(2);
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..n {
            let x = f.eval(&random_pure_state(self.d.get(), &mut rng));
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / n as f64;
        let var = ((sum_sq - n as f64 * mean * mean) / (n - 1) as f64).max(0.0);
        Average {
            value: mean,
            std_error: (var / n as f64).sqrt(),
        }
    }

    /// Largest mismatch found when matching `U_g P U_g†` against the
    /// ensemble's projectors (with weights), maximized over the group.
    /// `None` for continuous families.
    pub fn orbit_residual(&self) -> Option<f64> {
        let states = self.finite_states()?;
        let projectors: Vec<ComplexMatrix> = states.iter().map(|(s, _)| s.projector()).collect();
        let mut worst: f64 = 0.0;
        for g in self.d.indices() {
            let u = MonomialUnitary::weyl(self.d, g).expect("index from Dim::indices");
            let mut used = vec![false; states.len()];
            for (i, (psi, w)) in states.iter().enumerate() {
                let moved = psi.transformed(&u).projector();
                let best = (0..states.len())
                    .filter(|&j| !used[j])
                    .map(|j| {
                        let diff = max_abs_diff(&moved, &projectors[j]) + (w - states[j].1).abs();
                        (diff, j)
                    })
                    .min_by(|x, y| x.0.total_cmp(&y.0));
                match best {
                    Some((diff, j)) => {
                        used[j] = true;
                        worst = worst.max(diff);
                    }
                    None => unreachable!("bijection attempt {i} ran out of candidates"),
                }
            }
        }
        Some(worst)
    }
}

fn bloch_state(r: [f64; 3]) -> PureState {
    // eigenvector of r·σ with eigenvalue +1
    let [x, y, z] = r;
    let theta = z.clamp(-1.0, 1.0).acos();
    let phi = y.atan2(x);
    PureState::normalized(ComplexVector::from_vec(vec![
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ]))
    .expect("unit spinor")
}

fn torus_grid(d: usize, order: usize) -> Vec<(PureState, f64)> {
    let count = order.pow(d as u32 - 1);
    let w = 1.0 / count as f64;
    let s = 1.0 / (d as f64).sqrt();
    (0..count)
        .map(|mut j| {
            let mut amps = vec![Complex64::new(s, 0.0); d];
            for amp in amps.iter_mut().skip(1) {
                let phi = 2.0 * PI * (j % order) as f64 / order as f64;
                *amp = Complex64::from_polar(s, phi);
                j /= order;
            }
            (PureState::new(amps).expect("unit torus point"), w)
        })
        .collect()
}
