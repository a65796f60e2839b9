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

//! Double-Bell cloners and their single-clone fidelities.
//!
//! Fidelities always go through the channel action on the input state; no
//! closed-form shortcuts are used here.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::choi::{apply_channel, ChoiOperator, DensityMatrix, JointOutputState, RMatrix};
use crate::ensembles::{Ensemble, EnsembleKind, Integrand, QuadraticIntegrand};
use crate::linalg::{partial_trace, partial_transpose, ComplexMatrix, ComplexVector};
use crate::wh_group::{Dim, MonomialUnitary, PureState, WeylIndex};
use crate::{Error, Result};

/// Unit vector `a ∈ C^{d²}` indexed by `(r,s) → r·d + s`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientVector {
    d: Dim,
    a: ComplexVector,
}

impl CoefficientVector {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(d: Dim, a: Vec<Complex64>) -> Result<Self> {
        Self::from_vector(d, ComplexVector::from_vec(a))
    }

    pub fn from_vector(d: Dim, a: ComplexVector) -> Result<Self> {
        Self::with_tolerance(d, a, Self::NORM_TOL)
    }

    /// Accepts `a` if `|‖a‖ − 1| ≤ tol` and renormalizes it exactly.
    pub fn with_tolerance(d: Dim, a: ComplexVector, tol: f64) -> Result<Self> {
        if a.len() != d.group_order() {
            return Err(Error::DimensionMismatch {
                expected: d.group_order(),
                found: a.len(),
            });
        }
        let norm = a.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > tol {
            return Err(Error::NotNormalized(norm));
        }
        Ok(CoefficientVector {
            d,
            a: a.unscale(norm),
        })
    }

    /// Rescales any non-zero vector to unit norm.
    pub fn normalized(d: Dim, a: ComplexVector) -> Result<Self> {
        let norm = a.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized(norm));
        }
        Self::with_tolerance(d, a.unscale(norm), f64::INFINITY)
    }

    /// Unit weight on a single double-Bell branch.
    pub fn basis(d: Dim, idx: WeylIndex) -> Self {
        let mut a = ComplexVector::zeros(d.group_order());
        a[idx.flat(d)] = Complex64::new(1.0, 0.0);
        CoefficientVector { d, a }
    }

    pub fn dim(&self) -> Dim {
        self.d
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.a
    }

    pub fn get(&self, idx: WeylIndex) -> Complex64 {
        self.a[idx.flat(self.d)]
    }

    /// Global phase chosen so that the first component of largest magnitude
    /// is real and positive.
    pub fn phase_fixed(&self) -> Self {
        let max = self.a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let pivot = self
            .a
            .iter()
            .find(|z| z.norm() >= max - 1e-9)
            .copied()
            .unwrap_or(Complex64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        CoefficientVector {
            d: self.d,
            a: self.a.map(|z| z * phase),
        }
    }

    /// `min_θ ‖a − e^{iθ} b‖₂`.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        if self.a.len() != other.a.len() {
            return f64::INFINITY;
        }
        let overlap = other.a.dotc(&self.a);
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        (&self.a - other.a.map(|z| z * phase)).norm()
    }

    /// Whether some global phase makes every component real and non-negative.
    pub fn is_nonnegative_real(&self, tol: f64) -> bool {
        self.phase_fixed()
            .a
            .iter()
            .all(|z| z.im.abs() <= tol && z.re >= -tol)
    }

    /// `r = a a†`.
    pub fn r_matrix(&self) -> RMatrix {
        RMatrix::rank_one(self.d, &self.a).expect("unit vector gives a valid r-matrix")
    }
}

/// Which output clone. `Clone2` is the branch paired with the input in
/// `|U_rs⟩⟩₂₃` (perfect at `a = e₀`); `Clone1` is paired with the ancilla.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CloneLabel {
    Clone1,
    Clone2,
}

impl CloneLabel {
    pub const BOTH: [CloneLabel; 2] = [CloneLabel::Clone1, CloneLabel::Clone2];

    /// Position in the `clone1 ⊗ clone2 ⊗ input` factorization.
    pub fn subsystem(self) -> usize {
        match self {
            CloneLabel::Clone1 => 0,
            CloneLabel::Clone2 => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CloneLabel::Clone1 => "clone1",
            CloneLabel::Clone2 => "clone2",
        }
    }
}

impl fmt::Display for CloneLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CloneLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clone1" | "1" | "eve" | "E" | "A" => Ok(CloneLabel::Clone1),
            "clone2" | "2" | "bob" | "B" => Ok(CloneLabel::Clone2),
            _ => Err(Error::Unknown {
                kind: "clone label",
                name: s.to_string(),
            }),
        }
    }
}

/// `R = Σ (a_rs a*_{r's'} / d) U_rs† U_{r's'} ⊗ |U_rs⟩⟩⟨⟨U_{r's'}|`.
pub fn choi_from_coefficients(a: &CoefficientVector) -> Result<ChoiOperator> {
    let norm = a.a.norm();
    if (norm - 1.0).abs() > CoefficientVector::NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let d = a.d;
    let n = d.get();
    // R = (1/d) Σ_k v_k v_k†, v_k[(i,x)] = Σ_a a_a (U_a†)_{ik} |U_a⟩⟩_x
    let mut cols = ComplexMatrix::zeros(n * n * n, n);
    for idx in d.indices() {
        let coeff = a.get(idx);
        if coeff.norm_sqr() == 0.0 {
            continue;
        }
        let u = MonomialUnitary::weyl(d, idx)?;
        let bell = crate::wh_group::bell_vector(d, idx)?;
        for (i, k, w) in u.adjoint().entries() {
            for (x, b) in bell.iter().enumerate() {
                if b.norm_sqr() > 0.0 {
                    cols[(i * n * n + x, k)] += coeff * w * b;
                }
            }
        }
    }
    ChoiOperator::new(d, (&cols * cols.adjoint()).unscale(n as f64))
}

/// Double-Bell purification `|Ψ⟩ = Σ a_rs |U_rs†⟩⟩₁₄ |U_rs⟩⟩₂₃ / d`.
pub fn joint_output_state(a: &CoefficientVector) -> Result<JointOutputState> {
    let d = a.d;
    let n = d.get();
    let mut psi = ComplexVector::zeros(n.pow(4));
    for idx in d.indices() {
        let coeff = a.get(idx);
        if coeff.norm_sqr() == 0.0 {
            continue;
        }
        let u = crate::wh_group::weyl_operator(d, idx)?;
        let ud = u.adjoint();
        for i1 in 0..n {
            for i4 in 0..n {
                let left = ud[(i1, i4)];
                if left.norm_sqr() == 0.0 {
                    continue;
                }
                for i2 in 0..n {
                    for i3 in 0..n {
                        let right = u[(i2, i3)];
                        if right.norm_sqr() > 0.0 {
                            psi[((i1 * n + i2) * n + i3) * n + i4] += coeff * left * right;
                        }
                    }
                }
            }
        }
    }
    JointOutputState::new(d, psi.unscale(n as f64))
}

/// An extremal covariant cloner with its Choi operator cached.
#[derive(Clone, Debug)]
pub struct Cloner {
    coefficients: CoefficientVector,
    choi: ChoiOperator,
}

impl Cloner {
    pub fn new(coefficients: CoefficientVector) -> Result<Self> {
        let choi = choi_from_coefficients(&coefficients)?;
        Ok(Cloner { coefficients, choi })
    }

    pub fn dim(&self) -> Dim {
        self.coefficients.d
    }

    pub fn coefficients(&self) -> &CoefficientVector {
        &self.coefficients
    }

    pub fn choi(&self) -> &ChoiOperator {
        &self.choi
    }

    /// `[F_clone1, F_clone2]` for a pure input.
    pub fn fidelities(&self, psi: &PureState) -> Result<[f64; 2]> {
        channel_fidelities(&self.choi, psi)
    }

    pub fn fidelity(&self, psi: &PureState, which: CloneLabel) -> Result<f64> {
        Ok(self.fidelities(psi)?[which.subsystem()])
    }

    pub fn fidelity_integrand(&self, which: CloneLabel) -> QuadraticIntegrand {
        fidelity_integrand(&self.choi, which)
    }

    pub fn average_fidelity(&self, e: &Ensemble, which: CloneLabel) -> Result<f64> {
        channel_average_fidelity(&self.choi, e, which)
    }

    pub fn report(&self, e: &Ensemble) -> Result<FidelityReport> {
        self.dim().check(e.dim().get())?;
        let per_state = match e.finite_states() {
            Some(states) => states
                .iter()
                .enumerate()
                .map(|(id, (psi, weight))| {
                    let [f1, f2] = self.fidelities(psi)?;
                    Ok(StateFidelity {
                        id,
                        weight: *weight,
                        clone1: f1,
                        clone2: f2,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        Ok(FidelityReport {
            per_state,
            averages: [
                self.average_fidelity(e, CloneLabel::Clone1)?,
                self.average_fidelity(e, CloneLabel::Clone2)?,
            ],
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateFidelity {
    pub id: usize,
    pub weight: f64,
    pub clone1: f64,
    pub clone2: f64,
}

/// Per-state rows (finite ensembles only) and ensemble averages
/// `[F̄_clone1, F̄_clone2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FidelityReport {
    pub per_state: Vec<StateFidelity>,
    pub averages: [f64; 2],
}

impl FidelityReport {
    pub fn average(&self, which: CloneLabel) -> f64 {
        self.averages[which.subsystem()]
    }
}

/// Single-clone fidelities of any cloning channel on a pure input.
pub fn channel_fidelities(r: &ChoiOperator, psi: &PureState) -> Result<[f64; 2]> {
    let d = r.dim();
    let out = apply_channel(r, &DensityMatrix::from_pure(psi))?;
    let mut f = [0.0; 2];
    for which in CloneLabel::BOTH {
        let rho = out.clone_state(d, which.subsystem())?;
        f[which.subsystem()] = psi.expectation(&rho).re;
    }
    Ok(f)
}

/// The fidelity of `which` as `ψ ↦ Tr[(P_ψ ⊗ P_ψ) Q]`.
///
/// `Q` is the partial transpose (on the input) of `R` reduced to
/// `clone_k ⊗ input`.
pub fn fidelity_integrand(r: &ChoiOperator, which: CloneLabel) -> QuadraticIntegrand {
    let n = r.dim().get();
    let reduced =
        partial_trace(r.matrix(), &[n, n, n], &[which.subsystem(), 2]).expect("Choi shape is d³");
    let q = partial_transpose(&reduced, &[n, n], 1).expect("d² operator");
    QuadraticIntegrand::new(n, q).expect("d² operator")
}

/// Ensemble-average fidelity of any cloning channel. Haar averages use the
/// exact moment rule, everything else evaluates the channel per state.
pub fn channel_average_fidelity(r: &ChoiOperator, e: &Ensemble, which: CloneLabel) -> Result<f64> {
    r.dim().check(e.dim().get())?;
    let avg = match e.kind() {
        EnsembleKind::Haar => {
            e.average(Integrand::Quadratic(&fidelity_integrand(r, which)), None)?
        }
        _ => {
            let f = |psi: &PureState| {
                channel_fidelities(r, psi).map_or(f64::NAN, |f| f[which.subsystem()])
            };
            e.average(Integrand::Function(&f), None)?
        }
    };
    Ok(avg.value)
}

pub fn clone_fidelity(a: &CoefficientVector, psi: &PureState, which: CloneLabel) -> Result<f64> {
    a.d.check(psi.dim())?;
    Cloner::new(a.clone())?.fidelity(psi, which)
}

pub fn average_fidelity(a: &CoefficientVector, e: &Ensemble, which: CloneLabel) -> Result<f64> {
    Cloner::new(a.clone())?.average_fidelity(e, which)
}
