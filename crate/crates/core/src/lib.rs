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

//! Extremal covariant 1→2 cloning machines for the discrete Weyl-Heisenberg group.
//!
//! A cloner takes a qudit state on `H` to a joint state of two clones on `H ⊗ H`.
//! It is stored as its Choi operator `R` on `clone1 ⊗ clone2 ⊗ input`
//! (composite index `((i1·d)+i2)·d+i3`).
//!
//! Every covariant cloner is `R = Σ r_ab T_ab` for a positive, unit-trace
//! `d²×d²` matrix `r`. The extremal ones have rank-one `r = a a†` and are
//! realised by the double-Bell state
//! `|Ψ⟩ = Σ a_rs |U_rs†⟩⟩₁₄ |U_rs⟩⟩₂₃ / d`.
//! Single-clone average fidelities are quadratic forms `a†Φa`, so optimal
//! cloners and their trade-off curves come from Hermitian eigenproblems.
//!
//! Modules:
//! - [`wh_group`]: Weyl operators `U_pq` and Bell vectors.
//! - [`choi`]: channel action and the structural predicates. Twirling and
//!   r-matrix coordinates live here too.
//! - [`cloner`]: double-Bell cloners and their fidelities.
//! - [`ensembles`]: invariant input families with exact averaging rules.
//! - [`optimizer`]: optimal cloners from fidelity forms. Closed-form references
//!   sit in the same module.
//!
//! ```
//! use cloneforge::optimizer::{golden_coefficients, symmetric_optimum, Preset};
//! use cloneforge::{CloneLabel, Cloner, Dim, Ensemble};
//!
//! let six = Ensemble::six_state();
//! let best = symmetric_optimum(&six, 1e-10)?;
//! assert!((best.f_b - 5.0 / 6.0).abs() < 1e-9);
//!
//! let a = golden_coefficients(Preset::SixState, 5.0 / 6.0, Dim::new(2)?)?;
//! let cloner = Cloner::new(a)?;
//! let f = cloner.average_fidelity(&six, CloneLabel::Clone1)?;
//! assert!((f - 5.0 / 6.0).abs() < 1e-12);
//! # Ok::<(), cloneforge::Error>(())
//! ```

pub mod choi;
pub mod cloner;
pub mod ensembles;
mod error;
pub mod linalg;
pub mod optimizer;
pub mod random;
pub mod wh_group;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use choi::{ChoiOperator, DensityMatrix, JointOutputState, RMatrix};
pub use cloner::{CloneLabel, Cloner, CoefficientVector, FidelityReport};
pub use ensembles::{Ensemble, EnsembleKind};
pub use linalg::ComplexMatrix;
pub use optimizer::{FidelityForm, TradeoffCurve, TradeoffPoint};
pub use wh_group::{Dim, PureState, WeylIndex};
