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

//! Closed-form optimal cloners for the preset ensembles.
//!
//! Coefficients are ordered `(p,q) → p·d + q`. At `d = 2` this is
//! `(I, σz, σx, −iσy)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::cloner::CoefficientVector;
use crate::ensembles::Ensemble;
use crate::linalg::ComplexVector;
use crate::wh_group::Dim;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    Bb84,
    SixState,
    Universal,
    Fourier,
    Cube,
    Phase,
    MultiPhase,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Bb84,
        Preset::SixState,
        Preset::Universal,
        Preset::Fourier,
        Preset::Cube,
        Preset::Phase,
        Preset::MultiPhase,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Bb84 => "bb84",
            Preset::SixState => "six-state",
            Preset::Universal => "universal",
            Preset::Fourier => "fourier",
            Preset::Cube => "cube",
            Preset::Phase => "phase",
            Preset::MultiPhase => "multi-phase",
        }
    }

    /// Presets defined only for qubits.
    pub fn qubit_only(self) -> bool {
        matches!(
            self,
            Preset::Bb84 | Preset::SixState | Preset::Cube | Preset::Phase
        )
    }

    /// The input ensemble this preset is optimal for.
    pub fn ensemble(self, d: Dim, grid: Option<usize>) -> Result<Ensemble> {
        Ensemble::by_name(self.name(), d, grid)
    }

    /// The preset whose closed forms apply at dimension `d`.
    fn closed_form(self, d: Dim) -> Result<Preset> {
        if self.qubit_only() && d.get() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: d.get(),
            });
        }
        Ok(match self {
            Preset::Phase => Preset::Bb84,
            Preset::Cube => Preset::SixState,
            Preset::MultiPhase if d.get() == 2 => Preset::Bb84,
            Preset::MultiPhase => {
                return Err(Error::Unknown {
                    kind: "closed form",
                    name: format!("multi-phase at d = {}", d.get()),
                })
            }
            p => p,
        })
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bb84" => Ok(Preset::Bb84),
            "six-state" | "six_state" | "sixstate" => Ok(Preset::SixState),
            "universal" | "haar" => Ok(Preset::Universal),
            "fourier" | "fourier-pair" => Ok(Preset::Fourier),
            "cube" => Ok(Preset::Cube),
            "phase" | "equatorial" | "phase-covariant" => Ok(Preset::Phase),
            "multi-phase" | "multiphase" => Ok(Preset::MultiPhase),
            _ => Err(Error::Unknown {
                kind: "preset",
                name: s.to_string(),
            }),
        }
    }
}

fn lower_bound(p: Preset, d: usize) -> f64 {
    match p {
        Preset::SixState => 1.0 / 3.0,
        Preset::Universal => 1.0 / (d as f64 + 1.0),
        _ => 0.0,
    }
}

fn check_domain(p: Preset, f: f64, d: usize) -> Result<()> {
    let low = lower_bound(p, d);
    if !(low..=1.0).contains(&f) {
        return Err(Error::OutOfDomain {
            what: "F_B",
            value: f,
            domain: format!("[{low}, 1]"),
        });
    }
    Ok(())
}

/// Best achievable clone-1 fidelity at clone-2 fidelity `f_b`.
pub fn golden_tradeoff(preset: Preset, f_b: f64, d: Dim) -> Result<f64> {
    let p = preset.closed_form(d)?;
    let n = d.get() as f64;
    check_domain(p, f_b, d.get())?;
    let f = f_b;
    Ok(match p {
        Preset::Bb84 => 0.5 + (f * (1.0 - f)).sqrt(),
        Preset::SixState => 1.0 - f / 2.0 + ((3.0 * f - 1.0) * (1.0 - f)).sqrt() / 2.0,
        Preset::Fourier => {
            f / n + (n - 1.0) * (1.0 - f) / n + (2.0 / n) * ((n - 1.0) * f * (1.0 - f)).sqrt()
        }
        Preset::Universal => {
            1.0 - ((n * n - 2.0) * f + 2.0 - n) / (n * n)
                + (2.0 * (n - 1.0).sqrt() / (n * n)) * ((1.0 - f) * ((n + 1.0) * f - 1.0)).sqrt()
        }
        _ => unreachable!("closed_form maps to the four base presets"),
    })
}

/// The optimal coefficient vector reaching clone-2 fidelity `f_b`.
pub fn golden_coefficients(preset: Preset, f_b: f64, d: Dim) -> Result<CoefficientVector> {
    let p = preset.closed_form(d)?;
    check_domain(p, f_b, d.get())?;
    let n = d.get() as f64;
    let f = f_b;
    let a: Vec<f64> = d
        .indices()
        .map(|idx| {
            let identity = idx.p == 0 && idx.q == 0;
            match p {
                Preset::Bb84 => match (idx.p, idx.q) {
                    (0, 0) => f,
                    (0, 1) => 1.0 - f,
                    _ => (f * (1.0 - f)).sqrt(),
                },
                Preset::SixState if identity => ((3.0 * f - 1.0) / 2.0).sqrt(),
                Preset::SixState => ((1.0 - f) / 2.0).sqrt(),
                Preset::Fourier => match (idx.p, idx.q) {
                    (0, 0) => f,
                    (0, _) | (_, 0) => (f * (1.0 - f) / (n - 1.0)).sqrt(),
                    _ => (1.0 - f) / (n - 1.0),
                },
                Preset::Universal if identity => (((n + 1.0) * f - 1.0) / n).sqrt(),
                Preset::Universal => ((1.0 - f) / (n * (n - 1.0))).sqrt(),
                _ => unreachable!("closed_form maps to the four base presets"),
            }
        })
        .collect();
    let v = ComplexVector::from_iterator(a.len(), a.into_iter().map(|x| Complex64::new(x, 0.0)));
    CoefficientVector::from_vector(d, v)
}

/// Fidelity of the optimal symmetric cloner.
pub fn symmetric_fidelity(preset: Preset, d: Dim) -> Result<f64> {
    let p = preset.closed_form(d)?;
    let n = d.get() as f64;
    Ok(match p {
        Preset::Bb84 => 0.5 + 1.0 / 8f64.sqrt(),
        Preset::SixState => 5.0 / 6.0,
        Preset::Universal => 0.5 + 1.0 / (n + 1.0),
        Preset::Fourier => (1.0 + 1.0 / n.sqrt()) / 2.0,
        _ => unreachable!("closed_form maps to the four base presets"),
    })
}
