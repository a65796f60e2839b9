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

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {0} outside supported range 2..={max}", max = crate::wh_group::MAX_DIM)]
    DimensionOutOfRange(usize),

    #[error("Weyl index ({p},{q}) out of range for d = {d}")]
    IndexOutOfRange { d: usize, p: usize, q: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid tensor factorization: {0}")]
    BadFactorization(String),

    #[error("vector not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("operator is not covariant (max commutator norm {0:e})")]
    NotCovariant(f64),

    #[error("invalid r-matrix: {0}")]
    InvalidRMatrix(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("{what} = {value} outside domain {domain}")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        domain: String,
    },

    #[error("target F_B = {target} unreachable (achievable range [{low}, {high}])")]
    Unreachable { target: f64, low: f64, high: f64 },

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("Haar average of a non-quadratic integrand needs a sample budget")]
    NeedsSampleBudget,

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
}

pub type Result<T> = std::result::Result<T, Error>;
