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

//! On-disk formats: cloner descriptors and Choi matrices, both JSON with
//! complex numbers written as `[re, im]` pairs.

use std::fs;
use std::io::Write;
use std::path::Path;

use cloneforge::linalg::ComplexVector;
use cloneforge::{ChoiOperator, CoefficientVector, Complex64, ComplexMatrix, Dim};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

/// Norm slack accepted when loading a descriptor.
pub const LOAD_NORM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Descriptor {
    pub d: usize,
    pub coefficients: Vec<[f64; 2]>,
    #[serde(default)]
    pub metadata: Map<String, Value>,
}

impl Descriptor {
    pub fn from_coefficients(a: &CoefficientVector, metadata: Map<String, Value>) -> Self {
        Descriptor {
            d: a.dim().get(),
            coefficients: a.vector().iter().map(|z| [z.re, z.im]).collect(),
            metadata,
        }
    }

    pub fn coefficients(&self) -> Result<CoefficientVector, CliError> {
        let d = Dim::new(self.d).map_err(CliError::domain)?;
        let v = ComplexVector::from_iterator(
            self.coefficients.len(),
            self.coefficients
                .iter()
                .map(|&[re, im]| Complex64::new(re, im)),
        );
        if v.len() != d.group_order() {
            return Err(CliError::input(format!(
                "descriptor has {} coefficients, expected d² = {}",
                v.len(),
                d.group_order()
            )));
        }
        CoefficientVector::with_tolerance(d, v, LOAD_NORM_TOL)
            .map_err(|e| CliError::input(format!("descriptor: {e}")))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChoiFile {
    pub d: usize,
    /// Row-major `d³ × d³` entries.
    pub entries: Vec<[f64; 2]>,
}

impl ChoiFile {
    pub fn from_choi(r: &ChoiOperator) -> Self {
        let m = r.matrix();
        let mut entries = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        ChoiFile {
            d: r.dim().get(),
            entries,
        }
    }

    pub fn to_choi(&self) -> Result<ChoiOperator, CliError> {
        let d = Dim::new(self.d).map_err(CliError::domain)?;
        let n = self.d.pow(3);
        if self.entries.len() != n * n {
            return Err(CliError::input(format!(
                "Choi file has {} entries, expected (d³)² = {}",
                self.entries.len(),
                n * n
            )));
        }
        let m = ComplexMatrix::from_fn(n, n, |i, j| {
            let [re, im] = self.entries[i * n + j];
            Complex64::new(re, im)
        });
        ChoiOperator::new(d, m).map_err(|e| CliError::input(format!("Choi file: {e}")))
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

/// Writes to `path`, or to standard output when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::input(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::input(format!("stdout: {e}")))
        }
    }
}
