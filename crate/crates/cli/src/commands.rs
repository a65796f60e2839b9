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

use std::fmt::Write as _;
use std::path::Path;

use cloneforge::choi::{
    is_covariant, is_extremal, is_trace_preserving, strong_covariance_residual, twirl as twirl_choi,
};
use cloneforge::cloner::joint_output_state;
use cloneforge::linalg::max_abs_diff;
use cloneforge::optimizer::{
    constrained_optimum, golden_coefficients, pareto_sweep, symmetric_fidelity, symmetric_optimum,
    uniform_grid, Preset, TradeoffPoint,
};
use cloneforge::random::random_channel_from_seed;
use cloneforge::{ChoiOperator, Cloner, Dim, Ensemble, Error};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::io::{emit, read_json, to_json, ChoiFile, Descriptor};
use crate::{CliError, Format, Shared};

pub const VERIFY_TOL: f64 = 1e-10;
pub const OPTIMIZE_TOL: f64 = 1e-8;
/// Inputs to `twirl` further than this from Hermitian are rejected.
const HERMITIAN_TOL: f64 = 1e-8;
const PSD_TOL: f64 = 1e-10;

fn dim(shared: &Shared, fallback: usize) -> Result<Dim, CliError> {
    Ok(Dim::new(shared.d.unwrap_or(fallback))?)
}

fn tolerance(shared: &Shared, default: f64) -> Result<f64, CliError> {
    let tol = shared.tol.unwrap_or(default);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::input(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(tol)
}

fn load_descriptor(path: &Path) -> Result<(Descriptor, cloneforge::CoefficientVector), CliError> {
    let desc: Descriptor = read_json(path)?;
    let a = desc.coefficients()?;
    Ok((desc, a))
}

pub fn gen(
    shared: &Shared,
    preset: Option<&str>,
    coeffs: Option<&Path>,
    fb: Option<f64>,
) -> Result<u8, CliError> {
    let descriptor = match (preset, coeffs) {
        (_, Some(path)) => {
            let (desc, a) = load_descriptor(path)?;
            if let Some(d) = shared.d {
                a.dim().check_external(d)?;
            }
            Descriptor::from_coefficients(&a, desc.metadata)
        }
        (Some(name), None) => {
            let preset: Preset = name.parse()?;
            let d = dim(shared, 2)?;
            let (a, f_b, source) = if preset_has_closed_form(preset, d) {
                let f_b = match fb {
                    Some(f) => f,
                    None => symmetric_fidelity(preset, d)?,
                };
                (golden_coefficients(preset, f_b, d)?, f_b, "closed-form")
            } else {
                let e = preset.ensemble(d, shared.grid)?;
                let tol = tolerance(shared, OPTIMIZE_TOL)?;
                let point = match fb {
                    Some(f) => constrained_optimum(&e, f, tol)?,
                    None => symmetric_optimum(&e, tol)?,
                };
                (point.coefficients, point.f_b, "numerical")
            };
            let mut meta = Map::new();
            meta.insert("preset".into(), json!(preset.name()));
            meta.insert("F_B".into(), json!(f_b));
            meta.insert("source".into(), json!(source));
            Descriptor::from_coefficients(&a, meta)
        }
        (None, None) => return Err(CliError::input("gen needs a preset or --coeffs")),
    };
    emit(shared.out.as_deref(), &to_json(&descriptor))?;
    Ok(0)
}

fn preset_has_closed_form(preset: Preset, d: Dim) -> bool {
    symmetric_fidelity(preset, d).is_ok()
}

trait CheckExternal {
    fn check_external(self, d: usize) -> Result<(), Error>;
}

impl CheckExternal for Dim {
    fn check_external(self, d: usize) -> Result<(), Error> {
        if self.get() == d {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: d,
                found: self.get(),
            })
        }
    }
}

#[derive(Serialize)]
struct StateRow {
    id: usize,
    weight: f64,
    clone1: f64,
    clone2: f64,
}

#[derive(Serialize)]
struct EvalReport {
    ensemble: String,
    d: usize,
    averages: Averages,
    per_state: Vec<StateRow>,
}

#[derive(Serialize)]
struct Averages {
    clone1: f64,
    clone2: f64,
}

pub fn eval(shared: &Shared, descriptor: &Path, ensemble: &str) -> Result<u8, CliError> {
    let (_, a) = load_descriptor(descriptor)?;
    let d = dim(shared, a.dim().get())?;
    let e = Ensemble::by_name(ensemble, d, shared.grid)?;
    let report = Cloner::new(a)?.report(&e)?;
    let rows: Vec<StateRow> = report
        .per_state
        .iter()
        .map(|s| StateRow {
            id: s.id,
            weight: s.weight,
            clone1: s.clone1,
            clone2: s.clone2,
        })
        .collect();
    let text = match shared.format {
        Format::Json => to_json(&EvalReport {
            ensemble: e.name().to_string(),
            d: d.get(),
            averages: Averages {
                clone1: report.averages[0],
                clone2: report.averages[1],
            },
            per_state: rows,
        }),
        Format::Csv => {
            let mut s = String::from("state,weight,F_clone1,F_clone2\n");
            for r in &rows {
                writeln!(s, "{},{},{},{}", r.id, r.weight, r.clone1, r.clone2).unwrap();
            }
            writeln!(s, "average,1,{},{}", report.averages[0], report.averages[1]).unwrap();
            s
        }
    };
    emit(shared.out.as_deref(), &text)?;
    Ok(0)
}

#[derive(Serialize)]
struct VerifyFlags {
    trace_preserving: bool,
    covariant: bool,
    extremal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    strongly_covariant: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    purification: Option<bool>,
}

#[derive(Serialize)]
struct VerificationReport {
    d: usize,
    tolerance: f64,
    tp_residual: f64,
    covariance_max: f64,
    projector_residual: Option<f64>,
    rank: Option<usize>,
    strong_cov_residual: Option<f64>,
    purification_residual: Option<f64>,
    pass: VerifyFlags,
    overall: bool,
}

fn verification(r: &ChoiOperator, tol: f64, purified: Option<(f64, f64)>) -> VerificationReport {
    let tp = is_trace_preserving(r, tol);
    let cov = is_covariant(r, tol);
    let ext = is_extremal(r, tol).ok();
    let pass = VerifyFlags {
        trace_preserving: tp.pass,
        covariant: cov.pass,
        extremal: ext.is_some_and(|c| c.pass),
        strongly_covariant: purified.map(|(s, _)| s <= tol),
        purification: purified.map(|(_, p)| p <= tol),
    };
    let overall = pass.trace_preserving
        && pass.covariant
        && pass.extremal
        && pass.strongly_covariant.unwrap_or(true)
        && pass.purification.unwrap_or(true);
    VerificationReport {
        d: r.dim().get(),
        tolerance: tol,
        tp_residual: tp.residual,
        covariance_max: cov.residual,
        projector_residual: ext.map(|c| c.projector_residual),
        rank: ext.map(|c| c.rank),
        strong_cov_residual: purified.map(|(s, _)| s),
        purification_residual: purified.map(|(_, p)| p),
        pass,
        overall,
    }
}

pub fn verify(
    shared: &Shared,
    descriptor: Option<&Path>,
    mix: Option<&[String]>,
) -> Result<u8, CliError> {
    let tol = tolerance(shared, VERIFY_TOL)?;
    let report = match (descriptor, mix) {
        (_, Some([f1, f2, w])) => {
            let w: f64 = w
                .parse()
                .ok()
                .filter(|w: &f64| (0.0..=1.0).contains(w))
                .ok_or_else(|| {
                    CliError::input(format!("mixing weight must be in [0, 1], got {w}"))
                })?;
            let (_, a1) = load_descriptor(Path::new(f1))?;
            let (_, a2) = load_descriptor(Path::new(f2))?;
            let r1 = Cloner::new(a1)?;
            let r2 = Cloner::new(a2)?;
            let r = r1.choi().mix(r2.choi(), w)?;
            verification(&r, tol, None)
        }
        (Some(path), None) => {
            let (_, a) = load_descriptor(path)?;
            let psi = joint_output_state(&a)?;
            let cloner = Cloner::new(a)?;
            let strong = strong_covariance_residual(&psi);
            let purification = max_abs_diff(psi.choi().matrix(), cloner.choi().matrix());
            verification(cloner.choi(), tol, Some((strong, purification)))
        }
        _ => {
            return Err(CliError::input(
                "verify needs a descriptor or --mix F1 F2 W",
            ))
        }
    };
    emit(shared.out.as_deref(), &to_json(&report))?;
    Ok(if report.overall { 0 } else { CliError::VERIFY })
}

fn point_json(p: &TradeoffPoint) -> Value {
    json!({
        "lambda": p.lambda,
        "F_B": p.f_b,
        "F_E": p.f_e,
        "degenerate": p.degenerate,
        "nonnegative_real": p.nonnegative_real,
    })
}

pub fn optimize(
    shared: &Shared,
    ensemble: &str,
    fb: Option<f64>,
    sweep: Option<usize>,
) -> Result<u8, CliError> {
    let tol = tolerance(shared, OPTIMIZE_TOL)?;
    let d = dim(shared, 2)?;
    let e = Ensemble::by_name(ensemble, d, shared.grid)?;
    let text = if let Some(n) = sweep {
        if n < 2 {
            return Err(CliError::input("--sweep needs at least 2 points"));
        }
        let curve = pareto_sweep(&e, &uniform_grid(n))?;
        match shared.format {
            Format::Csv => {
                let mut s = String::from("lambda,F_B,F_E,degenerate\n");
                for p in &curve.points {
                    writeln!(s, "{},{},{},{}", p.lambda, p.f_b, p.f_e, p.degenerate).unwrap();
                }
                s
            }
            Format::Json => {
                let points: Vec<Value> = curve
                    .points
                    .iter()
                    .map(|p| {
                        let mut v = point_json(p);
                        v["coefficients"] = json!(
                            Descriptor::from_coefficients(&p.coefficients, Map::new()).coefficients
                        );
                        v
                    })
                    .collect();
                to_json(&json!({ "ensemble": curve.ensemble, "d": d.get(), "points": points }))
            }
        }
    } else {
        let point = match fb {
            Some(target) => constrained_optimum(&e, target, tol)?,
            None => symmetric_optimum(&e, tol)?,
        };
        match shared.format {
            Format::Csv => format!(
                "lambda,F_B,F_E,degenerate\n{},{},{},{}\n",
                point.lambda, point.f_b, point.f_e, point.degenerate
            ),
            Format::Json => {
                let mut meta = Map::new();
                meta.insert("ensemble".into(), json!(e.name()));
                meta.insert("F_B".into(), json!(point.f_b));
                meta.insert("source".into(), json!("numerical"));
                let desc = Descriptor::from_coefficients(&point.coefficients, meta);
                to_json(&json!({
                    "ensemble": e.name(),
                    "d": d.get(),
                    "point": point_json(&point),
                    "descriptor": desc,
                }))
            }
        }
    };
    emit(shared.out.as_deref(), &text)?;
    Ok(0)
}

#[derive(Serialize)]
struct ChoiSummary {
    tp_residual: f64,
    covariance_max: f64,
    min_eigenvalue: f64,
    psd: bool,
    trace_preserving: bool,
    covariant: bool,
}

fn summarize(r: &ChoiOperator, tol: f64) -> ChoiSummary {
    let tp = is_trace_preserving(r, tol);
    let cov = is_covariant(r, tol);
    let min = r.min_eigenvalue();
    ChoiSummary {
        tp_residual: tp.residual,
        covariance_max: cov.residual,
        min_eigenvalue: min,
        psd: min >= -PSD_TOL,
        trace_preserving: tp.pass,
        covariant: cov.pass,
    }
}

pub fn twirl(
    shared: &Shared,
    input: Option<&Path>,
    random_channel: Option<u64>,
) -> Result<u8, CliError> {
    let tol = tolerance(shared, VERIFY_TOL)?;
    let r = match (input, random_channel) {
        (_, Some(seed)) => random_channel_from_seed(dim(shared, 2)?, seed),
        (Some(path), None) => {
            let file: ChoiFile = read_json(path)?;
            let r = file.to_choi()?;
            if let Some(d) = shared.d {
                r.dim().check_external(d)?;
            }
            let herm = r.hermiticity_residual();
            if herm > HERMITIAN_TOL {
                return Err(CliError::input(format!(
                    "Choi matrix is not Hermitian (residual {herm:e})"
                )));
            }
            r
        }
        (None, None) => {
            return Err(CliError::input(
                "twirl needs an input file or --random-channel SEED",
            ))
        }
    };
    let twirled = twirl_choi(&r);
    let before = summarize(&r, tol);
    let after = summarize(&twirled, tol);
    let choi = ChoiFile::from_choi(&twirled);
    let mut report = json!({
        "d": r.dim().get(),
        "tolerance": tol,
        "input": before,
        "output": after,
    });
    match shared.out.as_deref() {
        Some(path) => emit(Some(path), &to_json(&choi))?,
        None => report["choi"] = json!(choi),
    }
    emit(None, &to_json(&report))?;
    Ok(0)
}
