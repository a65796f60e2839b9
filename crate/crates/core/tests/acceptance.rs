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

//! Acceptance suite. Every criterion prints one line; the process exits
//! non-zero if any of them fails.

use std::process::ExitCode;
use std::time::Instant;

use cloneforge::choi::{
    choi_from_r, is_covariant, is_extremal, is_trace_preserving, r_matrix_from_choi,
    strong_covariance_residual, twirl,
};
use cloneforge::cloner::{channel_average_fidelity, choi_from_coefficients, joint_output_state};
use cloneforge::ensembles::{Integrand, SampleBudget};
use cloneforge::linalg::max_abs_diff;
use cloneforge::optimizer::{
    fidelity_forms, golden_coefficients, golden_tradeoff, pareto_sweep, symmetric_fidelity,
    symmetric_optimum, uniform_grid, FidelityForm, Preset, TradeoffCurve, DEFAULT_GRID_POINTS,
};
use cloneforge::random::{random_channel_choi, random_coefficients, random_r_matrix};
use cloneforge::{CloneLabel, Cloner, CoefficientVector, Dim, Ensemble, PureState, RMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SYMMETRIC_TOL: f64 = 1e-8;
const FRONTIER_TOL: f64 = 1e-6;

/// Result of one criterion: pass flag and a short summary of the worst case.
struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = fn() -> Result<Outcome, cloneforge::Error>;

fn dim(d: usize) -> Dim {
    Dim::new(d).expect("small dimension")
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Worst |F_E − golden(F_B)| over the non-degenerate points of a sweep.
fn frontier_error(curve: &TradeoffCurve, preset: Preset, d: Dim) -> Result<f64, cloneforge::Error> {
    let mut worst: f64 = 0.0;
    for p in curve.points.iter().filter(|p| !p.degenerate) {
        let golden = golden_tradeoff(preset, p.f_b.min(1.0), d)?;
        worst = worst.max((p.f_e - golden).abs());
    }
    Ok(worst)
}

fn symmetric_and_frontier(preset: Preset, dims: &[usize]) -> Result<Outcome, cloneforge::Error> {
    let mut sym_err: f64 = 0.0;
    let mut front_err: f64 = 0.0;
    for &n in dims {
        let d = dim(n);
        let e = preset.ensemble(d, None)?;
        let p = symmetric_optimum(&e, 1e-12)?;
        let want = symmetric_fidelity(preset, d)?;
        sym_err = sym_err.max((p.f_b - want).abs()).max((p.f_e - want).abs());
        let curve = pareto_sweep(&e, &uniform_grid(DEFAULT_GRID_POINTS))?;
        front_err = front_err.max(frontier_error(&curve, preset, d)?);
    }
    Ok(Outcome {
        pass: sym_err <= SYMMETRIC_TOL && front_err <= FRONTIER_TOL,
        detail: format!("symmetric err {sym_err:.2e}, frontier err {front_err:.2e}"),
    })
}

fn c1_bb84() -> Result<Outcome, cloneforge::Error> {
    symmetric_and_frontier(Preset::Bb84, &[2])
}

fn c2_six_state() -> Result<Outcome, cloneforge::Error> {
    symmetric_and_frontier(Preset::SixState, &[2])
}

fn c3_universal() -> Result<Outcome, cloneforge::Error> {
    symmetric_and_frontier(Preset::Universal, &[2, 3, 4, 5])
}

fn c4_fourier() -> Result<Outcome, cloneforge::Error> {
    symmetric_and_frontier(Preset::Fourier, &[2, 3, 4, 5])
}

fn c5_cube() -> Result<Outcome, cloneforge::Error> {
    let d = dim(2);
    let grid = uniform_grid(DEFAULT_GRID_POINTS);
    let cube = pareto_sweep(&Ensemble::cube(), &grid)?;
    let six = pareto_sweep(&Ensemble::six_state(), &grid)?;
    let uni = pareto_sweep(&Ensemble::universal(d), &grid)?;
    let mut golden_err: f64 = 0.0;
    for p in cube.points.iter().filter(|p| !p.degenerate) {
        let want = golden_coefficients(Preset::Cube, p.f_b.min(1.0), d)?;
        golden_err = golden_err.max(p.coefficients.distance_up_to_phase(&want));
    }
    let mut cross_err: f64 = 0.0;
    for ((c, s), u) in cube.points.iter().zip(&six.points).zip(&uni.points) {
        if c.degenerate || s.degenerate || u.degenerate {
            continue;
        }
        cross_err = cross_err
            .max(c.coefficients.distance_up_to_phase(&s.coefficients))
            .max(c.coefficients.distance_up_to_phase(&u.coefficients));
    }
    let opt = |e: &Ensemble| symmetric_optimum(e, 1e-12).map(|p| p.coefficients);
    let (a, b, c) = (
        opt(&Ensemble::cube())?,
        opt(&Ensemble::six_state())?,
        opt(&Ensemble::universal(d))?,
    );
    cross_err = cross_err
        .max(a.distance_up_to_phase(&b))
        .max(a.distance_up_to_phase(&c));
    let nonneg = cube.points.iter().all(|p| p.nonnegative_real);
    Ok(Outcome {
        pass: golden_err <= 1e-6 && cross_err <= 1e-8,
        detail: format!(
            "closed-form coefficient err {golden_err:.2e}, cube/six-state/universal err {cross_err:.2e}, non-negative real optima: {nonneg}"
        ),
    })
}

fn c6_equatorial() -> Result<Outcome, cloneforge::Error> {
    let grid = uniform_grid(DEFAULT_GRID_POINTS);
    let phase = pareto_sweep(&Ensemble::equatorial(8)?, &grid)?;
    let bb84 = pareto_sweep(&Ensemble::bb84(), &grid)?;
    let worst = phase
        .points
        .iter()
        .zip(&bb84.points)
        .map(|(p, q)| (p.f_b - q.f_b).abs().max((p.f_e - q.f_e).abs()))
        .fold(0.0, f64::max);
    Ok(Outcome {
        pass: phase.points.len() == bb84.points.len() && worst <= 1e-8,
        detail: format!("max pointwise difference {worst:.2e}"),
    })
}

fn c7_structure() -> Result<Outcome, cloneforge::Error> {
    let tol = 1e-10;
    let mut r = rng(7);
    let mut worst = [0.0f64; 5];
    let mut ranks_ok = true;
    for n in [2, 3, 5] {
        let d = dim(n);
        for _ in 0..100 {
            let a = random_coefficients(d, &mut r);
            let choi = choi_from_coefficients(&a)?;
            let ext = is_extremal(&choi, tol)?;
            let psi = joint_output_state(&a)?;
            ranks_ok &= ext.rank == n;
            let residuals = [
                is_trace_preserving(&choi, tol).residual,
                is_covariant(&choi, tol).residual,
                ext.projector_residual,
                strong_covariance_residual(&psi),
                max_abs_diff(psi.choi().matrix(), choi.matrix()),
            ];
            for (w, x) in worst.iter_mut().zip(residuals) {
                *w = w.max(x);
            }
        }
    }
    Ok(Outcome {
        pass: ranks_ok && worst.iter().all(|&w| w <= tol),
        detail: format!(
            "TP {:.1e}, covariance {:.1e}, projector {:.1e}, strong covariance {:.1e}, purification {:.1e}, rank d: {ranks_ok}",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    })
}

fn rank_one(form: &FidelityForm) -> Result<RMatrix, cloneforge::Error> {
    let (values, vectors) = cloneforge::linalg::hermitian_eigen(form.matrix());
    let top = vectors.column(values.len() - 1).into_owned();
    CoefficientVector::normalized(form.dim(), top).map(|a| a.r_matrix())
}

fn c8_convex_set() -> Result<Outcome, cloneforge::Error> {
    let tol = 1e-10;
    let mut r = rng(8);
    let mut excess: f64 = f64::NEG_INFINITY;
    let mut attain: f64 = 0.0;
    let mut consistency: f64 = 0.0;
    for n in [2, 3] {
        let d = dim(n);
        let mut ensembles = vec![
            Ensemble::fourier_pair(d),
            Ensemble::universal(d),
            Ensemble::multi_phase(d, 8)?,
        ];
        if n == 2 {
            ensembles.extend([
                Ensemble::bb84(),
                Ensemble::six_state(),
                Ensemble::cube(),
                Ensemble::equatorial(8)?,
            ]);
        }
        for e in &ensembles {
            let (phi_a, phi_b) = fidelity_forms(e)?;
            for (phi, which) in [(&phi_a, CloneLabel::Clone1), (&phi_b, CloneLabel::Clone2)] {
                let top = phi.max_eigenvalue();
                for _ in 0..50 {
                    let rm = random_r_matrix(d, &mut r);
                    let via_form = phi.eval_r(&rm);
                    // the same number through the channel itself
                    let via_channel = channel_average_fidelity(&choi_from_r(&rm)?, e, which)?;
                    consistency = consistency.max((via_form - via_channel).abs());
                    excess = excess.max(via_channel - top);
                }
                let best = choi_from_r(&rank_one(phi)?)?;
                attain = attain.max((channel_average_fidelity(&best, e, which)? - top).abs());
            }
        }
    }
    Ok(Outcome {
        pass: excess <= tol && attain <= tol && consistency <= tol,
        detail: format!(
            "max Tr[Φr] − λ_max {excess:.2e}, rank-one gap {attain:.2e}, form/channel mismatch {consistency:.2e}"
        ),
    })
}

fn c9_twirl() -> Result<Outcome, cloneforge::Error> {
    let mut r = rng(9);
    let mut predicates: f64 = 0.0;
    let mut idempotence: f64 = 0.0;
    let mut round_trip: f64 = 0.0;
    for n in [2, 3] {
        let d = dim(n);
        for _ in 0..20 {
            let choi = random_channel_choi(d, n, &mut r);
            let t = twirl(&choi);
            predicates = predicates
                .max(is_trace_preserving(&t, 1e-10).residual)
                .max(is_covariant(&t, 1e-10).residual);
            idempotence = idempotence.max(max_abs_diff(twirl(&t).matrix(), t.matrix()));
            let back = choi_from_r(&r_matrix_from_choi(&t)?)?;
            round_trip = round_trip.max(max_abs_diff(back.matrix(), t.matrix()));
        }
    }
    Ok(Outcome {
        pass: predicates <= 1e-10 && idempotence <= 1e-12 && round_trip <= 1e-10,
        detail: format!(
            "TP/covariance {predicates:.2e}, idempotence {idempotence:.2e}, r round trip {round_trip:.2e}"
        ),
    })
}

fn c10_haar() -> Result<Outcome, cloneforge::Error> {
    let mut r = rng(10);
    let mut worst_sigma: f64 = 0.0;
    let mut seed = 1000;
    for n in [2, 3] {
        let d = dim(n);
        let e = Ensemble::universal(d);
        for _ in 0..10 {
            let cloner = Cloner::new(random_coefficients(d, &mut r))?;
            for which in CloneLabel::BOTH {
                let exact = cloner.average_fidelity(&e, which)?;
                let f = |psi: &PureState| cloner.fidelity(psi, which).unwrap_or(f64::NAN);
                seed += 1;
                let mc = e.monte_carlo(
                    Integrand::Function(&f),
                    SampleBudget {
                        samples: 100_000,
                        seed,
                    },
                );
                worst_sigma = worst_sigma.max((exact - mc.value).abs() / mc.std_error);
            }
        }
    }
    Ok(Outcome {
        pass: worst_sigma <= 3.0,
        detail: format!("worst deviation {worst_sigma:.2} standard errors over 40 comparisons"),
    })
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("1 BB84 symmetric optimum and frontier", c1_bb84),
        ("2 six-state symmetric optimum and frontier", c2_six_state),
        (
            "3 universal d=2..5 symmetric optimum and frontier",
            c3_universal,
        ),
        (
            "4 Fourier pair d=2..5 symmetric optimum and frontier",
            c4_fourier,
        ),
        ("5 cube optimum coefficients and equivalences", c5_cube),
        ("6 equatorial frontier equals BB84 frontier", c6_equatorial),
        (
            "7 structural invariants of double-Bell cloners",
            c7_structure,
        ),
        (
            "8 convex-set oracle: extremal cloners suffice",
            c8_convex_set,
        ),
        ("9 twirl correctness", c9_twirl),
        ("10 Haar moment rule against Monte Carlo", c10_haar),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] criterion {name}: {detail} ({:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
