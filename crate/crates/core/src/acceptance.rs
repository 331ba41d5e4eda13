//! The acceptance suite: one self-contained check per shipping criterion.
//!
//! Each criterion reruns the relevant benchmark from scratch and reduces it
//! to a single pass/fail with a human-readable detail line.  The suite backs
//! both the `check` subcommand and the `acceptance` integration test, and is
//! sized to finish in minutes on a laptop: degrees 1 through 3, at most 128
//! cells, double precision throughout.

use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::basis::default_quadrature;
use crate::correction::{
    build_correction_table, build_interpolant, correction_sum, ds_inverse,
    f_inner_product, g_coefficients, radau_project_modal, InitMethod,
};
use crate::field::{
    bilinear_form, bilinear_form_cell, gauss_radau_project, CellEval, ModalField,
    SmoothFunction,
};
use crate::harness::{
    problem_by_name, run_experiment, single_run, ExperimentConfig, MeshKind, StepRule,
};
use crate::jet::Jet;
use crate::mesh::Mesh1D;
use crate::metrics::{ErrorReport, ErrorSample, NOISE_FLOOR};
use crate::operator::{dg_rhs, BoundaryCondition};
use crate::timestep::{integrate_observed, ButcherTableau, StepPolicy};
use crate::Result;

/// The verdict on one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: usize,
    pub label: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionOutcome {
    /// The one-line summary printed by the suite.
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("criterion {} ({}): {verdict} - {}", self.id, self.label, self.detail)
    }
}

/// Run every criterion and return the outcomes in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    let run_a = study("inflow-sine", 2, 4, 8, 128);
    let run_b = study("periodic-expsin", 2, 4, 8, 128);
    vec![
        criterion_1(&run_a, &run_b),
        criterion_2(&run_a),
        criterion_3(&run_a),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ]
}

/// Convergence study helper: the named problem at the given degree and
/// method over a doubling sequence, with the problem's benchmark stepping.
fn study(
    problem: &str,
    degree: usize,
    method_id: u8,
    nmin: usize,
    nmax: usize,
) -> Result<ErrorReport> {
    let mut config = ExperimentConfig::new(problem)?;
    config.degree = degree;
    config.method = InitMethod::from_id(method_id)?;
    config.nmin = nmin;
    config.nmax = nmax;
    config.steps = StepRule::Auto;
    run_experiment(&config)
}

/// The rates between the final three meshes for one metric, if available.
fn last_two_rates(report: &ErrorReport, metric: usize) -> Option<(f64, f64)> {
    let n = report.rates().len();
    if n < 2 {
        return None;
    }
    match (report.rate(n - 2, metric), report.rate(n - 1, metric)) {
        (Some(a), Some(b)) => Some((a, b)),
        _ => None,
    }
}

fn both_in(rates: (f64, f64), lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&rates.0) && (lo..=hi).contains(&rates.1)
}

fn fail(id: usize, label: &'static str, detail: String) -> CriterionOutcome {
    CriterionOutcome { id, label, passed: false, detail }
}

fn criterion_1(
    run_a: &Result<ErrorReport>,
    run_b: &Result<ErrorReport>,
) -> CriterionOutcome {
    let label = "downwind and domain-average superconvergence rates (2k+1)";
    let (a, b) = match (run_a, run_b) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return fail(1, label, format!("study failed: {e}")),
    };
    let Some(e2) = last_two_rates(a, 1) else {
        return fail(1, label, "e2 rates unavailable (noise floor)".into());
    };
    let Some(e3_inflow) = last_two_rates(a, 2) else {
        return fail(1, label, "inflow e3 rates unavailable (noise floor)".into());
    };
    let Some(e3_periodic) = last_two_rates(b, 2) else {
        return fail(1, label, "periodic e3 rates unavailable (noise floor)".into());
    };
    let ok = both_in(e2, 4.6, 5.4)
        && e3_inflow.0 >= 4.4
        && e3_inflow.1 >= 4.4
        && both_in(e3_periodic, 4.6, 5.4);
    CriterionOutcome {
        id: 1,
        label,
        passed: ok,
        detail: format!(
            "k=2 inflow e2 rates {:.2}/{:.2} (want [4.6,5.4]), inflow e3 {:.2}/{:.2} (want >= 4.4), periodic e3 {:.2}/{:.2} (want [4.6,5.4])",
            e2.0, e2.1, e3_inflow.0, e3_inflow.1, e3_periodic.0, e3_periodic.1
        ),
    }
}

fn criterion_2(run_a: &Result<ErrorReport>) -> CriterionOutcome {
    let label = "interior Radau-point rates (k+1 derivative, k+2 value)";
    let a = match run_a {
        Ok(a) => a,
        Err(e) => return fail(2, label, format!("study failed: {e}")),
    };
    let (Some(e4), Some(e5)) = (last_two_rates(a, 3), last_two_rates(a, 4)) else {
        return fail(2, label, "rates unavailable (noise floor)".into());
    };
    let ok = both_in(e4, 2.7, 3.3) && both_in(e5, 3.6, 4.4);
    CriterionOutcome {
        id: 2,
        label,
        passed: ok,
        detail: format!(
            "k=2 e4 rates {:.2}/{:.2} (want [2.7,3.3]), e5 rates {:.2}/{:.2} (want [3.6,4.4])",
            e4.0, e4.1, e5.0, e5.1
        ),
    }
}

fn criterion_3(run_a: &Result<ErrorReport>) -> CriterionOutcome {
    let label = "cell-average superconvergence rate (2k+1)";
    let a = match run_a {
        Ok(a) => a,
        Err(e) => return fail(3, label, format!("study failed: {e}")),
    };
    let Some(e6) = last_two_rates(a, 5) else {
        return fail(3, label, "e6 rates unavailable (noise floor)".into());
    };
    let ok = both_in(e6, 4.6, 5.4);
    CriterionOutcome {
        id: 3,
        label,
        passed: ok,
        detail: format!("k=2 e6 rates {:.2}/{:.2} (want [4.6,5.4])", e6.0, e6.1),
    }
}

fn criterion_4() -> CriterionOutcome {
    let label = "benchmark table spot checks";
    match spot_checks() {
        Ok((detail, ok)) => CriterionOutcome { id: 4, label, passed: ok, detail },
        Err(e) => fail(4, label, format!("run failed: {e}")),
    }
}

fn spot_checks() -> Result<(String, bool)> {
    let tableau = ButcherTableau::rk4();
    let periodic = problem_by_name("periodic-expsin")?;
    let inflow = problem_by_name("inflow-sine")?;
    let run_p = single_run(
        &periodic,
        3,
        MeshKind::Split,
        8,
        InitMethod::CorrectedInterpolant,
        &tableau,
        StepRule::Auto,
    )?;
    let run_i = single_run(
        &inflow,
        3,
        MeshKind::Uniform,
        8,
        InitMethod::CorrectedInterpolant,
        &tableau,
        StepRule::Auto,
    )?;
    let checks = [
        ("periodic e2", run_p.errors[1], 8.22e-4),
        ("periodic e3", run_p.errors[2], 4.64e-5),
        ("periodic e4", run_p.errors[3], 1.90e-2),
        ("inflow e5", run_i.errors[4], 1.38e-5),
        ("inflow e6", run_i.errors[5], 2.41e-7),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, observed, reference) in checks {
        let dev = (observed / reference - 1.0).abs();
        if dev > 0.25 {
            ok = false;
        }
        parts.push(format!("{name} {observed:.3e} vs {reference:.2e} ({:+.1}%)", 100.0 * (observed / reference - 1.0)));
    }
    Ok((format!("k=3, N=8: {}", parts.join(", ")), ok))
}

fn criterion_5() -> CriterionOutcome {
    let label = "initialization method comparison at the downwind points";
    let corrected = study("inflow-sine", 3, 4, 2, 64);
    let projected = study("inflow-sine", 3, 1, 2, 64);
    let (m4, m1) = match (corrected, projected) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return fail(5, label, format!("study failed: {e}")),
    };
    let (Some(r4), Some(r1)) = (m4.last_rate(0), m1.last_rate(0)) else {
        return fail(5, label, "e1 rates unavailable (noise floor)".into());
    };
    let ok = r4 >= 6.6 && r1 <= 6.2;
    CriterionOutcome {
        id: 5,
        label,
        passed: ok,
        detail: format!(
            "k=3 final e1 rate: corrected interpolant {r4:.2} (want >= 6.6), L2 projection {r1:.2} (want <= 6.2)"
        ),
    }
}

fn criterion_6() -> CriterionOutcome {
    let label = "correction-machinery oracle suite";
    match correction_oracles() {
        Ok(detail) => CriterionOutcome { id: 6, label, passed: true, detail },
        Err(msg) => fail(6, label, msg),
    }
}

fn correction_oracles() -> std::result::Result<String, String> {
    // Part 1: the rational coefficient table against the direct operator
    // composition in floating point, plus the exact downwind zero and the
    // orthogonality (F_i, v) = 0 for v of degree at most k - i - 1.
    let mut max_table_dev = 0.0f64;
    let mut max_ortho = 0.0f64;
    let rule = default_quadrature(9);
    for k in 1..=5usize {
        let table = build_correction_table(k, k).map_err(|e| e.to_string())?;
        let mut composed = vec![0.0; k + 1];
        composed[k] = 1.0;
        composed = radau_project_modal(&ds_inverse(&composed), k);
        for i in 1..=k {
            if i > 1 {
                composed = radau_project_modal(&ds_inverse(&composed), k);
                for c in &mut composed {
                    *c = -*c;
                }
            }
            for (a, b) in table.f_modal(i).iter().zip(&composed) {
                max_table_dev = max_table_dev.max((a - b).abs());
            }
            if table.f_eval(i, 1.0) != 0.0 {
                return Err(format!("F_{i}(1) != 0 exactly for k={k}"));
            }
            for p in 0..k.saturating_sub(i) {
                let inner: f64 = rule
                    .nodes()
                    .iter()
                    .zip(rule.weights())
                    .map(|(&s, &w)| {
                        w * table.f_eval(i, s) * crate::basis::legendre_eval(p, s)
                    })
                    .sum();
                max_ortho = max_ortho.max(inner.abs());
            }
        }
    }
    if max_table_dev > 1e-13 {
        return Err(format!("table vs composition deviation {max_table_dev:.2e} > 1e-13"));
    }
    if max_ortho > 1e-13 {
        return Err(format!("orthogonality residual {max_ortho:.2e} > 1e-13"));
    }

    // Part 2: the interpolant residual identity
    // a_j(u - u_I^l, v) = hbar^l G_{l+1} (F_l, v)_j
    // on random cells with random test fields.
    let mut rng = StdRng::seed_from_u64(0x0dd5_eed5);
    let u0 = SmoothFunction::new(|x: Jet| x.sin().exp());
    let quad = default_quadrature(16);
    let mut max_identity = 0.0f64;
    for k in 1..=3usize {
        for l in 1..=k {
            for mesh in [
                Arc::new(Mesh1D::uniform(8)),
                Arc::new(Mesh1D::split(8).map_err(|e| e.to_string())?),
            ] {
                let table = build_correction_table(k, l).map_err(|e| e.to_string())?;
                let g = g_coefficients(&u0, &mesh, k, l + 1);
                let interp = build_interpolant(&u0, &mesh, k, l).map_err(|e| e.to_string())?;
                let minus_du = u0.derivative(1).scaled(-1.0);
                let mut interp_t = gauss_radau_project(&minus_du, &mesh, k);
                interp_t.scaled_add(-1.0, &correction_sum(&table, &g, &mesh, 1));
                let err =
                    |j: usize, s: f64| u0.eval_in_cell(&mesh, j, s) - interp.eval(j, s);
                let err_t = |j: usize, s: f64| {
                    minus_du.eval_in_cell(&mesh, j, s) - interp_t.eval(j, s)
                };
                for _ in 0..3 {
                    let j = rng.gen_range(0..mesh.n_cells());
                    let mut v = ModalField::zero(Arc::clone(&mesh), k);
                    for m in 0..=k {
                        *v.coeff_mut(j, m) = rng.gen_range(-1.0..1.0);
                    }
                    let upwind = if j == 0 {
                        err(mesh.n_cells() - 1, 1.0)
                    } else {
                        err(j - 1, 1.0)
                    };
                    let lhs = bilinear_form_cell(&mesh, j, &err, &err_t, upwind, &v, &quad);
                    let rhs = mesh.half_size(j).powi(l as i32)
                        * g[j][l]
                        * f_inner_product(&table, l, &mesh, j, v.cell(j));
                    max_identity = max_identity.max((lhs - rhs).abs());
                }
            }
        }
    }
    if max_identity > 1e-10 {
        return Err(format!("interpolant identity residual {max_identity:.2e} > 1e-10"));
    }
    Ok(format!(
        "table vs composition {max_table_dev:.1e} (k <= 5), F_i(1) = 0 exactly, orthogonality {max_ortho:.1e}, residual identity {max_identity:.1e}"
    ))
}

fn criterion_7() -> CriterionOutcome {
    let label = "structural invariants (mass, energy, Galerkin residual)";
    match invariants() {
        Ok(detail) => CriterionOutcome { id: 7, label, passed: true, detail },
        Err(msg) => fail(7, label, msg),
    }
}

fn invariants() -> std::result::Result<String, String> {
    let problem = problem_by_name("periodic-expsin").map_err(|e| e.to_string())?;
    let degree = 2;
    let mesh = Arc::new(Mesh1D::split(16).map_err(|e| e.to_string())?);
    let bc = BoundaryCondition::periodic();
    let state = crate::correction::initialize(
        InitMethod::CorrectedInterpolant,
        problem.initial_data(),
        &bc,
        &mesh,
        degree,
    )
    .map_err(|e| e.to_string())?;
    let policy = StepPolicy::default_for(degree, mesh.h_min(), problem.t_end());
    let dt = policy.dt(mesh.h_min()).map_err(|e| e.to_string())?;
    let total_steps = (problem.t_end() / dt).ceil() as usize;

    let mut rng = StdRng::seed_from_u64(0x5eed_cafe);
    let mut snapshot_steps: Vec<usize> =
        (0..10).map(|_| rng.gen_range(1..=total_steps)).collect();
    snapshot_steps.sort_unstable();
    snapshot_steps.dedup();

    let mass0 = state.integral();
    let mut prev_norm = state.l2_norm();
    let mut max_mass_drift = 0.0f64;
    let mut max_energy_growth = 0.0f64;
    let mut snapshots: Vec<(f64, ModalField)> = Vec::new();
    let rhs = {
        let bc = bc.clone();
        move |u: &ModalField, t: f64| dg_rhs(u, &bc, t)
    };
    let tableau = ButcherTableau::rk4();
    integrate_observed(state, &rhs, &policy, &tableau, |step, t, u| {
        max_mass_drift = max_mass_drift.max((u.integral() - mass0).abs());
        let norm = u.l2_norm();
        max_energy_growth = max_energy_growth.max((norm - prev_norm) / prev_norm.max(1.0));
        prev_norm = norm;
        if snapshot_steps.binary_search(&step).is_ok() {
            snapshots.push((t, u.clone()));
        }
    })
    .map_err(|e| e.to_string())?;

    let quad = default_quadrature(degree);
    let mut max_residual = 0.0f64;
    for (t, u) in &snapshots {
        let u_t = dg_rhs(u, &bc, *t);
        let mut v = ModalField::zero(Arc::clone(&mesh), degree);
        for j in 0..mesh.n_cells() {
            for m in 0..=degree {
                *v.coeff_mut(j, m) = rng.gen_range(-1.0..1.0);
            }
        }
        let wrap = u.downwind_trace(mesh.n_cells() - 1);
        let residual = bilinear_form(&mesh, u, &u_t, wrap, &v, &quad);
        max_residual = max_residual.max(residual.abs());
    }

    let mass_tol = 1e-12 * mass0.abs().max(1.0);
    if max_mass_drift > mass_tol {
        return Err(format!("mass drift {max_mass_drift:.2e} exceeds {mass_tol:.1e}"));
    }
    if max_energy_growth > 1e-12 {
        return Err(format!("per-step energy growth {max_energy_growth:.2e} > 1e-12"));
    }
    if max_residual > 1e-12 {
        return Err(format!("Galerkin residual {max_residual:.2e} > 1e-12"));
    }
    Ok(format!(
        "over {total_steps} periodic steps: mass drift {max_mass_drift:.1e}, worst energy growth {max_energy_growth:.1e}, Galerkin residual {max_residual:.1e} at {} sampled times",
        snapshots.len()
    ))
}

fn criterion_8() -> CriterionOutcome {
    let label = "noise-floor flagging of sub-precision targets";
    match flagging_mechanism() {
        Ok(detail) => CriterionOutcome { id: 8, label, passed: true, detail },
        Err(msg) => fail(8, label, msg),
    }
}

fn flagging_mechanism() -> std::result::Result<String, String> {
    // Degree-4 benchmark entries reach ~1e-21, far below double precision;
    // the suite therefore runs no degree-4 studies and instead verifies that
    // the reporting layer flags such entries and refuses to quote rates
    // through them.
    let samples = vec![
        ErrorSample { n_cells: 8, errors: [1e-6, 1e-6, 1e-6, 1e-4, 1e-5, 1e-6] },
        ErrorSample { n_cells: 16, errors: [1e-8, 1e-8, 5.76e-21, 1e-5, 1e-7, 1e-8] },
    ];
    let report = ErrorReport::from_samples(samples).map_err(|e| e.to_string())?;
    if !report.flagged(1, 2) {
        return Err("sub-floor entry was not flagged".into());
    }
    if report.rate(0, 2).is_some() {
        return Err("a rate was quoted through the noise floor".into());
    }
    if report.rate(0, 0).is_none() {
        return Err("a clean metric lost its rate".into());
    }
    if !report.to_table().contains('*') {
        return Err("plain-text table does not mark flagged entries".into());
    }
    Ok(format!(
        "entries below {NOISE_FLOOR:.0e} are flagged and rate-suppressed; no degree-4 study is part of this suite"
    ))
}
