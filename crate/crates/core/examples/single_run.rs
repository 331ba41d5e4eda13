//! Minimal library walkthrough: discretize, integrate, measure.
//!
//! Runs the periodic benchmark once at degree 3 on 32 uniform cells with
//! the corrected interpolant and prints the six error measures.

use std::sync::Arc;

use dg1d::basis::radau_points;
use dg1d::correction::{initialize, InitMethod};
use dg1d::field::ModalField;
use dg1d::harness::problem_by_name;
use dg1d::mesh::Mesh1D;
use dg1d::metrics::measure_all;
use dg1d::operator::dg_rhs;
use dg1d::timestep::{integrate, ButcherTableau, StepPolicy};

fn main() -> dg1d::Result<()> {
    let problem = problem_by_name("periodic-expsin")?;
    let degree = 3;
    let mesh = Arc::new(Mesh1D::uniform(32));

    let state = initialize(
        InitMethod::CorrectedInterpolant,
        problem.initial_data(),
        problem.boundary_condition(),
        &mesh,
        degree,
    )?;

    let bc = problem.boundary_condition().clone();
    let rhs = move |u: &ModalField, t: f64| dg_rhs(u, &bc, t);
    let policy = StepPolicy::default_for(degree, mesh.h_min(), problem.t_end());
    let end = integrate(state, &rhs, &policy, &ButcherTableau::rk4())?;

    let exact = problem.exact_at(end.t_final);
    let errors = measure_all(&end.state, &exact, &radau_points(degree)?);
    println!("{} steps to t = {:.6}", end.steps, end.t_final);
    for (i, e) in errors.iter().enumerate() {
        println!("e{} = {e:.6e}", i + 1);
    }
    Ok(())
}
