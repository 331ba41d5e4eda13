//! The shipping gate: every release criterion, one pass/fail line each.
//!
//! This target is a thin wrapper around [`dg1d::acceptance::run_all`], which
//! is also what `dg1d check` executes.  Running it under `cargo test` keeps
//! the gate wired into the ordinary development loop; run with
//! `--nocapture` to see the per-criterion lines even on success.

use dg1d::acceptance::run_all;

#[test]
fn all_release_criteria_pass() {
    let outcomes = run_all();
    assert_eq!(outcomes.len(), 8, "the suite should cover all eight criteria");

    for outcome in &outcomes {
        println!("{}", outcome.line());
    }

    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.line())
        .collect();
    assert!(
        failed.is_empty(),
        "{} of {} acceptance criteria failed:\n{}",
        failed.len(),
        outcomes.len(),
        failed.join("\n")
    );
}
