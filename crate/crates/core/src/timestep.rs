//! Explicit Runge-Kutta time integration of the semidiscrete system.
//!
//! The integrator is generic over explicit Butcher tableaus.  Two classical
//! schemes are built in (the four-stage fourth-order method and the
//! three-stage third-order strong-stability-preserving method), and
//! arbitrary explicit tableaus can be loaded from a plain-text file.
//!
//! Step sizes come from a [`StepPolicy`]: either a fixed number of steps, or
//! a mesh-dependent rule `dt = coefficient * h_min^exponent`.  The default
//! policy picks `dt = min(0.05 h_min, 0.5 h_min^ceil((2k+1)/4))`, which
//! keeps the temporal error of a fourth-order integrator below the spatial
//! superconvergence floor while respecting the CFL limit.

use std::io::BufRead;

use crate::field::ModalField;
use crate::{Error, Result};

/// An explicit Runge-Kutta tableau: stage weights `a`, output weights `b`,
/// and abscissae `c`, plus the scheme's classical order for step control and
/// reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    order: usize,
}

impl ButcherTableau {
    /// The classical four-stage fourth-order method.
    pub fn rk4() -> Self {
        ButcherTableau {
            a: vec![
                vec![0.0, 0.0, 0.0, 0.0],
                vec![0.5, 0.0, 0.0, 0.0],
                vec![0.0, 0.5, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ],
            b: vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
            c: vec![0.0, 0.5, 0.5, 1.0],
            order: 4,
        }
    }

    /// The three-stage third-order strong-stability-preserving method.
    pub fn ssprk33() -> Self {
        ButcherTableau {
            a: vec![
                vec![0.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.25, 0.25, 0.0],
            ],
            b: vec![1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
            c: vec![0.0, 1.0, 0.5],
            order: 3,
        }
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i][j]
    }

    pub fn b(&self, i: usize) -> f64 {
        self.b[i]
    }

    pub fn c(&self, i: usize) -> f64 {
        self.c[i]
    }

    /// Parse a tableau from text.
    ///
    /// Format: a first line `stages order`, then `stages` rows of the `a`
    /// matrix (each with `stages` entries), then the `b` row, then the `c`
    /// row.  Blank lines and `#` comments are skipped.
    pub fn from_text(reader: impl BufRead) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let row: Vec<f64> = body
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|_| Error::InvalidTableau(format!("bad number {tok:?}")))
                })
                .collect::<Result<_>>()?;
            rows.push(row);
        }
        if rows.is_empty() || rows[0].len() != 2 {
            return Err(Error::InvalidTableau(
                "first line must be `stages order`".into(),
            ));
        }
        let stages = rows[0][0] as usize;
        let order = rows[0][1] as usize;
        if stages == 0 || rows[0][0].fract() != 0.0 || rows[0][1].fract() != 0.0 {
            return Err(Error::InvalidTableau("stages and order must be positive integers".into()));
        }
        if rows.len() != stages + 3 {
            return Err(Error::InvalidTableau(format!(
                "expected {} rows after the header, found {}",
                stages + 2,
                rows.len() - 1
            )));
        }
        for (i, row) in rows[1..].iter().enumerate() {
            if row.len() != stages {
                return Err(Error::InvalidTableau(format!(
                    "row {} has {} entries, expected {stages}",
                    i + 1,
                    row.len()
                )));
            }
        }
        let tableau = ButcherTableau {
            a: rows[1..=stages].to_vec(),
            b: rows[stages + 1].clone(),
            c: rows[stages + 2].clone(),
            order,
        };
        tableau.validate()?;
        Ok(tableau)
    }

    /// Serialize in the same format `from_text` accepts.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.stages(), self.order);
        let row = |r: &[f64]| {
            r.iter()
                .map(|x| format!("{x:.16e}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        for r in &self.a {
            out.push_str(&row(r));
            out.push('\n');
        }
        out.push_str(&row(&self.b));
        out.push('\n');
        out.push_str(&row(&self.c));
        out.push('\n');
        out
    }

    /// Check the structural conditions for a consistent explicit method:
    /// strictly lower-triangular `a`, weights summing to one, and
    /// `c_i = sum_j a_ij` within rounding.
    pub fn validate(&self) -> Result<()> {
        let s = self.stages();
        if self.a.len() != s || self.c.len() != s {
            return Err(Error::InvalidTableau("inconsistent stage counts".into()));
        }
        for (i, row) in self.a.iter().enumerate() {
            for (j, &aij) in row.iter().enumerate() {
                if j >= i && aij != 0.0 {
                    return Err(Error::InvalidTableau(format!(
                        "a[{i}][{j}] = {aij} makes the method implicit"
                    )));
                }
            }
        }
        let bsum: f64 = self.b.iter().sum();
        if (bsum - 1.0).abs() > 1e-14 {
            return Err(Error::InvalidTableau(format!(
                "weights sum to {bsum}, expected 1"
            )));
        }
        for i in 0..s {
            let row_sum: f64 = self.a[i].iter().sum();
            if (row_sum - self.c[i]).abs() > 1e-14 {
                return Err(Error::InvalidTableau(format!(
                    "c[{i}] = {} but row {i} of a sums to {row_sum}",
                    self.c[i]
                )));
            }
        }
        Ok(())
    }
}

/// How many steps to take, or how to pick the step size from the mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepMode {
    /// Exactly this many equal steps over `[0, t_end]`.
    FixedCount(usize),
    /// `dt = coefficient * h_min^exponent`, truncating the final step.
    CflLike { coefficient: f64, exponent: i32 },
}

/// A step-size rule together with the integration horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct StepPolicy {
    pub mode: StepMode,
    pub t_end: f64,
}

impl StepPolicy {
    pub fn fixed_count(steps: usize, t_end: f64) -> Self {
        StepPolicy { mode: StepMode::FixedCount(steps), t_end }
    }

    pub fn cfl_like(coefficient: f64, exponent: i32, t_end: f64) -> Self {
        StepPolicy {
            mode: StepMode::CflLike { coefficient, exponent },
            t_end,
        }
    }

    /// The default rule `dt = min(0.05 h, 0.5 h^ceil((2k+1)/4))`, resolved
    /// to a single power law for the mesh at hand.
    pub fn default_for(degree: usize, h_min: f64, t_end: f64) -> Self {
        let exponent = (2 * degree + 1).div_ceil(4);
        let linear = 0.05 * h_min;
        let power = 0.5 * h_min.powi(exponent as i32);
        if power < linear {
            Self::cfl_like(0.5, exponent as i32, t_end)
        } else {
            Self::cfl_like(0.05, 1, t_end)
        }
    }

    /// The step size this policy produces on a mesh with smallest cell
    /// `h_min`.
    pub fn dt(&self, h_min: f64) -> Result<f64> {
        let dt = match self.mode {
            StepMode::FixedCount(n) => {
                if n == 0 {
                    return Err(Error::NonPositiveStep(0.0));
                }
                self.t_end / n as f64
            }
            StepMode::CflLike { coefficient, exponent } => {
                coefficient * h_min.powi(exponent)
            }
        };
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::NonPositiveStep(dt));
        }
        Ok(dt)
    }
}

/// One explicit Runge-Kutta step of size `dt` from time `t`.
pub fn rk_step(
    state: &ModalField,
    rhs: &impl Fn(&ModalField, f64) -> ModalField,
    t: f64,
    dt: f64,
    tableau: &ButcherTableau,
) -> ModalField {
    let stages = tableau.stages();
    let mut slopes: Vec<ModalField> = Vec::with_capacity(stages);
    for i in 0..stages {
        let mut yi = state.clone();
        for (j, kj) in slopes.iter().enumerate() {
            let a = tableau.a(i, j);
            if a != 0.0 {
                yi.scaled_add(dt * a, kj);
            }
        }
        slopes.push(rhs(&yi, t + tableau.c(i) * dt));
    }
    let mut out = state.clone();
    for (i, ki) in slopes.iter().enumerate() {
        out.scaled_add(dt * tableau.b(i), ki);
    }
    out
}

/// Final state of an integration plus bookkeeping.
#[derive(Debug, Clone)]
pub struct IntegrationResult {
    pub state: ModalField,
    pub steps: usize,
    pub t_final: f64,
}

/// Integrate from `t = 0` to `policy.t_end`.
pub fn integrate(
    state: ModalField,
    rhs: &impl Fn(&ModalField, f64) -> ModalField,
    policy: &StepPolicy,
    tableau: &ButcherTableau,
) -> Result<IntegrationResult> {
    integrate_observed(state, rhs, policy, tableau, |_, _, _| {})
}

/// Like [`integrate`], invoking `observe(step_index, t_after, state)` after
/// every completed step.
pub fn integrate_observed(
    state: ModalField,
    rhs: &impl Fn(&ModalField, f64) -> ModalField,
    policy: &StepPolicy,
    tableau: &ButcherTableau,
    mut observe: impl FnMut(usize, f64, &ModalField),
) -> Result<IntegrationResult> {
    let t_end = policy.t_end;
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::NonPositiveStep(t_end));
    }
    let h_min = state.mesh().h_min();
    let dt = policy.dt(h_min)?;
    let mut u = state;
    let mut steps = 0usize;
    match policy.mode {
        StepMode::FixedCount(n) => {
            for i in 0..n {
                // Recompute t from the index so round-off cannot drift.
                let t = i as f64 * dt;
                u = rk_step(&u, rhs, t, dt, tableau);
                steps += 1;
                observe(steps, (i + 1) as f64 * dt, &u);
            }
        }
        StepMode::CflLike { .. } => {
            let mut t = 0.0;
            while t < t_end {
                let remaining = t_end - t;
                let step = if remaining < dt * (1.0 + 1e-12) {
                    remaining
                } else {
                    dt
                };
                u = rk_step(&u, rhs, t, step, tableau);
                t += step;
                steps += 1;
                observe(steps, t, &u);
            }
        }
    }
    Ok(IntegrationResult { state: u, steps, t_final: t_end })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh1D;
    use crate::operator::{dg_rhs, BoundaryCondition};
    use std::io::Cursor;
    use std::sync::Arc;

    fn scalar_field(value: f64) -> ModalField {
        let mesh = Arc::new(Mesh1D::uniform(1));
        ModalField::from_coeffs(mesh, 0, vec![value])
    }

    #[test]
    fn builtin_tableaus_validate() {
        ButcherTableau::rk4().validate().unwrap();
        ButcherTableau::ssprk33().validate().unwrap();
        assert_eq!(ButcherTableau::rk4().stages(), 4);
        assert_eq!(ButcherTableau::ssprk33().order(), 3);
    }

    #[test]
    fn zero_rhs_leaves_the_state_unchanged() {
        let u0 = scalar_field(3.25);
        let zero = |u: &ModalField, _t: f64| {
            let mut z = u.clone();
            z.scale(0.0);
            z
        };
        let policy = StepPolicy::fixed_count(7, 1.0);
        let result = integrate(u0, &zero, &policy, &ButcherTableau::rk4()).unwrap();
        assert_eq!(result.state.coeff(0, 0), 3.25);
        assert_eq!(result.steps, 7);
        assert_eq!(result.t_final, 1.0);
    }

    /// Final-time error of the scalar problem y' = -y, y(0) = 1 over [0,1].
    fn decay_error(tableau: &ButcherTableau, steps: usize) -> f64 {
        let rhs = |u: &ModalField, _t: f64| {
            let mut v = u.clone();
            v.scale(-1.0);
            v
        };
        let policy = StepPolicy::fixed_count(steps, 1.0);
        let result = integrate(scalar_field(1.0), &rhs, &policy, tableau).unwrap();
        (result.state.coeff(0, 0) - (-1.0f64).exp()).abs()
    }

    #[test]
    fn classical_orders_show_in_step_halving() {
        let ratio4 = decay_error(&ButcherTableau::rk4(), 10)
            / decay_error(&ButcherTableau::rk4(), 20);
        assert!(
            (ratio4 - 16.0).abs() < 2.0,
            "fourth-order halving ratio was {ratio4}"
        );
        let ratio3 = decay_error(&ButcherTableau::ssprk33(), 10)
            / decay_error(&ButcherTableau::ssprk33(), 20);
        assert!(
            (ratio3 - 8.0).abs() < 1.0,
            "third-order halving ratio was {ratio3}"
        );
    }

    #[test]
    fn nonautonomous_terms_use_stage_times() {
        // y' = 2t has exact solution t^2; any method with consistent c's
        // integrates it exactly through the quadratic order conditions.
        let rhs = |u: &ModalField, t: f64| {
            let mut v = u.clone();
            v.scale(0.0);
            *v.coeff_mut(0, 0) = 2.0 * t;
            v
        };
        let policy = StepPolicy::fixed_count(4, 1.0);
        let result =
            integrate(scalar_field(0.0), &rhs, &policy, &ButcherTableau::rk4()).unwrap();
        assert!((result.state.coeff(0, 0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tableau_text_round_trips() {
        let original = ButcherTableau::ssprk33();
        let text = original.to_text();
        let parsed = ButcherTableau::from_text(Cursor::new(text)).unwrap();
        assert_eq!(parsed, original);
    }

    #[test]
    fn malformed_tableaus_are_rejected() {
        let missing_rows = "3 3\n0 0 0\n1 0 0\n";
        assert!(ButcherTableau::from_text(Cursor::new(missing_rows)).is_err());
        let implicit = "2 2\n0 1\n0 0\n0.5 0.5\n0 1\n";
        assert!(ButcherTableau::from_text(Cursor::new(implicit)).is_err());
        let bad_weights = "2 2\n0 0\n1 0\n0.7 0.7\n0 1\n";
        assert!(ButcherTableau::from_text(Cursor::new(bad_weights)).is_err());
        let bad_c = "2 2\n0 0\n1 0\n0.5 0.5\n0 0.25\n";
        assert!(ButcherTableau::from_text(Cursor::new(bad_c)).is_err());
    }

    #[test]
    fn cfl_policy_truncates_the_final_step() {
        let mesh = Arc::new(Mesh1D::uniform(4));
        let u0 = ModalField::zero(Arc::clone(&mesh), 0);
        let rhs = |u: &ModalField, _t: f64| {
            let mut v = u.clone();
            v.scale(0.0);
            *v.coeff_mut(0, 0) = 1.0;
            v
        };
        // dt = 0.3, t_end = 1.0: steps at 0.3, 0.6, 0.9, then 0.1.
        let policy = StepPolicy { mode: StepMode::CflLike { coefficient: 0.3 / mesh.h_min(), exponent: 1 }, t_end: 1.0 };
        let result = integrate(u0, &rhs, &policy, &ButcherTableau::rk4()).unwrap();
        assert_eq!(result.steps, 4);
        assert_eq!(result.t_final, 1.0);
        // The integrated constant-1 slope must reach exactly t_end.
        assert!((result.state.coeff(0, 0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn default_policy_picks_the_tighter_rule() {
        // Coarse mesh, k = 3: 0.05 h < 0.5 h^2, so the linear rule wins.
        let coarse = StepPolicy::default_for(3, std::f64::consts::PI / 8.0, 1.0);
        assert_eq!(coarse.mode, StepMode::CflLike { coefficient: 0.05, exponent: 1 });
        // Fine mesh, k = 3: the power rule is smaller.
        let fine = StepPolicy::default_for(3, 1e-3, 1.0);
        assert_eq!(fine.mode, StepMode::CflLike { coefficient: 0.5, exponent: 2 });
    }

    #[test]
    fn degenerate_policies_error_out() {
        assert!(StepPolicy::fixed_count(0, 1.0).dt(0.1).is_err());
        assert!(StepPolicy::cfl_like(0.0, 1, 1.0).dt(0.1).is_err());
        let u0 = scalar_field(1.0);
        let rhs = |u: &ModalField, _t: f64| u.clone();
        let bad = StepPolicy::fixed_count(4, 0.0);
        assert!(integrate(u0, &rhs, &bad, &ButcherTableau::rk4()).is_err());
    }

    #[test]
    fn advection_step_preserves_mass() {
        let mesh = Arc::new(Mesh1D::split(8).unwrap());
        let mut u = ModalField::zero(Arc::clone(&mesh), 2);
        for j in 0..u.n_cells() {
            for m in 0..=2 {
                *u.coeff_mut(j, m) = ((j + 7 * m) as f64).sin();
            }
        }
        let bc = BoundaryCondition::periodic();
        let rhs = move |w: &ModalField, t: f64| dg_rhs(w, &bc, t);
        let before = u.integral();
        let after = rk_step(&u, &rhs, 0.0, 0.01, &ButcherTableau::rk4()).integral();
        assert!(
            (after - before).abs() < 1e-13 * (1.0 + before.abs()),
            "mass drift {}",
            after - before
        );
    }
}
