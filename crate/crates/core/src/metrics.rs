//! Superconvergence error functionals and convergence reporting.
//!
//! Six error measures are tracked per run, all evaluated against a smooth
//! reference solution:
//!
//! | name | quantity |
//! |------|----------|
//! | `e1` | max over cells of the downwind-point error |
//! | `e2` | RMS over cells of the downwind-point error |
//! | `e3` | absolute domain-average error, normalized by domain length |
//! | `e4` | max error of the x-derivative at interior left-Radau points |
//! | `e5` | max error of the value at interior right-Radau points |
//! | `e6` | RMS over cells of the cell-average error |
//!
//! A report collects these over a doubling sequence of mesh sizes, attaches
//! observed rates `log2(e(N) / e(2N))`, and flags entries below a noise
//! floor where rounding forbids any rate statement.

use crate::basis::{default_quadrature, RadauPointSet};
use crate::field::{ModalField, SmoothFunction};
use crate::{Error, Result};

/// Errors this close to machine precision are treated as pure round-off:
/// they are flagged in reports and excluded from rate computations.
pub const NOISE_FLOOR: f64 = 1e-13;

/// All six error measures of a numerical solution against the exact one.
///
/// `exact` must be the solution at the comparison time; its first derivative
/// is taken internally for the `e4` measure.
pub fn measure_all(
    u_h: &ModalField,
    exact: &SmoothFunction,
    radau: &RadauPointSet,
) -> [f64; 6] {
    let exact_dx = exact.derivative(1);
    let (e1, e2) = downwind_errors(u_h, exact);
    [
        e1,
        e2,
        domain_average_error(u_h, exact),
        radau_derivative_error(u_h, &exact_dx, radau),
        radau_value_error(u_h, exact, radau),
        cell_average_error(u_h, exact),
    ]
}

/// Max and RMS downwind-point errors `(e1, e2)`.
pub fn downwind_errors(u_h: &ModalField, exact: &SmoothFunction) -> (f64, f64) {
    let mesh = u_h.mesh();
    let n = u_h.n_cells();
    let mut max = 0.0f64;
    let mut sum_sq = 0.0;
    for j in 0..n {
        let err = u_h.downwind_trace(j) - exact.eval(mesh.right_edge(j));
        max = max.max(err.abs());
        sum_sq += err * err;
    }
    (max, (sum_sq / n as f64).sqrt())
}

/// Absolute error of the domain average, `|int (u - u_h)| / |domain|`.
pub fn domain_average_error(u_h: &ModalField, exact: &SmoothFunction) -> f64 {
    let mesh = u_h.mesh();
    let rule = default_quadrature(u_h.degree());
    let mut exact_integral = 0.0;
    for j in 0..u_h.n_cells() {
        let cell: f64 = rule
            .nodes()
            .iter()
            .zip(rule.weights())
            .map(|(&s, &w)| w * exact.eval(mesh.from_reference(j, s)))
            .sum();
        exact_integral += mesh.half_size(j) * cell;
    }
    (exact_integral - u_h.integral()).abs() / mesh.domain_length()
}

/// Max error of `d u_h / dx` at the interior left-Radau points.
pub fn radau_derivative_error(
    u_h: &ModalField,
    exact_dx: &SmoothFunction,
    radau: &RadauPointSet,
) -> f64 {
    assert_eq!(radau.degree(), u_h.degree(), "Radau set must match the field degree");
    let mesh = u_h.mesh();
    let mut max = 0.0f64;
    for j in 0..u_h.n_cells() {
        for &s in radau.left_interior() {
            let err = u_h.eval_deriv(j, s) - exact_dx.eval(mesh.from_reference(j, s));
            max = max.max(err.abs());
        }
    }
    max
}

/// Max error of `u_h` at the interior right-Radau points.
pub fn radau_value_error(
    u_h: &ModalField,
    exact: &SmoothFunction,
    radau: &RadauPointSet,
) -> f64 {
    assert_eq!(radau.degree(), u_h.degree(), "Radau set must match the field degree");
    let mesh = u_h.mesh();
    let mut max = 0.0f64;
    for j in 0..u_h.n_cells() {
        for &s in radau.right_interior() {
            let err = u_h.eval(j, s) - exact.eval(mesh.from_reference(j, s));
            max = max.max(err.abs());
        }
    }
    max
}

/// RMS over cells of the cell-average error.
pub fn cell_average_error(u_h: &ModalField, exact: &SmoothFunction) -> f64 {
    let mesh = u_h.mesh();
    let rule = default_quadrature(u_h.degree());
    let n = u_h.n_cells();
    let mut sum_sq = 0.0;
    for j in 0..n {
        let exact_avg: f64 = 0.5
            * rule
                .nodes()
                .iter()
                .zip(rule.weights())
                .map(|(&s, &w)| w * exact.eval(mesh.from_reference(j, s)))
                .sum::<f64>();
        let err = u_h.cell_mean(j) - exact_avg;
        sum_sq += err * err;
    }
    (sum_sq / n as f64).sqrt()
}

/// The observed order between a coarse and a fine error on meshes that
/// differ by a factor of two: `log2(coarse / fine)`.
pub fn convergence_rate(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// One row of a convergence study: the cell count and the six errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSample {
    pub n_cells: usize,
    pub errors: [f64; 6],
}

/// A convergence study over a doubling sequence of meshes.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    samples: Vec<ErrorSample>,
    rates: Vec<[Option<f64>; 6]>,
}

impl ErrorReport {
    /// Build a report, computing rates between consecutive samples.
    ///
    /// Cell counts must strictly double; rates touching a sub-noise-floor
    /// error are suppressed.
    pub fn from_samples(samples: Vec<ErrorSample>) -> Result<Self> {
        for pair in samples.windows(2) {
            if pair[1].n_cells != 2 * pair[0].n_cells {
                return Err(Error::NonDoublingSequence);
            }
        }
        let rates = samples
            .windows(2)
            .map(|pair| {
                let mut row = [None; 6];
                for (m, slot) in row.iter_mut().enumerate() {
                    let coarse = pair[0].errors[m];
                    let fine = pair[1].errors[m];
                    if coarse >= NOISE_FLOOR && fine >= NOISE_FLOOR {
                        *slot = Some(convergence_rate(coarse, fine));
                    }
                }
                row
            })
            .collect();
        Ok(ErrorReport { samples, rates })
    }

    pub fn samples(&self) -> &[ErrorSample] {
        &self.samples
    }

    /// Rate rows; row `i` sits between samples `i` and `i + 1`.
    pub fn rates(&self) -> &[[Option<f64>; 6]] {
        &self.rates
    }

    /// The observed rate for `metric` (0-based) between samples `i` and
    /// `i + 1`, if both errors were above the noise floor.
    pub fn rate(&self, i: usize, metric: usize) -> Option<f64> {
        self.rates.get(i).and_then(|row| row[metric])
    }

    /// The last computed rate for a metric, scanning from the finest pair.
    pub fn last_rate(&self, metric: usize) -> Option<f64> {
        self.rates.iter().rev().find_map(|row| row[metric])
    }

    /// Whether a sample's error sits below the noise floor.
    pub fn flagged(&self, sample: usize, metric: usize) -> bool {
        self.samples[sample].errors[metric] < NOISE_FLOOR
    }

    /// Serialize as CSV with header
    /// `N,e1,e2,e3,e4,e5,e6,r1,r2,r3,r4,r5,r6`.
    ///
    /// Errors and rates print with enough digits to round-trip exactly; rate
    /// fields are empty on the first row and wherever the rate is
    /// suppressed.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,e1,e2,e3,e4,e5,e6,r1,r2,r3,r4,r5,r6\n");
        for (i, sample) in self.samples.iter().enumerate() {
            let mut fields = vec![sample.n_cells.to_string()];
            for e in &sample.errors {
                fields.push(format!("{e:.16e}"));
            }
            for m in 0..6 {
                let rate = if i == 0 { None } else { self.rate(i - 1, m) };
                fields.push(rate.map_or_else(String::new, |r| format!("{r:.16e}")));
            }
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    /// Parse a report serialized by [`ErrorReport::to_csv`].
    ///
    /// Rates are recomputed from the parsed errors, which reproduces the
    /// written ones exactly because the errors round-trip bit for bit.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
        if header.trim() != "N,e1,e2,e3,e4,e5,e6,r1,r2,r3,r4,r5,r6" {
            return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
        }
        let mut samples = Vec::new();
        for (idx, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 13 {
                return Err(Error::Parse(format!(
                    "row {}: expected 13 fields, found {}",
                    idx + 2,
                    fields.len()
                )));
            }
            let n_cells = fields[0]
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("row {}: bad N {:?}", idx + 2, fields[0])))?;
            let mut errors = [0.0; 6];
            for m in 0..6 {
                errors[m] = fields[1 + m].trim().parse::<f64>().map_err(|_| {
                    Error::Parse(format!("row {}: bad error {:?}", idx + 2, fields[1 + m]))
                })?;
            }
            samples.push(ErrorSample { n_cells, errors });
        }
        Self::from_samples(samples)
    }

    /// A plain-text table with one row per mesh and rate columns.  Errors
    /// below the noise floor are marked with `*`.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{:>6}", "N"));
        for m in 1..=6 {
            out.push_str(&format!("{:>11}{:>7}", format!("e{m}"), format!("r{m}")));
        }
        out.push('\n');
        for (i, sample) in self.samples.iter().enumerate() {
            out.push_str(&format!("{:>6}", sample.n_cells));
            for m in 0..6 {
                let flag = if self.flagged(i, m) { "*" } else { "" };
                out.push_str(&format!("{:>11}", format!("{:.2e}{flag}", sample.errors[m])));
                let rate = if i == 0 { None } else { self.rate(i - 1, m) };
                match rate {
                    Some(r) => out.push_str(&format!("{r:>7.2}")),
                    None => out.push_str(&format!("{:>7}", "--")),
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::radau_points;
    use crate::field::l2_project;
    use crate::jet::Jet;
    use crate::mesh::Mesh1D;
    use std::sync::Arc;

    fn zero_function() -> SmoothFunction {
        SmoothFunction::new(|x: Jet| x * 0.0)
    }

    #[test]
    fn single_cell_downwind_mismatch() {
        let mesh = Arc::new(Mesh1D::uniform(4));
        let mut u_h = ModalField::zero(Arc::clone(&mesh), 1);
        let delta = 1e-3;
        *u_h.coeff_mut(2, 0) = delta;
        let (e1, e2) = downwind_errors(&u_h, &zero_function());
        assert!((e1 - delta).abs() < 1e-18, "max picks out the one bad cell");
        assert!((e2 - delta / 2.0).abs() < 1e-18, "RMS divides by sqrt(N) = 2");
    }

    #[test]
    fn domain_average_error_tracks_a_mean_shift() {
        let mesh = Arc::new(Mesh1D::uniform(4));
        let u = SmoothFunction::new(|x: Jet| x.sin());
        let mut u_h = l2_project(&u, &mesh, 2);
        let delta = 1e-3;
        *u_h.coeff_mut(1, 0) += delta;
        let e3 = domain_average_error(&u_h, &u);
        let want = delta * mesh.cell_size(1) / mesh.domain_length();
        assert!((e3 - want).abs() < 1e-15, "e3 = {e3}, expected {want}");
    }

    #[test]
    fn cell_average_error_sees_a_constant_offset() {
        let mesh = Arc::new(Mesh1D::split(6).unwrap());
        let u = SmoothFunction::new(|x: Jet| x.sin());
        let mut u_h = l2_project(&u, &mesh, 2);
        let delta = 2.5e-4;
        for j in 0..u_h.n_cells() {
            *u_h.coeff_mut(j, 0) += delta;
        }
        let e6 = cell_average_error(&u_h, &u);
        assert!((e6 - delta).abs() < 1e-15, "uniform offset shows up verbatim");
    }

    #[test]
    fn all_metrics_vanish_on_reproduced_polynomials() {
        // Degree <= k data is represented exactly, so every functional must
        // sit at round-off.
        let mesh = Arc::new(Mesh1D::split(6).unwrap());
        let u = SmoothFunction::new(|x: Jet| {
            let x2 = x.clone() * x.clone();
            x2 * 0.25 + x * (-0.8) + 1.5
        });
        let u_h = l2_project(&u, &mesh, 2);
        let radau = radau_points(2).unwrap();
        let errors = measure_all(&u_h, &u, &radau);
        for (m, e) in errors.iter().enumerate() {
            assert!(*e < 2e-12, "metric e{} = {e} on exact data", m + 1);
        }
    }

    #[test]
    fn radau_point_metrics_use_interior_points_only() {
        // A field error concentrated at the cell edges must be invisible to
        // e5 if it vanishes at the interior right-Radau points.  Build the
        // error as the polynomial vanishing there.
        let mesh = Arc::new(Mesh1D::uniform(2));
        let radau = radau_points(1).unwrap();
        let r = radau.right_interior()[0]; // -1/3 for k = 1
        // p(s) = s - r vanishes at the interior point; modal: -r L0 + L1.
        let mut u_h = ModalField::zero(Arc::clone(&mesh), 1);
        for j in 0..2 {
            *u_h.coeff_mut(j, 0) = -r;
            *u_h.coeff_mut(j, 1) = 1.0;
        }
        let e5 = radau_value_error(&u_h, &zero_function(), &radau);
        assert!(e5 < 1e-15, "edge-supported error invisible at Radau points");
    }

    #[test]
    fn derivative_metric_matches_hand_value() {
        // u_h = L_2(s) on one cell of size h: d/dx L_2 = 3s / hbar.
        let mesh = Arc::new(Mesh1D::uniform(1));
        let mut u_h = ModalField::zero(Arc::clone(&mesh), 2);
        *u_h.coeff_mut(0, 2) = 1.0;
        let radau = radau_points(2).unwrap();
        let hbar = mesh.half_size(0);
        let want = radau
            .left_interior()
            .iter()
            .map(|&s| (3.0 * s / hbar).abs())
            .fold(0.0f64, f64::max);
        let e4 = radau_derivative_error(&u_h, &zero_function().derivative(1), &radau);
        assert!((e4 - want).abs() < 1e-14, "e4 = {e4}, expected {want}");
    }

    fn sample(n: usize, errors: [f64; 6]) -> ErrorSample {
        ErrorSample { n_cells: n, errors }
    }

    #[test]
    fn rates_come_out_exact_on_synthetic_data() {
        let report = ErrorReport::from_samples(vec![
            sample(8, [1e-2; 6]),
            sample(16, [1.25e-3; 6]),
        ])
        .unwrap();
        for m in 0..6 {
            let r = report.rate(0, m).unwrap();
            assert!((r - 3.0).abs() < 1e-12, "rate {r} for metric {m}");
        }
    }

    #[test]
    fn non_doubling_sequences_are_rejected() {
        let result = ErrorReport::from_samples(vec![
            sample(8, [1e-2; 6]),
            sample(12, [1e-3; 6]),
        ]);
        assert!(result.is_err());
    }

    #[test]
    fn noise_floor_flags_and_suppresses_rates() {
        let mut coarse = [1e-6; 6];
        let mut fine = [1e-8; 6];
        coarse[3] = 1e-6;
        fine[3] = 5e-14; // below the floor
        let report =
            ErrorReport::from_samples(vec![sample(8, coarse), sample(16, fine)]).unwrap();
        assert!(report.flagged(1, 3), "sub-floor entry is flagged");
        assert!(!report.flagged(0, 3));
        assert_eq!(report.rate(0, 3), None, "no rate through the noise floor");
        assert!(report.rate(0, 0).is_some(), "other metrics keep their rates");
        assert_eq!(report.last_rate(3), None);
        assert!(report.to_table().contains('*'), "table marks flagged entries");
    }

    #[test]
    fn csv_round_trips_bit_for_bit() {
        let report = ErrorReport::from_samples(vec![
            sample(8, [1.0 / 3.0, 2e-5, 3e-6, 4e-7, 5e-8, 6e-9]),
            sample(16, [1e-5, 7.0 / 11.0, 3e-8, 4e-9, 5e-10, 5e-14]),
        ])
        .unwrap();
        let csv = report.to_csv();
        assert!(csv.starts_with("N,e1,e2,e3,e4,e5,e6,r1,r2,r3,r4,r5,r6\n"));
        let parsed = ErrorReport::from_csv(&csv).unwrap();
        assert_eq!(parsed, report, "parse returns the identical report");
        assert_eq!(parsed.to_csv(), csv, "re-serialization is byte-identical");
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(ErrorReport::from_csv("").is_err());
        assert!(ErrorReport::from_csv("wrong,header\n").is_err());
        let bad_row = "N,e1,e2,e3,e4,e5,e6,r1,r2,r3,r4,r5,r6\n8,1e-3\n";
        assert!(ErrorReport::from_csv(bad_row).is_err());
    }
}
