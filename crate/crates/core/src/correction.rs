//! Correction functions and superconvergent initial data.
//!
//! The corrected interpolant subtracts from the Gauss-Radau projection a
//! short series of separable correction terms,
//!
//! ```text
//! u_I^l = P⁻u - sum_{i=1}^{l} w_i,    w_i(x, t) = hbar_j^i G_i(t) F_i(s),
//! ```
//!
//! chosen so that the projection's residual in the DG bilinear form is pushed
//! down by one order of `h` per term.  The spatial factors follow the
//! operator recursion
//!
//! ```text
//! F_1 = P⁻ Ds⁻¹ L_k = (L_k - L_{k-1}) / (2k + 1),
//! F_i = -P⁻ Ds⁻¹ F_{i-1},
//! ```
//!
//! where `Ds⁻¹` is the antiderivative on the reference cell that vanishes at
//! `s = -1`.  Each `F_i` stays in the telescoping form
//! `sum_m b_{i,m} (L_m - L_{m-1})`, whose coefficients obey a three-point
//! recursion solved here in exact rational arithmetic.  The temporal factors
//! `G_i` come from derivatives of the initial data and satisfy `G_i' =
//! G_{i+1}`, so one routine serves both the interpolant and its time
//! derivative.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::basis::{default_quadrature, legendre_eval};
use crate::field::{gauss_radau_project, ModalField, SmoothFunction};
use crate::mesh::Mesh1D;
use crate::operator::BoundaryCondition;
use crate::{Error, Result};

/// Antidifferentiate a modal polynomial on the reference cell.
///
/// Maps `L_m -> (L_{m+1} - L_{m-1}) / (2m + 1)` for `m >= 1` and
/// `L_0 -> L_1 + L_0`, which is the unique antiderivative vanishing at
/// `s = -1`.  The output has one more coefficient than the input.
pub fn ds_inverse(coeffs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; coeffs.len() + 1];
    for (m, &c) in coeffs.iter().enumerate() {
        if m == 0 {
            out[0] += c;
            out[1] += c;
        } else {
            let scale = 1.0 / (2.0 * m as f64 + 1.0);
            out[m + 1] += c * scale;
            out[m - 1] -= c * scale;
        }
    }
    out
}

/// Gauss-Radau projection of a modal polynomial onto degree `k`.
///
/// Low modes pass through untouched; the top mode absorbs whatever is needed
/// to preserve the downwind trace: `out_k = p(1) - sum_{m<k} p_m =
/// sum_{m>=k} p_m`.
pub fn radau_project_modal(coeffs: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![0.0; k + 1];
    let passthrough = k.min(coeffs.len());
    out[..passthrough].copy_from_slice(&coeffs[..passthrough]);
    if coeffs.len() > k {
        out[k] = coeffs[k..].iter().sum();
    }
    out
}

/// The table of correction-function coefficients `b_{i,m}` for a fixed
/// polynomial degree `k` and depth `l`.
///
/// Row `i` (1-based) stores `b_{i,m}` for `m = k-i+1 ..= k`; outside that
/// range the coefficients vanish.  The table is built once in exact rational
/// arithmetic and rounded to `f64` at the end, so every entry is the
/// correctly rounded value of the true rational coefficient.
#[derive(Debug, Clone)]
pub struct CorrectionTable {
    degree: usize,
    depth: usize,
    rows: Vec<Vec<f64>>,
}

/// Build the coefficient table for degree `k` and depth `l`, `1 <= l <= k`.
pub fn build_correction_table(k: usize, l: usize) -> Result<CorrectionTable> {
    if l < 1 || l > k {
        return Err(Error::CorrectionDepth { k, l });
    }
    let ratio = |num: i64, den: i64| {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    };
    // rows_exact[i-1][m - (k-i+1)] = b_{i,m}.
    let mut rows_exact: Vec<Vec<BigRational>> = Vec::with_capacity(l);
    rows_exact.push(vec![ratio(1, 2 * k as i64 + 1)]);
    for i in 1..l {
        let prev = &rows_exact[i - 1];
        let lo_prev = k - i + 1;
        let b_prev = |m: usize| -> BigRational {
            if m >= lo_prev && m <= k {
                prev[m - lo_prev].clone()
            } else {
                BigRational::zero()
            }
        };
        let lo = k - i;
        let mut row = Vec::with_capacity(i + 1);
        for m in lo..=k {
            // b_{i+1,m} = (b_{i,m+1} - b_{i,m})/(2m+1)
            //           + (b_{i,m} - b_{i,m-1})/(2m-1),
            // with out-of-range entries treated as zero.  At m = k - i only
            // the first fraction survives; at m = k the recursion's own
            // cancellation handles the top edge.
            let m_i = m as i64;
            let mut val = (b_prev(m + 1) - b_prev(m)) / ratio(2 * m_i + 1, 1);
            if m >= 1 {
                val += (b_prev(m) - b_prev(m - 1)) / ratio(2 * m_i - 1, 1);
            }
            row.push(val);
        }
        rows_exact.push(row);
    }
    let rows: Vec<Vec<f64>> = rows_exact
        .iter()
        .map(|row| {
            row.iter()
                .map(|b| b.to_f64().expect("rational fits in f64"))
                .collect()
        })
        .collect();
    for row in &rows {
        for &b in row {
            assert!(
                b.is_finite() && b.abs() <= 1.0,
                "correction coefficients stay bounded by one"
            );
        }
    }
    Ok(CorrectionTable { degree: k, depth: l, rows })
}

impl CorrectionTable {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// The coefficient `b_{i,m}`, zero outside the stored band.
    pub fn b(&self, i: usize, m: usize) -> f64 {
        assert!(i >= 1 && i <= self.depth, "row {i} out of 1..={}", self.depth);
        let lo = self.degree + 1 - i;
        if m >= lo && m <= self.degree {
            self.rows[i - 1][m - lo]
        } else {
            0.0
        }
    }

    /// Modal Legendre coefficients of `F_i` (length `k + 1`).
    ///
    /// Expanding the telescoping form gives the coefficient of `L_n` as
    /// `b_{i,n} - b_{i,n+1}`.
    pub fn f_modal(&self, i: usize) -> Vec<f64> {
        (0..=self.degree)
            .map(|n| self.b(i, n) - self.b(i, n + 1))
            .collect()
    }

    /// Evaluate `F_i` at a reference coordinate.
    ///
    /// Uses the telescoping form directly, so `F_i(1) = 0` holds exactly in
    /// floating point: every difference `L_m(1) - L_{m-1}(1)` is literally
    /// zero.
    pub fn f_eval(&self, i: usize, s: f64) -> f64 {
        let lo = self.degree + 1 - i;
        let mut acc = 0.0;
        for m in lo..=self.degree {
            acc += self.b(i, m) * (legendre_eval(m, s) - legendre_eval(m - 1, s));
        }
        acc
    }
}

/// Per-cell temporal factors `G_1(t0), ..., G_order(t0)` for initial data
/// shifted to time `t0` (pass the plain initial data for `t0 = 0`).
///
/// ```text
/// G_i = (-1)^i [ u^(i)(x_{j+1/2}) - (1/h_j) int_j u^(i) K_k dx ],
/// K_k(s) = sum_{m=0}^{k} (2m + 1) L_m(s),
/// ```
///
/// which is the `(k+1)`-st Radau coefficient of the `i`-th time derivative
/// of the advected solution.  Returns one `Vec` of length `order` per cell.
pub fn g_coefficients(
    u: &SmoothFunction,
    mesh: &Mesh1D,
    k: usize,
    order: usize,
) -> Vec<Vec<f64>> {
    let rule = default_quadrature(k + 2);
    // Kernel values at the quadrature nodes, one pass of the recurrence.
    let kernel: Vec<f64> = rule
        .nodes()
        .iter()
        .map(|&s| {
            (0..=k)
                .map(|m| (2.0 * m as f64 + 1.0) * legendre_eval(m, s))
                .sum()
        })
        .collect();
    (0..mesh.n_cells())
        .map(|j| {
            let edge = u.jet(mesh.right_edge(j), order);
            let mut moments = vec![0.0; order + 1];
            for (q, &s) in rule.nodes().iter().enumerate() {
                let x = mesh.from_reference(j, s);
                let derivs = u.jet(x, order);
                let w = rule.weights()[q] * kernel[q];
                for (i, d) in derivs.iter().enumerate() {
                    moments[i] += w * d;
                }
            }
            (1..=order)
                .map(|i| {
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    // (1/h) int over the cell = (1/2) int over the reference
                    // cell, already folded into the 0.5 here.
                    sign * (edge[i] - 0.5 * moments[i])
                })
                .collect()
        })
        .collect()
}

/// Assemble `sum_{i=1}^{depth} hbar_j^i g[j][i-1+offset] F_i` as a modal
/// field.
///
/// With `offset = 0` and `g = g_coefficients(u0, ..)` this is the correction
/// sum `w^l(0)`; with `offset = 1` (and `g` computed to one order higher) it
/// is the time derivative `d w^l / dt (0)`, because `G_i' = G_{i+1}`.
pub fn correction_sum(
    table: &CorrectionTable,
    g: &[Vec<f64>],
    mesh: &Arc<Mesh1D>,
    offset: usize,
) -> ModalField {
    let k = table.degree();
    let mut out = ModalField::zero(Arc::clone(mesh), k);
    let f_modal: Vec<Vec<f64>> = (1..=table.depth()).map(|i| table.f_modal(i)).collect();
    assert_eq!(g.len(), mesh.n_cells(), "one temporal-factor row per cell");
    for (j, g_j) in g.iter().enumerate() {
        assert!(
            g_j.len() >= table.depth() + offset,
            "need {} temporal factors, got {}",
            table.depth() + offset,
            g_j.len()
        );
        let hbar = mesh.half_size(j);
        let cell = out.cell_mut(j);
        let mut scale = 1.0;
        for i in 1..=table.depth() {
            scale *= hbar;
            let gi = g_j[i - 1 + offset];
            for (m, c) in f_modal[i - 1].iter().enumerate() {
                cell[m] += scale * gi * c;
            }
        }
    }
    out
}

/// The corrected interpolant `u_I^l = P⁻u - sum_{i<=l} hbar^i G_i F_i` of
/// smooth data at time zero.
pub fn build_interpolant(
    u: &SmoothFunction,
    mesh: &Arc<Mesh1D>,
    k: usize,
    l: usize,
) -> Result<ModalField> {
    let table = build_correction_table(k, l)?;
    let g = g_coefficients(u, mesh, k, l);
    let mut field = gauss_radau_project(u, mesh, k);
    field.scaled_add(-1.0, &correction_sum(&table, &g, mesh, 0));
    Ok(field)
}

/// The four ways of turning initial data into a modal DG state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMethod {
    /// Plain L2 projection.
    L2Projection,
    /// Gauss-Radau projection: L2 moments up to degree `k - 1` plus an exact
    /// downwind trace.
    RadauProjection,
    /// Downwind trace matching plus moment equations forcing the discrete
    /// time derivative to agree with the projected exact one.
    DerivativeMatched,
    /// The corrected interpolant at full depth `l = k`.
    CorrectedInterpolant,
}

impl InitMethod {
    /// Numeric labels 1 through 4, as used on the command line.
    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(InitMethod::L2Projection),
            2 => Ok(InitMethod::RadauProjection),
            3 => Ok(InitMethod::DerivativeMatched),
            4 => Ok(InitMethod::CorrectedInterpolant),
            other => Err(Error::UnknownMethod(other)),
        }
    }

    pub fn id(&self) -> u8 {
        match self {
            InitMethod::L2Projection => 1,
            InitMethod::RadauProjection => 2,
            InitMethod::DerivativeMatched => 3,
            InitMethod::CorrectedInterpolant => 4,
        }
    }
}

impl std::fmt::Display for InitMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            InitMethod::L2Projection => "L2 projection",
            InitMethod::RadauProjection => "Gauss-Radau projection",
            InitMethod::DerivativeMatched => "derivative-matched",
            InitMethod::CorrectedInterpolant => "corrected interpolant",
        };
        write!(f, "{name}")
    }
}

/// Discretize initial data with the chosen method.
///
/// The boundary condition only matters for the derivative-matched method,
/// whose first cell needs the trace entering from upwind at `t = 0`
/// (the periodic wrap or the inflow value `g(0)`).
pub fn initialize(
    method: InitMethod,
    u0: &SmoothFunction,
    bc: &BoundaryCondition,
    mesh: &Arc<Mesh1D>,
    k: usize,
) -> Result<ModalField> {
    match method {
        InitMethod::L2Projection => Ok(crate::field::l2_project(u0, mesh, k)),
        InitMethod::RadauProjection => Ok(gauss_radau_project(u0, mesh, k)),
        InitMethod::DerivativeMatched => Ok(derivative_matched(u0, bc, mesh, k)),
        InitMethod::CorrectedInterpolant => {
            if k == 0 {
                // No correction terms exist below degree one; the Radau
                // projection is the whole interpolant.
                Ok(gauss_radau_project(u0, mesh, k))
            } else {
                build_interpolant(u0, mesh, k, k)
            }
        }
    }
}

/// Initialization that matches the downwind trace and forces the scheme's
/// time derivative to equal `P⁻(-u0')` mode by mode.
///
/// For `m = 1..k` the scheme's update for mode `m` involves only
/// coefficients below `m`, the cell's downwind trace, and the upwind trace,
/// all of which are known in a left-to-right sweep; mode `m`'s equation is
/// solved for `c_{m-1}`.  The top coefficient then restores the trace.
fn derivative_matched(
    u0: &SmoothFunction,
    bc: &BoundaryCondition,
    mesh: &Arc<Mesh1D>,
    k: usize,
) -> ModalField {
    let minus_du = u0.derivative(1).scaled(-1.0);
    let q = gauss_radau_project(&minus_du, mesh, k);
    let n = mesh.n_cells();
    let mut out = ModalField::zero(Arc::clone(mesh), k);
    for j in 0..n {
        let d = u0.eval(mesh.right_edge(j));
        let f = if j > 0 {
            u0.eval(mesh.right_edge(j - 1))
        } else {
            match bc {
                BoundaryCondition::Periodic => u0.eval(mesh.right_edge(n - 1)),
                BoundaryCondition::Inflow(g) => g(0.0),
            }
        };
        let h = mesh.cell_size(j);
        let cell = out.cell_mut(j);
        let mut sign = -1.0; // (-1)^m for m = 1
        for m in 1..=k {
            // 2 sum_{n<m, m-n odd} c_n = (h/(2m+1)) q_m + d - f (-1)^m.
            let rhs = h / (2.0 * m as f64 + 1.0) * q.coeff(j, m) + d - f * sign;
            let mut lower = 0.0;
            let mut idx = m as isize - 3;
            while idx >= 0 {
                lower += cell[idx as usize];
                idx -= 2;
            }
            cell[m - 1] = 0.5 * rhs - lower;
            sign = -sign;
        }
        let partial: f64 = cell[..k].iter().sum();
        cell[k] = d - partial;
    }
    out
}

/// The inner product `(F_i, v)_j = hbar_j * sum_m f_m v_m * 2/(2m+1)` of a
/// correction function with a modal test polynomial on cell `j`.
pub fn f_inner_product(
    table: &CorrectionTable,
    i: usize,
    mesh: &Mesh1D,
    j: usize,
    v_cell: &[f64],
) -> f64 {
    let f = table.f_modal(i);
    let hbar = mesh.half_size(j);
    f.iter()
        .zip(v_cell)
        .enumerate()
        .map(|(m, (fm, vm))| hbar * fm * vm * 2.0 / (2.0 * m as f64 + 1.0))
        .sum()
}
