//! Piecewise-polynomial fields in a modal Legendre basis, smooth reference
//! functions, and the projections connecting them.
//!
//! A [`ModalField`] stores `c_{j,m}` with `u_h(x)|_j = sum_m c_{j,m} L_m(s)`
//! where `s` is the reference coordinate of cell `j`.  Orthogonality gives
//! `(L_m, L_n)_j = h_j / (2m + 1) delta_{mn}`, so mass matrices never appear
//! explicitly.  [`SmoothFunction`] wraps exact data (initial conditions,
//! shifted solutions) with Taylor-jet derivatives of any order.
//!
//! Besides the plain L2 projection, the module implements the Gauss-Radau
//! projection `P⁻`, which matches `k` moments and pins the downwind trace,
//! and the Radau expansion coefficients `u_{j,m}` that drive the correction
//! machinery.  The DG bilinear form
//! `a_j(w, v) = (w_t, v)_j - (w, v_x)_j + w⁻ v⁻|_{j+1/2} - w⁻ v⁺|_{j-1/2}`
//! is exposed cell-wise and globally.

use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::basis::{default_quadrature, QuadratureRule};
use crate::jet::Jet;
use crate::mesh::Mesh1D;
use crate::{Error, Result};

/// A smooth scalar function with derivative jets of arbitrary order.
///
/// Built from a Taylor-jet expression, so derivatives come from forward-mode
/// arithmetic rather than finite differences or hand-coded formulas.
#[derive(Clone)]
pub struct SmoothFunction {
    expr: Arc<dyn Fn(Jet) -> Jet + Send + Sync>,
    deriv_order: usize,
}

impl SmoothFunction {
    pub fn new(expr: impl Fn(Jet) -> Jet + Send + Sync + 'static) -> Self {
        SmoothFunction {
            expr: Arc::new(expr),
            deriv_order: 0,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.jet(x, 0)[0]
    }

    /// Derivative values `u^(0)(x) ..= u^(order)(x)`.
    pub fn jet(&self, x: f64, order: usize) -> Vec<f64> {
        let total = order + self.deriv_order;
        let base = (self.expr)(Jet::variable(x, total));
        (0..=order)
            .map(|i| base.derivative(i + self.deriv_order))
            .collect()
    }

    /// The `n`-th derivative as a new function.
    pub fn derivative(&self, n: usize) -> SmoothFunction {
        SmoothFunction {
            expr: Arc::clone(&self.expr),
            deriv_order: self.deriv_order + n,
        }
    }

    /// The translate `x -> f(x - t)`; advection evolves data this way.
    pub fn shifted(&self, t: f64) -> SmoothFunction {
        let inner = Arc::clone(&self.expr);
        SmoothFunction {
            expr: Arc::new(move |x: Jet| inner(x - t)),
            deriv_order: self.deriv_order,
        }
    }

    /// The scaling `x -> a f(x)`.
    pub fn scaled(&self, a: f64) -> SmoothFunction {
        let inner = Arc::clone(&self.expr);
        let shift = self.deriv_order;
        SmoothFunction {
            expr: Arc::new(move |x: Jet| inner(x) * a),
            deriv_order: shift,
        }
    }
}

/// A piecewise-polynomial field over a mesh, stored modally per cell.
#[derive(Debug, Clone)]
pub struct ModalField {
    mesh: Arc<Mesh1D>,
    degree: usize,
    coeffs: Vec<f64>,
}

impl ModalField {
    pub fn zero(mesh: Arc<Mesh1D>, degree: usize) -> Self {
        let coeffs = vec![0.0; mesh.n_cells() * (degree + 1)];
        ModalField {
            mesh,
            degree,
            coeffs,
        }
    }

    pub fn from_coeffs(mesh: Arc<Mesh1D>, degree: usize, coeffs: Vec<f64>) -> Self {
        assert_eq!(
            coeffs.len(),
            mesh.n_cells() * (degree + 1),
            "coefficient count must be n_cells * (degree + 1)"
        );
        ModalField {
            mesh,
            degree,
            coeffs,
        }
    }

    pub fn mesh(&self) -> &Arc<Mesh1D> {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_cells(&self) -> usize {
        self.mesh.n_cells()
    }

    pub fn coeff(&self, j: usize, m: usize) -> f64 {
        self.coeffs[j * (self.degree + 1) + m]
    }

    pub fn coeff_mut(&mut self, j: usize, m: usize) -> &mut f64 {
        &mut self.coeffs[j * (self.degree + 1) + m]
    }

    pub fn cell(&self, j: usize) -> &[f64] {
        let w = self.degree + 1;
        &self.coeffs[j * w..(j + 1) * w]
    }

    pub fn cell_mut(&mut self, j: usize) -> &mut [f64] {
        let w = self.degree + 1;
        &mut self.coeffs[j * w..(j + 1) * w]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Value at reference coordinate `s` of cell `j`.
    pub fn eval(&self, j: usize, s: f64) -> f64 {
        let c = self.cell(j);
        let mut acc = c[0];
        if self.degree == 0 {
            return acc;
        }
        let (mut p_prev, mut p) = (1.0, s);
        acc += c[1] * p;
        for n in 1..self.degree {
            let nf = n as f64;
            let p_next = ((2.0 * nf + 1.0) * s * p - nf * p_prev) / (nf + 1.0);
            p_prev = p;
            p = p_next;
            acc += c[n + 1] * p;
        }
        acc
    }

    /// Reference-frame derivative `d u_h / d s` at `s` in cell `j`.
    pub fn eval_ds(&self, j: usize, s: f64) -> f64 {
        let c = self.cell(j);
        if self.degree == 0 {
            return 0.0;
        }
        let (mut p_prev, mut p) = (1.0, s);
        let (mut d_prev, mut d) = (0.0, 1.0);
        let mut acc = c[1] * d;
        for n in 1..self.degree {
            let nf = n as f64;
            let p_next = ((2.0 * nf + 1.0) * s * p - nf * p_prev) / (nf + 1.0);
            let d_next = d_prev + (2.0 * nf + 1.0) * p;
            p_prev = p;
            p = p_next;
            d_prev = d;
            d = d_next;
            acc += c[n + 1] * d;
        }
        acc
    }

    /// Physical derivative `d u_h / d x` at reference coordinate `s` of cell
    /// `j` (the reference derivative divided by the map factor).
    pub fn eval_deriv(&self, j: usize, s: f64) -> f64 {
        self.eval_ds(j, s) / self.mesh.half_size(j)
    }

    /// Trace at the cell's own downwind face, `u_h(x_{j+1/2}^-) = sum_m c_{j,m}`.
    pub fn downwind_trace(&self, j: usize) -> f64 {
        self.cell(j).iter().sum()
    }

    /// Trace at the cell's own upwind face, `u_h(x_{j-1/2}^+) = sum_m (-1)^m c_{j,m}`.
    pub fn upwind_trace(&self, j: usize) -> f64 {
        self.cell(j)
            .iter()
            .enumerate()
            .map(|(m, &c)| if m % 2 == 0 { c } else { -c })
            .sum()
    }

    /// Cell average, which is just the constant-mode coefficient.
    pub fn cell_mean(&self, j: usize) -> f64 {
        self.coeff(j, 0)
    }

    /// Integral over the whole domain, `sum_j h_j c_{j,0}`.
    pub fn integral(&self) -> f64 {
        (0..self.n_cells())
            .map(|j| self.mesh.cell_size(j) * self.coeff(j, 0))
            .sum()
    }

    /// Discrete L2 norm from orthogonality:
    /// `||u_h||^2 = sum_j sum_m h_j c_{j,m}^2 / (2m + 1)`.
    pub fn l2_norm(&self) -> f64 {
        let mut acc = 0.0;
        for j in 0..self.n_cells() {
            let h = self.mesh.cell_size(j);
            for (m, &c) in self.cell(j).iter().enumerate() {
                acc += h * c * c / (2.0 * m as f64 + 1.0);
            }
        }
        acc.sqrt()
    }

    pub fn scale(&mut self, a: f64) {
        for c in &mut self.coeffs {
            *c *= a;
        }
    }

    /// `self += a * other`; the fields must live on the same mesh and degree.
    pub fn scaled_add(&mut self, a: f64, other: &ModalField) {
        debug_assert_eq!(self.degree, other.degree);
        debug_assert_eq!(self.coeffs.len(), other.coeffs.len());
        for (c, &o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += a * o;
        }
    }

    /// Write the field in the `dgfield` text format: a header line
    /// `dgfield k=<k> n=<n>` followed by one line of coefficients per cell.
    /// Values carry 17 significant digits, so reading the text back
    /// reproduces every coefficient bit for bit.
    pub fn write_dgfield(&self, out: &mut impl Write) -> Result<()> {
        writeln!(out, "dgfield k={} n={}", self.degree, self.n_cells())?;
        for j in 0..self.n_cells() {
            let line: Vec<String> = self.cell(j).iter().map(|c| format!("{c:.16e}")).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    /// Read a field in the `dgfield` text format onto the given mesh.
    pub fn read_dgfield(reader: impl BufRead, mesh: Arc<Mesh1D>) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty dgfield input".into()))??;
        let mut words = header.split_whitespace();
        if words.next() != Some("dgfield") {
            return Err(Error::Parse("missing dgfield header".into()));
        }
        let mut k: Option<usize> = None;
        let mut n: Option<usize> = None;
        for word in words {
            if let Some(v) = word.strip_prefix("k=") {
                k = Some(parse_usize(v)?);
            } else if let Some(v) = word.strip_prefix("n=") {
                n = Some(parse_usize(v)?);
            } else {
                return Err(Error::Parse(format!("unexpected header token '{word}'")));
            }
        }
        let (k, n) = match (k, n) {
            (Some(k), Some(n)) => (k, n),
            _ => return Err(Error::Parse("dgfield header needs k= and n=".into())),
        };
        if n != mesh.n_cells() {
            return Err(Error::Parse(format!(
                "dgfield has {n} cells but the mesh has {}",
                mesh.n_cells()
            )));
        }
        let mut coeffs = Vec::with_capacity(n * (k + 1));
        for j in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing coefficients for cell {j}")))??;
            let values: std::result::Result<Vec<f64>, _> =
                line.split_whitespace().map(str::parse::<f64>).collect();
            let values = values.map_err(|e| Error::Parse(format!("cell {j}: {e}")))?;
            if values.len() != k + 1 {
                return Err(Error::Parse(format!(
                    "cell {j} has {} coefficients, expected {}",
                    values.len(),
                    k + 1
                )));
            }
            coeffs.extend_from_slice(&values);
        }
        Ok(ModalField::from_coeffs(mesh, k, coeffs))
    }
}

fn parse_usize(s: &str) -> Result<usize> {
    s.parse()
        .map_err(|e| Error::Parse(format!("bad integer '{s}': {e}")))
}

/// L2 projection of `u` onto degree-`k` polynomials per cell:
/// `c_{j,m} = (2m + 1) / 2 * int_{-1}^{1} u(x_j(s)) L_m(s) ds`.
pub fn l2_project(u: &SmoothFunction, mesh: &Arc<Mesh1D>, degree: usize) -> ModalField {
    let rule = default_quadrature(degree);
    let mut field = ModalField::zero(Arc::clone(mesh), degree);
    for j in 0..mesh.n_cells() {
        let moments = cell_moments(|s| u.eval(mesh.from_reference(j, s)), degree, &rule);
        field.cell_mut(j).copy_from_slice(&moments);
    }
    field
}

/// Gauss-Radau projection `P⁻ u`: the first `k` moments match the L2
/// projection and the last coefficient enforces the downwind trace,
/// `c_{j,k} = u(x_{j+1/2}) - sum_{m<k} c_{j,m}`.
pub fn gauss_radau_project(u: &SmoothFunction, mesh: &Arc<Mesh1D>, degree: usize) -> ModalField {
    let rule = default_quadrature(degree);
    let mut field = ModalField::zero(Arc::clone(mesh), degree);
    for j in 0..mesh.n_cells() {
        let downwind = u.eval(mesh.right_edge(j));
        let cell = radau_project_cell(
            |s| u.eval(mesh.from_reference(j, s)),
            downwind,
            degree,
            &rule,
        );
        field.cell_mut(j).copy_from_slice(&cell);
    }
    field
}

fn radau_project_cell(
    f: impl Fn(f64) -> f64,
    downwind: f64,
    degree: usize,
    rule: &QuadratureRule,
) -> Vec<f64> {
    if degree == 0 {
        return vec![downwind];
    }
    let mut cell = cell_moments(&f, degree - 1, rule);
    // Partial sums accumulate left to right, matching downwind_trace, so the
    // enforced trace survives the later summation to round-off.
    let partial: f64 = cell.iter().sum();
    cell.push(downwind - partial);
    cell
}

/// Modal moments `c_m = (2m+1)/2 int f L_m ds` for `m = 0 ..= degree`.
fn cell_moments(f: impl Fn(f64) -> f64, degree: usize, rule: &QuadratureRule) -> Vec<f64> {
    let mut acc = vec![0.0; degree + 1];
    for (&s, &w) in rule.nodes().iter().zip(rule.weights()) {
        let fw = w * f(s);
        let (mut p_prev, mut p) = (1.0, s);
        acc[0] += fw;
        if degree >= 1 {
            acc[1] += fw * p;
        }
        for n in 1..degree {
            let nf = n as f64;
            let p_next = ((2.0 * nf + 1.0) * s * p - nf * p_prev) / (nf + 1.0);
            p_prev = p;
            p = p_next;
            acc[n + 1] += fw * p;
        }
    }
    for (m, c) in acc.iter_mut().enumerate() {
        *c *= (2.0 * m as f64 + 1.0) / 2.0;
    }
    acc
}

/// Radau expansion coefficient
/// `u_{j,m} = u(x_{j+1/2}) - (1/h_j) int_j u sum_{l=0}^{m-1} (2l+1) L_l dx`.
///
/// These are the coefficients of `u` in the basis `L_m - L_{m-1}` appended to
/// the downwind value; for polynomials of degree below `m` they vanish.
pub fn radau_coefficient(u: &SmoothFunction, mesh: &Mesh1D, j: usize, m: usize) -> f64 {
    assert!(m >= 1, "Radau coefficients start at m = 1");
    let rule = default_quadrature(m);
    let downwind = u.eval(mesh.right_edge(j));
    // (1/h_j) dx = (1/2) ds on the reference cell.
    let weighted = 0.5
        * rule.integrate(|s| {
            let kernel: f64 = (0..m)
                .map(|l| (2.0 * l as f64 + 1.0) * crate::basis::legendre_eval(l, s))
                .sum();
            u.eval(mesh.from_reference(j, s)) * kernel
        });
    downwind - weighted
}

/// Anything evaluable cell by cell at reference coordinates, with one-sided
/// traces at `s = ±1`.  Implemented by modal fields, smooth functions, and
/// plain closures `(cell, s) -> value`.
pub trait CellEval {
    fn eval_in_cell(&self, mesh: &Mesh1D, j: usize, s: f64) -> f64;
}

impl CellEval for ModalField {
    fn eval_in_cell(&self, _mesh: &Mesh1D, j: usize, s: f64) -> f64 {
        self.eval(j, s)
    }
}

impl CellEval for SmoothFunction {
    fn eval_in_cell(&self, mesh: &Mesh1D, j: usize, s: f64) -> f64 {
        self.eval(mesh.from_reference(j, s))
    }
}

impl<F: Fn(usize, f64) -> f64> CellEval for F {
    fn eval_in_cell(&self, _mesh: &Mesh1D, j: usize, s: f64) -> f64 {
        self(j, s)
    }
}

/// Single-cell DG bilinear form
/// `a_j(w, v) = (w_t, v)_j - (w, v_x)_j + w⁻ v⁻|_{j+1/2} - w⁻ v⁺|_{j-1/2}`.
///
/// `w_upwind` is the trace of `w` from the upwind side of the cell's left
/// face (the neighbor's downwind trace, or boundary data).  Volume terms use
/// the supplied quadrature rule.
pub fn bilinear_form_cell(
    mesh: &Mesh1D,
    j: usize,
    w: &impl CellEval,
    w_t: &impl CellEval,
    w_upwind: f64,
    v: &ModalField,
    rule: &QuadratureRule,
) -> f64 {
    let hbar = mesh.half_size(j);
    let mass = hbar * rule.integrate(|s| w_t.eval_in_cell(mesh, j, s) * v.eval(j, s));
    // (w, v_x)_j = int w (dv/ds) ds: the map factors cancel.
    let volume = rule.integrate(|s| w.eval_in_cell(mesh, j, s) * v.eval_ds(j, s));
    let downwind = w.eval_in_cell(mesh, j, 1.0) * v.eval(j, 1.0);
    let upwind = w_upwind * v.eval(j, -1.0);
    mass - volume + downwind - upwind
}

/// Global DG bilinear form `a(w, v) = sum_j a_j(w, v)`.
///
/// Interior upwind traces come from the neighboring cell; `w_inflow` supplies
/// the trace at the leftmost face (periodic callers pass the rightmost
/// downwind trace, inflow callers pass the boundary value `g(t)`).
pub fn bilinear_form(
    mesh: &Mesh1D,
    w: &impl CellEval,
    w_t: &impl CellEval,
    w_inflow: f64,
    v: &ModalField,
    rule: &QuadratureRule,
) -> f64 {
    let mut acc = 0.0;
    for j in 0..mesh.n_cells() {
        let upwind = if j == 0 {
            w_inflow
        } else {
            w.eval_in_cell(mesh, j - 1, 1.0)
        };
        acc += bilinear_form_cell(mesh, j, w, w_t, upwind, v, rule);
    }
    acc
}
