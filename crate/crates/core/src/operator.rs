//! The semidiscrete DG operator for `u_t + u_x = 0` with upwind fluxes.
//!
//! Testing against `v = L_m` in cell `j` and using orthogonality turns the
//! scheme
//! `(u_ht, v)_j = (u_h, v_x)_j - u_h⁻ v⁻|_{j+1/2} + u_h⁻ v⁺|_{j-1/2}`
//! into an explicit update for the modal coefficients:
//!
//! ```text
//! dc_{j,m}/dt = (2m+1)/h_j * ( 2 * sum_{n<m, m-n odd} c_{j,n}
//!                              - d_j + f_j (-1)^m )
//! ```
//!
//! where `d_j` is the cell's own downwind trace and `f_j` the trace entering
//! from upwind (the neighbor's downwind trace, the periodic wrap, or inflow
//! data `g(t)`).  The volume term uses the exact Legendre identity
//! `int L_n L_m' ds = 2` for `n < m` with `m - n` odd, so no quadrature
//! appears anywhere in the operator.

use std::sync::Arc;

use crate::field::ModalField;

/// Boundary treatment at the domain ends.
///
/// The advection speed is positive, so only the left boundary needs data:
/// either the periodic wrap of the rightmost downwind trace, or a
/// prescribed inflow value `g(t)`.
#[derive(Clone)]
pub enum BoundaryCondition {
    Periodic,
    Inflow(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl BoundaryCondition {
    pub fn periodic() -> Self {
        BoundaryCondition::Periodic
    }

    pub fn inflow(g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        BoundaryCondition::Inflow(Arc::new(g))
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, BoundaryCondition::Periodic)
    }

    /// The trace entering the first cell at time `t`, given the rightmost
    /// downwind trace for the periodic case.
    fn inflow_trace(&self, t: f64, wrap_trace: f64) -> f64 {
        match self {
            BoundaryCondition::Periodic => wrap_trace,
            BoundaryCondition::Inflow(g) => g(t),
        }
    }
}

impl std::fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryCondition::Periodic => write!(f, "Periodic"),
            BoundaryCondition::Inflow(_) => write!(f, "Inflow(g)"),
        }
    }
}

/// Evaluate the semidiscrete right-hand side `d u_h / dt` at time `t`.
///
/// Pure: the input state is untouched and the result lives on the same mesh
/// with the same degree.
pub fn dg_rhs(state: &ModalField, bc: &BoundaryCondition, t: f64) -> ModalField {
    let mesh = state.mesh();
    let n = state.n_cells();
    let k = state.degree();
    let mut out = ModalField::zero(Arc::clone(mesh), k);

    let downwind: Vec<f64> = (0..n).map(|j| state.downwind_trace(j)).collect();
    for j in 0..n {
        let upwind = if j == 0 {
            bc.inflow_trace(t, downwind[n - 1])
        } else {
            downwind[j - 1]
        };
        let inv_h = 1.0 / mesh.cell_size(j);
        let cell = state.cell(j);
        let rhs_cell = out.cell_mut(j);
        // Running sums of coefficients by parity: mode m couples to lower
        // modes of the opposite parity.
        let (mut even_sum, mut odd_sum) = (0.0, 0.0);
        let mut sign = 1.0;
        for m in 0..=k {
            let volume = 2.0 * if m % 2 == 0 { odd_sum } else { even_sum };
            rhs_cell[m] =
                (2.0 * m as f64 + 1.0) * inv_h * (volume - downwind[j] + upwind * sign);
            if m % 2 == 0 {
                even_sum += cell[m];
            } else {
                odd_sum += cell[m];
            }
            sign = -sign;
        }
    }
    out
}

/// The energy rate `(u_ht, u_h)` of the current state.
///
/// For periodic boundaries this equals minus half the sum of squared
/// interface jumps, so it is never positive.
pub fn energy_rate(state: &ModalField, bc: &BoundaryCondition, t: f64) -> f64 {
    let rhs = dg_rhs(state, bc, t);
    l2_inner(&rhs, state)
}

/// The L2 inner product of two fields on the same mesh,
/// `(a, b) = sum_j sum_m h_j a_{j,m} b_{j,m} / (2m + 1)`.
pub fn l2_inner(a: &ModalField, b: &ModalField) -> f64 {
    debug_assert_eq!(a.degree(), b.degree());
    let mut acc = 0.0;
    for j in 0..a.n_cells() {
        let h = a.mesh().cell_size(j);
        for (m, (&ca, &cb)) in a.cell(j).iter().zip(b.cell(j)).enumerate() {
            acc += h * ca * cb / (2.0 * m as f64 + 1.0);
        }
    }
    acc
}

/// Minus half the sum of squared jumps over all interfaces, including the
/// periodic wrap: the exact periodic energy rate of the scheme.
pub fn jump_dissipation(state: &ModalField) -> f64 {
    let n = state.n_cells();
    let mut acc = 0.0;
    for j in 0..n {
        let from_left = if j == 0 {
            state.downwind_trace(n - 1)
        } else {
            state.downwind_trace(j - 1)
        };
        let jump = state.upwind_trace(j) - from_left;
        acc += jump * jump;
    }
    -0.5 * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{gauss_radau_project, SmoothFunction};
    use crate::jet::Jet;
    use crate::mesh::Mesh1D;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn piecewise_constant_two_cell_exchange() {
        // k = 0, two cells of size pi with values (a, b):
        // du_1/dt = (b - a)/pi, du_2/dt = (a - b)/pi.
        let mesh = Arc::new(Mesh1D::uniform(2));
        let (a, b) = (2.0, 0.5);
        let state = ModalField::from_coeffs(Arc::clone(&mesh), 0, vec![a, b]);
        let rhs = dg_rhs(&state, &BoundaryCondition::periodic(), 0.0);
        assert!((rhs.coeff(0, 0) - (b - a) / PI).abs() < 1e-15);
        assert!((rhs.coeff(1, 0) - (a - b) / PI).abs() < 1e-15);
    }

    #[test]
    fn rhs_is_exact_for_a_linear_solution() {
        // u(x, t) = x - t solves the PDE; with inflow g(t) = -t the
        // semidiscrete rhs must be exactly d/dt (x - t) = -1.
        let mesh = Arc::new(Mesh1D::split(6).unwrap());
        let k = 2;
        let t = 0.3;
        let mut state = ModalField::zero(Arc::clone(&mesh), k);
        for j in 0..state.n_cells() {
            *state.coeff_mut(j, 0) = mesh.center(j) - t;
            *state.coeff_mut(j, 1) = mesh.half_size(j);
        }
        let bc = BoundaryCondition::inflow(|t| -t);
        let rhs = dg_rhs(&state, &bc, t);
        for j in 0..rhs.n_cells() {
            assert!((rhs.coeff(j, 0) + 1.0).abs() < 1e-13, "cell {j} mean rate");
            for m in 1..=k {
                assert!(rhs.coeff(j, m).abs() < 1e-13, "cell {j} mode {m}");
            }
        }
    }

    #[test]
    fn periodic_rhs_conserves_mass() {
        let mesh = Arc::new(Mesh1D::split(8).unwrap());
        let mut state = ModalField::zero(Arc::clone(&mesh), 3);
        for j in 0..state.n_cells() {
            for m in 0..=3 {
                *state.coeff_mut(j, m) = ((5 * j + m) as f64).sin();
            }
        }
        let rhs = dg_rhs(&state, &BoundaryCondition::periodic(), 0.0);
        assert!(rhs.integral().abs() < 1e-13, "sum_j h_j dc_{{j,0}}/dt = 0");
    }

    #[test]
    fn periodic_energy_rate_matches_jump_sum() {
        // Hand case first: k = 0 with values (0, delta) has jumps of size
        // delta at both interfaces, so the rate is -delta^2.
        let mesh = Arc::new(Mesh1D::uniform(2));
        let delta = 0.75;
        let state = ModalField::from_coeffs(Arc::clone(&mesh), 0, vec![0.0, delta]);
        let rate = energy_rate(&state, &BoundaryCondition::periodic(), 0.0);
        assert!((rate + delta * delta).abs() < 1e-14, "rate = {rate}");
        assert!((rate - jump_dissipation(&state)).abs() < 1e-14);

        // And on a smooth projected state.
        let mesh = Arc::new(Mesh1D::split(8).unwrap());
        let u0 = SmoothFunction::new(|x: Jet| x.sin().exp());
        let state = gauss_radau_project(&u0, &mesh, 3);
        let rate = energy_rate(&state, &BoundaryCondition::periodic(), 0.0);
        let jumps = jump_dissipation(&state);
        assert!(rate <= 0.0, "periodic energy never grows");
        assert!(
            (rate - jumps).abs() < 1e-12 * (1.0 + jumps.abs()),
            "rate {rate} vs jump sum {jumps}"
        );
    }

    #[test]
    fn inflow_uses_boundary_data_not_wrap() {
        let mesh = Arc::new(Mesh1D::uniform(3));
        let state = ModalField::from_coeffs(Arc::clone(&mesh), 0, vec![1.0, 1.0, 4.0]);
        let g = 7.0;
        let rhs = dg_rhs(&state, &BoundaryCondition::inflow(move |_| g), 0.0);
        let h = mesh.cell_size(0);
        assert!((rhs.coeff(0, 0) - (g - 1.0) / h).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn rhs_is_linear(
            a in proptest::collection::vec(-2.0f64..2.0, 8),
            b in proptest::collection::vec(-2.0f64..2.0, 8),
            alpha in -3.0f64..3.0,
        ) {
            let mesh = Arc::new(Mesh1D::uniform(4));
            let bc = BoundaryCondition::periodic();
            let fa = ModalField::from_coeffs(Arc::clone(&mesh), 1, a.clone());
            let fb = ModalField::from_coeffs(Arc::clone(&mesh), 1, b.clone());
            let mut combo = fa.clone();
            combo.scale(alpha);
            combo.scaled_add(1.0, &fb);
            let lhs = dg_rhs(&combo, &bc, 0.0);
            let mut rhs = dg_rhs(&fa, &bc, 0.0);
            rhs.scale(alpha);
            rhs.scaled_add(1.0, &dg_rhs(&fb, &bc, 0.0));
            for (l, r) in lhs.coeffs().iter().zip(rhs.coeffs()) {
                prop_assert!((l - r).abs() < 1e-11 * (1.0 + r.abs()));
            }
        }
    }
}
