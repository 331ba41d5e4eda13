//! Legendre polynomials, Gauss-Legendre quadrature, and Radau point sets on
//! the reference cell `[-1, 1]`.
//!
//! All node computations are eigen-free: roots come from Newton's method on
//! the three-term recurrence, with Chebyshev-type initial guesses and a
//! bracketing safeguard for the Radau families.

use crate::{Error, Result};

/// Evaluate the Legendre polynomial `L_m` at `s`.
///
/// Uses the three-term recurrence `(m+1) L_{m+1} = (2m+1) s L_m - m L_{m-1}`,
/// which keeps the endpoint values `L_m(1) = 1` and `L_m(-1) = (-1)^m` exact
/// in floating point.
pub fn legendre_eval(m: usize, s: f64) -> f64 {
    legendre_pair(m, s).0
}

/// Evaluate the derivative `L_m'` at `s`.
///
/// Uses `L_m' = L_{m-2}' + (2m-1) L_{m-1}`, which stays finite at the
/// endpoints (the familiar `(s^2 - 1)` form does not).
pub fn legendre_deriv(m: usize, s: f64) -> f64 {
    legendre_pair(m, s).1
}

/// Evaluate `(L_m(s), L_m'(s))` in one pass of the recurrences.
pub fn legendre_pair(m: usize, s: f64) -> (f64, f64) {
    let (mut p_prev, mut p) = (1.0, s); // L_0, L_1
    let (mut d_prev, mut d) = (0.0, 1.0); // L_0', L_1'
    if m == 0 {
        return (p_prev, d_prev);
    }
    for n in 1..m {
        let nf = n as f64;
        let p_next = ((2.0 * nf + 1.0) * s * p - nf * p_prev) / (nf + 1.0);
        let d_next = d_prev + (2.0 * nf + 1.0) * p;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

/// A quadrature rule on the reference cell `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Degree of polynomial exactness (`2n - 1` for an `n`-point Gauss rule).
    pub fn order(&self) -> usize {
        2 * self.nodes.len() - 1
    }

    /// Approximate the reference-cell integral of `f`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&s, &w)| w * f(s))
            .sum()
    }
}

/// Build the `n`-point Gauss-Legendre rule, exact for polynomials of degree
/// `2n - 1`.
///
/// Roots of `L_n` are refined by Newton iteration from the classical
/// Chebyshev guesses `cos(pi (i + 3/4) / (n + 1/2))`; each converges in a
/// handful of steps.  Weights use `w = 2 / ((1 - s^2) L_n'(s)^2)`, and the
/// node set is symmetrized so mirrored nodes carry identical weights.
pub fn gauss_rule(n: usize) -> QuadratureRule {
    assert!(n >= 1, "a quadrature rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n / 2 {
        let mut s = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut converged = false;
        for _ in 0..100 {
            let (p, d) = legendre_pair(n, s);
            let step = p / d;
            s -= step;
            if step.abs() <= 1e-15 * (1.0 + s.abs()) {
                converged = true;
                break;
            }
        }
        assert!(converged, "Gauss node refinement stalled for n = {n}");
        let (p, d) = legendre_pair(n, s);
        debug_assert!(p.abs() < 1e-13);
        let w = 2.0 / ((1.0 - s * s) * d * d);
        // Seeds start at the largest root and walk inward.
        nodes[n - 1 - i] = s;
        nodes[i] = -s;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        let mid = n / 2;
        let d = legendre_pair(n, 0.0).1;
        nodes[mid] = 0.0;
        weights[mid] = 2.0 / (d * d);
    }
    QuadratureRule { nodes, weights }
}

/// Default reference-cell rule used for projections and error functionals:
/// Gauss-Legendre with `max(k + 6, 12)` points, far past the polynomial
/// degrees in play so quadrature stays below the `1e-14` error budget.
pub fn default_quadrature(k: usize) -> QuadratureRule {
    gauss_rule((k + 6).max(12))
}

/// The left and right Radau point families for polynomial degree `k`.
///
/// Left Radau points are the `k + 1` roots of `L_{k+1} + L_k` (the leftmost
/// is `-1`); right Radau points are the roots of `L_{k+1} - L_k` (the
/// rightmost is `+1`).  Both lists are ascending, and the families mirror
/// each other: negating and reversing one yields the other.
#[derive(Debug, Clone)]
pub struct RadauPointSet {
    degree: usize,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl RadauPointSet {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// All `k + 1` left Radau points, starting with `-1`.
    pub fn left_all(&self) -> &[f64] {
        &self.left
    }

    /// All `k + 1` right Radau points, ending with `+1`.
    pub fn right_all(&self) -> &[f64] {
        &self.right
    }

    /// Left Radau points with the endpoint `-1` removed.
    pub fn left_interior(&self) -> &[f64] {
        &self.left[1..]
    }

    /// Right Radau points with the endpoint `+1` removed.
    pub fn right_interior(&self) -> &[f64] {
        &self.right[..self.degree]
    }
}

/// Compute the Radau point families for degree `k`.
///
/// Interior roots are bracketed by a sign scan of `L_{k+1} + L_k` over a
/// dense Chebyshev-Gauss-Lobatto grid and polished by bracketed Newton
/// iteration to a residual below `1e-14` (or the floating-point fixed
/// point).  Fails with [`Error::RootRefinement`] if any residual stays
/// above `1e-12`.
pub fn radau_points(k: usize) -> Result<RadauPointSet> {
    let value = |s: f64| legendre_eval(k + 1, s) + legendre_eval(k, s);
    let pair = |s: f64| {
        let (p1, d1) = legendre_pair(k + 1, s);
        let (p0, d0) = legendre_pair(k, s);
        (p1 + p0, d1 + d0)
    };

    let mut left = Vec::with_capacity(k + 1);
    left.push(-1.0); // exact root of L_{k+1} + L_k for every k

    // Scan for sign changes strictly inside (-1, 1).  The grid is clustered
    // like the roots themselves, so every interior root gets its own bracket.
    let grid_len = 24 * (k + 1);
    let grid_point =
        |j: usize| -(std::f64::consts::PI * j as f64 / grid_len as f64).cos();
    let mut prev_s = grid_point(1);
    let mut prev_f = value(prev_s);
    for j in 2..=grid_len {
        let s = grid_point(j);
        let f = value(s);
        if prev_f == 0.0 {
            left.push(prev_s);
        } else if prev_f.signum() != f.signum() && f != 0.0 {
            left.push(newton_in_bracket(k, &pair, prev_s, prev_f, s, f)?);
        }
        prev_s = s;
        prev_f = f;
    }
    if prev_f == 0.0 {
        left.push(prev_s);
    }

    if left.len() != k + 1 {
        return Err(Error::RootRefinement {
            degree: k,
            residual: f64::NAN,
        });
    }
    for &s in &left {
        let residual = value(s).abs();
        if residual > 1e-12 {
            return Err(Error::RootRefinement {
                degree: k,
                residual,
            });
        }
    }

    // L_{k+1} - L_k is the parity mirror of L_{k+1} + L_k, so the right
    // family is the reflected left family.
    let right: Vec<f64> = left.iter().rev().map(|&s| -s).collect();
    Ok(RadauPointSet {
        degree: k,
        left,
        right,
    })
}

/// Newton iteration confined to a sign-change bracket `[lo, hi]`; any step
/// that would escape the bracket falls back to bisection.
fn newton_in_bracket(
    degree: usize,
    pair: &impl Fn(f64) -> (f64, f64),
    mut lo: f64,
    mut f_lo: f64,
    mut hi: f64,
    _f_hi: f64,
) -> Result<f64> {
    let mut s = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (f, d) = pair(s);
        if f.abs() <= 1e-14 {
            return Ok(s);
        }
        if f.signum() == f_lo.signum() {
            lo = s;
            f_lo = f;
        } else {
            hi = s;
        }
        let newton = s - f / d;
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next == s {
            // Floating-point fixed point; accept if the residual is tiny.
            break;
        }
        s = next;
    }
    let residual = pair(s).0.abs();
    if residual <= 1e-12 {
        Ok(s)
    } else {
        Err(Error::RootRefinement { degree, residual })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_matches_closed_forms() {
        for &s in &[-1.0, -0.6, -0.25, 0.0, 0.3, 0.5, 1.0] {
            assert_eq!(legendre_eval(0, s), 1.0);
            assert_eq!(legendre_eval(1, s), s);
            let l2 = 0.5 * (3.0 * s * s - 1.0);
            let l3 = 0.5 * (5.0 * s * s * s - 3.0 * s);
            assert!((legendre_eval(2, s) - l2).abs() < 1e-15, "L2({s})");
            assert!((legendre_eval(3, s) - l3).abs() < 1e-15, "L3({s})");
        }
        assert_eq!(legendre_eval(2, 0.5), -0.125);
    }

    #[test]
    fn legendre_endpoints_exact() {
        for m in 0..=8 {
            assert_eq!(legendre_eval(m, 1.0), 1.0, "L_{m}(1)");
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(legendre_eval(m, -1.0), sign, "L_{m}(-1)");
        }
    }

    #[test]
    fn legendre_deriv_matches_closed_forms() {
        assert_eq!(legendre_deriv(2, 0.5), 1.5);
        for m in 0..=8 {
            let expect = (m * (m + 1)) as f64 / 2.0;
            assert_eq!(legendre_deriv(m, 1.0), expect, "L_{m}'(1)");
        }
        for &s in &[-0.9, -0.3, 0.1, 0.7] {
            let l3d = 0.5 * (15.0 * s * s - 3.0);
            assert!((legendre_deriv(3, s) - l3d).abs() < 1e-14);
        }
    }

    #[test]
    fn legendre_deriv_agrees_with_central_differences() {
        let h = 1e-5;
        for m in 1..=8 {
            for &s in &[-0.8, -0.4, 0.0, 0.35, 0.75] {
                let fd = (legendre_eval(m, s + h) - legendre_eval(m, s - h)) / (2.0 * h);
                let d = legendre_deriv(m, s);
                assert!(
                    (fd - d).abs() < 1e-6 * (1.0 + d.abs()),
                    "m = {m}, s = {s}: fd = {fd}, exact = {d}"
                );
            }
        }
    }

    #[test]
    fn gauss_two_point_rule_is_the_textbook_one() {
        let rule = gauss_rule(2);
        let expect = 1.0 / 3f64.sqrt();
        assert!((rule.nodes()[0] + expect).abs() < 1e-15);
        assert!((rule.nodes()[1] - expect).abs() < 1e-15);
        assert!((rule.weights()[0] - 1.0).abs() < 1e-15);
        assert!((rule.weights()[1] - 1.0).abs() < 1e-15);
        let integral = rule.integrate(|s| s * s);
        assert!((integral - 2.0 / 3.0).abs() < 1e-15, "exact for s^2");
    }

    #[test]
    fn gauss_rules_are_exact_up_to_degree_2n_minus_1() {
        for n in 1..=10 {
            let rule = gauss_rule(n);
            assert_eq!(rule.order(), 2 * n - 1);
            for p in 0..=rule.order() {
                let integral = rule.integrate(|s| s.powi(p as i32));
                let exact = if p % 2 == 0 { 2.0 / (p as f64 + 1.0) } else { 0.0 };
                assert!(
                    (integral - exact).abs() < 1e-13,
                    "n = {n}, monomial s^{p}: got {integral}, want {exact}"
                );
            }
        }
    }

    #[test]
    fn gauss_five_integrates_s8_to_two_ninths() {
        let rule = gauss_rule(5);
        assert!((rule.integrate(|s| s.powi(8)) - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_rules_are_symmetric() {
        for n in 1..=12 {
            let rule = gauss_rule(n);
            let sum: f64 = rule.weights().iter().sum();
            assert!((sum - 2.0).abs() < 1e-14, "weights sum to the cell length");
            for i in 0..n {
                assert_eq!(rule.nodes()[i], -rule.nodes()[n - 1 - i], "antisymmetric nodes");
                assert_eq!(rule.weights()[i], rule.weights()[n - 1 - i], "symmetric weights");
            }
            for i in 1..n {
                assert!(rule.nodes()[i] > rule.nodes()[i - 1], "ascending nodes");
            }
        }
    }

    #[test]
    fn legendre_orthogonality_via_quadrature() {
        let rule = gauss_rule(10);
        for m in 0..=8usize {
            for n in 0..=8usize {
                if m + n > rule.order() {
                    continue;
                }
                let integral = rule.integrate(|s| legendre_eval(m, s) * legendre_eval(n, s));
                let exact = if m == n { 2.0 / (2.0 * m as f64 + 1.0) } else { 0.0 };
                assert!(
                    (integral - exact).abs() < 1e-14,
                    "(L_{m}, L_{n}) = {integral}, want {exact}"
                );
            }
        }
    }

    #[test]
    fn radau_k1_has_closed_form_roots() {
        let set = radau_points(1).unwrap();
        assert_eq!(set.left_all()[0], -1.0);
        assert!((set.left_all()[1] - 1.0 / 3.0).abs() < 1e-14);
        assert!((set.right_all()[0] + 1.0 / 3.0).abs() < 1e-14);
        assert_eq!(set.right_all()[1], 1.0);
    }

    #[test]
    fn radau_points_are_roots_with_tiny_residual() {
        for k in 0..=8 {
            let set = radau_points(k).unwrap();
            assert_eq!(set.left_all().len(), k + 1);
            assert_eq!(set.right_all().len(), k + 1);
            assert_eq!(set.left_all()[0], -1.0);
            assert_eq!(set.right_all()[k], 1.0);
            for w in set.left_all().windows(2) {
                assert!(w[0] < w[1], "left points ascending for k = {k}");
            }
            for &s in set.left_all() {
                let r = legendre_eval(k + 1, s) + legendre_eval(k, s);
                assert!(r.abs() <= 1e-12, "left residual {r:e} at s = {s}, k = {k}");
            }
            for &s in set.right_all() {
                let r = legendre_eval(k + 1, s) - legendre_eval(k, s);
                assert!(r.abs() <= 1e-12, "right residual {r:e} at s = {s}, k = {k}");
            }
        }
    }

    #[test]
    fn radau_families_mirror_each_other() {
        let set = radau_points(4).unwrap();
        for (i, &s) in set.left_all().iter().enumerate() {
            assert_eq!(s, -set.right_all()[4 - i]);
        }
    }

    #[test]
    fn radau_interior_views_drop_the_endpoint() {
        let set = radau_points(3).unwrap();
        assert_eq!(set.left_interior().len(), 3);
        assert_eq!(set.right_interior().len(), 3);
        assert!(set.left_interior().iter().all(|&s| s > -1.0 && s < 1.0));
        assert!(set.right_interior().iter().all(|&s| s > -1.0 && s < 1.0));
    }
}
