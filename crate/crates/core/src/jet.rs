//! Truncated Taylor-jet arithmetic (forward-mode differentiation).
//!
//! A [`Jet`] carries the scaled Taylor coefficients `a_i = f^(i)(x0) / i!`
//! of a function at a point.  Sums, products, and the elementary functions
//! `exp`, `sin`, `cos` propagate whole coefficient vectors, so one
//! evaluation of a composite expression yields its derivatives to any
//! requested order.  Benchmark data like `exp(sin x)` needs nothing more.

use std::ops::{Add, Mul, Neg, Sub};

/// Taylor coefficients `a_0 ..= a_order` of a scalar function at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    c: Vec<f64>,
}

impl Jet {
    /// The identity function `x` expanded at `x`: coefficients `(x, 1, 0, ...)`.
    pub fn variable(x: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = x;
        if order >= 1 {
            c[1] = 1.0;
        }
        Jet { c }
    }

    /// A constant expanded to the given order.
    pub fn constant(value: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = value;
        Jet { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// The `i`-th derivative value `f^(i) = i! * a_i`.
    pub fn derivative(&self, i: usize) -> f64 {
        self.c[i] * factorial(i)
    }

    /// All derivative values `f^(0) ..= f^(order)`.
    pub fn derivatives(&self) -> Vec<f64> {
        (0..self.c.len()).map(|i| self.derivative(i)).collect()
    }

    /// `exp` of the jet: `e_n = (1/n) sum_{j=1..n} j u_j e_{n-j}` from
    /// `(e^u)' = u' e^u`.
    pub fn exp(&self) -> Jet {
        let n = self.c.len();
        let mut e = vec![0.0; n];
        e[0] = self.c[0].exp();
        for m in 1..n {
            let mut acc = 0.0;
            for j in 1..=m {
                acc += j as f64 * self.c[j] * e[m - j];
            }
            e[m] = acc / m as f64;
        }
        Jet { c: e }
    }

    /// `sin` and `cos` of the jet, propagated jointly through
    /// `s' = u' c`, `c' = -u' s`.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.c.len();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        s[0] = self.c[0].sin();
        c[0] = self.c[0].cos();
        for m in 1..n {
            let (mut ds, mut dc) = (0.0, 0.0);
            for j in 1..=m {
                let ju = j as f64 * self.c[j];
                ds += ju * c[m - j];
                dc -= ju * s[m - j];
            }
            s[m] = ds / m as f64;
            c[m] = dc / m as f64;
        }
        (Jet { c: s }, Jet { c })
    }

    pub fn sin(&self) -> Jet {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Jet {
        self.sin_cos().1
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        zip_with(self, rhs, |a, b| a + b)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        zip_with(self, rhs, |a, b| a - b)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        assert_eq!(self.c.len(), rhs.c.len(), "jet orders must match");
        let n = self.c.len();
        let mut out = vec![0.0; n];
        for (m, slot) in out.iter_mut().enumerate() {
            *slot = (0..=m).map(|j| self.c[j] * rhs.c[m - j]).sum();
        }
        Jet { c: out }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for a in &mut self.c {
            *a = -*a;
        }
        self
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        for a in &mut self.c {
            *a *= rhs;
        }
        self
    }
}

fn zip_with(a: Jet, b: Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
    assert_eq!(a.c.len(), b.c.len(), "jet orders must match");
    let c = a.c.iter().zip(&b.c).map(|(&x, &y)| f(x, y)).collect();
    Jet { c }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variable_has_unit_slope() {
        let x = Jet::variable(2.5, 3);
        assert_eq!(x.derivative(0), 2.5);
        assert_eq!(x.derivative(1), 1.0);
        assert_eq!(x.derivative(2), 0.0);
    }

    #[test]
    fn exp_jet_repeats_exp() {
        let x = Jet::variable(0.7, 5);
        let e = x.exp();
        for i in 0..=5 {
            assert!(
                (e.derivative(i) - 0.7f64.exp()).abs() < 1e-13,
                "order {i}"
            );
        }
    }

    #[test]
    fn sin_jet_cycles_through_cos_and_back() {
        let x = Jet::variable(1.2, 4);
        let s = x.sin();
        let expect = [1.2f64.sin(), 1.2f64.cos(), -1.2f64.sin(), -1.2f64.cos(), 1.2f64.sin()];
        for (i, &d) in expect.iter().enumerate() {
            assert!((s.derivative(i) - d).abs() < 1e-14, "order {i}");
        }
    }

    #[test]
    fn product_rule_holds() {
        // (x sin x)'' = 2 cos x - x sin x
        let x = Jet::variable(0.9, 2);
        let p = x.clone() * x.sin();
        let expect = 2.0 * 0.9f64.cos() - 0.9 * 0.9f64.sin();
        assert!((p.derivative(2) - expect).abs() < 1e-14);
    }

    #[test]
    fn exp_sin_jet_at_zero_is_one_one_one() {
        // By hand: f = exp(sin x) has f(0) = f'(0) = f''(0) = 1.
        let x = Jet::variable(0.0, 2);
        let f = x.sin().exp();
        assert!((f.derivative(0) - 1.0).abs() < 1e-15);
        assert!((f.derivative(1) - 1.0).abs() < 1e-15);
        assert!((f.derivative(2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exp_sin_derivatives_agree_with_central_differences() {
        let f = |x: f64| x.sin().exp();
        let h = 1e-4;
        for &x0 in &[0.3, 1.0, 2.2, 4.9] {
            let jet = Jet::variable(x0, 2).sin().exp();
            let d1 = (f(x0 + h) - f(x0 - h)) / (2.0 * h);
            let d2 = (f(x0 + h) - 2.0 * f(x0) + f(x0 - h)) / (h * h);
            assert!((jet.derivative(1) - d1).abs() < 1e-6, "f' at {x0}");
            assert!((jet.derivative(2) - d2).abs() < 1e-5, "f'' at {x0}");
        }
    }
}
