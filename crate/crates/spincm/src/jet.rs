//! Truncated bivariate Taylor polynomials in (δx, δz).
//!
//! Used to get exact mixed derivatives ∂_x^i ∂_z^j of the r-matrix
//! coefficient functions without finite differences.

use std::ops::{Add, Mul, Neg, Sub};

use crate::rootsys::C64;

/// Total degree kept.
pub const DEG: usize = 5;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    /// `c[i][j]` multiplies δx^i δz^j; entries with i + j > DEG stay zero.
    pub c: [[C64; DEG + 1]; DEG + 1],
}

impl Jet {
    pub fn constant(v: C64) -> Self {
        let mut c = [[ZERO; DEG + 1]; DEG + 1];
        c[0][0] = v;
        Jet { c }
    }

    /// The variable x at the base point x0.
    pub fn var_x(x0: C64) -> Self {
        let mut j = Jet::constant(x0);
        j.c[1][0] = C64::new(1.0, 0.0);
        j
    }

    /// The variable z at the base point z0.
    pub fn var_z(z0: C64) -> Self {
        let mut j = Jet::constant(z0);
        j.c[0][1] = C64::new(1.0, 0.0);
        j
    }

    pub fn value(&self) -> C64 {
        self.c[0][0]
    }

    /// ∂_x^i ∂_z^j at the base point.
    pub fn deriv(&self, i: usize, j: usize) -> C64 {
        if i + j > DEG {
            panic!("derivative order {} exceeds jet degree {DEG}", i + j);
        }
        self.c[i][j] * (factorial(i) * factorial(j))
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        for row in out.c.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    fn nilpotent(&self) -> Self {
        let mut e = *self;
        e.c[0][0] = ZERO;
        e
    }

    /// Σ t_k ε^k where ε = self − value; `t` are Taylor coefficients of the
    /// outer function at `self.value()`.
    pub fn compose(&self, t: &[C64]) -> Self {
        let eps = self.nilpotent();
        let top = t.len().min(DEG + 1);
        let mut acc = Jet::constant(if top > 0 { t[top - 1] } else { ZERO });
        for k in (0..top.saturating_sub(1)).rev() {
            acc = acc * eps;
            acc.c[0][0] += t[k];
        }
        acc
    }

    pub fn exp(&self) -> Self {
        let e0 = self.value().exp();
        let t: Vec<C64> = (0..=DEG).map(|k| e0 / factorial(k)).collect();
        self.compose(&t)
    }

    pub fn recip(&self) -> Self {
        let a = self.value();
        let t: Vec<C64> = (0..=DEG)
            .map(|k| {
                let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                C64::new(s, 0.0) / a.powu(k as u32 + 1)
            })
            .collect();
        self.compose(&t)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = (self.value().sin(), self.value().cos());
        let cyc = [s, c, -s, -c];
        let t: Vec<C64> = (0..=DEG).map(|k| cyc[k % 4] / factorial(k)).collect();
        self.compose(&t)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = (self.value().sin(), self.value().cos());
        let cyc = [c, -s, -c, s];
        let t: Vec<C64> = (0..=DEG).map(|k| cyc[k % 4] / factorial(k)).collect();
        self.compose(&t)
    }

    pub fn cot(&self) -> Self {
        self.cos() * self.sin().recip()
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |a, b| a * b as f64)
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, o: Jet) -> Jet {
        for i in 0..=DEG {
            for j in 0..=DEG - i {
                self.c[i][j] += o.c[i][j];
            }
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, o: Jet) -> Jet {
        for i in 0..=DEG {
            for j in 0..=DEG - i {
                self.c[i][j] -= o.c[i][j];
            }
        }
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut out = [[ZERO; DEG + 1]; DEG + 1];
        for i1 in 0..=DEG {
            for j1 in 0..=DEG - i1 {
                let a = self.c[i1][j1];
                if a == ZERO {
                    continue;
                }
                for i2 in 0..=DEG - i1 - j1 {
                    for j2 in 0..=DEG - i1 - j1 - i2 {
                        out[i1 + i2][j1 + j2] += a * o.c[i2][j2];
                    }
                }
            }
        }
        Jet { c: out }
    }
}

impl Add<C64> for Jet {
    type Output = Jet;
    fn add(mut self, v: C64) -> Jet {
        self.c[0][0] += v;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn product_rule() {
        let x = Jet::var_x(c(0.4, 0.1));
        let z = Jet::var_z(c(-0.3, 0.2));
        let f = (x * z).exp();
        // ∂_x ∂_z exp(xz) = (1 + xz) exp(xz)
        let (x0, z0) = (c(0.4, 0.1), c(-0.3, 0.2));
        let want = (1.0 + x0 * z0) * (x0 * z0).exp();
        assert!((f.deriv(1, 1) - want).norm() < 1e-14);
        // ∂_z^3 exp(xz) = x^3 exp(xz)
        assert!((f.deriv(0, 3) - x0.powu(3) * (x0 * z0).exp()).norm() < 1e-13);
    }

    #[test]
    fn cot_derivative() {
        let z0 = c(0.7, -0.2);
        let f = Jet::var_z(z0).cot();
        let s = z0.sin();
        assert!((f.deriv(0, 1) + 1.0 / (s * s)).norm() < 1e-13);
        assert!((f.deriv(0, 2) - 2.0 * z0.cos() / (s * s * s)).norm() < 1e-12);
    }

    #[test]
    fn recip_matches_power_rule() {
        let x0 = c(1.3, 0.4);
        let f = Jet::var_x(x0).recip();
        assert!((f.deriv(4, 0) - 24.0 / x0.powu(5)).norm() < 1e-12);
    }
}
