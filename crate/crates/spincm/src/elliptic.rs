//! Weierstrass σ, ζ, ℘ and the kernel l(w, z) for an arbitrary lattice.
//!
//! Evaluation goes through the Jacobi theta function θ_1 after reducing the
//! lattice basis (so the nome is small) and reducing the argument into the
//! fundamental parallelogram centred at 0.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{factorial, Jet, DEG};
use crate::rootsys::C64;

/// Arguments closer than this to a lattice point are treated as poles.
pub const POLE_TOL: f64 = 1e-12;

const I: C64 = C64::new(0.0, 1.0);

/// Period lattice 2ω_1 ℤ + 2ω_2 ℤ.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(into = "LatticeRepr", try_from = "LatticeRepr")]
pub struct Lattice {
    omega1: C64,
    omega2: C64,
    /// Reduced basis of half-periods.
    r1: C64,
    r2: C64,
    eta1: C64,
    eta2: C64,
    nome: C64,
    nterms: usize,
    theta1_prime0: C64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct LatticeRepr {
    omega1: C64,
    omega2: C64,
}

impl From<Lattice> for LatticeRepr {
    fn from(l: Lattice) -> Self {
        LatticeRepr { omega1: l.omega1, omega2: l.omega2 }
    }
}

impl TryFrom<LatticeRepr> for Lattice {
    type Error = Error;
    fn try_from(r: LatticeRepr) -> Result<Self> {
        Lattice::new(r.omega1, r.omega2)
    }
}

impl PartialEq for Lattice {
    fn eq(&self, o: &Self) -> bool {
        self.omega1 == o.omega1 && self.omega2 == o.omega2
    }
}

fn reduce_basis(mut a: C64, mut b: C64) -> (C64, C64) {
    for _ in 0..100 {
        let t = b / a;
        let k = t.re.round();
        b -= a * k;
        if b.norm() < a.norm() * (1.0 - 1e-15) {
            let na = b;
            b = -a;
            a = na;
        } else {
            break;
        }
    }
    (a, b)
}

impl Lattice {
    pub fn new(omega1: C64, omega2: C64) -> Result<Self> {
        let tau0 = omega2 / omega1;
        if tau0.im <= 0.0 || !tau0.im.is_finite() {
            return Err(Error::Invalid("lattice needs Im(ω2/ω1) > 0".into()));
        }
        let (r1, r2) = reduce_basis(omega1, omega2);
        let tau = r2 / r1;
        let nome = (I * PI * tau).exp();
        // Terms until q^{(n+1/2)^2} e^{(2n+1)|Im v|} (2n+1)^(DEG+3) < 1e-18
        // with |Im v| ≤ π Im τ / 2.
        let y = PI * tau.im;
        let mut nterms = 1;
        while nterms < 60 {
            let n = nterms as f64;
            let log_term = -y * (n + 0.5) * (n - 0.5) + (DEG as f64 + 3.0) * (2.0 * n + 1.0).ln();
            if log_term < (1e-18f64).ln() {
                break;
            }
            nterms += 1;
        }
        let mut lat = Lattice {
            omega1,
            omega2,
            r1,
            r2,
            eta1: C64::new(0.0, 0.0),
            eta2: C64::new(0.0, 0.0),
            nome,
            nterms: nterms + 1,
            theta1_prime0: C64::new(0.0, 0.0),
        };
        let d0 = lat.theta1_derivs(C64::new(0.0, 0.0), 3);
        lat.theta1_prime0 = d0[1];
        lat.eta1 = -PI * PI * d0[3] / (12.0 * r1 * d0[1]);
        lat.eta2 = (lat.eta1 * r2 - I * (PI / 2.0)) / r1;
        Ok(lat)
    }

    pub fn square() -> Self {
        Lattice::new(C64::new(1.0, 0.0), C64::new(0.0, 1.0)).unwrap()
    }

    pub fn omega1(&self) -> C64 {
        self.omega1
    }

    pub fn omega2(&self) -> C64 {
        self.omega2
    }

    /// Nome of the reduced basis.
    pub fn nome(&self) -> C64 {
        self.nome
    }

    /// Number of theta-series terms kept.
    pub fn truncation(&self) -> usize {
        self.nterms
    }

    /// ζ(ω_1) and ζ(ω_2) for the given half-periods.
    pub fn etas(&self) -> (C64, C64) {
        let z1 = self.zeta(self.omega1).expect("half-period is regular");
        let z2 = self.zeta(self.omega2).expect("half-period is regular");
        (z1, z2)
    }

    /// θ_1^{(k)}(v) for k = 0..=order.
    fn theta1_derivs(&self, v: C64, order: usize) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); order + 1];
        let lq = I * PI * (self.r2 / self.r1);
        for n in 0..self.nterms {
            let m = (2 * n + 1) as f64;
            let h = n as f64 + 0.5;
            let sign = if n % 2 == 0 { 2.0 } else { -2.0 };
            let qn = (lq * h * h).exp() * sign;
            let u = v * m;
            let (s, c) = (u.sin(), u.cos());
            let cyc = [s, c, -s, -c];
            let mut mk = 1.0;
            for (k, o) in out.iter_mut().enumerate() {
                *o += qn * cyc[k % 4] * mk;
                mk *= m;
            }
        }
        out
    }

    /// Split z = z0 + 2m r1 + 2n r2 with z0 in the centred parallelogram.
    fn reduce(&self, z: C64) -> (C64, f64, f64) {
        // Solve z = 2a r1 + 2b r2 over the reals.
        let (a1, a2) = (2.0 * self.r1, 2.0 * self.r2);
        let det = a1.re * a2.im - a1.im * a2.re;
        let a = (z.re * a2.im - z.im * a2.re) / det;
        let b = (a1.re * z.im - a1.im * z.re) / det;
        let (m, n) = (a.round(), b.round());
        (z - a1 * m - a2 * n, m, n)
    }

    fn check_pole(&self, z: C64) -> Result<()> {
        let (z0, _, _) = self.reduce(z);
        if z0.norm() < POLE_TOL {
            return Err(Error::Pole(format!("argument {z} is a lattice point")));
        }
        Ok(())
    }

    /// σ(z), entire.
    pub fn sigma(&self, z: C64) -> C64 {
        let (z0, m, n) = self.reduce(z);
        let k = PI / (2.0 * self.r1);
        let th = self.theta1_derivs(z0 * k, 0)[0];
        let s0 = (2.0 * self.r1 / PI) * (self.eta1 * z0 * z0 / (2.0 * self.r1)).exp() * th / self.theta1_prime0;
        if m == 0.0 && n == 0.0 {
            return s0;
        }
        let e = 2.0 * m * self.eta1 + 2.0 * n * self.eta2;
        let parity = if (m + n + m * n).rem_euclid(2.0) == 0.0 { 1.0 } else { -1.0 };
        s0 * parity * (e * (z0 + m * self.r1 + n * self.r2)).exp()
    }

    /// Taylor coefficients of log σ(z + ε) in ε up to `order`; the constant
    /// term is on a branch consistent with the quasi-periodicity shift.
    pub fn log_sigma_taylor(&self, z: C64, order: usize) -> Result<Vec<C64>> {
        self.check_pole(z)?;
        let (z0, m, n) = self.reduce(z);
        let k = PI / (2.0 * self.r1);
        let th = self.theta1_derivs(z0 * k, order);
        let a: Vec<C64> = th.iter().enumerate().map(|(j, t)| t * k.powu(j as u32) / factorial(j)).collect();
        let mut b = vec![C64::new(0.0, 0.0); order + 1];
        b[0] = a[0].ln();
        for p in 1..=order {
            let mut s = a[p];
            for j in 1..p {
                s -= b[j] * a[p - j] * (j as f64 / p as f64);
            }
            b[p] = s / a[0];
        }
        b[0] += (2.0 * self.r1 / PI).ln() - self.theta1_prime0.ln() + self.eta1 * z0 * z0 / (2.0 * self.r1);
        if order >= 1 {
            b[1] += self.eta1 * z0 / self.r1;
        }
        if order >= 2 {
            b[2] += self.eta1 / (2.0 * self.r1);
        }
        if m != 0.0 || n != 0.0 {
            let e = 2.0 * m * self.eta1 + 2.0 * n * self.eta2;
            b[0] += e * (z0 + m * self.r1 + n * self.r2) + I * PI * (m + n + m * n);
            if order >= 1 {
                b[1] += e;
            }
        }
        Ok(b)
    }

    pub fn zeta(&self, z: C64) -> Result<C64> {
        Ok(self.log_sigma_taylor(z, 1)?[1])
    }

    pub fn wp(&self, z: C64) -> Result<C64> {
        Ok(-2.0 * self.log_sigma_taylor(z, 2)?[2])
    }

    pub fn wp_prime(&self, z: C64) -> Result<C64> {
        Ok(-6.0 * self.log_sigma_taylor(z, 3)?[3])
    }

    /// Jet of log σ evaluated on the jet `w`.
    pub fn log_sigma_jet(&self, w: &Jet) -> Result<Jet> {
        let t = self.log_sigma_taylor(w.value(), DEG)?;
        Ok(w.compose(&t))
    }

    /// l(w, z) = −σ(w + z) / (σ(w) σ(z)).
    pub fn l_kernel(&self, w: C64, z: C64) -> Result<C64> {
        self.check_pole(w)?;
        self.check_pole(z)?;
        self.check_pole(w + z)?;
        let ls = |u: C64| self.log_sigma_taylor(u, 0).map(|v| v[0]);
        Ok(-(ls(w + z)? - ls(w)? - ls(z)?).exp())
    }

    /// Jet of l(x, z) around (x0, z0).
    pub fn l_jet(&self, x0: C64, z0: C64) -> Result<Jet> {
        let x = Jet::var_x(x0);
        let z = Jet::var_z(z0);
        let e = self.log_sigma_jet(&(x + z))? - self.log_sigma_jet(&x)? - self.log_sigma_jet(&z)?;
        Ok(-e.exp())
    }

    /// |z0| for the representative z0 of z in the centred parallelogram.
    pub fn lattice_distance(&self, z: C64) -> f64 {
        self.reduce(z).0.norm()
    }

    pub fn near_lattice(&self, z: C64, tol: f64) -> bool {
        self.lattice_distance(z) < tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rejects_degenerate_lattice() {
        assert!(Lattice::new(c(1.0, 0.0), c(2.0, 0.0)).is_err());
        assert!(Lattice::new(c(1.0, 0.0), c(0.0, -1.0)).is_err());
    }

    #[test]
    fn sigma_normalisation() {
        let lat = Lattice::square();
        assert!(lat.sigma(c(0.0, 0.0)).norm() < 1e-16);
        let h = 1e-6;
        let d = (lat.sigma(c(h, 0.0)) - lat.sigma(c(-h, 0.0))) / (2.0 * h);
        assert!((d - 1.0).norm() < 1e-10);
    }

    #[test]
    fn poles_reported() {
        let lat = Lattice::square();
        assert!(matches!(lat.wp(c(2.0, 2.0)), Err(Error::Pole(_))));
        assert!(matches!(lat.zeta(c(0.0, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn legendre_relation() {
        let lat = Lattice::new(c(0.8, 0.1), c(0.3, 1.1)).unwrap();
        let (e1, e2) = lat.etas();
        let lhs = e1 * lat.omega2() - e2 * lat.omega1();
        assert!((lhs - I * (PI / 2.0)).norm() < 1e-12);
    }

    #[test]
    fn square_lattice_wp_at_half_period() {
        // For the square lattice with ω1 = 1, e1 = ℘(1) = Γ(1/4)^4 / (32π).
        let lat = Lattice::square();
        let gamma_quarter: f64 = 3.625_609_908_221_908;
        let want = gamma_quarter.powi(4) / (32.0 * PI);
        assert!((lat.wp(c(1.0, 0.0)).unwrap() - want).norm() < 1e-12);
    }

    #[test]
    fn trig_degeneration() {
        let lat = Lattice::new(c(PI / 2.0, 0.0), c(0.0, 40.0)).unwrap();
        let z = c(0.4, 0.3);
        let want = 1.0 / (z.sin() * z.sin()) - 1.0 / 3.0;
        assert!((lat.wp(z).unwrap() - want).norm() < 1e-10);
    }

    #[test]
    fn l_jet_value_matches_kernel() {
        let lat = Lattice::new(c(1.0, 0.0), c(0.2, 0.9)).unwrap();
        let (x, z) = (c(0.31, 0.2), c(-0.4, 0.15));
        let j = lat.l_jet(x, z).unwrap();
        assert!((j.value() - lat.l_kernel(x, z).unwrap()).norm() < 1e-13);
        // ∂_z log l = ζ(x+z) − ζ(z)
        let want = j.value() * (lat.zeta(x + z).unwrap() - lat.zeta(z).unwrap());
        assert!((j.deriv(0, 1) - want).norm() < 1e-12);
    }
}
