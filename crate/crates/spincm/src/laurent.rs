//! g-valued functions of z with a finite principal part at z = 0.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::rootsys::{AlgElement, RootSystem, C64};

pub type LaurentFn = Arc<dyn Fn(C64) -> Result<AlgElement> + Send + Sync>;

/// Circle radius and node count used for principal-part extraction.
pub const CONTOUR_RADIUS: f64 = 0.25;
pub const CONTOUR_NODES: usize = 128;

/// Principal part `X_{-1}, X_{-2}, …` plus an evaluable remainder.
#[derive(Clone)]
pub struct Laurent {
    /// `principal[k]` is the coefficient of z^{-(k+1)}.
    pub principal: Vec<AlgElement>,
    full: LaurentFn,
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Laurent").field("principal", &self.principal).finish_non_exhaustive()
    }
}

fn nodes(radius: f64, n: usize) -> Vec<C64> {
    (0..n).map(|k| C64::from_polar(radius, 2.0 * PI * k as f64 / n as f64)).collect()
}

impl Laurent {
    /// Σ X_{-k} z^{-k} + tail(z).
    pub fn new(principal: Vec<AlgElement>, tail: LaurentFn) -> Self {
        let p = principal.clone();
        let full: LaurentFn = Arc::new(move |z: C64| {
            let mut v = tail(z)?;
            let zi = z.inv();
            let mut zk = zi;
            for x in &p {
                v.axpy(zk, x);
                zk *= zi;
            }
            Ok(v)
        });
        Laurent { principal, full }
    }

    /// A polynomial in z and 1/z: `coeffs[k]` multiplies z^{k - poles}.
    pub fn from_coefficients(coeffs: Vec<AlgElement>, poles: usize) -> Self {
        let principal: Vec<AlgElement> = (0..poles).map(|k| coeffs[poles - 1 - k].clone()).collect();
        let tail: Vec<AlgElement> = coeffs[poles..].to_vec();
        let dim = coeffs[0].dim();
        Laurent::new(
            principal,
            Arc::new(move |z: C64| {
                let mut v = AlgElement::zeros(dim);
                let mut zk = C64::new(1.0, 0.0);
                for x in &tail {
                    v.axpy(zk, x);
                    zk *= z;
                }
                Ok(v)
            }),
        )
    }

    /// Wraps a function that is meromorphic near 0 with a pole of order at most
    /// `poles`; the principal part is extracted by trapezoid quadrature.
    pub fn from_fn(f: LaurentFn, poles: usize) -> Result<Self> {
        let zs = nodes(CONTOUR_RADIUS, CONTOUR_NODES);
        let vals: Vec<AlgElement> = zs.iter().map(|&z| f(z)).collect::<Result<_>>()?;
        let dim = vals[0].dim();
        let mut principal = Vec::with_capacity(poles);
        for k in 1..=poles {
            let mut acc = AlgElement::zeros(dim);
            for (z, v) in zs.iter().zip(&vals) {
                acc.axpy(z.powu(k as u32) / CONTOUR_NODES as f64, v);
            }
            principal.push(acc);
        }
        while principal.last().is_some_and(|x| x.norm_max() < 1e-13 * (1.0 + vals[0].norm_max())) {
            principal.pop();
        }
        Ok(Laurent { principal, full: f })
    }

    pub fn pole_order(&self) -> usize {
        self.principal.len()
    }

    pub fn eval(&self, z: C64) -> Result<AlgElement> {
        (self.full)(z)
    }

    pub fn function(&self) -> LaurentFn {
        self.full.clone()
    }
}

/// Res_{z=0} (X(z), Y(z)) by trapezoid quadrature.
pub fn residue_pairing(rs: &RootSystem, x: &Laurent, y: &Laurent) -> Result<C64> {
    let zs = nodes(CONTOUR_RADIUS, CONTOUR_NODES);
    let mut s = C64::new(0.0, 0.0);
    for &z in &zs {
        s += rs.form(&x.eval(z)?, &y.eval(z)?) * z;
    }
    Ok(s / CONTOUR_NODES as f64)
}

/// (1/2πi)∮ f(z) dz on |z| = radius with n nodes.
pub fn contour_mean<F>(radius: f64, n: usize, mut f: F) -> Result<Vec<C64>>
where
    F: FnMut(C64) -> Result<Vec<C64>>,
{
    let zs = nodes(radius, n);
    let mut acc: Option<Vec<C64>> = None;
    for &z in &zs {
        let v = f(z)?;
        match acc.as_mut() {
            None => acc = Some(v.iter().map(|x| x * z / n as f64).collect()),
            Some(a) => {
                for (ai, vi) in a.iter_mut().zip(&v) {
                    *ai += vi * z / n as f64;
                }
            }
        }
    }
    Ok(acc.unwrap_or_default())
}
