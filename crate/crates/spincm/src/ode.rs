//! Dormand-Prince 5(4) with adaptive steps for complex state vectors.

use crate::error::Result;
use crate::rootsys::C64;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Differences between the 5th and 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Keep every accepted step (otherwise only the endpoints).
    pub record: bool,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        OdeOptions { rtol: tol, atol: tol, max_steps: 1_000_000, record: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Stop {
    Completed,
    /// The guard reported a singular configuration at this time.
    Singular { t: f64, detail: String },
    MaxSteps { t: f64 },
    StepUnderflow { t: f64 },
}

#[derive(Clone, Debug)]
pub struct OdeSolution {
    pub t: Vec<f64>,
    pub y: Vec<Vec<C64>>,
    pub stop: Stop,
    pub steps: usize,
    pub rejected: usize,
}

fn axpy(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for i in 0..y.len() {
        let mut s = C64::new(0.0, 0.0);
        for (c, k) in terms {
            s += k[i] * *c;
        }
        out[i] = y[i] + s * h;
    }
}

/// Integrates y' = f(t, y) from t0 to t1 (either direction).
///
/// `guard` is checked on every accepted state; returning `Some(msg)` stops the
/// run with [`Stop::Singular`]. An error from `f` is treated the same way.
pub fn dopri5<F, G>(mut f: F, mut guard: G, t0: f64, y0: &[C64], t1: f64, opts: OdeOptions) -> OdeSolution
where
    F: FnMut(f64, &[C64]) -> Result<Vec<C64>>,
    G: FnMut(&[C64]) -> Option<String>,
{
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut ts = vec![t0];
    let mut ys = vec![y.clone()];
    let sol = |ts: Vec<f64>, ys: Vec<Vec<C64>>, stop: Stop, steps, rejected| OdeSolution { t: ts, y: ys, stop, steps, rejected };
    if span == 0.0 {
        return sol(ts, ys, Stop::Completed, 0, 0);
    }
    if let Some(d) = guard(&y) {
        return sol(ts, ys, Stop::Singular { t, detail: d }, 0, 0);
    }
    let n = y.len();
    let mut k1 = match f(t, &y) {
        Ok(v) => v,
        Err(e) => return sol(ts, ys, Stop::Singular { t, detail: e.to_string() }, 0, 0),
    };
    let scale = |a: &[C64], b: &[C64], i: usize| opts.atol + opts.rtol * a[i].norm().max(b[i].norm());
    // Initial step from the usual derivative-based heuristic.
    let d0 = (0..n).map(|i| (y[i].norm() / scale(&y, &y, i)).powi(2)).sum::<f64>().sqrt() / (n as f64).sqrt();
    let d1 = (0..n).map(|i| (k1[i].norm() / scale(&y, &y, i)).powi(2)).sum::<f64>().sqrt() / (n as f64).sqrt();
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(span);
    let mut steps = 0;
    let mut rejected = 0;
    let mut fac_old = 1e-4f64;
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut ynew = vec![C64::new(0.0, 0.0); n];
    loop {
        if steps >= opts.max_steps {
            return sol(ts, ys, Stop::MaxSteps { t }, steps, rejected);
        }
        let remaining = (t1 - t) * dir;
        if remaining <= span * 1e-14 {
            break;
        }
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        if h < span * 1e-15 {
            return sol(ts, ys, Stop::StepUnderflow { t }, steps, rejected);
        }
        let hs = h * dir;
        let stage = |tmp: &mut Vec<C64>, terms: &[(f64, &[C64])], f: &mut F, tt: f64| -> Result<Vec<C64>> {
            axpy(tmp, &y, hs, terms);
            f(tt, tmp)
        };
        let res: Result<_> = (|| {
            let k2 = stage(&mut tmp, &[(A21, &k1)], &mut f, t + C2 * hs)?;
            let k3 = stage(&mut tmp, &[(A31, &k1), (A32, &k2)], &mut f, t + C3 * hs)?;
            let k4 = stage(&mut tmp, &[(A41, &k1), (A42, &k2), (A43, &k3)], &mut f, t + C4 * hs)?;
            let k5 = stage(&mut tmp, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], &mut f, t + C5 * hs)?;
            let k6 = stage(&mut tmp, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], &mut f, t + hs)?;
            axpy(&mut ynew, &y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            let k7 = f(t + hs, &ynew)?;
            Ok((k3, k4, k5, k6, k7))
        })();
        let (k3, k4, k5, k6, k7) = match res {
            Ok(v) => v,
            Err(_) => {
                // A stage landed on a singular point; retry with a smaller step.
                rejected += 1;
                h *= 0.25;
                continue;
            }
        };
        let mut err = 0.0;
        for i in 0..n {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hs;
            err += (e.norm() / scale(&y, &ynew, i)).powi(2);
        }
        let err = (err / n as f64).sqrt();
        if err <= 1.0 {
            steps += 1;
            t = if last { t1 } else { t + hs };
            std::mem::swap(&mut y, &mut ynew);
            k1 = k7;
            if opts.record || last {
                ts.push(t);
                ys.push(y.clone());
            }
            if let Some(d) = guard(&y) {
                return sol(ts, ys, Stop::Singular { t, detail: d }, steps, rejected);
            }
            // PI step-size control.
            let fac = (0.9 * err.max(1e-10).powf(-0.7 / 5.0) * fac_old.powf(0.4 / 5.0)).clamp(0.2, 10.0);
            fac_old = err.max(1e-4);
            h *= fac;
            if last {
                break;
            }
        } else {
            rejected += 1;
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).max(0.2) } else { 0.1 };
            h *= fac;
        }
    }
    if !opts.record && ts.last() != Some(&t) {
        ts.push(t);
        ys.push(y);
    }
    sol(ts, ys, Stop::Completed, steps, rejected)
}
