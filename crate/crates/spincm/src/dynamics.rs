//! Hamiltonians, Lax operators and flows of the spin Calogero-Moser systems,
//! before and after reduction.
//!
//! With `L(z) = p + ψ(z) ξ_h + Σ φ_α((α,q), z) ξ_α e_α` the Hamiltonian is half
//! the z⁰ coefficient of (L(z), L(z)):
//! `H = ½Σ p_i² + ½Σ_α W_α((α,q)) ξ_α ξ_{−α}`, where `W_α(x)` is the z⁰
//! coefficient of `φ_α(x, z) φ_{−α}(−x, z)`.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::elliptic::POLE_TOL;
use crate::error::{Error, Result};
use crate::laurent::{Laurent, LaurentFn};
use crate::ode::{dopri5, OdeOptions, Stop};
use crate::phase::{
    bracket_full, bracket_reduced, lift, lift_gradient, momentum_j, project_tangent, Gradient, PhasePoint, ReducedGradient,
    ReducedPoint,
};
use crate::rmatrix::{Case, RMatrixSpec};
use crate::rootsys::{AlgElement, RootSystem, C64};

/// Closest allowed approach of (α, q) to the singular set during integration.
pub const COLLISION_TOL: f64 = 1e-6;
/// Largest Σ-constraint residual accepted by [`SystemSpec::lax_b`].
pub const SIGMA_TOL: f64 = 1e-8;

const ZERO: C64 = C64::new(0.0, 0.0);

/// A spin Calogero-Moser system: the r-matrix family with its case data.
#[derive(Clone, Debug)]
pub struct SystemSpec {
    r: RMatrixSpec,
}

#[derive(Clone, Debug)]
pub struct Trajectory<P> {
    pub t: Vec<f64>,
    pub points: Vec<P>,
    pub energy: Vec<C64>,
    /// Σ-constraint residual per step (zero for reduced runs).
    pub constraint: Vec<f64>,
    pub stop: Stop,
}

impl<P> Trajectory<P> {
    pub fn completed(&self) -> bool {
        self.stop == Stop::Completed
    }

    pub fn last(&self) -> &P {
        self.points.last().expect("trajectory has at least the initial point")
    }

    /// max |E(t) − E(0)| / |E(0)| (absolute if E(0) = 0).
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energy[0];
        let s = if e0.norm() > 0.0 { e0.norm() } else { 1.0 };
        self.energy.iter().fold(0.0, |m, e| m.max((e - e0).norm() / s))
    }
}

/// (z, k) names the spectral invariant tr L₀(z)^k / k.
pub type Invariant = (C64, usize);

/// Residuals of the reduced Lax pair check along a trajectory.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct LaxReport {
    /// Relative drift of the characteristic polynomial coefficients.
    pub isospectral: f64,
    /// max ‖dL₀/dt − [B₀, L₀]‖ by finite differences along the flow.
    pub lax: f64,
}

/// Spin with every off-diagonal entry equal to `m`.
pub fn spinless_xi(rs: &RootSystem, m: C64) -> AlgElement {
    let mut xi = rs.zero();
    for k in 0..rs.num_roots() {
        xi.coeffs[rs.rank() + k] = m;
    }
    xi
}

/// tr(A^k)/k for k = 1..=kmax.
pub fn trace_invariants(a: &DMatrix<C64>, kmax: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(kmax);
    let mut pw = a.clone();
    for k in 1..=kmax {
        out.push(pw.trace() / k as f64);
        pw = &pw * a;
    }
    out
}

/// Coefficients c_0..c_d of det(A − w·Id) = Σ c_j w^j.
pub fn char_poly(a: &DMatrix<C64>) -> Vec<C64> {
    let d = a.nrows();
    let id = DMatrix::<C64>::identity(d, d);
    let mut c = vec![ZERO; d + 1];
    c[d] = C64::new(1.0, 0.0);
    let mut m = DMatrix::from_element(d, d, ZERO);
    for k in 1..=d {
        m = a * &m + &id * c[d + 1 - k];
        c[d - k] = -(a * &m).trace() / k as f64;
    }
    if d % 2 == 1 {
        for v in c.iter_mut() {
            *v = -*v;
        }
    }
    c
}

fn fd5(fm2: &AlgElement, fm1: &AlgElement, fp1: &AlgElement, fp2: &AlgElement, h: f64) -> AlgElement {
    let mut d = fm2.scale(C64::new(1.0, 0.0));
    d.axpy(C64::new(-8.0, 0.0), fm1);
    d.axpy(C64::new(8.0, 0.0), fp1);
    d.axpy(C64::new(-1.0, 0.0), fp2);
    d.scale(C64::new(1.0 / (12.0 * h), 0.0))
}

impl SystemSpec {
    pub fn new(r: RMatrixSpec) -> Result<Self> {
        if r.fault() != 0.0 {
            return Err(Error::Invalid("fault injection only applies to r-matrix checks".into()));
        }
        Ok(SystemSpec { r })
    }

    pub fn rmatrix(&self) -> &RMatrixSpec {
        &self.r
    }

    pub fn root_system(&self) -> &RootSystem {
        self.r.root_system()
    }

    fn rs(&self) -> &RootSystem {
        self.r.root_system()
    }

    /// W_α(x) and W_α′(x).
    pub fn potential(&self, k: usize, x: C64) -> Result<(C64, C64)> {
        let pole = |what: &str| Error::Pole(format!("{what} for root {}", self.rs().label(k)));
        Ok(match self.r.case() {
            Case::Rational { dynamic } => {
                if !dynamic[k] {
                    (ZERO, ZERO)
                } else {
                    if x.norm() < POLE_TOL {
                        return Err(pole("(α, q) = 0"));
                    }
                    (-x.powi(-2), 2.0 * x.powi(-3))
                }
            }
            Case::Trigonometric { span, .. } => {
                if span[k] {
                    let s = x.sin();
                    if s.norm() < POLE_TOL {
                        return Err(pole("sin (α, q) = 0"));
                    }
                    (-(s * s).inv() + 1.0 / 3.0, 2.0 * x.cos() / (s * s * s))
                } else {
                    (C64::new(1.0 / 3.0, 0.0), ZERO)
                }
            }
            Case::Elliptic { lattice } => (-lattice.wp(x)?, -lattice.wp_prime(x)?),
        })
    }

    pub fn hamiltonian(&self, x: &PhasePoint) -> Result<C64> {
        let rs = self.rs();
        let n = rs.rank();
        let mut h: C64 = x.p.iter().map(|p| p * p).sum::<C64>() * 0.5;
        for k in 0..rs.num_roots() {
            let prod = x.xi.coeffs[n + k] * x.xi.coeffs[n + rs.neg(k)];
            if prod != ZERO {
                h += 0.5 * self.potential(k, rs.pair_root(k, &x.q))?.0 * prod;
            }
        }
        Ok(h)
    }

    pub fn hamiltonian_gradient(&self, x: &PhasePoint) -> Result<Gradient> {
        let rs = self.rs();
        let n = rs.rank();
        let mut dq = vec![ZERO; n];
        let mut dxi = rs.zero();
        for k in 0..rs.num_roots() {
            let xa = x.xi.coeffs[n + k];
            let xb = x.xi.coeffs[n + rs.neg(k)];
            if xa == ZERO && xb == ZERO {
                continue;
            }
            let (w, dw) = self.potential(k, rs.pair_root(k, &x.q))?;
            dxi.coeffs[n + k] = w * xa;
            for (i, a) in rs.alpha_h(k).iter().enumerate() {
                dq[i] += 0.5 * dw * a * xa * xb;
            }
        }
        Ok(Gradient { dq, dp: x.p.clone(), dxi })
    }

    /// (q̇, ṗ, ξ̇) in the shape of a phase point.
    pub fn vector_field(&self, x: &PhasePoint) -> Result<PhasePoint> {
        let g = self.hamiltonian_gradient(x)?;
        let rs = self.rs();
        Ok(PhasePoint { q: g.dp.iter().map(|v| -v).collect(), p: g.dq, xi: rs.br(&g.dxi, &x.xi) })
    }

    pub fn lax_l(&self, x: &PhasePoint, z: C64) -> Result<AlgElement> {
        let mut l = self.r.contract_second(&x.q, z, &x.xi)?;
        for i in 0..self.rs().rank() {
            l.coeffs[i] += x.p[i];
        }
        Ok(l)
    }

    /// Analytic dL(z)/dt along the Hamiltonian flow.
    pub fn lax_dot(&self, x: &PhasePoint, z: C64) -> Result<AlgElement> {
        let rs = self.rs();
        let n = rs.rank();
        let v = self.vector_field(x)?;
        let mut d = self.r.contract_second(&x.q, z, &v.xi)?;
        for i in 0..n {
            d.coeffs[i] += v.p[i];
        }
        for k in 0..rs.num_roots() {
            let xk = x.xi.coeffs[n + k];
            if xk == ZERO || !self.r.depends_on_q(k) {
                continue;
            }
            let j = self.r.phi_jet(k, rs.pair_root(k, &x.q), z)?;
            d.coeffs[n + k] += j.deriv(1, 0) * rs.pair_root(k, &v.q) * xk;
        }
        Ok(d)
    }

    /// M(z) = L(z)/z as a Laurent element.
    pub fn lax_m(&self, x: &PhasePoint) -> Result<Laurent> {
        self.r.check_q(&x.q)?;
        let me = self.clone();
        let x = x.clone();
        let f: LaurentFn = Arc::new(move |z: C64| Ok(me.lax_l(&x, z)?.scale(z.inv())));
        Laurent::from_fn(f, 2)
    }

    /// Distance of J(x) from the set Σ on which the Lax equation holds.
    pub fn sigma_residual(&self, x: &PhasePoint) -> f64 {
        let rs = self.rs();
        let j = momentum_j(rs, x);
        match self.r.case() {
            Case::Rational { dynamic } => (0..rs.num_roots())
                .filter(|&k| dynamic[k])
                .map(|k| rs.pair_root(k, &j).norm())
                .fold(0.0, f64::max),
            _ => j.iter().map(|v| v.norm()).fold(0.0, f64::max),
        }
    }

    /// R_q(I⁻¹M) without checking the Σ constraint.
    pub fn r_of_m(&self, x: &PhasePoint) -> Result<Laurent> {
        self.r.r_apply(&x.q, &self.lax_m(x)?)
    }

    /// The Lax partner B = R_q(I⁻¹M); x must lie on Σ.
    pub fn lax_b(&self, x: &PhasePoint) -> Result<Laurent> {
        let res = self.sigma_residual(x);
        if res > SIGMA_TOL {
            return Err(Error::Constraint { residual: res });
        }
        self.r_of_m(x)
    }

    /// (X_J R)(M), the correction to the Lax equation away from Σ.
    pub fn quasi_lax_anomaly(&self, x: &PhasePoint) -> Result<Laurent> {
        if !matches!(self.r.case(), Case::Rational { .. }) {
            return Err(Error::Unsupported("anomaly term is implemented for the rational family".into()));
        }
        self.r.r_apply_dq(&x.q, &momentum_j(self.rs(), x), &self.lax_m(x)?)
    }

    /// Smallest distance of q to a singular hyperplane, over roots with poles.
    pub fn collision_distance(&self, q: &[C64]) -> f64 {
        let rs = self.rs();
        (0..rs.num_roots())
            .filter_map(|k| self.r.root_singularity(k, rs.pair_root(k, q)))
            .fold(f64::INFINITY, f64::min)
    }

    fn guard(&self, q: &[C64]) -> Option<String> {
        let d = self.collision_distance(q);
        (d < COLLISION_TOL).then(|| format!("approach to singular hyperplane, distance {d:e}"))
    }

    pub fn integrate(&self, x0: &PhasePoint, t_end: f64, tol: f64) -> Result<Trajectory<PhasePoint>> {
        self.integrate_with(x0, t_end, OdeOptions::with_tol(tol))
    }

    pub fn integrate_with(&self, x0: &PhasePoint, t_end: f64, opts: OdeOptions) -> Result<Trajectory<PhasePoint>> {
        self.r.check_q(&x0.q)?;
        let n = self.rs().rank();
        let sol = dopri5(
            |_t, y| Ok(self.vector_field(&PhasePoint::from_slice(n, y))?.to_vec()),
            |y| self.guard(&y[..n]),
            0.0,
            &x0.to_vec(),
            t_end,
            opts,
        );
        let points: Vec<PhasePoint> = sol.y.iter().map(|y| PhasePoint::from_slice(n, y)).collect();
        let energy = points.iter().map(|x| self.hamiltonian(x).unwrap_or(C64::new(f64::NAN, 0.0))).collect();
        let constraint = points.iter().map(|x| self.sigma_residual(x)).collect();
        Ok(Trajectory { t: sol.t, points, energy, constraint, stop: sol.stop })
    }

    /// Point reached after time `t`, integrated at a tight tolerance.
    pub fn flow(&self, x0: &PhasePoint, t: f64, tol: f64) -> Result<PhasePoint> {
        let opts = OdeOptions { record: false, ..OdeOptions::with_tol(tol) };
        let tr = self.integrate_with(x0, t, opts)?;
        match &tr.stop {
            Stop::Completed => Ok(tr.last().clone()),
            s => Err(Error::Pole(format!("flow stopped early: {s:?}"))),
        }
    }

    /// dL(z)/dt by a five-point stencil over integrated points.
    pub fn lax_dot_fd(&self, x: &PhasePoint, zs: &[C64], delta: f64) -> Result<Vec<AlgElement>> {
        let tol = 1e-13;
        let pts: Vec<PhasePoint> =
            [-2.0, -1.0, 1.0, 2.0].iter().map(|s| self.flow(x, s * delta, tol)).collect::<Result<_>>()?;
        zs.iter()
            .map(|&z| {
                let ls: Vec<AlgElement> = pts.iter().map(|p| self.lax_l(p, z)).collect::<Result<_>>()?;
                Ok(fd5(&ls[0], &ls[1], &ls[2], &ls[3], delta))
            })
            .collect()
    }

    /// max_z ‖dL/dt − [B, L]‖ on Σ, dL/dt by finite differences along the flow.
    pub fn lax_residual(&self, x: &PhasePoint, zs: &[C64]) -> Result<f64> {
        let rs = self.rs();
        let b = self.lax_b(x)?;
        let dl = self.lax_dot_fd(x, zs, 1e-3)?;
        let mut worst = 0.0f64;
        for (z, d) in zs.iter().zip(&dl) {
            let c = rs.br(&b.eval(*z)?, &self.lax_l(x, *z)?);
            worst = worst.max((d - &c).norm_max());
        }
        Ok(worst)
    }

    /// max_z ‖dL/dt − [R(M), L] − (X_J R)(M)‖ for the rational family at any point.
    pub fn quasi_lax_residual(&self, x: &PhasePoint, zs: &[C64]) -> Result<f64> {
        let rs = self.rs();
        let b = self.r_of_m(x)?;
        let an = self.quasi_lax_anomaly(x)?;
        let dl = self.lax_dot_fd(x, zs, 1e-3)?;
        let mut worst = 0.0f64;
        for (z, d) in zs.iter().zip(&dl) {
            let mut e = d - &rs.br(&b.eval(*z)?, &self.lax_l(x, *z)?);
            e -= &an.eval(*z)?;
            worst = worst.max(e.norm_max());
        }
        Ok(worst)
    }

    pub fn lax_matrix(&self, x: &PhasePoint, z: C64) -> Result<DMatrix<C64>> {
        self.rs().matrix_rep(&self.lax_l(x, z)?)
    }

    /// h_k(z) = tr(ρ(L(z))^k)/k for each sample z and k = 1..=kmax.
    pub fn conserved_spectrum(&self, x: &PhasePoint, zs: &[C64], kmax: usize) -> Result<Vec<Vec<C64>>> {
        zs.iter().map(|&z| Ok(trace_invariants(&self.lax_matrix(x, z)?, kmax))).collect()
    }

    /// Gradient of the basis-`a` coefficient of L(z) as a function of (q, p, ξ).
    pub fn lax_coefficient_gradient(&self, x: &PhasePoint, z: C64, a: usize) -> Result<Gradient> {
        let rs = self.rs();
        let n = rs.rank();
        let mut g = Gradient { dq: vec![ZERO; n], dp: vec![ZERO; n], dxi: rs.zero() };
        if a < n {
            g.dp[a] = C64::new(1.0, 0.0);
            g.dxi.coeffs[a] = self.r.psi(z)?;
            return Ok(g);
        }
        let k = a - n;
        let xk = rs.pair_root(k, &x.q);
        g.dxi.coeffs[n + rs.neg(k)] = self.r.phi(k, xk, z)?;
        if self.r.depends_on_q(k) {
            let d = self.r.phi_jet(k, xk, z)?.deriv(1, 0) * x.xi.coeffs[a];
            for (i, ah) in rs.alpha_h(k).iter().enumerate() {
                g.dq[i] = d * ah;
            }
        }
        Ok(g)
    }

    /// {L¹(z), L²(w)} as a tensor, from the phase space bracket.
    pub fn lax_bracket(&self, x: &PhasePoint, z: C64, w: C64) -> Result<crate::rmatrix::Tensor> {
        let rs = self.rs();
        let dim = rs.dim();
        let gz: Vec<Gradient> = (0..dim).map(|a| self.lax_coefficient_gradient(x, z, a)).collect::<Result<_>>()?;
        let gw: Vec<Gradient> = (0..dim).map(|a| self.lax_coefficient_gradient(x, w, a)).collect::<Result<_>>()?;
        let mut t = crate::rmatrix::Tensor::zeros(dim);
        for a in 0..dim {
            for b in 0..dim {
                t.set(a, b, bracket_full(rs, &gz[a], &gw[b], x));
            }
        }
        Ok(t)
    }

    /// The r-matrix side: −[r(q, z−w), L(z)⊗1 + 1⊗L(w)] − Σ_i J_i ∂_{q_i} r(q, z−w).
    pub fn lax_bracket_rmatrix(&self, x: &PhasePoint, z: C64, w: C64) -> Result<crate::rmatrix::Tensor> {
        let rs = self.rs();
        let dim = rs.dim();
        let r = self.r.r_eval(&x.q, z - w)?;
        let lz = self.lax_l(x, z)?;
        let lw = self.lax_l(x, w)?;
        let adz: Vec<AlgElement> = (0..dim).map(|a| rs.br(&rs.basis(a), &lz)).collect();
        let adw: Vec<AlgElement> = (0..dim).map(|a| rs.br(&rs.basis(a), &lw)).collect();
        let mut t = crate::rmatrix::Tensor::zeros(dim);
        for a in 0..dim {
            for b in 0..dim {
                let rab = r.get(a, b);
                if rab == ZERO {
                    continue;
                }
                for c in 0..dim {
                    let v = adz[a].coeffs[c];
                    if v != ZERO {
                        t.set(c, b, t.get(c, b) - rab * v);
                    }
                    let v = adw[b].coeffs[c];
                    if v != ZERO {
                        t.set(a, c, t.get(a, c) - rab * v);
                    }
                }
            }
        }
        let j = momentum_j(rs, x);
        for (i, ji) in j.iter().enumerate() {
            if *ji == ZERO {
                continue;
            }
            let d = self.r.r_dq(&x.q, z - w, i)?;
            for (tv, dv) in t.data.iter_mut().zip(&d.data) {
                *tv -= ji * dv;
            }
        }
        Ok(t)
    }

    /// max-norm of the difference of the two sides of the fundamental bracket relation.
    pub fn fpbr_residual(&self, x: &PhasePoint, z: C64, w: C64) -> Result<f64> {
        let a = self.lax_bracket(x, z, w)?;
        let b = self.lax_bracket_rmatrix(x, z, w)?;
        Ok(a.data.iter().zip(&b.data).fold(0.0, |m, (u, v)| m.max((u - v).norm())))
    }

    // Reduced system.

    pub fn hamiltonian_reduced(&self, xr: &ReducedPoint) -> Result<C64> {
        let rs = self.rs();
        let mut h: C64 = xr.p.iter().map(|p| p * p).sum::<C64>() * 0.5;
        for k in 0..rs.num_roots() {
            let prod = xr.s[k] * xr.s[rs.neg(k)];
            if prod != ZERO {
                h += 0.5 * self.potential(k, rs.pair_root(k, &xr.q))?.0 * prod;
            }
        }
        Ok(h)
    }

    pub fn hamiltonian_reduced_gradient(&self, xr: &ReducedPoint) -> Result<ReducedGradient> {
        let rs = self.rs();
        let n = rs.rank();
        let mut dq = vec![ZERO; n];
        let mut ds = vec![ZERO; rs.num_roots()];
        for k in 0..rs.num_roots() {
            let (sa, sb) = (xr.s[k], xr.s[rs.neg(k)]);
            if sa == ZERO && sb == ZERO {
                continue;
            }
            let (w, dw) = self.potential(k, rs.pair_root(k, &xr.q))?;
            if !rs.is_simple(k) {
                ds[k] = w * sb;
            }
            for (i, a) in rs.alpha_h(k).iter().enumerate() {
                dq[i] += 0.5 * dw * a * sa * sb;
            }
        }
        Ok(ReducedGradient { dq, dp: xr.p.clone(), ds })
    }

    pub fn lax_l0(&self, xr: &ReducedPoint, z: C64) -> Result<AlgElement> {
        let rs = self.rs();
        let n = rs.rank();
        let mut l = rs.zero();
        l.coeffs[..n].copy_from_slice(&xr.p);
        for k in 0..rs.num_roots() {
            if xr.s[k] != ZERO {
                l.coeffs[n + k] = self.r.phi(k, rs.pair_root(k, &xr.q), z)? * xr.s[k];
            }
        }
        Ok(l)
    }

    pub fn lax_l0_matrix(&self, xr: &ReducedPoint, z: C64) -> Result<DMatrix<C64>> {
        self.rs().matrix_rep(&self.lax_l0(xr, z)?)
    }

    /// (q̇, ṗ, ṡ) for the flow of H₀ under the reduced bracket.
    pub fn reduced_vector_field(&self, xr: &ReducedPoint) -> Result<ReducedPoint> {
        let rs = self.rs();
        let g = self.hamiltonian_reduced_gradient(xr)?;
        let x = lift(rs, xr)?;
        let lg = lift_gradient(rs, xr, &g);
        let dxi = rs.br(&lg.dxi, &x.xi);
        Ok(ReducedPoint { q: g.dp.iter().map(|v| -v).collect(), p: g.dq, s: project_tangent(rs, xr, &dxi) })
    }

    pub fn integrate_reduced(&self, x0: &ReducedPoint, t_end: f64, tol: f64) -> Result<Trajectory<ReducedPoint>> {
        self.integrate_reduced_with(x0, t_end, OdeOptions::with_tol(tol))
    }

    pub fn integrate_reduced_with(
        &self,
        x0: &ReducedPoint,
        t_end: f64,
        opts: OdeOptions,
    ) -> Result<Trajectory<ReducedPoint>> {
        self.r.check_q(&x0.q)?;
        let n = self.rs().rank();
        let sol = dopri5(
            |_t, y| Ok(self.reduced_vector_field(&ReducedPoint::from_slice(n, y))?.to_vec()),
            |y| self.guard(&y[..n]),
            0.0,
            &x0.to_vec(),
            t_end,
            opts,
        );
        let points: Vec<ReducedPoint> = sol.y.iter().map(|y| ReducedPoint::from_slice(n, y)).collect();
        let energy = points.iter().map(|x| self.hamiltonian_reduced(x).unwrap_or(C64::new(f64::NAN, 0.0))).collect();
        let constraint = vec![0.0; points.len()];
        Ok(Trajectory { t: sol.t, points, energy, constraint, stop: sol.stop })
    }

    pub fn flow_reduced(&self, x0: &ReducedPoint, t: f64, tol: f64) -> Result<ReducedPoint> {
        let opts = OdeOptions { record: false, ..OdeOptions::with_tol(tol) };
        let tr = self.integrate_reduced_with(x0, t, opts)?;
        match &tr.stop {
            Stop::Completed => Ok(tr.last().clone()),
            s => Err(Error::Pole(format!("flow stopped early: {s:?}"))),
        }
    }

    pub fn conserved_spectrum_reduced(&self, xr: &ReducedPoint, zs: &[C64], kmax: usize) -> Result<Vec<Vec<C64>>> {
        zs.iter().map(|&z| Ok(trace_invariants(&self.lax_l0_matrix(xr, z)?, kmax))).collect()
    }

    /// Coefficients of det(ρ(L₀(z)) − w) in w, one row per sample z.
    pub fn spectral_curve(&self, xr: &ReducedPoint, zs: &[C64]) -> Result<Vec<Vec<C64>>> {
        zs.iter().map(|&z| Ok(char_poly(&self.lax_l0_matrix(xr, z)?))).collect()
    }

    /// Gradient of h_k(z) = tr(ρ(L₀(z))^k)/k in (q, p, s).
    pub fn trace_power_gradient(&self, xr: &ReducedPoint, z: C64, k: usize) -> Result<ReducedGradient> {
        let rs = self.rs();
        let n = rs.rank();
        let a = self.lax_l0_matrix(xr, z)?;
        let d = a.nrows();
        let mut pw = DMatrix::<C64>::identity(d, d);
        for _ in 1..k {
            pw = &pw * &a;
        }
        let mut dp = vec![ZERO; n];
        for (i, dpi) in dp.iter_mut().enumerate() {
            let h = rs.matrix_rep(&rs.h(i))?;
            *dpi = (0..d).map(|j| pw[(j, j)] * h[(j, j)]).sum();
        }
        let mut dq = vec![ZERO; n];
        let mut ds = vec![ZERO; rs.num_roots()];
        for b in 0..rs.num_roots() {
            let (i, j) = rs.entry(b);
            let t = pw[(j, i)];
            let x = rs.pair_root(b, &xr.q);
            if !rs.is_simple(b) {
                ds[b] = self.r.phi(b, x, z)? * t;
            }
            if xr.s[b] != ZERO && self.r.depends_on_q(b) {
                let dphi = self.r.phi_jet(b, x, z)?.deriv(1, 0);
                for (c, ah) in rs.alpha_h(b).iter().enumerate() {
                    dq[c] += dphi * ah * xr.s[b] * t;
                }
            }
        }
        Ok(ReducedGradient { dq, dp, ds })
    }

    /// max |{h_{k1}(z1), h_{k2}(z2)}| over the requested pairs.
    pub fn involution_check(&self, xr: &ReducedPoint, pairs: &[(Invariant, Invariant)]) -> Result<f64> {
        let rs = self.rs();
        let mut worst = 0.0f64;
        for &((z1, k1), (z2, k2)) in pairs {
            let g1 = self.trace_power_gradient(xr, z1, k1)?;
            let g2 = self.trace_power_gradient(xr, z2, k2)?;
            worst = worst.max(bracket_reduced(rs, &g1, &g2, xr)?.norm());
        }
        Ok(worst)
    }

    /// B₀ = B − ġ g⁻¹ at the slice lift, with g the gauge map.
    pub fn lax_b0(&self, xr: &ReducedPoint) -> Result<Laurent> {
        let rs = self.rs().clone();
        let n = rs.rank();
        let x = lift(&rs, xr)?;
        let b = self.lax_b(&x)?;
        let v = self.vector_field(&x)?;
        let mut gdot = rs.zero();
        for i in 0..n {
            let ci: C64 = (0..n).map(|j| v.xi.coeffs[n + rs.simple_roots()[j]] * rs.cartan_inverse_f64(j, i)).sum();
            for (a, h) in rs.coroot(i).iter().enumerate() {
                gdot.coeffs[a] += ci * h;
            }
        }
        let bf = b.function();
        let f: LaurentFn = Arc::new(move |z: C64| Ok(&bf(z)? - &gdot));
        Laurent::from_fn(f, b.pole_order())
    }

    /// max_z ‖dL₀/dt − [B₀, L₀]‖ with dL₀/dt by finite differences along the reduced flow.
    pub fn lax_residual_reduced(&self, xr: &ReducedPoint, zs: &[C64]) -> Result<f64> {
        let rs = self.rs();
        let delta = 1e-3;
        let pts: Vec<ReducedPoint> =
            [-2.0, -1.0, 1.0, 2.0].iter().map(|s| self.flow_reduced(xr, s * delta, 1e-13)).collect::<Result<_>>()?;
        let b0 = self.lax_b0(xr)?;
        let mut worst = 0.0f64;
        for &z in zs {
            let ls: Vec<AlgElement> = pts.iter().map(|p| self.lax_l0(p, z)).collect::<Result<_>>()?;
            let d = fd5(&ls[0], &ls[1], &ls[2], &ls[3], delta);
            let c = rs.br(&b0.eval(z)?, &self.lax_l0(xr, z)?);
            worst = worst.max((&d - &c).norm_max());
        }
        Ok(worst)
    }

    /// Isospectral drift along `traj` and the gauge-identity Lax residual at
    /// every `stride`-th point.
    pub fn lax_pair_reduced(&self, traj: &Trajectory<ReducedPoint>, zs: &[C64], stride: usize) -> Result<LaxReport> {
        let first = self.spectral_curve(&traj.points[0], zs)?;
        let mut rep = LaxReport::default();
        for (idx, p) in traj.points.iter().enumerate() {
            let cur = self.spectral_curve(p, zs)?;
            for (r0, r1) in first.iter().zip(&cur) {
                for (a, b) in r0.iter().zip(r1) {
                    rep.isospectral = rep.isospectral.max((a - b).norm() / a.norm().max(1.0));
                }
            }
            if stride > 0 && idx % stride == 0 {
                rep.lax = rep.lax.max(self.lax_residual_reduced(p, zs)?);
            }
        }
        Ok(rep)
    }
}
