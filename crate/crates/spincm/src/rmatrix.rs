//! Dynamical r-matrices r(q, z) and the operator R_q on Laurent elements.
//!
//! Every family has the shape
//! `r(q, z) = ψ(z) Σ h_i⊗h_i + Σ_α φ_α((α,q), z) e_α⊗e_{−α}`
//! so the code only needs ψ and φ_α, plus their Taylor jets for derivatives.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::elliptic::{Lattice, POLE_TOL};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::laurent::{contour_mean, residue_pairing, Laurent, LaurentFn};
use crate::rootsys::{AlgElement, RootSystem, C64};

const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyTag {
    Rational,
    Trigonometric,
    Elliptic,
}

#[derive(Clone, Debug)]
pub enum Case {
    /// `dynamic[k]` marks α_k ∈ Δ′.
    Rational { dynamic: Vec<bool> },
    /// `span[k]` marks α_k ∈ Δ(Π′); `opposite` swaps the roles of Δ_±.
    Trigonometric { simple: Vec<usize>, span: Vec<bool>, opposite: bool },
    Elliptic { lattice: Lattice },
}

/// Family together with its case data and the root system it lives on.
#[derive(Clone, Debug)]
pub struct RMatrixSpec {
    rs: RootSystem,
    case: Case,
    fault: f64,
}

/// Element of g⊗g, dense over the basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    pub dim: usize,
    pub data: Vec<C64>,
}

impl Tensor {
    pub fn zeros(dim: usize) -> Self {
        Tensor { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn get(&self, a: usize, b: usize) -> C64 {
        self.data[a * self.dim + b]
    }

    pub fn set(&mut self, a: usize, b: usize, v: C64) {
        self.data[a * self.dim + b] = v;
    }

    /// r^{21}.
    pub fn flip(&self) -> Tensor {
        let mut t = Tensor::zeros(self.dim);
        for a in 0..self.dim {
            for b in 0..self.dim {
                t.set(b, a, self.get(a, b));
            }
        }
        t
    }

    pub fn norm_max(&self) -> f64 {
        self.data.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    fn nonzeros(&self) -> Vec<(usize, usize, C64)> {
        let mut v = Vec::new();
        for a in 0..self.dim {
            for b in 0..self.dim {
                let x = self.get(a, b);
                if x != C64::new(0.0, 0.0) {
                    v.push((a, b, x));
                }
            }
        }
        v
    }
}

/// Residuals of the zero-weight, unitarity and residue conditions.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct AxiomReport {
    pub zero_weight: f64,
    pub unitarity: f64,
    pub residue: f64,
}

impl AxiomReport {
    pub fn max(&self) -> f64 {
        self.zero_weight.max(self.unitarity).max(self.residue)
    }

    pub fn merge(&self, o: &AxiomReport) -> AxiomReport {
        AxiomReport {
            zero_weight: self.zero_weight.max(o.zero_weight),
            unitarity: self.unitarity.max(o.unitarity),
            residue: self.residue.max(o.residue),
        }
    }
}

fn is_closed(rs: &RootSystem, set: &[bool]) -> Option<String> {
    for a in 0..rs.num_roots() {
        if !set[a] {
            continue;
        }
        if !set[rs.neg(a)] {
            return Some(format!("{} is in the set but its negative is not", rs.label(a)));
        }
        for b in 0..rs.num_roots() {
            if set[b] {
                if let Some(c) = rs.root_of_root_sum(a, b) {
                    if !set[c] {
                        return Some(format!("{} + {} is a root outside the set", rs.label(a), rs.label(b)));
                    }
                }
            }
        }
    }
    None
}

impl RMatrixSpec {
    /// Rational family with Δ′ given as root indices.
    pub fn rational(rs: &RootSystem, dynamic_roots: &[usize]) -> Result<Self> {
        let mut dynamic = vec![false; rs.num_roots()];
        for &k in dynamic_roots {
            if k >= rs.num_roots() {
                return Err(Error::Invalid(format!("root index {k} out of range")));
            }
            dynamic[k] = true;
        }
        if let Some(msg) = is_closed(rs, &dynamic) {
            return Err(Error::Invalid(format!("Δ′ not closed: {msg}")));
        }
        Ok(RMatrixSpec { rs: rs.clone(), case: Case::Rational { dynamic }, fault: 0.0 })
    }

    /// Rational family with Δ′ = Δ.
    pub fn rational_full(rs: &RootSystem) -> Self {
        let all: Vec<usize> = (0..rs.num_roots()).collect();
        Self::rational(rs, &all).expect("Δ is closed")
    }

    /// Trigonometric family; `simple` lists positions 0..N of the simple roots in Π′.
    pub fn trigonometric(rs: &RootSystem, simple: &[usize]) -> Result<Self> {
        for &i in simple {
            if i >= rs.rank() {
                return Err(Error::Invalid(format!("simple root position {i} out of range")));
            }
        }
        let span = (0..rs.num_roots())
            .map(|k| rs.root(k).iter().enumerate().all(|(i, &m)| m == 0 || simple.contains(&i)))
            .collect();
        Ok(RMatrixSpec {
            rs: rs.clone(),
            case: Case::Trigonometric { simple: simple.to_vec(), span, opposite: false },
            fault: 0.0,
        })
    }

    pub fn elliptic(rs: &RootSystem, lattice: Lattice) -> Self {
        RMatrixSpec { rs: rs.clone(), case: Case::Elliptic { lattice }, fault: 0.0 }
    }

    /// Uses Δ_− as the polarization's positive half (trigonometric only).
    pub fn with_opposite_polarization(mut self) -> Self {
        if let Case::Trigonometric { opposite, .. } = &mut self.case {
            *opposite = !*opposite;
        }
        self
    }

    /// Adds ε(e_{α1}⊗e_{−α1} − e_{−α1}⊗e_{α1}). This keeps the zero-weight,
    /// unitarity and residue conditions but breaks CDYBE; a negative control.
    pub fn with_fault(mut self, eps: f64) -> Self {
        self.fault = eps;
        self
    }

    pub fn fault(&self) -> f64 {
        self.fault
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn case(&self) -> &Case {
        &self.case
    }

    pub fn family(&self) -> FamilyTag {
        match self.case {
            Case::Rational { .. } => FamilyTag::Rational,
            Case::Trigonometric { .. } => FamilyTag::Trigonometric,
            Case::Elliptic { .. } => FamilyTag::Elliptic,
        }
    }

    /// Whether φ_α depends on (α, q), i.e. α carries a pole in q.
    pub fn is_dynamic(&self, k: usize) -> bool {
        match &self.case {
            Case::Rational { dynamic } => dynamic[k],
            Case::Trigonometric { span, .. } => span[k],
            Case::Elliptic { .. } => true,
        }
    }

    /// Whether φ_α varies with (α, q) at all.
    pub fn depends_on_q(&self, k: usize) -> bool {
        match &self.case {
            Case::Rational { dynamic } => dynamic[k],
            _ => true,
        }
    }

    /// Roots that enter the Hamiltonian: all but the rational roots outside Δ′.
    pub fn couples(&self, k: usize) -> bool {
        !matches!(&self.case, Case::Rational { dynamic } if !dynamic[k])
    }

    fn fault_for(&self, k: usize) -> f64 {
        if self.fault == 0.0 {
            return 0.0;
        }
        let a1 = self.rs.simple_roots()[0];
        if k == a1 {
            self.fault
        } else if k == self.rs.neg(a1) {
            -self.fault
        } else {
            0.0
        }
    }

    fn trig_constant(&self, k: usize, x: C64) -> C64 {
        match &self.case {
            Case::Trigonometric { span, opposite, .. } => {
                if span[k] {
                    x.cos() / x.sin()
                } else if self.rs.is_positive(k) != *opposite {
                    -I
                } else {
                    I
                }
            }
            _ => unreachable!(),
        }
    }

    fn check_z(&self, z: C64) -> Result<()> {
        let bad = match &self.case {
            Case::Rational { .. } => z.norm() < POLE_TOL,
            Case::Trigonometric { .. } => z.sin().norm() < POLE_TOL,
            Case::Elliptic { lattice } => lattice.near_lattice(z, POLE_TOL),
        };
        if bad {
            Err(Error::Pole(format!("spectral parameter {z} is singular")))
        } else {
            Ok(())
        }
    }

    /// Distance proxy of (α, q) to the singular set of φ_α; `None` if φ_α is regular in x.
    pub fn root_singularity(&self, k: usize, x: C64) -> Option<f64> {
        if !self.is_dynamic(k) {
            return None;
        }
        Some(match &self.case {
            Case::Rational { .. } => x.norm(),
            Case::Trigonometric { .. } => x.sin().norm(),
            Case::Elliptic { lattice } => lattice.lattice_distance(x),
        })
    }

    /// Fails with a pole error naming the first root whose hyperplane q lies on.
    pub fn check_q(&self, q: &[C64]) -> Result<()> {
        if q.len() != self.rs.rank() {
            return Err(Error::Structural(format!("q has {} coordinates, rank is {}", q.len(), self.rs.rank())));
        }
        for k in 0..self.rs.num_roots() {
            let x = self.rs.pair_root(k, q);
            if let Some(d) = self.root_singularity(k, x) {
                if d < POLE_TOL {
                    return Err(Error::Pole(format!("(α, q) singular for root {}", self.rs.label(k))));
                }
            }
        }
        Ok(())
    }

    pub fn psi(&self, z: C64) -> Result<C64> {
        self.check_z(z)?;
        Ok(match &self.case {
            Case::Rational { .. } => z.inv(),
            Case::Trigonometric { .. } => z.cos() / z.sin() + z / 3.0,
            Case::Elliptic { lattice } => lattice.zeta(z)?,
        })
    }

    /// φ_α(x, z) for root index k.
    pub fn phi(&self, k: usize, x: C64, z: C64) -> Result<C64> {
        self.check_z(z)?;
        let v = match &self.case {
            Case::Rational { dynamic } => z.inv() + if dynamic[k] { x.inv() } else { C64::new(0.0, 0.0) },
            Case::Trigonometric { .. } => (z.cos() / z.sin() + self.trig_constant(k, x)) * (z * x / 3.0).exp(),
            Case::Elliptic { lattice } => -lattice.l_kernel(x, z)?,
        };
        Ok(v + self.fault_for(k))
    }

    pub fn psi_jet(&self, z0: C64) -> Result<Jet> {
        self.check_z(z0)?;
        let z = Jet::var_z(z0);
        Ok(match &self.case {
            Case::Rational { .. } => z.recip(),
            Case::Trigonometric { .. } => z.cot() + z.scale(C64::new(1.0 / 3.0, 0.0)),
            Case::Elliptic { lattice } => {
                let t = lattice.log_sigma_taylor(z0, crate::jet::DEG + 1)?;
                let d: Vec<C64> = (1..t.len()).map(|k| t[k] * k as f64).collect();
                z.compose(&d)
            }
        })
    }

    /// Jet of φ_α around (x0, z0).
    pub fn phi_jet(&self, k: usize, x0: C64, z0: C64) -> Result<Jet> {
        self.check_z(z0)?;
        let x = Jet::var_x(x0);
        let z = Jet::var_z(z0);
        let j = match &self.case {
            Case::Rational { dynamic } => {
                let zr = z.recip();
                if dynamic[k] {
                    zr + x.recip()
                } else {
                    zr
                }
            }
            Case::Trigonometric { span, .. } => {
                let c = if span[k] { x.cot() } else { Jet::constant(self.trig_constant(k, x0)) };
                (z.cot() + c) * (z * x).scale(C64::new(1.0 / 3.0, 0.0)).exp()
            }
            Case::Elliptic { lattice } => -lattice.l_jet(x0, z0)?,
        };
        Ok(j + C64::new(self.fault_for(k), 0.0))
    }

    /// The Casimir tensor Ω.
    pub fn omega(&self) -> Tensor {
        let rs = &self.rs;
        let n = rs.rank();
        let mut t = Tensor::zeros(rs.dim());
        for i in 0..n {
            t.set(i, i, C64::new(1.0, 0.0));
        }
        for k in 0..rs.num_roots() {
            t.set(n + k, n + rs.neg(k), C64::new(1.0, 0.0));
        }
        t
    }

    pub fn r_eval(&self, q: &[C64], z: C64) -> Result<Tensor> {
        self.check_q(q)?;
        let rs = &self.rs;
        let n = rs.rank();
        let mut t = Tensor::zeros(rs.dim());
        let psi = self.psi(z)?;
        for i in 0..n {
            t.set(i, i, psi);
        }
        for k in 0..rs.num_roots() {
            t.set(n + k, n + rs.neg(k), self.phi(k, rs.pair_root(k, q), z)?);
        }
        Ok(t)
    }

    /// ∂r/∂q_i as a tensor.
    pub fn r_dq(&self, q: &[C64], z: C64, i: usize) -> Result<Tensor> {
        let rs = &self.rs;
        let n = rs.rank();
        let mut t = Tensor::zeros(rs.dim());
        for k in 0..rs.num_roots() {
            let a = rs.alpha_h(k)[i];
            if a == 0.0 || !self.depends_on_q(k) {
                continue;
            }
            let j = self.phi_jet(k, rs.pair_root(k, q), z)?;
            t.set(n + k, n + rs.neg(k), j.deriv(1, 0) * a);
        }
        Ok(t)
    }

    /// ⟨r(q, z), 1⊗ξ⟩ for a covector given as Iξ.
    pub fn contract_second(&self, q: &[C64], z: C64, xi: &AlgElement) -> Result<AlgElement> {
        let rs = &self.rs;
        let n = rs.rank();
        let mut out = rs.zero();
        let psi = self.psi(z)?;
        for i in 0..n {
            out.coeffs[i] = psi * xi.coeffs[i];
        }
        for k in 0..rs.num_roots() {
            if xi.coeffs[n + k] != C64::new(0.0, 0.0) {
                out.coeffs[n + k] = self.phi(k, rs.pair_root(k, q), z)? * xi.coeffs[n + k];
            }
        }
        Ok(out)
    }

    /// Σ_k (1/k!) ⟨∂_w^k r(q, w), X_{-(k+1)}⊗1⟩, optionally differentiated in q along `dir`.
    fn r_sum_first(&self, q: &[C64], w: C64, principal: &[AlgElement], dir: Option<&[C64]>) -> Result<AlgElement> {
        let rs = &self.rs;
        let n = rs.rank();
        let mut out = rs.zero();
        if principal.is_empty() {
            return Ok(out);
        }
        let fact = |k: usize| crate::jet::factorial(k);
        if dir.is_none() {
            let pj = self.psi_jet(w)?;
            for (k, xk) in principal.iter().enumerate() {
                let c = pj.deriv(0, k) / fact(k);
                for i in 0..n {
                    out.coeffs[i] += c * xk.coeffs[i];
                }
            }
        }
        for b in 0..rs.num_roots() {
            if principal.iter().all(|x| x.coeffs[n + b] == C64::new(0.0, 0.0)) {
                continue;
            }
            let a = rs.neg(b);
            let scale = match dir {
                None => C64::new(1.0, 0.0),
                Some(v) => {
                    if !self.depends_on_q(a) {
                        continue;
                    }
                    rs.pair_root(a, v)
                }
            };
            let j = self.phi_jet(a, rs.pair_root(a, q), w)?;
            let dx = if dir.is_some() { 1 } else { 0 };
            for (k, xk) in principal.iter().enumerate() {
                out.coeffs[n + b] += scale * j.deriv(dx, k) / fact(k) * xk.coeffs[n + b];
            }
        }
        Ok(out)
    }

    /// R_q ξ for a covector-valued Laurent element given through Iξ.
    pub fn r_apply(&self, q: &[C64], xi: &Laurent) -> Result<Laurent> {
        self.check_q(q)?;
        let me = self.clone();
        let q = q.to_vec();
        let p = xi.principal.clone();
        let f = xi.function();
        let order = p.len();
        let g: LaurentFn = Arc::new(move |z: C64| {
            let mut v = f(z)?.scale(C64::new(0.5, 0.0));
            v += &me.r_sum_first(&q, -z, &p, None)?;
            Ok(v)
        });
        Laurent::from_fn(g, order)
    }

    /// Directional derivative X_v(R_q ξ) of the operator in q.
    pub fn r_apply_dq(&self, q: &[C64], v: &[C64], xi: &Laurent) -> Result<Laurent> {
        self.check_q(q)?;
        let me = self.clone();
        let q = q.to_vec();
        let v = v.to_vec();
        let p = xi.principal.clone();
        let order = p.len();
        let g: LaurentFn = Arc::new(move |z: C64| me.r_sum_first(&q, -z, &p, Some(&v)));
        Laurent::from_fn(g, order)
    }

    pub fn verify_axioms(&self, q: &[C64], zs: &[C64]) -> Result<AxiomReport> {
        let rs = &self.rs;
        let n = rs.rank();
        let dim = rs.dim();
        let mut rep = AxiomReport::default();
        for &z in zs {
            let r = self.r_eval(q, z)?;
            for i in 0..n {
                let mut w = Tensor::zeros(dim);
                for (a, b, v) in r.nonzeros() {
                    for &(c, s) in rs.structure(i, a) {
                        w.data[c * dim + b] += v * s;
                    }
                    for &(c, s) in rs.structure(i, b) {
                        w.data[a * dim + c] += v * s;
                    }
                }
                rep.zero_weight = rep.zero_weight.max(w.norm_max());
            }
            let rm = self.r_eval(q, -z)?.flip();
            let u = r.data.iter().zip(&rm.data).fold(0.0f64, |m, (a, b)| m.max((a + b).norm()));
            rep.unitarity = rep.unitarity.max(u);
        }
        let res = contour_mean(0.1, 256, |z| Ok(self.r_eval(q, z)?.data))?;
        let om = self.omega();
        rep.residue = res.iter().zip(&om.data).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        Ok(rep)
    }

    /// Max-norm of Alt(d_h r) + [r12, r13] + [r12, r23] + [r13, r23].
    pub fn verify_cdybe(&self, q: &[C64], z1: C64, z2: C64, z3: C64) -> Result<f64> {
        self.check_q(q)?;
        let rs = &self.rs;
        let n = rs.rank();
        let dim = rs.dim();
        let (z12, z13, z23) = (z1 - z2, z1 - z3, z2 - z3);
        let r12 = self.r_eval(q, z12)?.nonzeros();
        let r13 = self.r_eval(q, z13)?.nonzeros();
        let r23 = self.r_eval(q, z23)?.nonzeros();
        let mut t = vec![C64::new(0.0, 0.0); dim * dim * dim];
        let idx = |a: usize, b: usize, c: usize| (a * dim + b) * dim + c;
        for &(a, b, x) in &r12 {
            for &(c, d, y) in &r13 {
                for &(e, s) in rs.structure(a, c) {
                    t[idx(e, b, d)] += x * y * s;
                }
            }
            for &(c, d, y) in &r23 {
                for &(e, s) in rs.structure(b, c) {
                    t[idx(a, e, d)] += x * y * s;
                }
            }
        }
        for &(a, b, x) in &r13 {
            for &(c, d, y) in &r23 {
                for &(e, s) in rs.structure(b, d) {
                    t[idx(a, c, e)] += x * y * s;
                }
            }
        }
        for i in 0..n {
            for (b, c, v) in self.r_dq(q, z23, i)?.nonzeros() {
                t[idx(i, b, c)] += v;
            }
            for (c, a, v) in self.r_dq(q, -z13, i)?.nonzeros() {
                t[idx(a, i, c)] += v;
            }
            for (a, b, v) in self.r_dq(q, z12, i)?.nonzeros() {
                t[idx(a, b, i)] += v;
            }
        }
        Ok(t.iter().fold(0.0, |m, c| m.max(c.norm())))
    }

    /// Residual of the modified dynamical Yang-Baxter equation with c = −1/4,
    /// maxed over the sample points `zs`.
    pub fn verify_mdybe(&self, q: &[C64], xi: &Laurent, eta: &Laurent, zs: &[C64]) -> Result<f64> {
        const C: f64 = -0.25;
        let rs = self.rs.clone();
        let n = rs.rank();
        let rx = self.r_apply(q, xi)?;
        let ry = self.r_apply(q, eta)?;
        let (rxf, ryf, xf, yf) = (rx.function(), ry.function(), xi.function(), eta.function());
        let rs2 = rs.clone();
        let mixed: LaurentFn = Arc::new(move |z: C64| {
            let a = rs2.br(&rxf(z)?, &yf(z)?);
            let b = rs2.br(&xf(z)?, &ryf(z)?);
            Ok(a + b)
        });
        let mixed = Laurent::from_fn(mixed, xi.pole_order() + eta.pole_order())?;
        let rm = self.r_apply(q, &mixed)?;
        let cartan_residue = |x: &Laurent| -> Vec<C64> {
            x.principal.first().map(|p| p.coeffs[..n].to_vec()).unwrap_or_else(|| vec![C64::new(0.0, 0.0); n])
        };
        let vx = cartan_residue(xi);
        let vy = cartan_residue(eta);
        let xv_ry = self.r_apply_dq(q, &vx, eta)?;
        let xv_rx = self.r_apply_dq(q, &vy, xi)?;
        let mut dpair = rs.zero();
        for i in 0..n {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[i] = C64::new(1.0, 0.0);
            let d = self.r_apply_dq(q, &e, xi)?;
            dpair.coeffs[i] = residue_pairing(&rs, &d, eta)?;
        }
        let mut worst = 0.0f64;
        for &z in zs {
            let (x, y) = (xi.eval(z)?, eta.eval(z)?);
            let mut lhs = rs.br(&rx.eval(z)?, &ry.eval(z)?);
            lhs -= &rm.eval(z)?;
            lhs += &xv_ry.eval(z)?;
            lhs -= &xv_rx.eval(z)?;
            lhs += &dpair;
            lhs.axpy(C64::new(-C, 0.0), &rs.br(&x, &y));
            worst = worst.max(lhs.norm_max());
        }
        Ok(worst)
    }
}

/// Default spectral sample: points on a circle avoiding the real axis.
pub fn sample_circle(radius: f64, count: usize) -> Vec<C64> {
    (0..count).map(|k| C64::from_polar(radius, 2.0 * PI * (k as f64 + 0.37) / count as f64)).collect()
}
