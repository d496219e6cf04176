//! Phase space T*h* × g*, the torus action and the reduction to T*h* × g*_red.
//!
//! Sign conventions: the Lie-Poisson part is the plus structure
//! `{ℓ_X, ℓ_Y} = ℓ_{[X,Y]}` and the canonical part has `{p_i, q_j} = δ_ij`.
//! With these, Hamilton's equations read `q̇ = −∂H/∂p`, `ṗ = ∂H/∂q`,
//! `d(Iξ)/dt = [dH, Iξ]`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rootsys::{AlgElement, RootSystem, C64};

/// Simple-root coordinates below this are treated as zero (outside U).
pub const U_TOL: f64 = 1e-13;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// (q, p, ξ) with ξ stored as Iξ.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    pub q: Vec<C64>,
    pub p: Vec<C64>,
    pub xi: AlgElement,
}

/// (q, p, s) with `s` indexed by root; simple-root entries are 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedPoint {
    pub q: Vec<C64>,
    pub p: Vec<C64>,
    pub s: Vec<C64>,
}

/// Gradient of a function on T*h* × g*; `dxi` is dF ∈ g, so that
/// `δF = ⟨δξ, dF⟩` on the spin factor.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradient {
    pub dq: Vec<C64>,
    pub dp: Vec<C64>,
    pub dxi: AlgElement,
}

/// Gradient of a function of (q, p, s); `ds[k] = ∂F/∂s_k`, simple entries ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedGradient {
    pub dq: Vec<C64>,
    pub dp: Vec<C64>,
    pub ds: Vec<C64>,
}

impl PhasePoint {
    pub fn new(rs: &RootSystem, q: Vec<C64>, p: Vec<C64>, xi: AlgElement) -> Result<Self> {
        let n = rs.rank();
        if q.len() != n || p.len() != n || xi.dim() != rs.dim() {
            return Err(Error::Structural(format!(
                "phase point sizes ({}, {}, {}) do not match rank {n}, dim {}",
                q.len(),
                p.len(),
                xi.dim(),
                rs.dim()
            )));
        }
        Ok(PhasePoint { q, p, xi })
    }

    pub fn to_vec(&self) -> Vec<C64> {
        let mut v = self.q.clone();
        v.extend_from_slice(&self.p);
        v.extend_from_slice(&self.xi.coeffs);
        v
    }

    pub fn from_slice(n: usize, v: &[C64]) -> Self {
        PhasePoint {
            q: v[..n].to_vec(),
            p: v[n..2 * n].to_vec(),
            xi: AlgElement::from_coeffs(v[2 * n..].to_vec()),
        }
    }

    pub fn labeled(&self, rs: &RootSystem) -> LabeledPhasePoint {
        let n = rs.rank();
        let mut xi = BTreeMap::new();
        for i in 0..n {
            xi.insert(format!("xi_h{}", i + 1), self.xi.coeffs[i]);
        }
        for k in 0..rs.num_roots() {
            xi.insert(format!("xi{}", rs.label(k)), self.xi.coeffs[n + k]);
        }
        LabeledPhasePoint { q: self.q.clone(), p: self.p.clone(), xi }
    }

    pub fn from_labeled(rs: &RootSystem, l: &LabeledPhasePoint) -> Result<Self> {
        let mut xi = rs.zero();
        for (key, v) in &l.xi {
            let a = parse_key(rs, key, "xi")?;
            xi.coeffs[a] = *v;
        }
        PhasePoint::new(rs, l.q.clone(), l.p.clone(), xi)
    }
}

fn parse_key(rs: &RootSystem, key: &str, prefix: &str) -> Result<usize> {
    let n = rs.rank();
    if let Some(rest) = key.strip_prefix(&format!("{prefix}_h")) {
        let i: usize = rest.parse().map_err(|_| Error::Invalid(format!("bad key {key}")))?;
        if (1..=n).contains(&i) {
            return Ok(i - 1);
        }
        return Err(Error::Invalid(format!("bad key {key}")));
    }
    let rest = key.strip_prefix(prefix).ok_or_else(|| Error::Invalid(format!("bad key {key}")))?;
    let m = parse_root_label(rest).ok_or_else(|| Error::Invalid(format!("bad root label in key {key}")))?;
    rs.root_index(&m).map(|k| n + k).ok_or_else(|| Error::Invalid(format!("{rest} is not a root")))
}

/// Parses "[1,-1,0]" style root labels.
pub fn parse_root_label(s: &str) -> Option<Vec<i32>> {
    let inner = s.trim().strip_prefix('[')?.strip_suffix(']')?;
    inner.split(',').map(|t| t.trim().parse().ok()).collect()
}

/// JSON-friendly phase point with root-labelled spin coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledPhasePoint {
    pub q: Vec<C64>,
    pub p: Vec<C64>,
    pub xi: BTreeMap<String, C64>,
}

/// JSON-friendly reduced point; only non-simple roots are listed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledReducedPoint {
    pub q: Vec<C64>,
    pub p: Vec<C64>,
    pub s: BTreeMap<String, C64>,
}

impl ReducedPoint {
    /// Builds a reduced point; simple-root entries of `s` are overwritten with 1.
    pub fn new(rs: &RootSystem, q: Vec<C64>, p: Vec<C64>, mut s: Vec<C64>) -> Result<Self> {
        let n = rs.rank();
        if q.len() != n || p.len() != n || s.len() != rs.num_roots() {
            return Err(Error::Structural("reduced point sizes do not match the root system".into()));
        }
        for &k in rs.simple_roots() {
            s[k] = ONE;
        }
        Ok(ReducedPoint { q, p, s })
    }

    pub fn to_vec(&self) -> Vec<C64> {
        let mut v = self.q.clone();
        v.extend_from_slice(&self.p);
        v.extend_from_slice(&self.s);
        v
    }

    pub fn from_slice(n: usize, v: &[C64]) -> Self {
        ReducedPoint { q: v[..n].to_vec(), p: v[n..2 * n].to_vec(), s: v[2 * n..].to_vec() }
    }

    pub fn labeled(&self, rs: &RootSystem) -> LabeledReducedPoint {
        let s = (0..rs.num_roots())
            .filter(|&k| !rs.is_simple(k))
            .map(|k| (format!("s{}", rs.label(k)), self.s[k]))
            .collect();
        LabeledReducedPoint { q: self.q.clone(), p: self.p.clone(), s }
    }

    pub fn from_labeled(rs: &RootSystem, l: &LabeledReducedPoint) -> Result<Self> {
        let n = rs.rank();
        let mut s = vec![ZERO; rs.num_roots()];
        for (key, v) in &l.s {
            let a = parse_key(rs, key, "s")?;
            if a < n || rs.is_simple(a - n) {
                return Err(Error::Invalid(format!("{key}: simple-root coordinates are fixed to 1")));
            }
            s[a - n] = *v;
        }
        ReducedPoint::new(rs, l.q.clone(), l.p.clone(), s)
    }
}

/// `{F, G}` on the product T*h* × g*.
pub fn bracket_full(rs: &RootSystem, f: &Gradient, g: &Gradient, x: &PhasePoint) -> C64 {
    let canonical: C64 = (0..rs.rank()).map(|i| f.dp[i] * g.dq[i] - f.dq[i] * g.dp[i]).sum();
    // Symmetrized so that {F, G} = −{G, F} holds bit for bit.
    let lp = rs.form(&x.xi, &rs.br(&f.dxi, &g.dxi)) - rs.form(&x.xi, &rs.br(&g.dxi, &f.dxi));
    canonical + lp * 0.5
}

/// J(q, p, ξ) = i*ξ, the Cartan block of ξ.
pub fn momentum_j(rs: &RootSystem, x: &PhasePoint) -> Vec<C64> {
    x.xi.coeffs[..rs.rank()].to_vec()
}

/// x·(q, p, ξ) = (q, p, Ad*_{x^{-1}} ξ) for log x = Σ c_i h_{α_i}.
pub fn torus_action(rs: &RootSystem, c: &[C64], x: &PhasePoint) -> PhasePoint {
    PhasePoint { q: x.q.clone(), p: x.p.clone(), xi: rs.torus_adjoint(c, &x.xi) }
}

fn simple_coords(rs: &RootSystem, xi: &AlgElement) -> Result<Vec<C64>> {
    let n = rs.rank();
    rs.simple_roots()
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let v = xi.coeffs[n + k];
            if v.norm() < U_TOL {
                Err(Error::OutsideU { root: i + 1 })
            } else {
                Ok(v)
            }
        })
        .collect()
}

/// Log-coordinates c_i = Σ_j C_ji log ξ_{α_j} of the gauge map, principal branch.
pub fn gauge_g(rs: &RootSystem, xi: &AlgElement) -> Result<Vec<C64>> {
    let logs: Vec<C64> = simple_coords(rs, xi)?.iter().map(|v| v.ln()).collect();
    let n = rs.rank();
    Ok((0..n).map(|i| (0..n).map(|j| logs[j] * rs.cartan_inverse_f64(j, i)).sum()).collect())
}

/// s_α = ξ_α Π_i ξ_{α_i}^{−m_α^i}.
pub fn project_pi(rs: &RootSystem, x: &PhasePoint) -> Result<ReducedPoint> {
    let n = rs.rank();
    let sc = simple_coords(rs, &x.xi)?;
    let s = (0..rs.num_roots())
        .map(|k| {
            if rs.is_simple(k) {
                return ONE;
            }
            let mut v = x.xi.coeffs[n + k];
            for (i, &m) in rs.root(k).iter().enumerate() {
                v *= sc[i].powi(-m);
            }
            v
        })
        .collect();
    Ok(ReducedPoint { q: x.q.clone(), p: x.p.clone(), s })
}

/// The point of the slice ξ_h = 0, ξ_{α_i} = 1, ξ_α = s_α over `xr`.
pub fn lift(rs: &RootSystem, xr: &ReducedPoint) -> Result<PhasePoint> {
    if xr.s.iter().chain(&xr.q).chain(&xr.p).any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Structural("reduced point has non-finite coordinates".into()));
    }
    let n = rs.rank();
    let mut xi = rs.zero();
    for k in 0..rs.num_roots() {
        xi.coeffs[n + k] = if rs.is_simple(k) { ONE } else { xr.s[k] };
    }
    Ok(PhasePoint { q: xr.q.clone(), p: xr.p.clone(), xi })
}

/// Gradient of F0∘π at the slice lift of `xr`.
pub fn lift_gradient(rs: &RootSystem, xr: &ReducedPoint, g: &ReducedGradient) -> Gradient {
    let n = rs.rank();
    let mut dxi = rs.zero();
    for b in 0..rs.num_roots() {
        if rs.is_simple(b) {
            continue;
        }
        let db = g.ds[b];
        if db == ZERO {
            continue;
        }
        // ∂F/∂ξ_β sits on e_{−β}.
        dxi.coeffs[n + rs.neg(b)] += db;
        for (i, &m) in rs.root(b).iter().enumerate() {
            if m != 0 {
                let ai = rs.simple_roots()[i];
                dxi.coeffs[n + rs.neg(ai)] -= db * xr.s[b] * m as f64;
            }
        }
    }
    Gradient { dq: g.dq.clone(), dp: g.dp.clone(), dxi }
}

/// Reduced bracket `{F0, G0}` computed on the slice lift.
pub fn bracket_reduced(rs: &RootSystem, f: &ReducedGradient, g: &ReducedGradient, xr: &ReducedPoint) -> Result<C64> {
    let x = lift(rs, xr)?;
    Ok(bracket_full(rs, &lift_gradient(rs, xr, f), &lift_gradient(rs, xr, g), &x))
}

/// Derivative of the reduced coordinates along a tangent vector `dxi` of ξ at the slice.
pub fn project_tangent(rs: &RootSystem, xr: &ReducedPoint, dxi: &AlgElement) -> Vec<C64> {
    let n = rs.rank();
    (0..rs.num_roots())
        .map(|b| {
            if rs.is_simple(b) {
                return ZERO;
            }
            let mut v = dxi.coeffs[n + b];
            for (i, &m) in rs.root(b).iter().enumerate() {
                if m != 0 {
                    v -= xr.s[b] * m as f64 * dxi.coeffs[n + rs.simple_roots()[i]];
                }
            }
            v
        })
        .collect()
}

/// Gradient of a single coordinate function.
pub fn coordinate_gradient(rs: &RootSystem, which: Coordinate) -> ReducedGradient {
    let n = rs.rank();
    let mut g = ReducedGradient { dq: vec![ZERO; n], dp: vec![ZERO; n], ds: vec![ZERO; rs.num_roots()] };
    match which {
        Coordinate::Q(i) => g.dq[i] = ONE,
        Coordinate::P(i) => g.dp[i] = ONE,
        Coordinate::S(k) => g.ds[k] = ONE,
    }
    g
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coordinate {
    Q(usize),
    P(usize),
    S(usize),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::build_root_system;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn canonical_pair() {
        let rs = build_root_system('A', 2).unwrap();
        let x = PhasePoint::new(&rs, vec![c(0.1, 0.0); 2], vec![c(0.2, 0.0); 2], rs.zero()).unwrap();
        let mut fq = Gradient { dq: vec![ZERO; 2], dp: vec![ZERO; 2], dxi: rs.zero() };
        let mut fp = fq.clone();
        fq.dq[0] = ONE;
        fp.dp[0] = ONE;
        assert_eq!(bracket_full(&rs, &fp, &fq, &x), ONE);
        assert_eq!(bracket_full(&rs, &fq, &fp, &x), -ONE);
    }

    #[test]
    fn gauge_a1() {
        let rs = build_root_system('A', 1).unwrap();
        let mut xi = rs.zero();
        xi.coeffs[1] = c(4.0, 0.0);
        let g = gauge_g(&rs, &xi).unwrap();
        assert!((g[0] - c(0.5 * 4f64.ln(), 0.0)).norm() < 1e-15);
        // exp(c h_α) = diag(2, 1/2)
        let h = rs.cartan_element(&[g[0] * rs.coroot(0)[0]]);
        let m = rs.matrix_rep(&h).unwrap();
        assert!((m[(0, 0)].exp() - 2.0).norm() < 1e-14);
        assert!((m[(1, 1)].exp() - 0.5).norm() < 1e-14);
    }

    #[test]
    fn outside_u() {
        let rs = build_root_system('A', 2).unwrap();
        let mut xi = rs.zero();
        xi.coeffs[2 + rs.simple_roots()[0]] = ONE;
        assert_eq!(gauge_g(&rs, &xi), Err(Error::OutsideU { root: 2 }));
    }

    #[test]
    fn spinless_a1_projection() {
        let rs = build_root_system('A', 1).unwrap();
        let m = c(1.7, 0.0);
        let xi = &rs.e(0).scale(m) + &rs.e(1).scale(m);
        let x = PhasePoint::new(&rs, vec![c(0.3, 0.0)], vec![ZERO], xi).unwrap();
        let s = project_pi(&rs, &x).unwrap();
        assert!((s.s[1] - m * m).norm() < 1e-14);
        assert_eq!(s.s[0], ONE);
    }

    #[test]
    fn labels_round_trip() {
        let rs = build_root_system('A', 2).unwrap();
        let xi = AlgElement::from_coeffs((0..8).map(|k| c(k as f64, -(k as f64))).collect());
        let x = PhasePoint::new(&rs, vec![c(0.1, 0.0), c(0.2, 0.0)], vec![c(1.0, 0.0), c(2.0, 0.0)], xi).unwrap();
        let l = x.labeled(&rs);
        assert!(l.xi.contains_key("xi[1,1]"));
        assert_eq!(PhasePoint::from_labeled(&rs, &l).unwrap(), x);
        let xr = project_pi(&rs, &x).unwrap();
        let lr = xr.labeled(&rs);
        assert!(lr.s.contains_key("s[1,1]"));
        let back = ReducedPoint::from_labeled(&rs, &lr).unwrap();
        for (a, b) in back.s.iter().zip(&xr.s) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
