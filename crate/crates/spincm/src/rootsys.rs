//! Root data and the Lie algebra sl(n+1) in a Chevalley-type basis.
//!
//! The basis is `h_1..h_N` (orthonormal for the trace form) followed by one
//! `e_α = E_ij` per root. Index `a < N` is a Cartan direction, `N + k` is root `k`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Element of g as coefficients over `{h_i} ∪ {e_α}`.
///
/// Covectors use the same representation through the trace form, so a spin
/// variable ξ is stored as Iξ with `ξ_i` the `h_i` coefficient and `ξ_α` the
/// `e_α` coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgElement {
    pub coeffs: Vec<C64>,
}

impl AlgElement {
    pub fn zeros(dim: usize) -> Self {
        AlgElement { coeffs: vec![C64::new(0.0, 0.0); dim] }
    }

    pub fn from_coeffs(coeffs: Vec<C64>) -> Self {
        AlgElement { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Max-norm of the coefficient vector.
    pub fn norm_max(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn scale(&self, s: C64) -> Self {
        AlgElement { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn axpy(&mut self, a: C64, x: &AlgElement) {
        for (y, x) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *y += a * x;
        }
    }
}

impl Add for &AlgElement {
    type Output = AlgElement;
    fn add(self, o: &AlgElement) -> AlgElement {
        AlgElement { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &AlgElement {
    type Output = AlgElement;
    fn sub(self, o: &AlgElement) -> AlgElement {
        AlgElement { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Add for AlgElement {
    type Output = AlgElement;
    fn add(self, o: AlgElement) -> AlgElement {
        &self + &o
    }
}

impl Sub for AlgElement {
    type Output = AlgElement;
    fn sub(self, o: AlgElement) -> AlgElement {
        &self - &o
    }
}

impl Neg for AlgElement {
    type Output = AlgElement;
    fn neg(self) -> AlgElement {
        AlgElement { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl Mul<C64> for &AlgElement {
    type Output = AlgElement;
    fn mul(self, s: C64) -> AlgElement {
        self.scale(s)
    }
}

impl Mul<C64> for AlgElement {
    type Output = AlgElement;
    fn mul(self, s: C64) -> AlgElement {
        self.scale(s)
    }
}

impl AddAssign<&AlgElement> for AlgElement {
    fn add_assign(&mut self, o: &AlgElement) {
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&AlgElement> for AlgElement {
    fn sub_assign(&mut self, o: &AlgElement) {
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a -= b;
        }
    }
}

/// Root system of type A_n with the matrix data of sl(n+1).
#[derive(Clone, Debug)]
pub struct RootSystem {
    family: char,
    rank: usize,
    /// Coefficients m_α^i over the simple roots.
    roots: Vec<Vec<i32>>,
    /// Matrix position (i, j) of e_α = E_ij.
    pos: Vec<(usize, usize)>,
    neg: Vec<usize>,
    simple: Vec<usize>,
    cartan: Vec<Vec<i64>>,
    cartan_inv: Vec<Vec<Rational64>>,
    /// Diagonal of h_i in the defining representation.
    hdiag: Vec<Vec<f64>>,
    /// α(h_i) for every root.
    alpha_h: Vec<Vec<f64>>,
    /// Coroot h_{α_i} in the orthonormal basis.
    coroots: Vec<Vec<f64>>,
    /// α(h_{α_i}) for every root, integral.
    alpha_coroot: Vec<Vec<i64>>,
    /// Sparse structure constants: `[b_a, b_b] = Σ c b_c`.
    structure: Vec<Vec<(usize, f64)>>,
}

/// JSON view of the root data.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RootSystemSummary {
    pub family: String,
    pub rank: usize,
    pub roots: Vec<Vec<i32>>,
    pub cartan: Vec<Vec<i64>>,
    pub coroots: Vec<Vec<f64>>,
}

pub fn build_root_system(family: char, rank: usize) -> Result<RootSystem> {
    match family {
        'A' if (1..=4).contains(&rank) => Ok(RootSystem::type_a(rank)),
        'A' => Err(Error::Unsupported(format!("rank {rank} for type A (1..=4 supported)"))),
        'B' | 'C' | 'D' | 'E' | 'F' | 'G' => {
            Err(Error::Unsupported(format!("family {family} has no matrix model here")))
        }
        _ => Err(Error::Unsupported(format!("unknown family {family}"))),
    }
}

fn rational_inverse(a: &[Vec<i64>]) -> Vec<Vec<Rational64>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Rational64> = row.iter().map(|&x| Rational64::from_integer(x)).collect();
            r.extend((0..n).map(|j| Rational64::from_integer((i == j) as i64)));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| m[r][c] != Rational64::from_integer(0)).expect("singular Cartan matrix");
        m.swap(c, p);
        let piv = m[c][c];
        for x in m[c].iter_mut() {
            *x /= piv;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                if f != Rational64::from_integer(0) {
                    for k in 0..2 * n {
                        let v = m[c][k];
                        m[r][k] -= f * v;
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

impl RootSystem {
    fn type_a(n: usize) -> Self {
        let d = n + 1;
        let mut pos = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                pos.push((i, j));
            }
        }
        let npos = pos.len();
        for k in 0..npos {
            let (i, j) = pos[k];
            pos.push((j, i));
        }
        let neg: Vec<usize> = (0..2 * npos).map(|k| if k < npos { k + npos } else { k - npos }).collect();
        let roots: Vec<Vec<i32>> = pos
            .iter()
            .map(|&(i, j)| {
                let (lo, hi, s) = if i < j { (i, j, 1) } else { (j, i, -1) };
                (0..n).map(|k| if lo <= k && k < hi { s } else { 0 }).collect()
            })
            .collect();
        let simple: Vec<usize> = (0..n).map(|i| pos.iter().position(|&p| p == (i, i + 1)).unwrap()).collect();
        let cartan: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match (i as i64 - j as i64).abs() {
                        0 => 2,
                        1 => -1,
                        _ => 0,
                    })
                    .collect()
            })
            .collect();
        let cartan_inv = rational_inverse(&cartan);

        // Gram-Schmidt of the coroot diagonals in exact arithmetic.
        let zero = Rational64::from_integer(0);
        let dot = |a: &[Rational64], b: &[Rational64]| a.iter().zip(b).fold(zero, |s, (x, y)| s + x * y);
        let mut ortho: Vec<Vec<Rational64>> = Vec::new();
        for k in 0..n {
            let mut v: Vec<Rational64> = (0..d)
                .map(|i| Rational64::from_integer(if i == k { 1 } else if i == k + 1 { -1 } else { 0 }))
                .collect();
            for u in &ortho {
                let f = dot(&v, u) / dot(u, u);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= f * ui;
                }
            }
            ortho.push(v);
        }
        let r2f = |r: &Rational64| *r.numer() as f64 / *r.denom() as f64;
        let hdiag: Vec<Vec<f64>> = ortho
            .iter()
            .map(|u| {
                let nrm = r2f(&dot(u, u)).sqrt();
                u.iter().map(|x| r2f(x) / nrm).collect()
            })
            .collect();
        let alpha_h: Vec<Vec<f64>> =
            pos.iter().map(|&(i, j)| (0..n).map(|k| hdiag[k][i] - hdiag[k][j]).collect()).collect();
        let coroots: Vec<Vec<f64>> = (0..n)
            .map(|c| (0..n).map(|k| hdiag[k][c] - hdiag[k][c + 1]).collect())
            .collect();
        let alpha_coroot: Vec<Vec<i64>> = roots
            .iter()
            .map(|m| (0..n).map(|i| (0..n).map(|k| m[k] as i64 * cartan[i][k]).sum()).collect())
            .collect();

        let mut rs = RootSystem {
            family: 'A',
            rank: n,
            roots,
            pos,
            neg,
            simple,
            cartan,
            cartan_inv,
            hdiag,
            alpha_h,
            coroots,
            alpha_coroot,
            structure: Vec::new(),
        };
        rs.structure = rs.compute_structure();
        rs
    }

    fn compute_structure(&self) -> Vec<Vec<(usize, f64)>> {
        let dim = self.dim();
        let mats: Vec<DMatrix<C64>> = (0..dim).map(|a| self.basis_matrix(a)).collect();
        let mut out = Vec::with_capacity(dim * dim);
        for a in 0..dim {
            for b in 0..dim {
                let c = &mats[a] * &mats[b] - &mats[b] * &mats[a];
                let x = self.from_matrix(&c);
                out.push(
                    x.coeffs
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| v.norm() > 1e-14)
                        .map(|(k, v)| (k, v.re))
                        .collect(),
                );
            }
        }
        out
    }

    pub fn family(&self) -> char {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Size of the defining representation.
    pub fn matrix_size(&self) -> usize {
        self.rank + 1
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn dim(&self) -> usize {
        self.rank + self.roots.len()
    }

    pub fn roots(&self) -> &[Vec<i32>] {
        &self.roots
    }

    pub fn root(&self, k: usize) -> &[i32] {
        &self.roots[k]
    }

    /// Index of −α.
    pub fn neg(&self, k: usize) -> usize {
        self.neg[k]
    }

    /// Root indices of the simple roots α_1..α_N.
    pub fn simple_roots(&self) -> &[usize] {
        &self.simple
    }

    pub fn is_simple(&self, k: usize) -> bool {
        self.simple.contains(&k)
    }

    pub fn is_positive(&self, k: usize) -> bool {
        self.roots[k].iter().all(|&m| m >= 0)
    }

    pub fn root_index(&self, m: &[i32]) -> Option<usize> {
        self.roots.iter().position(|r| r.as_slice() == m)
    }

    /// Root index of E_ij.
    pub fn index_of_entry(&self, i: usize, j: usize) -> Option<usize> {
        self.pos.iter().position(|&p| p == (i, j))
    }

    pub fn entry(&self, k: usize) -> (usize, usize) {
        self.pos[k]
    }

    pub fn label(&self, k: usize) -> String {
        let parts: Vec<String> = self.roots[k].iter().map(|m| m.to_string()).collect();
        format!("[{}]", parts.join(","))
    }

    pub fn cartan_matrix(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn cartan_inverse(&self) -> &[Vec<Rational64>] {
        &self.cartan_inv
    }

    pub fn cartan_inverse_f64(&self, i: usize, j: usize) -> f64 {
        let r = self.cartan_inv[i][j];
        *r.numer() as f64 / *r.denom() as f64
    }

    /// α(h_i) for root k.
    pub fn alpha_h(&self, k: usize) -> &[f64] {
        &self.alpha_h[k]
    }

    /// α(h_{α_i}) for root k, the integer pairing with the simple coroots.
    pub fn alpha_coroot(&self, k: usize) -> &[i64] {
        &self.alpha_coroot[k]
    }

    /// Coroot h_{α_i} expressed in the orthonormal Cartan basis.
    pub fn coroot(&self, i: usize) -> &[f64] {
        &self.coroots[i]
    }

    /// (α, q) for q given in orthonormal coordinates.
    pub fn pair_root(&self, k: usize, q: &[C64]) -> C64 {
        self.alpha_h[k].iter().zip(q).map(|(a, x)| x * a).sum()
    }

    pub fn root_of_root_sum(&self, a: usize, b: usize) -> Option<usize> {
        let s: Vec<i32> = self.roots[a].iter().zip(&self.roots[b]).map(|(x, y)| x + y).collect();
        self.root_index(&s)
    }

    pub fn zero(&self) -> AlgElement {
        AlgElement::zeros(self.dim())
    }

    pub fn basis(&self, a: usize) -> AlgElement {
        let mut x = self.zero();
        x.coeffs[a] = C64::new(1.0, 0.0);
        x
    }

    pub fn e(&self, k: usize) -> AlgElement {
        self.basis(self.rank + k)
    }

    pub fn h(&self, i: usize) -> AlgElement {
        self.basis(i)
    }

    /// Cartan element with the given orthonormal coordinates.
    pub fn cartan_element(&self, v: &[C64]) -> AlgElement {
        let mut x = self.zero();
        x.coeffs[..self.rank].copy_from_slice(v);
        x
    }

    /// The trace form, with (h_i, h_j) = δ_ij and (e_α, e_{−α}) = 1.
    pub fn form(&self, x: &AlgElement, y: &AlgElement) -> C64 {
        let n = self.rank;
        let mut s: C64 = (0..n).map(|i| x.coeffs[i] * y.coeffs[i]).sum();
        for k in 0..self.num_roots() {
            s += x.coeffs[n + k] * y.coeffs[n + self.neg[k]];
        }
        s
    }

    pub fn structure(&self, a: usize, b: usize) -> &[(usize, f64)] {
        &self.structure[a * self.dim() + b]
    }

    pub(crate) fn br(&self, x: &AlgElement, y: &AlgElement) -> AlgElement {
        let dim = self.dim();
        let mut out = self.zero();
        for a in 0..dim {
            let xa = x.coeffs[a];
            if xa == C64::new(0.0, 0.0) {
                continue;
            }
            for b in 0..dim {
                let yb = y.coeffs[b];
                if yb == C64::new(0.0, 0.0) {
                    continue;
                }
                let f = xa * yb;
                for &(c, v) in &self.structure[a * dim + b] {
                    out.coeffs[c] += f * v;
                }
            }
        }
        out
    }

    fn check(&self, x: &AlgElement) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::Structural(format!(
                "element of dimension {} used with algebra of dimension {}",
                x.dim(),
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn bracket(&self, x: &AlgElement, y: &AlgElement) -> Result<AlgElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.br(x, y))
    }

    fn basis_matrix(&self, a: usize) -> DMatrix<C64> {
        let d = self.matrix_size();
        let mut m = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
        if a < self.rank {
            for i in 0..d {
                m[(i, i)] = C64::new(self.hdiag[a][i], 0.0);
            }
        } else {
            let (i, j) = self.pos[a - self.rank];
            m[(i, j)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Image in the defining representation.
    pub fn matrix_rep(&self, x: &AlgElement) -> Result<DMatrix<C64>> {
        if self.family != 'A' {
            return Err(Error::Unsupported("matrix representation needs type A".into()));
        }
        self.check(x)?;
        let d = self.matrix_size();
        let n = self.rank;
        let mut m = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
        for i in 0..d {
            m[(i, i)] = (0..n).map(|k| x.coeffs[k] * self.hdiag[k][i]).sum();
        }
        for (k, &(i, j)) in self.pos.iter().enumerate() {
            m[(i, j)] = x.coeffs[n + k];
        }
        Ok(m)
    }

    /// Inverse of `matrix_rep` on traceless matrices (the trace part is dropped).
    pub fn from_matrix(&self, m: &DMatrix<C64>) -> AlgElement {
        let n = self.rank;
        let d = self.matrix_size();
        let mut x = self.zero();
        for k in 0..n {
            x.coeffs[k] = (0..d).map(|i| m[(i, i)] * self.hdiag[k][i]).sum();
        }
        for (k, &(i, j)) in self.pos.iter().enumerate() {
            x.coeffs[n + k] = m[(i, j)];
        }
        x
    }

    /// Cartan coordinates of diag(d), trace part dropped (type A).
    pub fn cartan_from_diagonal(&self, d: &[C64]) -> Vec<C64> {
        (0..self.rank).map(|k| d.iter().zip(&self.hdiag[k]).map(|(v, h)| v * h).sum()).collect()
    }

    /// χ_α(h) for log h = Σ c_i h_{α_i}.
    pub fn character(&self, k: usize, c: &[C64]) -> C64 {
        let e: C64 = self.alpha_coroot[k].iter().zip(c).map(|(&a, ci)| ci * a as f64).sum();
        e.exp()
    }

    /// Ad_h x for the torus element with log h = Σ c_i h_{α_i}.
    pub fn torus_adjoint(&self, c: &[C64], x: &AlgElement) -> AlgElement {
        let n = self.rank;
        let mut y = x.clone();
        for k in 0..self.num_roots() {
            y.coeffs[n + k] *= self.character(k, c);
        }
        y
    }

    pub fn summary(&self) -> RootSystemSummary {
        RootSystemSummary {
            family: self.family.to_string(),
            rank: self.rank,
            roots: self.roots.clone(),
            cartan: self.cartan.clone(),
            coroots: self.coroots.clone(),
        }
    }
}
