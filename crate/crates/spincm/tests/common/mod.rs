#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spincm::elliptic::Lattice;
use spincm::phase::PhasePoint;
use spincm::rmatrix::RMatrixSpec;
use spincm::{AlgElement, RootSystem, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_c(r: &mut impl Rng, scale: f64) -> C64 {
    c(r.gen_range(-scale..scale), r.gen_range(-scale..scale))
}

pub fn rand_vec(r: &mut impl Rng, n: usize, scale: f64) -> Vec<C64> {
    (0..n).map(|_| rand_c(r, scale)).collect()
}

pub fn rand_element(rs: &RootSystem, r: &mut impl Rng) -> AlgElement {
    AlgElement::from_coeffs(rand_vec(r, rs.dim(), 1.0))
}

/// A point with (α, q) bounded away from the singular set of every family used here.
pub fn rand_q(rs: &RootSystem, r: &mut impl Rng) -> Vec<C64> {
    loop {
        let q = rand_vec(r, rs.rank(), 0.6);
        if (0..rs.num_roots()).all(|k| rs.pair_root(k, &q).norm() > 0.15) {
            return q;
        }
    }
}

pub fn rand_point(rs: &RootSystem, r: &mut impl Rng) -> PhasePoint {
    let q = rand_q(rs, r);
    let p = rand_vec(r, rs.rank(), 1.0);
    PhasePoint::new(rs, q, p, rand_element(rs, r)).unwrap()
}

/// Random point of J⁻¹(0) with nonzero simple-root spins.
pub fn rand_point_j0(rs: &RootSystem, r: &mut impl Rng) -> PhasePoint {
    let mut x = rand_point(rs, r);
    for i in 0..rs.rank() {
        x.xi.coeffs[i] = c(0.0, 0.0);
    }
    for &k in rs.simple_roots() {
        x.xi.coeffs[rs.rank() + k] = c(r.gen_range(0.5..1.5), r.gen_range(-0.5..0.5));
    }
    x
}

pub fn lattice() -> Lattice {
    Lattice::new(c(1.0, 0.0), c(0.2, 1.1)).unwrap()
}

pub fn rect_lattice() -> Lattice {
    Lattice::new(c(1.0, 0.0), c(0.0, 1.1)).unwrap()
}

pub fn families(rs: &RootSystem) -> Vec<(&'static str, RMatrixSpec)> {
    let all: Vec<usize> = (0..rs.rank()).collect();
    vec![
        ("rational", RMatrixSpec::rational_full(rs)),
        ("trigonometric", RMatrixSpec::trigonometric(rs, &all).unwrap()),
        ("elliptic", RMatrixSpec::elliptic(rs, lattice())),
    ]
}

/// q with the diagonal entries of ρ(q) equal to `diag` minus its mean.
pub fn q_from_positions(rs: &RootSystem, diag: &[f64]) -> Vec<C64> {
    let mean = diag.iter().sum::<f64>() / diag.len() as f64;
    let m = DMatrix::from_diagonal(&DVector::from_iterator(diag.len(), diag.iter().map(|d| c(d - mean, 0.0))));
    rs.from_matrix(&m).coeffs[..rs.rank()].to_vec()
}

/// Particles spread over `period` with a repulsive, nearly spinless spin on J⁻¹(0).
pub fn repulsive_point(rs: &RootSystem, period: f64, seed: u64) -> PhasePoint {
    let mut r = rng(seed);
    let m = rs.matrix_size();
    let diag: Vec<f64> = (0..m).map(|i| period * i as f64 / m as f64 + r.gen_range(-0.04..0.04)).collect();
    let q = q_from_positions(rs, &diag);
    let p = (0..rs.rank()).map(|_| c(r.gen_range(-0.3..0.3), 0.0)).collect();
    let mut xi = rs.zero();
    for k in 0..rs.num_roots() {
        xi.coeffs[rs.rank() + k] = c(0.0, 0.3) * (1.0 + r.gen_range(-0.2..0.2));
    }
    PhasePoint::new(rs, q, p, xi).unwrap()
}

/// A family paired with a period over which its particles can be spread.
pub fn flow_families(rs: &RootSystem) -> Vec<(&'static str, RMatrixSpec, f64)> {
    let all: Vec<usize> = (0..rs.rank()).collect();
    vec![
        ("rational", RMatrixSpec::rational_full(rs), 1.0),
        ("trigonometric", RMatrixSpec::trigonometric(rs, &all).unwrap(), 3.0),
        ("elliptic", RMatrixSpec::elliptic(rs, rect_lattice()), 2.0),
    ]
}

pub fn sample_zs() -> Vec<C64> {
    vec![c(0.4, 0.3), c(-0.3, 0.5), c(0.6, -0.2), c(0.2, -0.45), c(-0.5, -0.1), c(0.35, 0.05), c(-0.15, 0.3), c(0.5, 0.4)]
}
