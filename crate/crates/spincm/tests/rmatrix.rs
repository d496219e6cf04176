mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use spincm::laurent::{residue_pairing, Laurent};
use spincm::rmatrix::{RMatrixSpec, Tensor};
use spincm::{build_root_system, AlgElement, Error, RootSystem, C64};

fn rand_laurent(rs: &RootSystem, r: &mut impl Rng, poles: usize) -> Laurent {
    let coeffs = (0..poles + 2).map(|_| rand_element(rs, r)).collect();
    Laurent::from_coefficients(coeffs, poles)
}

fn rand_z(r: &mut impl Rng) -> C64 {
    loop {
        let z = rand_c(r, 0.8);
        if z.norm() > 0.2 {
            return z;
        }
    }
}

fn tensor_diff(a: &Tensor, b: &Tensor) -> f64 {
    a.data.iter().zip(&b.data).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

#[test]
fn yang_case_is_casimir_over_z() {
    let rs = build_root_system('A', 2).unwrap();
    let spec = RMatrixSpec::rational(&rs, &[]).unwrap();
    let z = c(0.3, -0.7);
    let r = spec.r_eval(&rand_q(&rs, &mut rng(1)), z).unwrap();
    let om = spec.omega();
    for (a, b) in r.data.iter().zip(&om.data) {
        assert_eq!(*a, b / z);
    }
    assert!(spec.verify_cdybe(&[c(0.1, 0.0), c(0.2, 0.0)], c(0.3, 0.1), c(-0.2, 0.4), c(0.5, -0.3)).unwrap() < 1e-12);
}

#[test]
fn rational_a1_substitution() {
    let rs = build_root_system('A', 1).unwrap();
    let spec = RMatrixSpec::rational_full(&rs);
    // (α, q) = 2 with α(h_1) = √2.
    let q = [c(2.0 / 2f64.sqrt(), 0.0)];
    let r = spec.r_eval(&q, c(1.0, 0.0)).unwrap();
    let mut want = spec.omega();
    want.set(1, 2, c(1.5, 0.0));
    want.set(2, 1, c(0.5, 0.0));
    assert!(tensor_diff(&r, &want) < 1e-15);
}

#[test]
fn elliptic_coefficient_is_l_kernel() {
    let rs = build_root_system('A', 1).unwrap();
    let lat = lattice();
    let spec = RMatrixSpec::elliptic(&rs, lat.clone());
    let q = [c(0.31, 0.12)];
    let z = c(0.27, -0.33);
    let x = rs.pair_root(0, &q);
    let r = spec.r_eval(&q, z).unwrap();
    assert!((r.get(1, 2) + lat.l_kernel(x, z).unwrap()).norm() < 1e-14);
    assert!((r.get(2, 1) + lat.l_kernel(-x, z).unwrap()).norm() < 1e-14);
    assert!((r.get(0, 0) - lat.zeta(z).unwrap()).norm() < 1e-14);
}

#[test]
fn closure_checked() {
    let rs = build_root_system('A', 2).unwrap();
    let a1 = rs.root_index(&[1, 0]).unwrap();
    let a2 = rs.root_index(&[0, 1]).unwrap();
    let m1 = rs.neg(a1);
    let m2 = rs.neg(a2);
    assert!(RMatrixSpec::rational(&rs, &[a1, m1]).is_ok());
    assert!(matches!(RMatrixSpec::rational(&rs, &[a1]), Err(Error::Invalid(_))));
    assert!(matches!(RMatrixSpec::rational(&rs, &[a1, a2, m1, m2]), Err(Error::Invalid(_))));
}

#[test]
fn pole_error_names_root() {
    let rs = build_root_system('A', 2).unwrap();
    let spec = RMatrixSpec::rational_full(&rs);
    // q = 0 lies on every root hyperplane.
    match spec.r_eval(&[c(0.0, 0.0), c(0.0, 0.0)], c(0.5, 0.0)) {
        Err(Error::Pole(msg)) => assert!(msg.contains("[1,0]"), "{msg}"),
        other => panic!("expected pole error, got {other:?}"),
    }
    assert!(matches!(spec.r_eval(&[c(0.1, 0.0), c(0.3, 0.0)], c(0.0, 0.0)), Err(Error::Pole(_))));
}

fn all_specs(rs: &RootSystem) -> Vec<(&'static str, RMatrixSpec, f64)> {
    let mut v: Vec<(&'static str, RMatrixSpec, f64)> = families(rs)
        .into_iter()
        .map(|(n, s)| (n, s.clone(), if n == "elliptic" { 1e-8 } else { 1e-10 }))
        .collect();
    v.push(("trig, empty Π′", RMatrixSpec::trigonometric(rs, &[]).unwrap(), 1e-10));
    v.push(("trig, opposite", RMatrixSpec::trigonometric(rs, &[0]).unwrap().with_opposite_polarization(), 1e-10));
    v.push(("yang", RMatrixSpec::rational(rs, &[]).unwrap(), 1e-10));
    v
}

#[test]
fn axioms_random_sweep() {
    let mut r = rng(7);
    for n in 1..=2 {
        let rs = build_root_system('A', n).unwrap();
        for (name, spec, tol) in all_specs(&rs) {
            for _ in 0..20 {
                let q = rand_q(&rs, &mut r);
                let rep = spec.verify_axioms(&q, &[rand_z(&mut r)]).unwrap();
                assert!(rep.max() < tol, "{name} A{n}: {rep:?}");
            }
        }
    }
}

#[test]
fn rational_zero_weight_exact() {
    let rs = build_root_system('A', 2).unwrap();
    let rep = RMatrixSpec::rational_full(&rs).verify_axioms(&[c(0.3, 0.0), c(-0.1, 0.0)], &[c(0.25, 0.5)]).unwrap();
    assert_eq!(rep.zero_weight, 0.0);
    let yang = RMatrixSpec::rational(&rs, &[]).unwrap();
    assert_eq!(yang.verify_axioms(&[c(0.3, 0.0), c(-0.1, 0.0)], &[c(0.25, 0.5)]).unwrap().unitarity, 0.0);
}

#[test]
fn cdybe_random() {
    let mut r = rng(8);
    for n in 1..=2 {
        let rs = build_root_system('A', n).unwrap();
        for (name, spec, tol) in all_specs(&rs) {
            for _ in 0..10 {
                let q = rand_q(&rs, &mut r);
                let (z1, z2, z3) = (rand_z(&mut r), rand_z(&mut r), rand_z(&mut r));
                if (z1 - z2).norm() < 0.2 || (z1 - z3).norm() < 0.2 || (z2 - z3).norm() < 0.2 {
                    continue;
                }
                let res = spec.verify_cdybe(&q, z1, z2, z3).unwrap();
                assert!(res < tol, "{name} A{n}: {res:e}");
            }
        }
    }
}

#[test]
fn fault_breaks_only_cdybe() {
    let rs = build_root_system('A', 2).unwrap();
    let spec = RMatrixSpec::rational_full(&rs).with_fault(0.1);
    let q = [c(0.37, 0.11), c(-0.52, 0.07)];
    assert!(spec.verify_axioms(&q, &[c(0.3, 0.2)]).unwrap().max() < 1e-10);
    assert!(spec.verify_cdybe(&q, c(0.3, 0.1), c(-0.2, 0.4), c(0.5, -0.3)).unwrap() > 1e-2);
}

#[test]
fn r_of_regular_element_is_half() {
    let rs = build_root_system('A', 2).unwrap();
    let mut r = rng(9);
    let xi = rand_laurent(&rs, &mut r, 0);
    for (_, spec) in families(&rs) {
        let q = rand_q(&rs, &mut r);
        let rx = spec.r_apply(&q, &xi).unwrap();
        let z = c(0.3, 0.4);
        assert!((&rx.eval(z).unwrap() - &xi.eval(z).unwrap().scale(c(0.5, 0.0))).norm_max() < 1e-14);
    }
}

#[test]
fn r_on_simple_pole_a1_rational() {
    let rs = build_root_system('A', 1).unwrap();
    let spec = RMatrixSpec::rational_full(&rs);
    let q = [c(1.0 / 2f64.sqrt(), 0.0)];
    let xi = Laurent::from_coefficients(vec![rs.e(0), rs.zero()], 1);
    let rx = spec.r_apply(&q, &xi).unwrap();
    for z in [c(0.3, 0.4), c(-0.6, 0.1)] {
        // ½ e_α/z + φ_{−α}(−1, −z) e_α with φ_{−α}(x, w) = 1/w + 1/x.
        let want = 0.5 / z + (1.0 / -z + 1.0 / c(-1.0, 0.0));
        let got = rx.eval(z).unwrap();
        assert!((got.coeffs[1] - want).norm() < 1e-12);
        assert!(got.coeffs[0].norm() + got.coeffs[2].norm() < 1e-14);
    }
}

#[test]
fn r_is_skew() {
    let mut r = rng(10);
    for n in 1..=2 {
        let rs = build_root_system('A', n).unwrap();
        for (name, spec) in families(&rs) {
            for _ in 0..3 {
                let q = rand_q(&rs, &mut r);
                let (p1, p2) = (r.gen_range(1..=2), r.gen_range(1..=2));
                let xi = rand_laurent(&rs, &mut r, p1);
                let eta = rand_laurent(&rs, &mut r, p2);
                let a = residue_pairing(&rs, &spec.r_apply(&q, &xi).unwrap(), &eta).unwrap();
                let b = residue_pairing(&rs, &xi, &spec.r_apply(&q, &eta).unwrap()).unwrap();
                assert!((a + b).norm() < 1e-9, "{name}: {:e}", (a + b).norm());
            }
        }
    }
}

#[test]
fn mdybe_random() {
    let mut r = rng(11);
    let zs = [c(0.5, 0.1), c(-0.2, 0.4), c(0.1, -0.6)];
    for n in 1..=2 {
        let rs = build_root_system('A', n).unwrap();
        let all: Vec<usize> = (0..n).collect();
        let specs = [
            ("rational", RMatrixSpec::rational_full(&rs)),
            ("trigonometric", RMatrixSpec::trigonometric(&rs, &all).unwrap()),
            ("trig, empty Π′", RMatrixSpec::trigonometric(&rs, &[]).unwrap()),
        ];
        for (name, spec) in specs {
            for _ in 0..3 {
                let q = rand_q(&rs, &mut r);
                let (p1, p2) = (r.gen_range(1..=2), r.gen_range(1..=2));
                let xi = rand_laurent(&rs, &mut r, p1);
                let eta = rand_laurent(&rs, &mut r, p2);
                let res = spec.verify_mdybe(&q, &xi, &eta, &zs).unwrap();
                assert!(res < 1e-8, "{name} A{n}: {res:e}");
            }
        }
    }
}

#[test]
fn mdybe_diagonal() {
    let rs = build_root_system('A', 2).unwrap();
    let mut r = rng(12);
    let spec = RMatrixSpec::rational_full(&rs);
    let q = rand_q(&rs, &mut r);
    let xi = rand_laurent(&rs, &mut r, 2);
    assert!(spec.verify_mdybe(&q, &xi, &xi, &[c(0.5, 0.1), c(-0.3, 0.3)]).unwrap() < 1e-10);
}

#[test]
fn mdybe_elliptic_simple_poles() {
    let rs = build_root_system('A', 1).unwrap();
    let mut r = rng(13);
    let spec = RMatrixSpec::elliptic(&rs, lattice());
    let q = rand_q(&rs, &mut r);
    let xi = rand_laurent(&rs, &mut r, 1);
    let eta = rand_laurent(&rs, &mut r, 2);
    assert!(spec.verify_mdybe(&q, &xi, &eta, &[c(0.5, 0.1)]).unwrap() < 1e-8);
}

fn torus_map(rs: &RootSystem, h: &[C64], x: &Laurent) -> Laurent {
    let rs = rs.clone();
    let h = h.to_vec();
    let f = x.function();
    let principal: Vec<AlgElement> = x.principal.iter().map(|p| rs.torus_adjoint(&h, p)).collect();
    let g: spincm::laurent::LaurentFn = std::sync::Arc::new(move |z| Ok(rs.torus_adjoint(&h, &f(z)?)));
    let mut out = Laurent::from_fn(g, principal.len()).unwrap();
    out.principal = principal;
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn r_equivariant(seed in 0u64..10_000, c1 in -0.7..0.7f64, c2 in -0.7..0.7f64) {
        let rs = build_root_system('A', 2).unwrap();
        let mut r = rng(seed);
        let h = [c(c1, 0.2 * c2), c(c2, -0.1 * c1)];
        for (_, spec) in families(&rs) {
            let q = rand_q(&rs, &mut r);
            let xi = rand_laurent(&rs, &mut r, 2);
            let lhs = spec.r_apply(&q, &torus_map(&rs, &h, &xi)).unwrap();
            let rhs = spec.r_apply(&q, &xi).unwrap();
            for z in [c(0.4, 0.3), c(-0.5, 0.2)] {
                let d = &lhs.eval(z).unwrap() - &rs.torus_adjoint(&h, &rhs.eval(z).unwrap());
                prop_assert!(d.norm_max() < 1e-10);
            }
        }
    }
}
