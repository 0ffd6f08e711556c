mod common;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use szego::inverse::{compare_spectral_data, imaginary_part_defect, intertwining_defect, reconstruct_u};
use szego::model_space::isometry_defect;
use szego::{c64, direct_spectral_data, HankelOperator, HerglotzData, InverseSolution, Level, RationalFunction, SpectralData, C64};

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);

fn worked() -> SpectralData {
    SpectralData {
        levels: vec![Level { lambda: 1.0, phi: 0.0, omega: c64(0.0, 1.0 / (4.0 * PI)), b: HerglotzData::zero() }],
    }
}

fn double_level() -> SpectralData {
    let mut sd = worked();
    sd.levels[0].b = HerglotzData::new(vec![0.0], vec![1.0], 0.0).unwrap();
    sd
}

/// `Q(x)` assembled entry by entry from the level data.
fn oracle_q(sd: &SpectralData, x: C64) -> DMatrix<C64> {
    let n = sd.len();
    DMatrix::from_fn(n, n, |r, c| {
        // Q = 𝒜*, so Q[r, c] = conj 𝒜[c, r]
        let (k, j) = (c, r);
        let (lk, lj) = (&sd.levels[k], &sd.levels[j]);
        let a_kj = if j == k {
            lj.omega / (4.0 * PI * lj.omega.im)
        } else {
            let num = lj.lambda.powi(2) - lj.lambda * lk.lambda * (I * (lj.phi - lk.phi)).exp();
            I / (2.0 * PI) * num / (lj.lambda.powi(2) - lk.lambda.powi(2))
        };
        let mut v = a_kj.conj();
        if r == c {
            let nu_sq = (4.0 * PI * lj.omega.im).sqrt() / lj.lambda;
            let b: C64 = lj.b.poles.iter().zip(&lj.b.residues).map(|(&a, &res)| res / (a - x)).sum();
            v -= x / nu_sq + b;
        }
        v
    })
}

fn oracle_u(sd: &SpectralData, x: C64) -> C64 {
    let w = DVector::from_iterator(sd.len(), sd.levels.iter().map(|l| l.lambda * (-I * l.phi).exp()));
    let v = oracle_q(sd, x).lu().solve(&w).unwrap();
    v.sum() / (I * 2.0 * PI)
}

#[test]
fn generator_examples() {
    let a = worked().generator_matrix();
    assert!((a[(0, 0)] - I / (4.0 * PI)).norm() < 1e-16);
    let two = SpectralData {
        levels: vec![
            Level { lambda: 2.0, phi: 0.0, omega: c64(0.0, 1.0), b: HerglotzData::zero() },
            Level { lambda: 1.0, phi: 0.0, omega: c64(0.0, 1.0), b: HerglotzData::zero() },
        ],
    };
    let a = two.generator_matrix();
    assert!((a[(0, 1)] - I / (6.0 * PI)).norm() < 1e-16);
    assert!((a[(1, 0)] - I / (3.0 * PI)).norm() < 1e-16);
    let im = (a[(1, 0)] - a[(0, 1)].conj()) / (I * 2.0);
    assert!((im - c64(1.0 / (4.0 * PI), 0.0)).norm() < 1e-16);
}

#[test]
fn generator_identities_on_random_data() {
    let mut rng = common::rng(41);
    for _ in 0..50 {
        let n = rng.gen_range(1..6);
        let sd = common::random_data(&mut rng, n, 2);
        let a = sd.generator_matrix();
        assert!(imaginary_part_defect(&a) <= 1e-14);
        assert!(intertwining_defect(&sd, &a) <= 1e-12);
    }
}

#[test]
fn q_examples() {
    let sol = InverseSolution::new(&worked()).unwrap();
    for x in common::probe_grid() {
        let q = sol.q_matrix(x);
        assert!((q[(0, 0)] - (c64(0.0, -1.0 / (4.0 * PI)) - x)).norm() < 1e-15);
    }
    let mut rng = common::rng(42);
    for _ in 0..10 {
        let n = rng.gen_range(1..5);
        let sd = common::random_data(&mut rng, n, 2);
        let sol = InverseSolution::new(&sd).unwrap();
        let x = c64(0.3, 0.7);
        assert!((sol.q_matrix(x) - oracle_q(&sd, x)).norm() < 1e-12);
        // x Q(x)⁻¹ = -D(ν²) - D(ν²) (Q(x) + x D(ν⁻²)) D(ν²) / x + O(x⁻²)
        let big = c64(6e5, 8e5);
        let q = sol.q_matrix(big);
        let lim = q.clone().try_inverse().unwrap() * big;
        let d = DMatrix::from_fn(n, n, |r, c| if r == c { c64(sd.nu_sq()[r], 0.0) } else { c64(0.0, 0.0) });
        let rest = &q + d.clone().try_inverse().unwrap() * big;
        let target = -&d - &d * rest * &d / big;
        let rel = (&lim - &target).norm() / target.norm();
        assert!(rel <= 1e-9, "{rel} {:?}", sd.nu_sq());
    }
}

#[test]
fn q_without_b_is_generator_minus_diagonal() {
    let mut rng = common::rng(43);
    let sd = common::random_data(&mut rng, 4, 0);
    let sol = InverseSolution::new(&sd).unwrap();
    let x = c64(-0.4, 1.1);
    let d = DMatrix::from_fn(4, 4, |r, c| if r == c { x / sd.nu_sq()[r] } else { c64(0.0, 0.0) });
    assert!((sol.q_matrix(x) - (sd.generator_matrix().adjoint() - d)).norm() < 1e-14);
}

#[test]
fn worked_symbol_and_functions() {
    let sol = InverseSolution::new(&worked()).unwrap();
    let p0 = c64(0.0, -1.0 / (4.0 * PI));
    let u = RationalFunction::pole(p0, 1, I / (2.0 * PI));
    assert!(common::sup_rel_error(sol.u(), &u) < 1e-13);
    let g = RationalFunction::pole(p0, 1, I / (2.0 * PI));
    assert!(common::sup_rel_error(&sol.g()[0], &g) < 1e-13);
    assert!((sol.g()[0].l2_norm().unwrap() - 1.0).abs() < 1e-13);
    let theta = sol.theta();
    assert_eq!(theta.degree(), 1);
    assert!((theta.zeros()[0] - p0.conj()).norm() < 1e-14);
    let s = 2.0 * PI.sqrt();
    for x in common::probe_grid() {
        let p = I * (x + I) / (s * (x - p0));
        assert!((sol.eval_p(0, x).unwrap() - p).norm() < 1e-12 * (1.0 + p.norm()));
        assert!((sol.p(0).eval(x) - p).norm() < 1e-12 * (1.0 + p.norm()));
    }
    assert!(isometry_defect(&sol.p(0), &sol.psi()[0]).unwrap() <= 1e-10);
}

#[test]
fn empty_data() {
    let sd = SpectralData { levels: vec![] };
    let sol = InverseSolution::new(&sd).unwrap();
    assert!(sol.u().poles().is_empty() && sol.u().poly().is_zero());
    assert_eq!(sol.theta().degree(), 0);
    assert!(sol.g().is_empty() && sol.psi().is_empty());
    let rep = sol.verify(1e-8).unwrap();
    assert!(rep.checks.is_empty() && rep.passed());
}

#[test]
fn invariant_violations_are_rejected() {
    let mut sd = worked();
    sd.levels[0].omega = c64(0.0, -0.1);
    assert!(InverseSolution::new(&sd).unwrap_err().to_string().contains("Im ω > 0"));
    let mut sd = worked();
    sd.levels[0].lambda = -1.0;
    assert!(InverseSolution::new(&sd).is_err());
    let mut two = worked();
    two.levels.push(two.levels[0].clone());
    assert!(InverseSolution::new(&two).is_err());
    let mut sd = worked();
    sd.levels[0].b.b = 0.5;
    assert!(InverseSolution::new(&sd).is_err());
}

#[test]
fn symbol_matches_cramer_oracle() {
    let mut rng = common::rng(44);
    for _ in 0..20 {
        let n = rng.gen_range(1..6);
        let sd = common::random_data(&mut rng, n, 2);
        let sol = InverseSolution::new(&sd).unwrap();
        assert_eq!(sol.u().pole_degree(), sd.total_degree());
        for x in common::probe_grid() {
            let o = oracle_u(&sd, x);
            assert!((sol.u().eval(x) - o).norm() < 1e-10 * (1.0 + o.norm()));
            assert!((sol.eval_u(x).unwrap() - o).norm() < 1e-10 * (1.0 + o.norm()));
        }
    }
}

#[test]
fn g_theta_and_gram() {
    let mut rng = common::rng(45);
    for _ in 0..20 {
        let n = rng.gen_range(1..6);
        let sd = common::random_data(&mut rng, n, 2);
        let sol = InverseSolution::new(&sd).unwrap();
        let nu_sq = sd.nu_sq();
        for j in 0..n {
            for k in 0..n {
                let v = sol.g()[j].l2_inner(&sol.g()[k]).unwrap();
                let t = if j == k { nu_sq[j] } else { 0.0 };
                assert!((v - c64(t, 0.0)).norm() <= 1e-8 * nu_sq[j].max(nu_sq[k]));
            }
        }
        for x in common::probe_grid() {
            let th = sol.theta().eval(x);
            let gs: C64 = sol.g().iter().map(|g| g.eval(x)).sum();
            assert!((gs + th - ONE).norm() < 1e-9);
            if x.im > 0.0 {
                assert!((sol.theta_from_determinants(x) - th).norm() < 1e-9);
            } else {
                assert!((th.norm() - 1.0).abs() < 1e-12);
            }
            let ge = sol.eval_g(x).unwrap();
            for j in 0..n {
                assert!((ge[j] - sol.g()[j].eval(x)).norm() < 1e-9 * (1.0 + ge[j].norm()));
            }
        }
    }
}

#[test]
fn eigen_equation_holds() {
    let mut rng = common::rng(46);
    for _ in 0..10 {
        let n = rng.gen_range(1..5);
        let sd = common::random_data(&mut rng, n, 2);
        let sol = InverseSolution::new(&sd).unwrap();
        let h = HankelOperator::build(sol.u()).unwrap();
        for (j, l) in sd.levels.iter().enumerate() {
            let g = &sol.g()[j];
            let hg = h.apply_direct(g).unwrap();
            let expected = g.scale(C64::from_polar(l.lambda, -l.phi));
            let res = hg.sub(&expected).l2_norm().unwrap();
            assert!(res <= 1e-8 * (1.0 + g.l2_norm().unwrap()), "{res}");
        }
    }
}

#[test]
fn double_level_multiplier() {
    let sol = InverseSolution::new(&double_level()).unwrap();
    assert_eq!(sol.theta().degree(), 2);
    assert_eq!(sol.psi()[0].degree(), 2);
    assert!(isometry_defect(&sol.p(0), &sol.psi()[0]).unwrap() <= 1e-7);
}

#[test]
fn worked_contraction() {
    let sol = InverseSolution::new(&worked()).unwrap();
    let (b, beta) = sol.contraction().unwrap();
    let fp = 4.0 * PI;
    assert!((b[(0, 0)] - c64(-(fp - 1.0) / (fp + 1.0), 0.0)).norm() < 1e-14);
    assert!((beta[0] - c64(0.0, 4.0 * PI.sqrt() / (fp + 1.0))).norm() < 1e-14);
    assert!((b[(0, 0)].norm_sqr() + beta[0].norm_sqr() - 1.0).abs() <= 1e-14);
}

#[test]
fn contraction_on_random_data() {
    let mut rng = common::rng(47);
    for _ in 0..30 {
        let n = rng.gen_range(1..6);
        let sd = common::random_data(&mut rng, n, 2);
        let sol = InverseSolution::new(&sd).unwrap();
        let (b, beta) = sol.contraction().unwrap();
        let defect = &b * b.adjoint() + &beta * beta.adjoint() - DMatrix::identity(n, n);
        assert!(defect.norm() <= 1e-10);
        assert!(b.singular_values().max() <= 1.0 + 1e-12);
        for x in [c64(0.2, 0.5), c64(-1.0, 2.0), c64(3.0, 0.1)] {
            let pc = sol.p_from_contraction(x, &b, &beta).unwrap();
            for j in 0..n {
                let pj = sol.eval_p(j, x).unwrap();
                assert!((pc[j] - pj).norm() < 1e-9 * (1.0 + pj.norm()));
            }
        }
    }
}

#[test]
fn worked_verification() {
    let rep = InverseSolution::new(&worked()).unwrap().verify(1e-12).unwrap();
    for c in &rep.checks {
        assert!(c.pass, "{} = {}", c.name, c.value);
    }
    assert!(rep.get("isometry_defect").is_some());
}

#[test]
fn data_to_symbol_to_data() {
    let mut rng = common::rng(48);
    for _ in 0..15 {
        let n = rng.gen_range(1..5);
        let sd = common::random_data(&mut rng, n, 2);
        let back = direct_spectral_data(&reconstruct_u(&sd).unwrap()).unwrap();
        let cmp = compare_spectral_data(&sd, &back);
        assert!(!cmp.structure_mismatch);
        assert!(cmp.lambda <= 1e-9 && cmp.phi <= 1e-8 && cmp.omega <= 1e-8 && cmp.b <= 1e-7, "{cmp:?}");
    }
}

#[test]
fn symbol_to_data_to_symbol() {
    let direct = RationalFunction::pole(-I, 1, ONE);
    let back = reconstruct_u(&direct_spectral_data(&direct).unwrap()).unwrap();
    let worst = common::probe_grid().iter().map(|&x| (back.eval(x) - direct.eval(x)).norm()).fold(0.0, f64::max);
    assert!(worst <= 1e-9);

    let mut rng = common::rng(49);
    for trial in 0..15 {
        let deg = rng.gen_range(1..7);
        let u = common::random_symbol(&mut rng, deg, trial % 2 == 0);
        let back = reconstruct_u(&direct_spectral_data(&u).unwrap()).unwrap();
        let e = common::sup_rel_error(&back, &u);
        assert!(e <= 1e-8, "trial {trial} deg {deg}: {e}");
    }
}
