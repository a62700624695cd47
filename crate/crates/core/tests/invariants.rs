use hyperbolic_cgc::frame::integrate_frame;
use hyperbolic_cgc::gauss::{solve_gauss, umbilic_seed, BoundaryData};
use hyperbolic_cgc::gauss_maps::{lagrangian_map, lambda0};
use hyperbolic_cgc::lax::{build_uv, reality_residual, twist_residual, DerivativeField, RealForm};
use hyperbolic_cgc::minkowski::{
    herm_from_mink, mink_from_herm, mink_inner, su11_disk, su2_sphere, to_poincare_ball, HermMatrix, MinkVector, E1,
};
use hyperbolic_cgc::surface::build_surface;
use hyperbolic_cgc::{Grid, QDiff, QDomain};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn herm() -> impl Strategy<Value = HermMatrix> {
    (-1e3..1e3f64, -1e3..1e3f64, -1e3..1e3f64, -1e3..1e3f64).prop_map(|(a, d, re, im)| HermMatrix::new(a, d, c(re, im)))
}

proptest! {
    #[test]
    fn quadratic_form_is_minus_det(a in herm()) {
        let n2 = a.to_c2x2().frobenius().powi(2);
        prop_assert!((mink_inner(&a, &a) + a.det()).abs() <= 1e-12 * (1.0 + n2));
    }

    // Dyadic entries keep every sum and halving exact.
    #[test]
    fn herm_mink_round_trip(a in -1i32 << 20..1 << 20, d in -1i32 << 20..1 << 20, re in -1i32 << 20..1 << 20, im in -1i32 << 20..1 << 20) {
        let s = |v: i32| v as f64 / 1024.0;
        let m = HermMatrix::new(s(a), s(d), c(s(re), s(im)));
        prop_assert_eq!(herm_from_mink(mink_from_herm(&m)), m);
    }

    #[test]
    fn ball_image_is_inside(x1 in -50.0..50.0f64, x2 in -50.0..50.0f64, x3 in -50.0..50.0f64) {
        let x0 = (1.0 + x1 * x1 + x2 * x2 + x3 * x3).sqrt();
        let b = to_poincare_ball(MinkVector::new(x0, x1, x2, x3)).unwrap();
        prop_assert!(b.iter().map(|v| v * v).sum::<f64>() < 1.0);
    }

    #[test]
    fn dq_matches_finite_differences(
        coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..5),
        x in -0.5..0.5f64,
        y in -0.5..0.5f64,
    ) {
        let q = QDiff::new(coeffs.into_iter().map(|(a, b)| c(a, b)).collect(), QDomain::UnitDisk);
        let z = c(x, y);
        let exact = q.eval_dq(z).unwrap();
        let err = |h: f64| ((q.value(z + h) - q.value(z - h)) / (2.0 * h) - exact).norm();
        let (e1, e2) = (err(1e-2), err(5e-3));
        prop_assert!(e2 <= 1e-13 || (e1 / e2 > 3.5 && e1 / e2 < 4.5), "{e1} {e2}");
    }

    #[test]
    fn lambda0_is_positive_and_inverts(k in prop_oneof![-0.999..-0.001f64, 0.001..100.0f64]) {
        let l = lambda0(k).unwrap();
        prop_assert!(l > 1.0);
    }
}

#[test]
fn projections_of_i_e1() {
    let l = E1 * c(0.0, 1.0);
    assert_eq!(su11_disk(&l).unwrap(), c(0.0, 0.0));
    assert_eq!(su2_sphere(&l).unwrap(), [1.0, 0.0, 0.0]);
}

#[test]
fn poincare_sup_never_decreases_under_refinement() {
    let q = QDiff::new(vec![c(0.2, 0.1), c(-0.3, 0.0), c(0.0, 0.4)], QDomain::UnitDisk);
    let mut prev = 0.0;
    for n in [9, 17, 33, 65] {
        let s = q.poincare_sup(&Grid::inscribed(0.8, n).unwrap()).unwrap();
        assert!(s >= prev, "{s} < {prev}");
        prev = s;
    }
}

#[test]
fn newton_converges_quadratically() {
    let g = Grid::inscribed(0.8, 33).unwrap();
    let q = QDiff::monomial(c(0.1, 0.0), 1, QDomain::UnitDisk);
    let (_, stats) = solve_gauss(&q, -0.75, &g, &BoundaryData::heuristic(&q, -0.75, &g).unwrap()).unwrap();
    let r = &stats.residual_history;
    for w in r.windows(2) {
        if w[0] < 1e-2 && w[1] > 1e-12 {
            assert!(w[1] <= 10.0 * w[0] * w[0], "{r:?}");
        }
    }
}

#[test]
fn maximum_principle() {
    let g = Grid::inscribed(0.8, 33).unwrap();
    let seed = umbilic_seed(-0.75, &g).unwrap();
    let bc = BoundaryData::umbilic(-0.75, &g).unwrap().perturbed(0.05);
    let (u, _) = solve_gauss(&QDiff::zero(QDomain::UnitDisk), -0.75, &g, &bc).unwrap();
    assert!(g.nodes().all(|(i, j)| u.u(i, j) >= seed.u(i, j) - 1e-12));
}

#[test]
fn immersion_holds_after_solve() {
    let g = Grid::inscribed(0.8, 33).unwrap();
    let q = QDiff::new(vec![c(0.3, 0.0), c(0.0, 0.2)], QDomain::UnitDisk);
    let (u, _) = solve_gauss(&q, -0.5, &g, &BoundaryData::heuristic(&q, -0.5, &g).unwrap()).unwrap();
    assert!(u.check_immersion(&q).is_ok());
}

#[test]
fn reality_at_lambda0_is_phase_independent() {
    let g = Grid::inscribed(0.8, 33).unwrap();
    let u = umbilic_seed(-0.75, &g).unwrap();
    let du = DerivativeField::from_metric(&u);
    let q = QDiff::monomial(c(0.1, 0.0), 1, QDomain::UnitDisk);
    let l0 = lambda0(-0.75).unwrap();
    let vals: Vec<f64> = [0.0, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2]
        .iter()
        .map(|&t| reality_residual(&build_uv(&u, &du, &q, Complex64::from_polar(l0, t)).unwrap(), RealForm::Su11))
        .collect();
    assert!(vals.iter().all(|v| (v - vals[0]).abs() <= 1e-13), "{vals:?}");
}

#[test]
fn frame_structure_on_the_umbilic_fixture() {
    let g = Grid::inscribed(0.8, 33).unwrap();
    let u = umbilic_seed(-0.75, &g).unwrap();
    let du = DerivativeField::from_metric(&u);
    let q = QDiff::zero(QDomain::UnitDisk);
    let mc = build_uv(&u, &du, &q, c(0.3, 0.8)).unwrap();
    let neg = build_uv(&u, &du, &q, c(-0.3, -0.8)).unwrap();
    assert_eq!(twist_residual(&mc, &neg), 0.0);
    let psi = integrate_frame(&mc);
    assert!(psi.det_residual() <= 1e-9);
    let inv = build_surface(&psi).unwrap().invariants();
    assert!(inv.det_f <= 1e-8 && inv.norm_n <= 1e-8 && inv.f_dot_n <= 1e-8, "{inv:?}");

    let psi0 = integrate_frame(&build_uv(&u, &du, &q, c(lambda0(-0.75).unwrap(), 0.0)).unwrap());
    let map = lagrangian_map(&psi0).unwrap();
    assert!(map.algebraic_residual() <= 1e-10);
}
