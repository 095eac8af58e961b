//! Randomized invariants.

use proptest::prelude::*;

use confstress::energy_models::*;
use confstress::fields_domains::*;
use confstress::identity_lab::*;
use confstress::shock_dynamics::*;
use confstress::tensor_core::*;
use confstress::void_energy::*;

fn mat(n: usize, lo: f64, hi: f64) -> impl Strategy<Value = Mat> {
    prop::collection::vec(lo..hi, n * n).prop_map(move |v| Mat::from_fn(n, n, |i, j| v[i * n + j]))
}

fn near_identity(n: usize) -> impl Strategy<Value = Mat> {
    mat(n, -0.3, 0.3).prop_map(move |m| Mat::identity(n) + m)
}

fn unit(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, n)
        .prop_filter("nonzero", |v| norm(v) > 0.1)
        .prop_map(|v| normalized(&v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn power_energy_is_homogeneous(p in 1.5..4.0f64, t in 0.2..3.0f64, f in mat(3, -1.0, 1.0)) {
        let m = make_power_p(p, 3, 3).unwrap();
        let z = [0.0; 3];
        let w = m.w(&z, &z, &f).unwrap();
        let wt = m.w(&z, &z, &f.scale(t)).unwrap();
        prop_assert!((wt - t.powf(p) * w).abs() <= 1e-10 * (1.0 + wt.abs()));
        // Euler's theorem: P : F = p W
        let pf = piola(&m, &z, &z, &f).unwrap().dot(&f);
        prop_assert!((pf - p * w).abs() <= 1e-8 * (1.0 + w.abs()));
    }

    #[test]
    fn extended_energy_scales_with_det(g in near_identity(2), f in near_identity(2), q in near_identity(2)) {
        let base = make_linear_isotropic(1.0, 0.7, 2).unwrap();
        let fhat = Mat::vstack(&g, &f).unwrap();
        let z = [0.1, -0.2, 0.3, 0.05];
        let w = extended_w(&base, &z, &fhat).unwrap();
        let wq = extended_w(&base, &z, &fhat.matmul(&q)).unwrap();
        prop_assert!((wq - q.det() * w).abs() <= 1e-10 * (1.0 + w.abs()));
        prop_assert!(qhom_residual(&base, &z, &fhat, &q).unwrap() < 1e-8);
    }

    #[test]
    fn eshelby_orthogonal_to_tangents(f in near_identity(3), nu in unit(3), raw in unit(3)) {
        let tau = sub(&raw, &scale(dot(&raw, &nu), &nu));
        prop_assume!(norm(&tau) > 0.1);
        let tau = normalized(&tau);
        let m = make_linear_isotropic(0.8, 1.1, 3).unwrap();
        let x = [0.2, 0.1, 0.0];
        let v = check_graph_orthogonality(&m, &x, &f.mul_vec(&x), &f, &nu, &tau).unwrap();
        prop_assert!(v.abs() < 1e-10);
    }

    #[test]
    fn excess_vanishes_on_the_diagonal(f in mat(3, -1.0, 1.0), g in mat(3, -1.0, 1.0)) {
        let m = make_linear_isotropic(1.0, 1.0, 3).unwrap();
        let z = [0.0; 3];
        prop_assert!(excess(&m, &z, &z, &f, &f).unwrap().abs() < 1e-12);
        // convex energies have nonnegative excess
        prop_assert!(excess(&m, &z, &z, &f, &g).unwrap() >= -1e-12);
    }

    #[test]
    fn clapeyron_holds_for_affine_fields(f in near_identity(2), c in prop::collection::vec(-1.0..1.0f64, 2), r in 0.5..2.0f64) {
        let m = make_power_p(3.0, 2, 2).unwrap();
        let field = DeformationField::affine(f, c);
        let domain = Domain::Ball { n: 2, radius: r, center: vec![0.0; 2] };
        let rep = verify_gct(&m, &field, &domain, Settings::default()).unwrap();
        prop_assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn polar_integral_vanishes(p0 in mat(3, -2.0, 2.0), s in mat(3, -2.0, 2.0)) {
        prop_assert!(check_polar_vanishing(&p0, &s, 3, 12).unwrap().abs() < 1e-10);
    }

    #[test]
    fn polar_integral_vanishes_in_plane(p0 in mat(2, -2.0, 2.0), s in mat(2, -2.0, 2.0)) {
        prop_assert!(check_polar_vanishing(&p0, &s, 2, 12).unwrap().abs() < 1e-10);
    }

    #[test]
    fn rankine_hugoniot_for_random_states(
        c2 in 0.2..3.0f64,
        c4 in 0.0..2.0f64,
        fm in -2.0..2.0f64,
        fp in -2.0..2.0f64,
        vp in -1.0..1.0f64,
    ) {
        prop_assume!((fm - fp).abs() > 1e-3);
        let u = make_dynamic_potential(c2, c4).unwrap();
        let s = build_shock(u, fm, fp, vp).unwrap();
        // [v] + V[F] = 0 and V[v] + [P] = 0
        prop_assert!((s.jump_v() + s.speed * s.jump_f()).abs() < 1e-12);
        prop_assert!((s.speed * s.jump_v() + s.jump_p()).abs() < 1e-10 * (1.0 + s.jump_p().abs()));
        let ps = shock_pstar(&s).unwrap();
        if c4 == 0.0 {
            prop_assert!(ps.pstar.abs() < 1e-12);
        }
        let rep = verify_energy_balance(&s, -3.0, 3.0, 0.5).unwrap();
        prop_assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn void_energy_is_quadratic_in_pressure(p in 0.1..3.0f64, lambda in 0.1..3.0f64, mu in 0.2..3.0f64) {
        let one = VoidScenario::hydrostatic(3, lambda, mu, 1.0).unwrap();
        let s = VoidScenario::hydrostatic(3, lambda, mu, p).unwrap();
        let a = delta_e_linear(&one).unwrap().quadrature;
        let b = delta_e_linear(&s).unwrap().quadrature;
        prop_assert!(a < 0.0);
        prop_assert!((b - p * p * a).abs() < 1e-9 * a.abs().max(1.0));
    }
}
