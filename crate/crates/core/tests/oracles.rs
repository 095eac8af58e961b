//! Hand-computed reference values for the library operations.

use std::f64::consts::PI;
use std::sync::Arc;

use approx::assert_abs_diff_eq;
use confstress::energy_models::*;
use confstress::fields_domains::*;
use confstress::identity_lab::*;
use confstress::radial_solver::*;
use confstress::shock_dynamics::*;
use confstress::tensor_core::*;
use confstress::void_energy::*;

fn ball(n: usize, r: f64) -> Domain {
    Domain::Ball { n, radius: r, center: vec![0.0; n] }
}

fn half_norm_sq(n: usize) -> PowerP {
    make_power_p(2.0, n, n).unwrap()
}

#[test]
fn quadratic_energy_stresses() {
    let m = half_norm_sq(2);
    let i2 = Mat::identity(2);
    let z = [0.0; 2];
    assert!((piola(&m, &z, &z, &i2).unwrap() - i2).max_abs() < 1e-12);
    assert!(eshelby(&m, &z, &z, &i2).unwrap().max_abs() < 1e-12);
    let g = Mat::from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]);
    assert_abs_diff_eq!(excess(&m, &z, &z, &Mat::zeros(2, 2), &g).unwrap(), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(excess(&m, &z, &z, &g, &g).unwrap(), 0.0, epsilon = 1e-14);
}

#[test]
fn linear_isotropic_oracles() {
    let m = make_linear_isotropic(0.0, 0.5, 2).unwrap();
    let z = [0.0; 2];
    assert_abs_diff_eq!(m.w(&z, &z, &Mat::identity(2)).unwrap(), 1.0, epsilon = 1e-14);
    let skew = Mat::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
    assert!(piola(&m, &z, &z, &skew).unwrap().max_abs() < 1e-14);
    let m3 = make_linear_isotropic(1.0, 1.0, 3).unwrap();
    assert_abs_diff_eq!(m3.kappa(), 5.0 / 3.0, epsilon = 1e-15);
    let eps = Mat::identity(3).scale(2.0 / (3.0 * m3.kappa()));
    assert!((piola(&m3, &[0.0; 3], &[0.0; 3], &eps).unwrap() - Mat::identity(3).scale(2.0)).max_abs() < 1e-12);
}

#[test]
fn prestressed_ball_stresses_at_unit_radius() {
    let model = make_prestressed_radial(1.0, 3).unwrap();
    let prof = example1_profile(3, 1.0, 1.0).unwrap();
    let (eta, deta) = prof.eval(1.0).unwrap();
    assert_abs_diff_eq!(eta, 1.0 / 3.0, epsilon = 1e-14);
    assert_abs_diff_eq!(deta, 1.0, epsilon = 1e-14);
    let x = [1.0, 0.0, 0.0];
    let f = radial_gradient(&x, eta, deta);
    let y = f.mul_vec(&x);
    assert_abs_diff_eq!(model.w(&x, &y, &f).unwrap(), 1.0 / 9.0, epsilon = 1e-14);
    let e1 = Mat::outer(&x, &x);
    let p = piola(&model, &x, &y, &f).unwrap();
    // P = M = F - a x̂⊗x̂ at r = 1
    assert!((p - (Mat::identity(3) - e1).scale(1.0 / 3.0)).max_abs() < 1e-12, "{p:?}");
    let ps = eshelby(&model, &x, &y, &f).unwrap();
    let expected = Mat::identity(3).scale(1.0 / 9.0);
    assert!((ps.mul_vec(&x).iter().zip(expected.mul_vec(&x)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)) < 1e-12);
    assert!(max_abs(&p.mul_vec(&x)) < 1e-12);
}

#[test]
fn prestressed_ball_energy_values() {
    assert_abs_diff_eq!(example1_energy(3, 1.0, 1.0).unwrap().closed_form, 4.0 * PI / 27.0, epsilon = 1e-14);
    assert_abs_diff_eq!(example1_energy(2, 1.0, 1.0).unwrap().closed_form, PI / 8.0, epsilon = 1e-14);
    assert_eq!(example1_energy(3, 0.0, 1.0).unwrap().closed_form, 0.0);
    let q = example1_energy(3, 2.0, 0.5).unwrap();
    assert!((q.quadrature - q.closed_form).abs() <= 1e-8 * q.closed_form);
}

#[test]
fn euler_residuals_of_a_non_extremal_field() {
    let m = half_norm_sq(2);
    let field = DeformationField::smooth(
        2,
        2,
        |x| vec![x[0] * x[0], 0.0],
        |x| Mat::from_rows(&[&[2.0 * x[0], 0.0], &[0.0, 0.0]]),
    );
    let (e, es) = euler_residuals(&m, &field, &[1.0, 0.0], 1e-4).unwrap();
    assert!((e[0] + 2.0).abs() < 1e-6 && e[1].abs() < 1e-6, "{e:?}");
    let f = field.grad(&[1.0, 0.0]);
    let noether = add(&es, &f.tr_mul_vec(&e));
    assert!(max_abs(&noether) < 1e-6, "{noether:?}");
}

#[test]
fn affine_field_has_no_residual() {
    let m = make_linear_isotropic(1.0, 1.0, 3).unwrap();
    let f0 = Mat::from_rows(&[&[1.1, 0.2, 0.0], &[0.0, 0.9, 0.1], &[0.3, 0.0, 1.0]]);
    let field = DeformationField::affine(f0, vec![0.1, 0.2, 0.3]);
    let (e, es) = euler_residuals(&m, &field, &[0.2, 0.1, -0.3], 1e-4).unwrap();
    assert!(max_abs(&e) < 1e-8 && max_abs(&es) < 1e-8);
}

#[test]
fn jump_pstar_definitions() {
    let m = make_double_well_sv(1.0, 2.0, 1.0, 0.0, 3).unwrap();
    let x = [0.0, 0.6, 0.8];
    let f = Mat::identity(3).scale(1.2);
    assert_eq!(jump_pstar(&m, &x, &x, &f, &f, &x).unwrap(), 0.0);
    let fp = radial_gradient(&x, 1.0, 2.0);
    assert!(jump_pstar(&m, &x, &x, &Mat::identity(3), &fp, &x).unwrap().abs() < 1e-8);
    // rank-one jump without traction continuity is rejected
    let q = half_norm_sq(2);
    let nu = [1.0, 0.0];
    let fp = Mat::identity(2) + Mat::outer(&[0.5, 0.0], &nu);
    assert!(matches!(jump_pstar(&q, &[0.0; 2], &[0.0; 2], &Mat::identity(2), &fp, &nu), Err(confstress::Error::TractionJump(_))));
    let bad = Mat::identity(2) + Mat::outer(&[0.5, 0.0], &[0.0, 1.0]);
    assert!(matches!(jump_pstar(&q, &[0.0; 2], &[0.0; 2], &Mat::identity(2), &bad, &nu), Err(confstress::Error::Hadamard(_))));
}

#[test]
fn graph_orthogonality_vanishes_for_tangents() {
    let m = make_power_p(3.0, 3, 3).unwrap();
    let f = Mat::from_rows(&[&[1.0, 0.3, 0.0], &[0.1, 1.2, -0.2], &[0.0, 0.4, 0.8]]);
    let nu = normalized(&[1.0, 2.0, -1.0]);
    let tau = normalized(&[2.0, -1.0, 0.0]);
    let x = [0.3, 0.2, 0.1];
    assert!(check_graph_orthogonality(&m, &x, &f.mul_vec(&x), &f, &nu, &tau).unwrap().abs() < 1e-12);
    let w = m.w(&x, &x, &f).unwrap();
    let along = check_graph_orthogonality(&m, &x, &f.mul_vec(&x), &f, &nu, &nu).unwrap();
    assert_abs_diff_eq!(along, w, epsilon = 1e-12);
}

#[test]
fn extended_lagrangian_blocks() {
    let base = make_linear_isotropic(1.0, 0.8, 2).unwrap();
    let fhat = Mat::vstack(&Mat::identity(2), &Mat::from_rows(&[&[1.1, 0.2], &[-0.1, 0.9]])).unwrap();
    let z = [0.1, 0.2, 0.3, 0.4];
    let p = extended_piola(&base, &z, &fhat).unwrap();
    let f = fhat.block(2, 0, 2, 2);
    let pk = piola(&base, &z[..2], &z[2..], &f).unwrap();
    let ps = eshelby(&base, &z[..2], &z[2..], &f).unwrap();
    assert!((p.block(0, 0, 2, 2) - ps).max_abs() < 1e-12);
    assert!((p.block(2, 0, 2, 2) - pk).max_abs() < 1e-12);
    assert!(extended_eshelby_residual(&base, &z, &fhat).unwrap() < 1e-10);
    let q = Mat::from_rows(&[&[1.3, 0.2], &[-0.4, 0.7]]);
    assert!(qhom_residual(&base, &z, &fhat, &q).unwrap() < 1e-12);
}

#[test]
fn power_and_dynamic_potentials() {
    let m = make_power_p(2.0, 2, 2).unwrap();
    let z = [0.0; 2];
    assert_abs_diff_eq!(m.w(&z, &z, &Mat::identity(2)).unwrap(), 1.0, epsilon = 1e-14);
    let u = make_dynamic_potential(1.0, 1.0).unwrap();
    assert_eq!(u.p(1.0), 2.0);
    assert_eq!(u.u(0.0), 0.0);
    assert_eq!(u.wave_speed(1.0), 2.0);
    let b = make_bar_potential(1.5, 2.0).unwrap();
    assert_eq!(b.w(0.0), 1.5);
    assert_eq!(b.p(0.0), 0.0);
    assert_eq!(b.pstar(0.0), 1.5);
}

#[test]
fn sphere_and_ball_quadrature() {
    assert_abs_diff_eq!(sphere_rule(2, 1.0, 16).unwrap().weight_sum(), 2.0 * PI, epsilon = 1e-12);
    assert_abs_diff_eq!(sphere_rule(3, 1.0, 16).unwrap().weight_sum(), 4.0 * PI, epsilon = 1e-12);
    let flux = integrate_surface(|x, nu| Ok(dot(x, nu)), &sphere_rule(3, 2.0, 16).unwrap()).unwrap();
    assert_abs_diff_eq!(flux, 4.0 * PI * 8.0, epsilon = 1e-10);
    assert_abs_diff_eq!(ball_rule(3, 1.0, 12).unwrap().weight_sum(), 4.0 * PI / 3.0, epsilon = 1e-12);
    let r2 = integrate(|x| Ok(dot(x, x)), &ball_rule(3, 1.0, 12).unwrap()).unwrap();
    assert_abs_diff_eq!(r2, 4.0 * PI / 5.0, epsilon = 1e-12);
    assert_abs_diff_eq!(annulus_rule(2, 1.0, 2.0, 12, 12).unwrap().weight_sum(), 3.0 * PI, epsilon = 1e-12);
}

#[test]
fn exterior_cavity_solution() {
    let ext = linear_exterior(1.0, 1.0, 1.0, 3).unwrap();
    let u = ext.u(&[1.0, 0.0, 0.0]).unwrap();
    assert_abs_diff_eq!(u[0], 1.0 / 3.0 + 1.0 / 4.0, epsilon = 1e-14);
    let z = normalized(&[1.0, -2.0, 0.5]);
    assert!(max_abs(&ext.stress(&z).unwrap().mul_vec(&z)) < 1e-10);
    // (u_ε − u₀)/εⁿ approaches w_lin with error O(εⁿ)
    let x = [0.5, 0.0, 0.0];
    let w = ext.w_lin(&x).unwrap();
    let err = |eps: f64| -> f64 {
        let d = sub(&ext.u_eps(eps, &x).unwrap(), &ext.u0(&x));
        max_abs(&sub(&scale(1.0 / eps.powi(3), &d), &w))
    };
    let (e1, e2, e3) = (err(0.1), err(0.05), err(0.025));
    assert!(e2 < e1 && e3 < e2, "{e1} {e2} {e3}");
}

#[test]
fn interface_conditions_of_wells() {
    let m = make_double_well_sv(1.0, 2.0, 1.0, 0.0, 3).unwrap();
    let (f0, beta) = solve_interface_conditions(&m).unwrap();
    assert_abs_diff_eq!(f0, 1.0, epsilon = 1e-10);
    assert_abs_diff_eq!(beta, 2.0, epsilon = 1e-10);
    let bias = 0.02;
    let tilted = make_double_well_sv(1.0, 2.0, 1.0, bias, 3).unwrap();
    let (g0, gb) = solve_interface_conditions(&tilted).unwrap();
    let phi = ScalarPotential::DoubleWell { fa: 1.0, fb: 2.0, curvature: 1.0, bias };
    assert!((g0 - 1.0).abs() > 1e-3 && (gb - 2.0).abs() > 1e-3);
    assert!((phi.d1(g0) - phi.d1(gb)).abs() < 1e-10);
    assert!((phi.value(gb) - phi.value(g0) - phi.d1(g0) * (gb - g0)).abs() < 1e-10);
    let x = [0.0, 0.0, 1.0];
    let fp = radial_gradient(&x, g0, gb);
    assert!(jump_pstar(&tilted, &x, &x, &Mat::identity(3).scale(g0), &fp, &x).unwrap().abs() < 1e-8);
}

#[test]
fn collapsed_well_quasiconvexification() {
    let phi = ScalarPotential::DoubleWell { fa: 1.3, fb: 1.3, curvature: 1.0, bias: 0.5 };
    let m = make_isotropic_sv(Arc::new(SeparableSv { phi }), 3).unwrap();
    let p = shoot_rode(&m, 1.3, 1.3, 3, 100.0).unwrap();
    let ff = p.far_field.clone().unwrap();
    assert_abs_diff_eq!(ff.f_inf, 1.3, epsilon = 1e-12);
    let q = qw_probe(&m, &p, 5.0, Settings::default()).unwrap();
    let w = m.w(&[0.0; 3], &[0.0; 3], &Mat::identity(3).scale(1.3)).unwrap();
    assert!((q.formula - w).abs() < 1e-12 && (q.ball_average - w).abs() < 1e-10, "{q:?}");
}

#[test]
fn increment_between_identical_fields() {
    let m = half_norm_sq(2);
    let field = DeformationField::smooth(
        2,
        2,
        |x| vec![x[0] + 0.1 * x[1] * x[1], x[1]],
        |x| Mat::from_rows(&[&[1.0, 0.2 * x[1]], &[0.0, 1.0]]),
    );
    let inc = energy_increment(&m, &field, &field, &ball(2, 1.0), Settings::default()).unwrap();
    for r in &inc.reports {
        assert!(r.lhs.abs() < 1e-14 && r.rhs.abs() < 1e-14, "{r:?}");
    }
    assert_eq!(inc.criterion, 0.0);
}

#[test]
fn composite_profile_is_an_equilibrium() {
    let m = make_double_well_sv(1.0, 2.0, 1.0, 0.0, 3).unwrap();
    let p = shoot_rode(&m, 1.0, 2.0, 3, default_r_max(3)).unwrap();
    let field = p.field();
    for r in [1.5, 3.0, 10.0] {
        let x = scale(r, &normalized(&[1.0, 0.5, -0.3]));
        let (e, es) = euler_residuals(&m, &field, &x, 1e-4 * r).unwrap();
        assert!(max_abs(&e) < 1e-6 && max_abs(&es) < 1e-6, "r={r}: {e:?} {es:?}");
    }
}

#[test]
fn lane_emden_scaling() {
    let (q, n) = (3.0, 3);
    let p1 = pohozaev_shoot(n, q, 1.0).unwrap();
    let p2 = pohozaev_shoot(n, q, 2.0).unwrap();
    let k = 2f64.powf(-2.0 / (q - 1.0));
    for r in [0.2, 0.9, 1.5] {
        assert!((p2.eval(r).unwrap().0 - k * p1.eval(r / 2.0).unwrap().0).abs() < 1e-7);
    }
    assert!(p1.eval(0.5).unwrap().0 > 0.0);
    assert!(p1.eval(1.0).unwrap().0.abs() < 1e-9);
}

#[test]
fn bar_optimum() {
    let bar = make_bar_potential(1.0, 2.0).unwrap();
    let sol = bar_1d(bar, 0.0, 3.0).unwrap();
    let c = sol.check(sol.l_opt);
    assert!(c.de_dl.abs() < 1e-8 && c.d2e_dl2 > 0.0);
    let ke = bar.k * sol.eps_opt;
    assert!((ke * ke.tanh() - 1.0).abs() < 1e-12);
    let off = sol.check(1.7 * sol.l_opt);
    assert!((off.de_dl - off.pstar).abs() < 1e-6);
}

#[test]
fn clapeyron_oracles() {
    let m = make_power_p(3.0, 3, 3).unwrap();
    let f0 = Mat::from_rows(&[&[1.0, 0.1, 0.0], &[0.0, 1.2, 0.0], &[0.2, 0.0, 0.9]]);
    let field = DeformationField::affine(f0, vec![0.0; 3]);
    let s = Settings::default();
    let r = verify_gct(&m, &field, &ball(3, 1.0), s).unwrap();
    let expect = 4.0 * PI / 3.0 * m.w(&[0.0; 3], &[0.0; 3], &f0).unwrap();
    assert!((r.lhs - expect).abs() < 1e-12 && (r.rhs - expect).abs() < 1e-10);
    let (a, b) = verify_phom(&m, &field, &ball(3, 1.0), s).unwrap();
    assert!(a.pass && b.pass);
    // body load: integrals by hand on [0, 1]
    let (bl, c) = (0.5, 0.2);
    let model = BodyLoad1D { b: bl };
    let fld = DeformationField::smooth(
        1,
        1,
        move |x| vec![-bl * x[0] * x[0] / 2.0 + c * x[0]],
        move |x| Mat::from_rows(&[&[-bl * x[0] + c]]),
    );
    let g = verify_genclap(&model, &fld, &Domain::Interval { a: 0.0, b: 1.0 }, s).unwrap();
    // ∫ ½(c − bx)² − b(−bx²/2 + cx) dx
    let exact = 0.5 * (c * c - c * bl + bl * bl / 3.0) - bl * (-bl / 6.0 + c / 2.0);
    assert!((g.lhs - exact).abs() < 1e-12 && g.abs_err < 1e-10, "{g:?}");
}

#[test]
fn hydrostatic_n_equals_p() {
    let m = make_linear_isotropic(1.0, 1.0, 2).unwrap();
    let field = DeformationField::affine(Mat::identity(2).scale(0.5 / m.kappa()), vec![0.0; 2]);
    let (_, second) = verify_phom(&m, &field, &ball(2, 1.0), Settings::default().with_tol(1e-9)).unwrap();
    assert!(second.lhs.abs() < 1e-9 && second.pass);
}

#[test]
fn zero_displacement_linear_forms() {
    let field = DeformationField::affine(Mat::zeros(3, 3), vec![0.0; 3]);
    for r in verify_linear_forms(1.0, 1.0, &field, &ball(3, 1.0), Settings::default()).unwrap() {
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.rhs, 0.0);
    }
}

#[test]
fn crack_j_matches_contour_oracle() {
    let (k, mu) = (1.3, 0.8);
    let m = make_dirichlet(mu, 1, 2).unwrap();
    let field = crack_mode3_field(k, mu);
    let rule = sphere_rule(2, 0.7, 64).unwrap();
    let j = j_integral(&m, &field, &rule).unwrap();
    assert!((j[0] - k * k / (2.0 * mu)).abs() < 1e-8);
}

#[test]
fn pohozaev_criterion_arithmetic() {
    assert_eq!(pohozaev_verdict(3.0, 2.0, 6.0), UniquenessVerdict::Critical);
    assert_eq!(pohozaev_verdict(3.0, 2.0, 4.0), UniquenessVerdict::Fails);
    assert_eq!(pohozaev_verdict(3.0, 1.0, 4.0), UniquenessVerdict::Holds);
}

#[test]
fn quartic_shock_arithmetic() {
    let u = make_dynamic_potential(1.0, 1.0).unwrap();
    let s = build_shock(u, 1.0, 0.0, 0.0).unwrap();
    assert_abs_diff_eq!(s.speed, 2f64.sqrt(), epsilon = 1e-15);
    assert_abs_diff_eq!(s.jump_p(), -2.0, epsilon = 1e-15);
    assert_abs_diff_eq!(s.jump_f(), -1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(shock_pstar(&s).unwrap().pstar, 0.25, epsilon = 1e-15);
    let lin = build_shock(make_dynamic_potential(3.0, 0.0).unwrap(), 0.2, 0.7, 0.1).unwrap();
    assert_abs_diff_eq!(lin.speed, 3f64.sqrt(), epsilon = 1e-15);
    assert!(shock_pstar(&lin).unwrap().pstar.abs() < 1e-15);
    assert!(verify_energy_balance(&lin, -2.0, 3.0, 0.3).unwrap().pass);
    assert!(build_shock(u, 0.5, 0.5, 0.0).is_err());
}

#[test]
fn clapeyron_over_time() {
    let s = build_shock(make_dynamic_potential(1.0, 1.0).unwrap(), 1.0, 0.0, 0.0).unwrap();
    for t in [0.5, 1.0, 2.0] {
        let d = verify_dynamic_clapeyron(&s, -3.0, 3.0, t).unwrap();
        assert!(d.report.abs_err <= 1e-10, "{t}: {:?}", d.report);
    }
}

#[test]
fn void_values() {
    let s = VoidScenario::hydrostatic(3, 1.0, 1.0, 1.0).unwrap();
    assert_abs_diff_eq!(delta_e_linear(&s).unwrap().quadrature, -0.9 * PI, epsilon = 1e-10);
    assert_abs_diff_eq!(delta_e_gct(&s).unwrap().quadrature, -0.9 * PI, epsilon = 1e-10);
    // κ = μ = 1 in 3D means λ = 1/3
    let k1 = VoidScenario::hydrostatic(3, 1.0 / 3.0, 1.0, 1.0).unwrap();
    assert_abs_diff_eq!(delta_e_linear(&k1).unwrap().quadrature, -7.0 * PI / 6.0, epsilon = 1e-10);
    let zero = VoidScenario::hydrostatic(3, 1.0, 1.0, 0.0).unwrap();
    assert_eq!(delta_e_linear(&zero).unwrap().quadrature, 0.0);
    let s2 = VoidScenario::hydrostatic(2, 1.0, 1.0, 1.0).unwrap();
    assert!((delta_e_gct(&s2).unwrap().quadrature - delta_e_linear(&s2).unwrap().quadrature).abs() < 1e-8);
    assert_abs_diff_eq!(griffith_discrepancy(&s2).unwrap().closed_form, PI / s2.kappa(), epsilon = 1e-12);
    assert_abs_diff_eq!(griffith_discrepancy(&s).unwrap().closed_form, 4.0 * PI / (3.0 * s.kappa()), epsilon = 1e-12);
    assert_eq!(griffith_isotropic(3, 1.0, 1.0, &Mat::zeros(3, 3), &s.polarization()), 0.0);
    let (a, b) = rice_drucker_linear(&s, 1e-8).unwrap();
    assert!(a.pass && b.pass);
}
