//! Left- and right-hand sides of the static balance identities: Clapeyron
//! forms, p-homogeneous relations, linear-elastic variants, constrained
//! energies, invariant contour integrals, Pohozaev identities, energy
//! increments between extremals and the radial quasiconvexification probe.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy_models::{IsotropicSv, LinearIsotropic};
use crate::error::{Error, Result};
use crate::fields_domains::{
    annulus_rule, ball_rule, gauss_legendre, graded_ball_rule, integrate, integrate_surface, integrate_vec,
    sphere_rule, unit_sphere_area, DeformationField, Domain, JumpSurface, QuadratureRule,
};
use crate::radial_solver::{pohozaev_shoot, RadialProfile};
use crate::tensor_core::{
    cross2, cross3, dot, eshelby_from, excess, explicit_grad_x, explicit_grad_y, jump_pstar, max_abs, norm, piola,
    stresses_at, sub, EnergyModel, Mat,
};

/// LHS/RHS pair of one identity with its residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub name: String,
    pub scenario: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tol: f64,
    /// `abs_err <= tol` or `rel_err <= tol`, and both sides finite.
    pub pass: bool,
    /// Short description of the relation being checked.
    pub anchor: String,
    pub notes: String,
}

impl IdentityReport {
    pub fn new(name: &str, lhs: f64, rhs: f64, tol: f64) -> IdentityReport {
        let abs_err = (lhs - rhs).abs();
        let scale = lhs.abs().max(rhs.abs());
        let rel_err = if scale == 0.0 { 0.0 } else { abs_err / scale };
        let pass = lhs.is_finite() && rhs.is_finite() && (abs_err <= tol || rel_err <= tol);
        IdentityReport {
            name: name.to_string(),
            scenario: String::new(),
            lhs,
            rhs,
            abs_err,
            rel_err,
            tol,
            pass,
            anchor: String::new(),
            notes: String::new(),
        }
    }

    /// A residual that should vanish: `lhs = value`, `rhs = 0`.
    pub fn residual(name: &str, value: f64, tol: f64) -> IdentityReport {
        IdentityReport::new(name, value, 0.0, tol)
    }

    /// A one-sided check `lhs >= rhs`, passing when the deficit is within `tol`.
    pub fn at_least(name: &str, lhs: f64, rhs: f64, tol: f64) -> IdentityReport {
        let mut r = IdentityReport::new(name, lhs, rhs, tol);
        r.pass = lhs.is_finite() && rhs.is_finite() && lhs >= rhs - tol * rhs.abs().max(1.0);
        r
    }

    pub fn with_anchor(mut self, anchor: &str) -> IdentityReport {
        self.anchor = anchor.to_string();
        self
    }

    pub fn with_scenario(mut self, scenario: &str) -> IdentityReport {
        self.scenario = scenario.to_string();
        self
    }

    pub fn with_note(mut self, note: &str) -> IdentityReport {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(note);
        self
    }
}

/// Quadrature order, tolerance and finite-difference step shared by the
/// verifiers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub order: usize,
    pub tol: f64,
    pub fd_step: f64,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { order: 24, tol: 1e-8, fd_step: 1e-4, seed: 7 }
    }
}

impl Settings {
    pub fn with_tol(self, tol: f64) -> Settings {
        Settings { tol, ..self }
    }

    pub fn with_order(self, order: usize) -> Settings {
        Settings { order, ..self }
    }
}

fn ball_parts(domain: &Domain) -> Option<(usize, f64, Vec<f64>)> {
    match domain {
        Domain::Ball { n, radius, center } => Some((*n, *radius, center.clone())),
        Domain::Annulus { n, r_out, .. } => Some((*n, *r_out, vec![0.0; *n])),
        _ => None,
    }
}

fn concentric_jump(field: &DeformationField, center: &[f64], radius: f64) -> Option<f64> {
    match field.jump_surface() {
        Some(JumpSurface::Sphere { center: c, radius: r0 })
            if norm(&sub(c, center)) < 1e-14 && *r0 > 0.0 && *r0 < radius =>
        {
            Some(*r0)
        }
        _ => None,
    }
}

/// Volume rule adapted to the field: graded near a singular center, split at
/// a concentric spherical interface, plain otherwise.
pub fn volume_rule(field: &DeformationField, domain: &Domain, order: usize) -> Result<QuadratureRule> {
    domain.validate()?;
    if let Domain::Ball { n, radius, center } = domain {
        if let Some(r0) = concentric_jump(field, center, *radius) {
            let inner = ball_rule(*n, r0, order)?;
            let outer = annulus_rule(*n, r0, *radius, order, order)?;
            return Ok(inner.concat(outer).translated(center));
        }
        if field.singular_points().iter().any(|s| norm(&sub(s, center)) < 1e-14) {
            return Ok(graded_ball_rule(*n, *radius, 40, 16, order)?.translated(center));
        }
    }
    domain.rule(order)
}

fn interface_rule(field: &DeformationField, domain: &Domain, order: usize) -> Result<Option<QuadratureRule>> {
    if let Some(JumpSurface::Plane { .. }) = field.jump_surface() {
        return Err(Error::Unsupported("planar interfaces inside a bounded domain".into()));
    }
    let Some((n, radius, center)) = ball_parts(domain) else {
        return Ok(None);
    };
    match concentric_jump(field, &center, radius) {
        Some(r0) => Ok(Some(sphere_rule(n, r0, order)?.translated(&center))),
        None => Ok(None),
    }
}

/// `p*_Σ` of a composite field at a point on its jump surface.
pub fn interface_pstar(model: &dyn EnergyModel, field: &DeformationField, x: &[f64]) -> Result<f64> {
    let surface = field.jump_surface().ok_or(Error::MissingSymmetry("jump surface"))?;
    let (fm, fp) = field.traces(x).ok_or(Error::MissingSymmetry("jump surface"))?;
    jump_pstar(model, x, &field.y(x), &fm, &fp, &surface.normal_at(x))
}

fn interface_term(
    model: &dyn EnergyModel,
    field: &DeformationField,
    domain: &Domain,
    order: usize,
    a: &[f64],
) -> Result<f64> {
    match interface_rule(field, domain, order)? {
        Some(rule) => integrate_surface(|x, nu| Ok(interface_pstar(model, field, x)? * dot(nu, &sub(x, a))), &rule),
        None => Ok(0.0),
    }
}

fn clapeyron_boundary(
    model: &dyn EnergyModel,
    field: &DeformationField,
    rule: &QuadratureRule,
    a: &[f64],
    b: &[f64],
) -> Result<f64> {
    integrate_surface(
        |x, nu| {
            let (p, ps) = stresses_at(model, field, x)?;
            Ok(dot(&p.mul_vec(nu), &sub(&field.y(x), b)) + dot(&ps.mul_vec(nu), &sub(x, a)))
        },
        rule,
    )
}

fn energy(model: &dyn EnergyModel, field: &DeformationField, rule: &QuadratureRule) -> Result<f64> {
    integrate(|x| model.w(x, &field.y(x), &field.grad(x)), rule)
}

fn check_field(model: &dyn EnergyModel, field: &DeformationField) -> Result<()> {
    if model.dims() != field.dims() {
        return Err(Error::Dimension(format!(
            "model {} has dims {:?}, field has {:?}",
            model.name(),
            model.dims(),
            field.dims()
        )));
    }
    Ok(())
}

/// `∫W = (1/n)∮{Pn·y + P*n·x} − (1/n)∫_Σ p*_Σ (n·x)` for scale-free `W`.
pub fn verify_gct(
    model: &dyn EnergyModel,
    field: &DeformationField,
    domain: &Domain,
    settings: Settings,
) -> Result<IdentityReport> {
    let (m, n) = model.dims();
    verify_gct_shifted(model, field, domain, &vec![0.0; n], &vec![0.0; m], settings)
}

/// Shifted form `∫W = (1/n)∮{P*n·(x − a) + Pn·(y − b)}` (with the interface
/// term measured from `a`).
pub fn verify_gct_shifted(
    model: &dyn EnergyModel,
    field: &DeformationField,
    domain: &Domain,
    a: &[f64],
    b: &[f64],
    settings: Settings,
) -> Result<IdentityReport> {
    check_field(model, field)?;
    if !model.flags().scale_free {
        return Err(Error::MissingSymmetry("scale-free energy"));
    }
    let n = model.dims().1 as f64;
    let lhs = energy(model, field, &volume_rule(field, domain, settings.order)?)?;
    let boundary = clapeyron_boundary(model, field, &domain.boundary_rule(settings.order)?, a, b)?;
    let jump = interface_term(model, field, domain, settings.order, a)?;
    let rhs = (boundary - jump) / n;
    Ok(IdentityReport::new("generalized Clapeyron", lhs, rhs, settings.tol)
        .with_anchor("energy equals boundary work of Piola and Eshelby tractions over n"))
}

/// `n∫W = −∫{W_x·x + W_y·y} + ∮{Pn·y + P*n·x} − ∫_Σ p*_Σ (n·x)`.
pub fn verify_genclap(
    model: &dyn EnergyModel,
    field: &DeformationField,
    domain: &Domain,
    settings: Settings,
) -> Result<IdentityReport> {
    check_field(model, field)?;
    let (m, n) = model.dims();
    let vol = volume_rule(field, domain, settings.order)?;
    let lhs = n as f64 * energy(model, field, &vol)?;
    let source = integrate(
        |x| {
            let y = field.y(x);
            let f = field.grad(x);
            Ok(dot(&explicit_grad_x(model, x, &y, &f)?, x) + dot(&explicit_grad_y(model, x, &y, &f)?, &y))
        },
        &vol,
    )?;
    let boundary =
        clapeyron_boundary(model, field, &domain.boundary_rule(settings.order)?, &vec![0.0; n], &vec![0.0; m])?;
    let jump = interface_term(model, field, domain, settings.order, &vec![0.0; n])?;
    Ok(IdentityReport::new("general Clapeyron relation", lhs, boundary - source - jump, settings.tol)
        .with_anchor("n times energy equals boundary work minus explicit-dependence sources"))
}

fn p_degree(model: &dyn EnergyModel) -> Result<f64> {
    model.flags().p_hom.ok_or(Error::MissingSymmetry("p-homogeneity"))
}

/// `∫W = (1/p)∮Pn·y` and `∫W = 1/(n−p)∮P*n·x` (or `∮P*n·x = 0` when `n = p`).
pub fn verify_phom(
    model: &dyn EnergyModel,
    field: &DeformationField,
    domain: &Domain,
    settings: Settings,
) -> Result<(IdentityReport, IdentityReport)> {
    check_field(model, field)?;
    let p = p_degree(model)?;
    let n = model.dims().1 as f64;
    let e = energy(model, field, &volume_rule(field, domain, settings.order)?)?;
    let brule = domain.boundary_rule(settings.order)?;
    let piola_work = integrate_surface(
        |x, nu| {
            let (pk, _) = stresses_at(model, field, x)?;
            Ok(dot(&pk.mul_vec(nu), &field.y(x)))
        },
        &brule,
    )?;
    let esh_work = integrate_surface(
        |x, nu| {
            let (_, ps) = stresses_at(model, field, x)?;
            Ok(dot(&ps.mul_vec(nu), x))
        },
        &brule,
    )?;
    let first = IdentityReport::new("p-homogeneous Clapeyron", e, piola_work / p, settings.tol)
        .with_anchor("energy equals boundary Piola work over p");
    let second = if (n - p).abs() > 1e-12 {
        IdentityReport::new("conjugate-momentum Clapeyron", e, esh_work / (n - p), settings.tol)
            .with_anchor("energy equals boundary Eshelby work over n - p")
    } else {
        IdentityReport::residual("conjugate-momentum Clapeyron (n = p)", esh_work, settings.tol)
            .with_anchor("boundary Eshelby work vanishes when n = p")
    };
    Ok((first, second))
}

/// Interior sample points of a ball domain, kept away from singular points
/// and jump surfaces.
pub fn interior_points(field: &DeformationField, domain: &Domain, count: usize, seed: u64, margin: f64) -> Result<Vec<Vec<f64>>> {
    let (n, radius, center) = ball_parts(domain)
        .ok_or_else(|| Error::Unsupported("interior sampling needs a ball domain".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        if tries > 1000 * count {
            return Err(Error::Integrator("could not place interior sample points".into()));
        }
        let z: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        if norm(&z) > 0.8 {
            continue;
        }
        let x: Vec<f64> = z.iter().zip(&center).map(|(a, c)| c + radius * a).collect();
        if let Domain::Annulus { r_in, .. } = domain {
            if norm(&x) < r_in + margin {
                continue;
            }
        }
        if field.check_regular(&x, margin).is_ok() {
            out.push(x);
        }
    }
    Ok(out)
}

fn fd_divergence(flux: &dyn Fn(&[f64]) -> Result<Vec<f64>>, x: &[f64], h: f64) -> Result<f64> {
    let mut div = 0.0;
    for j in 0..x.len() {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        div += (flux(&xp)?[j] - flux(&xm)?[j]) / (2.0 * h);
    }
    Ok(div)
}

/// `(1/p)∮Pn·y = 1/(n−p)∮P*n·x`, plus the largest finite-difference
/// divergence of `p(P*)ᵀx − (n−p)Pᵀy` over 50 interior points.
pub fn verify_ppst_and_pi(
    model: &dyn EnergyModel,
    field: &DeformationField,
    domain: &Domain,
    settings: Settings,
) -> Result<(IdentityReport, IdentityReport)> {
    check_field(model, field)?;
    if !model.flags().scale_free {
        return Err(Error::MissingSymmetry("scale-free energy"));
    }
    let p = p_degree(model)?;
    let n = model.dims().1 as f64;
    if (n - p).abs() < 1e-12 {
        return Err(Error::InvalidParameter("the cross-relation needs n != p".into()));
    }
    let brule = domain.boundary_rule(settings.order)?;
    let lhs = integrate_surface(
        |x, nu| Ok(dot(&stresses_at(model, field, x)?.0.mul_vec(nu), &field.y(x))),
        &brule,
    )? / p;
    let rhs = integrate_surface(|x, nu| Ok(dot(&stresses_at(model, field, x)?.1.mul_vec(nu), x)), &brule)? / (n - p);
    let cross = IdentityReport::new("Piola-Eshelby cross relation", lhs, rhs, settings.tol)
        .with_anchor("boundary Piola work over p equals boundary Eshelby work over n - p");
    let flux = |x: &[f64]| -> Result<Vec<f64>> {
        let (pk, ps) = stresses_at(model, field, x)?;
        let a = ps.tr_mul_vec(x);
        let b = pk.tr_mul_vec(&field.y(x));
        Ok(a.iter().zip(&b).map(|(u, v)| p * u - (n - p) * v).collect())
    };
    let h = settings.fd_step;
    let mut worst: f64 = 0.0;
    for x in interior_points(field, domain, 50, settings.seed, 3.0 * h)? {
        worst = worst.max(fd_divergence(&flux, &x, h)?.abs());
    }
    let div = IdentityReport::residual("conservation law divergence", worst, 1e-6)
        .with_anchor("divergence of p P*^T x - (n - p) P^T y vanishes");
    Ok((cross, div))
}

/// `u = ∇h + Ωx + c` for a harmonic cubic `h`; an equilibrium of isotropic
/// linear elasticity for any moduli.
pub fn harmonic_gradient_field(n: usize, coeffs: [f64; 3], omega: f64, shift: Vec<f64>) -> Result<DeformationField> {
    if !(2..=3).contains(&n) || shift.len() != n {
        return Err(Error::InvalidParameter(format!("harmonic family needs n in 2..=3 and a shift in R^{n}")));
    }
    let [c0, c1, c2] = coeffs;
    let rot = if n == 2 {
        Mat::from_rows(&[&[0.0, -omega], &[omega, 0.0]])
    } else {
        Mat::from_rows(&[&[0.0, -omega, 0.5 * omega], &[omega, 0.0, -0.25 * omega], &[-0.5 * omega, 0.25 * omega, 0.0]])
    };
    let grad_h = move |x: &[f64]| -> Vec<f64> {
        if n == 2 {
            let (a, b) = (x[0], x[1]);
            vec![
                c0 * (3.0 * a * a - 3.0 * b * b) + c1 * 6.0 * a * b,
                c0 * (-6.0 * a * b) + c1 * (3.0 * a * a - 3.0 * b * b),
            ]
        } else {
            let (a, b, c) = (x[0], x[1], x[2]);
            vec![
                c0 * (3.0 * a * a - 3.0 * b * b) + c1 * b * c + c2 * 2.0 * a * b,
                c0 * (-6.0 * a * b) + c1 * a * c + c2 * (a * a - c * c),
                c1 * a * b - c2 * 2.0 * c * b,
            ]
        }
    };
    let hess_h = move |x: &[f64]| -> Mat {
        if n == 2 {
            let (a, b) = (x[0], x[1]);
            Mat::from_rows(&[&[6.0 * c0 * a + 6.0 * c1 * b, -6.0 * c0 * b + 6.0 * c1 * a], &[
                -6.0 * c0 * b + 6.0 * c1 * a,
                -6.0 * c0 * a - 6.0 * c1 * b,
            ]])
        } else {
            let (a, b, c) = (x[0], x[1], x[2]);
            Mat::from_rows(&[
                &[6.0 * c0 * a + 2.0 * c2 * b, -6.0 * c0 * b + c1 * c + 2.0 * c2 * a, c1 * b],
                &[-6.0 * c0 * b + c1 * c + 2.0 * c2 * a, -6.0 * c0 * a, c1 * a - 2.0 * c2 * c],
                &[c1 * b, c1 * a - 2.0 * c2 * c, -2.0 * c2 * b],
            ])
        }
    };
    Ok(DeformationField::smooth(
        n,
        n,
        move |x| {
            let g = grad_h(x);
            let r = rot.mul_vec(x);
            (0..n).map(|i| g[i] + r[i] + shift[i]).collect()
        },
        move |x| hess_h(x) + rot,
    ))
}

/// Classical Clapeyron, the linear GCT with rotations, the boundary relation
/// for `∮σn·wx`, and the pointwise divergence relation behind it.
pub fn verify_linear_forms(
    lambda: f64,
    mu: f64,
    field: &DeformationField,
    domain: &Domain,
    settings: Settings,
) -> Result<Vec<IdentityReport>> {
    let (m, n) = field.dims();
    if m != n {
        return Err(Error::Dimension("linear forms need a displacement field with m = n".into()));
    }
    let mat = LinearIsotropic { lambda, mu, n };
    let nf = n as f64;
    let parts = |x: &[f64]| {
        let g = field.grad(x);
        let e = g.sym();
        let w = g.skew();
        let s = mat.stress(&g);
        (g, e, w, s)
    };
    let vol = volume_rule(field, domain, settings.order)?;
    let brule = domain.boundary_rule(settings.order)?;
    let e2 = integrate(|x| Ok(0.5 * parts(x).3.dot(&parts(x).1)), &vol)?;
    let classical = integrate_surface(|x, nu| Ok(0.5 * dot(&parts(x).3.mul_vec(nu), &field.y(x))), &brule)?;
    let lin_gct = integrate_surface(
        |x, nu| {
            let (_, e, w, s) = parts(x);
            let sn = s.mul_vec(nu);
            let u = field.y(x);
            Ok(dot(&sn, &sub(&u, &w.mul_vec(x))) - dot(&sn, &e.mul_vec(x)) + 0.5 * s.dot(&e) * dot(nu, x))
        },
        &brule,
    )? / nf;
    let rot_work = integrate_surface(|x, nu| {
        let (_, _, w, s) = parts(x);
        Ok(dot(&s.mul_vec(nu), &w.mul_vec(x)))
    }, &brule)?;
    let rot_rhs = integrate_surface(
        |x, nu| {
            let (_, e, _, s) = parts(x);
            let sn = s.mul_vec(nu);
            Ok(0.5 * s.dot(&e) * dot(nu, x) - dot(&sn, &e.mul_vec(x)) - 0.5 * (nf - 2.0) * dot(&sn, &field.y(x)))
        },
        &brule,
    )?;
    let flux_left = |x: &[f64]| -> Result<Vec<f64>> {
        let (g, _, _, s) = parts(x);
        Ok(s.mul_vec(&g.mul_vec(x)))
    };
    let flux_right = |x: &[f64]| -> Result<Vec<f64>> {
        let (_, e, _, s) = parts(x);
        let se = s.dot(&e);
        let su = s.mul_vec(&field.y(x));
        Ok((0..n).map(|i| 0.5 * se * x[i] - 0.5 * (nf - 2.0) * su[i]).collect())
    };
    let h = settings.fd_step;
    let mut worst: f64 = 0.0;
    for x in interior_points(field, domain, 50, settings.seed, 3.0 * h)? {
        worst = worst.max((fd_divergence(&flux_left, &x, h)? - fd_divergence(&flux_right, &x, h)?).abs());
    }
    Ok(vec![
        IdentityReport::new("classical Clapeyron", e2, classical, settings.tol)
            .with_anchor("half the strain energy equals half the boundary work of tractions"),
        IdentityReport::new("linear Clapeyron with rotations", e2, lin_gct, settings.tol)
            .with_anchor("linear generalized Clapeyron including the infinitesimal rotation"),
        IdentityReport::new("rotation boundary relation", rot_work, rot_rhs, settings.tol)
            .with_anchor("boundary work of tractions on the rotation field"),
        IdentityReport::residual("rotation divergence relation", worst, 1e-6)
            .with_anchor("pointwise divergence identity for sigma grad u x"),
    ])
}

/// Incompressible neo-Hookean shear `y = x + γx₂e₁` on the unit disc with a
/// constant Lagrange multiplier `p`:
/// `∫W = (1/n)∮{(P − p cof F)n·y + (P* + pI)n·x}`.
pub fn verify_incompressible(mu: f64, gamma: f64, pressure: f64, settings: Settings) -> Result<IdentityReport> {
    let model = crate::energy_models::ShearEnergy { mu, n: 2 };
    let f = Mat::from_rows(&[&[1.0, gamma], &[0.0, 1.0]]);
    let field = DeformationField::affine(f, vec![0.0, 0.0]);
    let domain = Domain::Ball { n: 2, radius: 1.0, center: vec![0.0, 0.0] };
    let lhs = energy(&model, &field, &domain.rule(settings.order)?)?;
    let cof = f.cof();
    let rhs = integrate_surface(
        |x, nu| {
            let (p, ps) = stresses_at(&model, &field, x)?;
            let pc = p - cof.scale(pressure);
            let psc = ps + Mat::identity(2).scale(pressure);
            Ok(dot(&pc.mul_vec(nu), &field.y(x)) + dot(&psc.mul_vec(nu), x))
        },
        &domain.boundary_rule(settings.order)?,
    )? / 2.0;
    Ok(IdentityReport::new("constrained Clapeyron", lhs, rhs, settings.tol)
        .with_anchor("Clapeyron relation with a pressure multiplier for det F = 1"))
}

fn path_normals(rule: &QuadratureRule) -> Result<()> {
    if rule.normals.is_none() {
        return Err(Error::Unsupported("contour integrals need a rule with normals".into()));
    }
    Ok(())
}

/// `J = ∮P*n dS`.
pub fn j_integral(model: &dyn EnergyModel, field: &DeformationField, rule: &QuadratureRule) -> Result<Vec<f64>> {
    check_field(model, field)?;
    path_normals(rule)?;
    let n = model.dims().1;
    integrate_vec(
        |x, nu| {
            field.check_regular(x, 1e-12)?;
            Ok(stresses_at(model, field, x)?.1.mul_vec(nu.expect("normals present")))
        },
        rule,
        n,
    )
}

/// `L = ∮{Pn×y + P*n×x} dS`: a vector for `n = 3`, the scalar cross form
/// for `n = 2`.
pub fn l_integral(model: &dyn EnergyModel, field: &DeformationField, rule: &QuadratureRule) -> Result<Vec<f64>> {
    check_field(model, field)?;
    path_normals(rule)?;
    if !model.flags().glin_isotropic {
        return Err(Error::MissingSymmetry("isotropy under simultaneous rotations"));
    }
    let (m, n) = model.dims();
    if m != n || !(2..=3).contains(&n) {
        return Err(Error::Dimension("L integral needs m = n in 2..=3".into()));
    }
    let dim = if n == 2 { 1 } else { 3 };
    integrate_vec(
        |x, nu| {
            field.check_regular(x, 1e-12)?;
            let (p, ps) = stresses_at(model, field, x)?;
            let nu = nu.expect("normals present");
            let (pn, psn, y) = (p.mul_vec(nu), ps.mul_vec(nu), field.y(x));
            Ok(if n == 2 {
                vec![cross2(&pn, &y) + cross2(&psn, x)]
            } else {
                let (a, b) = (cross3(&pn, &y), cross3(&psn, x));
                (0..3).map(|i| a[i] + b[i]).collect()
            })
        },
        rule,
        dim,
    )
}

/// `M = ∮{P*n·x + ((p − n)/p) Pn·y} dS`.
pub fn m_integral(model: &dyn EnergyModel, field: &DeformationField, rule: &QuadratureRule) -> Result<f64> {
    check_field(model, field)?;
    path_normals(rule)?;
    if !model.flags().scale_free {
        return Err(Error::MissingSymmetry("scale-free energy"));
    }
    let p = p_degree(model)?;
    let n = model.dims().1 as f64;
    integrate_surface(
        |x, nu| {
            field.check_regular(x, 1e-12)?;
            let (pk, ps) = stresses_at(model, field, x)?;
            Ok(dot(&ps.mul_vec(nu), x) + (p - n) / p * dot(&pk.mul_vec(nu), &field.y(x)))
        },
        rule,
    )
}

/// Antiplane screw dislocation `u = (b/2π)θ` (`m = 1`, `n = 2`).
pub fn screw_dislocation_field(burgers: f64) -> DeformationField {
    let c = burgers / (2.0 * std::f64::consts::PI);
    DeformationField::smooth(
        1,
        2,
        move |x| vec![c * x[1].atan2(x[0])],
        move |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            Mat::from_rows(&[&[-c * x[1] / r2, c * x[0] / r2]])
        },
    )
    .with_singular_point(vec![0.0, 0.0])
}

/// Antiplane crack-tip field `u = (2K/μ)√(r/2π) sin(θ/2)`, crack along the
/// negative `x₁` axis.
pub fn crack_mode3_field(k: f64, mu: f64) -> DeformationField {
    let c = 2.0 * k / mu / (2.0 * std::f64::consts::PI).sqrt();
    DeformationField::smooth(
        1,
        2,
        move |x| {
            let r = norm(x);
            vec![c * r.sqrt() * (0.5 * x[1].atan2(x[0])).sin()]
        },
        move |x| {
            let r = norm(x);
            let th = x[1].atan2(x[0]);
            let ur = 0.5 * c / r.sqrt() * (0.5 * th).sin();
            let ut = 0.5 * c / r.sqrt() * (0.5 * th).cos();
            let (cs, sn) = (th.cos(), th.sin());
            Mat::from_rows(&[&[ur * cs - ut * sn, ur * sn + ut * cs]])
        },
    )
    .with_singular_point(vec![0.0, 0.0])
}

/// Verdict of the homogeneous uniqueness criterion `1/n + 1/k <= 1/p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniquenessVerdict {
    /// Strict inequality: the criterion holds.
    Holds,
    /// Equality: the critical case.
    Critical,
    /// The inequality fails; no uniqueness claim is made.
    Fails,
}

impl UniquenessVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            UniquenessVerdict::Holds => "holds",
            UniquenessVerdict::Critical => "critical",
            UniquenessVerdict::Fails => "fails",
        }
    }
}

/// Compares `p(k + n)` with `nk`, exact for integer data.
pub fn pohozaev_verdict(n: f64, p: f64, k: f64) -> UniquenessVerdict {
    let (lhs, rhs) = (p * (k + n), n * k);
    if lhs == rhs {
        UniquenessVerdict::Critical
    } else if lhs < rhs {
        UniquenessVerdict::Holds
    } else {
        UniquenessVerdict::Fails
    }
}

/// Pohozaev identities for the shot radial solution together with the
/// shooting parameter `u(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PohozaevCheck {
    pub alpha: f64,
    pub energy_identity: IdentityReport,
    pub dilation_identity: IdentityReport,
}

/// `∫|∇u|² = ∫u^{q+1}` and
/// `∫{(n−2)|∇u|²/2 − n u^{q+1}/(q+1)} = −½∮u_n²(n·x)` for the positive
/// radial solution in `B(0,R)`.
pub fn verify_pohozaev(n: usize, q: f64, radius: f64, tol: f64) -> Result<PohozaevCheck> {
    let prof = pohozaev_shoot(n, q, radius)?;
    let area = unit_sphere_area(n);
    let (gx, gw) = gauss_legendre(8);
    let mut grad2 = 0.0;
    let mut pot = 0.0;
    for win in prof.table.t.windows(2) {
        let (a, b) = (win[0], win[1]);
        for (t, w) in gx.iter().zip(&gw) {
            let r = 0.5 * (a + b) + 0.5 * (b - a) * t;
            let (u, du) = prof.eval(r)?;
            let jac = 0.5 * (b - a) * w * area * r.powi(n as i32 - 1);
            grad2 += jac * du * du;
            pot += jac * u.abs().powf(q + 1.0);
        }
    }
    let nf = n as f64;
    let lhs2 = 0.5 * (nf - 2.0) * grad2 - nf * pot / (q + 1.0);
    let rhs2 = -0.5 * prof.du_boundary.powi(2) * radius * area * radius.powi(n as i32 - 1);
    Ok(PohozaevCheck {
        alpha: prof.alpha,
        energy_identity: IdentityReport::new("Pohozaev energy identity", grad2, pot, tol)
            .with_anchor("Dirichlet energy equals the nonlinear potential work"),
        dilation_identity: IdentityReport::new("Pohozaev dilation identity", lhs2, rhs2, tol)
            .with_anchor("volume dilation balance equals minus the boundary flux term"),
    })
}

/// Energy-increment identities between two stationary fields with equal
/// boundary values.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyIncrement {
    pub reports: Vec<IdentityReport>,
    /// `∮(P₁ − P₂)n·(F₂x − y₀)`, whose sign is the metastability criterion.
    pub criterion: f64,
    /// Smallest excess `ℰ(F₁, F₂)` over the boundary nodes.
    pub min_boundary_excess: f64,
}

/// Checks the two excess forms of `∫(W₂ − W₁)`, their symmetric average,
/// the symmetric boundary relation, and the inequality that follows from a
/// nonnegative boundary excess.
pub fn energy_increment(
    model: &dyn EnergyModel,
    field1: &DeformationField,
    field2: &DeformationField,
    domain: &Domain,
    settings: Settings,
) -> Result<EnergyIncrement> {
    check_field(model, field1)?;
    check_field(model, field2)?;
    let n = model.dims().1 as f64;
    let brule = domain.boundary_rule(settings.order)?;
    let mut mismatch: f64 = 0.0;
    for x in &brule.nodes {
        mismatch = mismatch.max(max_abs(&sub(&field1.y(x), &field2.y(x))));
    }
    if mismatch > 1e-10 {
        return Err(Error::BoundaryMismatch(mismatch));
    }
    let vol1 = volume_rule(field1, domain, settings.order)?;
    let vol2 = volume_rule(field2, domain, settings.order)?;
    let lhs = energy(model, field2, &vol2)? - energy(model, field1, &vol1)?;

    struct Node {
        xn: f64,
        e12: f64,
        e21: f64,
        d2: f64,
        d1: f64,
        sym: f64,
    }
    let at = |x: &[f64], nu: &[f64]| -> Result<Node> {
        let y0 = field1.y(x);
        let (f1, f2) = (field1.grad(x), field2.grad(x));
        let p1 = piola(model, x, &y0, &f1)?;
        let p2 = piola(model, x, &y0, &f2)?;
        let dpn = (p1 - p2).mul_vec(nu);
        Ok(Node {
            xn: dot(x, nu),
            e12: excess(model, x, &y0, &f1, &f2)?,
            e21: excess(model, x, &y0, &f2, &f1)?,
            d2: dot(&dpn, &sub(&f2.mul_vec(x), &y0)),
            d1: dot(&dpn, &sub(&f1.mul_vec(x), &y0)),
            sym: -dot(&dpn, &(f2 - f1).mul_vec(x)),
        })
    };
    let naff1 = integrate_surface(|x, nu| at(x, nu).map(|k| k.e12 * k.xn + k.d2), &brule)? / n;
    let naff2 = integrate_surface(|x, nu| at(x, nu).map(|k| -k.e21 * k.xn + k.d1), &brule)? / n;
    let symd = integrate_surface(
        |x, nu| at(x, nu).map(|k| 0.5 * (k.e12 - k.e21) * k.xn + 0.5 * (k.d1 + k.d2)),
        &brule,
    )? / n;
    let syms_l = integrate_surface(|x, nu| at(x, nu).map(|k| (k.e12 + k.e21) * k.xn), &brule)?;
    let syms_r = integrate_surface(|x, nu| at(x, nu).map(|k| k.sym), &brule)?;
    let criterion = integrate_surface(|x, nu| at(x, nu).map(|k| k.d2), &brule)?;
    let mut min_excess = f64::INFINITY;
    for (x, nu) in brule.nodes.iter().zip(brule.normals.as_ref().expect("boundary normals")) {
        min_excess = min_excess.min(at(x, nu)?.e12);
    }
    let mut reports = vec![
        IdentityReport::new("energy increment, forward excess", lhs, naff1, settings.tol)
            .with_anchor("energy difference via excess of the second gradient over the first"),
        IdentityReport::new("energy increment, backward excess", lhs, naff2, settings.tol)
            .with_anchor("energy difference via excess of the first gradient over the second"),
        IdentityReport::new("energy increment, symmetric form", lhs, symd, settings.tol)
            .with_anchor("average of the forward and backward forms"),
        IdentityReport::new("symmetric excess relation", syms_l, syms_r, settings.tol)
            .with_anchor("sum of both excesses equals the boundary stress-jump work"),
    ];
    if min_excess >= -settings.tol {
        reports.push(
            IdentityReport::at_least("excess inequality", lhs, criterion / n, settings.tol)
                .with_anchor("energy difference bounded below by the boundary stress-jump work")
                .with_note(&format!("criterion integral {criterion:.6e}")),
        );
    }
    Ok(EnergyIncrement { reports, criterion, min_boundary_excess: min_excess })
}

/// Closed-form radial value of `QW((η/r) I)` and the ball average it should
/// equal.
#[derive(Debug, Clone, PartialEq)]
pub struct QwProbe {
    pub r: f64,
    pub formula: f64,
    pub ball_average: f64,
    pub report: IdentityReport,
}

/// `QW((η(r)/r) I) = w₁η/r + w − η′w₁`, cross-checked against the average of
/// `W(∇ȳ)` over `B(0, r)` by volume quadrature.
pub fn qw_probe(model: &IsotropicSv, profile: &RadialProfile, r: f64, settings: Settings) -> Result<QwProbe> {
    if !(r >= 1.0) {
        return Err(Error::InvalidParameter(format!("probe radius {r} must be at least 1")));
    }
    if r > profile.r_max() {
        return Err(Error::InvalidParameter(format!("probe radius {r} beyond the profile range")));
    }
    let (eta, deta) = profile.eval(r)?;
    let d = model.radial(deta, eta / r);
    let formula = d.w1 * eta / r + d.w - deta * d.w1;
    let field = profile.field();
    let n = model.n;
    let domain = Domain::Ball { n, radius: r, center: vec![0.0; n] };
    let rule = volume_rule(&field, &domain, settings.order)?;
    let total = energy(model, &field, &rule)?;
    let ball_average = total / rule.weight_sum();
    let report = IdentityReport::new("radial quasiconvex envelope", formula, ball_average, settings.tol)
        .with_anchor("radial formula for QW equals the ball-average energy of the extremal");
    Ok(QwProbe { r, formula, ball_average, report })
}

/// Largest deviation of `P*n` from `expected(x)` over the nodes of `rule`.
pub fn boundary_traction_deviation(
    model: &dyn EnergyModel,
    field: &DeformationField,
    rule: &QuadratureRule,
    expected: impl Fn(&[f64]) -> Vec<f64>,
) -> Result<f64> {
    let normals = rule.normals.as_ref().ok_or_else(|| Error::Unsupported("rule without normals".into()))?;
    let mut worst: f64 = 0.0;
    for (x, nu) in rule.nodes.iter().zip(normals) {
        let y = field.y(x);
        let f = field.grad(x);
        let p = piola(model, x, &y, &f)?;
        let ps = eshelby_from(model.w(x, &y, &f)?, &f, &p);
        worst = worst.max(max_abs(&sub(&ps.mul_vec(nu), &expected(x))));
    }
    Ok(worst)
}
