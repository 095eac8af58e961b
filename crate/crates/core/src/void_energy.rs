//! Energy released by nucleating a small spherical void in a linear elastic
//! medium under remote hydrostatic stress: the exterior-problem formula, the
//! configurational (Eshelby) formula, the Rice–Drucker forms and the
//! far-field discrepancy term `G`.

use crate::energy_models::LinearIsotropic;
use crate::error::{Error, Result};
use crate::fields_domains::{ball_volume, integrate_surface, sphere_rule, unit_sphere_area};
use crate::identity_lab::IdentityReport;
use crate::radial_solver::{linear_exterior, LinearExterior};
use crate::tensor_core::{dot, max_abs, Mat};

/// Unit spherical cavity in an isotropic medium under remote hydrostatic
/// stress `p I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoidScenario {
    pub n: usize,
    pub lambda: f64,
    pub mu: f64,
    pub p: f64,
    /// Angular order of the sphere quadrature.
    pub order: usize,
}

impl VoidScenario {
    pub fn hydrostatic(n: usize, lambda: f64, mu: f64, p: f64) -> Result<VoidScenario> {
        crate::energy_models::make_linear_isotropic(lambda, mu, n)?;
        if !(2..=3).contains(&n) {
            return Err(Error::InvalidParameter(format!("void scenarios need n in 2..=3, got {n}")));
        }
        if !p.is_finite() {
            return Err(Error::InvalidParameter("remote load must be finite".into()));
        }
        Ok(VoidScenario { n, lambda, mu, p, order: 32 })
    }

    /// `κ = λ + 2μ/n`.
    pub fn kappa(&self) -> f64 {
        self.lambda + 2.0 * self.mu / self.n as f64
    }

    pub fn material(&self) -> LinearIsotropic {
        LinearIsotropic { lambda: self.lambda, mu: self.mu, n: self.n }
    }

    pub fn exterior(&self) -> LinearExterior {
        linear_exterior(self.p, self.kappa(), self.mu, self.n).expect("validated scenario")
    }

    /// Remote strain `F₀ = p/(nκ) I`.
    pub fn f0(&self) -> Mat {
        Mat::identity(self.n).scale(self.exterior().a_coef())
    }

    /// Remote stress `P₀ = p I`.
    pub fn p0(&self) -> Mat {
        Mat::identity(self.n).scale(self.p)
    }

    /// Polarization `S = p/(2(n−1)μ) I` of the spherical cavity.
    pub fn polarization(&self) -> Mat {
        Mat::identity(self.n).scale(self.exterior().b_coef())
    }

    fn cavity_rule(&self) -> Result<crate::fields_domains::QuadratureRule> {
        sphere_rule(self.n, 1.0, self.order)
    }
}

/// A quantity computed by quadrature together with a second evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoWay {
    pub quadrature: f64,
    pub reference: f64,
}

/// `ΔE = −½∮_{∂ω} σ₀n·u_in dS` with the reference value
/// `−(p²/2)(1/(nκ) + 1/(2(n−1)μ))|S^{n−1}|`.
pub fn delta_e_linear(scn: &VoidScenario) -> Result<TwoWay> {
    let ext = scn.exterior();
    let s0 = scn.p0();
    let quadrature = integrate_surface(|z, nu| Ok(-0.5 * dot(&s0.mul_vec(nu), &ext.u(z)?)), &scn.cavity_rule()?)?;
    let nf = scn.n as f64;
    let reference = -0.5
        * scn.p
        * scn.p
        * (1.0 / (nf * scn.kappa()) + 1.0 / (2.0 * (nf - 1.0) * scn.mu))
        * unit_sphere_area(scn.n);
    Ok(TwoWay { quadrature, reference })
}

/// `ΔE = −(1/n)∮_{∂ω} W(∇u_in)(n·z) dS`, with the Eshelby form
/// `−(1/n)∮P*n·z` as the reference (they agree because `∂ω` is traction free).
pub fn delta_e_gct(scn: &VoidScenario) -> Result<TwoWay> {
    let ext = scn.exterior();
    let mat = scn.material();
    let rule = scn.cavity_rule()?;
    let nf = scn.n as f64;
    let quadrature =
        integrate_surface(|z, nu| Ok(-mat.energy(&ext.grad(z)?) * dot(nu, z) / nf), &rule)?;
    let reference = integrate_surface(
        |z, nu| {
            let g = ext.grad(z)?;
            let s = mat.stress(&g);
            let ps = Mat::identity(scn.n).scale(mat.energy(&g)) - g.transpose().matmul(&s);
            Ok(-dot(&ps.mul_vec(nu), z) / nf)
        },
        &rule,
    )?;
    if (quadrature - reference).abs() > 1e-10 * quadrature.abs().max(1.0) {
        return Err(Error::SelfCheck(format!("energy form {quadrature} != Eshelby form {reference}")));
    }
    Ok(TwoWay { quadrature, reference })
}

/// Largest traction `|σ(u_in)ẑ|` over the cavity nodes.
pub fn cavity_traction(scn: &VoidScenario) -> Result<f64> {
    let ext = scn.exterior();
    let rule = scn.cavity_rule()?;
    let mut worst: f64 = 0.0;
    for (z, nu) in rule.nodes.iter().zip(rule.normals.as_ref().expect("sphere normals")) {
        worst = worst.max(max_abs(&ext.stress(z)?.mul_vec(nu)));
    }
    Ok(worst)
}

/// `G` for isotropic moduli:
/// `(|B|/(n+2))((nμ − 2λ) tr F₀ tr S + (2λn + μ(n² + 2n − 4))⟨S, F₀⟩)`.
pub fn griffith_isotropic(n: usize, lambda: f64, mu: f64, f0: &Mat, s: &Mat) -> f64 {
    let nf = n as f64;
    ball_volume(n, 1.0) / (nf + 2.0)
        * ((nf * mu - 2.0 * lambda) * f0.trace() * s.trace()
            + (2.0 * lambda * nf + mu * (nf * nf + 2.0 * nf - 4.0)) * s.dot(f0))
}

/// `G = ∮_{S^{n−1}}{n(C(Sẑ⊗ẑ))ẑ·F₀ẑ − (CS)ẑ·F₀ẑ} dS` by sphere quadrature.
pub fn griffith_sphere_integral(n: usize, lambda: f64, mu: f64, f0: &Mat, s: &Mat, order: usize) -> Result<f64> {
    let mat = LinearIsotropic { lambda, mu, n };
    let cs = mat.stress(s);
    integrate_surface(
        |_, z| {
            let fz = f0.mul_vec(z);
            let first = mat.stress(&Mat::outer(&s.mul_vec(z), z)).mul_vec(z);
            Ok(n as f64 * dot(&first, &fz) - dot(&cs.mul_vec(z), &fz))
        },
        &sphere_rule(n, 1.0, order)?,
    )
}

/// The discrepancy term evaluated three ways.
#[derive(Debug, Clone, PartialEq)]
pub struct Griffith {
    /// Isotropic closed form.
    pub closed_form: f64,
    /// `p²|B(0,1)|/κ`.
    pub hydrostatic: f64,
    /// `(R, ∮_{∂B(0,R)}(P₀ − σ(u_in))n·F₀z dS)` for `R ∈ {10, 20, 40}`.
    pub truncated: Vec<(f64, f64)>,
    /// Richardson extrapolation of the last two truncated values.
    pub extrapolated: f64,
}

pub fn griffith_discrepancy(scn: &VoidScenario) -> Result<Griffith> {
    let f0 = scn.f0();
    let s = scn.polarization();
    let closed_form = griffith_isotropic(scn.n, scn.lambda, scn.mu, &f0, &s);
    let hydrostatic = scn.p * scn.p * ball_volume(scn.n, 1.0) / scn.kappa();
    if (closed_form - hydrostatic).abs() > 1e-8 * hydrostatic.abs().max(1.0) {
        return Err(Error::SelfCheck(format!("closed form G {closed_form} != hydrostatic value {hydrostatic}")));
    }
    let ext = scn.exterior();
    let p0 = scn.p0();
    let mut truncated = Vec::new();
    for radius in [10.0, 20.0, 40.0] {
        let g = integrate_surface(
            |z, nu| Ok(dot(&(p0 - ext.stress(z)?).mul_vec(nu), &f0.mul_vec(z))),
            &sphere_rule(scn.n, radius, scn.order)?,
        )?;
        truncated.push((radius, g));
    }
    let (g20, g40) = (truncated[1].1, truncated[2].1);
    // leading correction decays like R^{-n}
    let ratio = 2f64.powi(scn.n as i32);
    let extrapolated = (ratio * g40 - g20) / (ratio - 1.0);
    Ok(Griffith { closed_form, hydrostatic, truncated, extrapolated })
}

/// Rice–Drucker checks: the work form equals `−ΔE` (opposite sign
/// convention), and the configurational "creation" work balances the
/// boundary energy flux. The integral over the loading parameter `s` of the
/// linear path is `∫₀¹ s ds = ½`.
pub fn rice_drucker_linear(scn: &VoidScenario, tol: f64) -> Result<(IdentityReport, IdentityReport)> {
    let ext = scn.exterior();
    let rule = scn.cavity_rule()?;
    let p0 = scn.p0();
    // traction of the remote field on ∂ω with the inward normal −ẑ
    let rd = integrate_surface(|z, nu| Ok(-0.5 * dot(&p0.mul_vec(&nu.iter().map(|c| -c).collect::<Vec<_>>()), &ext.u(z)?)), &rule)?;
    let lin = delta_e_linear(scn)?;
    let first = IdentityReport::new("Rice-Drucker work form", -rd, lin.reference, tol)
        .with_anchor("half the work of the removed tractions equals minus the energy change")
        .with_note("Rice-Drucker difference is E[y0] - E[yd], the negative of the energy change");
    let f0 = scn.f0();
    let mat = scn.material();
    let w0 = mat.energy(&f0);
    let nf = scn.n as f64;
    let lhs = integrate_surface(
        |z, nu| {
            let u = ext.u(z)?;
            let fz = f0.mul_vec(z);
            let d: Vec<f64> = u.iter().zip(&fz).map(|(a, b)| 0.5 * (a - b)).collect();
            Ok(dot(&p0.mul_vec(nu), &d))
        },
        &rule,
    )?;
    let rhs = integrate_surface(|z, nu| Ok((mat.energy(&ext.grad(z)?) - w0) * dot(nu, z) / nf), &rule)?;
    let second = IdentityReport::new("configurational creation work", lhs, rhs, tol)
        .with_anchor("work of configurational forces creating the void");
    Ok((first, second))
}

/// `∮_{S^{n−1}}{n(P₀ξ)·(Sξ) − ⟨P₀, S⟩} dS`, which vanishes for all square
/// `P₀`, `S`.
pub fn check_polar_vanishing(p0: &Mat, s: &Mat, n: usize, order: usize) -> Result<f64> {
    if p0.shape() != (n, n) || s.shape() != (n, n) {
        return Err(Error::Dimension(format!("polar check expects {n}x{n} matrices")));
    }
    let ps = p0.dot(s);
    integrate_surface(
        |_, xi| Ok(n as f64 * dot(&p0.mul_vec(xi), &s.mul_vec(xi)) - ps),
        &sphere_rule(n, 1.0, order)?,
    )
}
