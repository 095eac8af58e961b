//! Small-matrix algebra and the stress objects built from an energy density
//! `W(x, y, F)`: Piola stress, Eshelby tensor, Weierstrass excess,
//! Euler–Lagrange residuals, interface jump `p*`, and the extended
//! (parametric) Lagrangian.

mod mat;

use std::sync::Arc;

use rand::Rng;

pub use mat::{add, cross2, cross3, dot, max_abs, norm, normalized, scale, sub, unit, Mat, MAX_DIM};

use crate::error::{Error, Result};
use crate::fields_domains::DeformationField;

/// Relative step for first-derivative finite differences.
pub const FD_REL_STEP: f64 = 1e-6;
/// Default step for residuals that differentiate a stress field.
pub const FD_RESIDUAL_STEP: f64 = 1e-4;

/// Symmetry flags carried by an energy density.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ModelFlags {
    /// `W(λx, λy, F) = W(x, y, F)` for all `λ > 0`.
    pub scale_free: bool,
    /// `W(x, λy, λF) = λᵖ W(x, y, F)`.
    pub p_hom: Option<f64>,
    /// `W(z, F A) = W(z, F) det A`.
    pub parametric: bool,
    /// Invariant under simultaneous rotation of `x` and `y`.
    pub glin_isotropic: bool,
    /// `W` depends on `x` explicitly.
    pub explicit_x: bool,
    /// `W` depends on `y` explicitly.
    pub explicit_y: bool,
}

/// Which analytic evaluators a model supplies.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Provides {
    pub w_f: bool,
    pub w_x: bool,
    pub w_y: bool,
    pub w_ff: bool,
}

/// An energy density `W(x, y, F)` with `x ∈ ℝⁿ`, `y ∈ ℝᵐ`, `F ∈ ℝ^{m×n}`.
pub trait EnergyModel: Send + Sync {
    fn name(&self) -> String;

    /// `(m, n)`: target and reference dimensions.
    fn dims(&self) -> (usize, usize);

    fn flags(&self) -> ModelFlags;

    fn provides(&self) -> Provides {
        Provides::default()
    }

    fn w(&self, x: &[f64], y: &[f64], f: &Mat) -> Result<f64>;

    fn w_f(&self, _x: &[f64], _y: &[f64], _f: &Mat) -> Result<Mat> {
        Err(Error::MissingEvaluator("W_F"))
    }

    fn w_x(&self, _x: &[f64], _y: &[f64], _f: &Mat) -> Result<Vec<f64>> {
        Err(Error::MissingEvaluator("W_x"))
    }

    fn w_y(&self, _x: &[f64], _y: &[f64], _f: &Mat) -> Result<Vec<f64>> {
        Err(Error::MissingEvaluator("W_y"))
    }

    /// Second derivative `W_FF(F)[G]`.
    fn w_ff(&self, _x: &[f64], _y: &[f64], _f: &Mat, _g: &Mat) -> Result<Mat> {
        Err(Error::MissingEvaluator("W_FF"))
    }
}

pub type SharedModel = Arc<dyn EnergyModel>;

fn check_args(model: &dyn EnergyModel, x: &[f64], y: &[f64], f: &Mat) -> Result<()> {
    let (m, n) = model.dims();
    if f.shape() != (m, n) || x.len() != n || y.len() != m {
        return Err(Error::Dimension(format!(
            "model {} expects x∈R^{n}, y∈R^{m}, F {m}x{n}; got x∈R^{}, y∈R^{}, F {}x{}",
            model.name(),
            x.len(),
            y.len(),
            f.rows(),
            f.cols()
        )));
    }
    Ok(())
}

/// Central-difference gradient of `W` with respect to `F`.
pub fn fd_piola(model: &dyn EnergyModel, x: &[f64], y: &[f64], f: &Mat) -> Result<Mat> {
    check_args(model, x, y, f)?;
    let h = FD_REL_STEP * (1.0 + f.norm());
    let mut p = Mat::zeros(f.rows(), f.cols());
    for i in 0..f.rows() {
        for j in 0..f.cols() {
            let mut fp = *f;
            let mut fm = *f;
            fp[(i, j)] += h;
            fm[(i, j)] -= h;
            p[(i, j)] = (model.w(x, y, &fp)? - model.w(x, y, &fm)?) / (2.0 * h);
        }
    }
    Ok(p)
}

/// Piola stress `P = W_F(x, y, F)`; analytic when supplied, otherwise central
/// differences with step `1e-6·(1+|F|)`.
pub fn piola(model: &dyn EnergyModel, x: &[f64], y: &[f64], f: &Mat) -> Result<Mat> {
    check_args(model, x, y, f)?;
    if model.provides().w_f {
        model.w_f(x, y, f)
    } else {
        fd_piola(model, x, y, f)
    }
}

/// Eshelby tensor `P* = W Iₙ − Fᵀ P`.
pub fn eshelby(model: &dyn EnergyModel, x: &[f64], y: &[f64], f: &Mat) -> Result<Mat> {
    let w = model.w(x, y, f)?;
    let p = piola(model, x, y, f)?;
    Ok(eshelby_from(w, f, &p))
}

/// Assembles `W I − Fᵀ P` from already evaluated pieces.
pub fn eshelby_from(w: f64, f: &Mat, p: &Mat) -> Mat {
    Mat::identity(f.cols()).scale(w) - f.transpose().matmul(p)
}

/// Weierstrass excess `ℰ(F, G) = W(G) − W(F) − ⟨W_F(F), G − F⟩`.
pub fn excess(model: &dyn EnergyModel, x: &[f64], y: &[f64], f: &Mat, g: &Mat) -> Result<f64> {
    if f.shape() != g.shape() {
        return Err(Error::Dimension("excess: F and G differ in shape".into()));
    }
    let p = piola(model, x, y, f)?;
    Ok(model.w(x, y, g)? - model.w(x, y, f)? - p.dot(&(*g - *f)))
}

/// `W_x`: zero when `W` has no explicit `x` dependence, analytic otherwise.
pub fn explicit_grad_x(model: &dyn EnergyModel, x: &[f64], y: &[f64], f: &Mat) -> Result<Vec<f64>> {
    if !model.flags().explicit_x {
        return Ok(vec![0.0; x.len()]);
    }
    if !model.provides().w_x {
        return Err(Error::MissingEvaluator("W_x"));
    }
    model.w_x(x, y, f)
}

/// `W_y`: zero when `W` has no explicit `y` dependence, analytic otherwise.
pub fn explicit_grad_y(model: &dyn EnergyModel, x: &[f64], y: &[f64], f: &Mat) -> Result<Vec<f64>> {
    if !model.flags().explicit_y {
        return Ok(vec![0.0; y.len()]);
    }
    if !model.provides().w_y {
        return Err(Error::MissingEvaluator("W_y"));
    }
    model.w_y(x, y, f)
}

/// Piola and Eshelby tensors of `field` at `x`.
pub fn stresses_at(model: &dyn EnergyModel, field: &DeformationField, x: &[f64]) -> Result<(Mat, Mat)> {
    let y = field.y(x);
    let f = field.grad(x);
    let w = model.w(x, &y, &f)?;
    let p = piola(model, x, &y, &f)?;
    let ps = eshelby_from(w, &f, &p);
    Ok((p, ps))
}

/// Euler–Lagrange residuals `(𝔈_W, 𝔈*_W) = (W_y − div P, W_x − div P*)` of
/// `field` at `x`, with divergences by central differences of step `h`.
pub fn euler_residuals(
    model: &dyn EnergyModel,
    field: &DeformationField,
    x: &[f64],
    h: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (m, n) = model.dims();
    if field.dims() != (m, n) || x.len() != n {
        return Err(Error::Dimension("euler_residuals: field/model mismatch".into()));
    }
    field.check_regular(x, 2.0 * h)?;
    let mut div_p = vec![0.0; m];
    let mut div_ps = vec![0.0; n];
    for j in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        let (pp, psp) = stresses_at(model, field, &xp)?;
        let (pm, psm) = stresses_at(model, field, &xm)?;
        for i in 0..m {
            div_p[i] += (pp[(i, j)] - pm[(i, j)]) / (2.0 * h);
        }
        for i in 0..n {
            div_ps[i] += (psp[(i, j)] - psm[(i, j)]) / (2.0 * h);
        }
    }
    let y = field.y(x);
    let f = field.grad(x);
    let wy = explicit_grad_y(model, x, &y, &f)?;
    let wx = explicit_grad_x(model, x, &y, &f)?;
    Ok((sub(&wy, &div_p), sub(&wx, &div_ps)))
}

/// The vector `𝔈*_W + Fᵀ 𝔈_W`, which vanishes identically for smooth fields.
pub fn noether_defect(
    model: &dyn EnergyModel,
    field: &DeformationField,
    x: &[f64],
    h: f64,
) -> Result<Vec<f64>> {
    let (e, es) = euler_residuals(model, field, x, h)?;
    let f = field.grad(x);
    Ok(add(&es, &f.tr_mul_vec(&e)))
}

/// Noether defect at steps `h`, `h/2`, `h/4` with Richardson extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct RichardsonCheck {
    pub steps: [f64; 3],
    /// Max-norm of the defect at each step.
    pub defects: [f64; 3],
    /// Max-norm of the extrapolated defects `(4D(h/2) − D(h))/3` and
    /// `(4D(h/4) − D(h/2))/3`.
    pub extrapolated: [f64; 2],
}

impl RichardsonCheck {
    /// Observed convergence ratios `D(h)/D(h/2)` and `D(h/2)/D(h/4)`.
    pub fn ratios(&self) -> [f64; 2] {
        [self.defects[0] / self.defects[1], self.defects[1] / self.defects[2]]
    }
}

pub fn noether_richardson(
    model: &dyn EnergyModel,
    field: &DeformationField,
    x: &[f64],
    h: f64,
) -> Result<RichardsonCheck> {
    let steps = [h, h / 2.0, h / 4.0];
    let d0 = noether_defect(model, field, x, steps[0])?;
    let d1 = noether_defect(model, field, x, steps[1])?;
    let d2 = noether_defect(model, field, x, steps[2])?;
    let r = |a: &[f64], b: &[f64]| -> f64 {
        max_abs(&a.iter().zip(b).map(|(fine, coarse)| (4.0 * fine - coarse) / 3.0).collect::<Vec<_>>())
    };
    Ok(RichardsonCheck {
        steps,
        defects: [max_abs(&d0), max_abs(&d1), max_abs(&d2)],
        extrapolated: [r(&d1, &d0), r(&d2, &d1)],
    })
}

/// Tolerance for the rank-one and traction checks in [`jump_pstar`].
pub const JUMP_TOL: f64 = 1e-10;

/// Configurational jump `p*_Σ = ⟦W⟧ − ⟨P₋, ⟦F⟧⟩` across a surface with unit
/// normal `normal` pointing from the `−` side to the `+` side.
///
/// Requires `⟦F⟧ = a ⊗ n` and `⟦P⟧n = 0`; both sides of the formula are
/// evaluated and must agree.
pub fn jump_pstar(
    model: &dyn EnergyModel,
    x: &[f64],
    y: &[f64],
    f_minus: &Mat,
    f_plus: &Mat,
    normal: &[f64],
) -> Result<f64> {
    check_args(model, x, y, f_minus)?;
    check_args(model, x, y, f_plus)?;
    let jf = *f_plus - *f_minus;
    let a = jf.mul_vec(normal);
    let rank1 = (jf - Mat::outer(&a, normal)).max_abs();
    let fscale = 1.0_f64.max(f_minus.max_abs()).max(f_plus.max_abs());
    if rank1 > JUMP_TOL * fscale {
        return Err(Error::Hadamard(rank1));
    }
    let pm = piola(model, x, y, f_minus)?;
    let pp = piola(model, x, y, f_plus)?;
    let traction = max_abs(&(pp - pm).mul_vec(normal));
    let pscale = 1.0_f64.max(pm.max_abs()).max(pp.max_abs());
    if traction > JUMP_TOL * pscale {
        return Err(Error::TractionJump(traction));
    }
    let jw = model.w(x, y, f_plus)? - model.w(x, y, f_minus)?;
    let p_minus = jw - pm.dot(&jf);
    let p_plus = jw - pp.dot(&jf);
    if (p_minus - p_plus).abs() > JUMP_TOL * pscale.max(jw.abs()) {
        return Err(Error::PstarSides((p_minus - p_plus).abs()));
    }
    Ok(p_minus)
}

/// `(P*n)·τ + (Pn)·(Fτ)`; equals `W (n·τ)`, hence zero for `τ ⊥ n`.
pub fn check_graph_orthogonality(
    model: &dyn EnergyModel,
    x: &[f64],
    y: &[f64],
    f: &Mat,
    normal: &[f64],
    tangent: &[f64],
) -> Result<f64> {
    let p = piola(model, x, y, f)?;
    let ps = eshelby_from(model.w(x, y, f)?, f, &p);
    Ok(dot(&ps.mul_vec(normal), tangent) + dot(&p.mul_vec(normal), &f.mul_vec(tangent)))
}

fn split_extended(model: &dyn EnergyModel, z: &[f64], fhat: &Mat) -> Result<(Vec<f64>, Vec<f64>, Mat, Mat)> {
    let (m, n) = model.dims();
    if z.len() != n + m || fhat.shape() != (n + m, n) {
        return Err(Error::Dimension(format!(
            "extended Lagrangian expects z∈R^{} and a {}x{n} gradient",
            n + m,
            n + m
        )));
    }
    let f1 = fhat.block(0, 0, n, n);
    let f2 = fhat.block(n, 0, m, n);
    let f1_inv = f1.inverse()?;
    let f = f2.matmul(&f1_inv);
    Ok((z[..n].to_vec(), z[n..].to_vec(), f1, f))
}

/// Extended Lagrangian `𝒲(z, ℱ) = W(x, y, F₂F₁⁻¹) det F₁` for `z = (x, y)`,
/// `ℱ = [F₁; F₂]`.
pub fn extended_w(model: &dyn EnergyModel, z: &[f64], fhat: &Mat) -> Result<f64> {
    let (x, y, f1, f) = split_extended(model, z, fhat)?;
    Ok(model.w(&x, &y, &f)? * f1.det())
}

/// Piola stress of the extended Lagrangian, `[P* cof F₁; P cof F₁]`.
pub fn extended_piola(model: &dyn EnergyModel, z: &[f64], fhat: &Mat) -> Result<Mat> {
    let (x, y, f1, f) = split_extended(model, z, fhat)?;
    let p = piola(model, &x, &y, &f)?;
    let ps = eshelby_from(model.w(&x, &y, &f)?, &f, &p);
    let c = f1.cof();
    Mat::vstack(&ps.matmul(&c), &p.matmul(&c))
}

/// Max-norm of the extended Eshelby tensor `𝒲 I − ℱᵀ𝒫`.
pub fn extended_eshelby_residual(model: &dyn EnergyModel, z: &[f64], fhat: &Mat) -> Result<f64> {
    let w = extended_w(model, z, fhat)?;
    let p = extended_piola(model, z, fhat)?;
    Ok(eshelby_from(w, fhat, &p).max_abs())
}

/// Relative defect of `𝒲(z, ℱQ) = 𝒲(z, ℱ) det Q`.
pub fn qhom_residual(model: &dyn EnergyModel, z: &[f64], fhat: &Mat, q: &Mat) -> Result<f64> {
    let lhs = extended_w(model, z, &fhat.matmul(q))?;
    let rhs = extended_w(model, z, fhat)? * q.det();
    Ok((lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE))
}

/// The extended Lagrangian as an [`EnergyModel`] on `ℝ^{(m+n)×n}`. Its
/// reference variable is the parameter `t ∈ ℝⁿ` and its target is `z = (x, y)`.
pub struct ExtendedModel {
    base: SharedModel,
}

impl ExtendedModel {
    pub fn new(base: SharedModel) -> Result<ExtendedModel> {
        let (m, n) = base.dims();
        if m + n > MAX_DIM {
            return Err(Error::Dimension(format!("extended space R^{} exceeds 4", m + n)));
        }
        Ok(ExtendedModel { base })
    }
}

impl EnergyModel for ExtendedModel {
    fn name(&self) -> String {
        format!("extended({})", self.base.name())
    }

    fn dims(&self) -> (usize, usize) {
        let (m, n) = self.base.dims();
        (m + n, n)
    }

    fn flags(&self) -> ModelFlags {
        let b = self.base.flags();
        let (_, n) = self.base.dims();
        ModelFlags {
            scale_free: b.scale_free,
            p_hom: if b.scale_free { Some(n as f64) } else { None },
            parametric: true,
            glin_isotropic: false,
            explicit_x: false,
            explicit_y: b.explicit_x || b.explicit_y,
        }
    }

    fn provides(&self) -> Provides {
        Provides { w_f: true, ..Provides::default() }
    }

    fn w(&self, _t: &[f64], z: &[f64], fhat: &Mat) -> Result<f64> {
        extended_w(self.base.as_ref(), z, fhat)
    }

    fn w_f(&self, _t: &[f64], z: &[f64], fhat: &Mat) -> Result<Mat> {
        extended_piola(self.base.as_ref(), z, fhat)
    }
}

/// Worst observed violations of a model's declared symmetry flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlagCheck {
    pub p_hom: Option<f64>,
    pub scale_free: Option<f64>,
    pub parametric: Option<f64>,
    /// Euler relation `⟨W_F, F⟩ + W_y·y = pW` (p-homogeneous models).
    pub euler_relation: Option<f64>,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn random_matrix<R: Rng>(rng: &mut R, m: usize, n: usize, shift: f64) -> Mat {
    Mat::from_fn(m, n, |i, j| rng.random_range(-0.5..0.5) + if i == j { shift } else { 0.0 })
}

/// Samples `count` random points and measures each declared flag invariant.
/// `x` samples avoid the origin.
pub fn check_flags<R: Rng>(model: &dyn EnergyModel, rng: &mut R, count: usize) -> Result<FlagCheck> {
    let (m, n) = model.dims();
    let flags = model.flags();
    let mut out = FlagCheck::default();
    for _ in 0..count {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..1.5)).collect();
        let y: Vec<f64> = (0..m).map(|_| rng.random_range(0.3..1.5)).collect();
        let f = random_matrix(rng, m, n, 1.0);
        let w0 = model.w(&x, &y, &f)?;
        if let Some(p) = flags.p_hom {
            for lam in [0.5, 2.0, 3.0] {
                let e = rel(model.w(&x, &scale(lam, &y), &f.scale(lam))?, lam.powf(p) * w0);
                out.p_hom = Some(out.p_hom.unwrap_or(0.0).max(e));
            }
            let pk = piola(model, &x, &y, &f)?;
            let wy = explicit_grad_y(model, &x, &y, &f)?;
            let e = rel(pk.dot(&f) + dot(&wy, &y), p * w0);
            out.euler_relation = Some(out.euler_relation.unwrap_or(0.0).max(e));
        }
        if flags.scale_free {
            for lam in [0.5, 2.0, 3.0] {
                let e = rel(model.w(&scale(lam, &x), &scale(lam, &y), &f)?, w0);
                out.scale_free = Some(out.scale_free.unwrap_or(0.0).max(e));
            }
        }
        if flags.parametric && m >= n {
            let a = random_matrix(rng, n, n, 1.5);
            if a.det() > 0.0 {
                let e = rel(model.w(&x, &y, &f.matmul(&a))?, w0 * a.det());
                out.parametric = Some(out.parametric.unwrap_or(0.0).max(e));
            }
        }
    }
    Ok(out)
}
