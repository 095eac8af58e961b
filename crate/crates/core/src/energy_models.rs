//! Concrete energy densities covering the symmetry classes used by the
//! verifiers: quadratic (linear elastic), prestressed radial, isotropic
//! functions of singular values, power laws, body loads, semilinear scalar
//! energies, 1D dynamic potentials and the convex bar potential.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tensor_core::{dot, norm, EnergyModel, Mat, ModelFlags, Provides, SharedModel};

/// Isotropic linear elasticity `W = (λ/2)(tr ε)² + μ|ε|²`, `ε = sym F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearIsotropic {
    pub lambda: f64,
    pub mu: f64,
    pub n: usize,
}

impl LinearIsotropic {
    /// Bulk modulus `κ = λ + 2μ/n`.
    pub fn kappa(&self) -> f64 {
        self.lambda + 2.0 * self.mu / self.n as f64
    }

    /// Stress `σ = λ tr(ε) I + 2μ ε` of a displacement gradient.
    pub fn stress(&self, f: &Mat) -> Mat {
        let e = f.sym();
        Mat::identity(self.n).scale(self.lambda * e.trace()) + e.scale(2.0 * self.mu)
    }

    pub fn energy(&self, f: &Mat) -> f64 {
        let e = f.sym();
        0.5 * self.lambda * e.trace().powi(2) + self.mu * e.dot(&e)
    }
}

pub fn make_linear_isotropic(lambda: f64, mu: f64, n: usize) -> Result<LinearIsotropic> {
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidParameter(format!("dimension n = {n} not in 1..=3")));
    }
    if !(mu > 0.0) || !(n as f64 * lambda + 2.0 * mu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "non-elliptic moduli lambda = {lambda}, mu = {mu}"
        )));
    }
    Ok(LinearIsotropic { lambda, mu, n })
}

impl EnergyModel for LinearIsotropic {
    fn name(&self) -> String {
        format!("linear_isotropic(lambda={}, mu={}, n={})", self.lambda, self.mu, self.n)
    }
    fn dims(&self) -> (usize, usize) {
        (self.n, self.n)
    }
    fn flags(&self) -> ModelFlags {
        ModelFlags { scale_free: true, p_hom: Some(2.0), glin_isotropic: true, ..ModelFlags::default() }
    }
    fn provides(&self) -> Provides {
        Provides { w_f: true, w_ff: true, ..Provides::default() }
    }
    fn w(&self, _x: &[f64], _y: &[f64], f: &Mat) -> Result<f64> {
        Ok(self.energy(f))
    }
    fn w_f(&self, _x: &[f64], _y: &[f64], f: &Mat) -> Result<Mat> {
        Ok(self.stress(f))
    }
    fn w_ff(&self, _x: &[f64], _y: &[f64], _f: &Mat, g: &Mat) -> Result<Mat> {
        Ok(self.stress(g))
    }
}

/// Incompatibly prestressed medium `W(x, F) = ½|sym F − a x̂⊗x̂|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrestressedRadial {
    pub a: f64,
    pub n: usize,
}

pub fn make_prestressed_radial(a: f64, n: usize) -> Result<PrestressedRadial> {
    if !(2..=3).contains(&n) {
        return Err(Error::InvalidParameter(format!("dimension n = {n} not in 2..=3")));
    }
    if !a.is_finite() {
        return Err(Error::InvalidParameter("prestress amplitude must be finite".into()));
    }
    Ok(PrestressedRadial { a, n })
}

impl PrestressedRadial {
    fn unit(&self, x: &[f64]) -> Result<(Vec<f64>, f64)> {
        let r = norm(x);
        if r == 0.0 {
            return Err(Error::SingularPoint(x.to_vec()));
        }
        Ok((x.iter().map(|v| v / r).collect(), r))
    }

    fn mismatch(&self, x: &[f64], f: &Mat) -> Result<(Mat, Vec<f64>, f64)> {
        let (xh, r) = self.unit(x)?;
        Ok((f.sym() - Mat::outer(&xh, &xh).scale(self.a), xh, r))
    }
}

impl EnergyModel for PrestressedRadial {
    fn name(&self) -> String {
        format!("prestressed_radial(a={}, n={})", self.a, self.n)
    }
    fn dims(&self) -> (usize, usize) {
        (self.n, self.n)
    }
    fn flags(&self) -> ModelFlags {
        ModelFlags { scale_free: true, explicit_x: true, ..ModelFlags::default() }
    }
    fn provides(&self) -> Provides {
        Provides { w_f: true, w_x: true, ..Provides::default() }
    }
    fn w(&self, x: &[f64], _y: &[f64], f: &Mat) -> Result<f64> {
        let (m, _, _) = self.mismatch(x, f)?;
        Ok(0.5 * m.dot(&m))
    }
    fn w_f(&self, x: &[f64], _y: &[f64], f: &Mat) -> Result<Mat> {
        Ok(self.mismatch(x, f)?.0)
    }
    /// `W_x = −(2a/r)[M x̂ − (x̂·M x̂) x̂]` with `M = sym F − a x̂⊗x̂`.
    fn w_x(&self, x: &[f64], _y: &[f64], f: &Mat) -> Result<Vec<f64>> {
        let (m, xh, r) = self.mismatch(x, f)?;
        let mx = m.mul_vec(&xh);
        let c = dot(&xh, &mx);
        Ok(mx.iter().zip(&xh).map(|(a, b)| -2.0 * self.a / r * (a - c * b)).collect())
    }
}

/// One-variable potential used as a building block for separable
/// singular-value energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarPotential {
    /// `v²/2`.
    Quadratic,
    /// `(c/4)(v − f_a)²(v − f_b)² + δ(v − f_a)²`; `δ = 0` gives equal-depth wells.
    DoubleWell { fa: f64, fb: f64, curvature: f64, bias: f64 },
}

impl ScalarPotential {
    pub fn double_well(fa: f64, fb: f64) -> ScalarPotential {
        ScalarPotential::DoubleWell { fa, fb, curvature: 1.0, bias: 0.0 }
    }

    pub fn value(&self, v: f64) -> f64 {
        match *self {
            ScalarPotential::Quadratic => 0.5 * v * v,
            ScalarPotential::DoubleWell { fa, fb, curvature, bias } => {
                0.25 * curvature * (v - fa).powi(2) * (v - fb).powi(2) + bias * (v - fa).powi(2)
            }
        }
    }

    pub fn d1(&self, v: f64) -> f64 {
        match *self {
            ScalarPotential::Quadratic => v,
            ScalarPotential::DoubleWell { fa, fb, curvature, bias } => {
                0.5 * curvature * (v - fa) * (v - fb) * (2.0 * v - fa - fb) + 2.0 * bias * (v - fa)
            }
        }
    }

    pub fn d2(&self, v: f64) -> f64 {
        match *self {
            ScalarPotential::Quadratic => 1.0,
            ScalarPotential::DoubleWell { fa, fb, curvature, bias } => {
                0.5 * curvature
                    * ((v - fb) * (2.0 * v - fa - fb)
                        + (v - fa) * (2.0 * v - fa - fb)
                        + 2.0 * (v - fa) * (v - fb))
                    + 2.0 * bias
            }
        }
    }
}

/// Symmetric function `w(v₁, …, vₙ)` of singular values with derivatives.
pub trait SvFunction: Send + Sync {
    fn name(&self) -> String;
    fn value(&self, v: &[f64]) -> f64;
    fn grad(&self, v: &[f64]) -> Vec<f64>;
    fn hess(&self, v: &[f64]) -> Vec<Vec<f64>>;
    /// The one-variable potential when `w = Σ Φ(vᵢ)`.
    fn separable(&self) -> Option<ScalarPotential> {
        None
    }
}

/// `w(v) = Σ Φ(vᵢ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparableSv {
    pub phi: ScalarPotential,
}

impl SvFunction for SeparableSv {
    fn name(&self) -> String {
        format!("separable({:?})", self.phi)
    }
    fn value(&self, v: &[f64]) -> f64 {
        v.iter().map(|&x| self.phi.value(x)).sum()
    }
    fn grad(&self, v: &[f64]) -> Vec<f64> {
        v.iter().map(|&x| self.phi.d1(x)).collect()
    }
    fn hess(&self, v: &[f64]) -> Vec<Vec<f64>> {
        (0..v.len())
            .map(|i| (0..v.len()).map(|j| if i == j { self.phi.d2(v[i]) } else { 0.0 }).collect())
            .collect()
    }
    fn separable(&self) -> Option<ScalarPotential> {
        Some(self.phi)
    }
}

/// `w`, its first partials `w₁, w₂` and second partials `w₁₁, w₁₂` at the
/// radial point `(η′, η/r, …, η/r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialDerivs {
    pub w: f64,
    pub w1: f64,
    pub w2: f64,
    pub w11: f64,
    pub w12: f64,
}

/// Objective isotropic energy `W(F) = w(singular values of F)`.
#[derive(Clone)]
pub struct IsotropicSv {
    pub n: usize,
    pub func: Arc<dyn SvFunction>,
}

pub fn make_isotropic_sv(func: Arc<dyn SvFunction>, n: usize) -> Result<IsotropicSv> {
    if !(2..=3).contains(&n) {
        return Err(Error::InvalidParameter(format!("dimension n = {n} not in 2..=3")));
    }
    Ok(IsotropicSv { n, func })
}

/// Separable double-well energy `Σ Φ(vᵢ)` with wells at `f_a < f_b`.
pub fn make_double_well_sv(fa: f64, fb: f64, curvature: f64, bias: f64, n: usize) -> Result<IsotropicSv> {
    if !(fa < fb) || !(curvature > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "double well needs f_a < f_b and positive curvature (f_a={fa}, f_b={fb}, c={curvature})"
        )));
    }
    make_isotropic_sv(
        Arc::new(SeparableSv { phi: ScalarPotential::DoubleWell { fa, fb, curvature, bias } }),
        n,
    )
}

impl IsotropicSv {
    fn radial_point(&self, alpha: f64, beta: f64) -> Vec<f64> {
        let mut v = vec![beta; self.n];
        v[0] = alpha;
        v
    }

    /// Derivatives of `w` at `(η′, η/r, …, η/r)`.
    pub fn radial(&self, eta_prime: f64, eta_over_r: f64) -> RadialDerivs {
        let v = self.radial_point(eta_prime, eta_over_r);
        let g = self.func.grad(&v);
        let h = self.func.hess(&v);
        RadialDerivs { w: self.func.value(&v), w1: g[0], w2: g[1], w11: h[0][0], w12: h[0][1] }
    }

    /// Radial-form Piola stress `w₁ x̂⊗x̂ + w₂(I − x̂⊗x̂)`.
    pub fn radial_piola(&self, eta_prime: f64, eta_over_r: f64, xh: &[f64]) -> Mat {
        let d = self.radial(eta_prime, eta_over_r);
        let xx = Mat::outer(xh, xh);
        xx.scale(d.w1) + (Mat::identity(self.n) - xx).scale(d.w2)
    }

    fn svd(&self, f: &Mat) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
        let a = DMatrix::from_fn(self.n, self.n, |i, j| f[(i, j)]);
        let svd = a.svd(true, true);
        let u = svd.u.expect("svd computed with u");
        let vt = svd.v_t.expect("svd computed with v_t");
        (u, svd.singular_values.iter().copied().collect(), vt)
    }
}

impl EnergyModel for IsotropicSv {
    fn name(&self) -> String {
        format!("isotropic_sv({}, n={})", self.func.name(), self.n)
    }
    fn dims(&self) -> (usize, usize) {
        (self.n, self.n)
    }
    fn flags(&self) -> ModelFlags {
        ModelFlags { scale_free: true, glin_isotropic: true, ..ModelFlags::default() }
    }
    fn provides(&self) -> Provides {
        Provides { w_f: true, ..Provides::default() }
    }
    fn w(&self, _x: &[f64], _y: &[f64], f: &Mat) -> Result<f64> {
        let (_, s, _) = self.svd(f);
        Ok(self.func.value(&s))
    }
    /// `P = U diag(∂w/∂vᵢ) Vᵀ` for `F = U diag(v) Vᵀ`.
    fn w_f(&self, _x: &[f64], _y: &[f64], f: &Mat) -> Result<Mat> {
        let (u, s, vt) = self.svd(f);
        let g = self.func.grad(&s);
        Ok(Mat::from_fn(self.n, self.n, |i, j| {
            (0..self.n).map(|k| u[(i, k)] * g[k] * vt[(k, j)]).sum()
        }))
    }
}

/// `W(F) = |F|ᵖ / p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerP {
    pub p: f64,
    pub m: usize,
    pub n: usize,
}

pub fn make_power_p(p: f64, n: usize, m: usize) -> Result<PowerP> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("power p = {p} must be at least 1")));
    }
    if !(1..=4).contains(&n) || !(1..=4).contains(&m) {
        return Err(Error::InvalidParameter(format!("dimensions ({m}, {n}) out of range")));
    }
    Ok(PowerP { p, m, n })
}

impl EnergyModel for PowerP {
    fn name(&self) -> String {
        format!("power(p={}, m={}, n={})", self.p, self.m, self.n)
    }
    fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }
    fn flags(&self) -> ModelFlags {
        ModelFlags {
            scale_free: true,
            p_hom: Some(self.p),
            glin_isotropic: self.m == self.n,
            ..ModelFlags::default()
        }
    }
    fn provides(&self) -> Provides {
        Provides { w_f: true, ..Provides::default() }
    }
    fn w(&self, _x: &[f64], _y: &[f64], f: &Mat) -> Result<f64> {
        Ok(f.norm().powf(self.p) / self.p)
    }
    fn w_f(&self, _x: &[f64], _y: &[f64], f: &Mat) -> Result<Mat> {
        let r = f.norm();
        if r == 0.0 {
            return Ok(Mat::zeros(self.m, self.n));
        }
        Ok(f.scale(r.powf(self.p - 2.0)))
    }
}

/// Dirichlet energy `W(F) = (μ/2)|F|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dirichlet {
    pub mu: f64,
    pub m: usize,
    pub n: usize,
}

pub fn make_dirichlet(mu: f64, m: usize, n: usize) -> Result<Dirichlet> {
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!("modulus mu = {mu} must be positive")));
    }
    Ok(Dirichlet { mu, m, n })
}

impl EnergyModel for Dirichlet {
    fn name(&self) -> String {
        format!("dirichlet(mu={}, m={}, n={})", self.mu, self.m, self.n)
    }
    fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }
    fn flags(&self) -> ModelFlags {
        ModelFlags { scale_free: true, p_hom: Some(2.0), glin_isotropic: true, ..ModelFlags::default() }
    }
    fn provides(&self) -> Provides {
        Provides { w_f: true, w_ff: true, ..Provides::default() }
    }
    fn w(&self, _x: &[f64], _y: &[f64], f: &Mat) -> Result<f64> {
        Ok(0.5 * self.mu * f.dot(f))
    }
    fn w_f(&self, _x: &[f64], _y: &[f64], f: &Mat) -> Result<Mat> {
        Ok(f.scale(self.mu))
    }
    fn w_ff(&self, _x: &[f64], _y: &[f64], _f: &Mat, g: &Mat) -> Result<Mat> {
        Ok(g.scale(self.mu))
    }
}

/// Incompressible shear energy `W(F) = μ(|F|² − n)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearEnergy {
    pub mu: f64,
    pub n: usize,
}

impl EnergyModel for ShearEnergy {
    fn name(&self) -> String {
        format!("shear(mu={}, n={})", self.mu, self.n)
    }
    fn dims(&self) -> (usize, usize) {
        (self.n, self.n)
    }
    fn flags(&self) -> ModelFlags {
        ModelFlags { scale_free: true, glin_isotropic: true, ..ModelFlags::default() }
    }
    fn provides(&self) -> Provides {
        Provides { w_f: true, ..Provides::default() }
    }
    fn w(&self, _x: &[f64], _y: &[f64], f: &Mat) -> Result<f64> {
        Ok(0.5 * self.mu * (f.dot(f) - self.n as f64))
    }
    fn w_f(&self, _x: &[f64], _y: &[f64], f: &Mat) -> Result<Mat> {
        Ok(f.scale(self.mu))
    }
}

/// Scalar energy with a uniform body load, `W(x, y, F) = ½F² − b y` (`m = n = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyLoad1D {
    pub b: f64,
}

impl EnergyModel for BodyLoad1D {
    fn name(&self) -> String {
        format!("body_load_1d(b={})", self.b)
    }
    fn dims(&self) -> (usize, usize) {
        (1, 1)
    }
    fn flags(&self) -> ModelFlags {
        ModelFlags { explicit_y: true, ..ModelFlags::default() }
    }
    fn provides(&self) -> Provides {
        Provides { w_f: true, w_y: true, ..Provides::default() }
    }
    fn w(&self, _x: &[f64], y: &[f64], f: &Mat) -> Result<f64> {
        Ok(0.5 * f[(0, 0)].powi(2) - self.b * y[0])
    }
    fn w_f(&self, _x: &[f64], _y: &[f64], f: &Mat) -> Result<Mat> {
        Ok(*f)
    }
    fn w_y(&self, _x: &[f64], _y: &[f64], _f: &Mat) -> Result<Vec<f64>> {
        Ok(vec![-self.b])
    }
}

/// Semilinear scalar energy `W(y, F) = ½|F|² − |y|^{q+1}/(q+1)` (`m = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Semilinear {
    pub q: f64,
    pub n: usize,
}

impl Semilinear {
    /// `Φ(u) = |u|^{q+1}/(q+1)`.
    pub fn phi(&self, u: f64) -> f64 {
        u.abs().powf(self.q + 1.0) / (self.q + 1.0)
    }

    /// `Φ′(u) = |u|^{q−1} u`.
    pub fn phi_prime(&self, u: f64) -> f64 {
        u.abs().powf(self.q - 1.0) * u
    }
}

impl EnergyModel for Semilinear {
    fn name(&self) -> String {
        format!("semilinear(q={}, n={})", self.q, self.n)
    }
    fn dims(&self) -> (usize, usize) {
        (1, self.n)
    }
    fn flags(&self) -> ModelFlags {
        ModelFlags { explicit_y: true, ..ModelFlags::default() }
    }
    fn provides(&self) -> Provides {
        Provides { w_f: true, w_y: true, ..Provides::default() }
    }
    fn w(&self, _x: &[f64], y: &[f64], f: &Mat) -> Result<f64> {
        Ok(0.5 * f.dot(f) - self.phi(y[0]))
    }
    fn w_f(&self, _x: &[f64], _y: &[f64], f: &Mat) -> Result<Mat> {
        Ok(*f)
    }
    fn w_y(&self, _x: &[f64], y: &[f64], _f: &Mat) -> Result<Vec<f64>> {
        Ok(vec![-self.phi_prime(y[0])])
    }
}

/// 1D elastodynamic potential `U(F) = c₂F²/2 + c₄F⁴/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicPotential {
    pub c2: f64,
    pub c4: f64,
}

pub fn make_dynamic_potential(c2: f64, c4: f64) -> Result<DynamicPotential> {
    if !(c2 > 0.0) || !(c4 >= 0.0) {
        return Err(Error::InvalidParameter(format!("need c2 > 0, c4 >= 0 (c2={c2}, c4={c4})")));
    }
    Ok(DynamicPotential { c2, c4 })
}

impl DynamicPotential {
    pub fn u(&self, f: f64) -> f64 {
        0.5 * self.c2 * f * f + 0.25 * self.c4 * f.powi(4)
    }

    /// `P(F) = U′(F)`.
    pub fn p(&self, f: f64) -> f64 {
        self.c2 * f + self.c4 * f.powi(3)
    }

    pub fn dp(&self, f: f64) -> f64 {
        self.c2 + 3.0 * self.c4 * f * f
    }

    /// Characteristic speed `c(F) = √P′(F)`.
    pub fn wave_speed(&self, f: f64) -> f64 {
        self.dp(f).sqrt()
    }
}

/// Space-time Lagrangian `L(ℱ) = v²/2 − U(F)` with `ℱ = [v, F]` (1×2) over
/// `q = (t, x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeLagrangian {
    pub potential: DynamicPotential,
}

impl EnergyModel for SpaceTimeLagrangian {
    fn name(&self) -> String {
        format!("spacetime(c2={}, c4={})", self.potential.c2, self.potential.c4)
    }
    fn dims(&self) -> (usize, usize) {
        (1, 2)
    }
    fn flags(&self) -> ModelFlags {
        ModelFlags { scale_free: true, ..ModelFlags::default() }
    }
    fn provides(&self) -> Provides {
        Provides { w_f: true, ..Provides::default() }
    }
    fn w(&self, _q: &[f64], _y: &[f64], f: &Mat) -> Result<f64> {
        Ok(0.5 * f[(0, 0)].powi(2) - self.potential.u(f[(0, 1)]))
    }
    fn w_f(&self, _q: &[f64], _y: &[f64], f: &Mat) -> Result<Mat> {
        Ok(Mat::from_rows(&[&[f[(0, 0)], -self.potential.p(f[(0, 1)])]]))
    }
}

/// Even, strictly convex bar energy `W(ε) = W₀ cosh(kε)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarPotential {
    pub w0: f64,
    pub k: f64,
}

pub fn make_bar_potential(w0: f64, k: f64) -> Result<BarPotential> {
    if !(w0 > 0.0) || !(k > 0.0) {
        return Err(Error::InvalidParameter(format!("need W0 > 0, k > 0 (W0={w0}, k={k})")));
    }
    Ok(BarPotential { w0, k })
}

impl BarPotential {
    pub fn w(&self, e: f64) -> f64 {
        self.w0 * (self.k * e).cosh()
    }

    pub fn p(&self, e: f64) -> f64 {
        self.w0 * self.k * (self.k * e).sinh()
    }

    pub fn dp(&self, e: f64) -> f64 {
        self.w0 * self.k * self.k * (self.k * e).cosh()
    }

    /// `P*(ε) = W(ε) − εW′(ε)`.
    pub fn pstar(&self, e: f64) -> f64 {
        self.w(e) - e * self.p(e)
    }
}

/// Named model with a parameter map, used by configuration files.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelSpec {
    pub name: String,
    pub params: BTreeMap<String, f64>,
}

impl ModelSpec {
    pub fn new(name: &str) -> ModelSpec {
        ModelSpec { name: name.to_string(), params: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: f64) -> ModelSpec {
        self.params.insert(key.to_string(), value);
        self
    }

    fn get(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    fn dim(&self, key: &str, default: usize) -> Result<usize> {
        let v = self.get(key, default as f64);
        if v.fract() != 0.0 || !(1.0..=4.0).contains(&v) {
            return Err(Error::InvalidParameter(format!("{key} = {v} is not a dimension")));
        }
        Ok(v as usize)
    }

    /// Bulk modulus for linear isotropic specs.
    pub fn kappa(&self) -> Option<f64> {
        (self.name == "linear_isotropic").then(|| {
            self.get("lambda", 1.0) + 2.0 * self.get("mu", 1.0) / self.get("n", 3.0)
        })
    }

    pub fn build(&self) -> Result<SharedModel> {
        Ok(match self.name.as_str() {
            "linear_isotropic" => {
                Arc::new(make_linear_isotropic(self.get("lambda", 1.0), self.get("mu", 1.0), self.dim("n", 3)?)?)
            }
            "prestressed_radial" => Arc::new(make_prestressed_radial(self.get("a", 1.0), self.dim("n", 3)?)?),
            "double_well_sv" => Arc::new(make_double_well_sv(
                self.get("fa", 1.0),
                self.get("fb", 2.0),
                self.get("curvature", 1.0),
                self.get("bias", 0.0),
                self.dim("n", 3)?,
            )?),
            "quadratic_sv" => Arc::new(make_isotropic_sv(
                Arc::new(SeparableSv { phi: ScalarPotential::Quadratic }),
                self.dim("n", 3)?,
            )?),
            "power_p" => Arc::new(make_power_p(self.get("p", 2.0), self.dim("n", 2)?, self.dim("m", 2)?)?),
            "dirichlet" => Arc::new(make_dirichlet(self.get("mu", 1.0), self.dim("m", 1)?, self.dim("n", 2)?)?),
            other => return Err(Error::InvalidParameter(format!("unknown model '{other}'"))),
        })
    }
}
