//! Deformation fields, integration domains and deterministic quadrature.
//!
//! Every rule stores its nodes in a fixed documented order and
//! [`integrate`] sums them in that order with Neumaier compensation, so a
//! given rule and integrand always produce the same bits.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tensor_core::{dot, norm, normalized, sub, Mat};

pub type VecFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type MatFn = Arc<dyn Fn(&[f64]) -> Mat + Send + Sync>;

/// A closed surface (or hyperplane) across which `∇y` may jump.
#[derive(Debug, Clone, PartialEq)]
pub enum JumpSurface {
    /// `|x − center| = radius`; the `−` side is the inside.
    Sphere { center: Vec<f64>, radius: f64 },
    /// `(x − point)·normal = 0`; the `−` side is where the product is negative.
    Plane { point: Vec<f64>, normal: Vec<f64> },
}

impl JumpSurface {
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        match self {
            JumpSurface::Sphere { center, radius } => norm(&sub(x, center)) - radius,
            JumpSurface::Plane { point, normal } => dot(&sub(x, point), normal) / norm(normal),
        }
    }

    /// Unit normal pointing from the `−` side to the `+` side.
    pub fn normal_at(&self, x: &[f64]) -> Vec<f64> {
        match self {
            JumpSurface::Sphere { center, .. } => normalized(&sub(x, center)),
            JumpSurface::Plane { normal, .. } => normalized(normal),
        }
    }
}

#[derive(Clone)]
struct Smooth {
    y: VecFn,
    grad: MatFn,
}

#[derive(Clone)]
struct Jump {
    surface: JumpSurface,
    minus: Smooth,
    plus: Smooth,
}

/// A map `y: ℝⁿ → ℝᵐ` with its gradient, optionally piecewise smooth across
/// one [`JumpSurface`], with declared singular points.
#[derive(Clone)]
pub struct DeformationField {
    m: usize,
    n: usize,
    body: Smooth,
    jump: Option<Jump>,
    singular: Vec<Vec<f64>>,
}

impl fmt::Debug for DeformationField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DeformationField")
            .field("m", &self.m)
            .field("n", &self.n)
            .field("jump", &self.jump.as_ref().map(|j| &j.surface))
            .field("singular", &self.singular)
            .finish()
    }
}

impl DeformationField {
    /// Smooth field from closures for `y` and `∇y`.
    pub fn smooth(
        m: usize,
        n: usize,
        y: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        grad: impl Fn(&[f64]) -> Mat + Send + Sync + 'static,
    ) -> DeformationField {
        DeformationField {
            m,
            n,
            body: Smooth { y: Arc::new(y), grad: Arc::new(grad) },
            jump: None,
            singular: Vec::new(),
        }
    }

    /// Affine field `y = F₀x + c`.
    pub fn affine(f0: Mat, c: Vec<f64>) -> DeformationField {
        let (m, n) = f0.shape();
        DeformationField::smooth(
            m,
            n,
            move |x| f0.mul_vec(x).iter().zip(&c).map(|(a, b)| a + b).collect(),
            move |_| f0,
        )
    }

    /// Piecewise field equal to `minus` on the `−` side of `surface` and to
    /// `plus` on the `+` side. Points on the surface belong to the `−` side.
    pub fn composite(surface: JumpSurface, minus: DeformationField, plus: DeformationField) -> Result<DeformationField> {
        if minus.dims() != plus.dims() {
            return Err(Error::Dimension("composite field: sides have different shapes".into()));
        }
        if minus.jump.is_some() || plus.jump.is_some() {
            return Err(Error::Unsupported("nested jump surfaces".into()));
        }
        let mut singular = minus.singular.clone();
        singular.extend(plus.singular.iter().cloned());
        Ok(DeformationField {
            m: minus.m,
            n: minus.n,
            body: minus.body.clone(),
            jump: Some(Jump { surface, minus: minus.body, plus: plus.body }),
            singular,
        })
    }

    /// Declares a point where the field (or a model on it) is not regular.
    pub fn with_singular_point(mut self, x: Vec<f64>) -> DeformationField {
        self.singular.push(x);
        self
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn singular_points(&self) -> &[Vec<f64>] {
        &self.singular
    }

    pub fn jump_surface(&self) -> Option<&JumpSurface> {
        self.jump.as_ref().map(|j| &j.surface)
    }

    fn side(&self, x: &[f64]) -> &Smooth {
        match &self.jump {
            Some(j) if j.surface.signed_distance(x) > 0.0 => &j.plus,
            Some(j) => &j.minus,
            None => &self.body,
        }
    }

    pub fn y(&self, x: &[f64]) -> Vec<f64> {
        (self.side(x).y)(x)
    }

    pub fn grad(&self, x: &[f64]) -> Mat {
        (self.side(x).grad)(x)
    }

    /// One-sided gradients `(F₋, F₊)` evaluated at `x`, for points on the
    /// jump surface.
    pub fn traces(&self, x: &[f64]) -> Option<(Mat, Mat)> {
        self.jump.as_ref().map(|j| ((j.minus.grad)(x), (j.plus.grad)(x)))
    }

    /// Hadamard vector `a = ⟦F⟧ n` at a surface point.
    pub fn hadamard_vector(&self, x: &[f64]) -> Option<Vec<f64>> {
        let j = self.jump.as_ref()?;
        let (fm, fp) = self.traces(x)?;
        Some((fp - fm).mul_vec(&j.surface.normal_at(x)))
    }

    pub fn distance_to_jump(&self, x: &[f64]) -> Option<f64> {
        self.jump.as_ref().map(|j| j.surface.signed_distance(x).abs())
    }

    /// Errors when `x` is within `radius` of the jump surface or of a declared
    /// singular point.
    pub fn check_regular(&self, x: &[f64], radius: f64) -> Result<()> {
        if let Some(d) = self.distance_to_jump(x) {
            if d < radius {
                return Err(Error::NearJump { point: x.to_vec(), dist: d });
            }
        }
        for s in &self.singular {
            if norm(&sub(x, s)) < radius {
                return Err(Error::SingularPoint(s.clone()));
            }
        }
        Ok(())
    }

    /// Relative discrepancy between `grad(x)` and central differences of `y`.
    pub fn grad_consistency(&self, x: &[f64], h: f64) -> f64 {
        let g = self.grad(x);
        let mut fd = Mat::zeros(self.m, self.n);
        for j in 0..self.n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[j] += h;
            xm[j] -= h;
            let (yp, ym) = (self.y(&xp), self.y(&xm));
            for i in 0..self.m {
                fd[(i, j)] = (yp[i] - ym[i]) / (2.0 * h);
            }
        }
        (fd - g).max_abs() / g.max_abs().max(1.0)
    }
}

/// Integration domains. Boundary normals point out of the enclosed region.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Ball { n: usize, radius: f64, center: Vec<f64> },
    /// Centered at the origin.
    Annulus { n: usize, r_in: f64, r_out: f64 },
    Interval { a: f64, b: f64 },
    Circle2D { radius: f64, center: [f64; 2] },
}

impl Domain {
    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidParameter(s));
        match self {
            Domain::Ball { n, radius, center } => {
                if !(*radius > 0.0) {
                    return bad(format!("ball radius {radius} must be positive"));
                }
                if center.len() != *n {
                    return bad("ball center has wrong dimension".into());
                }
            }
            Domain::Annulus { r_in, r_out, .. } => {
                if !(*r_in >= 0.0 && r_in < r_out) {
                    return bad(format!("annulus needs 0 <= r_in < r_out (got {r_in}, {r_out})"));
                }
            }
            Domain::Interval { a, b } => {
                if !(a < b) {
                    return bad(format!("interval needs a < b (got {a}, {b})"));
                }
            }
            Domain::Circle2D { radius, .. } => {
                if !(*radius > 0.0) {
                    return bad(format!("circle radius {radius} must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Volume rule for balls and annuli, path rule for circles, line rule for
    /// intervals.
    pub fn rule(&self, order: usize) -> Result<QuadratureRule> {
        self.validate()?;
        match self {
            Domain::Ball { n, radius, center } => Ok(ball_rule(*n, *radius, order)?.translated(center)),
            Domain::Annulus { n, r_in, r_out } => annulus_rule(*n, *r_in, *r_out, order, order),
            Domain::Interval { a, b } => interval_rule(*a, *b, order),
            Domain::Circle2D { radius, center } => Ok(sphere_rule(2, *radius, order)?.translated(center)),
        }
    }

    /// Boundary rule with outward normals.
    pub fn boundary_rule(&self, order: usize) -> Result<QuadratureRule> {
        self.validate()?;
        match self {
            Domain::Ball { n, radius, center } => Ok(sphere_rule(*n, *radius, order)?.translated(center)),
            Domain::Annulus { n, r_in, r_out } => {
                let outer = sphere_rule(*n, *r_out, order)?;
                let mut inner = sphere_rule(*n, *r_in, order)?;
                for nu in inner.normals.iter_mut().flatten() {
                    nu.iter_mut().for_each(|c| *c = -*c);
                }
                Ok(outer.concat(inner))
            }
            Domain::Interval { a, b } => Ok(QuadratureRule {
                nodes: vec![vec![*a], vec![*b]],
                weights: vec![1.0, 1.0],
                normals: Some(vec![vec![-1.0], vec![1.0]]),
                target: Target::Surface,
                order: 1,
                measure: 2.0,
            }),
            Domain::Circle2D { .. } => Err(Error::Unsupported("boundary of a closed path".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Surface,
    Volume,
    Path,
}

/// Nodes, weights and (for surfaces) outward unit normals.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub normals: Option<Vec<Vec<f64>>>,
    pub target: Target,
    /// Declared order (node count along the primary direction).
    pub order: usize,
    /// Exact measure of the target.
    pub measure: f64,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        let mut s = NeumaierSum::default();
        self.weights.iter().for_each(|&w| s.add(w));
        s.value()
    }

    pub fn translated(mut self, center: &[f64]) -> QuadratureRule {
        for x in &mut self.nodes {
            for (c, o) in x.iter_mut().zip(center) {
                *c += o;
            }
        }
        self
    }

    /// Appends `other` after `self`'s nodes.
    pub fn concat(mut self, other: QuadratureRule) -> QuadratureRule {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
        if let (Some(a), Some(b)) = (self.normals.as_mut(), other.normals) {
            a.extend(b);
        } else {
            self.normals = None;
        }
        self.measure += other.measure;
        self
    }
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, ascending.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    if k == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; k];
    let mut w = vec![0.0; k];
    for i in 0..k.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=k {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = k as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[k - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[k - 1 - i] = wi;
    }
    (x, w)
}

/// Measure of the unit sphere `S^{n−1}`.
pub fn unit_sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        _ => f64::NAN,
    }
}

/// Volume of the ball `B(0, R) ⊂ ℝⁿ`.
pub fn ball_volume(n: usize, r: f64) -> f64 {
    unit_sphere_area(n) * r.powi(n as i32) / n as f64
}

/// Gauss–Legendre rule on `[a, b]`.
pub fn interval_rule(a: f64, b: f64, order: usize) -> Result<QuadratureRule> {
    if !(a < b) || order == 0 {
        return Err(Error::InvalidParameter(format!("interval rule on [{a}, {b}] with order {order}")));
    }
    let (x, w) = gauss_legendre(order);
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    Ok(QuadratureRule {
        nodes: x.iter().map(|t| vec![mid + half * t]).collect(),
        weights: w.iter().map(|wi| wi * half).collect(),
        normals: None,
        target: Target::Path,
        order,
        measure: b - a,
    })
}

/// Surface rule on `∂B(0, R)` with outward normals.
///
/// `n = 2`: `order` equispaced nodes at angles `2πk/order`, ordered by `k`.
/// `n = 3`: Gauss–Legendre in `cos θ` (`order/2` nodes, ascending) times
/// `order` equispaced azimuths, with the azimuth index varying fastest.
pub fn sphere_rule(n: usize, radius: f64, order: usize) -> Result<QuadratureRule> {
    if order < 4 {
        return Err(Error::InvalidParameter(format!("sphere rule order {order} < 4")));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("sphere radius {radius} must be positive")));
    }
    let mut nodes = Vec::new();
    let mut normals = Vec::new();
    let mut weights = Vec::new();
    match n {
        2 => {
            let w = 2.0 * PI * radius / order as f64;
            for k in 0..order {
                let t = 2.0 * PI * k as f64 / order as f64;
                let nu = vec![t.cos(), t.sin()];
                nodes.push(scale_vec(radius, &nu));
                normals.push(nu);
                weights.push(w);
            }
        }
        3 => {
            let (ct, wt) = gauss_legendre(order / 2);
            let dphi = 2.0 * PI / order as f64;
            for (c, wc) in ct.iter().zip(&wt) {
                let s = (1.0 - c * c).sqrt();
                for k in 0..order {
                    let phi = dphi * k as f64;
                    let nu = vec![s * phi.cos(), s * phi.sin(), *c];
                    nodes.push(scale_vec(radius, &nu));
                    normals.push(nu);
                    weights.push(wc * dphi * radius * radius);
                }
            }
        }
        _ => return Err(Error::Unsupported(format!("sphere rule in dimension {n}"))),
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        normals: Some(normals),
        target: Target::Surface,
        order,
        measure: unit_sphere_area(n) * radius.powi(n as i32 - 1),
    })
}

fn scale_vec(s: f64, v: &[f64]) -> Vec<f64> {
    v.iter().map(|c| s * c).collect()
}

/// Shell rule for `r_in < |x| < r_out`: `radial_order` Gauss–Legendre
/// points in `r` (outer loop) times [`sphere_rule`] of order `angular_order`.
/// The normals of the angular rule are kept as the radial unit vectors.
pub fn annulus_rule(n: usize, r_in: f64, r_out: f64, radial_order: usize, angular_order: usize) -> Result<QuadratureRule> {
    if !(r_in >= 0.0 && r_in < r_out) {
        return Err(Error::InvalidParameter(format!("annulus needs 0 <= r_in < r_out (got {r_in}, {r_out})")));
    }
    let radial = interval_rule(r_in, r_out, radial_order)?;
    shell_product(n, &radial, angular_order, ball_volume(n, r_out) - ball_volume(n, r_in))
}

fn shell_product(n: usize, radial: &QuadratureRule, angular_order: usize, measure: f64) -> Result<QuadratureRule> {
    let unit = sphere_rule(n, 1.0, angular_order)?;
    let dirs = unit.normals.as_ref().expect("sphere rule has normals");
    let mut out = QuadratureRule {
        nodes: Vec::with_capacity(radial.len() * unit.len()),
        weights: Vec::with_capacity(radial.len() * unit.len()),
        normals: Some(Vec::with_capacity(radial.len() * unit.len())),
        target: Target::Volume,
        order: radial.order,
        measure,
    };
    for (rn, rw) in radial.nodes.iter().zip(&radial.weights) {
        let r = rn[0];
        let jac = rw * r.powi(n as i32 - 1);
        for (d, w) in dirs.iter().zip(&unit.weights) {
            out.nodes.push(scale_vec(r, d));
            out.weights.push(jac * w);
            out.normals.as_mut().unwrap().push(d.clone());
        }
    }
    Ok(out)
}

/// Volume rule on `B(0, R)`: `order` radial Gauss–Legendre points times a
/// sphere rule of the same order.
pub fn ball_rule(n: usize, radius: f64, order: usize) -> Result<QuadratureRule> {
    annulus_rule(n, 0.0, radius, order, order)
}

/// Volume rule on `B(0, R)` whose radial nodes are clustered at the center
/// through geometric panels `[R qᵏ⁺¹, R qᵏ]` (`q = 1/2`, `panels` of them,
/// plus the innermost disc). Suited to integrands with `ln r` behavior.
pub fn graded_ball_rule(n: usize, radius: f64, panels: usize, radial_order: usize, angular_order: usize) -> Result<QuadratureRule> {
    if !(radius > 0.0) || panels == 0 {
        return Err(Error::InvalidParameter("graded ball rule needs R > 0 and panels >= 1".into()));
    }
    let edges: Vec<f64> = (0..=panels).map(|k| radius * 0.5f64.powi(k as i32)).collect();
    let mut radial = interval_rule(0.0, edges[panels], radial_order)?;
    for k in (0..panels).rev() {
        radial = radial.concat(interval_rule(edges[k + 1], edges[k], radial_order)?);
    }
    radial.order = radial_order;
    shell_product(n, &radial, angular_order, ball_volume(n, radius))
}

/// Weighted sum `Σ wᵢ f(xᵢ)` in node order with compensated summation.
pub fn integrate<F>(mut f: F, rule: &QuadratureRule) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut s = NeumaierSum::default();
    for (i, (x, w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let v = f(x)?;
        if !v.is_finite() {
            return Err(Error::NonFinite { index: i, point: x.clone() });
        }
        s.add(w * v);
    }
    Ok(s.value())
}

/// Surface version of [`integrate`]: the integrand also receives the
/// outward normal at each node.
pub fn integrate_surface<F>(mut f: F, rule: &QuadratureRule) -> Result<f64>
where
    F: FnMut(&[f64], &[f64]) -> Result<f64>,
{
    let normals = rule
        .normals
        .as_ref()
        .ok_or_else(|| Error::Unsupported("surface integral over a rule without normals".into()))?;
    let mut s = NeumaierSum::default();
    for (i, ((x, w), nu)) in rule.nodes.iter().zip(&rule.weights).zip(normals).enumerate() {
        let v = f(x, nu)?;
        if !v.is_finite() {
            return Err(Error::NonFinite { index: i, point: x.clone() });
        }
        s.add(w * v);
    }
    Ok(s.value())
}

/// Componentwise [`integrate`] for vector integrands of length `dim`.
pub fn integrate_vec<F>(mut f: F, rule: &QuadratureRule, dim: usize) -> Result<Vec<f64>>
where
    F: FnMut(&[f64], Option<&[f64]>) -> Result<Vec<f64>>,
{
    let mut s = vec![NeumaierSum::default(); dim];
    for (i, (x, w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let nu = rule.normals.as_ref().map(|v| v[i].as_slice());
        let v = f(x, nu)?;
        if v.len() != dim {
            return Err(Error::Dimension(format!("integrand returned {} components, expected {dim}", v.len())));
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index: i, point: x.clone() });
        }
        for (acc, c) in s.iter_mut().zip(&v) {
            acc.add(w * c);
        }
    }
    Ok(s.iter().map(NeumaierSum::value).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        for k in [1, 2, 5, 16, 64] {
            let (x, w) = gauss_legendre(k);
            for deg in 0..(2 * k) {
                let q: f64 = x.iter().zip(&w).map(|(t, wi)| wi * t.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "k={k} deg={deg}: {q} vs {exact}");
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn sphere_and_ball_measures() {
        let c = sphere_rule(2, 1.0, 64).unwrap();
        assert!((integrate(|_| Ok(1.0), &c).unwrap() - 2.0 * PI).abs() < 1e-12);
        let s = sphere_rule(3, 1.0, 64).unwrap();
        assert_eq!(s.len(), 32 * 64);
        assert!((integrate(|_| Ok(1.0), &s).unwrap() - 4.0 * PI).abs() < 1e-12);
        let r = 1.7;
        let s = sphere_rule(3, r, 64).unwrap();
        let flux = integrate_surface(|x, nu| Ok(dot(x, nu)), &s).unwrap();
        assert!((flux - 4.0 * PI * r.powi(3)).abs() < 1e-10);
        let b = ball_rule(3, 1.0, 64).unwrap();
        assert!((integrate(|_| Ok(1.0), &b).unwrap() - 4.0 * PI / 3.0).abs() < 1e-12);
        assert!((integrate(|x| Ok(dot(x, x)), &b).unwrap() - 4.0 * PI / 5.0).abs() < 1e-12);
        let a = annulus_rule(2, 1.0, 2.0, 64, 64).unwrap();
        assert!((integrate(|_| Ok(1.0), &a).unwrap() - 3.0 * PI).abs() < 1e-12);
        for rule in [&c, &b, &a] {
            assert!((rule.weight_sum() - rule.measure).abs() < 1e-12);
        }
    }

    #[test]
    fn graded_ball_handles_log_integrands() {
        let rule = graded_ball_rule(3, 1.0, 20, 16, 8).unwrap();
        assert!((rule.weight_sum() - 4.0 * PI / 3.0).abs() < 1e-12);
        // ∫_B ln²|x| = 4π ∫ r² ln² r dr = 4π·2/27
        let v = integrate(|x| Ok(norm(x).ln().powi(2)), &rule).unwrap();
        assert!((v - 8.0 * PI / 27.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn unsupported_and_invalid_rules() {
        assert!(matches!(sphere_rule(4, 1.0, 8), Err(Error::Unsupported(_))));
        assert!(sphere_rule(3, 1.0, 2).is_err());
        assert!(Domain::Annulus { n: 2, r_in: 2.0, r_out: 1.0 }.validate().is_err());
        assert!(Domain::Interval { a: 1.0, b: 1.0 }.validate().is_err());
    }

    #[test]
    fn integrate_names_the_bad_node() {
        let rule = interval_rule(0.0, 1.0, 4).unwrap();
        let e = integrate(|x| Ok(if x[0] > 0.5 { f64::NAN } else { 1.0 }), &rule).unwrap_err();
        assert!(matches!(e, Error::NonFinite { index: 2, .. }));
    }

    #[test]
    fn annulus_boundary_normals_point_outward() {
        let d = Domain::Annulus { n: 2, r_in: 1.0, r_out: 2.0 };
        let rule = d.boundary_rule(16).unwrap();
        // ∮ x·n = n|Ω| for the annulus
        let flux = integrate_surface(|x, nu| Ok(dot(x, nu)), &rule).unwrap();
        assert!((flux - 2.0 * 3.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn composite_field_dispatches_and_reports_traces() {
        let inner = DeformationField::affine(Mat::identity(2), vec![0.0, 0.0]);
        let outer = DeformationField::affine(Mat::identity(2).scale(2.0), vec![0.0, 0.0]);
        let f = DeformationField::composite(
            JumpSurface::Sphere { center: vec![0.0, 0.0], radius: 1.0 },
            inner,
            outer,
        )
        .unwrap();
        assert_eq!(f.grad(&[0.5, 0.0])[(0, 0)], 1.0);
        assert_eq!(f.grad(&[1.5, 0.0])[(0, 0)], 2.0);
        let a = f.hadamard_vector(&[0.0, 1.0]).unwrap();
        assert!((a[1] - 1.0).abs() < 1e-15 && a[0].abs() < 1e-15);
        assert!(matches!(f.check_regular(&[1.0001, 0.0], 1e-3), Err(Error::NearJump { .. })));
        assert!(f.check_regular(&[0.5, 0.0], 1e-3).is_ok());
    }

    #[test]
    fn grad_consistency_of_smooth_field() {
        let f = DeformationField::smooth(
            2,
            2,
            |x| vec![x[0] * x[0], x[0] * x[1]],
            |x| Mat::from_rows(&[&[2.0 * x[0], 0.0], &[x[1], x[0]]]),
        );
        assert!(f.grad_consistency(&[0.7, -0.3], 1e-5) < 1e-6);
    }
}
