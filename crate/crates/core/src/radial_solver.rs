//! Radial extremals: the closed-form prestressed ball, linear exterior
//! cavity fields, Maxwell interface data for double-well energies, outward
//! shooting of the radial Euler–Lagrange ODE with far-field fitting,
//! semilinear shooting, and the 1D bar with a free length.

use std::sync::Arc;

use crate::energy_models::{BarPotential, IsotropicSv, LinearIsotropic, PrestressedRadial, ScalarPotential};
use crate::error::{Error, Result};
use crate::fields_domains::{ball_volume, graded_ball_rule, integrate, DeformationField, JumpSurface};
use crate::tensor_core::{eshelby_from, norm, piola, EnergyModel, Mat};

/// Tolerances for [`dopri5`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h0: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-12, h0: 1e-3, max_steps: 2_000_000 }
    }
}

/// Accepted steps of an ODE integration: times, states and state derivatives.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OdeTrace {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub dy: Vec<Vec<f64>>,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Dormand–Prince 5(4) integration of `y′ = f(t, y)` from `t0` to `t1 > t0`.
/// `on_step` sees every accepted state and may abort the integration.
pub fn dopri5<F, G>(mut f: F, t0: f64, y0: &[f64], t1: f64, opts: OdeOptions, mut on_step: G) -> Result<OdeTrace>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
    G: FnMut(f64, &[f64]) -> Result<()>,
{
    if !(t1 > t0) {
        return Err(Error::InvalidParameter(format!("integration interval [{t0}, {t1}] is empty")));
    }
    let dim = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = f(t, &y)?;
    let mut trace = OdeTrace { t: vec![t], y: vec![y.clone()], dy: vec![k1.clone()] };
    let mut h = opts.h0.min(t1 - t0);
    let mut k = vec![vec![0.0; dim]; 7];
    for _ in 0..opts.max_steps {
        if t >= t1 {
            return Ok(trace);
        }
        if t + h > t1 {
            h = t1 - t;
        }
        k[0].clone_from(&k1);
        let mut tmp = vec![0.0; dim];
        for s in 1..7 {
            for i in 0..dim {
                tmp[i] = y[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
            }
            k[s] = f(t + C[s] * h, &tmp)?;
        }
        let ynew = tmp;
        let mut err = 0.0;
        for i in 0..dim {
            let e: f64 = h * (0..7).map(|s| E[s] * k[s][i]).sum::<f64>();
            let sc = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
            err += (e / sc).powi(2);
        }
        err = (err / dim as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::Integrator(format!("non-finite error estimate at t = {t}")));
        }
        if err <= 1.0 {
            t = if t1 - (t + h) <= 1e-14 * t1.abs().max(1.0) { t1 } else { t + h };
            y = ynew;
            k1 = k[6].clone();
            on_step(t, &y)?;
            trace.t.push(t);
            trace.y.push(y.clone());
            trace.dy.push(k1.clone());
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Integrator(format!("step size underflow at t = {t}")));
        }
    }
    Err(Error::Integrator(format!("step budget of {} exhausted at t = {t}", opts.max_steps)))
}

/// Piecewise quintic Hermite interpolant built from values, first and second
/// derivatives at the nodes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HermiteTable {
    pub t: Vec<f64>,
    pub v: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

impl HermiteTable {
    /// Table of the first state component from a trace of a second-order
    /// system written as `(u, u′)`.
    pub fn from_trace(trace: &OdeTrace) -> HermiteTable {
        HermiteTable {
            t: trace.t.clone(),
            v: trace.y.iter().map(|s| s[0]).collect(),
            d1: trace.y.iter().map(|s| s[1]).collect(),
            d2: trace.dy.iter().map(|s| s[1]).collect(),
        }
    }

    pub fn range(&self) -> (f64, f64) {
        (self.t[0], *self.t.last().unwrap())
    }

    /// Value and first derivative at `x`; `None` outside the table.
    pub fn eval(&self, x: f64) -> Option<(f64, f64)> {
        let (lo, hi) = self.range();
        if !(x >= lo && x <= hi) {
            return None;
        }
        let i = self.t.partition_point(|&s| s <= x).clamp(1, self.t.len() - 1) - 1;
        let h = self.t[i + 1] - self.t[i];
        let s = (x - self.t[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let (s4, s5) = (s3 * s, s3 * s2);
        let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
        let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
        let h2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
        let h3 = 0.5 * s3 - s4 + 0.5 * s5;
        let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
        let h5 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
        let g0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
        let g1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
        let g2 = s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4;
        let g3 = 1.5 * s2 - 4.0 * s3 + 2.5 * s4;
        let g4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
        let g5 = -g0;
        let (y0, y1) = (self.v[i], self.v[i + 1]);
        let (p0, p1) = (self.d1[i], self.d1[i + 1]);
        let (q0, q1) = (self.d2[i], self.d2[i + 1]);
        let val = y0 * h0 + h * p0 * h1 + h * h * q0 * h2 + h * h * q1 * h3 + h * p1 * h4 + y1 * h5;
        let der = (y0 * g0 + y1 * g5) / h + p0 * g1 + p1 * g4 + h * (q0 * g2 + q1 * g3);
        Some((val, der))
    }
}

/// Interface record of a composite radial profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interface {
    pub r0: f64,
    pub f0: f64,
    /// `η′(r₀⁺)`.
    pub beta: f64,
}

/// Far-field fit `η(r) ≈ f∞ r + A r^{−α}` over `[r_max/10, r_max]`.
///
/// `alpha` comes from a free-exponent fit. When it lands within 0.05 of
/// `n − 1`, `f_inf` and `a` are refit with the exponent pinned and the
/// quadratic correction `r^{1−2n}` included.
#[derive(Debug, Clone, PartialEq)]
pub struct FarField {
    pub f_inf: f64,
    pub a: f64,
    /// `None` when the correction vanishes identically.
    pub alpha: Option<f64>,
    /// RMS misfit relative to the largest fitted correction.
    pub fit_residual: f64,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Example1 { a: f64, radius: f64 },
    Affine { f: f64 },
    Table(HermiteTable),
}

/// Sampled radial profile `η(r)` with an evaluator between samples.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub n: usize,
    pub r: Vec<f64>,
    pub eta: Vec<f64>,
    pub eta_prime: Vec<f64>,
    pub interface: Option<Interface>,
    pub far_field: Option<FarField>,
    shape: Shape,
}

impl RadialProfile {
    fn from_shape(n: usize, shape: Shape, grid: Vec<f64>, interface: Option<Interface>) -> Result<RadialProfile> {
        let mut p = RadialProfile {
            n,
            r: Vec::new(),
            eta: Vec::new(),
            eta_prime: Vec::new(),
            interface,
            far_field: None,
            shape,
        };
        for r in grid {
            let (e, d) = p.eval(r)?;
            p.r.push(r);
            p.eta.push(e);
            p.eta_prime.push(d);
        }
        Ok(p)
    }

    /// Largest radius at which the profile can be evaluated.
    pub fn r_max(&self) -> f64 {
        match &self.shape {
            Shape::Table(t) => t.range().1,
            _ => f64::INFINITY,
        }
    }

    /// `(η(r), η′(r))`; on an interface the outer trace is returned.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        if let Some(i) = &self.interface {
            if r < i.r0 {
                return Ok((i.f0 * r, i.f0));
            }
        }
        match &self.shape {
            Shape::Example1 { a, radius } => {
                if r <= 0.0 {
                    return Err(Error::SingularPoint(vec![0.0; self.n]));
                }
                let n = self.n as f64;
                let l = (r / radius).ln();
                Ok((a / n * (r + (n - 1.0) * r * l), a / n * (n + (n - 1.0) * l)))
            }
            Shape::Affine { f } => Ok((f * r, *f)),
            Shape::Table(t) => t.eval(r).ok_or_else(|| {
                let (lo, hi) = t.range();
                Error::InvalidParameter(format!("radius {r} outside profile range [{lo}, {hi}]"))
            }),
        }
    }

    /// Radial-form gradient `η′ x̂⊗x̂ + (η/r)(I − x̂⊗x̂)` at `x`.
    pub fn gradient_at(&self, x: &[f64]) -> Result<Mat> {
        let r = norm(x);
        let (e, d) = self.eval(r)?;
        Ok(radial_gradient(x, e, d))
    }

    /// The map `x ↦ η(|x|) x̂`, composite across the interface if present.
    /// Outside the evaluable range the field returns NaN.
    pub fn field(&self) -> DeformationField {
        let n = self.n;
        let outer = {
            let p = Arc::new(self.clone());
            let q = p.clone();
            DeformationField::smooth(
                n,
                n,
                move |x| match p.eval(norm(x)) {
                    Ok((e, _)) => x.iter().map(|c| e * c / norm(x)).collect(),
                    Err(_) => vec![f64::NAN; x.len()],
                },
                move |x| match q.eval(norm(x)) {
                    Ok((e, d)) => radial_gradient(x, e, d),
                    Err(_) => Mat::from_fn(x.len(), x.len(), |_, _| f64::NAN),
                },
            )
        };
        match &self.interface {
            Some(i) => {
                let inner = DeformationField::affine(Mat::identity(n).scale(i.f0), vec![0.0; n]);
                DeformationField::composite(JumpSurface::Sphere { center: vec![0.0; n], radius: i.r0 }, inner, outer)
                    .expect("matching shapes")
            }
            None if matches!(self.shape, Shape::Example1 { .. }) => outer.with_singular_point(vec![0.0; n]),
            None => outer,
        }
    }

    /// TSV rows `r, η, η′, W, P_rr, P*_rr` on the sample grid, evaluated
    /// along the first axis.
    pub fn tsv_rows(&self, model: &dyn EnergyModel) -> Result<Vec<[f64; 6]>> {
        let mut rows = Vec::with_capacity(self.r.len());
        for ((&r, &e), &d) in self.r.iter().zip(&self.eta).zip(&self.eta_prime) {
            let mut x = vec![0.0; self.n];
            x[0] = r;
            let mut y = vec![0.0; self.n];
            y[0] = e;
            let f = radial_gradient(&x, e, d);
            let w = model.w(&x, &y, &f)?;
            let p = piola(model, &x, &y, &f)?;
            let ps = eshelby_from(w, &f, &p);
            rows.push([r, e, d, w, p[(0, 0)], ps[(0, 0)]]);
        }
        Ok(rows)
    }
}

/// Affine profile `η(r) = f r`, i.e. the map `y = f x`.
pub fn affine_profile(n: usize, f: f64, radius: f64) -> Result<RadialProfile> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("radius {radius} must be positive")));
    }
    let grid = (1..=50).map(|i| radius * i as f64 / 50.0).collect();
    RadialProfile::from_shape(n, Shape::Affine { f }, grid, None)
}

/// `η′ x̂⊗x̂ + (η/r)(I − x̂⊗x̂)`.
pub fn radial_gradient(x: &[f64], eta: f64, eta_prime: f64) -> Mat {
    let r = norm(x);
    let xh: Vec<f64> = x.iter().map(|c| c / r).collect();
    let xx = Mat::outer(&xh, &xh);
    xx.scale(eta_prime) + (Mat::identity(x.len()) - xx).scale(eta / r)
}

fn check_example1(n: usize, radius: f64) -> Result<()> {
    if !(2..=3).contains(&n) || !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("need n in 2..=3 and R > 0 (n={n}, R={radius})")));
    }
    Ok(())
}

/// Traction-free radial extremal of the prestressed ball,
/// `η(r) = (a/n)(r + (n−1) r ln(r/R))`, sampled on `r_i = R (i/N)²`.
pub fn example1_profile(n: usize, a: f64, radius: f64) -> Result<RadialProfile> {
    check_example1(n, radius)?;
    let count = 200;
    let grid = (1..=count).map(|i| radius * (i as f64 / count as f64).powi(2)).collect();
    RadialProfile::from_shape(n, Shape::Example1 { a, radius }, grid, None)
}

/// Closed-form energy of the prestressed ball together with its volume
/// quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example1Energy {
    pub closed_form: f64,
    pub quadrature: f64,
}

/// `E = a²(n−1)/(2n²)|B(0,R)|`, cross-checked against a graded ball rule.
pub fn example1_energy(n: usize, a: f64, radius: f64) -> Result<Example1Energy> {
    let profile = example1_profile(n, a, radius)?;
    let model = PrestressedRadial { a, n };
    let field = profile.field();
    let nf = n as f64;
    let closed_form = a * a * (nf - 1.0) / (2.0 * nf * nf) * ball_volume(n, radius);
    let rule = graded_ball_rule(n, radius, 40, 16, 8)?;
    let quadrature = integrate(|x| model.w(x, &field.y(x), &field.grad(x)), &rule)?;
    let scale = closed_form.abs().max(f64::MIN_POSITIVE);
    if (quadrature - closed_form).abs() > 1e-6 * scale && closed_form != 0.0 {
        return Err(Error::SelfCheck(format!(
            "example 1 energy: closed form {closed_form} vs quadrature {quadrature}"
        )));
    }
    Ok(Example1Energy { closed_form, quadrature })
}

/// Displacement field of an isotropic linear medium with a traction-free
/// unit spherical cavity under remote hydrostatic stress `p`:
/// `u(z) = (A + B|z|^{−n}) z` with `A = p/(nκ)`, `B = p/(2μ(n−1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearExterior {
    pub p: f64,
    pub kappa: f64,
    pub mu: f64,
    pub n: usize,
}

pub fn linear_exterior(p: f64, kappa: f64, mu: f64, n: usize) -> Result<LinearExterior> {
    if !(2..=3).contains(&n) {
        return Err(Error::InvalidParameter(format!("dimension n = {n} not in 2..=3")));
    }
    if !(mu > 0.0) || !(kappa > 0.0) {
        return Err(Error::InvalidParameter(format!("moduli must be positive (kappa={kappa}, mu={mu})")));
    }
    Ok(LinearExterior { p, kappa, mu, n })
}

impl LinearExterior {
    /// Uniform strain coefficient `A = p/(nκ)`.
    pub fn a_coef(&self) -> f64 {
        self.p / (self.n as f64 * self.kappa)
    }

    /// Polarization coefficient `B = p/(2μ(n−1))`; `S = B I`.
    pub fn b_coef(&self) -> f64 {
        self.p / (2.0 * self.mu * (self.n as f64 - 1.0))
    }

    pub fn material(&self) -> LinearIsotropic {
        LinearIsotropic { lambda: self.kappa - 2.0 * self.mu / self.n as f64, mu: self.mu, n: self.n }
    }

    fn exterior(&self, z: &[f64]) -> Result<f64> {
        let r = norm(z);
        if r < 1.0 - 1e-12 {
            return Err(Error::InvalidParameter(format!("|z| = {r} inside the cavity")));
        }
        Ok(r)
    }

    pub fn u(&self, z: &[f64]) -> Result<Vec<f64>> {
        let r = self.exterior(z)?;
        let c = self.a_coef() + self.b_coef() * r.powi(-(self.n as i32));
        Ok(z.iter().map(|v| c * v).collect())
    }

    /// `∇u = (A + B r^{−n}) I − n B r^{−n} ẑ⊗ẑ`.
    pub fn grad(&self, z: &[f64]) -> Result<Mat> {
        let r = self.exterior(z)?;
        let br = self.b_coef() * r.powi(-(self.n as i32));
        let zh: Vec<f64> = z.iter().map(|v| v / r).collect();
        Ok(Mat::identity(self.n).scale(self.a_coef() + br) - Mat::outer(&zh, &zh).scale(self.n as f64 * br))
    }

    pub fn stress(&self, z: &[f64]) -> Result<Mat> {
        Ok(self.material().stress(&self.grad(z)?))
    }

    /// The displacement as a [`DeformationField`] (NaN inside the cavity).
    pub fn field(&self) -> DeformationField {
        let (s1, s2) = (*self, *self);
        let n = self.n;
        DeformationField::smooth(
            n,
            n,
            move |z| s1.u(z).unwrap_or_else(|_| vec![f64::NAN; n]),
            move |z| s2.grad(z).unwrap_or_else(|_| Mat::from_fn(n, n, |_, _| f64::NAN)),
        )
        .with_singular_point(vec![0.0; n])
    }

    /// Unablated displacement `p x/(nκ)` of the unit ball under tension `p`.
    pub fn u0(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| self.a_coef() * v).collect()
    }

    /// Displacement of the ball `B(0,1)` with a cavity `B(0,ε)`:
    /// `A x/(1−εⁿ) + B εⁿ x/((1−εⁿ)|x|ⁿ)`.
    pub fn u_eps(&self, eps: f64, x: &[f64]) -> Result<Vec<f64>> {
        let r = norm(x);
        if !(eps > 0.0 && eps < 1.0) || r < eps || r > 1.0 {
            return Err(Error::InvalidParameter(format!("need 0 < ε = {eps} <= |x| = {r} <= 1")));
        }
        let en = eps.powi(self.n as i32);
        let c = (self.a_coef() + self.b_coef() * en * r.powi(-(self.n as i32))) / (1.0 - en);
        Ok(x.iter().map(|v| c * v).collect())
    }

    /// Limit increment `w = lim (u_ε − u)/εⁿ = (A + B|x|^{−n}) x`.
    pub fn w_lin(&self, x: &[f64]) -> Result<Vec<f64>> {
        let r = norm(x);
        if r == 0.0 || r > 1.0 {
            return Err(Error::InvalidParameter(format!("w_lin needs 0 < |x| = {r} <= 1")));
        }
        let c = self.a_coef() + self.b_coef() * r.powi(-(self.n as i32));
        Ok(x.iter().map(|v| c * v).collect())
    }
}

fn separable_potential(model: &IsotropicSv) -> Result<ScalarPotential> {
    model
        .func
        .separable()
        .ok_or(Error::MissingSymmetry("separable singular-value energy"))
}

fn interface_residual(phi: &ScalarPotential, f0: f64, beta: f64) -> [f64; 2] {
    [
        phi.d1(beta) - phi.d1(f0),
        phi.value(beta) - phi.value(f0) - phi.d1(f0) * (beta - f0),
    ]
}

/// Maxwell data `(f₀, β)` for a separable double-well energy:
/// `Φ′(β) = Φ′(f₀)` and `Φ(β) = Φ(f₀) + Φ′(f₀)(β − f₀)` with `f₀ < β`.
pub fn solve_interface_conditions(model: &IsotropicSv) -> Result<(f64, f64)> {
    let phi = separable_potential(model)?;
    let (fa, fb) = match phi {
        ScalarPotential::DoubleWell { fa, fb, .. } if fa < fb => (fa, fb),
        _ => return Err(Error::MissingSymmetry("double-well potential with f_a < f_b")),
    };
    let gap = fb - fa;
    if let Some(sol) = interface_newton(&phi, fa, fb, gap) {
        return Ok(sol);
    }
    interface_bisection(&phi, fa, fb)
}

fn interface_newton(phi: &ScalarPotential, fa: f64, fb: f64, gap: f64) -> Option<(f64, f64)> {
    let (mut f0, mut beta) = (fa, fb);
    for _ in 0..100 {
        let g = interface_residual(phi, f0, beta);
        let norm_g = g[0].abs().max(g[1].abs());
        if norm_g <= 1e-14 {
            break;
        }
        let j = [
            [-phi.d2(f0), phi.d2(beta)],
            [-phi.d2(f0) * (beta - f0), phi.d1(beta) - phi.d1(f0)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let d0 = (g[0] * j[1][1] - g[1] * j[0][1]) / det;
        let d1 = (j[0][0] * g[1] - j[1][0] * g[0]) / det;
        let mut t = 1.0;
        loop {
            let (nf, nb) = (f0 - t * d0, beta - t * d1);
            let ng = interface_residual(phi, nf, nb);
            if ng[0].abs().max(ng[1].abs()) < norm_g || t < 1e-6 {
                f0 = nf;
                beta = nb;
                break;
            }
            t *= 0.5;
        }
    }
    let g = interface_residual(phi, f0, beta);
    (g[0].abs().max(g[1].abs()) <= 1e-10 && beta - f0 > 1e-3 * gap).then_some((f0, beta))
}

fn bisect<F: FnMut(f64) -> f64>(mut g: F, mut lo: f64, mut hi: f64, what: &str) -> Result<f64> {
    let (mut glo, ghi) = (g(lo), g(hi));
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo.signum() == ghi.signum() {
        return Err(Error::NoRoot { what: what.to_string(), lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn interface_bisection(phi: &ScalarPotential, fa: f64, fb: f64) -> Result<(f64, f64)> {
    let gap = fb - fa;
    let mid = 0.5 * (fa + fb);
    let (lo, hi) = (fa - 0.5 * gap, mid - 1e-3 * gap);
    // largest root of Φ′(β) = Φ′(f₀), scanning down from above the upper well
    let partner = |f0: f64| -> Result<f64> {
        let slope = phi.d1(f0);
        let g = |b: f64| phi.d1(b) - slope;
        let top = fb + 0.5 * gap;
        let steps = 256;
        let mut b1 = top;
        for k in 1..=steps {
            let b0 = top - (top - mid) * k as f64 / steps as f64;
            if g(b0).signum() != g(b1).signum() {
                return bisect(g, b0, b1, "Φ′(β) = Φ′(f₀)");
            }
            b1 = b0;
        }
        Err(Error::NoRoot { what: "Φ′(β) = Φ′(f₀)".into(), lo: mid, hi: top })
    };
    let chord = |f0: f64| -> f64 {
        match partner(f0) {
            Ok(b) => interface_residual(phi, f0, b)[1],
            Err(_) => f64::NAN,
        }
    };
    let samples = 64;
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=samples {
        let f0 = lo + (hi - lo) * k as f64 / samples as f64;
        let g = chord(f0);
        if let (Some((pf, pg)), true) = (prev, g.is_finite()) {
            if pg.signum() != g.signum() {
                let f0 = bisect(chord, pf, f0, "common tangent")?;
                return Ok((f0, partner(f0)?));
            }
        }
        if g.is_finite() {
            prev = Some((f0, g));
        }
    }
    Err(Error::NoRoot { what: "common tangent of the double well".into(), lo, hi })
}

/// Integrates `w₁₁η″ + (n−1)w₁₂(η/r)′ + (n−1)(w₁ − w₂)/r = 0` outward from
/// `r = 1` with `η(1) = f₀`, `η′(1⁺) = β`, and fits the far field on
/// `[r_max/10, r_max]`. The interior `r < 1` is the affine state `f₀ x`.
pub fn shoot_rode(model: &IsotropicSv, f0: f64, beta: f64, n: usize, r_max: f64) -> Result<RadialProfile> {
    if model.n != n {
        return Err(Error::Dimension(format!("model dimension {} differs from n = {n}", model.n)));
    }
    if !(r_max > 10.0) {
        return Err(Error::InvalidParameter(format!("r_max = {r_max} must exceed 10")));
    }
    let nm1 = n as f64 - 1.0;
    let rhs = |r: f64, s: &[f64]| -> Result<Vec<f64>> {
        let (eta, d) = (s[0], s[1]);
        let q = eta / r;
        let w = model.radial(d, q);
        if !(w.w11 > 0.0) {
            return Err(Error::Ellipticity(r));
        }
        let dq = (d - q) / r;
        Ok(vec![d, -(nm1 * w.w12 * dq + nm1 * (w.w1 - w.w2) / r) / w.w11])
    };
    let cone = |r: f64, s: &[f64]| -> Result<()> {
        if s[0] < 0.0 || s[1] < 0.0 {
            return Err(Error::ConeExit { r, eta: s[0], deta: s[1] });
        }
        Ok(())
    };
    cone(1.0, &[f0, beta])?;
    let opts = OdeOptions { rtol: 1e-10, atol: 1e-12, h0: 1e-4, ..OdeOptions::default() };
    let trace = dopri5(rhs, 1.0, &[f0, beta], r_max, opts, cone)?;
    let table = HermiteTable::from_trace(&trace);
    let grid = table.t.clone();
    let mut profile = RadialProfile::from_shape(
        n,
        Shape::Table(table),
        grid,
        Some(Interface { r0: 1.0, f0, beta }),
    )?;
    profile.far_field = Some(fit_far_field(&profile, n, r_max)?);
    Ok(profile)
}

fn lsq2(r: &[f64], basis: &[f64], eta: &[f64]) -> (f64, f64, f64) {
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((&ri, &gi), &ei) in r.iter().zip(basis).zip(eta) {
        s11 += ri * ri;
        s12 += ri * gi;
        s22 += gi * gi;
        b1 += ri * ei;
        b2 += gi * ei;
    }
    let det = s11 * s22 - s12 * s12;
    let f = (b1 * s22 - b2 * s12) / det;
    let a = (s11 * b2 - s12 * b1) / det;
    let ss: f64 = r.iter().zip(basis).zip(eta).map(|((ri, gi), ei)| (ei - f * ri - a * gi).powi(2)).sum();
    (f, a, ss)
}

/// Default truncation radius for [`shoot_rode`]: the far-field amplitude
/// is stable to 1e−6 under doubling from here.
pub fn default_r_max(n: usize) -> f64 {
    if n <= 2 { 1000.0 } else { 500.0 }
}

fn lsq_pinned(r: &[f64], eta: &[f64], n: usize) -> Option<(f64, f64)> {
    let e1 = 1.0 - n as f64;
    let e2 = 1.0 - 2.0 * n as f64;
    let a = nalgebra::DMatrix::from_fn(r.len(), 3, |i, j| match j {
        0 => 1.0,
        1 => r[i].powf(e1 - 1.0),
        _ => r[i].powf(e2 - 1.0),
    });
    let b = nalgebra::DVector::from_iterator(r.len(), r.iter().zip(eta).map(|(ri, ei)| ei / ri));
    let x = a.svd(true, true).solve(&b, 0.0).ok()?;
    Some((x[0], x[1]))
}

fn fit_far_field(profile: &RadialProfile, n: usize, r_max: f64) -> Result<FarField> {
    let count = 400;
    let lo = r_max / 10.0;
    let mut r = Vec::with_capacity(count);
    let mut eta = Vec::with_capacity(count);
    for k in 0..count {
        let ri = lo * (r_max / lo).powf(k as f64 / (count - 1) as f64);
        r.push(ri);
        eta.push(profile.eval(ri)?.0);
    }
    let f_secant = (eta[count - 1] - eta[count - 2]) / (r[count - 1] - r[count - 2]);
    let correction = eta.iter().zip(&r).map(|(e, ri)| (e - f_secant * ri).abs()).fold(0.0, f64::max);
    if correction <= 1e-12 * eta[count - 1].abs().max(1.0) {
        return Ok(FarField { f_inf: eta[count - 1] / r_max, a: 0.0, alpha: None, fit_residual: 0.0, warning: None });
    }
    let cost = |alpha: f64| -> f64 {
        let basis: Vec<f64> = r.iter().map(|ri| ri.powf(-alpha)).collect();
        lsq2(&r, &basis, &eta).2
    };
    // golden-section search for the exponent
    let (mut a, mut b) = (0.05, 6.0);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (cost(c), cost(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-10 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = cost(d);
        }
    }
    let alpha = 0.5 * (a + b);
    let basis: Vec<f64> = r.iter().map(|ri| ri.powf(-alpha)).collect();
    let (f_inf, amp, ss) = lsq2(&r, &basis, &eta);
    let peak = basis.iter().map(|gi| (amp * gi).abs()).fold(0.0, f64::max);
    let fit_residual = (ss / count as f64).sqrt() / peak.max(f64::MIN_POSITIVE);
    let warning = (fit_residual > 1e-4).then(|| format!("far-field fit residual {fit_residual:e} exceeds 1e-4"));
    let (f_inf, amp) = match ((alpha - (n as f64 - 1.0)).abs() < 0.05).then(|| lsq_pinned(&r, &eta, n)).flatten() {
        Some(pinned) => pinned,
        None => (f_inf, amp),
    };
    Ok(FarField { f_inf, a: amp, alpha: Some(alpha), fit_residual, warning })
}

/// Radial solution of `Δu + |u|^{q−1}u = 0` in `B(0,R)` with `u(R) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PohozaevProfile {
    pub n: usize,
    pub q: f64,
    pub radius: f64,
    /// `u(0)`.
    pub alpha: f64,
    /// `u′(R)`, the normal derivative on the boundary.
    pub du_boundary: f64,
    pub table: HermiteTable,
}

impl PohozaevProfile {
    /// `(u(r), u′(r))` for `0 <= r <= R`.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        self.table
            .eval(r)
            .ok_or_else(|| Error::InvalidParameter(format!("radius {r} outside [0, {}]", self.radius)))
    }
}

fn lane_emden(n: usize, q: f64, alpha: f64, radius: f64) -> Result<OdeTrace> {
    let nm1 = n as f64 - 1.0;
    let phi = move |u: f64| u.abs().powf(q - 1.0) * u;
    let rhs = move |r: f64, s: &[f64]| -> Result<Vec<f64>> {
        if r == 0.0 {
            return Ok(vec![s[1], -phi(s[0]) / n as f64]);
        }
        Ok(vec![s[1], -nm1 * s[1] / r - phi(s[0])])
    };
    let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, h0: 1e-4 * radius, ..OdeOptions::default() };
    dopri5(rhs, 0.0, &[alpha, 0.0], radius, opts, |_, _| Ok(()))
}

/// Shoots `u″ + (n−1)u′/r + |u|^{q−1}u = 0`, `u(0) = α`, `u′(0) = 0`,
/// bisecting on `α` until `|u(R)| <= 1e−10`.
pub fn pohozaev_shoot(n: usize, q: f64, radius: f64) -> Result<PohozaevProfile> {
    if !(2..=4).contains(&n) {
        return Err(Error::InvalidParameter(format!("dimension n = {n} not in 2..=4")));
    }
    let critical = if n > 2 { (n as f64 + 2.0) / (n as f64 - 2.0) } else { f64::INFINITY };
    if !(q > 1.0 && q < critical) {
        return Err(Error::InvalidParameter(format!("exponent q = {q} not in (1, {critical})")));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("radius {radius} must be positive")));
    }
    let end = |alpha: f64| -> Result<f64> { Ok(lane_emden(n, q, alpha, radius)?.y.last().unwrap()[0]) };
    let (lo, hi) = (1e-3_f64, 1e3_f64);
    let steps = 120;
    let mut bracket = None;
    let mut prev = (lo, end(lo)?);
    for k in 1..=steps {
        let a = lo * (hi / lo).powf(k as f64 / steps as f64);
        let v = end(a)?;
        if prev.1 > 0.0 && v <= 0.0 {
            bracket = Some((prev.0, a));
            break;
        }
        prev = (a, v);
    }
    let (mut a0, mut a1) = bracket.ok_or_else(|| Error::NoRoot { what: "u(R; α) = 0".into(), lo, hi })?;
    let mut alpha = 0.5 * (a0 + a1);
    for _ in 0..200 {
        alpha = 0.5 * (a0 + a1);
        let v = end(alpha)?;
        if v.abs() <= 1e-12 || a1 - a0 <= 4.0 * f64::EPSILON * alpha {
            break;
        }
        if v > 0.0 {
            a0 = alpha;
        } else {
            a1 = alpha;
        }
    }
    let trace = lane_emden(n, q, alpha, radius)?;
    let last = trace.y.last().unwrap().clone();
    if last[0].abs() > 1e-10 {
        return Err(Error::Integrator(format!("shooting residual u(R) = {:e}", last[0])));
    }
    Ok(PohozaevProfile { n, q, radius, alpha, du_boundary: last[1], table: HermiteTable::from_trace(&trace) })
}

/// Optimal shape data of a bar with free length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarSolution {
    pub bar: BarPotential,
    pub u0: f64,
    pub u1: f64,
    /// Root of `P*(ε) = 0`.
    pub eps_opt: f64,
    pub l_opt: f64,
}

/// Finite-difference checks of `dE/dL = P*` and `d²E/dL² = ε²W″(ε)/L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarCheck {
    pub l: f64,
    pub de_dl: f64,
    pub pstar: f64,
    pub d2e_dl2: f64,
    pub curvature: f64,
}

impl BarSolution {
    /// `E(L) = L W((U₁ − U₀)/L)`.
    pub fn energy(&self, l: f64) -> f64 {
        l * self.bar.w((self.u1 - self.u0) / l)
    }

    pub fn check(&self, l: f64) -> BarCheck {
        let h = 1e-3 * l;
        let (ep, e0, em) = (self.energy(l + h), self.energy(l), self.energy(l - h));
        let (ep2, em2) = (self.energy(l + 2.0 * h), self.energy(l - 2.0 * h));
        let eps = (self.u1 - self.u0) / l;
        BarCheck {
            l,
            de_dl: (8.0 * (ep - em) - (ep2 - em2)) / (12.0 * h),
            pstar: self.bar.pstar(eps),
            d2e_dl2: (ep - 2.0 * e0 + em) / (h * h),
            curvature: eps * eps * self.bar.dp(eps) / l,
        }
    }
}

pub fn bar_1d(bar: BarPotential, u0: f64, u1: f64) -> Result<BarSolution> {
    if !(u1 > u0) {
        return Err(Error::InvalidParameter(format!("need U1 > U0 (U0={u0}, U1={u1})")));
    }
    let eps_max = 20.0 / bar.k;
    let eps_opt = bisect(|e| bar.pstar(e), 0.0, eps_max, "P*(ε) = 0")?;
    Ok(BarSolution { bar, u0, u1, eps_opt, l_opt: (u1 - u0) / eps_opt })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy_models::{make_bar_potential, make_double_well_sv, SeparableSv};
    use crate::tensor_core::{euler_residuals, jump_pstar};
    use std::f64::consts::PI;

    #[test]
    fn dopri5_integrates_harmonic_oscillator() {
        let tr = dopri5(|_, y| Ok(vec![y[1], -y[0]]), 0.0, &[1.0, 0.0], 10.0, OdeOptions::default(), |_, _| Ok(()))
            .unwrap();
        let y = tr.y.last().unwrap();
        assert!((y[0] - 10f64.cos()).abs() < 1e-9);
        assert_eq!(*tr.t.last().unwrap(), 10.0);
        let table = HermiteTable::from_trace(&tr);
        for x in [0.3, 2.71, 7.77] {
            let (v, d) = table.eval(x).unwrap();
            assert!((v - x.cos()).abs() < 1e-9 && (d + x.sin()).abs() < 1e-8);
        }
    }

    #[test]
    fn example1_profile_values() {
        let p = example1_profile(3, 1.0, 1.0).unwrap();
        let (e, d) = p.eval(1.0).unwrap();
        assert!((e - 1.0 / 3.0).abs() < 1e-15 && (d - 1.0).abs() < 1e-15);
        assert!(p.eval(1e-8).unwrap().0 / 1e-8 < -1.0);
        let model = PrestressedRadial { a: 1.0, n: 3 };
        let f = p.field();
        let x = [0.0, 0.6, 0.8];
        let pk = piola(&model, &x, &f.y(&x), &f.grad(&x)).unwrap();
        assert!(crate::tensor_core::max_abs(&pk.mul_vec(&x)) < 1e-10);
    }

    #[test]
    fn example1_energy_matches_closed_form() {
        let e = example1_energy(3, 1.0, 1.0).unwrap();
        assert!((e.closed_form - 4.0 * PI / 27.0).abs() < 1e-15);
        assert!((e.quadrature - e.closed_form).abs() < 1e-9 * e.closed_form);
        let e2 = example1_energy(2, 1.0, 1.0).unwrap();
        assert!((e2.closed_form - PI / 8.0).abs() < 1e-15);
        assert_eq!(example1_energy(3, 0.0, 1.0).unwrap().closed_form, 0.0);
    }

    #[test]
    fn example1_field_is_an_extremal() {
        let model = PrestressedRadial { a: 1.0, n: 3 };
        let f = example1_profile(3, 1.0, 1.0).unwrap().field();
        let (e, es) = euler_residuals(&model, &f, &[0.3, 0.2, -0.4], 1e-4).unwrap();
        assert!(crate::tensor_core::max_abs(&e) < 1e-6, "{e:?}");
        assert!(crate::tensor_core::max_abs(&es) < 1e-6, "{es:?}");
    }

    #[test]
    fn linear_exterior_examples() {
        let le = linear_exterior(1.0, 1.0, 1.0, 3).unwrap();
        let u = le.u(&[0.0, 0.0, 1.0]).unwrap();
        assert!((u[2] - (1.0 / 3.0 + 0.25)).abs() < 1e-15);
        let z = [0.6, 0.0, 0.8];
        let t = le.stress(&z).unwrap().mul_vec(&z);
        assert!(crate::tensor_core::max_abs(&t) < 1e-14);
        assert!(le.u(&[0.5, 0.0, 0.0]).is_err());
        let x = [0.5, 0.0, 0.0];
        let w = le.w_lin(&x).unwrap()[0];
        let errs: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&e: &f64| ((le.u_eps(e, &x).unwrap()[0] - le.u0(&x)[0]) / e.powi(3) - w).abs())
            .collect();
        assert!(errs[0] / errs[1] > 7.0 && errs[1] / errs[2] > 7.5);
    }

    #[test]
    fn symmetric_wells_give_exact_interface_data() {
        let m = make_double_well_sv(1.0, 2.0, 1.0, 0.0, 3).unwrap();
        let (f0, beta) = solve_interface_conditions(&m).unwrap();
        assert!((f0 - 1.0).abs() < 1e-14 && (beta - 2.0).abs() < 1e-14);
    }

    #[test]
    fn biased_wells_move_the_interface_data() {
        let m = make_double_well_sv(1.0, 2.0, 1.0, 0.02, 3).unwrap();
        let (f0, beta) = solve_interface_conditions(&m).unwrap();
        let phi = m.func.separable().unwrap();
        let g = interface_residual(&phi, f0, beta);
        assert!(g[0].abs() <= 1e-10 && g[1].abs() <= 1e-10);
        assert!((f0 - 1.0).abs() > 1e-4 || (beta - 2.0).abs() > 1e-4);
        let fb = interface_bisection(&phi, 1.0, 2.0).unwrap();
        assert!((fb.0 - f0).abs() < 1e-8 && (fb.1 - beta).abs() < 1e-8);
        let x = [0.0, 0.0, 1.0];
        let fm = Mat::identity(3).scale(f0);
        let fp = radial_gradient(&x, f0, beta);
        let ps = jump_pstar(&m, &x, &x, &fm, &fp, &x).unwrap();
        assert!(ps.abs() < 1e-8);
    }

    #[test]
    fn collapsed_well_gives_affine_profile() {
        let phi = ScalarPotential::DoubleWell { fa: 1.3, fb: 1.3, curvature: 1.0, bias: 0.5 };
        let m = crate::energy_models::make_isotropic_sv(Arc::new(SeparableSv { phi }), 3).unwrap();
        let p = shoot_rode(&m, 1.3, 1.3, 3, 100.0).unwrap();
        let ff = p.far_field.clone().unwrap();
        assert!((ff.f_inf - 1.3).abs() < 1e-12 && ff.a == 0.0);
        assert!((p.eval(37.0).unwrap().0 - 1.3 * 37.0).abs() < 1e-10);
    }

    #[test]
    fn phase_boundary_far_field() {
        for (n, f_inf, alpha) in [(2, 1.89383, 1.0), (3, 1.84347, 2.0)] {
            let m = make_double_well_sv(1.0, 2.0, 1.0, 0.0, n).unwrap();
            let p = shoot_rode(&m, 1.0, 2.0, n, default_r_max(n)).unwrap();
            let ff = p.far_field.clone().unwrap();
            assert!((ff.f_inf - f_inf).abs() < 2e-5, "{ff:?}");
            assert!((ff.alpha.unwrap() - alpha).abs() < 0.01, "{ff:?}");
            let x = [0.6, 0.8, 0.0][..n].to_vec();
            let fm = Mat::identity(n).scale(1.0);
            let fp = radial_gradient(&x, 1.0, 2.0);
            assert!(jump_pstar(&m, &x, &x, &fm, &fp, &x).unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn pohozaev_shooting_and_scaling() {
        let p1 = pohozaev_shoot(3, 3.0, 1.0).unwrap();
        assert!(p1.alpha > 0.0 && p1.du_boundary < 0.0);
        assert!(p1.table.v.iter().take(p1.table.v.len() - 1).all(|&u| u > 0.0));
        let p2 = pohozaev_shoot(3, 3.0, 2.0).unwrap();
        let s = 2f64.powf(-2.0 / (3.0 - 1.0));
        for r in [0.3, 1.0, 1.7] {
            let u2 = p2.eval(r).unwrap().0;
            let u1 = p1.eval(r / 2.0).unwrap().0;
            assert!((u2 - s * u1).abs() < 1e-8, "{u2} vs {}", s * u1);
        }
        assert!(pohozaev_shoot(3, 6.0, 1.0).is_err());
    }

    #[test]
    fn bar_extremality() {
        let bar = make_bar_potential(1.0, 2.0).unwrap();
        let sol = bar_1d(bar, 0.0, 3.0).unwrap();
        let c = sol.check(sol.l_opt);
        assert!(c.de_dl.abs() < 1e-8, "{}", c.de_dl);
        assert!(c.d2e_dl2 > 0.0);
        let c = sol.check(0.7 * sol.l_opt);
        assert!((c.de_dl - c.pstar).abs() < 1e-6);
        assert!((c.d2e_dl2 - c.curvature).abs() < 1e-4 * c.curvature);
        assert!(bar_1d(bar, 1.0, 1.0).is_err());
    }
}
