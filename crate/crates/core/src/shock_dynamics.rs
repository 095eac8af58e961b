//! One-dimensional elastodynamics with a single shock between two constant
//! states: jump conditions, the configurational driving force on the shock,
//! the energy balance and the dynamic Clapeyron relation, all in closed form.

use crate::energy_models::{DynamicPotential, SpaceTimeLagrangian};
use crate::error::{Error, Result};
use crate::identity_lab::IdentityReport;
use crate::tensor_core::{jump_pstar, Mat};

/// Orientation convention: the `+` state lies ahead of the shock (larger
/// `x`), the `−` state behind it, and the shock normal is `+1`.
pub const ORIENTATION: &str = "+ side ahead, - side behind, shock normal +1";

/// Piecewise-constant solution `(v, F) = (v₋, F₋)` for `x < s(t)` and
/// `(v₊, F₊)` for `x > s(t)`, with `s(t) = s₀ + V t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockSolution1D {
    pub potential: DynamicPotential,
    pub v_minus: f64,
    pub f_minus: f64,
    pub v_plus: f64,
    pub f_plus: f64,
    /// Shock speed `V ≥ 0`.
    pub speed: f64,
    pub s0: f64,
    /// `c(F₊) < V < c(F₋)`; `None` for a stationary discontinuity.
    pub lax: Option<bool>,
}

/// Builds the shock from the states behind and ahead, choosing `v₋` so that
/// the Rankine–Hugoniot and Hadamard conditions hold.
pub fn build_shock(potential: DynamicPotential, f_minus: f64, f_plus: f64, v_plus: f64) -> Result<ShockSolution1D> {
    if f_minus == f_plus {
        return Err(Error::InvalidParameter("a shock needs F- != F+".into()));
    }
    let jf = f_plus - f_minus;
    let jp = potential.p(f_plus) - potential.p(f_minus);
    let ratio = jp / jf;
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::NoShockSpeed(ratio));
    }
    let speed = ratio.sqrt();
    let v_minus = v_plus + speed * jf;
    let lax = Some(potential.wave_speed(f_plus) < speed && speed < potential.wave_speed(f_minus));
    Ok(ShockSolution1D { potential, v_minus, f_minus, v_plus, f_plus, speed, s0: 0.0, lax })
}

impl ShockSolution1D {
    pub fn with_origin(mut self, s0: f64) -> ShockSolution1D {
        self.s0 = s0;
        self
    }

    pub fn position(&self, t: f64) -> f64 {
        self.s0 + self.speed * t
    }

    pub fn jump_v(&self) -> f64 {
        self.v_plus - self.v_minus
    }

    pub fn jump_f(&self) -> f64 {
        self.f_plus - self.f_minus
    }

    pub fn jump_p(&self) -> f64 {
        self.potential.p(self.f_plus) - self.potential.p(self.f_minus)
    }

    pub fn mean_p(&self) -> f64 {
        0.5 * (self.potential.p(self.f_plus) + self.potential.p(self.f_minus))
    }

    pub fn mean_f(&self) -> f64 {
        0.5 * (self.f_plus + self.f_minus)
    }

    /// `⟦v⟧V + ⟦P⟧`.
    pub fn rh_residual(&self) -> f64 {
        self.jump_v() * self.speed + self.jump_p()
    }

    /// `V⟦F⟧ + ⟦v⟧`.
    pub fn hadamard_residual(&self) -> f64 {
        self.speed * self.jump_f() + self.jump_v()
    }

    /// `⟦v⟧² − ⟦P⟧⟦F⟧`.
    pub fn kinematic_residual(&self) -> f64 {
        self.jump_v().powi(2) - self.jump_p() * self.jump_f()
    }

    /// Energy density `e = v²/2 + U(F)`.
    pub fn energy_density(&self, v: f64, f: f64) -> f64 {
        0.5 * v * v + self.potential.u(f)
    }

    /// `(v, F)` at `(x, t)`; points on the shock take the `−` state.
    pub fn state(&self, x: f64, t: f64) -> (f64, f64) {
        if x <= self.position(t) {
            (self.v_minus, self.f_minus)
        } else {
            (self.v_plus, self.f_plus)
        }
    }

    /// Continuous deformation `y = F±x + v±t + c±` with `c₊ = 0`.
    pub fn y(&self, x: f64, t: f64) -> f64 {
        if x <= self.position(t) {
            self.f_minus * x + self.v_minus * t + (self.f_plus - self.f_minus) * self.s0
        } else {
            self.f_plus * x + self.v_plus * t
        }
    }

    fn check_inside(&self, a: f64, b: f64, t: f64) -> Result<f64> {
        let s = self.position(t);
        if !(a < s && s < b) {
            return Err(Error::ShockOutside { s, a, b });
        }
        Ok(s)
    }

    /// Total energy `∫ₐᵇ e dx` at time `t`.
    pub fn total_energy(&self, a: f64, b: f64, t: f64) -> Result<f64> {
        let s = self.check_inside(a, b, t)?;
        Ok(self.energy_density(self.v_minus, self.f_minus) * (s - a)
            + self.energy_density(self.v_plus, self.f_plus) * (b - s))
    }

    /// `V·𝒫*_Σ = −V p*`; nonpositive for admissible shocks.
    pub fn dissipation(&self) -> f64 {
        -self.speed * shock_pstar_value(self)
    }

    /// TSV rows `(x, v, F, e)` on `count` equispaced points of `[a, b]`.
    pub fn snapshot_rows(&self, a: f64, b: f64, t: f64, count: usize) -> Vec<[f64; 4]> {
        (0..count)
            .map(|i| {
                let x = if count == 1 { a } else { a + (b - a) * i as f64 / (count - 1) as f64 };
                let (v, f) = self.state(x, t);
                [x, v, f, self.energy_density(v, f)]
            })
            .collect()
    }
}

fn shock_pstar_value(sol: &ShockSolution1D) -> f64 {
    let u = &sol.potential;
    u.u(sol.f_plus) - u.u(sol.f_minus) - sol.mean_p() * sol.jump_f()
}

/// Driving force on the shock in its two forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockPstar {
    /// `p* = ⟦U⟧ − {P}⟦F⟧`.
    pub pstar: f64,
    /// `𝒫*_Σ` from the space-time Lagrangian `v²/2 − U(F)`.
    pub spacetime: f64,
}

/// `p* = ⟦U⟧ − {P}⟦F⟧`, cross-checked against `𝒫*_Σ = −p*` computed from
/// the space-time blocks `𝒫 = [v, −P]`, `ℱ = [v, F]` with normal `∝ (−V, 1)`.
pub fn shock_pstar(sol: &ShockSolution1D) -> Result<ShockPstar> {
    let pstar = shock_pstar_value(sol);
    let model = SpaceTimeLagrangian { potential: sol.potential };
    let scale = (1.0 + sol.speed * sol.speed).sqrt();
    let normal = [-sol.speed / scale, 1.0 / scale];
    let fm = Mat::from_rows(&[&[sol.v_minus, sol.f_minus]]);
    let fp = Mat::from_rows(&[&[sol.v_plus, sol.f_plus]]);
    let spacetime = jump_pstar(&model, &[0.0, sol.s0], &[sol.y(sol.s0, 0.0)], &fm, &fp, &normal)?;
    let tol = 1e-12 * pstar.abs().max(1.0);
    if (spacetime + pstar).abs() > tol {
        return Err(Error::SelfCheck(format!("space-time driving force {spacetime} != -p* = {}", -pstar)));
    }
    Ok(ShockPstar { pstar, spacetime })
}

/// `d/dt ∫ₐᵇ e dx = [Pv]ₐᵇ + V𝒫*_Σ` on a fixed interval.
pub fn verify_energy_balance(sol: &ShockSolution1D, a: f64, b: f64, t: f64) -> Result<IdentityReport> {
    verify_energy_balance_moving(sol, a, b, 0.0, 0.0, t)
}

/// Energy balance on `[a + wₐt, b + w_b t]`: the endpoint fluxes gain
/// `e V_n` terms.
pub fn verify_energy_balance_moving(
    sol: &ShockSolution1D,
    a: f64,
    b: f64,
    wa: f64,
    wb: f64,
    t: f64,
) -> Result<IdentityReport> {
    let (at, bt) = (a + wa * t, b + wb * t);
    sol.check_inside(at, bt, t)?;
    let span = (sol.position(t) - at).min(bt - sol.position(t));
    let rel = (sol.speed.abs() + wa.abs() + wb.abs()).max(1.0);
    let dt = 0.25 * span / rel;
    let total = |tt: f64| sol.total_energy(a + wa * tt, b + wb * tt, tt);
    let lhs = (total(t + dt)? - total(t - dt)?) / (2.0 * dt);
    let (va, fa) = sol.state(at, t);
    let (vb, fb) = sol.state(bt, t);
    let p = |f: f64| sol.potential.p(f);
    let flux = p(fb) * vb - p(fa) * va;
    let moving = sol.energy_density(vb, fb) * wb - sol.energy_density(va, fa) * wa;
    let pst = shock_pstar(sol)?;
    let rhs = flux + moving + sol.speed * pst.spacetime;
    Ok(IdentityReport::new("dynamic energy balance", lhs, rhs, 1e-12)
        .with_anchor("rate of total energy equals boundary power plus shock dissipation")
        .with_note(&format!("dissipation {:.6e}", sol.speed * pst.spacetime)))
}

/// Dynamic Clapeyron relation in one dimension with its static and inertial
/// parts.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicClapeyron {
    pub report: IdentityReport,
    /// `[Py + P*x]ₐᵇ − p* s`.
    pub static_part: f64,
    /// `V⟦v⟧(y(s) − {F}s)`; the regular inertial volume term vanishes for
    /// constant states.
    pub inertial_part: f64,
}

/// `∫ₐᵇ U dx = [Py + P*x]ₐᵇ + V⟦v⟧(y − {F}x)|ₛ − p* s` at time `t`.
pub fn verify_dynamic_clapeyron(sol: &ShockSolution1D, a: f64, b: f64, t: f64) -> Result<DynamicClapeyron> {
    let s = sol.check_inside(a, b, t)?;
    let u = &sol.potential;
    let lhs = u.u(sol.f_minus) * (s - a) + u.u(sol.f_plus) * (b - s);
    let end = |x: f64| {
        let (_, f) = sol.state(x, t);
        let p = u.p(f);
        p * sol.y(x, t) + (u.u(f) - f * p) * x
    };
    let pstar = shock_pstar(sol)?.pstar;
    let static_part = end(b) - end(a) - pstar * s;
    let inertial_part = sol.speed * sol.jump_v() * (sol.y(s, t) - sol.mean_f() * s);
    let report = IdentityReport::new("dynamic Clapeyron", lhs, static_part + inertial_part, 1e-10)
        .with_anchor("stored energy equals static boundary work plus inertial shock work")
        .with_note(&format!("static {static_part:.6e}, inertial {inertial_part:.6e}"));
    Ok(DynamicClapeyron { report, static_part, inertial_part })
}

/// Summary of the admissibility sweep over `F₊ ∈ [0, 1]`, `F₋ ∈ (F₊, 2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibilitySweep {
    pub pairs: usize,
    pub lax_admissible: usize,
    pub min_pstar: f64,
    pub max_dissipation: f64,
    pub max_jump_residual: f64,
}

/// Sweeps a `side × side` grid of state pairs with `v₊ = 0`.
pub fn admissibility_sweep(potential: DynamicPotential, side: usize) -> Result<AdmissibilitySweep> {
    let mut out = AdmissibilitySweep {
        pairs: 0,
        lax_admissible: 0,
        min_pstar: f64::INFINITY,
        max_dissipation: f64::NEG_INFINITY,
        max_jump_residual: 0.0,
    };
    for i in 0..side {
        let f_plus = if side == 1 { 0.0 } else { i as f64 / (side - 1) as f64 };
        for j in 1..=side {
            let f_minus = f_plus + (2.0 - f_plus) * j as f64 / side as f64;
            let sol = build_shock(potential, f_minus, f_plus, 0.0)?;
            out.pairs += 1;
            if sol.lax == Some(true) {
                out.lax_admissible += 1;
            }
            out.min_pstar = out.min_pstar.min(shock_pstar(&sol)?.pstar);
            out.max_dissipation = out.max_dissipation.max(sol.dissipation());
            out.max_jump_residual = out
                .max_jump_residual
                .max(sol.rh_residual().abs())
                .max(sol.hadamard_residual().abs())
                .max(sol.kinematic_residual().abs());
        }
    }
    Ok(out)
}
