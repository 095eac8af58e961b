//! Acceptance criteria 1 to 11, one line each.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use confstress::cli_report::{run, RunReport, ScenarioConfig};
use confstress::energy_models::make_dynamic_potential;
use confstress::identity_lab::{pohozaev_verdict, IdentityReport, UniquenessVerdict};
use confstress::shock_dynamics::admissibility_sweep;

#[derive(Default)]
struct Criterion {
    failures: Vec<String>,
    checks: usize,
    worst: f64,
}

impl Criterion {
    fn check(&mut self, what: &str, err: f64, tol: f64) {
        self.checks += 1;
        if err.is_finite() {
            self.worst = self.worst.max(err / tol.max(f64::MIN_POSITIVE));
        }
        if err.is_nan() || err > tol {
            self.failures.push(format!("{what}: {err:.3e} > {tol:.0e}"));
        }
    }

    fn require(&mut self, what: &str, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failures.push(what.to_string());
        }
    }

    fn scenario(&mut self, config: ScenarioConfig) -> Option<RunReport> {
        let name = config.scenario.clone();
        match run(&config) {
            Ok(r) => {
                if let Some(e) = &r.error {
                    self.require(&format!("{name}: {e}"), false);
                    return None;
                }
                Some(r)
            }
            Err(e) => {
                self.require(&format!("{name}: {e}"), false);
                None
            }
        }
    }

    fn identities(&mut self, report: &RunReport, prefix: &str, tol: f64, rel: bool) -> Vec<IdentityReport> {
        let ids: Vec<_> = report.identities.iter().filter(|i| i.name.starts_with(prefix)).cloned().collect();
        self.require(&format!("{}: no identity named '{prefix}'", report.scenario), !ids.is_empty());
        for i in &ids {
            let err = if rel { i.rel_err } else { i.abs_err };
            self.check(&format!("{} / {}", report.scenario, i.name), err, tol);
        }
        ids
    }
}

type Check = fn(&mut Criterion);

fn cfg(name: &str, params: &[(&str, f64)]) -> ScenarioConfig {
    params.iter().fold(ScenarioConfig::new(name), |c, (k, v)| c.set(k, *v))
}

fn criterion_1(c: &mut Criterion) {
    for (n, a, r) in [(2.0, 1.0, 1.0), (3.0, 1.0, 1.0), (3.0, 2.0, 0.5)] {
        let start = Instant::now();
        let Some(rep) = c.scenario(cfg("example1-gct", &[("n", n), ("a", a), ("R", r)])) else { continue };
        let elapsed = start.elapsed();
        let nu = n as usize;
        let volume = if nu == 2 { PI * r * r } else { 4.0 * PI * r.powi(3) / 3.0 };
        let exact = a * a * (n - 1.0) / (2.0 * n * n) * volume;
        for i in c.identities(&rep, "", 1e-8, true) {
            c.check(&format!("{} lhs vs closed form (n={n}, a={a}, R={r})", i.name), (i.lhs - exact).abs() / exact, 1e-8);
        }
        c.require(&format!("runtime {elapsed:?} for n={n}"), elapsed < Duration::from_secs(1));
    }
}

fn criterion_2(c: &mut Criterion) {
    for n in [2.0, 3.0] {
        if let Some(rep) = c.scenario(cfg("example1-traction", &[("n", n)])) {
            c.identities(&rep, "Eshelby boundary traction", 1e-10, false);
        }
    }
}

fn criterion_3(c: &mut Criterion) {
    for n in [2.0, 3.0] {
        if let Some(rep) = c.scenario(cfg("phom-hydrostatic", &[("n", n)])) {
            c.identities(&rep, "", 1e-9, false);
        }
    }
    if let Some(rep) = c.scenario(cfg("ppst-pi", &[("n", 3.0)])) {
        c.identities(&rep, "Piola-Eshelby cross relation", 1e-9, false);
        c.identities(&rep, "conservation law divergence", 1e-6, false);
    }
}

fn criterion_4(c: &mut Criterion) {
    for n in [2.0, 3.0] {
        if let Some(rep) = c.scenario(cfg("linear-forms", &[("n", n)])) {
            c.identities(&rep, "classical Clapeyron", 1e-8, false);
            c.identities(&rep, "linear Clapeyron with rotations", 1e-8, false);
            c.identities(&rep, "rotation boundary relation", 1e-8, false);
            c.identities(&rep, "rotation divergence relation", 1e-6, false);
        }
    }
}

fn criterion_5(c: &mut Criterion) {
    if let Some(rep) = c.scenario(cfg("pohozaev", &[("n", 3.0), ("q", 3.0), ("R", 1.0)])) {
        c.identities(&rep, "Pohozaev energy identity", 1e-6, false);
        c.identities(&rep, "Pohozaev dilation identity", 1e-6, false);
    }
    for k in [4.0, 6.0] {
        let (n, p) = (3.0, 2.0);
        let lhs = 1.0 / n + 1.0 / k;
        let expected = if lhs < 1.0 / p {
            UniquenessVerdict::Holds
        } else if lhs == 1.0 / p {
            UniquenessVerdict::Critical
        } else {
            UniquenessVerdict::Fails
        };
        c.require(&format!("verdict for k = {k}"), pohozaev_verdict(n, p, k) == expected);
    }
}

fn criterion_6(c: &mut Criterion) {
    if let Some(rep) = c.scenario(cfg("invariant-closures", &[])) {
        c.identities(&rep, "", 1e-10, false);
    }
    if let Some(rep) = c.scenario(cfg("screw-dislocation", &[])) {
        c.identities(&rep, "M path independence", 1e-9, false);
        c.identities(&rep, "J path independence", 1e-9, false);
        c.identities(&rep, "screw dislocation M", 1e-9, false);
    }
    if let Some(rep) = c.scenario(cfg("crack-kfield", &[])) {
        c.identities(&rep, "J path independence", 1e-9, false);
        c.identities(&rep, "M path independence", 1e-9, false);
    }
}

fn criterion_7(c: &mut Criterion) {
    if let Some(rep) = c.scenario(cfg("shock-energy-balance", &[])) {
        c.identities(&rep, "Rankine-Hugoniot", 1e-12, false);
        c.identities(&rep, "Hadamard", 1e-12, false);
        c.identities(&rep, "dynamic energy balance", 1e-10, false);
        for i in c.identities(&rep, "space-time driving force", 1e-12, false) {
            c.check("p* for the quartic benchmark", (i.lhs - 0.25).abs(), 1e-12);
        }
    }
    if let Some(rep) = c.scenario(cfg("shock-clapeyron", &[])) {
        c.identities(&rep, "dynamic Clapeyron", 1e-10, false);
    }
    match admissibility_sweep(make_dynamic_potential(1.0, 1.0).unwrap(), 10) {
        Ok(s) => {
            c.require(&format!("{} Lax-admissible pairs, need 100", s.lax_admissible), s.lax_admissible >= 100);
            c.require(&format!("min p* = {}", s.min_pstar), s.min_pstar >= 0.0);
            c.check("jump residual on the sweep", s.max_jump_residual, 1e-12);
        }
        Err(e) => c.require(&format!("admissibility sweep: {e}"), false),
    }
}

fn criterion_8(c: &mut Criterion) {
    for (n, lambda, mu, p) in [(3.0, 1.0, 1.0, 1.0), (2.0, 1.0, 1.0, 1.0), (3.0, 0.5, 2.0, 1.7), (2.0, 2.0, 0.6, 0.8)] {
        let params = [("n", n), ("lambda", lambda), ("mu", mu), ("p", p)];
        let (Some(lin), Some(gct)) = (c.scenario(cfg("void-linear", &params)), c.scenario(cfg("void-gct", &params))) else {
            continue;
        };
        let a = lin.identities[0].lhs;
        let b = gct.identities[0].lhs;
        c.check(&format!("two-way dE (n={n}, p={p})"), (a - b).abs(), 1e-8);
        if (n, lambda, mu, p) == (3.0, 1.0, 1.0, 1.0) {
            c.check("dE = -0.9 pi", (a + 0.9 * PI).abs(), 1e-8);
        }
        if let Some(g) = c.scenario(cfg("void-griffith", &params)) {
            let kappa = lambda + 2.0 * mu / n;
            let exact = if n == 2.0 { PI * p * p / kappa } else { 4.0 * PI * p * p / (3.0 * kappa) };
            for i in c.identities(&g, "discrepancy G", 1e-8, false) {
                c.check(&format!("G closed form (n={n})"), (i.lhs - exact).abs(), 1e-8);
            }
            for i in c.identities(&g, "truncated G at R = 40", 1e-4, false) {
                c.check(&format!("truncated G at R=40 vs closed form (n={n})"), (i.lhs - exact).abs(), 1e-4);
            }
        }
        if let Some(rd) = c.scenario(cfg("void-rice-drucker", &params)) {
            c.identities(&rd, "", 1e-8, false);
        }
    }
}

fn criterion_9(c: &mut Criterion) {
    for n in [2.0, 3.0] {
        if let Some(rep) = c.scenario(cfg("phase-boundary", &[("n", n)])) {
            for i in c.identities(&rep, "far-field exponent", 0.05, false) {
                c.check(&format!("alpha vs n-1 (n={n})"), (i.lhs - (n - 1.0)).abs(), 0.05);
            }
            c.identities(&rep, "interface driving force", 1e-8, false);
        }
        if let Some(rep) = c.scenario(cfg("qw-probe", &[("n", n), ("r1", 1.5), ("r2", 2.0), ("r3", 4.0)])) {
            c.identities(&rep, "radial quasiconvex envelope, r", 1e-5, false);
        }
    }
}

fn criterion_10(c: &mut Criterion) {
    for n in [2.0, 3.0] {
        if let Some(rep) = c.scenario(cfg("energy-increment", &[("n", n)])) {
            c.identities(&rep, "", 1e-6, false);
        }
    }
}

fn criterion_11(c: &mut Criterion) {
    if let Some(rep) = c.scenario(cfg("parametric-extended", &[])) {
        c.identities(&rep, "", 1e-12, false);
    }
    if let Some(rep) = c.scenario(cfg("noether-identity", &[])) {
        c.identities(&rep, "Noether identity, extrapolated", 1e-6, false);
        for i in c.identities(&rep, "Richardson ratio", 0.05, true) {
            c.require("Richardson trend toward order 2", (i.lhs - 4.0).abs() < 0.2);
        }
    }
    if let Some(rep) = c.scenario(cfg("graph-orthogonality", &[])) {
        c.identities(&rep, "", 1e-12, false);
    }
    for n in [2.0, 3.0] {
        if let Some(rep) = c.scenario(cfg("polar-vanishing", &[("n", n)])) {
            c.identities(&rep, "", 1e-10, false);
        }
    }
}

fn main() -> ExitCode {
    let suite: [(&str, Check); 11] = [
        ("example 1 energy by boundary evaluation, rel 1e-8", criterion_1),
        ("configurational traction on the ball boundary, 1e-10", criterion_2),
        ("Clapeyron forms and cross relation, 1e-9", criterion_3),
        ("linear variants on the harmonic family, 1e-8", criterion_4),
        ("Pohozaev identities 1e-6 and uniqueness verdicts", criterion_5),
        ("invariant integrals J, L, M", criterion_6),
        ("shock suite", criterion_7),
        ("void suite", criterion_8),
        ("radial phase-boundary probe", criterion_9),
        ("metastability increment, 1e-6", criterion_10),
        ("property suites", criterion_11),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (title, f)) in suite.iter().enumerate() {
        let mut c = Criterion::default();
        f(&mut c);
        let ok = c.failures.is_empty() && c.checks > 0;
        println!(
            "criterion {:>2} {} {title} ({} checks, worst err/tol {:.2e})",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            c.checks,
            c.worst
        );
        for msg in &c.failures {
            println!("    {msg}");
        }
        failed += usize::from(!ok);
    }
    let total = start.elapsed();
    let fast = total < Duration::from_secs(120);
    println!("suite runtime {:.2} s {}", total.as_secs_f64(), if fast { "PASS" } else { "FAIL" });
    if failed == 0 && fast {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
