//! Scenario catalog, runner and report emission behind the `confstress`
//! command-line tool.
//!
//! A scenario owns a set of named real parameters with defaults, runs one or
//! more verifiers and returns their [`IdentityReport`]s together with any
//! tabular exports. Reports serialize to a fixed JSON schema.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::energy_models::{
    make_bar_potential, make_dirichlet, make_double_well_sv, make_dynamic_potential, make_linear_isotropic,
    make_power_p, make_prestressed_radial, BodyLoad1D, IsotropicSv, ScalarPotential,
};
use crate::error::{Error, Result};
use crate::fields_domains::{ball_volume, sphere_rule, DeformationField, Domain};
use crate::identity_lab::{
    crack_mode3_field, energy_increment, harmonic_gradient_field, interior_points, j_integral, l_integral,
    m_integral, pohozaev_verdict, qw_probe, screw_dislocation_field, verify_gct, verify_gct_shifted,
    verify_genclap, verify_incompressible, verify_linear_forms, verify_phom, verify_pohozaev, verify_ppst_and_pi,
    IdentityReport, Settings, UniquenessVerdict,
};
use crate::radial_solver::{
    affine_profile, bar_1d, default_r_max, example1_energy, example1_profile, radial_gradient, shoot_rode,
    solve_interface_conditions, RadialProfile,
};
use crate::shock_dynamics::{
    admissibility_sweep, build_shock, shock_pstar, verify_dynamic_clapeyron, verify_energy_balance,
    verify_energy_balance_moving, ShockSolution1D,
};
use crate::tensor_core::{
    check_flags, check_graph_orthogonality, dot, euler_residuals, extended_eshelby_residual, jump_pstar, max_abs,
    noether_richardson, norm, qhom_residual, EnergyModel, ExtendedModel, Mat, SharedModel, FD_RESIDUAL_STEP,
};
use crate::void_energy::{
    cavity_traction, check_polar_vanishing, delta_e_gct, delta_e_linear, griffith_discrepancy,
    griffith_sphere_integral, rice_drucker_linear, VoidScenario,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Resolved scenario parameters, ordered by name.
pub type Params = BTreeMap<String, f64>;

/// What to run and where to write it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: String,
    /// Overrides of the scenario defaults.
    pub params: Params,
    pub order: Option<usize>,
    pub tol: Option<f64>,
    /// JSON report path; `None` means standard output.
    pub out: Option<PathBuf>,
    /// Directory for TSV exports.
    pub tsv_dir: Option<PathBuf>,
    /// Report `runtime_ms = 0` so repeated runs are byte-identical.
    pub deterministic: bool,
}

#[derive(serde::Deserialize)]
struct FileConfig {
    #[serde(default)]
    order: Option<usize>,
    #[serde(default)]
    tol: Option<f64>,
    #[serde(flatten)]
    params: BTreeMap<String, toml::Value>,
}

impl ScenarioConfig {
    pub fn new(scenario: &str) -> ScenarioConfig {
        ScenarioConfig { scenario: scenario.to_string(), ..ScenarioConfig::default() }
    }

    pub fn set(mut self, key: &str, value: f64) -> ScenarioConfig {
        self.params.insert(key.to_string(), value);
        self
    }

    /// Reads a flat TOML table of numeric parameters (plus optional `order`
    /// and `tol`). Values already present in `self` win over the file.
    pub fn merge_toml(&mut self, text: &str) -> Result<()> {
        let file: FileConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for (k, v) in file.params {
            let x = match v {
                toml::Value::Integer(i) => i as f64,
                toml::Value::Float(f) => f,
                other => return Err(Error::Config(format!("parameter '{k}' must be numeric, got {other}"))),
            };
            self.params.entry(k).or_insert(x);
        }
        self.order = self.order.or(file.order);
        self.tol = self.tol.or(file.tol);
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.merge_toml(&text)
    }
}

/// Parses `key=value` as given to `--set`.
pub fn parse_assignment(s: &str) -> Result<(String, f64)> {
    let (k, v) = s.split_once('=').ok_or_else(|| Error::Config(format!("expected key=value, got '{s}'")))?;
    let value = v.trim().parse::<f64>().map_err(|_| Error::Config(format!("'{v}' is not a number")))?;
    Ok((k.trim().to_string(), value))
}

/// A named numeric table exported as TSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(name: &str, header: &[&str], rows: Vec<Vec<f64>>) -> Table {
        Table { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows }
    }

    pub fn to_tsv(&self) -> String {
        let mut out = self.header.join("\t");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_float(*v)).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }
}

/// Identities and tables produced by one scenario run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub identities: Vec<IdentityReport>,
    pub tables: Vec<Table>,
}

/// Result of a scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub version: String,
    pub scenario: String,
    pub params: Params,
    pub identities: Vec<IdentityReport>,
    pub runtime_ms: u64,
    /// True iff every identity passes and the scenario ran to completion.
    pub pass: bool,
    pub tables: Vec<Table>,
    /// Module error that stopped the scenario.
    pub error: Option<Error>,
}

impl RunReport {
    /// 0 pass, 1 identity failure, 2 configuration error, 3 solver error.
    pub fn exit_code(&self) -> i32 {
        match &self.error {
            Some(e) => e.exit_code(),
            None if self.pass => 0,
            None => 1,
        }
    }

    pub fn to_json(&self) -> String {
        let json = JsonReport {
            version: &self.version,
            scenario: &self.scenario,
            params: self.params.iter().map(|(k, v)| (k.as_str(), number(*v))).collect(),
            identities: self
                .identities
                .iter()
                .map(|r| JsonIdentity {
                    name: &r.name,
                    lhs: number(r.lhs),
                    rhs: number(r.rhs),
                    abs_err: number(r.abs_err),
                    rel_err: number(r.rel_err),
                    tol: number(r.tol),
                    pass: r.pass,
                    paper_anchor: &r.anchor,
                })
                .collect(),
            runtime_ms: self.runtime_ms,
            pass: self.pass,
        };
        let mut s = serde_json::to_string_pretty(&json).expect("report serializes");
        s.push('\n');
        s
    }

    /// The first identity, used as the representative row of a sweep.
    pub fn headline(&self) -> Option<&IdentityReport> {
        self.identities.first()
    }
}

#[derive(Serialize)]
struct JsonIdentity<'a> {
    name: &'a str,
    lhs: serde_json::Value,
    rhs: serde_json::Value,
    abs_err: serde_json::Value,
    rel_err: serde_json::Value,
    tol: serde_json::Value,
    pass: bool,
    paper_anchor: &'a str,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    version: &'a str,
    scenario: &'a str,
    params: BTreeMap<&'a str, serde_json::Value>,
    identities: Vec<JsonIdentity<'a>>,
    runtime_ms: u64,
    pass: bool,
}

/// 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

fn number(v: f64) -> serde_json::Value {
    if !v.is_finite() {
        return serde_json::Value::Null;
    }
    let n: serde_json::Number = fmt_float(v).parse().expect("finite float is a JSON number");
    serde_json::Value::Number(n)
}

/// Parameter access for scenario runners.
pub struct Ctx<'a> {
    params: &'a Params,
    order: Option<usize>,
    tol: Option<f64>,
}

impl Ctx<'_> {
    fn get(&self, key: &str) -> f64 {
        self.params[key]
    }

    fn int(&self, key: &str, lo: usize, hi: usize) -> Result<usize> {
        let v = self.get(key);
        if v.fract() != 0.0 || v < lo as f64 || v > hi as f64 {
            return Err(Error::InvalidParameter(format!("{key} = {v} must be an integer in {lo}..={hi}")));
        }
        Ok(v as usize)
    }

    fn dim(&self) -> Result<usize> {
        self.int("n", 1, 4)
    }

    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn settings(&self, order: usize, tol: f64) -> Settings {
        Settings::default().with_order(self.order.unwrap_or(order)).with_tol(self.tol(tol))
    }
}

type Runner = fn(&Ctx) -> Result<Outcome>;

/// A registered scenario.
pub struct Scenario {
    pub name: &'static str,
    pub description: &'static str,
    /// The relation the scenario checks, in words.
    pub anchor: &'static str,
    /// Library operations exercised.
    pub covers: &'static [&'static str],
    pub defaults: &'static [(&'static str, f64)],
    runner: Runner,
}

impl Scenario {
    pub fn default_params(&self) -> Params {
        self.defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    /// Defaults overridden by `overrides`; unknown keys are rejected.
    pub fn resolve(&self, overrides: &Params) -> Result<Params> {
        let mut p = self.default_params();
        for (k, v) in overrides {
            match p.get_mut(k) {
                Some(slot) => *slot = *v,
                None => {
                    let known: Vec<&str> = self.defaults.iter().map(|(k, _)| *k).collect();
                    return Err(Error::Config(format!(
                        "scenario '{}' has no parameter '{k}' (known: {})",
                        self.name,
                        known.join(", ")
                    )));
                }
            }
        }
        Ok(p)
    }
}

/// Verifier and solver operations that must be reachable from some scenario.
pub const VERIFIER_OPERATIONS: &[&str] = &[
    "verify_gct",
    "verify_genclap",
    "verify_phom",
    "verify_ppst_and_pi",
    "verify_linear_forms",
    "verify_incompressible",
    "j_integral",
    "l_integral",
    "m_integral",
    "verify_pohozaev",
    "energy_increment",
    "qw_probe",
    "build_shock",
    "shock_pstar",
    "verify_energy_balance",
    "verify_dynamic_clapeyron",
    "admissibility_sweep",
    "delta_e_linear",
    "delta_e_gct",
    "griffith_discrepancy",
    "rice_drucker_linear",
    "check_polar_vanishing",
    "example1_profile",
    "example1_energy",
    "linear_exterior",
    "solve_interface_conditions",
    "shoot_rode",
    "pohozaev_shoot",
    "bar_1d",
    "euler_residuals",
    "jump_pstar",
    "check_graph_orthogonality",
    "extended_piola",
    "noether_richardson",
];

static CATALOG: &[Scenario] = &[
    Scenario {
        name: "example1-gct",
        description: "prestressed ball: Clapeyron boundary form against volume energy and closed form",
        anchor: "energy of the prestressed ball, a^2 (n-1)/(2n^2) |B(0,R)|",
        covers: &["verify_gct", "example1_profile", "example1_energy"],
        defaults: &[("n", 3.0), ("a", 1.0), ("R", 1.0)],
        runner: example1_gct,
    },
    Scenario {
        name: "gct-example1",
        description: "prestressed ball: Clapeyron relation with shifted origins in x and y",
        anchor: "generalized Clapeyron theorem is independent of the origins",
        covers: &["verify_gct", "example1_profile"],
        defaults: &[("n", 3.0), ("a", 1.0), ("R", 1.0), ("ax", 0.2), ("by", -0.3)],
        runner: gct_example1,
    },
    Scenario {
        name: "example1-traction",
        description: "prestressed ball: Eshelby traction on the boundary sphere",
        anchor: "configurational traction P*n = a^2 (n-1)/(2n^2) x/|x| on the boundary",
        covers: &["example1_profile"],
        defaults: &[("n", 3.0), ("a", 1.0), ("R", 1.0)],
        runner: example1_traction,
    },
    Scenario {
        name: "example1-euler",
        description: "prestressed ball: both Euler-Lagrange residuals and the general Clapeyron relation",
        anchor: "equilibrium and configurational equilibrium with explicit x dependence",
        covers: &["euler_residuals", "verify_genclap"],
        defaults: &[("n", 3.0), ("a", 1.0), ("R", 1.0), ("seed", 3.0)],
        runner: example1_euler,
    },
    Scenario {
        name: "example0-bar",
        description: "bar with free length: optimal length, dE/dL = P*, second variation",
        anchor: "derivative of the energy with respect to length is the configurational stress",
        covers: &["bar_1d"],
        defaults: &[("w0", 1.0), ("k", 2.0), ("u0", 0.0), ("u1", 3.0), ("ratio", 0.7)],
        runner: example0_bar,
    },
    Scenario {
        name: "genclap-bodyload",
        description: "one-dimensional bar under a uniform body load",
        anchor: "general Clapeyron relation with explicit y dependence",
        covers: &["verify_genclap"],
        defaults: &[("b", 0.7), ("c", 0.4)],
        runner: genclap_bodyload,
    },
    Scenario {
        name: "phom-hydrostatic",
        description: "hydrostatic state of linear elasticity: classical and homogeneous Clapeyron forms",
        anchor: "classical Clapeyron and both p-homogeneous forms equal |B| p^2/(2 kappa)",
        covers: &["verify_phom", "verify_linear_forms"],
        defaults: &[("n", 3.0), ("lambda", 1.0), ("mu", 1.0), ("p", 1.0), ("R", 1.0)],
        runner: phom_hydrostatic,
    },
    Scenario {
        name: "ppst-pi",
        description: "cross relation between Piola and Eshelby boundary work and its conservation law",
        anchor: "boundary Piola work over p equals boundary Eshelby work over n - p",
        covers: &["verify_ppst_and_pi"],
        defaults: &[("n", 3.0), ("lambda", 1.0), ("mu", 1.0), ("p", 1.0), ("R", 1.0)],
        runner: ppst_pi,
    },
    Scenario {
        name: "linear-forms",
        description: "harmonic-gradient equilibria of isotropic linear elasticity",
        anchor: "linear Clapeyron forms with rotations and the pointwise divergence relation",
        covers: &["verify_linear_forms", "euler_residuals"],
        defaults: &[
            ("n", 3.0),
            ("lambda", 1.3),
            ("mu", 0.7),
            ("c0", 0.3),
            ("c1", -0.2),
            ("c2", 0.5),
            ("omega", 0.4),
            ("R", 1.0),
        ],
        runner: linear_forms,
    },
    Scenario {
        name: "incompressible-shear",
        description: "simple shear of an incompressible neo-Hookean disc with a pressure multiplier",
        anchor: "Clapeyron relation with a pressure multiplier for det F = 1",
        covers: &["verify_incompressible"],
        defaults: &[("mu", 1.0), ("gamma", 1.0), ("pressure", 0.0)],
        runner: incompressible_shear,
    },
    Scenario {
        name: "invariant-closures",
        description: "J, L and M integrals over a closed contour enclosing no singularity",
        anchor: "J, L and M vanish on closed contours around smooth solutions",
        covers: &["j_integral", "l_integral", "m_integral"],
        defaults: &[("radius", 1.0), ("cx", 0.2), ("cy", -0.1), ("order", 64.0)],
        runner: invariant_closures,
    },
    Scenario {
        name: "screw-dislocation",
        description: "antiplane screw dislocation: J and M on two concentric circles",
        anchor: "M integral of a screw dislocation equals mu b^2/(4 pi) on every circle",
        covers: &["j_integral", "m_integral"],
        defaults: &[("mu", 1.0), ("b", 1.0), ("r1", 0.5), ("r2", 2.0), ("order", 64.0)],
        runner: screw_dislocation,
    },
    Scenario {
        name: "crack-kfield",
        description: "antiplane crack-tip field: J and M on two concentric circles",
        anchor: "J integral of the mode III crack equals K^2/(2 mu), path independent",
        covers: &["j_integral", "m_integral"],
        defaults: &[("K", 1.0), ("mu", 1.0), ("r1", 0.5), ("r2", 2.0), ("order", 64.0)],
        runner: crack_kfield,
    },
    Scenario {
        name: "pohozaev",
        description: "positive radial solution of the Lane-Emden problem in a ball",
        anchor: "Pohozaev energy and dilation identities, uniqueness criterion 1/n + 1/k <= 1/p",
        covers: &["verify_pohozaev", "pohozaev_shoot"],
        defaults: &[("n", 3.0), ("q", 3.0), ("R", 1.0), ("p", 2.0)],
        runner: pohozaev,
    },
    Scenario {
        name: "shock-energy-balance",
        description: "single shock of the quartic wave equation: jump conditions and energy balance",
        anchor: "rate of total energy equals boundary power plus shock dissipation",
        covers: &["build_shock", "shock_pstar", "verify_energy_balance"],
        defaults: &[
            ("c2", 1.0),
            ("c4", 1.0),
            ("f_minus", 1.0),
            ("f_plus", 0.0),
            ("v_plus", 0.0),
            ("s0", 0.0),
            ("a", -2.0),
            ("b", 2.0),
            ("t", 0.0),
            ("wa", -0.3),
            ("wb", 0.7),
            ("t_moving", 0.5),
        ],
        runner: shock_energy_balance,
    },
    Scenario {
        name: "shock-clapeyron",
        description: "single shock: dynamic Clapeyron relation at several times",
        anchor: "stored energy equals static boundary work plus inertial shock work",
        covers: &["build_shock", "verify_dynamic_clapeyron"],
        defaults: &[
            ("c2", 1.0),
            ("c4", 1.0),
            ("f_minus", 1.0),
            ("f_plus", 0.0),
            ("v_plus", 0.0),
            ("s0", 0.0),
            ("a", -3.0),
            ("b", 3.0),
            ("t", 1.0),
        ],
        runner: shock_clapeyron,
    },
    Scenario {
        name: "shock-admissibility",
        description: "grid of compressive shocks: Lax condition, driving force sign, dissipation",
        anchor: "Lax-admissible shocks have nonnegative driving force and dissipate energy",
        covers: &["admissibility_sweep", "shock_pstar"],
        defaults: &[("c2", 1.0), ("c4", 1.0), ("side", 10.0)],
        runner: shock_admissibility,
    },
    Scenario {
        name: "void-linear",
        description: "spherical cavity under hydrostatic load: energy change from the exterior problem",
        anchor: "energy change equals minus half the remote stress work on the cavity displacement",
        covers: &["delta_e_linear", "linear_exterior"],
        defaults: &[("n", 3.0), ("lambda", 1.0), ("mu", 1.0), ("p", 1.0), ("order", 32.0)],
        runner: void_linear,
    },
    Scenario {
        name: "void-gct",
        description: "spherical cavity: configurational form of the energy change",
        anchor: "energy change equals minus the configurational work on the cavity over n",
        covers: &["delta_e_gct", "delta_e_linear"],
        defaults: &[("n", 3.0), ("lambda", 1.0), ("mu", 1.0), ("p", 1.0), ("order", 32.0)],
        runner: void_gct,
    },
    Scenario {
        name: "void-griffith",
        description: "far-field discrepancy G: closed forms and truncated sphere integrals",
        anchor: "G = pi p^2/kappa (n = 2), 4 pi p^2/(3 kappa) (n = 3)",
        covers: &["griffith_discrepancy"],
        defaults: &[("n", 3.0), ("lambda", 1.0), ("mu", 1.0), ("p", 1.0), ("order", 32.0)],
        runner: void_griffith,
    },
    Scenario {
        name: "void-rice-drucker",
        description: "Rice-Drucker work form and the configurational creation work",
        anchor: "energy release as work of removed tractions and of configurational forces",
        covers: &["rice_drucker_linear"],
        defaults: &[("n", 3.0), ("lambda", 1.0), ("mu", 1.0), ("p", 1.0), ("order", 32.0)],
        runner: void_rice_drucker,
    },
    Scenario {
        name: "polar-vanishing",
        description: "sphere moment identity for random load and polarization tensors",
        anchor: "integral of n (P xi).(S xi) - <P, S> over the unit sphere vanishes",
        covers: &["check_polar_vanishing"],
        defaults: &[("n", 3.0), ("seed", 11.0), ("pairs", 3.0), ("order", 16.0)],
        runner: polar_vanishing,
    },
    Scenario {
        name: "phase-boundary",
        description: "radial two-phase extremal of a double-well energy: interface and far field",
        anchor: "Maxwell interface data, vanishing interface driving force, far field eta ~ f r + A r^(1-n)",
        covers: &["solve_interface_conditions", "shoot_rode", "jump_pstar"],
        defaults: &[("n", 3.0), ("fa", 1.0), ("fb", 2.0), ("curvature", 1.0), ("bias", 0.0), ("r_max", 0.0)],
        runner: phase_boundary,
    },
    Scenario {
        name: "qw-probe",
        description: "radial formula for the quasiconvex envelope against ball averages",
        anchor: "QW((eta/r) I) equals the ball-average energy of the radial extremal",
        covers: &["qw_probe", "shoot_rode"],
        defaults: &[
            ("n", 3.0),
            ("fa", 1.0),
            ("fb", 2.0),
            ("curvature", 1.0),
            ("bias", 0.0),
            ("r1", 1.5),
            ("r2", 2.0),
            ("r3", 4.0),
        ],
        runner: qw_probe_scenario,
    },
    Scenario {
        name: "energy-increment",
        description: "affine state against the radial two-phase extremal with the same boundary data",
        anchor: "energy difference through the Weierstrass excess and the boundary stress jump",
        covers: &["energy_increment", "shoot_rode"],
        defaults: &[("n", 3.0), ("fa", 1.0), ("fb", 2.0), ("curvature", 1.0), ("bias", 0.0), ("R", 2.0)],
        runner: energy_increment_scenario,
    },
    Scenario {
        name: "parametric-extended",
        description: "extended Lagrangian on the graph: vanishing Eshelby tensor and det-homogeneity",
        anchor: "parametric Lagrangians have identically zero configurational stress",
        covers: &["extended_piola"],
        defaults: &[("seed", 5.0), ("samples", 20.0), ("lambda", 1.0), ("mu", 0.8)],
        runner: parametric_extended,
    },
    Scenario {
        name: "graph-orthogonality",
        description: "tangential components of the stress pair on random surface elements",
        anchor: "(P*n).t + (Pn).(Ft) = W (n.t) vanishes for t orthogonal to n",
        covers: &["check_graph_orthogonality"],
        defaults: &[("seed", 9.0), ("samples", 30.0)],
        runner: graph_orthogonality,
    },
    Scenario {
        name: "noether-identity",
        description: "Noether identity for a non-equilibrium field with explicit x dependence",
        anchor: "configurational residual plus F^T times the equilibrium residual vanishes",
        covers: &["noether_richardson", "euler_residuals"],
        defaults: &[("a", 1.0), ("h", 0.02), ("x1", 0.4), ("x2", -0.3), ("x3", 0.5)],
        runner: noether_identity,
    },
];

pub fn catalog() -> &'static [Scenario] {
    CATALOG
}

pub fn scenario_names() -> Vec<&'static str> {
    CATALOG.iter().map(|s| s.name).collect()
}

pub fn find(name: &str) -> Result<&'static Scenario> {
    CATALOG
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownScenario { name: name.to_string(), available: scenario_names().join(", ") })
}

/// One line per scenario: name, description and anchor, tab separated.
pub fn list() -> String {
    let mut out = String::new();
    for s in CATALOG {
        out.push_str(&format!("{}\t{}\t{}\n", s.name, s.description, s.anchor));
    }
    out
}

/// Runs the scenario. Unknown scenarios and parameters are returned as
/// errors; failures inside the scenario are recorded in the report.
pub fn run(config: &ScenarioConfig) -> Result<RunReport> {
    let scenario = find(&config.scenario)?;
    let params = scenario.resolve(&config.params)?;
    if let Some(t) = config.tol {
        if !(t > 0.0) {
            return Err(Error::Config(format!("tolerance {t} must be positive")));
        }
    }
    let start = Instant::now();
    let ctx = Ctx { params: &params, order: config.order, tol: config.tol };
    let result = (scenario.runner)(&ctx);
    let runtime_ms = if config.deterministic { 0 } else { start.elapsed().as_millis() as u64 };
    let (identities, tables, error) = match result {
        Ok(o) => (o.identities, o.tables, None),
        Err(e) => (Vec::new(), Vec::new(), Some(e)),
    };
    let identities: Vec<IdentityReport> = identities.into_iter().map(|r| r.with_scenario(scenario.name)).collect();
    let pass = error.is_none() && identities.iter().all(|r| r.pass);
    Ok(RunReport {
        version: VERSION.to_string(),
        scenario: scenario.name.to_string(),
        params,
        identities,
        runtime_ms,
        pass,
        tables,
        error,
    })
}

/// Writes the JSON report to `config.out` and tables to `config.tsv_dir`.
pub fn write_outputs(report: &RunReport, config: &ScenarioConfig) -> Result<()> {
    let io = |p: &Path, e: std::io::Error| Error::Io(format!("{}: {e}", p.display()));
    if let Some(path) = &config.out {
        std::fs::write(path, report.to_json()).map_err(|e| io(path, e))?;
    }
    if let Some(dir) = &config.tsv_dir {
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        for t in &report.tables {
            let path = dir.join(format!("{}-{}.tsv", report.scenario, t.name));
            std::fs::write(&path, t.to_tsv()).map_err(|e| io(&path, e))?;
        }
    }
    Ok(())
}

/// Runs `config` once per value of `param`, concurrently, returning reports
/// in input order.
pub fn sweep(config: &ScenarioConfig, param: &str, values: &[f64]) -> Result<Vec<RunReport>> {
    let scenario = find(&config.scenario)?;
    scenario.resolve(&config.params)?;
    if !scenario.defaults.iter().any(|(k, _)| *k == param) {
        return Err(Error::Config(format!("scenario '{}' has no parameter '{param}'", scenario.name)));
    }
    let configs: Vec<ScenarioConfig> = values.iter().map(|v| config.clone().set(param, *v)).collect();
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).max(1);
    let mut out = Vec::with_capacity(values.len());
    for chunk in configs.chunks(workers) {
        let batch: Vec<Result<RunReport>> = std::thread::scope(|s| {
            let handles: Vec<_> = chunk.iter().map(|c| s.spawn(move || run(c))).collect();
            handles.into_iter().map(|h| h.join().expect("scenario thread panicked")).collect()
        });
        for r in batch {
            out.push(r?);
        }
    }
    Ok(out)
}

/// Sweep CSV with columns `value, lhs, rhs, rel_err, pass` taken from the
/// first identity of each report.
pub fn sweep_csv(values: &[f64], reports: &[RunReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["value", "lhs", "rhs", "rel_err", "pass"]).map_err(csv_err)?;
    for (v, r) in values.iter().zip(reports) {
        let (lhs, rhs, rel) = r.headline().map(|h| (h.lhs, h.rhs, h.rel_err)).unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        w.write_record([fmt_float(*v), fmt_float(lhs), fmt_float(rhs), fmt_float(rel), r.pass.to_string()])
            .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// One row of the void parameter table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoidRow {
    pub n: usize,
    pub lambda: f64,
    pub mu: f64,
    pub p: f64,
    pub de_linear: f64,
    pub de_gct: f64,
    pub g: f64,
    /// Largest of the two-pipeline, cavity traction and closed-form `G`
    /// residuals.
    pub residuals: f64,
}

pub fn void_row(n: usize, lambda: f64, mu: f64, p: f64) -> Result<VoidRow> {
    let scn = VoidScenario::hydrostatic(n, lambda, mu, p)?;
    let lin = delta_e_linear(&scn)?;
    let gct = delta_e_gct(&scn)?;
    let g = griffith_discrepancy(&scn)?;
    let residuals = (lin.quadrature - lin.reference)
        .abs()
        .max((gct.quadrature - lin.quadrature).abs())
        .max(cavity_traction(&scn)?)
        .max((g.closed_form - g.hydrostatic).abs());
    Ok(VoidRow { n, lambda, mu, p, de_linear: lin.quadrature, de_gct: gct.quadrature, g: g.closed_form, residuals })
}

/// Void table CSV: `n, lambda, mu, p, dE_linear, dE_gct, G, residuals`.
pub fn void_table_csv(rows: &[VoidRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["n", "lambda", "mu", "p", "dE_linear", "dE_gct", "G", "residuals"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            fmt_float(r.lambda),
            fmt_float(r.mu),
            fmt_float(r.p),
            fmt_float(r.de_linear),
            fmt_float(r.de_gct),
            fmt_float(r.g),
            fmt_float(r.residuals),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn ball(n: usize, r: f64) -> Domain {
    Domain::Ball { n, radius: r, center: vec![0.0; n] }
}

fn done(identities: Vec<IdentityReport>) -> Result<Outcome> {
    Ok(Outcome { identities, tables: Vec::new() })
}

fn profile_table(profile: &RadialProfile, model: &dyn EnergyModel) -> Result<Table> {
    let rows = profile.tsv_rows(model)?.into_iter().map(|r| r.to_vec()).collect();
    Ok(Table::new("profile", &["r", "eta", "eta_prime", "W", "P_rr", "Pstar_rr"], rows))
}

fn example1_gct(c: &Ctx) -> Result<Outcome> {
    let (n, a, r) = (c.dim()?, c.get("a"), c.get("R"));
    let s = c.settings(8, 1e-8);
    let profile = example1_profile(n, a, r)?;
    let model = make_prestressed_radial(a, n)?;
    let gct = verify_gct(&model, &profile.field(), &ball(n, r), s)?;
    let energy = example1_energy(n, a, r)?;
    let closed = IdentityReport::new("prestressed ball energy", gct.lhs, energy.closed_form, s.tol)
        .with_anchor("volume energy equals a^2 (n-1)/(2n^2) |B(0,R)|");
    Ok(Outcome { identities: vec![gct, closed], tables: vec![profile_table(&profile, &model)?] })
}

fn gct_example1(c: &Ctx) -> Result<Outcome> {
    let (n, a, r) = (c.dim()?, c.get("a"), c.get("R"));
    let s = c.settings(8, 1e-8);
    let field = example1_profile(n, a, r)?.field();
    let model = make_prestressed_radial(a, n)?;
    let mut xa = vec![0.0; n];
    xa[0] = c.get("ax");
    let mut yb = vec![0.0; n];
    yb[n - 1] = c.get("by");
    let shifted = verify_gct_shifted(&model, &field, &ball(n, r), &xa, &yb, s)?;
    let plain = verify_gct(&model, &field, &ball(n, r), s)?;
    let origin = IdentityReport::new("origin independence", shifted.rhs, plain.rhs, c.tol(1e-10))
        .with_anchor("boundary forms with shifted and unshifted origins agree");
    done(vec![shifted, origin])
}

fn example1_traction(c: &Ctx) -> Result<Outcome> {
    let (n, a, r) = (c.dim()?, c.get("a"), c.get("R"));
    let order = c.order.unwrap_or(16);
    let field = example1_profile(n, a, r)?.field();
    let model = make_prestressed_radial(a, n)?;
    let nf = n as f64;
    let k = a * a * (nf - 1.0) / (2.0 * nf * nf);
    let rule = sphere_rule(n, r, order)?;
    let normals = rule.normals.as_ref().expect("sphere normals");
    let (mut esh, mut pio): (f64, f64) = (0.0, 0.0);
    for (x, nu) in rule.nodes.iter().zip(normals) {
        let (p, ps) = crate::tensor_core::stresses_at(&model, &field, x)?;
        let xh: Vec<f64> = x.iter().map(|v| v / norm(x)).collect();
        let dev: Vec<f64> = ps.mul_vec(nu).iter().zip(&xh).map(|(u, e)| u - k * e).collect();
        esh = esh.max(max_abs(&dev));
        pio = pio.max(max_abs(&p.mul_vec(nu)));
    }
    let tol = c.tol(1e-10);
    done(vec![
        IdentityReport::residual("Eshelby boundary traction", esh, tol)
            .with_anchor("P*n = a^2 (n-1)/(2n^2) x/|x| at every boundary node"),
        IdentityReport::residual("Piola boundary traction", pio, tol)
            .with_anchor("the prestressed ball is traction free"),
    ])
}

fn example1_euler(c: &Ctx) -> Result<Outcome> {
    let (n, a, r) = (c.dim()?, c.get("a"), c.get("R"));
    let s = c.settings(8, 1e-8);
    let field = example1_profile(n, a, r)?.field();
    let model = make_prestressed_radial(a, n)?;
    let mut worst: f64 = 0.0;
    let h = FD_RESIDUAL_STEP * r;
    for x in interior_points(&field, &ball(n, r), 20, c.get("seed") as u64, 0.05 * r)? {
        let (e, es) = euler_residuals(&model, &field, &x, h)?;
        worst = worst.max(max_abs(&e)).max(max_abs(&es));
    }
    let euler = IdentityReport::residual("Euler-Lagrange residuals", worst, 1e-6)
        .with_anchor("W_y - div P and W_x - div P* vanish in the interior");
    let gen = verify_genclap(&model, &field, &ball(n, r), s)?;
    done(vec![gen, euler])
}

fn example0_bar(c: &Ctx) -> Result<Outcome> {
    let bar = make_bar_potential(c.get("w0"), c.get("k"))?;
    let sol = bar_1d(bar, c.get("u0"), c.get("u1"))?;
    let at_opt = sol.check(sol.l_opt);
    let off = sol.check(c.get("ratio") * sol.l_opt);
    let ke = bar.k * sol.eps_opt;
    done(vec![
        IdentityReport::new("length derivative", off.de_dl, off.pstar, c.tol(1e-6))
            .with_anchor("dE/dL equals the configurational stress P*"),
        IdentityReport::residual("stationary length", at_opt.de_dl, 1e-8)
            .with_anchor("dE/dL vanishes at the optimal length"),
        IdentityReport::new("optimal strain", ke * ke.tanh(), 1.0, 1e-12)
            .with_anchor("P* = 0 reduces to k e tanh(k e) = 1"),
        IdentityReport::new("second length derivative", off.d2e_dl2, off.curvature, 1e-5)
            .with_anchor("d2E/dL2 equals e^2 W''(e)/L"),
    ])
}

fn genclap_bodyload(c: &Ctx) -> Result<Outcome> {
    let (b, k) = (c.get("b"), c.get("c"));
    let model = BodyLoad1D { b };
    let field = DeformationField::smooth(
        1,
        1,
        move |x| vec![-b * x[0] * x[0] / 2.0 + k * x[0]],
        move |x| Mat::from_rows(&[&[-b * x[0] + k]]),
    );
    done(vec![verify_genclap(&model, &field, &Domain::Interval { a: 0.0, b: 1.0 }, c.settings(24, 1e-10))?])
}

fn hydrostatic_setup(c: &Ctx) -> Result<(crate::energy_models::LinearIsotropic, DeformationField, Domain, f64)> {
    let n = c.dim()?;
    let m = make_linear_isotropic(c.get("lambda"), c.get("mu"), n)?;
    let p = c.get("p");
    let field = DeformationField::affine(Mat::identity(n).scale(p / (n as f64 * m.kappa())), vec![0.0; n]);
    let r = c.get("R");
    let closed = p * p * ball_volume(n, r) / (2.0 * m.kappa());
    Ok((m, field, ball(n, r), closed))
}

fn phom_hydrostatic(c: &Ctx) -> Result<Outcome> {
    let (m, field, domain, closed) = hydrostatic_setup(c)?;
    let s = c.settings(24, 1e-9);
    let classical = verify_linear_forms(m.lambda, m.mu, &field, &domain, s)?.remove(0);
    let (first, second) = verify_phom(&m, &field, &domain, s)?;
    let energy = IdentityReport::new("hydrostatic energy", first.lhs, closed, s.tol)
        .with_anchor("energy equals |B| p^2/(2 kappa)");
    let classical_closed = IdentityReport::new("classical Clapeyron, closed form", classical.rhs, closed, s.tol)
        .with_anchor("half the boundary work equals |B| p^2/(2 kappa)");
    done(vec![energy, classical, classical_closed, first, second])
}

fn ppst_pi(c: &Ctx) -> Result<Outcome> {
    let (m, field, domain, _) = hydrostatic_setup(c)?;
    let (cross, div) = verify_ppst_and_pi(&m, &field, &domain, c.settings(24, 1e-9))?;
    done(vec![cross, div])
}

fn linear_forms(c: &Ctx) -> Result<Outcome> {
    let n = c.dim()?;
    let (lambda, mu, r) = (c.get("lambda"), c.get("mu"), c.get("R"));
    let field = harmonic_gradient_field(n, [c.get("c0"), c.get("c1"), c.get("c2")], c.get("omega"), vec![0.1; n])?;
    let mut reports = verify_linear_forms(lambda, mu, &field, &ball(n, r), c.settings(24, 1e-8))?;
    let m = make_linear_isotropic(lambda, mu, n)?;
    let mut worst: f64 = 0.0;
    for x in interior_points(&field, &ball(n, r), 20, 1, 0.05 * r)? {
        worst = worst.max(max_abs(&euler_residuals(&m, &field, &x, 1e-3)?.0));
    }
    reports.push(
        IdentityReport::residual("equilibrium of the harmonic family", worst, 1e-6)
            .with_anchor("div sigma vanishes for gradients of harmonic cubics"),
    );
    done(reports)
}

fn incompressible_shear(c: &Ctx) -> Result<Outcome> {
    let (mu, gamma, pr) = (c.get("mu"), c.get("gamma"), c.get("pressure"));
    let s = c.settings(24, 1e-10);
    let base = verify_incompressible(mu, gamma, pr, s)?;
    let shifted = verify_incompressible(mu, gamma, pr + 5.0, s)?;
    let closed = IdentityReport::new("shear energy", base.lhs, 0.5 * PI * mu * gamma * gamma, s.tol)
        .with_anchor("neo-Hookean shear energy on the unit disc is pi mu gamma^2/2");
    let inv = IdentityReport::new("pressure independence", base.rhs, shifted.rhs, s.tol)
        .with_anchor("the pressure multiplier does no work for det F = 1");
    done(vec![base, closed, inv])
}

fn contour(c: &Ctx, radius: f64, center: &[f64]) -> Result<crate::fields_domains::QuadratureRule> {
    let order = c.int("order", 4, 4096)?;
    Ok(sphere_rule(2, radius, order)?.translated(center))
}

fn invariant_closures(c: &Ctx) -> Result<Outcome> {
    let tol = c.tol(1e-10);
    let rule = contour(c, c.get("radius"), &[c.get("cx"), c.get("cy")])?;
    let dir = make_dirichlet(1.0, 1, 2)?;
    let scalar = DeformationField::smooth(
        1,
        2,
        |x| vec![x[0].powi(3) - 3.0 * x[0] * x[1] * x[1] + 0.5 * (3.0 * x[0] * x[0] * x[1] - x[1].powi(3))],
        |x| {
            Mat::from_rows(&[&[
                3.0 * x[0] * x[0] - 3.0 * x[1] * x[1] + 3.0 * x[0] * x[1],
                -6.0 * x[0] * x[1] + 1.5 * (x[0] * x[0] - x[1] * x[1]),
            ]])
        },
    );
    let j = j_integral(&dir, &scalar, &rule)?;
    let m = m_integral(&dir, &scalar, &rule)?;
    let lin = make_linear_isotropic(1.3, 0.7, 2)?;
    let vector = harmonic_gradient_field(2, [0.3, -0.2, 0.5], 0.4, vec![0.1, -0.2])?;
    let l = l_integral(&lin, &vector, &rule)?;
    let jl = j_integral(&lin, &vector, &rule)?;
    done(vec![
        IdentityReport::residual("J closure, harmonic scalar", max_abs(&j), tol)
            .with_anchor("J vanishes on closed contours around smooth solutions"),
        IdentityReport::residual("M closure, harmonic scalar", m.abs(), tol)
            .with_anchor("M vanishes on closed contours around smooth solutions"),
        IdentityReport::residual("J closure, linear elasticity", max_abs(&jl), tol)
            .with_anchor("J vanishes on closed contours around smooth solutions"),
        IdentityReport::residual("L closure, linear elasticity", max_abs(&l), tol)
            .with_anchor("L vanishes on closed contours around smooth solutions"),
    ])
}

fn screw_dislocation(c: &Ctx) -> Result<Outcome> {
    let (mu, b) = (c.get("mu"), c.get("b"));
    let model = make_dirichlet(mu, 1, 2)?;
    let field = screw_dislocation_field(b);
    let (r1, r2) = (contour(c, c.get("r1"), &[0.0, 0.0])?, contour(c, c.get("r2"), &[0.0, 0.0])?);
    let tol = c.tol(1e-9);
    let (m1, m2) = (m_integral(&model, &field, &r1)?, m_integral(&model, &field, &r2)?);
    let (j1, j2) = (j_integral(&model, &field, &r1)?, j_integral(&model, &field, &r2)?);
    done(vec![
        IdentityReport::new("screw dislocation M", m1, mu * b * b / (4.0 * PI), tol)
            .with_anchor("M equals mu b^2/(4 pi)"),
        IdentityReport::new("M path independence", m1, m2, tol).with_anchor("M is the same on both circles"),
        IdentityReport::residual("J path independence", max_abs(&[j1[0] - j2[0], j1[1] - j2[1]]), tol)
            .with_anchor("J is the same on both circles"),
        IdentityReport::residual("screw dislocation J", max_abs(&j1), 1e-10)
            .with_anchor("J of a screw dislocation vanishes by symmetry"),
    ])
}

fn crack_kfield(c: &Ctx) -> Result<Outcome> {
    let (k, mu) = (c.get("K"), c.get("mu"));
    let model = make_dirichlet(mu, 1, 2)?;
    let field = crack_mode3_field(k, mu);
    let (r1, r2) = (contour(c, c.get("r1"), &[0.0, 0.0])?, contour(c, c.get("r2"), &[0.0, 0.0])?);
    let tol = c.tol(1e-9);
    let (j1, j2) = (j_integral(&model, &field, &r1)?, j_integral(&model, &field, &r2)?);
    let (m1, m2) = (m_integral(&model, &field, &r1)?, m_integral(&model, &field, &r2)?);
    done(vec![
        IdentityReport::new("crack-tip J", j1[0], k * k / (2.0 * mu), tol).with_anchor("J1 equals K^2/(2 mu)"),
        IdentityReport::new("J path independence", j1[0], j2[0], tol).with_anchor("J1 is the same on both circles"),
        IdentityReport::residual("transverse J", j1[1].abs().max(j2[1].abs()), tol)
            .with_anchor("J2 vanishes by symmetry of the crack field"),
        IdentityReport::new("M path independence", m1, m2, tol).with_anchor("M is the same on both circles"),
    ])
}

fn verdict_code(v: UniquenessVerdict) -> f64 {
    match v {
        UniquenessVerdict::Holds => 1.0,
        UniquenessVerdict::Critical => 0.0,
        UniquenessVerdict::Fails => -1.0,
    }
}

fn pohozaev(c: &Ctx) -> Result<Outcome> {
    let n = c.int("n", 1, 12)?;
    let check = verify_pohozaev(n, c.get("q"), c.get("R"), c.tol(1e-6))?;
    let mut reports = vec![check.energy_identity, check.dilation_identity];
    let (nf, p) = (n as f64, c.get("p"));
    for k in [4.0, 6.0] {
        let v = pohozaev_verdict(nf, p, k);
        let margin = 1.0 / p - 1.0 / nf - 1.0 / k;
        let expected = if margin.abs() < 1e-12 {
            0.0
        } else {
            margin.signum()
        };
        reports.push(
            IdentityReport::new(&format!("uniqueness verdict k = {k}"), verdict_code(v), expected, 0.0)
                .with_anchor("uniqueness criterion 1/n + 1/k <= 1/p")
                .with_note(v.as_str()),
        );
    }
    done(reports)
}

fn shock_from(c: &Ctx) -> Result<ShockSolution1D> {
    let pot = make_dynamic_potential(c.get("c2"), c.get("c4"))?;
    Ok(build_shock(pot, c.get("f_minus"), c.get("f_plus"), c.get("v_plus"))?.with_origin(c.get("s0")))
}

fn shock_energy_balance(c: &Ctx) -> Result<Outcome> {
    let sol = shock_from(c)?;
    let (a, b, t) = (c.get("a"), c.get("b"), c.get("t"));
    let balance = verify_energy_balance(&sol, a, b, t)?;
    let moving = verify_energy_balance_moving(&sol, a, b, c.get("wa"), c.get("wb"), c.get("t_moving"))?;
    let ps = shock_pstar(&sol)?;
    let jt = 1e-12;
    let rows = sol.snapshot_rows(a, b, t, 41).into_iter().map(|r| r.to_vec()).collect();
    Ok(Outcome {
        identities: vec![
            balance,
            moving,
            IdentityReport::residual("Rankine-Hugoniot", sol.rh_residual(), jt)
                .with_anchor("momentum jump V[v] + [P] = 0"),
            IdentityReport::residual("Hadamard", sol.hadamard_residual(), jt)
                .with_anchor("kinematic compatibility [v] + V[F] = 0"),
            IdentityReport::residual("continuity of y", sol.kinematic_residual(), jt)
                .with_anchor("the deformation is continuous across the shock"),
            IdentityReport::new("space-time driving force", -ps.spacetime, ps.pstar, jt)
                .with_anchor("p* = [U] - {P}[F] equals minus the space-time jump of the Eshelby tensor"),
        ],
        tables: vec![Table::new("snapshot", &["x", "v", "F", "e"], rows)],
    })
}

fn shock_clapeyron(c: &Ctx) -> Result<Outcome> {
    let sol = shock_from(c)?;
    let (a, b, t) = (c.get("a"), c.get("b"), c.get("t"));
    let mut reports = Vec::new();
    for tt in [0.5 * t, t, 2.0 * t] {
        let d = verify_dynamic_clapeyron(&sol, a, b, tt)?;
        let mut r = d.report;
        r.name = format!("dynamic Clapeyron, t = {tt}");
        reports.push(r);
    }
    done(reports)
}

fn shock_admissibility(c: &Ctx) -> Result<Outcome> {
    let pot = make_dynamic_potential(c.get("c2"), c.get("c4"))?;
    let side = c.int("side", 1, 1000)?;
    let sw = admissibility_sweep(pot, side)?;
    let bench = shock_pstar(&build_shock(pot, 1.0, 0.0, 0.0)?)?.pstar;
    done(vec![
        IdentityReport::new("benchmark driving force", bench, 0.25 * pot.c4, 1e-12)
            .with_anchor("p* = c4/4 for the states F- = 1, F+ = 0"),
        IdentityReport::new("Lax-admissible pairs", sw.lax_admissible as f64, sw.pairs as f64, 0.0)
            .with_anchor("every compressive pair of the sweep satisfies the Lax condition"),
        IdentityReport::at_least("nonnegative driving force", sw.min_pstar, 0.0, 0.0)
            .with_anchor("p* >= 0 for Lax-admissible shocks"),
        IdentityReport::at_least("nonpositive dissipation", -sw.max_dissipation, 0.0, 0.0)
            .with_anchor("V times the space-time driving force is nonpositive"),
        IdentityReport::residual("jump conditions on the sweep", sw.max_jump_residual, 1e-12)
            .with_anchor("Rankine-Hugoniot and Hadamard hold for every pair"),
    ])
}

fn void_from(c: &Ctx) -> Result<VoidScenario> {
    let mut scn = VoidScenario::hydrostatic(c.dim()?, c.get("lambda"), c.get("mu"), c.get("p"))?;
    scn.order = c.order.unwrap_or(c.int("order", 4, 4096)?);
    Ok(scn)
}

fn void_linear(c: &Ctx) -> Result<Outcome> {
    let scn = void_from(c)?;
    let lin = delta_e_linear(&scn)?;
    done(vec![
        IdentityReport::new("void energy change", lin.quadrature, lin.reference, c.tol(1e-8))
            .with_anchor("-1/2 of the remote stress work equals -(p^2/2)(1/(n kappa) + 1/(2(n-1)mu)) n|B|"),
        IdentityReport::residual("traction-free cavity", cavity_traction(&scn)?, 1e-10)
            .with_anchor("sigma n vanishes on the cavity surface"),
    ])
}

fn void_gct(c: &Ctx) -> Result<Outcome> {
    let scn = void_from(c)?;
    let lin = delta_e_linear(&scn)?;
    let gct = delta_e_gct(&scn)?;
    done(vec![
        IdentityReport::new("configurational energy change", gct.quadrature, lin.quadrature, c.tol(1e-8))
            .with_anchor("configurational and exterior-problem energy changes agree"),
        IdentityReport::new("Eshelby form", gct.reference, gct.quadrature, 1e-10)
            .with_anchor("the energy form equals minus the configurational work over n"),
    ])
}

fn void_griffith(c: &Ctx) -> Result<Outcome> {
    let scn = void_from(c)?;
    let g = griffith_discrepancy(&scn)?;
    let kappa = scn.kappa();
    let reference = match scn.n {
        2 => PI * scn.p * scn.p / kappa,
        _ => 4.0 * PI * scn.p * scn.p / (3.0 * kappa),
    };
    let sphere =
        griffith_sphere_integral(scn.n, scn.lambda, scn.mu, &scn.f0(), &scn.polarization(), scn.order)?;
    let mut reports = vec![
        IdentityReport::new("discrepancy G", g.closed_form, reference, c.tol(1e-8))
            .with_anchor("G = pi p^2/kappa (n = 2) or 4 pi p^2/(3 kappa) (n = 3)"),
        IdentityReport::new("hydrostatic G", g.hydrostatic, g.closed_form, 1e-8)
            .with_anchor("isotropic closed form equals p^2 |B|/kappa"),
        IdentityReport::new("sphere-moment G", sphere, g.closed_form, 1e-8)
            .with_anchor("moment integral over the unit sphere reproduces the closed form"),
    ];
    for (r, v) in &g.truncated {
        reports.push(
            IdentityReport::new(&format!("truncated G at R = {r}"), *v, g.closed_form, 1e-4)
                .with_anchor("truncated far-field integral tends to G"),
        );
    }
    reports.push(
        IdentityReport::new("extrapolated G", g.extrapolated, g.closed_form, 1e-4)
            .with_anchor("Richardson extrapolation of the truncated integrals"),
    );
    done(reports)
}

fn void_rice_drucker(c: &Ctx) -> Result<Outcome> {
    let scn = void_from(c)?;
    let (a, b) = rice_drucker_linear(&scn, c.tol(1e-8))?;
    done(vec![a, b])
}

fn random_mat(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    Mat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
}

fn polar_vanishing(c: &Ctx) -> Result<Outcome> {
    let n = c.int("n", 1, 4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(c.get("seed") as u64);
    let order = c.order.unwrap_or(c.int("order", 2, 4096)?);
    let mut reports = Vec::new();
    for i in 0..c.int("pairs", 0, 1000)? {
        let (p0, s) = (random_mat(&mut rng, n), random_mat(&mut rng, n));
        reports.push(
            IdentityReport::residual(&format!("polarization moment, pair {}", i + 1), check_polar_vanishing(&p0, &s, n, order)?, c.tol(1e-10))
                .with_anchor("sphere moment of n (P xi).(S xi) - <P, S> vanishes"),
        );
    }
    done(reports)
}

struct TwoPhase {
    model: IsotropicSv,
    phi: ScalarPotential,
    f0: f64,
    beta: f64,
    profile: RadialProfile,
    r_max: f64,
}

fn two_phase(c: &Ctx) -> Result<TwoPhase> {
    let n = c.int("n", 2, 3)?;
    let (fa, fb, k, bias) = (c.get("fa"), c.get("fb"), c.get("curvature"), c.get("bias"));
    let model = make_double_well_sv(fa, fb, k, bias, n)?;
    let (f0, beta) = solve_interface_conditions(&model)?;
    let r_max = match c.params.get("r_max") {
        Some(&r) if r > 0.0 => r,
        _ => default_r_max(n),
    };
    let profile = shoot_rode(&model, f0, beta, n, r_max)?;
    let phi = ScalarPotential::DoubleWell { fa, fb, curvature: k, bias };
    Ok(TwoPhase { model, phi, f0, beta, profile, r_max })
}

fn phase_boundary(c: &Ctx) -> Result<Outcome> {
    let tp = two_phase(c)?;
    let n = tp.model.n;
    let (phi, f0, beta) = (&tp.phi, tp.f0, tp.beta);
    let slope = phi.d1(f0) - phi.d1(beta);
    let tangent = phi.value(beta) - phi.value(f0) - phi.d1(f0) * (beta - f0);
    let mut worst: f64 = 0.0;
    let fm = Mat::identity(n).scale(f0);
    for x in sphere_rule(n, 1.0, 6)?.nodes {
        let fp = radial_gradient(&x, f0, beta);
        worst = worst.max(jump_pstar(&tp.model, &x, &x, &fm, &fp, &x)?.abs());
    }
    let ff = tp.profile.far_field.clone().ok_or_else(|| Error::SelfCheck("missing far-field fit".into()))?;
    let alpha = ff.alpha.unwrap_or(f64::NAN);
    let twice = shoot_rode(&tp.model, f0, beta, n, 2.0 * tp.r_max)?.far_field.expect("fit present");
    let mut fit = IdentityReport::new("far-field exponent", alpha, n as f64 - 1.0, 0.05)
        .with_anchor("eta - f r decays like r^(1-n)");
    if let Some(w) = &ff.warning {
        fit = fit.with_note(w);
    }
    Ok(Outcome {
        identities: vec![
            IdentityReport::residual("interface driving force", worst, 1e-8)
                .with_anchor("p* vanishes across the radial phase boundary"),
            IdentityReport::residual("equal slopes", slope, 1e-10).with_anchor("Maxwell condition on derivatives"),
            IdentityReport::residual("common tangent", tangent, 1e-10).with_anchor("Maxwell equal-area condition"),
            fit,
            IdentityReport::new("far-field f under doubling", ff.f_inf, twice.f_inf, 1e-6)
                .with_anchor("f_inf is stable when r_max doubles"),
            IdentityReport::new("far-field A under doubling", ff.a, twice.a, 1e-6)
                .with_anchor("A is stable when r_max doubles"),
        ],
        tables: vec![profile_table(&tp.profile, &tp.model)?],
    })
}

fn qw_probe_scenario(c: &Ctx) -> Result<Outcome> {
    let tp = two_phase(c)?;
    let s = c.settings(24, 1e-5);
    let mut reports = Vec::new();
    for key in ["r1", "r2", "r3"] {
        let q = qw_probe(&tp.model, &tp.profile, c.get(key), s)?;
        let mut r = q.report;
        r.name = format!("radial quasiconvex envelope, r = {}", q.r);
        reports.push(r);
    }
    let r = 0.5 * tp.r_max;
    let (eta, deta) = tp.profile.eval(r)?;
    let d = tp.model.radial(deta, eta / r);
    let formula = d.w1 * eta / r + d.w - deta * d.w1;
    let ff = tp.profile.far_field.clone().expect("fit present");
    let n = tp.model.n;
    let x = vec![1.0; n];
    let w_inf = tp.model.w(&x, &x, &Mat::identity(n).scale(ff.f_inf))?;
    reports.push(
        IdentityReport::new("far-field envelope", formula, w_inf, 1e-5)
            .with_anchor("QW at large r tends to W(f_inf I)")
            .with_note(&format!("evaluated at r = {r}")),
    );
    done(reports)
}

fn energy_increment_scenario(c: &Ctx) -> Result<Outcome> {
    let tp = two_phase(c)?;
    let n = tp.model.n;
    let radius = c.get("R");
    let fr = tp.profile.eval(radius)?.0 / radius;
    let affine = affine_profile(n, fr, radius)?.field();
    let inc = energy_increment(&tp.model, &affine, &tp.profile.field(), &ball(n, radius), c.settings(24, 1e-6))?;
    done(inc.reports)
}

fn parametric_extended(c: &Ctx) -> Result<Outcome> {
    let base: SharedModel = std::sync::Arc::new(make_linear_isotropic(c.get("lambda"), c.get("mu"), 2)?);
    let ext = ExtendedModel::new(base.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(c.get("seed") as u64);
    let (mut esh, mut qh): (f64, f64) = (0.0, 0.0);
    for _ in 0..c.int("samples", 1, 100_000)? {
        let z: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let fhat = Mat::from_fn(4, 2, |i, j| rng.random_range(-0.3..0.3) + if i % 2 == j { 1.0 } else { 0.0 });
        if fhat.block(0, 0, 2, 2).det() <= 0.1 {
            continue;
        }
        let q = Mat::from_fn(2, 2, |i, j| rng.random_range(-0.5..0.5) + if i == j { 1.5 } else { 0.0 });
        esh = esh.max(extended_eshelby_residual(base.as_ref(), &z, &fhat)?);
        qh = qh.max(qhom_residual(base.as_ref(), &z, &fhat, &q)?);
    }
    let flags = check_flags(&ext, &mut rng, 10)?;
    done(vec![
        IdentityReport::residual("extended Eshelby tensor", esh, 1e-12)
            .with_anchor("configurational stress of a parametric Lagrangian vanishes"),
        IdentityReport::residual("det-homogeneity", qh, 1e-12)
            .with_anchor("extended energy scales with det Q under F -> F Q"),
        IdentityReport::residual("parametric flag check", flags.parametric.unwrap_or(f64::NAN), 1e-12)
            .with_anchor("declared parametric symmetry holds on random samples"),
    ])
}

fn graph_orthogonality(c: &Ctx) -> Result<Outcome> {
    let models: Vec<SharedModel> = vec![
        std::sync::Arc::new(make_linear_isotropic(1.0, 0.5, 3)?),
        std::sync::Arc::new(make_double_well_sv(1.0, 2.0, 1.0, 0.0, 3)?),
        std::sync::Arc::new(make_power_p(3.0, 3, 3)?),
        std::sync::Arc::new(make_prestressed_radial(1.0, 3)?),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(c.get("seed") as u64);
    let mut worst: f64 = 0.0;
    for _ in 0..c.int("samples", 1, 100_000)? {
        for m in &models {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(0.2..1.0)).collect();
            let f = Mat::from_fn(3, 3, |i, j| rng.random_range(-0.3..0.3) + if i == j { 1.2 } else { 0.0 });
            let raw: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let nu: Vec<f64> = raw.iter().map(|v| v / norm(&raw)).collect();
            let t0: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let proj = dot(&t0, &nu);
            let tau: Vec<f64> = t0.iter().zip(&nu).map(|(t, e)| t - proj * e).collect();
            let y = f.mul_vec(&x);
            worst = worst.max(check_graph_orthogonality(m.as_ref(), &x, &y, &f, &nu, &tau)?.abs());
        }
    }
    done(vec![IdentityReport::residual("graph orthogonality", worst, c.tol(1e-12))
        .with_anchor("(P*n).t + (Pn).(Ft) vanishes for tangents t")])
}

fn noether_identity(c: &Ctx) -> Result<Outcome> {
    let a = c.get("a");
    let model = make_prestressed_radial(a, 3)?;
    let field = DeformationField::smooth(
        3,
        3,
        |x| vec![x[0] + 0.2 * x[1].sin(), x[1] + 0.1 * (x[0] * x[2]).cos(), x[2] + 0.15 * x[0] * x[1]],
        |x| {
            Mat::from_rows(&[
                &[1.0, 0.2 * x[1].cos(), 0.0],
                &[-0.1 * x[2] * (x[0] * x[2]).sin(), 1.0, -0.1 * x[0] * (x[0] * x[2]).sin()],
                &[0.15 * x[1], 0.15 * x[0], 1.0],
            ])
        },
    );
    let x = [c.get("x1"), c.get("x2"), c.get("x3")];
    let rc = noether_richardson(&model, &field, &x, c.get("h"))?;
    let ratios = rc.ratios();
    let (e, _) = euler_residuals(&model, &field, &x, rc.steps[2])?;
    done(vec![
        IdentityReport::residual("Noether identity, extrapolated", rc.extrapolated[1], 1e-6)
            .with_anchor("configurational residual plus F^T times the equilibrium residual vanishes")
            .with_note(&format!("raw defects {:?}", rc.defects)),
        IdentityReport::new("Richardson ratio", ratios[1], 4.0, 0.05)
            .with_anchor("finite-difference defect decays at second order"),
        IdentityReport::at_least("non-equilibrium field", max_abs(&e), 1e-3, 0.0)
            .with_anchor("the test field is not an equilibrium"),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_covers_every_verifier() {
        assert!(CATALOG.len() >= 18);
        for op in VERIFIER_OPERATIONS {
            assert!(CATALOG.iter().any(|s| s.covers.contains(op)), "no scenario covers {op}");
        }
        for s in CATALOG {
            assert!(!s.anchor.is_empty() && !s.description.is_empty());
        }
        let mut names = scenario_names();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), CATALOG.len());
    }

    #[test]
    fn unknown_scenario_lists_catalog() {
        let e = run(&ScenarioConfig::new("foo")).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("example1-gct"));
    }

    #[test]
    fn toml_and_flags() {
        let mut c = ScenarioConfig::new("void-linear").set("p", 2.0);
        c.merge_toml("p = 3.0\nmu = 2\norder = 16\n").unwrap();
        assert_eq!(c.params["p"], 2.0);
        assert_eq!(c.params["mu"], 2.0);
        assert_eq!(c.order, Some(16));
        assert!(c.merge_toml("p = \"x\"").is_err());
        assert_eq!(parse_assignment("a = 2.5").unwrap(), ("a".into(), 2.5));
    }
}
