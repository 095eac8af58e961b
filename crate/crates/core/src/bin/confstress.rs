//! Command-line front end: `list`, `run` and `sweep`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use confstress::cli_report::{
    list, parse_assignment, run, sweep, sweep_csv, void_row, void_table_csv, write_outputs, ScenarioConfig,
};
use confstress::Error;

#[derive(Parser)]
#[command(name = "confstress", version, about = "Verify configurational-stress identities on reference scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List registered scenarios.
    List,
    /// Run one scenario and emit its JSON report.
    Run {
        scenario: String,
        #[command(flatten)]
        common: Common,
        /// JSON report path (standard output when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for TSV profile exports.
        #[arg(long)]
        tsv: Option<PathBuf>,
    },
    /// Run a scenario over a list of values of one parameter.
    Sweep {
        scenario: String,
        #[arg(long)]
        param: String,
        /// Comma-separated values; may be empty.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// CSV output path.
        #[arg(long)]
        out: PathBuf,
        /// Also write the void parameter table (void scenarios only).
        #[arg(long)]
        void_table: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Parameter override `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// TOML file with parameter values; `--set` wins.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Quadrature order override.
    #[arg(long)]
    order: Option<usize>,
    /// Tolerance override.
    #[arg(long)]
    tol: Option<f64>,
    /// Write runtime_ms = 0 for reproducible output.
    #[arg(long)]
    deterministic: bool,
}

impl Common {
    fn config(&self, scenario: &str) -> Result<ScenarioConfig, Error> {
        let mut c = ScenarioConfig::new(scenario);
        for s in &self.set {
            let (k, v) = parse_assignment(s)?;
            c.params.insert(k, v);
        }
        if let Some(path) = &self.config {
            c.merge_file(path)?;
        }
        c.order = self.order.or(c.order);
        c.tol = self.tol.or(c.tol);
        c.deterministic = self.deterministic;
        Ok(c)
    }
}

fn parse_values(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse::<f64>().map_err(|_| Error::Config(format!("'{v}' is not a number"))))
        .collect()
}

fn write(path: &PathBuf, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn execute(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::List => {
            print!("{}", list());
            Ok(0)
        }
        Command::Run { scenario, common, out, tsv } => {
            let mut config = common.config(&scenario)?;
            config.out = out;
            config.tsv_dir = tsv;
            let report = run(&config)?;
            if let Some(e) = &report.error {
                eprintln!("confstress: {scenario}: {e}");
            }
            write_outputs(&report, &config)?;
            if config.out.is_none() {
                print!("{}", report.to_json());
            }
            Ok(report.exit_code())
        }
        Command::Sweep { scenario, param, values, out, void_table, common } => {
            let config = common.config(&scenario)?;
            let values = parse_values(&values)?;
            let reports = sweep(&config, &param, &values)?;
            write(&out, &sweep_csv(&values, &reports)?)?;
            if let Some(path) = void_table {
                let mut rows = Vec::with_capacity(reports.len());
                for r in &reports {
                    let p = &r.params;
                    let get = |k: &str| {
                        p.get(k).copied().ok_or_else(|| Error::Config(format!("'{scenario}' is not a void scenario")))
                    };
                    rows.push(void_row(get("n")? as usize, get("lambda")?, get("mu")?, get("p")?)?);
                }
                write(&path, &void_table_csv(&rows)?)?;
            }
            let mut code = 0;
            for r in &reports {
                if let Some(e) = &r.error {
                    eprintln!("confstress: {scenario}: {e}");
                }
                code = code.max(r.exit_code());
            }
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("confstress: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
