mod pathfile;
mod presets;
mod scenario;
mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use credeq::ramsey::{auto_construct, verify_path, VerificationReport};
use credeq::sensitivity::{solve, sweep};

use scenario::{parse_scenario, Diagnostic, Format, ScenarioFile, SweepParam, SweepSpec};
use table::{emit, sha256_hex, Cell, ResultTable};

#[derive(Parser)]
#[command(name = "credeq", version, about = "Equilibria of economies with earnings-based credit limits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One-period economies
    Static {
        #[command(subcommand)]
        command: StaticCommand,
    },
    /// Infinite-horizon economies truncated at a horizon
    Ramsey {
        #[command(subcommand)]
        command: RamseyCommand,
    },
    /// Regenerate a built-in experiment
    Reproduce {
        /// One of fig-a1, fig-gamma2, fig-gamma3, ramsey-a1-shock, ramsey-gamma2-compare
        preset: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum StaticCommand {
    /// Solve for the equilibrium rate, output and allocations
    Solve {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve on a grid of one agent's parameter
    Sweep {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Agent id; overrides the scenario's sweep block
        #[arg(long)]
        agent: Option<usize>,
        /// A, gamma or S
        #[arg(long, value_parser = parse_param)]
        param: Option<SweepParam>,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
}

#[derive(Subcommand)]
enum RamseyCommand {
    /// Construct and certify an equilibrium path
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 1e-6)]
        tvc_tol: f64,
    },
    /// Check a path file against a scenario
    Verify {
        path: PathBuf,
        scenario: PathBuf,
        /// Per-period residuals are written here
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 1e-6)]
        tvc_tol: f64,
    },
}

fn parse_param(s: &str) -> Result<SweepParam, String> {
    match s {
        "A" => Ok(SweepParam::A),
        "gamma" => Ok(SweepParam::Gamma),
        "S" => Ok(SweepParam::S),
        _ => Err(format!("expected A, gamma or S, got '{s}'")),
    }
}

enum Failure {
    Io(String),
    Invalid(Vec<Diagnostic>),
    Solver(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Solver(_) => 3,
        }
    }
}

fn invalid(path: &str, message: impl Into<String>) -> Failure {
    Failure::Invalid(vec![Diagnostic { path: path.into(), line: None, message: message.into() }])
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<(ScenarioFile, String), Failure> {
    let bytes = read(path)?;
    let format = Format::detect(&path.to_string_lossy(), &String::from_utf8_lossy(&bytes));
    let file = parse_scenario(&bytes, format).map_err(Failure::Invalid)?;
    Ok((file, sha256_hex(&bytes)))
}

fn write(table: &ResultTable, out: Option<&Path>) -> Result<(), Failure> {
    emit(table, out).map_err(|e| Failure::Io(format!("writing output: {e}")))
}

fn static_solve(scenario: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let (file, hash) = load(scenario)?;
    let econ = file.to_static().map_err(Failure::Invalid)?;
    let eq = solve(&econ).map_err(|e| Failure::Solver(e.to_string()))?;
    let mut header = vec!["R".to_string(), "Y".into(), "regime".into()];
    let mut row = vec![Cell::Num(eq.r), Cell::Num(eq.y), Cell::Text(eq.regime.to_string())];
    for al in &eq.allocations {
        header.extend([format!("k_{}", al.id), format!("b_{}", al.id)]);
        row.extend([Cell::Num(al.k), Cell::Num(al.b)]);
    }
    let mut table = ResultTable::new(header);
    table.meta("scenario_sha256", hash);
    table.push(row);
    write(&table, out)
}

fn static_sweep(scenario: &Path, out: Option<&Path>, overrides: SweepOverrides) -> Result<(), Failure> {
    let (file, hash) = load(scenario)?;
    let econ = file.to_static().map_err(Failure::Invalid)?;
    let spec = overrides.apply(file.sweep.clone())?;
    let pos = econ.position(spec.agent).ok_or_else(|| invalid("sweep.agent", format!("no agent with id {}", spec.agent)))?;
    let grid = sweep(&econ, pos, spec.param.into(), spec.from, spec.to, spec.steps)
        .map_err(|e| invalid("sweep", e.to_string()))?;

    let param_name = match spec.param {
        SweepParam::A => "A",
        SweepParam::Gamma => "gamma",
        SweepParam::S => "S",
    };
    let mut header = vec![format!("{param_name}_{}", spec.agent), "R".into(), "Y".into(), "regime".into()];
    header.extend(econ.agents.iter().map(|a| format!("k_{}", a.id)));
    let mut table = ResultTable::new(header);
    table.meta("scenario_sha256", hash);
    for row in &grid.rows {
        let mut cells = vec![Cell::Num(row.value)];
        match &row.outcome {
            Ok(p) => {
                cells.extend([Cell::Num(p.r), Cell::Num(p.y), Cell::Text(p.regime.to_string())]);
                cells.extend(p.k.iter().map(|&k| Cell::Num(k)));
            }
            Err(e) => {
                eprintln!("{param_name} = {}: {e}", row.value);
                cells.extend([Cell::Num(f64::NAN), Cell::Num(f64::NAN), Cell::Text("error".into())]);
                cells.extend(econ.agents.iter().map(|_| Cell::Num(f64::NAN)));
            }
        }
        table.push(cells);
    }
    write(&table, out)
}

struct SweepOverrides {
    agent: Option<usize>,
    param: Option<SweepParam>,
    from: Option<f64>,
    to: Option<f64>,
    steps: Option<usize>,
}

impl SweepOverrides {
    fn apply(self, base: Option<SweepSpec>) -> Result<SweepSpec, Failure> {
        let missing = |field: &str| invalid(&format!("sweep.{field}"), format!("missing: give --{field} or a sweep block"));
        Ok(SweepSpec {
            agent: self.agent.or(base.as_ref().map(|b| b.agent)).ok_or_else(|| missing("agent"))?,
            param: self.param.or(base.as_ref().map(|b| b.param)).ok_or_else(|| missing("param"))?,
            from: self.from.or(base.as_ref().map(|b| b.from)).ok_or_else(|| missing("from"))?,
            to: self.to.or(base.as_ref().map(|b| b.to)).ok_or_else(|| missing("to"))?,
            steps: self.steps.or(base.as_ref().map(|b| b.steps)).ok_or_else(|| missing("steps"))?,
        })
    }
}

fn summarize(report: &VerificationReport) {
    eprintln!(
        "max residual {:.3e}, tvc proxy {:.3e}: {}",
        report.max_residual,
        report.tvc_proxy,
        if report.pass { "pass" } else { "fail" }
    );
    for f in report.failures.iter().take(20) {
        eprintln!("  {f}");
    }
    if report.failures.len() > 20 {
        eprintln!("  ... {} more", report.failures.len() - 20);
    }
}

fn ramsey_simulate(scenario: &Path, out: Option<&Path>, horizon: Option<usize>, tol: f64, tvc_tol: f64) -> Result<(), Failure> {
    let (file, hash) = load(scenario)?;
    let econ = file.to_dynamic(horizon).map_err(Failure::Invalid)?;
    let auto = auto_construct(&econ).map_err(|e| Failure::Solver(e.to_string()))?;
    let report = verify_path(&econ, &auto.path, tol, tvc_tol);
    eprintln!("rates: {}", auto.path.hypothesis);
    summarize(&report);
    let mut table = pathfile::path_table(&econ, &auto.path);
    table
        .meta("scenario_sha256", hash)
        .meta("tol", tol)
        .meta("tvc_tol", tvc_tol)
        .meta("max_residual", format!("{:.3e}", report.max_residual))
        .meta("tvc_proxy", format!("{:.3e}", report.tvc_proxy));
    write(&table, out)
}

fn ramsey_verify(path: &Path, scenario: &Path, out: Option<&Path>, tol: f64, tvc_tol: f64) -> Result<(), Failure> {
    let (file, hash) = load(scenario)?;
    let text = String::from_utf8(read(path)?).map_err(|_| invalid("", format!("{}: not UTF-8", path.display())))?;
    let draft = file.to_dynamic(None).map_err(Failure::Invalid)?;
    let eq_path = pathfile::read_path(&text, &draft).map_err(|e| invalid("", format!("{}: {e}", path.display())))?;
    let econ = file.to_dynamic(Some(eq_path.horizon)).map_err(Failure::Invalid)?;
    let report = verify_path(&econ, &eq_path, tol, tvc_tol);
    summarize(&report);
    if out.is_some() {
        let mut table = ResultTable::new([
            "t",
            "multiplier_sign",
            "slackness",
            "collateral",
            "capital_sign",
            "budget",
            "savings",
            "bond_market",
            "capital_market",
            "output",
        ]);
        table.meta("scenario_sha256", hash).meta("path_sha256", sha256_hex(text.as_bytes()));
        table.meta("tvc_proxy", format!("{:.3e}", report.tvc_proxy)).meta("pass", report.pass);
        for p in &report.periods {
            table.push(vec![
                Cell::Int(p.t),
                Cell::Num(p.multiplier_sign),
                Cell::Num(p.slackness),
                Cell::Num(p.collateral),
                Cell::Num(p.capital_sign),
                Cell::Num(p.budget),
                Cell::Num(p.savings),
                Cell::Num(p.bond_market),
                Cell::Num(p.capital_market),
                Cell::Num(p.output),
            ]);
        }
        write(&table, out)?;
    }
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Solver("path failed verification".into()))
    }
}

fn reproduce(preset: &str, out: Option<&Path>) -> Result<(), Failure> {
    match presets::run(preset).map_err(Failure::Solver)? {
        Some(table) => write(&table, out),
        None => Err(invalid("preset", format!("unknown preset '{preset}'; expected one of {}", presets::NAMES.join(", ")))),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Static { command } => match command {
            StaticCommand::Solve { scenario, out } => static_solve(&scenario, out.as_deref()),
            StaticCommand::Sweep { scenario, out, agent, param, from, to, steps } => {
                static_sweep(&scenario, out.as_deref(), SweepOverrides { agent, param, from, to, steps })
            }
        },
        Command::Ramsey { command } => match command {
            RamseyCommand::Simulate { scenario, out, horizon, tol, tvc_tol } => {
                ramsey_simulate(&scenario, out.as_deref(), horizon, tol, tvc_tol)
            }
            RamseyCommand::Verify { path, scenario, out, tol, tvc_tol } => {
                ramsey_verify(&path, &scenario, out.as_deref(), tol, tvc_tol)
            }
        },
        Command::Reproduce { preset, out } => reproduce(&preset, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Io(msg) => eprintln!("error: {msg}"),
                Failure::Solver(msg) => eprintln!("solver failure: {msg}"),
                Failure::Invalid(diags) => {
                    for d in diags {
                        eprintln!("invalid: {d}");
                    }
                }
            }
            ExitCode::from(failure.code())
        }
    }
}
