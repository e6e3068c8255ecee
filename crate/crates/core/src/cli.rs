//! Command-line front end: argument parsing and the four workflows.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::closest::{a3_quintic, closest_product_x, product_distance, CaseId, ROOT_WINDOW};
use crate::dynamics::{case_crossings, evolve, trajectory_csv, DynamicsConfig};
use crate::ensemble::{
    reports_csv, run_ensemble, HistogramQuantity, HistogramSpec, PhaseMode, SamplerConfig,
};
use crate::error::{Error, Result};
use crate::format::to_json_string;
use crate::poly::CompanionMatrix;
use crate::quantifiers::{geometric_discord_general, quantifiers_x, CorrelationReport};
use crate::registry::{discord_evaluators, product_solvers, root_finders};
use crate::state::{matrix_to_x_params, parse_state, StateInput, XStateParams};

const ABOUT: &str = "Geometric (Hilbert-Schmidt) correlations of two-qubit states";

const LONG_ABOUT: &str = "\
Geometric (Hilbert-Schmidt) correlations of two-qubit states.

BASIS
  All 4x4 matrices use the ordered basis {|11>, |10>, |01>, |00>}, so rho11 is
  the population of |11> and rho44 that of |00>. sigma3 = diag(1, -1).

STATE FILES (JSON)
  X state, coherences rho14*exp(i*gamma14) and rho23*exp(i*gamma23):
    {\"kind\": \"x\", \"rho11\": 0.5, \"rho22\": 0, \"rho33\": 0, \"rho44\": 0.5,
     \"rho14\": 0.5, \"rho23\": 0, \"gamma14\": 0, \"gamma23\": 0}
  gamma14 and gamma23 are optional and default to 0.
  Dense matrix, real and imaginary parts as rows:
    {\"kind\": \"dense\", \"re\": [[..4..], ..4 rows..], \"im\": [[..4..], ..4 rows..]}
  Dense input with X structure is analyzed as an X state.

OUTPUT
  Floats are written with 17 significant digits. Output depends only on the
  arguments and input files.

EXIT CODES
  0 ok, 2 unreadable input or bad arguments, 3 invalid state, 4 numerical
  failure (including oracle mismatches).";

#[derive(Debug, Parser)]
#[command(name = "geocorr", version, about = ABOUT, long_about = LONG_ABOUT)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Full correlation report of one state, as JSON.
    Analyze {
        state_file: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random X-state ensemble: residual histograms, per-state table and metadata.
    ///
    /// Writes into the directory given by --out: rel_residual.csv and
    /// rel_residual_with_l.csv (columns bin_lo,bin_hi,count; 200 bins over
    /// [-1, 0] and [0, 0.5]), states.csv (one row of quantifiers per sample)
    /// and metadata.json.
    Sample {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
        /// Keep only states of this case (1 or 2).
        #[arg(long)]
        case: Option<CaseId>,
        /// Coherence phases: uniform ("free") or zero ("zero").
        #[arg(long, default_value = "free")]
        phase_mode: PhaseMode,
        /// Output directory, created if missing.
        #[arg(long)]
        out: PathBuf,
    },
    /// Trajectory of an X state under two amplitude-damping channels, as CSV.
    ///
    /// Times are dimensionless (gamma0 * t); --steps grid points span [0, t-max].
    Evolve {
        state_file: PathBuf,
        #[arg(long)]
        gamma0: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        t_max: f64,
        #[arg(long)]
        steps: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check every registered solver against the analytic results.
    OracleCheck {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Also write the summary as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name) and runs the command. Normal
/// output goes to `stdout`, diagnostics to stderr. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 0 {
                let _ = write!(stdout, "{e}");
            } else {
                eprint!("{e}");
            }
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("geocorr: {e}");
            e.exit_code()
        }
    }
}

fn execute(cmd: CliCommand, stdout: &mut dyn Write) -> Result<()> {
    match cmd {
        CliCommand::Analyze { state_file, out } => {
            let json = analyze(&read_state(&state_file)?)?;
            emit(&json, out.as_deref(), stdout)
        }
        CliCommand::Sample {
            seed,
            count,
            case,
            phase_mode,
            out,
        } => {
            let cfg = SamplerConfig::new(seed, count)
                .with_case(case)
                .with_phase_mode(phase_mode);
            sample(&cfg, &out)?;
            writeln!(stdout, "wrote {}", out.display())?;
            Ok(())
        }
        CliCommand::Evolve {
            state_file,
            gamma0,
            lambda,
            t_max,
            steps,
            out,
        } => {
            let initial = match read_state(&state_file)? {
                StateInput::X(p) => p,
                StateInput::Dense(rho) => matrix_to_x_params(&rho)?,
            };
            let cfg = DynamicsConfig {
                gamma0,
                lambda,
                t_max,
                steps,
                initial,
            };
            let points = evolve(&cfg)?;
            for c in case_crossings(&cfg, &points, 1e-6) {
                log::info!(
                    "case {} -> {} at t = {:.6}",
                    c.from.number(),
                    c.to.number(),
                    c.t
                );
            }
            emit(&trajectory_csv(&points), out.as_deref(), stdout)
        }
        CliCommand::OracleCheck { seed, trials, out } => {
            let summary = oracle_check(seed, trials)?;
            stdout.write_all(summary.table().as_bytes())?;
            if let Some(path) = out {
                fs::write(path, to_json_string(&summary))?;
            }
            if summary.passed() {
                Ok(())
            } else {
                Err(Error::Mismatch(
                    "some checks exceeded their tolerance".into(),
                ))
            }
        }
    }
}

fn read_state(path: &Path) -> Result<StateInput> {
    let text = fs::read_to_string(path)?;
    parse_state(&text)
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct XAnalysis<'a> {
    kind: &'static str,
    state: &'a XStateParams,
    report: &'a CorrelationReport,
}

#[derive(Serialize)]
struct DenseAnalysis {
    kind: &'static str,
    d_g: f64,
    note: &'static str,
}

/// JSON report for one state.
pub fn analyze(input: &StateInput) -> Result<String> {
    let p = match input {
        StateInput::X(p) => *p,
        StateInput::Dense(rho) => match matrix_to_x_params(rho) {
            Ok(p) => p,
            Err(Error::NotXState { .. }) => {
                return Ok(to_json_string(&DenseAnalysis {
                    kind: "dense",
                    d_g: geometric_discord_general(&rho.to_bloch()),
                    note: "not an X state: only the geometric discord has a closed form here",
                }));
            }
            Err(e) => return Err(e),
        },
    };
    let report = quantifiers_x(&p)?;
    Ok(to_json_string(&XAnalysis {
        kind: "x",
        state: &p,
        report: &report,
    }))
}

/// Runs an ensemble and writes its files into `dir`.
pub fn sample(cfg: &SamplerConfig, dir: &Path) -> Result<()> {
    let specs = [
        HistogramSpec::new(HistogramQuantity::RelResidual, 200),
        HistogramSpec::new(HistogramQuantity::RelResidualWithL, 200),
    ];
    let run = run_ensemble(cfg, &specs)?;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("rel_residual.csv"), run.histograms[0].to_csv())?;
    fs::write(
        dir.join("rel_residual_with_l.csv"),
        run.histograms[1].to_csv(),
    )?;
    fs::write(dir.join("states.csv"), reports_csv(&run.reports))?;
    fs::write(dir.join("metadata.json"), to_json_string(&run.metadata))?;
    Ok(())
}

/// Largest deviation seen by one cross-check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub failures: usize,
}

impl CheckResult {
    fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_deviation: 0.0,
            tolerance,
            failures: 0,
        }
    }

    fn record(&mut self, deviation: f64) {
        self.max_deviation = self.max_deviation.max(deviation);
        if deviation.is_nan() || deviation > self.tolerance {
            self.failures += 1;
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSummary {
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<CheckResult>,
}

impl OracleSummary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failures == 0)
    }

    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<36} {:>24} {:>10} {:>8}\n",
            "check", "max deviation", "tolerance", "result"
        );
        for c in &self.checks {
            out.push_str(&format!(
                "{:<36} {:>24.16e} {:>10.0e} {:>8}\n",
                c.name,
                c.max_deviation,
                c.tolerance,
                if c.failures == 0 { "ok" } else { "FAIL" }
            ));
        }
        out
    }
}

/// Compares every registered closest-product solver, root finder and
/// discord evaluator with the analytic X-state results on `trials` random
/// states.
pub fn oracle_check(seed: u64, trials: usize) -> Result<OracleSummary> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be positive".into()));
    }
    let states = crate::ensemble::sample_x_states(&SamplerConfig::new(seed, trials))?.states;
    let solvers = product_solvers(Box::new(CompanionMatrix), seed);
    let finders = root_finders();
    let evaluators = discord_evaluators();

    let mut checks = Vec::new();
    let mut solver_f: Vec<_> = solvers
        .iter()
        .map(|s| CheckResult::new(format!("product {} distance", s.name()), 1e-8))
        .collect();
    let mut solver_t: Vec<_> = solvers
        .iter()
        .map(|s| CheckResult::new(format!("product {} transverse", s.name()), 1e-6))
        .collect();
    let mut finder_r: Vec<_> = finders
        .iter()
        .map(|f| CheckResult::new(format!("root finder {}", f.name()), 1e-9))
        .collect();
    let mut eval_d: Vec<_> = evaluators
        .iter()
        .map(|e| CheckResult::new(format!("discord {}", e.name()), 1e-6))
        .collect();

    for p in &states {
        let rho = p.to_density();
        let bloch = p.bloch();
        let pair = closest_product_x(p)?;
        let f_ref = product_distance(&bloch, &pair);
        for (k, solver) in solvers.iter().enumerate() {
            let sol = solver.solve(&rho)?;
            solver_f[k].record((sol.distance - f_ref).abs());
            let t = [sol.pair.a[0], sol.pair.a[1], sol.pair.b[0], sol.pair.b[1]];
            solver_t[k].record(t.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        }
        // every finder must recover the reference a3 among its roots
        let quintic = a3_quintic(p.x3(), p.y3(), p.t33());
        for (k, finder) in finders.iter().enumerate() {
            let roots = finder.real_roots(&quintic, ROOT_WINDOW.0, ROOT_WINDOW.1);
            let dev = if quintic.is_zero() {
                0.0
            } else {
                roots
                    .iter()
                    .map(|r| (r - pair.a[2]).abs())
                    .fold(f64::INFINITY, f64::min)
            };
            finder_r[k].record(dev);
        }
        let d_ref = quantifiers_x(p)?.d_g;
        for (k, e) in evaluators.iter().enumerate() {
            eval_d[k].record((e.discord(&rho)? - d_ref).abs());
        }
    }
    checks.extend(solver_f);
    checks.extend(solver_t);
    checks.extend(finder_r);
    checks.extend(eval_d);
    Ok(OracleSummary {
        seed,
        trials,
        checks,
    })
}
