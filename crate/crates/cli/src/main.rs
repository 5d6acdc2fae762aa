//! `wsmp`: solve, evaluate, canonicalize, check and draw WSMP schedules.
//!
//! Exit codes: 0 ok, 2 parse error, 3 wrong solver, 4 size limit,
//! 5 infeasible or invalid schedule.

mod check;
mod gantt;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use wsmp::engine::{self, ScheduleError};
use wsmp::hardness::{self, HardnessError, N3dmInput};
use wsmp::solvers::{self, SearchLimits, SolverError};
use wsmp::transforms::{self, TransformError};
use wsmp::{GeneralSchedule, Instance, SyncSchedule};

#[derive(Parser)]
#[command(
    name = "wsmp",
    version,
    about = "Exact weighted shared multi-processor scheduling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal schedule for an instance with equal weights
    Solve { instance: PathBuf },
    /// Optimal schedule by exhaustive search
    Brute {
        instance: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_jobs: usize,
    },
    /// Start times, overlaps and total value of a synchronized schedule
    Eval {
        instance: PathBuf,
        schedule: PathBuf,
    },
    /// Turn an interval-level schedule into a synchronized one
    Transform {
        instance: PathBuf,
        schedule: PathBuf,
        #[arg(long, value_enum, default_value_t = Target::Synchronized)]
        to: Target,
    },
    /// Report structural properties of a schedule
    Check {
        instance: PathBuf,
        schedule: PathBuf,
        /// Comma-separated subset of v-shape, ordered, synchronized, inclusive, weight-inclusive
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "v-shape,ordered,synchronized,inclusive"
        )]
        properties: Vec<check::Property>,
    },
    /// Build the WSMP instance of an N3DM input
    #[command(name = "gen-n3dm")]
    GenN3dm {
        input: PathBuf,
        /// Write the instance here and the provenance to <stem>.provenance.json
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide a small N3DM input through its equitable schedules
    #[command(name = "decide-n3dm")]
    DecideN3dm { input: PathBuf },
    /// Draw a schedule as a text chart
    Gantt {
        instance: PathBuf,
        schedule: PathBuf,
        #[arg(long, default_value_t = 60)]
        width: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Synchronized,
}

#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    WrongSolver(String),
    #[error("{0}")]
    TooLarge(String),
    #[error("{0}")]
    Infeasible(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::WrongSolver(_) => 3,
            Failure::TooLarge(_) => 4,
            Failure::Infeasible(_) => 5,
        }
    }
}

impl From<ScheduleError> for Failure {
    fn from(e: ScheduleError) -> Self {
        match e {
            ScheduleError::Infeasible { .. } => Failure::Infeasible(e.to_string()),
            _ => Failure::Parse(e.to_string()),
        }
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::UnequalWeights => Failure::WrongSolver(
                "weights are not all equal; run `wsmp brute` for an exact optimum".into(),
            ),
            SolverError::TooLarge { .. } | SolverError::CandidateLimit(_) => {
                Failure::TooLarge(e.to_string())
            }
            SolverError::Schedule(e) => e.into(),
            SolverError::NotAscending(_) => Failure::Parse(e.to_string()),
        }
    }
}

impl From<TransformError> for Failure {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Json(_) => Failure::Parse(e.to_string()),
            _ => Failure::Infeasible(e.to_string()),
        }
    }
}

impl From<HardnessError> for Failure {
    fn from(e: HardnessError) -> Self {
        match e {
            HardnessError::TooLarge { .. } => Failure::TooLarge(e.to_string()),
            _ => Failure::Parse(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    Instance::from_json(&read(path)?)
        .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

/// A schedule file holds either per-processor orders or per-job intervals.
pub(crate) enum AnySchedule {
    Sync(SyncSchedule),
    General(GeneralSchedule),
}

fn load_schedule(path: &Path) -> Result<AnySchedule, Failure> {
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    let parsed = if value.get("processors").is_some() {
        SyncSchedule::from_json(&text)
            .map(AnySchedule::Sync)
            .map_err(|e| e.to_string())
    } else if value.get("jobs").is_some() {
        GeneralSchedule::from_json(&text)
            .map(AnySchedule::General)
            .map_err(|e| e.to_string())
    } else {
        Err("expected a \"processors\" or a \"jobs\" key".to_string())
    };
    parsed.map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn load_sync(path: &Path) -> Result<SyncSchedule, Failure> {
    SyncSchedule::from_json(&read(path)?)
        .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn load_n3dm(path: &Path) -> Result<N3dmInput, Failure> {
    N3dmInput::from_json(&read(path)?)
        .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn schedule_value(s: &SyncSchedule) -> Value {
    serde_json::from_str(&s.to_json()).expect("schedule JSON is valid")
}

fn with_fields(s: &SyncSchedule, fields: Value) -> String {
    let mut v = schedule_value(s);
    if let (Value::Object(out), Value::Object(extra)) = (&mut v, fields) {
        out.extend(extra);
    }
    pretty(&v)
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Solve { instance } => {
            let inst = load_instance(&instance)?;
            let (s, value) = solvers::solve_equal_weights(&inst)?;
            Ok(with_fields(&s, json!({ "value": value.to_string() })))
        }
        Command::Brute { instance, max_jobs } => {
            let inst = load_instance(&instance)?;
            let limits = SearchLimits {
                max_jobs,
                ..SearchLimits::default()
            };
            let (s, value) = solvers::brute_force(&inst, &limits)?;
            Ok(with_fields(&s, json!({ "value": value.to_string() })))
        }
        Command::Eval { instance, schedule } => {
            let inst = load_instance(&instance)?;
            let s = load_sync(&schedule)?;
            let report = engine::evaluate(&s, &inst)?;
            Ok(serde_json::to_string_pretty(&report).expect("report serializes") + "\n")
        }
        Command::Transform {
            instance,
            schedule,
            to: Target::Synchronized,
        } => {
            let inst = load_instance(&instance)?;
            let g = match load_schedule(&schedule)? {
                AnySchedule::General(g) => g,
                AnySchedule::Sync(s) => GeneralSchedule::from_sync(&s, &inst)?,
            };
            let out = transforms::synchronize(&g, &inst)?;
            let delta = &out.value_after - &out.value_before;
            Ok(with_fields(
                &out.schedule,
                json!({
                    "value_before": out.value_before.to_string(),
                    "value_after": out.value_after.to_string(),
                    "delta": delta.to_string(),
                    "push_iterations": out.push_iterations,
                }),
            ))
        }
        Command::Check {
            instance,
            schedule,
            properties,
        } => {
            let inst = load_instance(&instance)?;
            let s = load_schedule(&schedule)?;
            Ok(check::report(&inst, &s, &properties)?)
        }
        Command::GenN3dm { input, out } => {
            let input = load_n3dm(&input)?;
            let hi = hardness::gen_instance(&input)?;
            let params = format!("M={} m_param={} K={}\n", hi.big_m, hi.m_param, hi.k);
            let mut instance_json = hi.inst.to_json();
            instance_json.push('\n');
            let sidecar =
                serde_json::to_string_pretty(&hi.sidecar()).expect("sidecar serializes") + "\n";
            match out {
                Some(path) => {
                    let sidecar_path = path.with_extension("provenance.json");
                    write_file(&path, &instance_json)?;
                    write_file(&sidecar_path, &sidecar)?;
                    Ok(params)
                }
                None => {
                    eprint!("{params}");
                    Ok(instance_json)
                }
            }
        }
        Command::DecideN3dm { input } => {
            let input = load_n3dm(&input)?;
            let d = hardness::decide(&input)?;
            let witness = d.witness.map(|m| {
                m.into_iter()
                    .map(|(i, j, k)| {
                        json!([
                            format!("A{}", i + 1),
                            format!("B{}", j + 1),
                            format!("C{}", k + 1)
                        ])
                    })
                    .collect::<Vec<_>>()
            });
            Ok(pretty(&json!({
                "solvable": d.solvable,
                "witness": witness,
                "best_equitable_value": d.best_equitable_value.to_string(),
                "threshold": d.threshold.to_string(),
            })))
        }
        Command::Gantt {
            instance,
            schedule,
            width,
        } => {
            let inst = load_instance(&instance)?;
            let g = match load_schedule(&schedule)? {
                AnySchedule::Sync(s) => GeneralSchedule::from_sync(&s, &inst)?,
                AnySchedule::General(g) => {
                    let violations = transforms::validate(&g, &inst);
                    if !violations.is_empty() {
                        return Err(TransformError::Invalid(violations).into());
                    }
                    g
                }
            };
            Ok(gantt::render(&inst, &g, width.max(1)))
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not worth a panic
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
