use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use seamloc_core::error::Category;
use seamloc_core::fingerprint::{estimate_position, EstimatorMode};
use seamloc_core::harness::formats::{self, read_json, write_json, write_text};
use seamloc_core::harness::{evaluate, fixtures, run_suite, track, EvalReport, EventLog, PipelineConfig};
use seamloc_core::sim::{generate_walk, scenario_suite, GroundTruth, NoiseModel};
use seamloc_core::{Error, FloorPlan, Result};

const TRACE_FILE: &str = "trace.csv";
const TRUTH_FILE: &str = "truth.json";
const EVENTS_FILE: &str = "events.json";
const PATH_FILE: &str = "path.csv";

#[derive(Parser)]
#[command(name = "seamloc", version, about = "Seamless indoor/outdoor pedestrian localization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Pipeline configuration (TOML). Missing fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the tracker and noise seeds from the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoisePreset {
    None,
    Calibrated,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Nn,
    Knn,
    Wknn,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize IMU traces with ground truth: one walk from a script, or
    /// a suite of crossing / turn-back trials on a floor plan.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Floor plan (TOML). Defaults to the built-in two-building campus.
        #[arg(long)]
        plan: Option<PathBuf>,
        /// Walk script (TOML). Without it a trial suite is generated.
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Fraction of suite trials that turn back before the first door.
        #[arg(long)]
        turnback_fraction: Option<f64>,
        /// Noise preset; overrides the configuration's noise section.
        #[arg(long, value_enum)]
        noise: Option<NoisePreset>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the tracking pipeline on a trace, or on every trial directory
    /// under `--runs`.
    Track {
        #[command(flatten)]
        common: Common,
        #[arg(long, required_unless_present = "runs", conflicts_with = "runs")]
        trace: Option<PathBuf>,
        #[arg(long)]
        runs: Option<PathBuf>,
        #[arg(long)]
        plan: PathBuf,
        /// Output directory. With `--runs` it defaults to the trial
        /// directories themselves.
        #[arg(long, required_unless_present = "runs")]
        out: Option<PathBuf>,
    },
    /// Estimate a position from one RSS observation and a radio map.
    Locate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        radiomap: PathBuf,
        #[arg(long)]
        observation: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score tracked trials against ground truth and write the report.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Directory of trial directories holding events and truth files.
        #[arg(long, required_unless_present = "trials", conflicts_with = "trials")]
        runs: Option<PathBuf>,
        /// Simulate and track this many trials in memory instead.
        #[arg(long)]
        trials: Option<usize>,
        /// Floor plan for `--trials`. Defaults to the built-in campus.
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long)]
        turnback_fraction: Option<f64>,
        #[arg(long, value_enum)]
        noise: Option<NoisePreset>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a saved report as text, CDF points and the confusion matrix.
    Report {
        #[command(flatten)]
        common: Common,
        /// `report.json` written by `eval`.
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(common: &Common) -> Result<PipelineConfig> {
    let mut cfg = match &common.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
        cfg.noise.seed = seed;
    }
    Ok(cfg)
}

fn load_plan_or_default(path: Option<&Path>) -> Result<FloorPlan> {
    match path {
        Some(p) => formats::load_plan(p),
        None => Ok(fixtures::campus_plan()),
    }
}

fn apply_noise(cfg: &mut PipelineConfig, preset: Option<NoisePreset>) {
    let seed = cfg.noise.seed;
    match preset {
        Some(NoisePreset::None) => cfg.noise = NoiseModel::none(seed),
        Some(NoisePreset::Calibrated) => cfg.noise = NoiseModel::calibrated(seed),
        None => {}
    }
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn trial_name(i: usize) -> String {
    format!("trial_{i:03}")
}

/// Subdirectories of `runs` containing `file`, sorted by name.
fn trial_dirs(runs: &Path, file: &str) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(runs).map_err(|source| Error::Io {
        path: runs.to_path_buf(),
        source,
    })?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join(file).is_file())
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(Error::InvalidInput(format!("no trial directories with {file} under {}", runs.display())));
    }
    Ok(dirs)
}

fn write_log(dir: &Path, log: &EventLog) -> Result<()> {
    create_dir(dir)?;
    write_json(&dir.join(EVENTS_FILE), log)?;
    write_text(&dir.join(PATH_FILE), &log.path_csv())
}

fn write_report(dir: &Path, report: &EvalReport) -> Result<()> {
    create_dir(dir)?;
    write_text(&dir.join("report.txt"), &report.text())?;
    write_text(&dir.join("cdf.csv"), &report.cdf_csv())?;
    write_text(&dir.join("confusion.csv"), &report.confusion_csv())
}

fn emit(text: &str) -> Result<()> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Error::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            common,
            plan,
            script,
            trials,
            turnback_fraction,
            noise,
            out,
        } => {
            let mut cfg = load_config(&common)?;
            apply_noise(&mut cfg, noise);
            if let Some(f) = turnback_fraction {
                cfg.scenario.turnback_fraction = f;
            }
            let plan = load_plan_or_default(plan.as_deref())?;
            create_dir(&out)?;
            formats::save_plan(&out.join("plan.toml"), &plan)?;
            if let Some(script_path) = script {
                let script = formats::load_script(&script_path, &plan)?;
                let (trace, truth) = generate_walk(&script, &cfg.noise, cfg.scenario.sample_rate)?;
                formats::save_trace(&out.join(TRACE_FILE), &trace)?;
                write_json(&out.join(TRUTH_FILE), &truth)?;
                emit(&format!("{} samples, {} steps -> {}\n", trace.len(), truth.step_count(), out.display()))?;
            } else {
                let walks = scenario_suite(&plan, trials, &cfg.noise, &cfg.scenario)?;
                for (i, (trace, truth)) in walks.iter().enumerate() {
                    let dir = out.join(trial_name(i));
                    create_dir(&dir)?;
                    formats::save_trace(&dir.join(TRACE_FILE), trace)?;
                    write_json(&dir.join(TRUTH_FILE), truth)?;
                }
                emit(&format!("{} trials -> {}\n", walks.len(), out.display()))?;
            }
        }
        Command::Track {
            common,
            trace,
            runs,
            plan,
            out,
        } => {
            let cfg = load_config(&common)?;
            let plan = formats::load_plan(&plan)?;
            if let Some(trace_path) = trace {
                let out = out.expect("clap requires --out with --trace");
                let log = track(&formats::load_trace(&trace_path)?, &plan, &cfg)?;
                write_log(&out, &log)?;
                emit(&format!("{} steps, {} switches -> {}\n", log.step_count(), log.switches().count(), out.display()))?;
            } else if let Some(runs) = runs {
                let dirs = trial_dirs(&runs, TRACE_FILE)?;
                for (i, dir) in dirs.iter().enumerate() {
                    let trial_cfg = PipelineConfig {
                        seed: cfg.seed.wrapping_add(i as u64),
                        ..cfg.clone()
                    };
                    let log = track(&formats::load_trace(&dir.join(TRACE_FILE))?, &plan, &trial_cfg)?;
                    let target = match &out {
                        Some(o) => o.join(dir.file_name().expect("trial dirs have names")),
                        None => dir.clone(),
                    };
                    write_log(&target, &log)?;
                }
                emit(&format!("tracked {} trials\n", dirs.len()))?;
            }
        }
        Command::Locate {
            common,
            radiomap,
            observation,
            mode,
            k,
            out,
        } => {
            let mut cfg = load_config(&common)?.fingerprint;
            if let Some(m) = mode {
                cfg.mode = match m {
                    Mode::Nn => EstimatorMode::Nn,
                    Mode::Knn => EstimatorMode::Knn,
                    Mode::Wknn => EstimatorMode::Wknn,
                };
            }
            if let Some(k) = k {
                cfg.k = k;
            }
            let map = formats::load_radiomap(&radiomap)?;
            let obs = formats::load_observation(&observation)?;
            let position = estimate_position(&obs, &map, &cfg)?;
            emit(&format!("{},{}\n", position.x, position.y))?;
            if let Some(out) = out {
                create_dir(&out)?;
                write_json(&out.join("location.json"), &position)?;
            }
        }
        Command::Eval {
            common,
            runs,
            trials,
            plan,
            turnback_fraction,
            noise,
            out,
        } => {
            let mut cfg = load_config(&common)?;
            apply_noise(&mut cfg, noise);
            if let Some(f) = turnback_fraction {
                cfg.scenario.turnback_fraction = f;
            }
            let results: Vec<(EventLog, GroundTruth)> = if let Some(runs) = runs {
                trial_dirs(&runs, EVENTS_FILE)?
                    .iter()
                    .map(|d| Ok((read_json(&d.join(EVENTS_FILE))?, read_json(&d.join(TRUTH_FILE))?)))
                    .collect::<Result<_>>()?
            } else {
                let plan = load_plan_or_default(plan.as_deref())?;
                run_suite(&plan, trials.expect("clap requires --runs or --trials"), &cfg)?
            };
            let report = evaluate(&results, cfg.eval.match_window)?;
            write_report(&out, &report)?;
            write_json(&out.join("report.json"), &report)?;
            emit(&report.text())?;
        }
        Command::Report { common, from, out } => {
            let _ = load_config(&common)?;
            let report: EvalReport = read_json(&from)?;
            if let Some(out) = out {
                write_report(&out, &report)?;
            }
            emit(&report.text())?;
            emit(&report.cdf_csv())?;
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e.category() {
        Category::Io => 3,
        Category::Parse => 4,
        Category::Validation => 5,
        Category::Runtime => 6,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
