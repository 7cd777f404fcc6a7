use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dysco::config::{parse_unvalidated, ExperimentKind, ScenarioConfig, SequenceChoice};
use dysco::pulse::Window;
use dysco::scenario::{run_scenario, write_tables};
use dysco::selftest::run_selftest;

#[derive(Parser)]
#[command(
    name = "dysco",
    version,
    about = "Dynamical sensitivity control simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// P0 over a phase grid and a field grid
    Map(Opts),
    /// Dynamical sensitivity beta(phi) from per-phase response spectra
    Sensitivity(Opts),
    /// P0 versus a sensitivity ramp at fixed fields
    DrRamp(Opts),
    /// Spectrogram of a waveform over modulation frequencies
    Spectrogram(Opts),
    /// Spectrogram of a spin-bath surrogate
    NoiseSpectrum(Opts),
    /// Filter function of a sequence
    FilterFunction(Opts),
    /// Bloch-vector trajectory of one shot
    Trace(Opts),
    /// Hahn echo or XY8 against fixed-phase sensitivity control
    Baseline(Opts),
    /// Pulse-by-pulse listing of a sequence
    ExportProgram(Opts),
    /// Headless invariant checks
    Selftest,
}

#[derive(Args)]
struct Opts {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output table; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    substeps: Option<usize>,
    #[arg(long, value_parser = parse_sequence)]
    sequence: Option<SequenceChoice>,
    #[arg(long)]
    n_units: Option<usize>,
    #[arg(long)]
    phi_rad: Option<f64>,
    #[arg(long)]
    f_s_hz: Option<f64>,
    #[arg(long)]
    beta_k: Option<f64>,
    #[arg(long)]
    beta_steps: Option<usize>,
    #[arg(long, value_parser = parse_window)]
    window: Option<Window>,
    #[arg(long, alias = "tau")]
    tau_s: Option<f64>,
    #[arg(long)]
    reps: Option<usize>,
}

fn parse_sequence(s: &str) -> Result<SequenceChoice, String> {
    match s {
        "dysco" => Ok(SequenceChoice::Dysco),
        "dysco-modulated" => Ok(SequenceChoice::DyscoModulated),
        "hahn" => Ok(SequenceChoice::Hahn),
        "xy8" => Ok(SequenceChoice::Xy8),
        other => Err(format!("unknown sequence `{other}`")),
    }
}

fn parse_window(s: &str) -> Result<Window, String> {
    match s {
        "rectangular" => Ok(Window::Rectangular),
        "gaussian" => Ok(Window::Gaussian),
        other => Err(format!("unknown window `{other}`")),
    }
}

fn load(kind: ExperimentKind, o: &Opts) -> Result<ScenarioConfig, String> {
    let mut cfg = match &o.config {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            // Range checks run after overrides are applied.
            parse_unvalidated(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => ScenarioConfig::new(kind),
    };
    cfg.experiment = kind;
    let s = &mut cfg.sequence;
    macro_rules! set {
        ($dst:expr, $src:expr) => {
            if let Some(v) = $src {
                $dst = v;
            }
        };
    }
    set!(cfg.seed, o.seed);
    set!(cfg.shots, o.shots);
    set!(cfg.substeps, o.substeps);
    set!(s.kind, o.sequence);
    set!(s.n_units, o.n_units);
    set!(s.beta_k, o.beta_k);
    set!(s.beta_steps, o.beta_steps);
    set!(s.window, o.window);
    set!(s.reps, o.reps);
    if o.phi_rad.is_some() {
        s.phi_rad = o.phi_rad;
    }
    if o.f_s_hz.is_some() {
        s.f_s_hz = o.f_s_hz;
    }
    if o.tau_s.is_some() {
        s.tau_s = o.tau_s;
    }
    Ok(cfg)
}

fn run(kind: ExperimentKind, o: Opts) -> Result<(), String> {
    if let Some(n) = o.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    let cfg = load(kind, &o)?;
    let tables = run_scenario(&cfg).map_err(|e| e.to_string())?;
    match o.out.or_else(|| cfg.output.as_ref().map(PathBuf::from)) {
        Some(path) => {
            for p in write_tables(&tables, &path).map_err(|e| e.to_string())? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => {
            for t in &tables {
                print!("{}", t.table.render());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, opts) = match cli.command {
        Command::Selftest => {
            let checks = run_selftest();
            let mut ok = true;
            for c in &checks {
                println!(
                    "{} {} {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
                ok &= c.passed;
            }
            return if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            };
        }
        Command::Map(o) => (ExperimentKind::Map, o),
        Command::Sensitivity(o) => (ExperimentKind::Sensitivity, o),
        Command::DrRamp(o) => (ExperimentKind::DrRamp, o),
        Command::Spectrogram(o) => (ExperimentKind::Spectrogram, o),
        Command::NoiseSpectrum(o) => (ExperimentKind::NoiseSpectrum, o),
        Command::FilterFunction(o) => (ExperimentKind::FilterFunction, o),
        Command::Trace(o) => (ExperimentKind::Trace, o),
        Command::Baseline(o) => (ExperimentKind::Baseline, o),
        Command::ExportProgram(o) => (ExperimentKind::ExportProgram, o),
    };
    match run(kind, opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
