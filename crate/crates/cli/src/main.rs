use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dickelab::circuit::{derive_model_params, parse_device_file, validate_regime, FreqDisplay};
use dickelab::diagnostics::{
    converge_cutoff_with, oracle_deviation, spin_model_levels, CutoffSettings,
};
use dickelab::sweep::{
    emit_results, format_float, load_config, run_sweep, write_convergence, write_landscapes,
    OutputFormat, SweepConfig,
};
use dickelab::{Error, ModelParams, SolverOptions};

#[derive(Parser, Debug)]
#[command(
    name = "dickelab",
    version,
    about = "Spectra and parameter sweeps of the extended Dicke model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    global: GlobalFlags,
}

#[derive(Args, Debug)]
struct GlobalFlags {
    /// Table format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Output path; `-` for stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Seed for the Lanczos start block.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Show frequencies in rad/s or Hz.
    #[arg(long, global = true, value_enum, default_value_t = Freq::Angular)]
    freq_display: Freq,

    /// Record per-row wall time (makes output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Freq {
    Angular,
    Linear,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Full,
    SpinOnly,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lowest levels at one parameter point.
    Spectrum(SpectrumArgs),
    /// Run a sweep described by a config file.
    Sweep { config: PathBuf },
    /// Write reduced energy landscapes for every grid point of a config.
    Landscape {
        config: PathBuf,
        /// Grid points per angle.
        #[arg(long)]
        points: Option<usize>,
    },
    /// Derive model parameters from a device file and check the operating point.
    MapCircuit {
        device_file: PathBuf,
        /// Exit with status 1 when the operating point is off.
        #[arg(long)]
        strict: bool,
    },
    /// Show the Fock-cutoff doubling history for every grid point of a config.
    Convergence { config: PathBuf },
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    /// Number of atoms.
    #[arg(short = 'N', long = "atoms")]
    atoms: usize,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Atom-field coupling.
    #[arg(long, conflicts_with = "u", required_unless_present = "u")]
    g: Option<f64>,
    /// Polaron coupling g²/ω.
    #[arg(long)]
    u: Option<f64>,
    #[arg(long)]
    v: f64,
    /// Number of levels.
    #[arg(short, long, default_value_t = 6)]
    k: usize,
    #[arg(long, value_enum, default_value_t = Mode::Full)]
    mode: Mode,
    /// Cutoff convergence tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let g = &cli.global;
    match &cli.command {
        Command::Spectrum(args) => spectrum(args, g),
        Command::Sweep { config } => sweep(config, g),
        Command::Landscape { config, points } => {
            let mut cfg = configure(config, g)?;
            if let Some(n) = *points {
                if n < 2 {
                    return Err(Error::InvalidArgument("--points must be at least 2".into()));
                }
                cfg.outputs.landscape_points = n;
            }
            for path in write_landscapes(&cfg)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::MapCircuit {
            device_file,
            strict,
        } => map_circuit(device_file, *strict, g),
        Command::Convergence { config } => {
            let cfg = configure(config, g)?;
            let sink = open_output(cfg.outputs.path.as_deref())?;
            write_convergence(&cfg, sink)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Load a config and apply command-line overrides.
fn configure(path: &Path, g: &GlobalFlags) -> Result<SweepConfig, Error> {
    require_input(path)?;
    let mut cfg = load_config(path)?;
    if let Some(f) = g.format {
        cfg.outputs.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Jsonl => OutputFormat::JsonLines,
        };
    }
    if let Some(out) = &g.out {
        cfg.outputs.path = (out.as_os_str() != "-").then(|| out.clone());
    }
    if let Some(w) = g.workers {
        if w == 0 {
            return Err(Error::InvalidArgument(
                "--workers must be at least 1".into(),
            ));
        }
        cfg.engine.workers = Some(w);
    }
    if let Some(s) = g.seed {
        cfg.engine.seed = s;
    }
    if g.timing {
        cfg.engine.timing = true;
    }
    Ok(cfg)
}

/// A missing input file is a usage mistake, not a runtime failure.
fn require_input(path: &Path) -> Result<(), Error> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "input file {} not found",
            path.display()
        )))
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn sweep(config: &Path, g: &GlobalFlags) -> Result<ExitCode, Error> {
    let cfg = configure(config, g)?;
    let outcome = run_sweep(&cfg)?;
    for row in &outcome.rows {
        if let Some(msg) = &row.error {
            let p = &row.params;
            eprintln!("warning: N={} g={} v={}: {msg}", p.n_atoms(), p.g(), p.v());
        }
    }
    let mut stdout = io::stdout().lock();
    for path in emit_results(&outcome.rows, &cfg, &mut stdout)? {
        eprintln!("wrote {}", path.display());
    }
    if outcome.aborted {
        eprintln!(
            "error: time budget exhausted after {} of {} grid points; partial results written",
            outcome.rows.len(),
            outcome.grid_len
        );
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn spectrum(args: &SpectrumArgs, g: &GlobalFlags) -> Result<ExitCode, Error> {
    let p = match (args.g, args.u) {
        (Some(coupling), _) => ModelParams::new(args.atoms, args.omega, coupling, args.v)?,
        (None, Some(u)) => ModelParams::from_u(args.atoms, args.omega, u, args.v)?,
        (None, None) => unreachable!("clap requires --g or --u"),
    };
    if args.k == 0 {
        return Err(Error::InvalidArgument("-k must be at least 1".into()));
    }
    let levels = match args.mode {
        Mode::SpinOnly => spin_model_levels(&p, args.k)?.eigenvalues,
        Mode::Full => {
            let settings = CutoffSettings {
                solver: SolverOptions {
                    seed: g.seed.unwrap_or(SolverOptions::default().seed),
                    ..SolverOptions::with_k(args.k)
                },
                ..CutoffSettings::default()
            };
            let report = converge_cutoff_with(&p, args.tol, &settings)?;
            eprintln!(
                "M_star = {}, converged = {}, oracle_deviation = {}",
                report.m_star,
                report.converged,
                format_float(oracle_deviation(&p, &report.spectrum.eigenvalues)?)
            );
            report.spectrum.eigenvalues
        }
    };

    let out = g.out.as_deref().filter(|p| p.as_os_str() != "-");
    let mut w = open_output(out)?;
    match g.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            writeln!(w, "index,energy")?;
            for (i, e) in levels.iter().enumerate() {
                writeln!(w, "{i},{}", format_float(*e))?;
            }
        }
        Format::Jsonl => {
            for (i, e) in levels.iter().enumerate() {
                writeln!(w, "{{\"index\":{i},\"energy\":{}}}", format_float(*e))?;
            }
        }
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn map_circuit(path: &Path, strict: bool, g: &GlobalFlags) -> Result<ExitCode, Error> {
    require_input(path)?;
    let device = parse_device_file(&std::fs::read_to_string(path)?)?;
    let derived = derive_model_params(&device)?;
    let m = &derived.model;
    let a = &derived.single_atom;
    let report = validate_regime(m, a);
    let display = match g.freq_display {
        Freq::Angular => FreqDisplay::Angular,
        Freq::Linear => FreqDisplay::Linear,
    };
    let f = |x: f64| format_float(display.convert(x));

    let fields: Vec<(&str, String)> = vec![
        ("N", m.n_atoms().to_string()),
        ("omega", f(m.omega())),
        ("g", f(m.g())),
        ("u", f(m.u())),
        ("v", f(m.v())),
        ("epsilon", f(a.epsilon)),
        ("eta", f(a.eta)),
        ("kappa", format_float(a.kappa)),
        ("u_lt_v", report.u_lt_v.to_string()),
        ("optimal_point", report.optimal_point.to_string()),
        ("eta_zero", report.eta_zero.to_string()),
    ];
    let out = g.out.as_deref().filter(|p| p.as_os_str() != "-");
    let mut w = open_output(out)?;
    match g.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            writeln!(w, "# frequencies in {}", display.unit())?;
            for (k, v) in &fields {
                writeln!(w, "{k},{v}")?;
            }
        }
        Format::Jsonl => {
            let body: Vec<String> = fields
                .iter()
                .map(|(k, v)| {
                    // a bare number or bool is already valid JSON
                    format!("\"{k}\":{v}")
                })
                .chain(std::iter::once(format!(
                    "\"freq_unit\":\"{}\"",
                    display.unit()
                )))
                .collect();
            writeln!(w, "{{{}}}", body.join(","))?;
        }
    }
    w.flush()?;
    for msg in &report.messages {
        eprintln!("warning: {msg}");
    }
    if strict && !report.all_ok() {
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}
