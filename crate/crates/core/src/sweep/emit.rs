use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::config::{Emit, OutputFormat, SweepConfig};
use super::run::SweepRow;
use crate::diagnostics::{converge_cutoff_with, CutoffSettings};
use crate::eigen::SolverOptions;
use crate::semiclassics::{landscape_grid, splitting_scaling_fit, ScalingFit};
use crate::Result;

/// Main table columns, in order.
pub const COLUMNS: [&str; 16] = [
    "N",
    "S",
    "omega",
    "g",
    "v",
    "u",
    "M_star",
    "E0",
    "E1",
    "E2",
    "d",
    "Delta",
    "pairing_ok",
    "oracle_deviation",
    "converged",
    "wall_time_seconds",
];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

enum Cell {
    Int(usize),
    Float(f64),
    Bool(bool),
    Missing,
}

fn cells(row: &SweepRow) -> [Cell; 16] {
    let p = &row.params;
    let opt = |x: Option<f64>| x.map_or(Cell::Missing, Cell::Float);
    [
        Cell::Int(p.n_atoms()),
        Cell::Float(p.spin()),
        Cell::Float(p.omega()),
        Cell::Float(p.g()),
        Cell::Float(p.v()),
        Cell::Float(p.u()),
        Cell::Int(row.m_star),
        Cell::Float(row.level(0)),
        Cell::Float(row.level(1)),
        Cell::Float(row.level(2)),
        Cell::Float(row.d),
        Cell::Float(row.delta),
        Cell::Bool(row.pairing_ok),
        opt(row.oracle_deviation),
        Cell::Bool(row.converged),
        opt(row.wall_time_seconds),
    ]
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Int(i) => i.to_string(),
        Cell::Float(x) => format_float(*x),
        Cell::Bool(b) => b.to_string(),
        Cell::Missing => String::new(),
    }
}

fn json_cell(c: &Cell) -> String {
    match c {
        Cell::Int(i) => i.to_string(),
        Cell::Float(x) if x.is_finite() => format_float(*x),
        Cell::Float(_) | Cell::Missing => "null".to_string(),
        Cell::Bool(b) => b.to_string(),
    }
}

/// Write the main table in `format`.
pub fn write_table<W: Write>(rows: &[SweepRow], format: OutputFormat, mut w: W) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            writeln!(w, "{}", COLUMNS.join(","))?;
            for row in rows {
                let line: Vec<String> = cells(row).iter().map(csv_cell).collect();
                writeln!(w, "{}", line.join(","))?;
            }
        }
        OutputFormat::JsonLines => {
            for row in rows {
                let fields: Vec<String> = COLUMNS
                    .iter()
                    .zip(cells(row).iter())
                    .map(|(k, c)| format!("\"{k}\":{}", json_cell(c)))
                    .collect();
                writeln!(w, "{{{}}}", fields.join(","))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// `out/run.csv` → `out/run`; stdout output uses `sweep`.
pub fn output_stem(cfg: &SweepConfig) -> PathBuf {
    match &cfg.outputs.path {
        Some(p) => p.with_extension(""),
        None => PathBuf::from("sweep"),
    }
}

fn sibling(stem: &Path, suffix: &str) -> PathBuf {
    let mut name = stem.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// Write every output requested by `cfg.outputs.emit`. The main table goes to
/// `stdout` when no path is configured. Returns the files written.
pub fn emit_results(
    rows: &[SweepRow],
    cfg: &SweepConfig,
    stdout: &mut dyn Write,
) -> Result<Vec<PathBuf>> {
    let emits = |kind| cfg.outputs.emit.contains(&kind);
    let stem = output_stem(cfg);
    let mut written = Vec::new();

    if emits(Emit::Splitting) {
        match &cfg.outputs.path {
            Some(path) => {
                write_table(rows, cfg.outputs.format, create(path)?)?;
                written.push(path.clone());
            }
            None => write_table(rows, cfg.outputs.format, &mut *stdout)?,
        }
    }
    if emits(Emit::Spectrum) {
        let path = sibling(&stem, ".spectrum.csv");
        let mut w = create(&path)?;
        writeln!(w, "N,g,v,index,energy")?;
        for row in rows {
            let p = &row.params;
            for (i, e) in row.eigenvalues.iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{},{i},{}",
                    p.n_atoms(),
                    format_float(p.g()),
                    format_float(p.v()),
                    format_float(*e)
                )?;
            }
        }
        w.flush()?;
        written.push(path);
    }
    if emits(Emit::Degeneracy) {
        let path = sibling(&stem, ".degeneracy.csv");
        let mut w = create(&path)?;
        writeln!(w, "N,g,v,class,energy,multiplicity")?;
        for row in rows {
            let p = &row.params;
            for (i, (e, m)) in row.degeneracy.classes.iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{},{i},{},{m}",
                    p.n_atoms(),
                    format_float(p.g()),
                    format_float(p.v()),
                    format_float(*e)
                )?;
            }
        }
        w.flush()?;
        written.push(path);
    }
    if emits(Emit::Landscape) {
        written.extend(write_landscapes(cfg)?);
    }
    if emits(Emit::ScalingFit) {
        let fit = scaling_fit_of(rows)?;
        let path = sibling(&stem, ".scaling.csv");
        let mut w = create(&path)?;
        writeln!(w, "N,d,ln_d")?;
        for &(n, d) in &fit.points {
            writeln!(w, "{n},{},{}", format_float(d), format_float(d.ln()))?;
        }
        w.flush()?;
        written.push(path);

        let path = sibling(&stem, ".fit.csv");
        let mut w = create(&path)?;
        writeln!(w, "slope,intercept,r_squared")?;
        writeln!(
            w,
            "{},{},{}",
            format_float(fit.slope),
            format_float(fit.intercept),
            format_float(fit.r_squared)
        )?;
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}

/// Fit `ln d` against N over the even-N rows with a positive splitting.
pub fn scaling_fit_of(rows: &[SweepRow]) -> Result<ScalingFit> {
    let points: Vec<(usize, f64)> = rows
        .iter()
        .filter(|r| r.params.n_atoms() % 2 == 0 && r.d > 0.0)
        .map(|r| (r.params.n_atoms(), r.d))
        .collect();
    splitting_scaling_fit(&points)
}

/// Reduced-surface landscape for every grid point: `<stem>.landscape.csv`
/// for a single point, `<stem>.landscape.<i>.csv` otherwise.
pub fn write_landscapes(cfg: &SweepConfig) -> Result<Vec<PathBuf>> {
    let grid = cfg.grid()?;
    let stem = output_stem(cfg);
    let n = cfg.outputs.landscape_points;
    let mut written = Vec::new();
    for (i, p) in grid.iter().enumerate() {
        let suffix = if grid.len() == 1 {
            ".landscape.csv".to_string()
        } else {
            format!(".landscape.{i}.csv")
        };
        let path = sibling(&stem, &suffix);
        let mut w = create(&path)?;
        writeln!(w, "theta,phi,energy")?;
        for (theta, phi, e) in landscape_grid(p, n, n) {
            writeln!(
                w,
                "{},{},{}",
                format_float(theta),
                format_float(phi),
                format_float(e)
            )?;
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}

/// Cutoff-doubling history for every grid point as CSV:
/// `N,g,v,M,E0..E{k-1}`, one line per cutoff tried.
pub fn write_convergence<W: Write>(cfg: &SweepConfig, mut w: W) -> Result<()> {
    let k = cfg.engine.k;
    let levels: Vec<String> = (0..k).map(|i| format!("E{i}")).collect();
    writeln!(w, "N,g,v,M,accepted,{}", levels.join(","))?;
    let settings = CutoffSettings {
        max_dim: cfg.engine.max_dim,
        solver: SolverOptions {
            seed: cfg.engine.seed,
            ..SolverOptions::with_k(k)
        },
    };
    for p in cfg.grid()? {
        let report = converge_cutoff_with(&p, cfg.engine.tol, &settings)?;
        for step in &report.history {
            let mut line = vec![
                p.n_atoms().to_string(),
                format_float(p.g()),
                format_float(p.v()),
                step.cutoff.to_string(),
                (step.cutoff == report.m_star).to_string(),
            ];
            line.extend(
                (0..k).map(|i| format_float(step.energies.get(i).copied().unwrap_or(f64::NAN))),
            );
            writeln!(w, "{}", line.join(","))?;
        }
    }
    w.flush()?;
    Ok(())
}
