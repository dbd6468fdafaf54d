//! Line-oriented sweep configuration.
//!
//! ```text
//! [model]
//! N_list = 3,4,5
//! omega = 1
//! u_over_v_list = 0.2
//! v_list = 1
//!
//! [engine]
//! mode = spin-only
//! k = 6
//!
//! [outputs]
//! path = sweep.csv
//! emit = splitting, scaling-fit
//! ```
//!
//! Keys may also appear before any section header. Unknown keys, duplicate
//! keys and keys placed under the wrong section are errors.

use std::path::{Path, PathBuf};

use crate::circuit::{derive_model_params, parse_device_file};
use crate::{Error, ModelParams, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Full,
    SpinOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    JsonLines,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Self::Csv),
            "jsonl" | "json-lines" => Some(Self::JsonLines),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Emit {
    Spectrum,
    Splitting,
    Degeneracy,
    Landscape,
    ScalingFit,
}

impl Emit {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "spectrum" => Some(Self::Spectrum),
            "splitting" => Some(Self::Splitting),
            "degeneracy" => Some(Self::Degeneracy),
            "landscape" => Some(Self::Landscape),
            "scaling-fit" => Some(Self::ScalingFit),
            _ => None,
        }
    }
}

/// Which coupling list drives the sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum CouplingAxis {
    G(Vec<f64>),
    U(Vec<f64>),
    UOverV(Vec<f64>),
}

impl CouplingAxis {
    fn values(&self) -> &[f64] {
        match self {
            CouplingAxis::G(v) | CouplingAxis::U(v) | CouplingAxis::UOverV(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSource {
    Grid {
        n_list: Vec<usize>,
        omega: f64,
        coupling: CouplingAxis,
        v_list: Vec<f64>,
    },
    /// Device file; `n_list` overrides its `N`.
    Circuit {
        path: PathBuf,
        n_list: Option<Vec<usize>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub mode: Mode,
    pub k: usize,
    /// Cutoff convergence tolerance on the lowest levels.
    pub tol: f64,
    pub seed: u64,
    /// Largest Fock ⊗ spin dimension the cutoff doubling may reach.
    pub max_dim: usize,
    /// Record wall time per row. Off by default so output is byte-reproducible.
    pub timing: bool,
    /// Abort the sweep (keeping finished rows) once this much time has passed.
    pub budget_seconds: Option<f64>,
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Full,
            k: 6,
            tol: 1e-10,
            seed: 0,
            max_dim: 400_000,
            timing: false,
            budget_seconds: None,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    /// Main table; `None` writes it to stdout.
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
    pub emit: Vec<Emit>,
    /// Grid points per angle for the landscape export.
    pub landscape_points: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            path: Some(PathBuf::from("sweep.csv")),
            format: OutputFormat::Csv,
            emit: vec![Emit::Splitting],
            landscape_points: 61,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub model: ModelSource,
    pub engine: EngineConfig,
    pub outputs: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Model,
    Engine,
    Outputs,
}

const KEYS: &[(&str, Section)] = &[
    ("N_list", Section::Model),
    ("omega", Section::Model),
    ("g_list", Section::Model),
    ("u_list", Section::Model),
    ("u_over_v_list", Section::Model),
    ("v_list", Section::Model),
    ("circuit", Section::Model),
    ("mode", Section::Engine),
    ("k", Section::Engine),
    ("tol", Section::Engine),
    ("seed", Section::Engine),
    ("max_dim", Section::Engine),
    ("timing", Section::Engine),
    ("budget_seconds", Section::Engine),
    ("workers", Section::Engine),
    ("path", Section::Outputs),
    ("format", Section::Outputs),
    ("emit", Section::Outputs),
    ("landscape_points", Section::Outputs),
];

struct Entry<'a> {
    key: &'static str,
    value: &'a str,
    line: usize,
}

struct Entries<'a> {
    items: Vec<Entry<'a>>,
    end_line: usize,
}

impl<'a> Entries<'a> {
    fn get(&self, key: &str) -> Option<&Entry<'a>> {
        self.items.iter().find(|e| e.key == key)
    }

    fn missing(&self, what: &str) -> Error {
        Error::parse(self.end_line, format!("missing required key {what}"))
    }
}

fn parse_number<T: std::str::FromStr>(e: &Entry<'_>, raw: &str) -> Result<T> {
    raw.trim().parse().map_err(|_| {
        Error::parse(
            e.line,
            format!("`{}`: malformed number `{}`", e.key, raw.trim()),
        )
    })
}

fn parse_list<T: std::str::FromStr>(e: &Entry<'_>) -> Result<Vec<T>> {
    let items: Vec<&str> = e
        .value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err(Error::parse(
            e.line,
            format!("`{}`: empty sweep axis", e.key),
        ));
    }
    items.into_iter().map(|raw| parse_number(e, raw)).collect()
}

fn parse_bool(e: &Entry<'_>) -> Result<bool> {
    match e.value {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        other => Err(Error::parse(
            e.line,
            format!("`{}`: expected true/false, got `{other}`", e.key),
        )),
    }
}

pub fn parse_config(text: &str) -> Result<SweepConfig> {
    let mut items: Vec<Entry<'_>> = Vec::new();
    let mut section: Option<Section> = None;
    let mut end_line = 1;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        end_line = line + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = Some(match name.trim() {
                "model" => Section::Model,
                "engine" => Section::Engine,
                "outputs" => Section::Outputs,
                other => return Err(Error::parse(line, format!("unknown section `[{other}]`"))),
            });
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| {
            Error::parse(line, format!("expected `key = value`, got `{content}`"))
        })?;
        let key = key.trim();
        let &(known, home) = KEYS
            .iter()
            .find(|(k, _)| *k == key)
            .ok_or_else(|| Error::parse(line, format!("unknown key `{key}`")))?;
        if let Some(current) = section {
            if current != home {
                return Err(Error::parse(
                    line,
                    format!("key `{key}` belongs in [{}]", section_name(home)),
                ));
            }
        }
        if items.iter().any(|e| e.key == known) {
            return Err(Error::parse(line, format!("duplicate key `{key}`")));
        }
        items.push(Entry {
            key: known,
            value: value.trim(),
            line,
        });
    }

    let entries = Entries { items, end_line };
    let model = parse_model(&entries)?;
    let engine = parse_engine(&entries)?;
    let outputs = parse_outputs(&entries)?;
    let cfg = SweepConfig {
        model,
        engine,
        outputs,
    };
    validate(&cfg, &entries)?;
    Ok(cfg)
}

fn section_name(s: Section) -> &'static str {
    match s {
        Section::Model => "model",
        Section::Engine => "engine",
        Section::Outputs => "outputs",
    }
}

fn parse_model(entries: &Entries<'_>) -> Result<ModelSource> {
    let n_list = entries
        .get("N_list")
        .map(|e| {
            let list: Vec<usize> = parse_list(e)?;
            if list.contains(&0) {
                return Err(Error::parse(
                    e.line,
                    "`N_list`: atom counts must be positive",
                ));
            }
            Ok(list)
        })
        .transpose()?;

    if let Some(c) = entries.get("circuit") {
        for other in ["omega", "g_list", "u_list", "u_over_v_list", "v_list"] {
            if let Some(e) = entries.get(other) {
                return Err(Error::parse(
                    e.line,
                    format!("`{other}` conflicts with `circuit`; the device file fixes it"),
                ));
            }
        }
        return Ok(ModelSource::Circuit {
            path: PathBuf::from(c.value),
            n_list,
        });
    }

    let n_list = n_list.ok_or_else(|| entries.missing("`N_list`"))?;
    let omega = match entries.get("omega") {
        Some(e) => parse_number::<f64>(e, e.value)?,
        None => 1.0,
    };
    let axes: Vec<&Entry<'_>> = ["g_list", "u_list", "u_over_v_list"]
        .iter()
        .filter_map(|k| entries.get(k))
        .collect();
    let coupling = match axes.as_slice() {
        [] => return Err(entries.missing("`g_list`, `u_list` or `u_over_v_list`")),
        [e] => match e.key {
            "g_list" => CouplingAxis::G(parse_list(e)?),
            "u_list" => CouplingAxis::U(parse_list(e)?),
            _ => CouplingAxis::UOverV(parse_list(e)?),
        },
        [_, second, ..] => {
            return Err(Error::parse(
                second.line,
                "give only one of `g_list`, `u_list`, `u_over_v_list`",
            ))
        }
    };
    let v_entry = entries
        .get("v_list")
        .ok_or_else(|| entries.missing("`v_list`"))?;
    let v_list = parse_list(v_entry)?;
    Ok(ModelSource::Grid {
        n_list,
        omega,
        coupling,
        v_list,
    })
}

fn parse_engine(entries: &Entries<'_>) -> Result<EngineConfig> {
    let mut engine = EngineConfig::default();
    if let Some(e) = entries.get("mode") {
        engine.mode = match e.value {
            "full" => Mode::Full,
            "spin-only" => Mode::SpinOnly,
            other => return Err(Error::parse(e.line, format!("unknown mode `{other}`"))),
        };
    }
    if let Some(e) = entries.get("k") {
        engine.k = parse_number(e, e.value)?;
    }
    if let Some(e) = entries.get("tol") {
        engine.tol = parse_number(e, e.value)?;
        if !(engine.tol > 0.0) {
            return Err(Error::parse(e.line, "`tol` must be positive"));
        }
    }
    if let Some(e) = entries.get("seed") {
        engine.seed = parse_number(e, e.value)?;
    }
    if let Some(e) = entries.get("max_dim") {
        engine.max_dim = parse_number(e, e.value)?;
    }
    if let Some(e) = entries.get("timing") {
        engine.timing = parse_bool(e)?;
    }
    if let Some(e) = entries.get("budget_seconds") {
        let b: f64 = parse_number(e, e.value)?;
        if !(b > 0.0) {
            return Err(Error::parse(e.line, "`budget_seconds` must be positive"));
        }
        engine.budget_seconds = Some(b);
    }
    if let Some(e) = entries.get("workers") {
        let w: usize = parse_number(e, e.value)?;
        if w == 0 {
            return Err(Error::parse(e.line, "`workers` must be at least 1"));
        }
        engine.workers = Some(w);
    }
    Ok(engine)
}

fn parse_outputs(entries: &Entries<'_>) -> Result<OutputConfig> {
    let mut out = OutputConfig::default();
    if let Some(e) = entries.get("path") {
        out.path = (e.value != "-").then(|| PathBuf::from(e.value));
    }
    if let Some(e) = entries.get("format") {
        out.format = OutputFormat::parse(e.value)
            .ok_or_else(|| Error::parse(e.line, format!("unknown format `{}`", e.value)))?;
    }
    if let Some(e) = entries.get("emit") {
        let mut emit = Vec::new();
        for raw in e.value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let kind = Emit::parse(raw)
                .ok_or_else(|| Error::parse(e.line, format!("unknown emit target `{raw}`")))?;
            if !emit.contains(&kind) {
                emit.push(kind);
            }
        }
        if emit.is_empty() {
            return Err(Error::parse(e.line, "`emit` lists nothing"));
        }
        out.emit = emit;
    }
    if let Some(e) = entries.get("landscape_points") {
        out.landscape_points = parse_number(e, e.value)?;
        if out.landscape_points < 2 {
            return Err(Error::parse(
                e.line,
                "`landscape_points` must be at least 2",
            ));
        }
    }
    Ok(out)
}

fn validate(cfg: &SweepConfig, entries: &Entries<'_>) -> Result<()> {
    let line_of = |key: &str| entries.get(key).map_or(entries.end_line, |e| e.line);
    let emits = |kind| cfg.outputs.emit.contains(&kind);
    if cfg.engine.k < 1 {
        return Err(Error::parse(line_of("k"), "`k` must be at least 1"));
    }
    if cfg.engine.k < 3 && (emits(Emit::Splitting) || emits(Emit::ScalingFit)) {
        return Err(Error::parse(
            line_of("k"),
            format!(
                "`k` = {} but splitting needs at least 3 levels",
                cfg.engine.k
            ),
        ));
    }
    if emits(Emit::ScalingFit) {
        match &cfg.model {
            ModelSource::Grid {
                n_list,
                coupling,
                v_list,
                ..
            } => {
                if coupling.values().len() != 1 || v_list.len() != 1 {
                    return Err(Error::parse(
                        line_of("emit"),
                        "scaling-fit needs a single coupling and a single v",
                    ));
                }
                if n_list.iter().filter(|n| *n % 2 == 0).count() < 3 {
                    return Err(Error::parse(
                        line_of("N_list"),
                        "scaling-fit needs at least 3 even atom counts",
                    ));
                }
            }
            ModelSource::Circuit { .. } => {
                return Err(Error::parse(
                    line_of("emit"),
                    "scaling-fit needs an explicit N_list grid",
                ));
            }
        }
    }
    Ok(())
}

/// Read a config file; a relative `circuit` path is taken relative to it.
pub fn load_config(path: &Path) -> Result<SweepConfig> {
    let text = std::fs::read_to_string(path)?;
    let mut cfg = parse_config(&text)?;
    if let ModelSource::Circuit { path: device, .. } = &mut cfg.model {
        if device.is_relative() {
            if let Some(dir) = path.parent() {
                *device = dir.join(&*device);
            }
        }
    }
    Ok(cfg)
}

impl SweepConfig {
    /// Grid points in sweep order: N outermost, then v, then the coupling axis.
    pub fn grid(&self) -> Result<Vec<ModelParams>> {
        match &self.model {
            ModelSource::Grid {
                n_list,
                omega,
                coupling,
                v_list,
            } => {
                let mut points = Vec::new();
                for &n in n_list {
                    for &v in v_list {
                        for &c in coupling.values() {
                            let p = match coupling {
                                CouplingAxis::G(_) => ModelParams::new(n, *omega, c, v)?,
                                CouplingAxis::U(_) => ModelParams::from_u(n, *omega, c, v)?,
                                CouplingAxis::UOverV(_) => {
                                    ModelParams::from_u(n, *omega, c * v, v)?
                                }
                            };
                            points.push(p);
                        }
                    }
                }
                Ok(points)
            }
            ModelSource::Circuit { path, n_list } => {
                let text = std::fs::read_to_string(path)?;
                let device = parse_device_file(&text)?;
                let base = derive_model_params(&device)?.model;
                let ns = n_list.clone().unwrap_or_else(|| vec![base.n_atoms()]);
                ns.into_iter()
                    .map(|n| ModelParams::new(n, base.omega(), base.g(), base.v()))
                    .collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let cfg = parse_config("N_list = 3\nomega = 1\ng_list = 0.3\nv_list = 1").unwrap();
        let grid = cfg.grid().unwrap();
        assert_eq!(grid.len(), 1);
        assert_eq!(grid[0], ModelParams::new(3, 1.0, 0.3, 1.0).unwrap());
        assert_eq!(cfg.engine, EngineConfig::default());
        assert_eq!(cfg.outputs, OutputConfig::default());
    }

    #[test]
    fn sections_and_lists() {
        let text = "[model]\nN_list = 3, 4,5\nu_over_v_list = 0.2,0.5\nv_list = 2\n\
                    [engine]\nmode = spin-only\nk = 8\nseed = 42\n\
                    [outputs]\npath = -\nformat = jsonl\nemit = splitting, degeneracy\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.engine.mode, Mode::SpinOnly);
        assert_eq!(cfg.engine.k, 8);
        assert_eq!(cfg.outputs.path, None);
        assert_eq!(cfg.outputs.format, OutputFormat::JsonLines);
        let grid = cfg.grid().unwrap();
        assert_eq!(grid.len(), 6);
        assert_eq!(grid[1].n_atoms(), 3);
        assert!((grid[1].u() - 1.0).abs() < 1e-14);
        assert!((grid[2].u() - 0.4).abs() < 1e-14);
    }

    #[test]
    fn k_too_small_for_splitting() {
        let err = parse_config("N_list = 3\ng_list = 0.3\nv_list = 1\nk = 2").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
    }

    #[test]
    fn unknown_key_names_line() {
        let err = parse_config("N_list = 3\nfoo = 1\n").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("foo"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn structural_errors() {
        // empty axis
        assert!(parse_config("N_list =\ng_list = 0.3\nv_list = 1").is_err());
        // missing coupling
        assert!(parse_config("N_list = 3\nv_list = 1").is_err());
        // two coupling axes
        assert!(parse_config("N_list = 3\ng_list = 1\nu_list = 1\nv_list = 1").is_err());
        // wrong section
        assert!(parse_config("[engine]\nN_list = 3\n").is_err());
        // duplicate
        assert!(parse_config("N_list = 3\nN_list = 4\ng_list = 1\nv_list = 1").is_err());
        // malformed number
        let err = parse_config("N_list = 3\ng_list = 0.x\nv_list = 1").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        // unknown section
        assert!(parse_config("[plots]\n").is_err());
        // scaling fit over several couplings
        assert!(
            parse_config("N_list = 4,6,8\ng_list = 0.1,0.2\nv_list = 1\nemit = scaling-fit")
                .is_err()
        );
        assert!(
            parse_config("N_list = 4,6,7\ng_list = 0.1\nv_list = 1\nemit = scaling-fit").is_err()
        );
    }

    #[test]
    fn circuit_source() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("device.txt"),
            "units = mhz\nE_c = 5000\nE_J = 1000\nn_g = 0.5\nPhi_x = 1.5707963267948966\n\
             Phi_e = 1.5707963267948966\nL = 1e-8\nI_c = 3.64e-9\nomega = 6000\ng = 5.8\nN = 3\n",
        )
        .unwrap();
        let cfg_path = dir.path().join("run.cfg");
        std::fs::write(&cfg_path, "circuit = device.txt\nN_list = 3,5\n").unwrap();
        let cfg = load_config(&cfg_path).unwrap();
        let grid = cfg.grid().unwrap();
        assert_eq!(grid.len(), 2);
        assert!(grid[0].u() < grid[0].v());
        assert!(parse_config("circuit = x\nomega = 2\n").is_err());
    }
}
