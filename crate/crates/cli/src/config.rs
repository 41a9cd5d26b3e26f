//! Run configuration: TOML text to a validated [`RunConfig`], collecting
//! every problem instead of stopping at the first.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use gravlat::continuum::MassSign;
use gravlat::lattice::{Couplings, LatticeSpec};
use gravlat::manybody::sweep::Model;
use gravlat::ModelParams;
use toml::{Table, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CommandName {
    Dispersion,
    FermiPoints,
    Slopes,
    MapCouplings,
    SpinConnection,
    ActionCheck,
    GravitonModes,
    Design,
    Spectrum,
    GroundState,
    Correlators,
    WickSweep,
    MapResidual,
    IntegrateOut,
}

impl CommandName {
    pub const ALL: [CommandName; 14] = [
        CommandName::Dispersion,
        CommandName::FermiPoints,
        CommandName::Slopes,
        CommandName::MapCouplings,
        CommandName::SpinConnection,
        CommandName::ActionCheck,
        CommandName::GravitonModes,
        CommandName::Design,
        CommandName::Spectrum,
        CommandName::GroundState,
        CommandName::Correlators,
        CommandName::WickSweep,
        CommandName::MapResidual,
        CommandName::IntegrateOut,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::Dispersion => "dispersion",
            CommandName::FermiPoints => "fermi-points",
            CommandName::Slopes => "slopes",
            CommandName::MapCouplings => "map-couplings",
            CommandName::SpinConnection => "spin-connection",
            CommandName::ActionCheck => "action-check",
            CommandName::GravitonModes => "graviton-modes",
            CommandName::Design => "design",
            CommandName::Spectrum => "spectrum",
            CommandName::GroundState => "ground-state",
            CommandName::Correlators => "correlators",
            CommandName::WickSweep => "wick-sweep",
            CommandName::MapResidual => "map-residual",
            CommandName::IntegrateOut => "integrate-out",
        }
    }
}

impl fmt::Display for CommandName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CommandName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL.iter().copied().find(|c| c.as_str() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|c| c.as_str()).collect();
            format!("unknown command `{s}`{}", suggestion(s, &names))
        })
    }
}

/// Fermion particle-number sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    Half,
    All,
    Fixed(usize),
}

impl Sector {
    pub fn resolve(self, n_modes: usize) -> Option<usize> {
        match self {
            Sector::Half => Some(n_modes / 2),
            Sector::All => None,
            Sector::Fixed(n) => Some(n),
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sector::Half => f.write_str("half"),
            Sector::All => f.write_str("all"),
            Sector::Fixed(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeConfig {
    pub cells: [usize; 2],
    pub couplings: Couplings,
    /// Cells per axis of the momentum grid used by `dispersion`.
    pub k_grid: usize,
}

impl LatticeConfig {
    pub fn spec(&self) -> LatticeSpec {
        LatticeSpec::new(self.cells[0], self.cells[1]).expect("validated")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    pub n_max: usize,
    pub boson_cells: Vec<usize>,
    pub sector: Sector,
    pub window: usize,
    pub dense_cap: usize,
    pub dim_cap: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub g: Vec<f64>,
    pub jz: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    pub n: usize,
    pub h: f64,
    pub nt: usize,
    pub ht: f64,
    pub modes: usize,
    pub kmax: i32,
    pub amplitude: f64,
    /// Phase-space points for the Legendre check.
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignerConfig {
    pub jx_offset: f64,
    pub jz_offset: f64,
    pub v0: [f64; 3],
    pub a_s: f64,
    pub mass: f64,
    pub spacing: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub hamiltonian: Model,
    pub mass_sign: MassSign,
    pub temperature: f64,
    pub levels: usize,
    /// Uniform currents `(J^1_x, J^2_y)` for `integrate-out`.
    pub currents: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandName,
    pub params: ModelParams,
    pub lattice: LatticeConfig,
    pub truncation: Truncation,
    pub sweep: Sweep,
    pub geometry: GeometryConfig,
    pub designer: DesignerConfig,
    pub model: ModelConfig,
    pub seed: u64,
    pub output: PathBuf,
    pub threads: usize,
}

fn sign_name(s: MassSign) -> &'static str {
    match s {
        MassSign::Legendre => "legendre",
        MassSign::Flipped => "flipped",
    }
}

fn model_name(m: Model) -> &'static str {
    match m {
        Model::Simulator => "simulator",
        Model::Target(_) => "target",
    }
}

fn list(v: &[f64]) -> String {
    let s: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
    format!("[{}]", s.join(", "))
}

impl RunConfig {
    /// Every resolved setting, defaults included, as `key=value` lines.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        kv("command", self.command.to_string());
        kv("seed", self.seed.to_string());
        kv("output", self.output.display().to_string());
        kv("threads", self.threads.to_string());
        kv("params.G", format!("{:?}", self.params.g()));
        kv("params.l", format!("{:?}", self.params.l()));
        kv("params.mu", format!("{:?}", self.params.mu()));
        let l = &self.lattice;
        kv("lattice.cells", format!("[{}, {}]", l.cells[0], l.cells[1]));
        kv("lattice.couplings", list(&[l.couplings.jx, l.couplings.jy, l.couplings.jz]));
        kv("lattice.k_grid", l.k_grid.to_string());
        let t = &self.truncation;
        kv("truncation.n_max", t.n_max.to_string());
        kv("truncation.boson_cells", format!("{:?}", t.boson_cells));
        kv("truncation.sector", t.sector.to_string());
        kv("truncation.window", t.window.to_string());
        kv("truncation.dense_cap", t.dense_cap.to_string());
        kv("truncation.dim_cap", t.dim_cap.to_string());
        kv("sweep.G", list(&self.sweep.g));
        kv("sweep.jz", list(&self.sweep.jz));
        let g = &self.geometry;
        kv("geometry.n", g.n.to_string());
        kv("geometry.h", format!("{:?}", g.h));
        kv("geometry.nt", g.nt.to_string());
        kv("geometry.ht", format!("{:?}", g.ht));
        kv("geometry.modes", g.modes.to_string());
        kv("geometry.kmax", g.kmax.to_string());
        kv("geometry.amplitude", format!("{:?}", g.amplitude));
        kv("geometry.samples", g.samples.to_string());
        let d = &self.designer;
        kv("designer.jx_offset", format!("{:?}", d.jx_offset));
        kv("designer.jz_offset", format!("{:?}", d.jz_offset));
        kv("designer.v0", list(&d.v0));
        kv("designer.a_s", format!("{:?}", d.a_s));
        kv("designer.mass", format!("{:?}", d.mass));
        kv("designer.spacing", format!("{:?}", d.spacing));
        kv("designer.threshold", format!("{:?}", d.threshold));
        let m = &self.model;
        kv("model.hamiltonian", model_name(m.hamiltonian).to_string());
        kv("model.mass_sign", sign_name(m.mass_sign).to_string());
        kv("model.temperature", format!("{:?}", m.temperature));
        kv("model.levels", m.levels.to_string());
        kv("model.currents", list(&m.currents));
        s
    }
}

/// All problems found in a configuration.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}", .0.join("\n"))]
pub struct ConfigErrors(pub Vec<String>);

const SCHEMA: &[(&str, &[&str])] = &[
    ("", &["command", "seed", "output", "threads"]),
    ("params", &["G", "l", "mu"]),
    ("lattice", &["cells", "couplings", "k_grid"]),
    ("truncation", &["n_max", "boson_cells", "sector", "window", "dense_cap", "dim_cap"]),
    ("sweep", &["G", "jz"]),
    ("geometry", &["n", "h", "nt", "ht", "modes", "kmax", "amplitude", "samples"]),
    ("designer", &["jx_offset", "jz_offset", "v0", "a_s", "mass", "spacing", "threshold"]),
    ("model", &["hamiltonian", "mass_sign", "temperature", "levels", "currents"]),
];

fn suggestion(input: &str, candidates: &[&str]) -> String {
    candidates
        .iter()
        .map(|c| (strsim::jaro_winkler(input, c), *c))
        .filter(|(s, _)| *s > 0.7)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map_or_else(String::new, |(_, c)| format!(" (did you mean `{c}`?)"))
}

/// Finds keys defined twice, reporting both line numbers. Handles plain
/// `[section]` headers and `key = value` lines.
fn duplicate_keys(text: &str) -> Vec<String> {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    let mut errors = Vec::new();
    let mut section = String::new();
    let mut depth = 0i32;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if depth == 0 && line.starts_with('[') && !line.starts_with("[[") {
            let name = line.trim_start_matches('[').trim_end_matches(']').trim().to_string();
            if let Some(prev) = seen.insert(format!("[{name}]"), n + 1) {
                errors.push(format!("duplicate section `[{name}]` at lines {prev} and {}", n + 1));
            }
            section = name;
            continue;
        }
        if depth == 0 {
            if let Some((k, _)) = line.split_once('=') {
                let key = k.trim().trim_matches('"');
                let path = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
                if let Some(prev) = seen.insert(path.clone(), n + 1) {
                    errors.push(format!("duplicate key `{path}` at lines {prev} and {}", n + 1));
                }
            }
        }
        depth += line.matches('[').count() as i32 - line.matches(']').count() as i32;
        if line.starts_with('[') && depth < 0 {
            depth = 0;
        }
        depth = depth.max(0);
    }
    errors
}

struct Reader<'a> {
    root: &'a Table,
    errors: Vec<String>,
}

impl<'a> Reader<'a> {
    fn get(&self, section: &str, key: &str) -> Option<&'a Value> {
        if section.is_empty() {
            self.root.get(key)
        } else {
            self.root.get(section).and_then(Value::as_table).and_then(|t| t.get(key))
        }
    }

    fn path(section: &str, key: &str) -> String {
        if section.is_empty() {
            key.to_string()
        } else {
            format!("{section}.{key}")
        }
    }

    fn as_f64(v: &Value) -> Option<f64> {
        match v {
            Value::Float(x) => Some(*x),
            Value::Integer(i) => Some(*i as f64),
            _ => None,
        }
    }

    fn f64(&mut self, section: &str, key: &str, default: f64, ok: impl Fn(f64) -> bool, range: &str) -> f64 {
        let Some(v) = self.get(section, key) else { return default };
        match Self::as_f64(v) {
            Some(x) if ok(x) => x,
            Some(x) => {
                self.errors.push(format!("`{}` = {x} is out of range: must be {range}", Self::path(section, key)));
                default
            }
            None => {
                self.errors.push(format!("`{}` must be a number", Self::path(section, key)));
                default
            }
        }
    }

    fn usize(&mut self, section: &str, key: &str, default: usize, min: usize) -> usize {
        let Some(v) = self.get(section, key) else { return default };
        match v.as_integer() {
            Some(i) if i >= min as i64 => i as usize,
            Some(i) => {
                self.errors.push(format!("`{}` = {i} is out of range: must be >= {min}", Self::path(section, key)));
                default
            }
            None => {
                self.errors.push(format!("`{}` must be an integer", Self::path(section, key)));
                default
            }
        }
    }

    fn f64_list(&mut self, section: &str, key: &str, default: Vec<f64>, len: Option<usize>) -> Vec<f64> {
        let Some(v) = self.get(section, key) else { return default };
        let parsed: Option<Vec<f64>> = v.as_array().and_then(|a| a.iter().map(Self::as_f64).collect());
        match parsed {
            Some(x) if len.is_none_or(|n| x.len() == n) && !x.is_empty() => x,
            _ => {
                let shape = len.map_or_else(|| "a nonempty array of numbers".to_string(), |n| format!("an array of {n} numbers"));
                self.errors.push(format!("`{}` must be {shape}", Self::path(section, key)));
                default
            }
        }
    }

    fn usize_list(&mut self, section: &str, key: &str, default: Vec<usize>) -> Vec<usize> {
        let Some(v) = self.get(section, key) else { return default };
        let parsed: Option<Vec<usize>> = v
            .as_array()
            .and_then(|a| a.iter().map(|x| x.as_integer().filter(|i| *i >= 0).map(|i| i as usize)).collect());
        parsed.unwrap_or_else(|| {
            self.errors.push(format!("`{}` must be an array of nonnegative integers", Self::path(section, key)));
            default
        })
    }

    fn string(&mut self, section: &str, key: &str) -> Option<&'a str> {
        let v = self.get(section, key)?;
        let s = v.as_str();
        if s.is_none() {
            self.errors.push(format!("`{}` must be a string", Self::path(section, key)));
        }
        s
    }

    fn unknown_keys(&mut self) {
        for (k, v) in self.root {
            let Some((_, known)) = SCHEMA.iter().find(|(s, _)| s.is_empty()) else { continue };
            if known.contains(&k.as_str()) {
                continue;
            }
            match (SCHEMA.iter().find(|(s, _)| *s == k.as_str()), v.as_table()) {
                (Some((section, keys)), Some(t)) => {
                    for key in t.keys() {
                        if !keys.contains(&key.as_str()) {
                            self.errors.push(format!("unknown key `{section}.{key}`{}", suggestion(key, keys)));
                        }
                    }
                }
                (Some(_), None) => self.errors.push(format!("`{k}` must be a table")),
                (None, _) => {
                    let mut all: Vec<&str> = SCHEMA.iter().map(|(s, _)| *s).filter(|s| !s.is_empty()).collect();
                    all.extend(known.iter());
                    self.errors.push(format!("unknown key `{k}`{}", suggestion(k, &all)));
                }
            }
        }
    }
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

fn nonnegative(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigErrors> {
    let dups = duplicate_keys(text);
    if !dups.is_empty() {
        return Err(ConfigErrors(dups));
    }
    let root: Table = text.parse::<Table>().map_err(|e| ConfigErrors(vec![format!("malformed TOML: {}", e.message())]))?;
    let mut r = Reader { root: &root, errors: Vec::new() };
    r.unknown_keys();

    let command = match r.string("", "command") {
        Some(s) => s.parse::<CommandName>().map_err(|e| r.errors.push(e)).ok(),
        None => {
            if r.get("", "command").is_none() {
                r.errors.push("missing required key `command`".into());
            }
            None
        }
    };
    let seed = match r.get("", "seed") {
        None => 0,
        Some(v) => match v.as_integer() {
            Some(i) if i >= 0 => i as u64,
            _ => {
                r.errors.push("`seed` must be a nonnegative integer".into());
                0
            }
        },
    };
    let output = PathBuf::from(r.string("", "output").unwrap_or("gravlat-out"));
    let threads = r.usize("", "threads", 0, 0);

    let g = r.f64("params", "G", 0.01, nonnegative, ">= 0");
    let l = r.f64("params", "l", 1.0, positive, "> 0");
    let mu = r.f64("params", "mu", 1.0, nonnegative, ">= 0");
    let params = ModelParams::new_allow_massless(g, l, mu).unwrap_or_else(|e| {
        r.errors.push(e.to_string());
        ModelParams::new(0.01, 1.0, 1.0).expect("defaults are valid")
    });

    let cells = r.usize_list("lattice", "cells", vec![1, 1]);
    let cells = if cells.len() == 2 && cells.iter().all(|&c| c >= 1) {
        [cells[0], cells[1]]
    } else {
        r.errors.push("`lattice.cells` must be two integers >= 1".into());
        [1, 1]
    };
    let j0 = 2.0 / (3.0 * l);
    let j = r.f64_list("lattice", "couplings", vec![j0; 3], Some(3));
    if j.iter().any(|x| !positive(*x)) {
        r.errors.push("`lattice.couplings` entries must be > 0".into());
    }
    let k_grid = r.usize("lattice", "k_grid", 24, 4);
    let lattice = LatticeConfig { cells, couplings: Couplings::new(j[0], j[1], j[2]), k_grid };

    let n_max = r.usize("truncation", "n_max", 2, 0);
    let boson_cells = r.usize_list("truncation", "boson_cells", vec![0]);
    let n_cells = cells[0] * cells[1];
    for c in &boson_cells {
        if *c >= n_cells {
            r.errors.push(format!("`truncation.boson_cells` entry {c} is out of range: lattice has {n_cells} cells"));
        }
    }
    let sector = match r.get("truncation", "sector") {
        None => Sector::Half,
        Some(Value::String(s)) if s == "half" => Sector::Half,
        Some(Value::String(s)) if s == "all" => Sector::All,
        Some(Value::Integer(i)) if *i >= 0 && (*i as usize) <= 2 * n_cells => Sector::Fixed(*i as usize),
        Some(_) => {
            r.errors.push(format!("`truncation.sector` must be \"half\", \"all\" or an integer in 0..={}", 2 * n_cells));
            Sector::Half
        }
    };
    let window = r.usize("truncation", "window", n_max, 0);
    if window > n_max {
        r.errors.push(format!("`truncation.window` = {window} is out of range: must be <= n_max = {n_max}"));
    }
    let dense_cap = r.usize("truncation", "dense_cap", gravlat::manybody::eigen::DEFAULT_DENSE_CAP, 1);
    let dim_cap = r.usize("truncation", "dim_cap", gravlat::manybody::fock::DEFAULT_DIM_CAP, 1);
    let truncation = Truncation { n_max, boson_cells, sector, window, dense_cap, dim_cap };

    let sg = r.f64_list("sweep", "G", vec![0.0, 1e-3, 3e-3, 1e-2], None);
    if sg.iter().any(|x| !nonnegative(*x)) {
        r.errors.push("`sweep.G` entries must be >= 0".into());
    }
    let jz_default: Vec<f64> = (1..=19).map(|i| i as f64 / 10.0).collect();
    let sjz = r.f64_list("sweep", "jz", jz_default, None);
    if sjz.iter().any(|x| !positive(*x)) {
        r.errors.push("`sweep.jz` entries must be > 0".into());
    }
    let sweep = Sweep { g: sg, jz: sjz };

    let geometry = GeometryConfig {
        n: r.usize("geometry", "n", 16, 4),
        h: r.f64("geometry", "h", 0.25, positive, "> 0"),
        nt: r.usize("geometry", "nt", 6, 3),
        ht: r.f64("geometry", "ht", 0.5, positive, "> 0"),
        modes: r.usize("geometry", "modes", 6, 1),
        kmax: r.usize("geometry", "kmax", 2, 0) as i32,
        amplitude: r.f64("geometry", "amplitude", 0.05, positive, "> 0"),
        samples: r.usize("geometry", "samples", 100, 1),
    };

    let v0 = r.f64_list("designer", "v0", vec![10.0; 3], Some(3));
    if v0.iter().any(|x| !positive(*x)) {
        r.errors.push("`designer.v0` entries must be > 0".into());
    }
    let designer = DesignerConfig {
        jx_offset: r.f64("designer", "jx_offset", 0.0, f64::is_finite, "finite"),
        jz_offset: r.f64("designer", "jz_offset", 0.0, f64::is_finite, "finite"),
        v0: [v0[0], v0[1], v0[2]],
        a_s: r.f64("designer", "a_s", 0.01, f64::is_finite, "finite"),
        mass: r.f64("designer", "mass", 1.0, positive, "> 0"),
        spacing: r.f64("designer", "spacing", 1.0, positive, "> 0"),
        threshold: r.f64("designer", "threshold", 1e-2, positive, "> 0"),
    };

    let mass_sign = match r.string("model", "mass_sign") {
        None | Some("legendre") => MassSign::Legendre,
        Some("flipped") => MassSign::Flipped,
        Some(other) => {
            r.errors.push(format!("`model.mass_sign` = \"{other}\": expected \"legendre\" or \"flipped\"{}", suggestion(other, &["legendre", "flipped"])));
            MassSign::Legendre
        }
    };
    let hamiltonian = match r.string("model", "hamiltonian") {
        None | Some("simulator") => Model::Simulator,
        Some("target") => Model::Target(mass_sign),
        Some(other) => {
            r.errors.push(format!("`model.hamiltonian` = \"{other}\": expected \"simulator\" or \"target\"{}", suggestion(other, &["simulator", "target"])));
            Model::Simulator
        }
    };
    let currents = r.f64_list("model", "currents", vec![1.0, 1.0], Some(2));
    let model = ModelConfig {
        hamiltonian,
        mass_sign,
        temperature: r.f64("model", "temperature", 0.0, nonnegative, ">= 0"),
        levels: r.usize("model", "levels", 8, 1),
        currents: [currents[0], currents[1]],
    };

    if !r.errors.is_empty() {
        return Err(ConfigErrors(r.errors));
    }
    Ok(RunConfig {
        command: command.expect("no errors means a command"),
        params,
        lattice,
        truncation,
        sweep,
        geometry,
        designer,
        model,
        seed,
        output,
        threads,
    })
}
