//! Flat `block.key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use semiclassical::analysis::{centers, AssemblySetup};
use semiclassical::representatives::RepresentativeKind;
use semiclassical::wigner::WignerOptions;
use semiclassical::{make_phase_grid, Epsilon, GaussianSpec, PhaseGrid, Potential};
use toml::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    ForwardWigner,
    ForwardLiouville,
    ForwardSchrodinger,
    Representative,
    SweepEpsilon,
    SvdStudy,
    IdentityCheck,
    Reconstruct,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ForwardWigner => "forward-wigner",
            ExperimentKind::ForwardLiouville => "forward-liouville",
            ExperimentKind::ForwardSchrodinger => "forward-schrodinger",
            ExperimentKind::Representative => "representative",
            ExperimentKind::SweepEpsilon => "sweep-epsilon",
            ExperimentKind::SvdStudy => "svd-study",
            ExperimentKind::IdentityCheck => "identity-check",
            ExperimentKind::Reconstruct => "reconstruct",
        }
    }

    fn required_blocks(self) -> &'static [&'static str] {
        use ExperimentKind::*;
        match self {
            ForwardWigner | ForwardSchrodinger => &["grid", "time", "potential", "initial", "eps"],
            ForwardLiouville => &["grid", "time", "potential", "initial"],
            Representative => &["grid", "time", "potential", "initial", "final", "representative"],
            SweepEpsilon => &["grid", "time", "potential", "initial", "final", "sweep"],
            SvdStudy => &["grid", "time", "potential", "initial", "final", "sweep", "svd"],
            IdentityCheck => &["grid", "time", "potential", "initial", "final", "initial_prime", "final_prime", "eps"],
            Reconstruct => &["grid", "time", "potential", "initial", "final", "svd", "representative", "perturbation", "reconstruct"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Float,
    Int,
    Bool,
    Str,
    EpsLiteral,
    EpsList,
    IntList,
}

/// Every accepted key, in canonical order.
const SCHEMA: &[(&str, Ty)] = &[
    ("grid.x_min", Ty::Float),
    ("grid.x_max", Ty::Float),
    ("grid.n_x", Ty::Int),
    ("grid.k_min", Ty::Float),
    ("grid.k_max", Ty::Float),
    ("grid.n_k", Ty::Int),
    ("time.dt", Ty::Float),
    ("time.t_final", Ty::Float),
    ("potential.amplitude", Ty::Float),
    ("potential.center", Ty::Float),
    ("potential.width", Ty::Float),
    ("initial.amplitude", Ty::Float),
    ("initial.center_x", Ty::Float),
    ("initial.width_x", Ty::Float),
    ("initial.center_k", Ty::Float),
    ("initial.width_k", Ty::Float),
    ("final.amplitude", Ty::Float),
    ("final.center_x", Ty::Float),
    ("final.width_x", Ty::Float),
    ("final.center_k", Ty::Float),
    ("final.width_k", Ty::Float),
    ("initial_prime.amplitude", Ty::Float),
    ("initial_prime.center_x", Ty::Float),
    ("initial_prime.width_x", Ty::Float),
    ("initial_prime.center_k", Ty::Float),
    ("initial_prime.width_k", Ty::Float),
    ("final_prime.amplitude", Ty::Float),
    ("final_prime.center_x", Ty::Float),
    ("final_prime.width_x", Ty::Float),
    ("final_prime.center_k", Ty::Float),
    ("final_prime.width_k", Ty::Float),
    ("perturbation.amplitude", Ty::Float),
    ("perturbation.center", Ty::Float),
    ("perturbation.width", Ty::Float),
    ("eps.value", Ty::EpsLiteral),
    ("sweep.eps", Ty::EpsList),
    ("svd.center_min", Ty::Float),
    ("svd.center_max", Ty::Float),
    ("svd.count", Ty::Int),
    ("svd.singular_indices", Ty::IntList),
    ("svd.angle_ranks", Ty::IntList),
    ("representative.kind", Ty::Str),
    ("representative.oracle", Ty::Bool),
    ("reconstruct.lambda", Ty::Float),
    ("wigner.collision_number", Ty::Float),
];

/// A value as written, kept so that emission reproduces the input.
#[derive(Debug, Clone, PartialEq)]
pub enum Entry {
    Float(f64),
    Int(i64),
    Bool(bool),
    Str(String),
    Eps(EpsLiteral),
    EpsList(Vec<EpsLiteral>),
    IntList(Vec<i64>),
}

/// An ε given either as `pi^a*2^b` text or as a decimal.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsLiteral {
    pub text: Option<String>,
    pub value: f64,
}

impl EpsLiteral {
    pub fn epsilon(&self) -> Epsilon {
        Epsilon::new(self.value).expect("validated at parse")
    }

    fn emit(&self) -> String {
        match &self.text {
            Some(t) => format!("\"{t}\""),
            None => format!("{:?}", self.value),
        }
    }
}

/// Parses `pi^-1*2^-4`, `2^-3`, `pi^-1` or a plain decimal, factors joined by `*`.
pub fn parse_eps_literal(text: &str) -> Result<f64, String> {
    let mut value = 1.0;
    for factor in text.split('*').map(str::trim) {
        let (base, exp) = match factor.split_once('^') {
            Some((b, e)) => (b.trim(), e.trim().parse::<i32>().map_err(|_| format!("bad exponent in '{text}'"))?),
            None => (factor, 1),
        };
        let b = match base {
            "pi" => std::f64::consts::PI,
            other => other.parse::<f64>().map_err(|_| format!("cannot read '{factor}' in eps literal '{text}'"))?,
        };
        value *= b.powi(exp);
    }
    if !(value > 0.0 && value.is_finite()) {
        return Err(format!("eps literal '{text}' is not a positive number"));
    }
    Ok(value)
}

/// Validated key-value configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    entries: BTreeMap<String, Entry>,
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<(String, Value)>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Table(t) => flatten(&key, t, out),
            other => out.push((key, other.clone())),
        }
    }
}

fn convert(key: &str, ty: Ty, v: &Value) -> Result<Entry, String> {
    let eps_of = |v: &Value| -> Result<EpsLiteral, String> {
        match v {
            Value::String(s) => Ok(EpsLiteral { text: Some(s.clone()), value: parse_eps_literal(s)? }),
            Value::Float(f) if *f > 0.0 => Ok(EpsLiteral { text: None, value: *f }),
            _ => Err(format!("{key}: expected a positive eps literal")),
        }
    };
    match (ty, v) {
        (Ty::Float, Value::Float(f)) => Ok(Entry::Float(*f)),
        (Ty::Float, Value::Integer(i)) => Ok(Entry::Float(*i as f64)),
        (Ty::Int, Value::Integer(i)) => Ok(Entry::Int(*i)),
        (Ty::Bool, Value::Boolean(b)) => Ok(Entry::Bool(*b)),
        (Ty::Str, Value::String(s)) => Ok(Entry::Str(s.clone())),
        (Ty::EpsLiteral, v) => eps_of(v).map(Entry::Eps),
        (Ty::EpsList, Value::Array(a)) => a.iter().map(eps_of).collect::<Result<_, _>>().map(Entry::EpsList),
        (Ty::IntList, Value::Array(a)) => a
            .iter()
            .map(|x| x.as_integer().ok_or_else(|| format!("{key}: expected integers")))
            .collect::<Result<_, _>>()
            .map(Entry::IntList),
        _ => Err(format!("{key}: expected {ty:?}, got {}", v.type_str())),
    }
}

/// Parses text into a raw key map, collecting unknown-key and type errors.
fn parse_entries(text: &str, errors: &mut Vec<String>) -> BTreeMap<String, Entry> {
    let table: toml::Table = match text.parse() {
        Ok(t) => t,
        Err(e) => {
            errors.push(format!("syntax: {}", e.message()));
            return BTreeMap::new();
        }
    };
    let mut flat = Vec::new();
    flatten("", &table, &mut flat);
    let mut out = BTreeMap::new();
    for (key, value) in flat {
        match SCHEMA.iter().find(|(k, _)| *k == key) {
            None => errors.push(format!("unknown key '{key}'")),
            Some(&(_, ty)) => match convert(&key, ty, &value) {
                Ok(e) => {
                    out.insert(key, e);
                }
                Err(e) => errors.push(e),
            },
        }
    }
    out
}

/// All violations found while reading or validating a configuration.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{} configuration error(s):\n  {}", .0.len(), .0.join("\n  "))]
pub struct ConfigErrors(pub Vec<String>);

impl ExperimentConfig {
    /// Reads `text`, optionally layered over a base text (keys in `text` win).
    pub fn parse_layered(base: Option<&str>, text: Option<&str>) -> Result<Self, ConfigErrors> {
        let mut errors = Vec::new();
        let mut entries = BTreeMap::new();
        for t in [base, text].into_iter().flatten() {
            entries.extend(parse_entries(t, &mut errors));
        }
        let cfg = ExperimentConfig { entries };
        cfg.check_values(&mut errors);
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigErrors(errors))
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigErrors> {
        Self::parse_layered(None, Some(text))
    }

    fn check_values(&self, errors: &mut Vec<String>) {
        for (key, entry) in &self.entries {
            let positive = key.ends_with("width")
                || key.ends_with("width_x")
                || key.ends_with("width_k")
                || key == "time.dt"
                || key == "time.t_final"
                || key == "wigner.collision_number";
            match entry {
                Entry::Float(f) if !f.is_finite() => errors.push(format!("{key}: must be finite")),
                Entry::Float(f) if positive && *f <= 0.0 => errors.push(format!("{key}: must be positive, got {f}")),
                Entry::Float(f) if key == "reconstruct.lambda" && *f < 0.0 => {
                    errors.push(format!("{key}: must be non-negative, got {f}"))
                }
                Entry::Int(i) if *i <= 0 => errors.push(format!("{key}: must be positive, got {i}")),
                Entry::IntList(l) if l.iter().any(|i| *i <= 0) => errors.push(format!("{key}: entries must be positive")),
                Entry::EpsList(l) if l.len() < 3 => errors.push(format!("{key}: needs at least 3 values")),
                Entry::EpsList(l) if l.windows(2).any(|w| w[1].value >= w[0].value) => {
                    errors.push(format!("{key}: values must be strictly decreasing"))
                }
                Entry::Str(s) if key == "representative.kind" && parse_kind(s).is_none() => {
                    errors.push(format!("{key}: expected schrodinger, wigner or liouville, got '{s}'"))
                }
                _ => {}
            }
        }
        if let (Some(Entry::Int(nx)), Some(Entry::Int(nk))) = (self.entries.get("grid.n_x"), self.entries.get("grid.n_k")) {
            let (lo_x, hi_x, lo_k, hi_k) = (self.f("grid.x_min"), self.f("grid.x_max"), self.f("grid.k_min"), self.f("grid.k_max"));
            if let (Some(a), Some(b), Some(c), Some(d)) = (lo_x, hi_x, lo_k, hi_k) {
                if let Err(e) = PhaseGrid::new(a, b, *nx as usize, c, d, *nk as usize) {
                    errors.push(format!("grid: {e}"));
                }
            }
        }
    }

    /// Checks that every block the experiment needs is complete.
    pub fn validate_for(&self, kind: ExperimentKind) -> Result<(), ConfigErrors> {
        let mut errors = Vec::new();
        for block in kind.required_blocks() {
            let keys: Vec<&str> =
                SCHEMA.iter().map(|(k, _)| *k).filter(|k| k.split_once('.').map(|(b, _)| b) == Some(*block)).collect();
            if !keys.iter().any(|k| self.entries.contains_key(*k)) {
                errors.push(format!("missing block '{block}' required by {}", kind.name()));
                continue;
            }
            for k in keys.into_iter().filter(|k| !optional(k) && !self.entries.contains_key(*k)) {
                errors.push(format!("missing key '{k}' in block '{block}'"));
            }
        }
        if kind == ExperimentKind::Representative || kind == ExperimentKind::Reconstruct {
            if let Some(Entry::Str(s)) = self.entries.get("representative.kind") {
                if parse_kind(s) != Some(RepresentativeKind::Liouville) && !self.entries.contains_key("eps.value") {
                    errors.push(format!("missing block 'eps' required by {s} kernels"));
                }
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigErrors(errors))
        }
    }

    /// Canonical text: blocks and keys in schema order, one blank line
    /// between blocks.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        let mut last_block = None;
        for (key, _) in SCHEMA {
            let Some(entry) = self.entries.get(*key) else { continue };
            let block = key.split_once('.').map(|(b, _)| b);
            if last_block.is_some() && last_block != block {
                out.push('\n');
            }
            last_block = block;
            let value = match entry {
                Entry::Float(f) => format!("{f:?}"),
                Entry::Int(i) => i.to_string(),
                Entry::Bool(b) => b.to_string(),
                Entry::Str(s) => format!("\"{s}\""),
                Entry::Eps(e) => e.emit(),
                Entry::EpsList(l) => format!("[{}]", l.iter().map(EpsLiteral::emit).collect::<Vec<_>>().join(", ")),
                Entry::IntList(l) => format!("[{}]", l.iter().map(i64::to_string).collect::<Vec<_>>().join(", ")),
            };
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }

    fn f(&self, key: &str) -> Option<f64> {
        match self.entries.get(key) {
            Some(Entry::Float(f)) => Some(*f),
            _ => None,
        }
    }

    fn float(&self, key: &str) -> f64 {
        self.f(key).unwrap_or_else(|| panic!("{key} checked by validate_for"))
    }

    fn int(&self, key: &str) -> usize {
        match self.entries.get(key) {
            Some(Entry::Int(i)) => *i as usize,
            _ => panic!("{key} checked by validate_for"),
        }
    }

    pub fn grid(&self) -> PhaseGrid {
        make_phase_grid(
            self.float("grid.x_min"),
            self.float("grid.x_max"),
            self.int("grid.n_x"),
            self.float("grid.k_min"),
            self.float("grid.k_max"),
            self.int("grid.n_k"),
        )
        .expect("grid checked at parse")
    }

    pub fn dt(&self) -> f64 {
        self.float("time.dt")
    }

    pub fn t_final(&self) -> f64 {
        self.float("time.t_final")
    }

    fn x_gaussian(&self, block: &str) -> semiclassical::Result<GaussianSpec> {
        GaussianSpec::x(
            self.float(&format!("{block}.amplitude")),
            self.float(&format!("{block}.center")),
            self.float(&format!("{block}.width")),
        )
    }

    pub fn potential(&self) -> semiclassical::Result<Potential> {
        self.x_gaussian("potential").map(Potential::Gaussian)
    }

    pub fn perturbation(&self) -> semiclassical::Result<Potential> {
        self.x_gaussian("perturbation").map(Potential::Gaussian)
    }

    /// Phase-space Gaussian of block `initial`, `final`, `initial_prime` or `final_prime`.
    pub fn data(&self, block: &str) -> semiclassical::Result<GaussianSpec> {
        let g = |k: &str| self.float(&format!("{block}.{k}"));
        GaussianSpec::phase(g("amplitude"), g("center_x"), g("width_x"), g("center_k"), g("width_k"))
    }

    pub fn eps(&self) -> Option<Epsilon> {
        match self.entries.get("eps.value") {
            Some(Entry::Eps(e)) => Some(e.epsilon()),
            _ => None,
        }
    }

    pub fn sweep(&self) -> Vec<Epsilon> {
        match self.entries.get("sweep.eps") {
            Some(Entry::EpsList(l)) => l.iter().map(EpsLiteral::epsilon).collect(),
            _ => panic!("sweep.eps checked by validate_for"),
        }
    }

    pub fn sweep_labels(&self) -> Vec<String> {
        match self.entries.get("sweep.eps") {
            Some(Entry::EpsList(l)) => l.iter().map(|e| e.text.clone().unwrap_or_else(|| format!("{:?}", e.value))).collect(),
            _ => Vec::new(),
        }
    }

    pub fn svd_centers(&self) -> Vec<f64> {
        centers(self.float("svd.center_min"), self.float("svd.center_max"), self.int("svd.count"))
    }

    fn int_list(&self, key: &str, default: &[usize]) -> Vec<usize> {
        match self.entries.get(key) {
            Some(Entry::IntList(l)) => l.iter().map(|&i| i as usize).collect(),
            _ => default.to_vec(),
        }
    }

    pub fn singular_indices(&self) -> Vec<usize> {
        self.int_list("svd.singular_indices", &[2, 3, 4, 5])
    }

    pub fn angle_ranks(&self) -> Vec<usize> {
        self.int_list("svd.angle_ranks", &[1, 3])
    }

    pub fn representative_kind(&self) -> RepresentativeKind {
        match self.entries.get("representative.kind") {
            Some(Entry::Str(s)) => parse_kind(s).expect("checked at parse"),
            _ => panic!("representative.kind checked by validate_for"),
        }
    }

    pub fn oracle(&self) -> bool {
        matches!(self.entries.get("representative.oracle"), Some(Entry::Bool(true)))
    }

    pub fn lambda(&self) -> f64 {
        self.float("reconstruct.lambda")
    }

    pub fn wigner_options(&self) -> WignerOptions {
        match self.f("wigner.collision_number") {
            Some(c) => WignerOptions { collision_number: c },
            None => WignerOptions::default(),
        }
    }

    pub fn assembly_setup(&self) -> semiclassical::Result<AssemblySetup> {
        Ok(AssemblySetup {
            grid: self.grid(),
            potential: self.potential()?,
            initial: self.data("initial")?,
            final_data: self.data("final")?,
            dt: self.dt(),
            t_final: self.t_final(),
            wigner: self.wigner_options(),
        })
    }
}

fn optional(key: &str) -> bool {
    matches!(key, "svd.singular_indices" | "svd.angle_ranks" | "representative.oracle")
}

pub fn parse_kind(s: &str) -> Option<RepresentativeKind> {
    match s {
        "schrodinger" => Some(RepresentativeKind::Schrodinger),
        "wigner" => Some(RepresentativeKind::Wigner),
        "liouville" => Some(RepresentativeKind::Liouville),
        _ => None,
    }
}

pub const FULL_PRESET: &str = include_str!("../presets/paper-5.2.toml");
pub const DESK_PRESET: &str = include_str!("../presets/desk.toml");
pub const IDENTITY_PRESET: &str = include_str!("../presets/identity.toml");

pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "paper-5.2" => Some(FULL_PRESET),
        "desk" => Some(DESK_PRESET),
        "identity" => Some(IDENTITY_PRESET),
        _ => None,
    }
}
