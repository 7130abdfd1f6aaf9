//! Experiment configuration: JSON or `dotted.key = value` text, merged with
//! command-line overrides and checked before any recipe runs.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

/// Largest register the dense backend accepts.
pub const DENSE_MAX_SITES: usize = 14;
/// `auto` switches to the Gaussian backend above this size.
pub const AUTO_DENSE_MAX_SITES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Recipe {
    CoolingMse,
    Mitigate,
    Unified,
    GaussianDecay,
    Validate,
}

impl Recipe {
    pub fn name(self) -> &'static str {
        match self {
            Recipe::CoolingMse => "cooling-mse",
            Recipe::Mitigate => "mitigate",
            Recipe::Unified => "unified",
            Recipe::GaussianDecay => "gaussian-decay",
            Recipe::Validate => "validate",
        }
    }

    /// Recipes that apply noise channels to a dense state.
    fn needs_channels(self) -> bool {
        matches!(self, Recipe::Mitigate | Recipe::Unified)
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    #[default]
    Auto,
    Dense,
    Gaussian,
}

/// Backend actually used for one system size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Dense,
    Gaussian,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Dense => "dense",
            Engine::Gaussian => "gaussian",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseChoice {
    GlobalDepolarizing,
    #[default]
    LocalDepolarizing,
    LocalDephasing,
}

impl NoiseChoice {
    pub fn name(self) -> &'static str {
        match self {
            NoiseChoice::GlobalDepolarizing => "global-depolarizing",
            NoiseChoice::LocalDepolarizing => "local-depolarizing",
            NoiseChoice::LocalDephasing => "local-dephasing",
        }
    }

    pub fn kind(self) -> vpure::channels::NoiseKind {
        use vpure::channels::NoiseKind;
        match self {
            NoiseChoice::GlobalDepolarizing => NoiseKind::GlobalDepolarizing,
            NoiseChoice::LocalDepolarizing => NoiseKind::LocalDepolarizing,
            NoiseChoice::LocalDephasing => NoiseKind::LocalDephasing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayStudy {
    /// Critical TFI chain, HS distance of an `N_A`-site block.
    #[serde(rename = "critical-1d")]
    Critical1d,
    /// Zero-temperature 2D Fermi sea, single-site trace distance.
    FermiGround,
    /// Finite-temperature 2D/3D Fermi sea, single-site trace distance.
    FermiThermal,
}

impl DecayStudy {
    pub fn name(self) -> &'static str {
        match self {
            DecayStudy::Critical1d => "critical-1d",
            DecayStudy::FermiGround => "fermi-ground",
            DecayStudy::FermiThermal => "fermi-thermal",
        }
    }
}

/// Inclusive range of buffer widths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BufferRange {
    pub from: usize,
    pub to: usize,
}

impl BufferRange {
    pub fn widths(self) -> impl Iterator<Item = usize> {
        self.from..=self.to
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    /// Chain lengths `N`, one sweep cell each.
    pub sites: Vec<usize>,
    /// Transverse field `λ`.
    pub field: f64,
    /// Inverse temperature of the input Gibbs state.
    pub beta: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { sites: vec![8], field: 1.0, beta: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolConfig {
    pub copies: u32,
    pub buffers: Vec<usize>,
    pub noise: NoiseChoice,
    pub rates: Vec<f64>,
    /// Shots per circuit; `cooling-mse` emits one row per value.
    pub shots: Vec<u64>,
    pub seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            copies: 2,
            buffers: vec![1, 2, 3],
            noise: NoiseChoice::default(),
            rates: vec![0.0],
            shots: vec![1 << 14],
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecayConfig {
    pub studies: Vec<DecayStudy>,
    /// Block lengths `N_A` for the critical chain.
    pub supports: Vec<usize>,
    pub critical_buffers: BufferRange,
    /// Chemical potentials of the zero-temperature 2D runs.
    pub ground_potentials: Vec<f64>,
    pub ground_buffers: BufferRange,
    pub thermal_potential: f64,
    pub thermal_betas: Vec<f64>,
    pub thermal_dimensions: Vec<usize>,
    pub thermal_buffers_2d: BufferRange,
    pub thermal_buffers_3d: BufferRange,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            studies: vec![DecayStudy::Critical1d, DecayStudy::FermiGround, DecayStudy::FermiThermal],
            supports: vec![2, 4],
            critical_buffers: BufferRange { from: 1, to: 40 },
            ground_potentials: vec![-0.3, -1.0],
            ground_buffers: BufferRange { from: 1, to: 30 },
            thermal_potential: -0.3,
            thermal_betas: vec![1.0, 2.0, 4.0],
            thermal_dimensions: vec![2, 3],
            thermal_buffers_2d: BufferRange { from: 1, to: 20 },
            thermal_buffers_3d: BufferRange { from: 1, to: 10 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// File stem; defaults to the recipe name.
    pub name: Option<String>,
    pub svg: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), name: None, svg: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Usually supplied on the command line.
    pub recipe: Option<Recipe>,
    pub backend: Backend,
    pub model: ModelConfig,
    pub protocol: ProtocolConfig,
    pub decay: DecayConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            recipe: None,
            backend: Backend::Auto,
            model: ModelConfig::default(),
            protocol: ProtocolConfig::default(),
            decay: DecayConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

/// Parses a config document. Text whose first non-blank character is `{` is
/// JSON, anything else is the key-value form.
pub fn parse_document(text: &str) -> CliResult<Value> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| CliError::config(format!("line {}", e.line()), e.to_string()))
    } else {
        parse_key_values(text)
    }
}

/// `a.b.c = value` lines; `#` starts a comment line. Values are read as JSON
/// when they parse as JSON and as bare strings otherwise.
pub fn parse_key_values(text: &str) -> CliResult<Value> {
    let mut root = Value::Object(Map::new());
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::config(format!("line {}", lineno + 1), "expected `key = value`"));
        };
        insert_dotted(&mut root, key.trim(), parse_scalar(value.trim()), false)?;
    }
    Ok(root)
}

fn parse_scalar(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|_| Value::String(text.to_string()))
}

fn valid_segment(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Sets `key` inside `root`, creating intermediate objects. With `replace`
/// false a key that is already present is an error.
pub fn insert_dotted(root: &mut Value, key: &str, value: Value, replace: bool) -> CliResult<()> {
    let segments: Vec<&str> = key.split('.').collect();
    if !segments.iter().all(|s| valid_segment(s)) {
        return Err(CliError::config(key, "malformed key"));
    }
    let (last, parents) = segments.split_last().expect("split yields at least one segment");
    let mut node = root;
    for (depth, seg) in parents.iter().enumerate() {
        let map = node
            .as_object_mut()
            .ok_or_else(|| CliError::config(segments[..depth].join("."), "is a value, not a table"))?;
        node = map.entry(seg.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    let map = node
        .as_object_mut()
        .ok_or_else(|| CliError::config(parents.join("."), "is a value, not a table"))?;
    if !replace && map.contains_key(*last) {
        return Err(CliError::config(key, "duplicate key"));
    }
    map.insert(last.to_string(), value);
    Ok(())
}

/// Applies a `key=value` override from the command line.
pub fn apply_override(root: &mut Value, assignment: &str) -> CliResult<()> {
    let Some((key, value)) = assignment.split_once('=') else {
        return Err(CliError::config(assignment, "override must look like `key=value`"));
    };
    insert_dotted(root, key.trim(), parse_scalar(value.trim()), true)
}

/// Typed view of a merged document; errors name the offending field.
pub fn from_value(value: Value) -> CliResult<ExperimentConfig> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        CliError::config(if path == "." { "<root>".to_string() } else { path }, e.into_inner().to_string())
    })
}

pub fn read_document(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Input { path: path.to_path_buf(), source })?;
    parse_document(&text)
}

impl ExperimentConfig {
    pub fn recipe(&self) -> CliResult<Recipe> {
        self.recipe.ok_or_else(|| CliError::config("recipe", "no recipe given"))
    }

    pub fn file_stem(&self) -> CliResult<String> {
        Ok(self.output.name.clone().unwrap_or_else(|| self.recipe.map(Recipe::name).unwrap_or("run").to_string()))
    }

    /// Backend for a chain of `sites` spins under this recipe.
    pub fn engine_for(&self, sites: usize) -> CliResult<Engine> {
        let recipe = self.recipe()?;
        let engine = match self.backend {
            Backend::Dense => Engine::Dense,
            Backend::Gaussian => Engine::Gaussian,
            Backend::Auto if recipe == Recipe::GaussianDecay => Engine::Gaussian,
            Backend::Auto if sites <= AUTO_DENSE_MAX_SITES => Engine::Dense,
            Backend::Auto => Engine::Gaussian,
        };
        if engine == Engine::Dense && sites > DENSE_MAX_SITES {
            return Err(CliError::config(
                "model.sites",
                format!("{sites} sites exceeds the dense backend limit of {DENSE_MAX_SITES}"),
            ));
        }
        if engine == Engine::Gaussian && recipe.needs_channels() {
            return Err(CliError::BackendMismatch {
                recipe: recipe.to_string(),
                backend: "gaussian".into(),
                reason: format!(
                    "noise channels on an interacting-state density matrix need the dense engine ({sites} sites requested)"
                ),
            });
        }
        if engine == Engine::Dense && recipe == Recipe::GaussianDecay {
            return Err(CliError::BackendMismatch {
                recipe: recipe.to_string(),
                backend: "dense".into(),
                reason: "the decay studies use infinite systems".into(),
            });
        }
        Ok(engine)
    }

    /// Checks ranges and backend compatibility for the selected recipe.
    pub fn validate(&self) -> CliResult<()> {
        let recipe = self.recipe()?;
        let m = &self.model;
        let p = &self.protocol;
        if p.copies == 0 {
            return Err(CliError::config("protocol.copies", "must be at least 1"));
        }
        if let Some(name) = &self.output.name {
            if !valid_segment(name) {
                return Err(CliError::config("output.name", "use letters, digits, `-` and `_` only"));
            }
        }
        let needs_chain = matches!(recipe, Recipe::CoolingMse | Recipe::Mitigate | Recipe::Unified);
        if needs_chain {
            if m.sites.is_empty() {
                return Err(CliError::config("model.sites", "at least one system size is required"));
            }
            if let Some(&n) = m.sites.iter().find(|&&n| n < 3) {
                return Err(CliError::config("model.sites", format!("ring needs at least 3 sites, got {n}")));
            }
            if !m.field.is_finite() {
                return Err(CliError::config("model.field", "must be finite"));
            }
            if p.buffers.is_empty() {
                return Err(CliError::config("protocol.buffers", "at least one buffer width is required"));
            }
            for &n in &m.sites {
                self.engine_for(n)?;
            }
        }
        if matches!(recipe, Recipe::CoolingMse | Recipe::Unified) && !(m.beta > 0.0 && m.beta.is_finite()) {
            return Err(CliError::config("model.beta", "must be positive and finite"));
        }
        if recipe == Recipe::CoolingMse {
            if p.shots.is_empty() || p.shots.contains(&0) {
                return Err(CliError::config("protocol.shots", "need at least one positive shot count"));
            }
        }
        if recipe.needs_channels() {
            if p.rates.is_empty() {
                return Err(CliError::config("protocol.rates", "at least one error rate is required"));
            }
            if let Some(r) = p.rates.iter().find(|r| !(0.0..=1.0).contains(*r)) {
                return Err(CliError::config("protocol.rates", format!("rate {r} outside [0, 1]")));
            }
        }
        if recipe == Recipe::GaussianDecay {
            self.engine_for(0)?;
            self.validate_decay()?;
        }
        Ok(())
    }

    fn validate_decay(&self) -> CliResult<()> {
        let d = &self.decay;
        let ranges = [
            ("decay.critical_buffers", d.critical_buffers),
            ("decay.ground_buffers", d.ground_buffers),
            ("decay.thermal_buffers_2d", d.thermal_buffers_2d),
            ("decay.thermal_buffers_3d", d.thermal_buffers_3d),
        ];
        for (path, r) in ranges {
            if r.from == 0 || r.from > r.to {
                return Err(CliError::config(path, "need 1 <= from <= to"));
            }
        }
        if d.supports.contains(&0) {
            return Err(CliError::config("decay.supports", "block lengths must be positive"));
        }
        if let Some(b) = d.thermal_betas.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
            return Err(CliError::config("decay.thermal_betas", format!("inverse temperature {b} must be positive")));
        }
        if let Some(dim) = d.thermal_dimensions.iter().find(|&&x| !(2..=3).contains(&x)) {
            return Err(CliError::config("decay.thermal_dimensions", format!("dimension {dim} is not 2 or 3")));
        }
        let potentials = d.ground_potentials.iter().chain(std::iter::once(&d.thermal_potential));
        if let Some(mu) = potentials.into_iter().find(|m| !m.is_finite()) {
            return Err(CliError::config("decay", format!("chemical potential {mu} must be finite")));
        }
        Ok(())
    }
}
