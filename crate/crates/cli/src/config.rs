//! Run configuration: a flat `key = value` text format plus overrides.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use kinfluid_core::BoundaryKind;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    InvalidValue { key: String, value: String, reason: String },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("`{key}` {reason}")]
    Constraint { key: &'static str, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Sod,
    Blast,
    Far,
}

impl Case {
    /// Snapshot times shown for each test problem.
    pub fn default_times(self) -> Vec<f64> {
        match self {
            Case::Sod => vec![0.05, 0.10, 0.15, 0.20],
            Case::Blast => vec![0.05, 0.15, 0.25, 0.35],
            Case::Far => vec![0.10, 0.40, 0.70, 1.0],
        }
    }

    pub fn default_v_max(self) -> f64 {
        match self {
            Case::Sod => 8.0,
            Case::Blast => 7.5,
            Case::Far => 4.0,
        }
    }

    pub fn default_epsilon(self) -> Epsilon {
        match self {
            Case::Sod => Epsilon::Value(1e-3),
            Case::Blast => Epsilon::Value(1e-2),
            Case::Far => Epsilon::FarProfile,
        }
    }

    pub fn default_boundary(self) -> BoundaryKind {
        match self {
            Case::Blast => BoundaryKind::SpecularWall,
            _ => BoundaryKind::NeumannCopy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Euler,
    Cns,
    Bgk,
    HybridEuler,
    HybridCns,
}

impl Model {
    pub const ALL: [Model; 5] = [Model::Euler, Model::Cns, Model::Bgk, Model::HybridEuler, Model::HybridCns];

    /// Fluid closure order used by the model.
    pub fn order(self) -> u8 {
        match self {
            Model::Euler | Model::HybridEuler | Model::Bgk => 0,
            Model::Cns | Model::HybridCns => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Epsilon {
    Value(f64),
    /// Smooth profile that is large in the middle of the domain and tiny
    /// near its ends.
    FarProfile,
}

impl Epsilon {
    pub fn at(self, x: f64) -> f64 {
        match self {
            Epsilon::Value(e) => e,
            Epsilon::FarProfile => 1e-4 + 0.5 * ((1.0 + 30.0 * x).atan() + (1.0 - 30.0 * x).atan()),
        }
    }
}

macro_rules! keyword_enum {
    ($ty:ty { $($name:literal => $variant:expr),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($name => Ok($variant),)+
                    _ => Err(format!("expected one of: {}", [$($name),+].join(", "))),
                }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                $(if *self == $variant { return f.write_str($name); })+
                unreachable!()
            }
        }
    };
}

keyword_enum!(Case { "sod" => Case::Sod, "blast" => Case::Blast, "far" => Case::Far });
keyword_enum!(Model {
    "euler" => Model::Euler,
    "cns" => Model::Cns,
    "bgk" => Model::Bgk,
    "hybrid-euler" => Model::HybridEuler,
    "hybrid-cns" => Model::HybridCns,
});

impl FromStr for Epsilon {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "far" || s == "far-profile" {
            return Ok(Epsilon::FarProfile);
        }
        s.parse::<f64>().map(Epsilon::Value).map_err(|e| e.to_string())
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Epsilon::Value(e) => write!(f, "{e}"),
            Epsilon::FarProfile => f.write_str("far-profile"),
        }
    }
}

fn parse_boundary(s: &str) -> Result<BoundaryKind, String> {
    match s {
        "neumann" => Ok(BoundaryKind::NeumannCopy),
        "specular" => Ok(BoundaryKind::SpecularWall),
        "periodic" => Ok(BoundaryKind::Periodic),
        _ => Err("expected one of: neumann, specular, periodic".into()),
    }
}

fn boundary_name(b: BoundaryKind) -> &'static str {
    match b {
        BoundaryKind::NeumannCopy => "neumann",
        BoundaryKind::SpecularWall => "specular",
        BoundaryKind::Periodic => "periodic",
    }
}

/// Everything needed to reproduce a run. Fully deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseConfig {
    pub case: Case,
    pub model: Model,
    pub epsilon: Epsilon,
    pub nx: usize,
    /// Velocity nodes per axis.
    pub nv: usize,
    pub v_max: f64,
    pub t_end: f64,
    pub snapshots: Vec<f64>,
    pub eta0: f64,
    pub delta0: f64,
    pub dt_over_eps_min: f64,
    pub cfl_kinetic: f64,
    pub cfl_fluid: f64,
    pub cfl_parabolic: f64,
    pub beta: f64,
    pub omega: f64,
    pub boundary: BoundaryKind,
    pub out: Option<PathBuf>,
}

impl CaseConfig {
    pub fn new(case: Case, model: Model) -> Self {
        let snapshots = case.default_times();
        let defaults = kinfluid_core::hybrid::HybridConfig::new(0);
        Self {
            case,
            model,
            epsilon: case.default_epsilon(),
            nx: 100,
            nv: 16,
            v_max: case.default_v_max(),
            t_end: *snapshots.last().unwrap(),
            snapshots,
            eta0: defaults.indicators.eta0,
            delta0: defaults.indicators.delta0,
            dt_over_eps_min: defaults.indicators.dt_over_eps_min,
            cfl_kinetic: defaults.kinetic.cfl,
            cfl_fluid: defaults.fluid.cfl,
            cfl_parabolic: defaults.fluid.cfl_parabolic,
            beta: 0.0,
            omega: 1.0,
            boundary: case.default_boundary(),
            out: None,
        }
    }

    /// Parses a config file. `case` and `model` may appear anywhere; they
    /// reset the case-dependent defaults, so other keys override them.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut pairs = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: n + 1 })?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let refs: Vec<(&str, &str)> = pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        Self::from_pairs(&refs)
    }

    /// Builds a configuration from ordered key/value pairs; later pairs win.
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self, ConfigError> {
        let lookup = |key: &str| pairs.iter().rev().find(|(k, _)| *k == key).map(|&(_, v)| v);
        let case = match lookup("case") {
            Some(v) => parse_value("case", v)?,
            None => Case::Sod,
        };
        let model = match lookup("model") {
            Some(v) => parse_value("model", v)?,
            None => Model::Euler,
        };
        let mut cfg = Self::new(case, model);
        let mut t_end_set = false;
        let mut snaps_set = false;
        for &(k, v) in pairs {
            match k {
                "case" | "model" => {}
                "t_end" => {
                    cfg.set(k, v)?;
                    t_end_set = true;
                }
                "snapshots" => {
                    cfg.set(k, v)?;
                    snaps_set = true;
                }
                _ => cfg.set(k, v)?,
            }
        }
        cfg.reconcile_times(t_end_set, snaps_set);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Keeps `t_end` and the snapshot list consistent when only one of them
    /// was given.
    pub fn reconcile_times(&mut self, t_end_set: bool, snaps_set: bool) {
        if t_end_set && !snaps_set {
            let t = self.t_end;
            self.snapshots.retain(|&s| s <= t * (1.0 + 1e-12));
            if self.snapshots.last().is_none_or(|&s| (s - t).abs() > 1e-12 * t.max(1.0)) {
                self.snapshots.push(t);
            }
        } else if snaps_set && !t_end_set {
            self.t_end = self.snapshots.iter().copied().fold(0.0, f64::max);
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "case" => self.case = parse_value(key, value)?,
            "model" => self.model = parse_value(key, value)?,
            "epsilon" => self.epsilon = parse_value(key, value)?,
            "nx" => self.nx = parse_value(key, value)?,
            "nv" => self.nv = parse_value(key, value)?,
            "v_max" => self.v_max = parse_value(key, value)?,
            "t_end" => self.t_end = parse_value(key, value)?,
            "snapshots" => {
                self.snapshots = value
                    .split(',')
                    .map(|s| parse_value::<f64>(key, s.trim()))
                    .collect::<Result<_, _>>()?;
            }
            "eta0" => self.eta0 = parse_value(key, value)?,
            "delta0" => self.delta0 = parse_value(key, value)?,
            "dt_over_eps_min" => self.dt_over_eps_min = parse_value(key, value)?,
            "cfl_kinetic" => self.cfl_kinetic = parse_value(key, value)?,
            "cfl_fluid" => self.cfl_fluid = parse_value(key, value)?,
            "cfl_parabolic" => self.cfl_parabolic = parse_value(key, value)?,
            "beta" => self.beta = parse_value(key, value)?,
            "omega" => self.omega = parse_value(key, value)?,
            "boundary" => {
                self.boundary = parse_boundary(value).map_err(|reason| invalid(key, value, reason))?;
            }
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |key: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::Constraint { key, reason: format!("must be positive, got {v}") })
            }
        };
        if self.nx < 4 {
            return Err(ConfigError::Constraint { key: "nx", reason: "needs at least 4 cells".into() });
        }
        if self.nv < 2 {
            return Err(ConfigError::Constraint { key: "nv", reason: "needs at least 2 nodes per axis".into() });
        }
        if let Epsilon::Value(e) = self.epsilon {
            positive("epsilon", e)?;
        }
        positive("v_max", self.v_max)?;
        positive("t_end", self.t_end)?;
        positive("eta0", self.eta0)?;
        positive("delta0", self.delta0)?;
        positive("cfl_kinetic", self.cfl_kinetic)?;
        positive("cfl_fluid", self.cfl_fluid)?;
        positive("cfl_parabolic", self.cfl_parabolic)?;
        if self.dt_over_eps_min.is_nan() || self.dt_over_eps_min < 0.0 {
            return Err(ConfigError::Constraint { key: "dt_over_eps_min", reason: "must be non-negative".into() });
        }
        if !(-0.5..1.0).contains(&self.beta) {
            return Err(ConfigError::Constraint { key: "beta", reason: "must lie in [-1/2, 1)".into() });
        }
        if !self.omega.is_finite() {
            return Err(ConfigError::Constraint { key: "omega", reason: "must be finite".into() });
        }
        if self.snapshots.is_empty() {
            return Err(ConfigError::Constraint { key: "snapshots", reason: "needs at least one time".into() });
        }
        for &s in &self.snapshots {
            positive("snapshots", s)?;
            if s > self.t_end * (1.0 + 1e-12) {
                return Err(ConfigError::Constraint { key: "snapshots", reason: format!("time {s} is after t_end") });
            }
        }
        if self.snapshots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::Constraint { key: "snapshots", reason: "must be increasing".into() });
        }
        Ok(())
    }

    /// `key = value` lines that parse back to this configuration.
    pub fn to_text(&self) -> String {
        let snaps: Vec<String> = self.snapshots.iter().map(|s| s.to_string()).collect();
        let mut s = format!(
            "case = {}\nmodel = {}\nepsilon = {}\nnx = {}\nnv = {}\nv_max = {}\nt_end = {}\nsnapshots = {}\n\
             eta0 = {}\ndelta0 = {}\ndt_over_eps_min = {}\ncfl_kinetic = {}\ncfl_fluid = {}\ncfl_parabolic = {}\n\
             beta = {}\nomega = {}\nboundary = {}\n",
            self.case,
            self.model,
            self.epsilon,
            self.nx,
            self.nv,
            self.v_max,
            self.t_end,
            snaps.join(","),
            self.eta0,
            self.delta0,
            self.dt_over_eps_min,
            self.cfl_kinetic,
            self.cfl_fluid,
            self.cfl_parabolic,
            self.beta,
            self.omega,
            boundary_name(self.boundary),
        );
        if let Some(out) = &self.out {
            s.push_str(&format!("out = {}\n", out.display()));
        }
        s
    }
}

fn invalid(key: &str, value: &str, reason: impl ToString) -> ConfigError {
    ConfigError::InvalidValue { key: key.to_string(), value: value.to_string(), reason: reason.to_string() }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| invalid(key, value, e))
}
