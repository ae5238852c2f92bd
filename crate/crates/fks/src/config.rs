//! Run configuration in a flat `section.key = value` text format.
//!
//! Blank lines and lines starting with `#` are ignored. The run manifest is
//! written in the same format, so it can be fed back as a configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fks_core::problems::{Problem, ProblemSpec, VortexParams};
use fks_core::{Scheme, SolverConfig};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: invalid value `{value}` for `{key}`")]
    Value {
        line: usize,
        key: String,
        value: String,
    },
    #[error("unknown problem `{0}`")]
    Problem(String),
    #[error("unknown scheme `{0}`")]
    Scheme(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: Problem,
    pub scheme: Scheme,
    pub cells: Option<usize>,
    pub velocity_nodes: Option<usize>,
    pub velocity_bound: Option<f64>,
    pub tau: Option<f64>,
    pub t_final: Option<f64>,
    pub gamma: Option<f64>,
    pub cfl: f64,
    /// Fixed time step; overrides the CFL rule when set.
    pub dt: Option<f64>,
    pub vortex_center: Option<[f64; 2]>,
    pub output_dir: PathBuf,
    /// Write a snapshot every `k` cycles; 0 writes only the final one.
    pub output_every: usize,
}

impl RunConfig {
    pub fn new(problem: Problem, scheme: Scheme) -> Self {
        RunConfig {
            problem,
            scheme,
            cells: None,
            velocity_nodes: None,
            velocity_bound: None,
            tau: None,
            t_final: None,
            gamma: None,
            cfl: 0.5,
            dt: None,
            vortex_center: None,
            output_dir: PathBuf::from("output"),
            output_every: 0,
        }
    }

    /// The problem setup with every override applied.
    pub fn problem_spec(&self) -> ProblemSpec {
        let mut spec = self.problem.spec();
        if let Some(c) = self.cells {
            spec.cells = c;
        }
        if let Some(n) = self.velocity_nodes {
            spec.velocity_nodes = n;
        }
        if let Some(b) = self.velocity_bound {
            spec.velocity_bound = b;
        }
        if let Some(t) = self.tau {
            spec.tau = t;
        }
        if let Some(t) = self.t_final {
            spec.t_final = t;
        }
        if let Some(g) = self.gamma {
            spec.gamma = g;
        }
        if let (Some(c), fks_core::problems::InitialData::Vortex(p)) =
            (self.vortex_center, &mut spec.initial)
        {
            *p = VortexParams { center: c, ..*p };
        }
        spec
    }

    pub fn solver_config(&self) -> SolverConfig {
        let spec = self.problem_spec();
        SolverConfig {
            scheme: self.scheme,
            tau: spec.tau,
            cfl: self.cfl,
            gamma: spec.gamma,
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::new(Problem::Sod1d, Scheme::Fks);
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed
                .split_once('=')
                .ok_or(ConfigError::Syntax { line })?;
            cfg.set(key.trim(), value.trim(), line)?;
        }
        Ok(cfg)
    }

    /// Applies one `key = value` pair.
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        let bad = || ConfigError::Value {
            line,
            key: key.to_string(),
            value: value.to_string(),
        };
        let float = || value.parse::<f64>().map_err(|_| bad());
        let count = || value.parse::<usize>().map_err(|_| bad());
        let optional = |v: &str| v == "default";
        match key {
            "run.problem" => {
                self.problem =
                    Problem::from_name(value).ok_or_else(|| ConfigError::Problem(value.into()))?
            }
            "run.scheme" => {
                self.scheme =
                    Scheme::from_name(value).ok_or_else(|| ConfigError::Scheme(value.into()))?
            }
            "mesh.cells" => {
                self.cells = if optional(value) {
                    None
                } else {
                    Some(count()?)
                }
            }
            "velocity.nodes" => {
                self.velocity_nodes = if optional(value) {
                    None
                } else {
                    Some(count()?)
                }
            }
            "velocity.bound" => {
                self.velocity_bound = if optional(value) {
                    None
                } else {
                    Some(float()?)
                }
            }
            "physics.tau" => {
                self.tau = if optional(value) {
                    None
                } else {
                    Some(float()?)
                }
            }
            "physics.gamma" => {
                self.gamma = if optional(value) {
                    None
                } else {
                    Some(float()?)
                }
            }
            "time.final" => {
                self.t_final = if optional(value) {
                    None
                } else {
                    Some(float()?)
                }
            }
            "time.cfl" => self.cfl = float()?,
            "time.dt" => {
                self.dt = if optional(value) {
                    None
                } else {
                    Some(float()?)
                }
            }
            "vortex.center" => {
                self.vortex_center = if optional(value) {
                    None
                } else {
                    let (x, y) = value.split_once(',').ok_or_else(bad)?;
                    Some([
                        x.trim().parse().map_err(|_| bad())?,
                        y.trim().parse().map_err(|_| bad())?,
                    ])
                }
            }
            "output.dir" => self.output_dir = PathBuf::from(value),
            "output.every" => self.output_every = count()?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    /// Fully resolved parameters in the configuration format. Floats use the
    /// shortest representation that parses back to the same value.
    pub fn manifest(&self) -> String {
        let spec = self.problem_spec();
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("run.problem", spec.name().into());
        put("run.scheme", self.scheme.name().into());
        put("mesh.cells", spec.cells.to_string());
        put("velocity.nodes", spec.velocity_nodes.to_string());
        put("velocity.bound", format!("{:?}", spec.velocity_bound));
        put("physics.tau", format!("{:?}", spec.tau));
        put("physics.gamma", format!("{:?}", spec.gamma));
        put("time.final", format!("{:?}", spec.t_final));
        put("time.cfl", format!("{:?}", self.cfl));
        put(
            "time.dt",
            self.dt.map_or("default".into(), |d| format!("{d:?}")),
        );
        if let Some(p) = spec.vortex() {
            put(
                "vortex.center",
                format!("{:?}, {:?}", p.center[0], p.center[1]),
            );
        }
        put("output.dir", self.output_dir.display().to_string());
        put("output.every", self.output_every.to_string());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_round_trip() {
        let text = "# sample\nrun.problem = vortex2d\nrun.scheme = hofks\nmesh.cells = 50\n\nphysics.tau = 1e-4\nvortex.center = 0, 0\ntime.dt = 0.001\noutput.every = 3\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.problem, Problem::Vortex2d);
        assert_eq!(cfg.scheme, Scheme::Hofks);
        assert_eq!(cfg.cells, Some(50));
        assert_eq!(cfg.vortex_center, Some([0.0, 0.0]));
        let again = RunConfig::parse(&cfg.manifest()).unwrap();
        assert_eq!(again.problem_spec(), cfg.problem_spec());
        assert_eq!(again.manifest(), cfg.manifest());
    }

    #[test]
    fn rejects_unknown_keys_and_values() {
        assert!(matches!(
            RunConfig::parse("foo.bar = 1"),
            Err(ConfigError::UnknownKey { line: 1, .. })
        ));
        assert!(matches!(
            RunConfig::parse("\nmesh.cells = x"),
            Err(ConfigError::Value { line: 2, .. })
        ));
        assert!(matches!(
            RunConfig::parse("run.scheme = weno"),
            Err(ConfigError::Scheme(_))
        ));
        assert!(matches!(
            RunConfig::parse("no equals"),
            Err(ConfigError::Syntax { line: 1 })
        ));
    }
}
