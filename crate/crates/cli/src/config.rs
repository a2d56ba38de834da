//! TOML scenario files.
//!
//! ```toml
//! [junction]
//! mode = "entropy-mix"
//!
//! [run]
//! end_time = 0.2
//! cfl = 0.9
//! splitting = "strang"
//! source = { gravity = 0.0, friction_factor = 0.0, diameter = 1.0 }
//!
//! [output]
//! directory = "out"
//! sample_interval = 0.05
//! probes = [{ pipe = "a", x = 0.5 }]
//!
//! [[pipes]]
//! label = "a"
//! nu_norm = 1.0
//! initial = { rho = 1.0, u = 0.1, p = 1.0 }
//!
//! [[pipes]]
//! label = "b"
//! nu_norm = 1.0
//! segments = [
//!     { from = 0.0, to = 0.5, rho = 1.0, u = -0.1, p = 1.0 },
//!     { from = 0.5, to = 1.0, rho = 0.5, u = -0.1, p = 0.8 },
//! ]
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use pipenet_core::network::{
    FarEnd, GridPipe, Network, OutputPlan, Probe, Scenario, SourceModel, Splitting,
};
use pipenet_core::{CouplingMode, FlowClass, GasParams, GasState, PipeSpec};
use serde::{Deserialize, Serialize};

pub const DEFAULT_LENGTH: f64 = 1.0;
pub const DEFAULT_CELLS: usize = 200;
pub const DEFAULT_END_TIME: f64 = 1.0;
pub const DEFAULT_CFL: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

impl StateSpec {
    fn state(&self) -> GasState {
        GasState {
            rho: self.rho,
            u: self.u,
            p: self.p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub from: f64,
    pub to: f64,
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

fn default_gamma() -> f64 {
    1.4
}
fn default_c_v() -> f64 {
    1.0
}
fn default_length() -> f64 {
    DEFAULT_LENGTH
}
fn default_cells() -> usize {
    DEFAULT_CELLS
}
fn default_end_time() -> f64 {
    DEFAULT_END_TIME
}
fn default_cfl() -> f64 {
    DEFAULT_CFL
}
fn default_true() -> bool {
    true
}
fn default_directory() -> PathBuf {
    PathBuf::from("output")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipeSection {
    pub label: String,
    pub nu_norm: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_c_v")]
    pub c_v: f64,
    #[serde(default = "default_length")]
    pub length: f64,
    #[serde(default = "default_cells")]
    pub cells: usize,
    #[serde(default)]
    pub far_end: FarEnd,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow_hint: Option<FlowClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segments: Option<Vec<Segment>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JunctionSection {
    #[serde(default)]
    pub mode: CouplingMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSection {
    #[serde(default)]
    pub gravity: f64,
    #[serde(default)]
    pub friction_factor: f64,
    #[serde(default = "default_length")]
    pub diameter: f64,
}

impl Default for SourceSection {
    fn default() -> Self {
        Self {
            gravity: 0.0,
            friction_factor: 0.0,
            diameter: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_end_time")]
    pub end_time: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default)]
    pub splitting: Splitting,
    #[serde(default)]
    pub source: SourceSection,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            end_time: DEFAULT_END_TIME,
            cfl: DEFAULT_CFL,
            splitting: Splitting::default(),
            source: SourceSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    pub pipe: String,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_interval: Option<f64>,
    #[serde(default)]
    pub probes: Vec<ProbeSection>,
    #[serde(default = "default_true")]
    pub profiles: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            sample_interval: None,
            probes: Vec::new(),
            profiles: true,
        }
    }
}

/// The on-disk document. Every section except `pipes` is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub junction: JunctionSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub output: OutputSection,
    pub pipes: Vec<PipeSection>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid scenario:\n{}", .0.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Issue>),
}

impl ConfigError {
    pub fn issues(&self) -> &[Issue] {
        match self {
            ConfigError::Invalid(v) => v,
            _ => &[],
        }
    }
}

#[derive(Default)]
struct Issues(Vec<Issue>);

impl Issues {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(Issue {
            path: path.into(),
            message: message.into(),
        });
    }

    fn check(&mut self, ok: bool, path: impl Into<String>, message: impl FnOnce() -> String) {
        if !ok {
            self.push(path, message());
        }
    }
}

fn positive(v: f64) -> bool {
    v > 0.0 && v.is_finite()
}

fn check_state(
    issues: &mut Issues,
    path: &str,
    rho: f64,
    u: f64,
    p: f64,
    params: Option<&GasParams>,
) {
    issues.check(positive(rho), format!("{path}.rho"), || {
        format!("density must be positive, got {rho}")
    });
    issues.check(positive(p), format!("{path}.p"), || {
        format!("pressure must be positive, got {p}")
    });
    issues.check(u.is_finite(), format!("{path}.u"), || {
        format!("velocity must be finite, got {u}")
    });
    if let (Some(params), true) = (params, positive(rho) && positive(p) && u.is_finite()) {
        let c = (params.gamma * p / rho).sqrt();
        issues.check(u.abs() < c, path.to_string(), || {
            format!(
                "initial state is not subsonic: |u| = {} >= c = {c}",
                u.abs()
            )
        });
    }
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario files always serialise")
    }

    /// Every violated constraint, each with its path in the document.
    pub fn issues(&self) -> Vec<Issue> {
        let mut issues = Issues::default();
        if self.pipes.len() < 2 {
            issues.push(
                "pipes",
                format!(
                    "a junction needs at least 2 pipes, got {}",
                    self.pipes.len()
                ),
            );
        }
        for (i, pipe) in self.pipes.iter().enumerate() {
            let path = format!("pipes[{i}]");
            let name = format!("{path} (`{}`)", pipe.label);
            issues.check(!pipe.label.is_empty(), format!("{path}.label"), || {
                "label must not be empty".into()
            });
            if self.pipes[..i].iter().any(|p| p.label == pipe.label) {
                issues.push(
                    format!("{path}.label"),
                    format!("duplicate pipe label `{}`", pipe.label),
                );
            }
            issues.check(positive(pipe.nu_norm), format!("{name}.nu_norm"), || {
                format!("cross-section norm must be positive, got {}", pipe.nu_norm)
            });
            let gamma_ok = pipe.gamma > 1.0 && pipe.gamma.is_finite();
            issues.check(gamma_ok, format!("{name}.gamma"), || {
                format!("adiabatic exponent must exceed 1, got {}", pipe.gamma)
            });
            let c_v_ok = positive(pipe.c_v);
            issues.check(c_v_ok, format!("{name}.c_v"), || {
                format!("heat capacity must be positive, got {}", pipe.c_v)
            });
            let params = gamma_ok.then_some(GasParams {
                gamma: pipe.gamma,
                c_v: pipe.c_v,
            });
            issues.check(positive(pipe.length), format!("{name}.length"), || {
                format!("length must be positive, got {}", pipe.length)
            });
            issues.check(
                pipe.cells >= pipenet_core::network::MIN_CELLS,
                format!("{name}.cells"),
                || {
                    format!(
                        "at least {} cells required, got {}",
                        pipenet_core::network::MIN_CELLS,
                        pipe.cells
                    )
                },
            );
            match (&pipe.initial, &pipe.segments) {
                (Some(_), Some(_)) => issues.push(
                    name.clone(),
                    "give either `initial` or `segments`, not both",
                ),
                (None, None) => issues.push(
                    name.clone(),
                    "missing initial data (`initial` or `segments`)",
                ),
                (Some(s), None) => check_state(
                    &mut issues,
                    &format!("{name}.initial"),
                    s.rho,
                    s.u,
                    s.p,
                    params.as_ref(),
                ),
                (None, Some(segments)) => {
                    self.check_segments(&mut issues, &name, pipe, segments, params.as_ref())
                }
            }
        }

        let run = &self.run;
        issues.check(run.cfl > 0.0 && run.cfl < 1.0, "run.cfl", || {
            format!("must lie in (0, 1), got {}", run.cfl)
        });
        issues.check(positive(run.end_time), "run.end_time", || {
            format!("must be positive, got {}", run.end_time)
        });
        if let Err(m) = self.source_model().validate() {
            issues.push("run.source", m);
        }
        if let Some(dt) = self.output.sample_interval {
            issues.check(positive(dt), "output.sample_interval", || {
                format!("must be positive, got {dt}")
            });
        }
        for (k, probe) in self.output.probes.iter().enumerate() {
            let path = format!("output.probes[{k}]");
            match self.pipes.iter().find(|p| p.label == probe.pipe) {
                None => issues.push(
                    format!("{path}.pipe"),
                    format!("unknown pipe `{}`", probe.pipe),
                ),
                Some(p) => issues.check(
                    probe.x >= 0.0 && probe.x <= p.length,
                    format!("{path}.x"),
                    || format!("position {} outside [0, {}]", probe.x, p.length),
                ),
            }
        }
        issues.0
    }

    fn check_segments(
        &self,
        issues: &mut Issues,
        name: &str,
        pipe: &PipeSection,
        segments: &[Segment],
        params: Option<&GasParams>,
    ) {
        if segments.is_empty() {
            issues.push(format!("{name}.segments"), "at least one segment required");
            return;
        }
        for (k, s) in segments.iter().enumerate() {
            let path = format!("{name}.segments[{k}]");
            check_state(issues, &path, s.rho, s.u, s.p, params);
            issues.check(s.from < s.to, path, || {
                format!("empty or reversed interval [{}, {}]", s.from, s.to)
            });
        }
        let mut sorted: Vec<&Segment> = segments.iter().collect();
        sorted.sort_by(|a, b| a.from.total_cmp(&b.from));
        let tol = 1e-12 * pipe.length.abs().max(1.0);
        let path = format!("{name}.segments");
        if (sorted[0].from - 0.0).abs() > tol {
            issues.push(
                path.clone(),
                format!(
                    "segments must start at 0, first starts at {}",
                    sorted[0].from
                ),
            );
        }
        for w in sorted.windows(2) {
            if w[1].from < w[0].to - tol {
                issues.push(
                    path.clone(),
                    format!(
                        "segments [{}, {}] and [{}, {}] overlap",
                        w[0].from, w[0].to, w[1].from, w[1].to
                    ),
                );
            } else if w[1].from > w[0].to + tol {
                issues.push(
                    path.clone(),
                    format!("gap between {} and {}", w[0].to, w[1].from),
                );
            }
        }
        let last = sorted[sorted.len() - 1].to;
        if (last - pipe.length).abs() > tol {
            issues.push(
                path,
                format!(
                    "segments must end at the pipe length {}, last ends at {last}",
                    pipe.length
                ),
            );
        }
    }

    pub fn source_model(&self) -> SourceModel {
        let s = &self.run.source;
        SourceModel {
            gravity: s.gravity,
            friction_factor: s.friction_factor,
            diameter: s.diameter,
        }
    }

    /// Validates and builds the scenario.
    pub fn to_scenario(&self) -> Result<Scenario, ConfigError> {
        let issues = self.issues();
        if !issues.is_empty() {
            return Err(ConfigError::Invalid(issues));
        }
        let invalid =
            |path: String, message: String| ConfigError::Invalid(vec![Issue { path, message }]);
        let mut pipes = Vec::with_capacity(self.pipes.len());
        for (i, p) in self.pipes.iter().enumerate() {
            let params = GasParams {
                gamma: p.gamma,
                c_v: p.c_v,
            };
            let spec = PipeSpec::new(p.label.clone(), p.nu_norm, params)
                .map_err(|e| invalid(format!("pipes[{i}]"), e.to_string()))?;
            let mut grid = match (&p.initial, &p.segments) {
                (Some(s), _) => GridPipe::uniform(spec, p.length, p.cells, p.far_end, s.state()),
                (None, Some(segments)) => {
                    let mut sorted = segments.clone();
                    sorted.sort_by(|a, b| a.from.total_cmp(&b.from));
                    GridPipe::from_profile(spec, p.length, p.cells, p.far_end, |x| {
                        let s = sorted
                            .iter()
                            .find(|s| x < s.to)
                            .unwrap_or(&sorted[sorted.len() - 1]);
                        GasState {
                            rho: s.rho,
                            u: s.u,
                            p: s.p,
                        }
                    })
                }
                (None, None) => unreachable!("validated"),
            }
            .map_err(|e| invalid(format!("pipes[{i}]"), e.to_string()))?;
            grid.flow_hint = p.flow_hint;
            pipes.push(grid);
        }
        let network = Network::new(pipes, self.junction.mode)
            .map_err(|e| invalid("pipes".into(), e.to_string()))?;
        let scenario = Scenario {
            network,
            end_time: self.run.end_time,
            cfl: self.run.cfl,
            source: self.source_model(),
            splitting: self.run.splitting,
            output: OutputPlan {
                sample_interval: self.output.sample_interval,
                probes: self
                    .output
                    .probes
                    .iter()
                    .map(|p| Probe {
                        pipe: p.pipe.clone(),
                        x: p.x,
                    })
                    .collect(),
                profiles: self.output.profiles,
            },
        };
        scenario
            .validate()
            .map_err(|e| invalid("scenario".into(), e.to_string()))?;
        Ok(scenario)
    }

    /// Constant state per pipe, for the junction and shock-tube commands.
    pub fn constant_states(&self) -> Result<Vec<GasState>, ConfigError> {
        let mut issues = Vec::new();
        let mut states = Vec::new();
        for (i, p) in self.pipes.iter().enumerate() {
            match (&p.initial, p.segments.as_deref()) {
                (Some(s), None) => states.push(s.state()),
                (None, Some([s])) => states.push(GasState {
                    rho: s.rho,
                    u: s.u,
                    p: s.p,
                }),
                _ => issues.push(Issue {
                    path: format!("pipes[{i}] (`{}`)", p.label),
                    message: "a constant initial state is required".into(),
                }),
            }
        }
        if issues.is_empty() {
            Ok(states)
        } else {
            Err(ConfigError::Invalid(issues))
        }
    }

    pub fn pipe_specs(&self) -> Result<Vec<PipeSpec>, ConfigError> {
        self.pipes
            .iter()
            .enumerate()
            .map(|(i, p)| {
                PipeSpec::new(
                    p.label.clone(),
                    p.nu_norm,
                    GasParams {
                        gamma: p.gamma,
                        c_v: p.c_v,
                    },
                )
                .map_err(|e| {
                    ConfigError::Invalid(vec![Issue {
                        path: format!("pipes[{i}]"),
                        message: e.to_string(),
                    }])
                })
            })
            .collect()
    }
}

/// Reads and validates a scenario file.
pub fn load_file(path: &Path) -> Result<ScenarioFile, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file = ScenarioFile::parse(&text)?;
    let issues = file.issues();
    if issues.is_empty() {
        Ok(file)
    } else {
        Err(ConfigError::Invalid(issues))
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ConfigError> {
    load_file(path)?.to_scenario()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[[pipes]]
label = "a"
nu_norm = 1.0
initial = { rho = 1.0, u = 0.1, p = 1.0 }

[[pipes]]
label = "b"
nu_norm = 2.0
initial = { rho = 1.0, u = -0.05, p = 1.0 }
"#;

    #[test]
    fn minimal_file_gets_defaults() {
        let sc = ScenarioFile::parse(MINIMAL).unwrap().to_scenario().unwrap();
        assert_eq!(sc.cfl, DEFAULT_CFL);
        assert_eq!(sc.end_time, DEFAULT_END_TIME);
        assert_eq!(sc.splitting, Splitting::Strang);
        assert_eq!(sc.network.mode, CouplingMode::EntropyMix);
        assert_eq!(sc.network.pipes[0].cells.len(), DEFAULT_CELLS);
        assert_eq!(sc.network.pipes[1].length, DEFAULT_LENGTH);
        assert_eq!(sc.network.pipes[0].far_end, FarEnd::Outflow);
        assert!(!sc.source.is_active());
    }

    #[test]
    fn bad_gamma_names_the_pipe() {
        let text = MINIMAL.replacen("nu_norm = 2.0", "nu_norm = 2.0\ngamma = 0.9", 1);
        let err = ScenarioFile::parse(&text)
            .unwrap()
            .to_scenario()
            .unwrap_err();
        let issues = err.issues();
        assert_eq!(issues.len(), 1);
        assert!(
            issues[0].path.contains("`b`") && issues[0].path.ends_with("gamma"),
            "{issues:?}"
        );
    }

    #[test]
    fn overlapping_segments_are_rejected() {
        let text = r#"
[[pipes]]
label = "a"
nu_norm = 1.0
segments = [
    { from = 0.0, to = 0.6, rho = 1.0, u = 0.1, p = 1.0 },
    { from = 0.5, to = 1.0, rho = 1.0, u = 0.1, p = 1.0 },
]

[[pipes]]
label = "b"
nu_norm = 1.0
initial = { rho = 1.0, u = -0.1, p = 1.0 }
"#;
        let issues = ScenarioFile::parse(text).unwrap().issues();
        assert_eq!(issues.len(), 1);
        assert!(issues[0].message.contains("overlap"));
    }

    #[test]
    fn every_issue_is_reported() {
        let text = r#"
[run]
cfl = 1.5

[[pipes]]
label = "a"
nu_norm = -1.0
c_v = 0.0
initial = { rho = 1.0, u = 5.0, p = 1.0 }
"#;
        let issues = ScenarioFile::parse(text).unwrap().issues();
        let paths: Vec<_> = issues.iter().map(|i| i.path.as_str()).collect();
        assert!(paths.contains(&"pipes"));
        assert!(paths.contains(&"run.cfl"));
        assert!(paths.iter().any(|p| p.ends_with("nu_norm")));
        assert!(paths.iter().any(|p| p.ends_with("c_v")));
        assert!(paths.iter().any(|p| p.ends_with("initial")), "{paths:?}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{MINIMAL}\n[run]\nend_tme = 1.0\n");
        assert!(matches!(
            ScenarioFile::parse(&text),
            Err(ConfigError::Parse(_))
        ));
    }

    #[test]
    fn echo_is_lossless() {
        let file = ScenarioFile::parse(MINIMAL).unwrap();
        let again = ScenarioFile::parse(&file.to_toml()).unwrap();
        assert_eq!(file, again);
        assert_eq!(file.to_scenario().unwrap(), again.to_scenario().unwrap());
    }
}
