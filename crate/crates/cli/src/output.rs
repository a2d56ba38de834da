//! CSV and JSON output bundle of a simulation run.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use pipenet_core::network::{DiagnosticsRecord, Network, ProbeSample, ProfileSnapshot, RunOutput};
use serde::Serialize;

pub const DIAGNOSTICS_HEADER: &str =
    "time,mass,energy,entropy,junction_mass_flux,junction_energy_flux,junction_entropy_flux,max_mach";
pub const PROFILE_HEADER: &str = "time,x,rho,u,p,s,h";

/// 17 significant digits, round-trip exact.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn row(values: &[f64]) -> String {
    values.iter().map(|v| num(*v)).collect::<Vec<_>>().join(",")
}

pub fn diagnostics_csv(records: &[DiagnosticsRecord]) -> String {
    let mut out = String::from(DIAGNOSTICS_HEADER);
    out.push('\n');
    for r in records {
        out += &row(&[
            r.time,
            r.mass,
            r.energy,
            r.entropy,
            r.junction.mass,
            r.junction.energy,
            r.junction.entropy,
            r.max_mach,
        ]);
        out.push('\n');
    }
    out
}

pub fn profile_csv(network: &Network, pipe: usize, snapshots: &[ProfileSnapshot]) -> String {
    let grid = &network.pipes[pipe];
    let params = &grid.spec.params;
    let mut out = String::from(PROFILE_HEADER);
    out.push('\n');
    for snap in snapshots {
        for (j, s) in snap.pipes[pipe].iter().enumerate() {
            out += &row(&[
                snap.time,
                grid.cell_center(j),
                s.rho,
                s.u,
                s.p,
                s.entropy(params),
                s.enthalpy(params),
            ]);
            out.push('\n');
        }
    }
    out
}

pub fn probes_csv(labels: &[String], samples: &[ProbeSample]) -> String {
    let mut out = String::from("time");
    for (k, label) in labels.iter().enumerate() {
        for q in ["rho", "u", "p"] {
            out += &format!(",probe{k}_{label}_{q}");
        }
    }
    out.push('\n');
    for s in samples {
        let mut values = vec![s.time];
        for st in &s.states {
            values.extend([st.rho, st.u, st.p]);
        }
        out += &row(&values);
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize)]
pub struct Tolerances {
    pub newton_tolerance: f64,
    pub newton_max_iterations: usize,
    pub newton_max_halvings: usize,
    pub star_tolerance: f64,
    pub star_max_iterations: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        use pipenet_core::junction::{
            NEWTON_MAX_HALVINGS, NEWTON_MAX_ITERATIONS, NEWTON_TOLERANCE,
        };
        use pipenet_core::riemann::{STAR_MAX_ITERATIONS, STAR_TOLERANCE};
        Self {
            newton_tolerance: NEWTON_TOLERANCE,
            newton_max_iterations: NEWTON_MAX_ITERATIONS,
            newton_max_halvings: NEWTON_MAX_HALVINGS,
            star_tolerance: STAR_TOLERANCE,
            star_max_iterations: STAR_MAX_ITERATIONS,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Metadata<'a> {
    pub program: &'static str,
    pub version: &'static str,
    /// The loaded scenario file, re-serialised with defaults filled in.
    pub config: &'a str,
    pub mode: &'static str,
    pub tolerances: Tolerances,
    pub steps: usize,
    pub final_time: f64,
    pub mass_drift: f64,
    pub energy_drift: f64,
    pub max_step_mass_defect: f64,
    pub max_step_energy_defect: f64,
    pub min_entropy_production: Option<f64>,
    pub error: Option<String>,
    pub wall_time_seconds: f64,
}

/// Writes diagnostics, per-pipe profiles, probes (if any), the config echo
/// and the metadata document into `dir`.
pub fn write_bundle(
    dir: &Path,
    run: &RunOutput,
    probe_labels: &[String],
    metadata: &Metadata,
) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("diagnostics.csv"), diagnostics_csv(&run.records))?;
    if !run.profiles.is_empty() {
        for (i, pipe) in run.network.pipes.iter().enumerate() {
            let name = format!("profile_{}.csv", pipe.spec.label);
            fs::write(dir.join(name), profile_csv(&run.network, i, &run.profiles))?;
        }
    }
    if !probe_labels.is_empty() {
        fs::write(
            dir.join("probes.csv"),
            probes_csv(probe_labels, &run.probes),
        )?;
    }
    fs::write(dir.join("config.toml"), metadata.config)?;
    let mut f = fs::File::create(dir.join("metadata.json"))?;
    serde_json::to_writer_pretty(&mut f, metadata).map_err(io::Error::other)?;
    f.write_all(b"\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            let s = num(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
    }
}
