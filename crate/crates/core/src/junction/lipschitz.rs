//! Empirical Lipschitz ratios of the junction solution map.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{solve_junction, JunctionError, JunctionProblem, StarSolution};
use crate::euler::{conservative_to_primitive, primitive_to_conservative, Conserved};

/// Largest observed `|R(perturbed) - R(base)|_inf / |perturbation|` over the
/// trials, for trace perturbations and for cross-section perturbations.
/// `None` when no perturbation was applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzStats {
    pub delta: f64,
    pub trials: usize,
    pub trace_ratio: Option<f64>,
    pub nu_ratio: Option<f64>,
}

fn star_distance(
    a: &StarSolution,
    b: &StarSolution,
    problem: &JunctionProblem,
) -> Result<f64, JunctionError> {
    let pipes = problem.caller_pipes();
    let mut worst: f64 = 0.0;
    for ((x, y), pipe) in a.star_states.iter().zip(&b.star_states).zip(&pipes) {
        let ux = primitive_to_conservative(x, &pipe.params)?;
        let uy = primitive_to_conservative(y, &pipe.params)?;
        worst = worst.max((ux - uy).norm_inf());
    }
    Ok(worst)
}

/// Perturbs the traces (in conservative variables) and, separately, the
/// cross-section norms by random vectors of total size `delta`, and records
/// the worst ratio of solution change to perturbation size. The perturbation
/// directions depend only on `seed`, so sweeping `delta` with a fixed seed
/// probes the same directions at different scales.
pub fn lipschitz_probe(
    problem: &JunctionProblem,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<LipschitzStats, JunctionError> {
    let mut stats = LipschitzStats {
        delta,
        trials,
        trace_ratio: None,
        nu_ratio: None,
    };
    if delta <= 0.0 || trials == 0 {
        return Ok(stats);
    }
    let base = solve_junction(problem, None)?;
    let pipes = problem.caller_pipes();
    let traces = problem.caller_traces();
    let n = pipes.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for _ in 0..trials {
        let dirs: Vec<Conserved> = (0..n)
            .map(|_| {
                Conserved::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                )
            })
            .collect();
        let total: f64 = dirs.iter().map(|d| d.norm_l1()).sum();
        let mut perturbed = Vec::with_capacity(n);
        let mut size = 0.0;
        for ((trace, pipe), d) in traces.iter().zip(&pipes).zip(&dirs) {
            let u = primitive_to_conservative(trace, &pipe.params)?;
            let shifted = u + (delta / total) * *d;
            size += (shifted - u).norm_l1();
            perturbed.push(conservative_to_primitive(&shifted, &pipe.params)?);
        }
        let p = problem.with_traces(perturbed)?;
        let sol = solve_junction(&p, None)?;
        let ratio = star_distance(&sol, &base, problem)? / size;
        stats.trace_ratio = Some(stats.trace_ratio.map_or(ratio, |r: f64| r.max(ratio)));

        let dnu: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let total: f64 = dnu.iter().map(|v: &f64| v.abs()).sum();
        let nu: Vec<f64> = pipes
            .iter()
            .zip(&dnu)
            .map(|(pipe, d)| pipe.nu_norm + delta * d / total)
            .collect();
        let size: f64 = pipes
            .iter()
            .zip(&nu)
            .map(|(pipe, v)| (v - pipe.nu_norm).abs())
            .sum();
        let p = problem.with_nu_norms(&nu)?;
        let sol = solve_junction(&p, None)?;
        let ratio = star_distance(&sol, &base, problem)? / size;
        stats.nu_ratio = Some(stats.nu_ratio.map_or(ratio, |r: f64| r.max(ratio)));
    }
    Ok(stats)
}
