//! Deterministic inputs shared by the benchmarks.

use pipenet_core::junction::stationary::StationaryDesign;
use pipenet_core::network::{FarEnd, GridPipe};
use pipenet_core::{CouplingMode, GasParams, GasState, JunctionProblem, Network};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Subsonic Riemann data with `|M| < 0.9` on both sides.
pub fn riemann_pairs(count: usize, seed: u64) -> Vec<(GasParams, GasState, GasState)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let state = |rng: &mut ChaCha8Rng, params: &GasParams| {
        let rho = rng.random_range(0.1..5.0);
        let p = rng.random_range(0.1..5.0);
        let c = (params.gamma * p / rho).sqrt();
        GasState::new(rho, c * rng.random_range(-0.9..0.9), p).expect("valid state")
    };
    (0..count)
        .map(|_| {
            let params = GasParams {
                gamma: rng.random_range(1.1..1.67),
                c_v: rng.random_range(0.5..2.5),
            };
            (params, state(&mut rng, &params), state(&mut rng, &params))
        })
        .collect()
}

/// Coupled stationary junctions with traces perturbed by 0.1% in pressure,
/// so that Newton has a few iterations to do.
pub fn junction_problems(n: usize, n_out: usize, count: usize, seed: u64) -> Vec<JunctionProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let problem = StationaryDesign::random(&mut rng, n, n_out)
                .problem(CouplingMode::EntropyMix)
                .expect("valid design");
            let traces = problem
                .caller_traces()
                .iter()
                .map(|t| GasState {
                    p: t.p * (1.0 + 1e-3),
                    ..*t
                })
                .collect();
            problem.with_traces(traces).expect("valid traces")
        })
        .collect()
}

/// Stationary tee (one outgoing, two incoming pipes) with a density bump in
/// the first incoming pipe, `cells` cells per pipe.
pub fn tee_network(cells: usize) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (specs, traces) = StationaryDesign::random(&mut rng, 3, 1)
        .build()
        .expect("valid design");
    let pipes = specs
        .into_iter()
        .zip(traces)
        .enumerate()
        .map(|(k, (spec, state))| {
            GridPipe::from_profile(spec, 1.0, cells, FarEnd::Outflow, |x| {
                if k == 1 && (0.1..0.3).contains(&x) {
                    GasState {
                        rho: 1.02 * state.rho,
                        ..state
                    }
                } else {
                    state
                }
            })
            .expect("valid pipe")
        })
        .collect();
    Network::new(pipes, CouplingMode::EntropyMix).expect("valid network")
}
