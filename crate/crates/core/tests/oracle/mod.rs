//! Reference implementations used only by the tests: exact Riemann solution
//! by plain bisection, its self-similar sampling, and central-difference
//! Jacobians.
#![allow(dead_code)]

use pipenet_core::junction::coupling_residual;
use pipenet_core::nalgebra::DMatrix;
use pipenet_core::{CouplingParams, GasParams, GasState, JunctionProblem};

fn sound(s: &GasState, g: f64) -> f64 {
    (g * s.p / s.rho).sqrt()
}

/// Velocity change across the wave connecting `k` to pressure `p`.
fn wave_function(p: f64, k: &GasState, g: f64) -> f64 {
    if p > k.p {
        let a = 2.0 / ((g + 1.0) * k.rho);
        let b = (g - 1.0) / (g + 1.0) * k.p;
        (p - k.p) * (a / (p + b)).sqrt()
    } else {
        2.0 * sound(k, g) / (g - 1.0) * ((p / k.p).powf((g - 1.0) / (2.0 * g)) - 1.0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Exact {
    pub p: f64,
    pub u: f64,
    pub rho_l: f64,
    pub rho_r: f64,
    pub left: GasState,
    pub right: GasState,
    pub gamma: f64,
}

/// Star region by bisection of `f_L(p) + f_R(p) + u_R - u_L` on a doubling
/// bracket, to relative width 1e-15.
pub fn exact_riemann(left: &GasState, right: &GasState, params: &GasParams) -> Exact {
    let g = params.gamma;
    let f = |p: f64| wave_function(p, left, g) + wave_function(p, right, g) + right.u - left.u;
    let mut lo = 0.0;
    let mut hi = left.p.max(right.p);
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let p = 0.5 * (lo + hi);
    let u =
        0.5 * (left.u + right.u) + 0.5 * (wave_function(p, right, g) - wave_function(p, left, g));
    let mu = (g - 1.0) / (g + 1.0);
    let star_rho = |k: &GasState| {
        let r = p / k.p;
        if p > k.p {
            k.rho * (r + mu) / (mu * r + 1.0)
        } else {
            k.rho * r.powf(1.0 / g)
        }
    };
    Exact {
        p,
        u,
        rho_l: star_rho(left),
        rho_r: star_rho(right),
        left: *left,
        right: *right,
        gamma: g,
    }
}

impl Exact {
    pub fn left_star(&self) -> GasState {
        GasState {
            rho: self.rho_l,
            u: self.u,
            p: self.p,
        }
    }

    /// Solution at `x / t = xi`.
    pub fn sample(&self, xi: f64) -> GasState {
        let g = self.gamma;
        let mu = (g - 1.0) / (g + 1.0);
        if xi <= self.u {
            let k = self.left;
            let c = sound(&k, g);
            if self.p > k.p {
                let speed =
                    k.u - c * ((g + 1.0) / (2.0 * g) * self.p / k.p + (g - 1.0) / (2.0 * g)).sqrt();
                if xi < speed {
                    k
                } else {
                    self.left_star()
                }
            } else {
                let c_star = c * (self.p / k.p).powf((g - 1.0) / (2.0 * g));
                if xi < k.u - c {
                    k
                } else if xi > self.u - c_star {
                    self.left_star()
                } else {
                    let cf = 2.0 / (g + 1.0) * c + mu * (k.u - xi);
                    GasState {
                        rho: k.rho * (cf / c).powf(2.0 / (g - 1.0)),
                        u: 2.0 / (g + 1.0) * (c + (g - 1.0) / 2.0 * k.u + xi),
                        p: k.p * (cf / c).powf(2.0 * g / (g - 1.0)),
                    }
                }
            }
        } else {
            let k = self.right;
            let c = sound(&k, g);
            let star = GasState {
                rho: self.rho_r,
                u: self.u,
                p: self.p,
            };
            if self.p > k.p {
                let speed =
                    k.u + c * ((g + 1.0) / (2.0 * g) * self.p / k.p + (g - 1.0) / (2.0 * g)).sqrt();
                if xi > speed {
                    k
                } else {
                    star
                }
            } else {
                let c_star = c * (self.p / k.p).powf((g - 1.0) / (2.0 * g));
                if xi > k.u + c {
                    k
                } else if xi < self.u + c_star {
                    star
                } else {
                    let cf = 2.0 / (g + 1.0) * c - mu * (k.u - xi);
                    GasState {
                        rho: k.rho * (cf / c).powf(2.0 / (g - 1.0)),
                        u: 2.0 / (g + 1.0) * (-c + (g - 1.0) / 2.0 * k.u + xi),
                        p: k.p * (cf / c).powf(2.0 * g / (g - 1.0)),
                    }
                }
            }
        }
    }

    /// Cell averages of `rho`, `u` and `p` over `[a, b]` at time `t`, by
    /// the midpoint rule on `n` sub-intervals.
    pub fn average(&self, a: f64, b: f64, t: f64, n: usize) -> GasState {
        let h = (b - a) / n as f64;
        let mut avg = GasState {
            rho: 0.0,
            u: 0.0,
            p: 0.0,
        };
        for k in 0..n {
            let s = self.sample((a + (k as f64 + 0.5) * h) / t);
            avg.rho += s.rho / n as f64;
            avg.u += s.u / n as f64;
            avg.p += s.p / n as f64;
        }
        avg
    }
}

pub fn central_jacobian(
    params: &CouplingParams,
    problem: &JunctionProblem,
    h: f64,
) -> DMatrix<f64> {
    let x = params.to_vector();
    let n = problem.n();
    let mut jac = DMatrix::zeros(x.len(), x.len());
    for k in 0..x.len() {
        let (mut a, mut b) = (x.clone(), x.clone());
        a[k] += h;
        b[k] -= h;
        let ra = coupling_residual(&CouplingParams::from_vector(&a, n), problem).unwrap();
        let rb = coupling_residual(&CouplingParams::from_vector(&b, n), problem).unwrap();
        jac.set_column(k, &((ra - rb) / (2.0 * h)));
    }
    jac
}
