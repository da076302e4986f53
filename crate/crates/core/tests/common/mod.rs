//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls the solver it is used to check: agent problems are
//! solved by grid search, regimes by direct evaluation of the membership
//! inequalities, dynamic paths by chaining static equilibria.

#![allow(dead_code)]

use credeq::econ::{RegimeLabel, StaticEconomy};
use credeq::linear::solve_equilibrium_linear;
use credeq::ramsey::DynamicEconomy;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Best profit `F(k) - R b` over a uniform grid of feasible `k`
/// (`b = k - s`, `R b <= gamma F(k)`), searched on `[0, k_cap]`.
pub fn grid_best_profit<F: Fn(f64) -> f64>(f: F, gamma: f64, s: f64, r: f64, k_cap: f64, points: usize) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for j in 0..=points {
        let k = k_cap * j as f64 / points as f64;
        let b = k - s;
        if r * b <= gamma * f(k) * (1.0 + 1e-12) {
            best = best.max(f(k) - r * b);
        }
    }
    best
}

/// Largest feasible capital of a linear agent at `r > gamma a`.
pub fn linear_k_cap(a: f64, gamma: f64, s: f64, r: f64) -> f64 {
    r * s / (r - gamma * a)
}

/// Capital demand `sum_{i >= from} A_n S_i / (A_n - gamma_i A_i)` at rate `A_n`.
fn demand_at(econ: &StaticEconomy, n: usize, from: usize) -> f64 {
    let an = econ.agents[n].a();
    econ.agents[from..].iter().map(|ag| an * ag.s / (an - ag.gamma * ag.a())).sum()
}

/// Every regime label whose membership inequalities hold.
pub fn regimes_satisfied(econ: &StaticEconomy) -> Vec<RegimeLabel> {
    let m = econ.len();
    let total: f64 = econ.agents.iter().map(|a| a.s).sum();
    let big_m = econ.agents.iter().map(|a| a.gamma * a.a()).fold(0.0, f64::max);
    let mut out = Vec::new();
    for n in 0..m {
        let defined = econ.agents[n].a() > big_m;
        let (upper, lower) = if defined { (demand_at(econ, n, n), demand_at(econ, n, n + 1)) } else { (f64::NAN, f64::NAN) };
        if defined && lower <= total && total <= upper {
            out.push(RegimeLabel::AtTfp(n));
        }
        if n + 1 < m {
            let next_upper = demand_at(econ, n + 1, n + 1);
            if next_upper < total && (!defined || total < lower) {
                out.push(RegimeLabel::Interior(n));
            }
        }
    }
    out
}

/// Random admissible linear economy with `1..=max_m` agents.
pub fn random_linear(rng: &mut ChaCha8Rng, max_m: usize) -> StaticEconomy {
    let m = rng.gen_range(1..=max_m);
    let mut a: Vec<f64> = Vec::with_capacity(m);
    let mut x = rng.gen_range(0.3..1.5);
    for _ in 0..m {
        a.push(x);
        x += rng.gen_range(0.05..0.8);
    }
    let gamma: Vec<f64> = a.iter().map(|ai| rng.gen_range(0.02..0.95) * (a[0] / ai).min(0.98)).collect();
    let s: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..3.0)).collect();
    StaticEconomy::linear(&a, &gamma, &s)
}

/// Random two- to four-agent Cobb-Douglas economy with common `alpha`.
pub fn random_cobb_douglas(rng: &mut ChaCha8Rng, gamma_range: (f64, f64)) -> StaticEconomy {
    use credeq::econ::{StaticAgent, Technology};
    let m = rng.gen_range(2..=4);
    let alpha = rng.gen_range(0.2..0.8);
    let agents = (0..m)
        .map(|i| {
            let tech = Technology::cobb_douglas(rng.gen_range(0.5..2.5), alpha);
            StaticAgent::new(i + 1, tech, rng.gen_range(gamma_range.0..gamma_range.1), rng.gen_range(0.2..3.0))
        })
        .collect();
    StaticEconomy::new(agents)
}

/// Central difference of `g` at `x` with step `h`.
pub fn central<G: Fn(f64) -> f64>(g: G, x: f64, h: f64) -> f64 {
    (g(x + h) - g(x - h)) / (2.0 * h)
}

/// Output path obtained by solving the static economy of each transition
/// and rolling net worth forward: `Y_1..=Y_T` and `R_1..=R_T`.
pub fn chained_static_path(econ: &DynamicEconomy) -> (Vec<f64>, Vec<f64>) {
    let mut s = econ.s0();
    let mut y = Vec::new();
    let mut r = Vec::new();
    for t in 0..econ.horizon {
        let st = econ.static_at(t, &s);
        let eq = solve_equilibrium_linear(&st).expect("static equilibrium");
        let a = econ.tfps_at(t + 1);
        let mut out = 0.0;
        for (i, al) in eq.allocations.iter().enumerate() {
            out += a[i] * al.k;
            s[i] = econ.agents[i].beta * (a[i] * al.k - eq.r * al.b);
        }
        y.push(out);
        r.push(eq.r);
    }
    (y, r)
}

/// `Y_t` of the chained static path for `t = 1..=T`.
pub fn chained_output(econ: &DynamicEconomy) -> Vec<f64> {
    chained_static_path(econ).0
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
