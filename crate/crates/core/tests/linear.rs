mod common;

use approx::assert_relative_eq;
use common::{grid_best_profit, linear_k_cap, regimes_satisfied};
use credeq::econ::{RegimeLabel, StaticEconomy};
use credeq::linear::*;
use credeq::Error;

fn two_agent(a1: f64) -> StaticEconomy {
    StaticEconomy::linear(&[a1, 1.0], &[0.2, 0.2], &[1.0, 0.7])
}

fn three_agent(gamma2: f64) -> StaticEconomy {
    StaticEconomy::linear(&[1.0, 1.2, 1.5], &[0.2, gamma2, 0.3], &[4.0, 4.0, 3.0])
}

#[test]
fn individual_choice_cases() {
    match individual_choice_linear(1.5, 0.4, 100.0, 1.0) {
        LinearChoice::Determined { k, b, binding } => {
            assert_relative_eq!(k, 250.0, max_relative = 1e-14);
            assert_relative_eq!(b, 150.0, max_relative = 1e-14);
            assert!(binding);
            // frozen grid-search optimum (20001 points on [0, 250])
            let best = grid_best_profit(|k| 1.5 * k, 0.4, 100.0, 1.0, linear_k_cap(1.5, 0.4, 100.0, 1.0), 20_000);
            assert_relative_eq!(best, 225.0, max_relative = 1e-9);
            assert_relative_eq!(1.5 * k - b, 225.0, max_relative = 1e-14);
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(
        individual_choice_linear(1.5, 0.4, 100.0, 2.0),
        LinearChoice::Determined { k: 0.0, b: -100.0, binding: false }
    );
    assert_eq!(individual_choice_linear(1.5, 0.4, 100.0, 0.5), LinearChoice::Unbounded);
    assert_eq!(individual_choice_linear(1.5, 0.4, 100.0, 0.6), LinearChoice::Unbounded);
    match individual_choice_linear(1.5, 0.4, 100.0, 1.5) {
        LinearChoice::Indeterminate { b_min, b_max } => {
            assert_eq!(b_min, -100.0);
            assert_relative_eq!(b_max, 0.4 * 100.0 / 0.6, max_relative = 1e-14);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn bounds_of_the_two_agent_economy() {
    let bounds = compute_bounds(&two_agent(0.5)).unwrap();
    let b1 = bounds[0].unwrap();
    // direct summation: 0.5 * 0.7 / (0.5 - 0.2)
    let oracle_b = 0.5 * 0.7 / 0.3;
    let oracle_d = 0.5 * 1.0 / (0.5 - 0.1) + oracle_b;
    assert_relative_eq!(b1.b, 1.166_666_666_666_666_7, max_relative = 1e-14);
    assert_relative_eq!(b1.b, oracle_b, max_relative = 1e-14);
    assert_relative_eq!(b1.d, 2.416_666_666_666_666_5, max_relative = 1e-14);
    assert_relative_eq!(b1.d, oracle_d, max_relative = 1e-14);
    let b2 = bounds[1].unwrap();
    assert_eq!(b2.b, 0.0);
    assert_relative_eq!(b2.d, 0.7 / 0.8, max_relative = 1e-14);

    let single = compute_bounds(&StaticEconomy::linear(&[1.0], &[0.3], &[2.0])).unwrap();
    assert_eq!(single[0].unwrap().b, 0.0);
}

#[test]
fn bounds_undefined_below_max_collateral() {
    // max gamma A = 0.9 exceeds A_1 = 0.8
    let e = StaticEconomy::linear(&[0.8, 1.5], &[0.2, 0.6], &[1.0, 1.0]);
    let bounds = compute_bounds(&e).unwrap();
    assert!(bounds[0].is_none());
    assert!(bounds[1].is_some());
    assert_eq!(classify_regime(&e).unwrap(), regimes_satisfied(&e)[0]);
}

#[test]
fn regimes_of_worked_examples() {
    assert_eq!(classify_regime(&two_agent(0.5)).unwrap(), RegimeLabel::AtTfp(0));
    assert_eq!(classify_regime(&three_agent(0.15)).unwrap(), RegimeLabel::AtTfp(0));
    let interior = StaticEconomy::linear(&[0.4, 1.0], &[0.2, 0.2], &[0.5, 0.7]);
    assert_eq!(classify_regime(&interior).unwrap(), RegimeLabel::Interior(0));
    for e in [two_agent(0.5), three_agent(0.15), three_agent(0.3), three_agent(0.45), interior] {
        assert_eq!(regimes_satisfied(&e), vec![classify_regime(&e).unwrap()]);
    }
}

#[test]
fn single_borrower_interior_rate() {
    let e = StaticEconomy::linear(&[0.4, 1.0], &[0.2, 0.2], &[0.5, 0.7]);
    let r = solve_r_interior(0, &e).unwrap();
    // gamma_2 A_2 (S_1 + S_2) / S_1
    assert_relative_eq!(r, 0.48, max_relative = 1e-14);
    assert!(interior_residual(&[0.2], &[0.7], 1.2, r) < 1e-12);
    // frozen demand-curve bisection result
    let oracle = bisect_demand(&e, 0);
    assert_relative_eq!(oracle, 0.48, max_relative = 1e-12);
}

#[test]
fn two_borrower_interior_rate_is_the_quadratic_root() {
    let e = three_agent(0.3);
    assert_eq!(classify_regime(&e).unwrap(), RegimeLabel::Interior(0));
    let r = solve_r_interior(0, &e).unwrap();
    let (s1, s2, s3): (f64, f64, f64) = (4.0, 4.0, 3.0);
    let (c2, c3) = (0.3 * 1.2, 0.3 * 1.5);
    let s = s1 + s2 + s3;
    let p = (s1 + s2) * c2 + (s1 + s3) * c3;
    let closed = (p + (p * p - 4.0 * s1 * s * c2 * c3).sqrt()) / (2.0 * s1);
    assert_relative_eq!(r, closed, max_relative = 1e-14);
    assert!(r > 1.0 && r < 1.2);
    assert!(interior_residual(&[c2, c3], &[s2, s3], s, r) < 1e-12);
    assert_relative_eq!(r, bisect_demand(&e, 0), max_relative = 1e-12);
}

#[test]
fn many_borrower_interior_rate() {
    // every borrower has gamma A = 0.9, so demand at A_1 is 40 x and at A_2 is 22 x
    let a = [1.0, 1.1, 1.2, 1.3, 1.4];
    let gamma: Vec<f64> = a.iter().enumerate().map(|(i, x)| if i == 0 { 0.1 } else { 0.9 / x }).collect();
    let e = StaticEconomy::linear(&a, &gamma, &[2.5, 0.1, 0.1, 0.1, 0.1]);
    let RegimeLabel::Interior(n) = classify_regime(&e).unwrap() else { panic!() };
    assert_eq!(n, 0);
    let r = solve_r_interior(n, &e).unwrap();
    let c: Vec<f64> = e.agents[n + 1..].iter().map(|a| a.gamma * a.a()).collect();
    let s: Vec<f64> = e.agents[n + 1..].iter().map(|a| a.s).collect();
    assert!(interior_residual(&c, &s, e.total_wealth(), r) < 1e-12);
    assert_relative_eq!(r, bisect_demand(&e, n), max_relative = 1e-12);
}

#[test]
fn interior_rate_rejects_other_regimes() {
    assert!(matches!(solve_r_interior(0, &two_agent(0.5)), Err(Error::RegimeMismatch { .. })));
}

#[test]
fn equilibrium_examples() {
    let eq = solve_equilibrium_linear(&two_agent(0.5)).unwrap();
    assert_eq!(eq.r, 0.5);
    // 0.5 * 1 + 0.7 * 1 * 0.5 * 0.8 / 0.3
    assert_relative_eq!(eq.y, 1.433_333_333_333_333_3, max_relative = 1e-14);
    assert!(eq.net_assets().abs() < 1e-12);

    let eq = solve_equilibrium_linear(&two_agent(0.9)).unwrap();
    assert_relative_eq!(eq.y, 1.62, max_relative = 1e-14);

    // A_1 below gamma_2 A_2 (S_1 + S_2) / S_1 = 0.34 * 2.5: agent 1 lends
    // everything and output reaches A_2 (S_1 + S_2)
    let high = StaticEconomy::linear(&[0.5, 1.0], &[0.2, 0.5], &[1.0, 0.7]);
    let eq = solve_equilibrium_linear(&high).unwrap();
    assert_eq!(eq.regime, RegimeLabel::Interior(0));
    assert_relative_eq!(eq.r, 0.85, max_relative = 1e-14);
    assert_relative_eq!(eq.y, 1.7, max_relative = 1e-14);
}

#[test]
fn pivot_absorbs_the_market_residual() {
    let eq = solve_equilibrium_linear(&three_agent(0.4)).unwrap();
    assert_eq!(eq.regime, RegimeLabel::AtTfp(1));
    let pivot = eq.allocations[1];
    assert!(pivot.b >= -4.0 && pivot.b <= 0.4 * 4.0 / 0.6);
    assert_relative_eq!(eq.capital().iter().sum::<f64>(), 11.0, max_relative = 1e-14);
}

#[test]
fn frictionless_output() {
    assert_eq!(frictionless_output_linear(&StaticEconomy::linear(&[1.0, 2.0], &[0.2, 0.2], &[1.0, 1.0])), 4.0);
    assert_relative_eq!(frictionless_output_linear(&two_agent(0.5)), 1.7, max_relative = 1e-15);
    assert_relative_eq!(frictionless_output_linear(&three_agent(0.3)), 16.5, max_relative = 1e-15);
}

#[test]
fn demand_oracle_examples() {
    let e = StaticEconomy::linear(&[0.4, 1.0], &[0.2, 0.2], &[0.5, 0.7]);
    let grid = 100_000;
    let step = (1.0 - 0.2) / grid as f64;
    assert!((oracle_equilibrium_linear(&e, grid) - 0.48).abs() <= step);
    assert!((oracle_equilibrium_linear(&two_agent(0.5), 1000) - 0.5).abs() <= (1.0 - 0.2) / 1000.0);

    let e = three_agent(0.3);
    let r = solve_equilibrium_linear(&e).unwrap().r;
    assert!((oracle_equilibrium_linear(&e, 10_000_000) - r).abs() < 1e-6);
}

#[test]
fn rejects_concave_and_invalid_input() {
    use credeq::econ::{StaticAgent, Technology};
    let cd = StaticEconomy::new(vec![StaticAgent::new(1, Technology::cobb_douglas(1.0, 0.5), 0.2, 1.0)]);
    assert!(solve_equilibrium_linear(&cd).is_err());
    assert!(matches!(
        solve_equilibrium_linear(&StaticEconomy::linear(&[1.0, 1.0], &[0.2, 0.2], &[1.0, 1.0])),
        Err(Error::Invalid(_))
    ));
}

/// Bisection on the borrowers' demand written out from scratch.
fn bisect_demand(e: &StaticEconomy, n: usize) -> f64 {
    let total = e.total_wealth();
    let demand = |r: f64| -> f64 { e.agents[n + 1..].iter().map(|a| r * a.s / (r - a.gamma * a.a())).sum() };
    let cmax = e.agents[n + 1..].iter().map(|a| a.gamma * a.a()).fold(0.0, f64::max);
    let (mut lo, mut hi) = (cmax * (1.0 + 1e-12), 100.0 * cmax);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if demand(mid) > total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
