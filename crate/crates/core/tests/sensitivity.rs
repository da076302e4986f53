mod common;

use approx::assert_relative_eq;
use common::{central, random_linear};
use credeq::econ::{Param, RegimeLabel, StaticEconomy};
use credeq::linear::solve_equilibrium_linear;
use credeq::sensitivity::*;
use credeq::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn two_agent(a1: f64) -> StaticEconomy {
    StaticEconomy::linear(&[a1, 1.0], &[0.2, 0.2], &[1.0, 0.7])
}

fn three_agent(gamma2: f64) -> StaticEconomy {
    StaticEconomy::linear(&[1.0, 1.2, 1.5], &[0.2, gamma2, 0.3], &[4.0, 4.0, 3.0])
}

fn y_of(e: &StaticEconomy) -> f64 {
    solve(e).unwrap().y
}

#[test]
fn tfp_derivative_of_the_low_producer() {
    // 1 - gamma (1 - gamma) A_2^2 S_2 / (A_1 - gamma A_2)^2
    let oracle = |a1: f64| 1.0 - 0.16 * 0.7 / ((a1 - 0.2) * (a1 - 0.2));
    assert_relative_eq!(dy_da_linear(&two_agent(0.5), 0).unwrap(), -0.244_444_444_444_444_4, max_relative = 1e-12);
    assert_relative_eq!(dy_da_linear(&two_agent(0.8), 0).unwrap(), 0.688_888_888_888_888_9, max_relative = 1e-12);
    for a1 in [0.45, 0.5, 0.6, 0.8, 0.95] {
        let d = dy_da_linear(&two_agent(a1), 0).unwrap();
        assert_relative_eq!(d, oracle(a1), max_relative = 1e-12);
        let fd = central(|x| y_of(&two_agent(x)), a1, 1e-6);
        assert!((d - fd).abs() < 1e-6, "A_1 = {a1}: {d} vs {fd}");
    }
    let root = 0.2 + 0.112f64.sqrt();
    assert!(dy_da_linear(&two_agent(root), 0).unwrap().abs() < 1e-12);
}

#[test]
fn tfp_derivative_of_the_high_producer() {
    // A_1^2 (1 - gamma) S_2 / (A_1 - gamma A_2)^2
    let d = dy_da_linear(&two_agent(0.5), 1).unwrap();
    assert_relative_eq!(d, 0.25 * 0.8 * 0.7 / 0.09, max_relative = 1e-12);
    let fd = central(|x| y_of(&two_agent(0.5).with_param(1, Param::A, x)), 1.0, 1e-6);
    assert!((d - fd).abs() < 1e-6);
}

#[test]
fn tfp_derivative_needs_an_a_n_regime() {
    let interior = StaticEconomy::linear(&[0.4, 1.0], &[0.2, 0.2], &[0.5, 0.7]);
    assert!(matches!(dy_da_linear(&interior, 0), Err(Error::RegimeMismatch { .. })));
}

#[test]
fn collateral_derivatives_by_regime() {
    // A_1 regime: only borrowers above the pivot matter, and they raise output
    let low = three_agent(0.15);
    assert_eq!(solve(&low).unwrap().regime, RegimeLabel::AtTfp(0));
    assert_eq!(dy_dgamma_linear(&low, 0).unwrap(), 0.0);
    assert!(dy_dgamma_linear(&low, 1).unwrap() > 0.0);
    assert!(dy_dgamma_linear(&low, 2).unwrap() > 0.0);

    // A_2 regime: agent 2 is the pivot and its limit is inert
    let high = three_agent(0.45);
    assert_eq!(solve(&high).unwrap().regime, RegimeLabel::AtTfp(1));
    assert_eq!(dy_dgamma_linear(&high, 1).unwrap(), 0.0);
    assert!(dy_dgamma_linear(&high, 2).unwrap() > 0.0);

    for e in [low, three_agent(0.3), high] {
        for i in 0..3 {
            let rep = finite_diff_sensitivity(&e, i, Param::Gamma, None).unwrap();
            assert!(!rep.regime_boundary);
            let an = rep.analytic.unwrap();
            assert!((an - rep.finite_diff).abs() < 1e-5 * an.abs().max(1.0), "{i}: {an} vs {}", rep.finite_diff);
        }
    }
}

#[test]
fn finite_differences_flag_regime_boundaries() {
    // the A_1 cell ends where 4.8 gamma_2 = k (1 - 1.2 gamma_2)
    let k = 4.0 - 0.45 * 3.0 / 0.55;
    let edge = k / (4.8 + 1.2 * k);
    let rep = finite_diff_sensitivity(&three_agent(edge), 1, Param::Gamma, Some(1e-4)).unwrap();
    assert!(rep.regime_boundary);
    assert!(rep.analytic.is_none());
    let (fwd, bwd) = rep.one_sided.unwrap();
    assert!(fwd.is_finite() && bwd.is_finite());

    assert!(matches!(
        finite_diff_sensitivity(&three_agent(0.3), 1, Param::Gamma, Some(0.0)),
        Err(Error::InvalidPerturbation(_))
    ));
    assert!(matches!(
        finite_diff_sensitivity(&three_agent(0.3), 1, Param::Gamma, Some(0.8)),
        Err(Error::InvalidPerturbation(_))
    ));
}

#[test]
fn random_economies_agree_with_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for _ in 0..300 {
        let e = random_linear(&mut rng, 5);
        for pos in 0..e.len() {
            for param in [Param::A, Param::Gamma] {
                let Ok(rep) = finite_diff_sensitivity(&e, pos, param, None) else { continue };
                if let Some(an) = rep.analytic {
                    assert!((an - rep.finite_diff).abs() <= 1e-5 * an.abs().max(1.0), "{e:?} {pos} {param}: {an} vs {}", rep.finite_diff);
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 500, "only {checked} analytic values");
}

#[test]
fn common_collateral_raises_output() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let base = random_linear(&mut rng, 5);
        let with = |g: f64| {
            let mut e = base.clone();
            for ag in &mut e.agents {
                ag.gamma = g;
            }
            e
        };
        let mut prev = f64::NEG_INFINITY;
        for j in 1..=20 {
            let e = with(0.04 * j as f64);
            let Ok(eq) = solve_equilibrium_linear(&e) else { continue };
            assert!(eq.y >= prev - 1e-12 * eq.y.abs(), "{e:?}");
            prev = eq.y;
        }
    }
}

#[test]
fn output_is_linear_in_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let e = random_linear(&mut rng, 5);
        let Ok(eq) = solve(&e) else { continue };
        let mut scaled = e.clone();
        for ag in &mut scaled.agents {
            ag.s *= 3.5;
        }
        let eq2 = solve(&scaled).unwrap();
        assert_eq!(eq.regime, eq2.regime);
        assert_relative_eq!(eq2.y, 3.5 * eq.y, max_relative = 1e-10);
        assert_relative_eq!(eq2.r, eq.r, max_relative = 1e-10);
    }
}

#[test]
fn sweep_over_the_low_tfp() {
    let e = two_agent(0.5);
    let table = sweep(&e, 0, Param::A, 0.34, 1.0, 133).unwrap();
    assert_eq!(table.rows.len(), 133);
    assert_eq!(table.grid()[0], 0.34);
    assert_eq!(*table.grid().last().unwrap(), 1.0);
    // both endpoints are excluded by the open sweep
    let open = sweep_open(&e, 0, Param::A, 0.34, 1.0, 10).unwrap();
    assert!(open.grid().iter().all(|&x| x > 0.34 && x < 1.0));

    let a_star = turning_point(&e, &table).unwrap();
    assert!((a_star - (0.2 + 0.112f64.sqrt())).abs() < 1e-7, "{a_star}");

    // the ordering flips at A_1 = 1; past it the sweep fails row by row
    let wide = sweep(&e, 0, Param::A, 0.5, 1.5, 11).unwrap();
    assert!(wide.rows.iter().any(|r| r.outcome.is_err()));
    assert!(wide.points().count() < 11);
}

#[test]
fn turning_point_on_the_boundary_is_an_error() {
    let e = two_agent(0.5);
    let table = sweep(&e, 0, Param::A, 0.6, 0.9, 10).unwrap();
    assert!(matches!(turning_point(&e, &table), Err(Error::Insolvable(_))));
}

#[test]
fn gamma_sweep_crosses_three_cells() {
    let e = three_agent(0.3);
    let table = sweep_open(&e, 1, Param::Gamma, 0.0, 0.6, 61).unwrap();
    let labels: Vec<RegimeLabel> = table.points().map(|(_, p)| p.regime).collect();
    assert!(labels.contains(&RegimeLabel::AtTfp(0)));
    assert!(labels.contains(&RegimeLabel::Interior(0)));
    assert!(labels.contains(&RegimeLabel::AtTfp(1)));
    // rising in the A_1 cell, falling inside the interior cell as capital
    // moves from agent 3 to agent 2, flat once agent 2 is the pivot
    let pts: Vec<(f64, f64, RegimeLabel)> = table.points().map(|(g, p)| (g, p.y, p.regime)).collect();
    for w in pts.windows(2) {
        let (dy, cell) = (w[1].1 - w[0].1, w[0].2);
        if cell != w[1].2 {
            continue;
        }
        match cell {
            RegimeLabel::AtTfp(0) => assert!(dy > 0.0),
            RegimeLabel::Interior(0) => assert!(dy < 0.0, "gamma_2 = {}", w[0].0),
            _ => assert!(dy.abs() < 1e-12),
        }
    }
}

#[test]
fn proportional_and_small_shocks() {
    let e = two_agent(0.5);
    let y = y_of(&e);
    let v = asymmetric_shock_check(&e, &[0.55, 1.1]).unwrap();
    assert!(v.precondition && v.a2_fast);
    assert_eq!(v.predicted, Some(Sign::NonNegative));
    assert_relative_eq!(v.realized_delta, 0.1 * y, max_relative = 1e-10);
    assert_relative_eq!(v.formula_delta.unwrap(), v.realized_delta, max_relative = 1e-10);

    let v = asymmetric_shock_check(&e, &[0.505, 1.0]).unwrap();
    assert!(v.realized_delta < 0.0);
    assert!(v.consistent);
}

#[test]
fn asymmetric_growth_can_lower_output() {
    let e = two_agent(0.5);
    let v = asymmetric_shock_check(&e, &[0.505, 1.0005]).unwrap();
    assert!(v.precondition && !v.a2_fast && v.dispersion && v.rate);
    assert_eq!(v.predicted, Some(Sign::Negative));
    assert!(v.realized_delta < 0.0 && v.consistent);
    assert_relative_eq!(v.formula_delta.unwrap(), v.realized_delta, max_relative = 1e-9);
}

#[test]
fn shock_check_without_prediction() {
    let three = three_agent(0.3);
    let v = asymmetric_shock_check(&three, &[1.1, 1.2, 1.5]).unwrap();
    assert!(!v.precondition && v.predicted.is_none() && v.consistent);
    assert!(matches!(asymmetric_shock_check(&three, &[1.0]), Err(Error::InvalidPerturbation(_))));
}

#[test]
fn tfp_accounting_in_frictionless_and_constrained_pairs() {
    let id = |s: f64| s;
    // agent 1 lends everything before and after: TFP moves with A_2
    let before = StaticEconomy::linear(&[0.5, 1.0], &[0.2, 0.5], &[1.0, 0.7]);
    let after = before.with_tfps(&[0.55, 1.05]);
    let rep = tfp_accounting(&before, &after, id).unwrap();
    assert!(rep.frictionless && rep.within_bounds);
    assert_relative_eq!(rep.ratio, 1.05, max_relative = 1e-12);
    assert_relative_eq!(rep.min_growth, 1.05, max_relative = 1e-12);

    // both TFPs rise yet aggregate TFP falls
    let before = two_agent(0.5);
    let after = before.with_tfps(&[0.505, 1.0005]);
    let rep = tfp_accounting(&before, &after, id).unwrap();
    assert!(!rep.frictionless);
    assert!(rep.ratio < 1.0 && rep.min_growth > 1.0 && !rep.within_bounds);

    assert!(tfp_accounting(&before, &three_agent(0.3), id).is_err());
}
