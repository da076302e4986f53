mod common;

use common::{chained_output, regimes_satisfied};
use credeq::concave::{frictionless_concave, individual_choice_concave, solve_equilibrium_concave, threshold_ri};
use credeq::econ::{RegimeLabel, StaticAgent, StaticEconomy, Technology};
use credeq::linear::*;
use credeq::ramsey::{auto_construct, verify_path, DynamicEconomy};
use proptest::prelude::*;

/// Increasing TFPs from positive steps, limits scaled so that `gamma_i A_i < A_1`.
fn linear_economy() -> impl Strategy<Value = StaticEconomy> {
    (0.3..1.5f64, prop::collection::vec((0.05..0.8f64, 0.02..0.95f64, 0.1..3.0f64), 1..=6)).prop_map(|(a0, rows)| {
        let mut a = Vec::new();
        let mut x = a0;
        for (step, _, _) in &rows {
            a.push(x);
            x += step;
        }
        let gamma: Vec<f64> = rows.iter().zip(&a).map(|((_, g, _), ai)| g * (a[0] / ai).min(0.98)).collect();
        let s: Vec<f64> = rows.iter().map(|r| r.2).collect();
        StaticEconomy::linear(&a, &gamma, &s)
    })
}

fn cobb_douglas_economy() -> impl Strategy<Value = StaticEconomy> {
    (0.2..0.8f64, prop::collection::vec((0.5..2.5f64, 0.02..0.95f64, 0.2..3.0f64), 2..=4)).prop_map(|(alpha, rows)| {
        let agents = rows
            .into_iter()
            .enumerate()
            .map(|(i, (a, g, s))| StaticAgent::new(i + 1, Technology::cobb_douglas(a, alpha), g, s))
            .collect();
        StaticEconomy::new(agents)
    })
}

fn dynamic_economy() -> impl Strategy<Value = DynamicEconomy> {
    (0.5..1.5f64, prop::collection::vec((0.1..0.8f64, 0.3..0.95f64, 0.05..0.9f64, 0.2..3.0f64), 2..=3)).prop_map(
        |(a0, rows)| {
            let mut a = Vec::new();
            let mut x = a0;
            for r in &rows {
                a.push(x);
                x += r.0;
            }
            let beta: Vec<f64> = rows.iter().map(|r| r.1).collect();
            let gamma: Vec<f64> = rows.iter().zip(&a).map(|(r, ai)| r.2 * (a[0] / ai).min(0.98)).collect();
            let s0: Vec<f64> = rows.iter().map(|r| r.3).collect();
            DynamicEconomy::stationary(&beta, &gamma, &s0, &a, 15)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn regime_cells_partition_the_parameter_space(e in linear_economy()) {
        let label = classify_regime(&e).unwrap();
        prop_assert_eq!(regimes_satisfied(&e), vec![label]);
    }

    #[test]
    fn allocations_are_optimal_and_clear_the_market(e in linear_economy()) {
        let eq = solve_equilibrium_linear(&e).unwrap();
        let total = e.total_wealth();
        prop_assert!(eq.net_assets().abs() <= 1e-10 * total);
        prop_assert!((eq.capital().iter().sum::<f64>() - total).abs() <= 1e-10 * total);
        for (ag, al) in e.agents.iter().zip(&eq.allocations) {
            prop_assert!((al.k - al.b - ag.s).abs() <= 1e-10 * total);
            match individual_choice_linear(ag.a(), ag.gamma, ag.s, eq.r) {
                LinearChoice::Determined { k, .. } => prop_assert!((al.k - k).abs() <= 1e-9 * total.max(k)),
                LinearChoice::Indeterminate { b_min, b_max } => {
                    let slack = 1e-10 * total;
                    prop_assert!(al.b >= b_min - slack && al.b <= b_max + slack);
                }
                LinearChoice::Unbounded => prop_assert!(false, "unbounded demand at the equilibrium rate"),
            }
        }
    }

    #[test]
    fn output_never_exceeds_the_frictionless_benchmark(e in linear_economy()) {
        let eq = solve_equilibrium_linear(&e).unwrap();
        let best = frictionless_output_linear(&e);
        prop_assert!(eq.y <= best * (1.0 + 1e-12));
        let m = e.len();
        if eq.regime == RegimeLabel::AtTfp(m - 1) || (m == 2 && eq.regime == RegimeLabel::Interior(0)) {
            prop_assert!((eq.y - best).abs() <= 1e-12 * best);
        }
    }

    #[test]
    fn interior_rates_zero_the_residual(e in linear_economy()) {
        if let RegimeLabel::Interior(n) = classify_regime(&e).unwrap() {
            let r = solve_r_interior(n, &e).unwrap();
            prop_assert!(r > e.agents[n].a() && r < e.agents[n + 1].a());
            let c: Vec<f64> = e.agents[n + 1..].iter().map(|a| a.gamma * a.a()).collect();
            let s: Vec<f64> = e.agents[n + 1..].iter().map(|a| a.s).collect();
            prop_assert!(interior_residual(&c, &s, e.total_wealth(), r) < 1e-10);
        }
    }

    #[test]
    fn bounds_are_ordered(e in linear_economy()) {
        let bounds = compute_bounds(&e).unwrap();
        for n in 0..bounds.len() {
            if let Some(b) = bounds[n] {
                prop_assert!(b.b <= b.d);
                if let Some(Some(next)) = bounds.get(n + 1) {
                    prop_assert!(next.d <= b.b * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn scaling_wealth_scales_output(e in linear_economy(), lambda in 0.1..10.0f64) {
        let eq = solve_equilibrium_linear(&e).unwrap();
        let mut scaled = e.clone();
        for ag in &mut scaled.agents {
            ag.s *= lambda;
        }
        let eq2 = solve_equilibrium_linear(&scaled).unwrap();
        prop_assert_eq!(eq.regime, eq2.regime);
        prop_assert!((eq2.r - eq.r).abs() <= 1e-10 * eq.r);
        prop_assert!((eq2.y - lambda * eq.y).abs() <= 1e-10 * lambda * eq.y);
    }

    #[test]
    fn lender_limits_below_the_pivot_are_inert(e in linear_economy(), g in 0.01..0.99f64) {
        let eq = solve_equilibrium_linear(&e).unwrap();
        if let RegimeLabel::AtTfp(n) = eq.regime {
            for i in 0..n {
                let mut f = e.clone();
                f.agents[i].gamma = g;
                let eq2 = solve_equilibrium_linear(&f).unwrap();
                prop_assert_eq!(eq2.r.to_bits(), eq.r.to_bits());
                prop_assert_eq!(eq2.y.to_bits(), eq.y.to_bits());
                for (x, y) in eq.allocations.iter().zip(&eq2.allocations) {
                    prop_assert_eq!(x.k.to_bits(), y.k.to_bits());
                    prop_assert_eq!(x.b.to_bits(), y.b.to_bits());
                }
            }
        }
    }

    #[test]
    fn concave_demand_falls_with_the_rate(e in cobb_douglas_economy(), r0 in 0.05..2.0f64) {
        let demand = |r: f64| -> f64 { e.agents.iter().map(|ag| individual_choice_concave(ag, r).unwrap().k).sum() };
        prop_assert!(demand(1.1 * r0) <= demand(r0) * (1.0 + 1e-12));
    }

    #[test]
    fn concave_binding_iff_below_threshold(e in cobb_douglas_economy(), r in 0.05..3.0f64) {
        for ag in &e.agents {
            let binding = individual_choice_concave(ag, r).unwrap().binding;
            match threshold_ri(ag).unwrap().threshold.value() {
                None => prop_assert!(!binding),
                Some(ri) if (r - ri).abs() > 1e-9 * ri => prop_assert_eq!(binding, r < ri),
                Some(_) => {}
            }
        }
    }

    #[test]
    fn concave_output_below_frictionless(e in cobb_douglas_economy()) {
        let eq = solve_equilibrium_concave(&e).unwrap();
        let fr = frictionless_concave(&e).unwrap();
        prop_assert!(eq.y <= fr.y * (1.0 + 1e-10));
        prop_assert!(eq.net_assets().abs() <= 1e-8 * e.total_wealth());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constructed_paths_verify_and_match_chained_statics(e in dynamic_economy()) {
        let Ok(auto) = auto_construct(&e) else { return Ok(()) };
        let path = auto.path;
        let report = verify_path(&e, &path, 1e-9, f64::INFINITY);
        prop_assert!(report.pass, "{:?}", report.failures.first());
        let a = e.tfps_at(1);
        for t in 1..=e.horizon {
            let y: f64 = (0..e.len()).map(|i| a[i] * path.k[i][t - 1]).sum();
            prop_assert!((y - path.output(t)).abs() <= 1e-12 * y);
        }
        for (x, y) in chained_output(&e).iter().zip(&path.y) {
            prop_assert!((x - y).abs() <= 1e-9 * y);
        }
    }

    #[test]
    fn corrupted_paths_fail_verification(e in dynamic_economy(), pick in 0usize..4, agent in 0usize..3, t in 1usize..14) {
        let Ok(auto) = auto_construct(&e) else { return Ok(()) };
        let mut path = auto.path;
        let i = agent % e.len();
        // shift by 1e-3 of the cross-agent total so zero entries move too
        let total = |v: &Vec<Vec<f64>>| v.iter().map(|x| x[t].abs()).sum::<f64>();
        match pick {
            0 => path.k[i][t] += 1e-3 * total(&path.k),
            1 => path.s[i][t] += 1e-3 * total(&path.s),
            2 => path.c[i][t] += 1e-3 * total(&path.c),
            _ => path.r[t] *= 1.001,
        }
        prop_assert!(!verify_path(&e, &path, 1e-9, f64::INFINITY).pass);
    }
}
