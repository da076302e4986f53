//! Comparative statics of equilibrium output.
//!
//! Analytic derivatives exist for linear economies inside a regime cell.
//! Across cell boundaries output has kinks, so [`finite_diff_sensitivity`]
//! reports one-sided differences there instead of an analytic value.

use rayon::prelude::*;

use crate::concave::{frictionless_concave, solve_equilibrium_concave};
use crate::econ::{validate_economy, Param, RegimeLabel, StaticEconomy, StaticEquilibrium};
use crate::error::{Error, Result};
use crate::linear::{classify_regime, frictionless_output_linear, solve_equilibrium_linear};
use crate::roots::golden_section_min;

/// Solve with the linear or the concave solver, whichever applies.
pub fn solve(econ: &StaticEconomy) -> Result<StaticEquilibrium> {
    if econ.is_linear() {
        solve_equilibrium_linear(econ)
    } else {
        solve_equilibrium_concave(econ)
    }
}

fn mismatch(expected: &str, found: RegimeLabel) -> Error {
    Error::RegimeMismatch { expected: expected.into(), found: found.to_string() }
}

/// `dY/dA_j` for a linear economy in a regime `AtTfp(n)`.
///
/// ```
/// use credeq::econ::StaticEconomy;
/// use credeq::sensitivity::dy_da_linear;
///
/// let econ = StaticEconomy::linear(&[0.5, 1.0], &[0.2, 0.2], &[1.0, 0.7]);
/// let d = dy_da_linear(&econ, 0).unwrap();
/// assert!((d - (1.0 - 0.16 * 0.7 / 0.09)).abs() < 1e-12);
/// ```
pub fn dy_da_linear(econ: &StaticEconomy, j: usize) -> Result<f64> {
    let regime = classify_regime(econ)?;
    let RegimeLabel::AtTfp(n) = regime else {
        return Err(mismatch("A_n regime", regime));
    };
    let ag = &econ.agents;
    let an = ag[n].a();
    Ok(if j < n {
        0.0
    } else if j == n {
        let own: f64 = ag[..=n].iter().map(|a| a.s).sum();
        let drag: f64 = ag[n + 1..]
            .iter()
            .map(|a| {
                let d = an - a.gamma * a.a();
                (1.0 - a.gamma) * a.gamma * a.a() * a.a() * a.s / (d * d)
            })
            .sum();
        own - drag
    } else {
        let a = &ag[j];
        let d = an - a.gamma * a.a();
        an * an * (1.0 - a.gamma) * a.s / (d * d)
    })
}

/// `dY/dgamma_i` for a linear economy in any regime.
pub fn dy_dgamma_linear(econ: &StaticEconomy, i: usize) -> Result<f64> {
    let regime = classify_regime(econ)?;
    let ag = &econ.agents;
    match regime {
        RegimeLabel::AtTfp(n) => {
            if i <= n {
                return Ok(0.0);
            }
            let an = ag[n].a();
            let (ai, si) = (ag[i].a(), ag[i].s);
            let d = an - ag[i].gamma * ai;
            Ok(an * ai * si * (ai - an) / (d * d))
        }
        RegimeLabel::Interior(n) => {
            if i <= n {
                return Ok(0.0);
            }
            let eq = solve_equilibrium_linear(econ)?;
            let r = eq.r;
            let mut slope = 0.0;
            let mut weighted = 0.0;
            for a in &ag[n + 1..] {
                let c = a.gamma * a.a();
                let w = c * a.s / ((r - c) * (r - c));
                slope += w;
                weighted += a.a() * w;
            }
            let (ai, si, ci) = (ag[i].a(), ag[i].s, ag[i].gamma * ag[i].a());
            let dr = r * ai * si / ((r - ci) * (r - ci)) / slope;
            Ok(dr * (ai * slope - weighted))
        }
        other => Err(mismatch("linear regime", other)),
    }
}

/// Analytic and numerical sensitivity of output to one parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct SensitivityReport {
    pub pos: usize,
    pub param: Param,
    /// Closed-form value, when one exists for this economy and parameter.
    pub analytic: Option<f64>,
    /// Central difference `(Y(x+h) - Y(x-h)) / 2h`.
    pub finite_diff: f64,
    /// The perturbed economies fall in different regimes.
    pub regime_boundary: bool,
    /// Forward and backward differences, reported at regime boundaries.
    pub one_sided: Option<(f64, f64)>,
}

/// Default step `1e-6 (1 + |x|)`.
pub fn default_step(x: f64) -> f64 {
    1e-6 * (1.0 + x.abs())
}

/// Central-difference derivative of output in parameter `param` of the
/// agent at position `pos`. `h = None` uses [`default_step`].
pub fn finite_diff_sensitivity(
    econ: &StaticEconomy,
    pos: usize,
    param: Param,
    h: Option<f64>,
) -> Result<SensitivityReport> {
    let x = econ.param(pos, param);
    let h = h.unwrap_or_else(|| default_step(x));
    if !(h > 0.0) {
        return Err(Error::InvalidPerturbation(format!("step must be positive, got {h}")));
    }
    let perturbed = |v: f64| {
        let e = econ.with_param(pos, param, v);
        let bad = validate_economy(&e);
        if bad.is_empty() {
            Ok(e)
        } else {
            Err(Error::InvalidPerturbation(format!(
                "{param} = {v}: {}",
                bad.iter().map(|b| b.to_string()).collect::<Vec<_>>().join("; ")
            )))
        }
    };
    let up = solve(&perturbed(x + h)?)?;
    let down = solve(&perturbed(x - h)?)?;
    let mid = solve(econ)?;
    let finite_diff = (up.y - down.y) / (2.0 * h);
    let regime_boundary = up.regime != mid.regime || down.regime != mid.regime;
    let analytic = if regime_boundary || !econ.is_linear() {
        None
    } else {
        match param {
            Param::A => dy_da_linear(econ, pos).ok(),
            Param::Gamma => dy_dgamma_linear(econ, pos).ok(),
            Param::S => None,
        }
    };
    let one_sided = regime_boundary.then(|| ((up.y - mid.y) / h, (mid.y - down.y) / h));
    Ok(SensitivityReport { pos, param, analytic, finite_diff, regime_boundary, one_sided })
}

/// Equilibrium summary at one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub r: f64,
    pub y: f64,
    pub regime: RegimeLabel,
    /// Capital per agent, in the economy's order.
    pub k: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// Solver failures are kept per row rather than aborting the sweep.
    pub outcome: std::result::Result<SweepPoint, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub pos: usize,
    pub param: Param,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn grid(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }

    /// Successful rows only.
    pub fn points(&self) -> impl Iterator<Item = (f64, &SweepPoint)> {
        self.rows.iter().filter_map(|r| r.outcome.as_ref().ok().map(|p| (r.value, p)))
    }
}

fn check_range(from: f64, to: f64, steps: usize) -> Result<()> {
    if !(from < to) || steps == 0 {
        return Err(Error::InvalidPerturbation(format!(
            "sweep needs from < to and at least one step, got [{from}, {to}] with {steps}"
        )));
    }
    Ok(())
}

/// `steps` evenly spaced values from `from` to `to`, both included.
pub fn sweep(econ: &StaticEconomy, pos: usize, param: Param, from: f64, to: f64, steps: usize) -> Result<SweepTable> {
    check_range(from, to, steps)?;
    let grid: Vec<f64> = if steps == 1 {
        vec![from]
    } else {
        (0..steps).map(|j| from + (to - from) * j as f64 / (steps - 1) as f64).collect()
    };
    Ok(run_grid(econ, pos, param, grid))
}

/// `steps` evenly spaced values strictly inside `(from, to)`.
pub fn sweep_open(econ: &StaticEconomy, pos: usize, param: Param, from: f64, to: f64, steps: usize) -> Result<SweepTable> {
    check_range(from, to, steps)?;
    let grid = (1..=steps).map(|j| from + (to - from) * j as f64 / (steps + 1) as f64).collect();
    Ok(run_grid(econ, pos, param, grid))
}

fn run_grid(econ: &StaticEconomy, pos: usize, param: Param, grid: Vec<f64>) -> SweepTable {
    let rows = grid
        .into_par_iter()
        .map(|value| {
            let outcome = solve(&econ.with_param(pos, param, value))
                .map(|eq| SweepPoint { r: eq.r, y: eq.y, regime: eq.regime, k: eq.capital() })
                .map_err(|e| e.to_string());
            SweepRow { value, outcome }
        })
        .collect();
    SweepTable { pos, param, rows }
}

/// Interior minimiser of output along a sweep: the best grid point is
/// refined by golden-section search between its neighbours.
pub fn turning_point(econ: &StaticEconomy, table: &SweepTable) -> Result<f64> {
    let rows = &table.rows;
    let best = rows
        .iter()
        .enumerate()
        .filter_map(|(j, r)| r.outcome.as_ref().ok().map(|p| (j, p.y)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Insolvable("sweep has no solved rows".into()))?
        .0;
    if best == 0 || best + 1 == rows.len() {
        return Err(Error::Insolvable("output minimum lies on the sweep boundary".into()));
    }
    let y = |x: f64| solve(&econ.with_param(table.pos, table.param, x)).map_or(f64::INFINITY, |e| e.y);
    let (x, _) = golden_section_min(y, rows[best - 1].value, rows[best + 1].value, 1e-9);
    Ok(x)
}

/// Direction of an output change.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Negative,
    NonNegative,
    Positive,
}

impl Sign {
    fn admits(self, delta: f64, scale: f64) -> bool {
        let slack = 1e-12 * (1.0 + scale.abs());
        match self {
            Sign::Negative => delta < 0.0,
            Sign::NonNegative => delta >= -slack,
            Sign::Positive => delta > 0.0,
        }
    }
}

/// Outcome of [`asymmetric_shock_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct ShockVerdict {
    /// Two agents, `A_2' > A_1'`, and agent 2's limit low enough that the
    /// rate equals `A_1` both before and after.
    pub precondition: bool,
    /// `A_2'/A_2 >= A_1'/A_1 >= 1`.
    pub a2_fast: bool,
    /// `(S_1/S_2)(A_1/A_2 - gamma_2)^2 < (1 - gamma_2) gamma_2`.
    pub dispersion: bool,
    /// Relative growth ratio below the critical bound, with `A_1' != A_1`.
    pub rate: bool,
    pub predicted: Option<Sign>,
    /// Closed-form `Y' - Y` when the precondition holds.
    pub formula_delta: Option<f64>,
    /// `Y' - Y` from solving both economies.
    pub realized_delta: f64,
    /// The realized change has the predicted sign (true when nothing is predicted).
    pub consistent: bool,
}

/// Closed-form output change of a two-agent economy whose rate equals
/// `A_1` before and after the shock.
pub fn two_agent_delta(s: [f64; 2], gamma2: f64, a: [f64; 2], a_new: [f64; 2]) -> f64 {
    let [a1, a2] = a;
    let [b1, b2] = a_new;
    let cross = a1 * b1 * (b2 - a2) - gamma2 * a2 * b2 * (b1 - a1);
    (b1 - a1) * s[0] + (1.0 - gamma2) * s[1] * cross / ((a1 - gamma2 * a2) * (b1 - gamma2 * b2))
}

/// Check the two-agent conditions under which a productivity shock raises
/// or lowers output, and compare with the realized change.
///
/// The rate condition describes a neighbourhood of the original TFPs; for
/// large shocks it is reported but may disagree with the realized sign.
/// Economies with more than two agents get no prediction.
pub fn asymmetric_shock_check(econ: &StaticEconomy, new_as: &[f64]) -> Result<ShockVerdict> {
    if new_as.len() != econ.len() {
        return Err(Error::InvalidPerturbation(format!(
            "expected {} productivities, got {}",
            econ.len(),
            new_as.len()
        )));
    }
    let after = econ.with_tfps(new_as);
    let y0 = solve(econ)?.y;
    let y1 = solve(&after)?.y;
    let realized_delta = y1 - y0;

    let mut v = ShockVerdict {
        precondition: false,
        a2_fast: false,
        dispersion: false,
        rate: false,
        predicted: None,
        formula_delta: None,
        realized_delta,
        consistent: true,
    };
    if econ.len() != 2 || !econ.is_linear() {
        return Ok(v);
    }
    let (s1, s2) = (econ.agents[0].s, econ.agents[1].s);
    let g2 = econ.agents[1].gamma;
    let (a1, a2) = (econ.agents[0].a(), econ.agents[1].a());
    let (b1, b2) = (new_as[0], new_as[1]);
    let share = s1 / (s1 + s2);
    v.precondition = b2 > b1 && g2 < a1 / a2 * share && g2 < b1 / b2 * share;
    if !v.precondition {
        return Ok(v);
    }
    v.formula_delta = Some(two_agent_delta([s1, s2], g2, [a1, a2], [b1, b2]));
    v.a2_fast = b2 / a2 >= b1 / a1 && b1 / a1 >= 1.0;
    v.dispersion = s1 / s2 * (a1 / a2 - g2).powi(2) < (1.0 - g2) * g2;
    let bound = g2 * a2 / a1 - s1 * (a1 - g2 * a2).powi(2) / (s2 * a1 * a2 * (1.0 - g2));
    v.rate = b1 != a1 && (b2 / a2 - 1.0) / (b1 / a1 - 1.0) < bound;
    v.predicted = if v.a2_fast {
        Some(Sign::NonNegative)
    } else if v.dispersion && v.rate {
        Some(if b1 > a1 { Sign::Negative } else { Sign::Positive })
    } else {
        None
    };
    v.consistent = v.predicted.map_or(true, |p| p.admits(realized_delta, y0));
    Ok(v)
}

/// Aggregate TFP before and after a change of productivities.
#[derive(Clone, Debug, PartialEq)]
pub struct TfpReport {
    pub tfp_before: f64,
    pub tfp_after: f64,
    /// `TFP' / TFP`.
    pub ratio: f64,
    pub min_growth: f64,
    pub max_growth: f64,
    /// `min_growth <= ratio <= max_growth`, up to `1e-10` relative.
    pub within_bounds: bool,
    /// Both economies attain their frictionless output.
    pub frictionless: bool,
}

/// Aggregate TFP `Y / f(S)` of two economies that differ only in
/// productivities, measured with the common base technology `f_ref`.
pub fn tfp_accounting<F: Fn(f64) -> f64>(before: &StaticEconomy, after: &StaticEconomy, f_ref: F) -> Result<TfpReport> {
    if before.len() != after.len() {
        return Err(Error::InvalidPerturbation("economies have different agent counts".into()));
    }
    let eq0 = solve(before)?;
    let eq1 = solve(after)?;
    let tfp_before = eq0.y / f_ref(before.total_wealth());
    let tfp_after = eq1.y / f_ref(after.total_wealth());
    let ratio = tfp_after / tfp_before;
    let growth = before.agents.iter().zip(&after.agents).map(|(x, y)| y.a() / x.a());
    let min_growth = growth.clone().fold(f64::INFINITY, f64::min);
    let max_growth = growth.fold(f64::NEG_INFINITY, f64::max);
    let slack = 1e-10 * ratio.abs();
    let within_bounds = ratio >= min_growth - slack && ratio <= max_growth + slack;
    let frictionless = attains_frictionless(before, &eq0)? && attains_frictionless(after, &eq1)?;
    Ok(TfpReport { tfp_before, tfp_after, ratio, min_growth, max_growth, within_bounds, frictionless })
}

fn attains_frictionless(econ: &StaticEconomy, eq: &StaticEquilibrium) -> Result<bool> {
    let best = if econ.is_linear() {
        frictionless_output_linear(econ)
    } else {
        frictionless_concave(econ)?.y
    };
    Ok((best - eq.y).abs() <= 1e-10 * best.abs())
}
