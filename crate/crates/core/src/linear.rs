//! Exact equilibria for linear technologies `F_i(k) = A_i k`.
//!
//! With agents sorted by productivity, the equilibrium rate either equals
//! some agent's TFP (`AtTfp(n)`) or sits strictly between two neighbouring
//! TFPs (`Interior(n)`), in which case agents `0..=n` lend everything and
//! the rest borrow up to their limit. Which cell applies is read off
//! aggregate wealth against the bounds `D_n` and `B_n`.

use rayon::prelude::*;

use crate::econ::{
    aggregate_output, ensure_valid, AgentAllocation, RegimeLabel, StaticEconomy, StaticEquilibrium,
    Tolerances,
};
use crate::error::{Error, Result};
use crate::roots::{bisect, Stop};

/// Optimal choice of a single linear producer facing rate `R`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LinearChoice {
    Determined { k: f64, b: f64, binding: bool },
    /// `R = A`: every `b` in `[b_min, b_max]` is optimal, with `k = b + S`.
    Indeterminate { b_min: f64, b_max: f64 },
    /// `R <= gamma A`: profit grows without bound in `k`.
    Unbounded,
}

/// Solve `max A k - R b` subject to `0 <= k <= S + b` and `R b <= gamma A k`.
///
/// ```
/// use credeq::linear::{individual_choice_linear, LinearChoice};
///
/// let c = individual_choice_linear(1.5, 0.4, 100.0, 1.0);
/// let LinearChoice::Determined { k, b, binding } = c else { panic!() };
/// assert!((k - 250.0).abs() < 1e-12 && (b - 150.0).abs() < 1e-12 && binding);
/// ```
pub fn individual_choice_linear(a: f64, gamma: f64, s: f64, r: f64) -> LinearChoice {
    let c = gamma * a;
    if r <= c {
        LinearChoice::Unbounded
    } else if r < a {
        LinearChoice::Determined {
            k: r * s / (r - c),
            b: c * s / (r - c),
            binding: true,
        }
    } else if r == a {
        LinearChoice::Indeterminate {
            b_min: -s,
            b_max: gamma * s / (1.0 - gamma),
        }
    } else {
        LinearChoice::Determined { k: 0.0, b: -s, binding: false }
    }
}

/// `D_n` and `B_n` for one agent position `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearBounds {
    pub n: usize,
    /// `sum_{i >= n} A_n S_i / (A_n - gamma_i A_i)`.
    pub d: f64,
    /// Same sum over `i > n`; zero for the last agent.
    pub b: f64,
}

/// Bounds for every position; `None` where `A_n <= max_i gamma_i A_i`.
pub fn compute_bounds(econ: &StaticEconomy) -> Result<Vec<Option<LinearBounds>>> {
    ensure_linear(econ)?;
    Ok(bounds_unchecked(econ))
}

fn bounds_unchecked(econ: &StaticEconomy) -> Vec<Option<LinearBounds>> {
    let m = econ.len();
    let big_m = econ.max_gamma_a();
    (0..m)
        .map(|n| {
            let an = econ.agents[n].a();
            if an <= big_m {
                return None;
            }
            let term = |i: usize| {
                let ag = &econ.agents[i];
                an * ag.s / (an - ag.gamma * ag.a())
            };
            let b: f64 = (n + 1..m).map(term).sum();
            Some(LinearBounds { n, d: b + term(n), b })
        })
        .collect()
}

fn ensure_linear(econ: &StaticEconomy) -> Result<()> {
    ensure_valid(econ)?;
    if !econ.is_linear() {
        return Err(Error::RegimeMismatch {
            expected: "linear economy".into(),
            found: "concave technologies".into(),
        });
    }
    Ok(())
}

/// The unique regime cell of a linear economy.
///
/// ```
/// use credeq::econ::{RegimeLabel, StaticEconomy};
/// use credeq::linear::classify_regime;
///
/// let econ = StaticEconomy::linear(&[0.4, 1.0], &[0.2, 0.2], &[0.5, 0.7]);
/// assert_eq!(classify_regime(&econ).unwrap(), RegimeLabel::Interior(0));
/// ```
pub fn classify_regime(econ: &StaticEconomy) -> Result<RegimeLabel> {
    ensure_linear(econ)?;
    classify_unchecked(econ)
}

fn classify_unchecked(econ: &StaticEconomy) -> Result<RegimeLabel> {
    let bounds = bounds_unchecked(econ);
    let s = econ.total_wealth();
    let m = econ.len();
    for n in 0..m {
        if let Some(bd) = bounds[n] {
            if bd.b <= s && s <= bd.d {
                return Ok(RegimeLabel::AtTfp(n));
            }
        }
        let next_below = n + 1 < m && bounds[n + 1].is_some_and(|nx| nx.d < s);
        if next_below {
            match bounds[n] {
                Some(bd) if s < bd.b => return Ok(RegimeLabel::Interior(n)),
                // A_n <= max gamma A: demand at A_n is unbounded, so the
                // interior root automatically exceeds A_n.
                None => return Ok(RegimeLabel::Interior(n)),
                Some(_) => {}
            }
        }
    }
    Err(Error::NoRegime)
}

/// Largest root of `sum_i R s_i / (R - c_i) = total` above `max c_i`, where
/// `(c_i, s_i)` are the borrowers' `gamma A` and wealth.
pub(crate) fn interior_root(c: &[f64], s: &[f64], total: f64, tol: &Tolerances) -> Result<f64> {
    let lenders = total - s.iter().sum::<f64>();
    if c.is_empty() || lenders <= 0.0 {
        return Err(Error::Bracket("interior root needs at least one lender and one borrower".into()));
    }
    match c.len() {
        1 => Ok(c[0] * total / lenders),
        2 => {
            let p = (total - s[0]) * c[1] + (total - s[1]) * c[0];
            let disc = p * p - 4.0 * lenders * total * c[0] * c[1];
            Ok((p + disc.max(0.0).sqrt()) / (2.0 * lenders))
        }
        _ => {
            let cmax = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let g = |r: f64| c.iter().zip(s).map(|(ci, si)| r * si / (r - ci)).sum::<f64>() - total;
            let lo = cmax * (1.0 + 1e-9);
            let mut hi = 10.0 * cmax.max(f64::MIN_POSITIVE);
            let mut grow = 0;
            while g(hi) > 0.0 {
                hi *= 2.0;
                grow += 1;
                if grow > 1100 {
                    return Err(Error::Bracket("interior demand stays above supply".into()));
                }
            }
            bisect(g, lo, hi, Stop::Machine, tol.max_iter.max(2000), false)
        }
    }
}

/// Residual of the interior asset-market equation, relative to `total`.
pub fn interior_residual(c: &[f64], s: &[f64], total: f64, r: f64) -> f64 {
    let demand: f64 = c.iter().zip(s).map(|(ci, si)| r * si / (r - ci)).sum();
    (demand - total).abs() / total
}

/// Interior rate when agents `0..=n` lend and the rest borrow.
///
/// ```
/// use credeq::econ::StaticEconomy;
/// use credeq::linear::solve_r_interior;
///
/// let econ = StaticEconomy::linear(&[0.4, 1.0], &[0.2, 0.2], &[0.5, 0.7]);
/// assert!((solve_r_interior(0, &econ).unwrap() - 0.48).abs() < 1e-12);
/// ```
pub fn solve_r_interior(n: usize, econ: &StaticEconomy) -> Result<f64> {
    let found = classify_regime(econ)?;
    if found != RegimeLabel::Interior(n) {
        return Err(Error::RegimeMismatch {
            expected: RegimeLabel::Interior(n).to_string(),
            found: found.to_string(),
        });
    }
    let (c, s) = borrowers(econ, n + 1);
    interior_root(&c, &s, econ.total_wealth(), &Tolerances::DEFAULT)
}

fn borrowers(econ: &StaticEconomy, first: usize) -> (Vec<f64>, Vec<f64>) {
    econ.agents[first..]
        .iter()
        .map(|a| (a.gamma * a.a(), a.s))
        .unzip()
}

/// Solve a linear economy exactly.
///
/// At `AtTfp(n)` agent `n` is indifferent about its scale; it takes up
/// whatever capital the other agents leave.
///
/// ```
/// use credeq::econ::StaticEconomy;
/// use credeq::linear::solve_equilibrium_linear;
///
/// let econ = StaticEconomy::linear(&[0.5, 1.0], &[0.2, 0.2], &[1.0, 0.7]);
/// let eq = solve_equilibrium_linear(&econ).unwrap();
/// assert_eq!(eq.r, 0.5);
/// assert!((eq.y - 1.4333333333333333).abs() < 1e-12);
/// ```
pub fn solve_equilibrium_linear(econ: &StaticEconomy) -> Result<StaticEquilibrium> {
    ensure_linear(econ)?;
    let tol = Tolerances::DEFAULT;
    let regime = classify_unchecked(econ)?;
    let total = econ.total_wealth();
    let r = match regime {
        RegimeLabel::AtTfp(n) => econ.agents[n].a(),
        RegimeLabel::Interior(n) => {
            let (c, s) = borrowers(econ, n + 1);
            interior_root(&c, &s, total, &tol)?
        }
        _ => return Err(Error::NoRegime),
    };

    let mut allocations = Vec::with_capacity(econ.len());
    let mut pivot = None;
    for (i, ag) in econ.agents.iter().enumerate() {
        let alloc = match individual_choice_linear(ag.a(), ag.gamma, ag.s, r) {
            LinearChoice::Determined { k, b, binding } => AgentAllocation {
                id: ag.id,
                k,
                b,
                binding,
                profit: ag.a() * k - r * b,
            },
            LinearChoice::Indeterminate { .. } => {
                pivot = Some(i);
                AgentAllocation { id: ag.id, k: 0.0, b: 0.0, binding: false, profit: 0.0 }
            }
            LinearChoice::Unbounded => {
                return Err(Error::Insolvable(format!("agent {} has unbounded demand at R = {r}", ag.id)))
            }
        };
        allocations.push(alloc);
    }

    if let Some(p) = pivot {
        let ag = &econ.agents[p];
        let others: f64 = allocations.iter().enumerate().filter(|(i, _)| *i != p).map(|(_, a)| a.k).sum();
        let k = total - others;
        let b = k - ag.s;
        let b_max = ag.gamma * ag.s / (1.0 - ag.gamma);
        let slack = tol.market_abs * (1.0 + total);
        if b < -ag.s - slack || b > b_max + slack {
            return Err(Error::Insolvable(format!(
                "residual position b = {b} of agent {} lies outside [{}, {b_max}]",
                ag.id, -ag.s
            )));
        }
        let k = k.max(0.0);
        allocations[p] = AgentAllocation {
            id: ag.id,
            k,
            b,
            binding: (r * b - ag.gamma * ag.a() * k).abs() <= slack,
            profit: ag.a() * k - r * b,
        };
    }

    let y = aggregate_output(econ, &allocations)?;
    Ok(StaticEquilibrium { r, allocations, regime, y })
}

/// `A_m * S`: output when all capital goes to the most productive agent.
pub fn frictionless_output_linear(econ: &StaticEconomy) -> f64 {
    let am = econ.agents.iter().map(|a| a.a()).fold(f64::NEG_INFINITY, f64::max);
    am * econ.total_wealth()
}

/// Range `[min, max]` of aggregate capital demand at rate `r`; `None` when
/// some agent's demand is unbounded.
pub fn capital_demand_interval(econ: &StaticEconomy, r: f64) -> Option<(f64, f64)> {
    let mut lo = 0.0;
    let mut hi = 0.0;
    for ag in &econ.agents {
        match individual_choice_linear(ag.a(), ag.gamma, ag.s, r) {
            LinearChoice::Determined { k, .. } => {
                lo += k;
                hi += k;
            }
            LinearChoice::Indeterminate { b_min, b_max } => {
                lo += b_min + ag.s;
                hi += b_max + ag.s;
            }
            LinearChoice::Unbounded => return None,
        }
    }
    Some((lo, hi))
}

/// Brute-force rate: scan `R_j = M + (A_m - M) j / N`, `j = 1..=N`, with
/// `M = max gamma A`, and return the largest grid rate at which capital
/// demand can still absorb aggregate wealth. The true rate lies in
/// `[R_j, R_{j+1})`.
pub fn oracle_equilibrium_linear(econ: &StaticEconomy, grid_size: usize) -> f64 {
    let big_m = econ.max_gamma_a();
    let am = econ.agents.iter().map(|a| a.a()).fold(f64::NEG_INFINITY, f64::max);
    let s = econ.total_wealth();
    let n = grid_size.max(1);
    let step = (am - big_m) / n as f64;
    let best = (1..=n)
        .into_par_iter()
        .filter(|&j| {
            let r = if j == n { am } else { big_m + step * j as f64 };
            capital_demand_interval(econ, r).map_or(true, |(_, hi)| hi >= s)
        })
        .max();
    match best {
        Some(j) if j == n => am,
        Some(j) => big_m + step * j as f64,
        None => big_m,
    }
}
