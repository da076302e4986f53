//! Equilibria for strictly concave technologies `F_i(k) = A_i f_i(k)`.
//!
//! Each agent has a threshold rate `R_i`: at or below it the credit
//! constraint binds and capital is `k^b`, above it capital is the unconstrained
//! `k^n`. Aggregate demand is continuous and strictly decreasing in `R`, so
//! the equilibrium is found by bisection.

use crate::econ::{
    aggregate_output, ensure_valid, AgentAllocation, RegimeLabel, StaticAgent, StaticEconomy,
    StaticEquilibrium, Technology, Tolerances,
};
use crate::error::{Error, Result};
use crate::roots::{bisect, Stop};

const GROW_LIMIT: usize = 2000;

fn require_concave(tech: &Technology) -> Result<()> {
    if tech.is_linear() {
        Err(Error::RegimeMismatch {
            expected: "concave technology".into(),
            found: "linear technology".into(),
        })
    } else {
        Ok(())
    }
}

/// Unconstrained capital: the `k` with `A f'(k) = R`.
///
/// ```
/// use credeq::concave::kn;
/// use credeq::econ::Technology;
///
/// let k = kn(&Technology::cobb_douglas(1.0, 0.5), 0.5).unwrap();
/// assert!((k - 1.0).abs() < 1e-12);
/// ```
pub fn kn(tech: &Technology, r: f64) -> Result<f64> {
    require_concave(tech)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Insolvable(format!("rate must be positive, got {r}")));
    }
    let g = |k: f64| tech.marginal(k) - r;
    let (mut lo, mut hi) = (1.0, 1.0);
    let mut steps = 0;
    while g(lo) <= 0.0 {
        lo *= 0.5;
        steps += 1;
        if steps > GROW_LIMIT || lo == 0.0 {
            return Err(Error::Bracket(format!("marginal product never reaches R = {r}")));
        }
    }
    while g(hi) >= 0.0 {
        hi *= 2.0;
        steps += 1;
        if steps > GROW_LIMIT || !hi.is_finite() {
            return Err(Error::Bracket(format!("marginal product stays above R = {r}")));
        }
    }
    bisect(g, lo, hi, Stop::Machine, Tolerances::DEFAULT.max_iter, true)
}

/// Capital when the constraint binds: the `k > S` with `R (k - S) = gamma A f(k)`.
///
/// ```
/// use credeq::concave::kb;
/// use credeq::econ::Technology;
///
/// // k - 1 = sqrt(k) / 4, a quadratic in sqrt(k)
/// let k = kb(&Technology::cobb_douglas(1.0, 0.5), 0.25, 1.0, 1.0).unwrap();
/// let root = (0.25 + 4.0625f64.sqrt()) / 2.0;
/// assert!((k - root * root).abs() < 1e-12);
/// ```
pub fn kb(tech: &Technology, gamma: f64, s: f64, r: f64) -> Result<f64> {
    if !(r > 0.0 && s > 0.0) {
        return Err(Error::Insolvable(format!("need R > 0 and S > 0, got R = {r}, S = {s}")));
    }
    if gamma >= tech.elasticity_limit() {
        return Err(Error::Insolvable(format!(
            "gamma = {gamma} is not below the output elasticity limit {}",
            tech.elasticity_limit()
        )));
    }
    let g = |k: f64| r * (k - s) - gamma * tech.output(k);
    let lo = s;
    let mut hi = 2.0 * s;
    let mut steps = 0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
        steps += 1;
        if steps > GROW_LIMIT || !hi.is_finite() {
            return Err(Error::Bracket("collateral value outgrows repayment".into()));
        }
    }
    bisect(g, lo, hi, Stop::Machine, Tolerances::DEFAULT.max_iter, true)
}

/// `H(R) = R (k^n(R) - S) / (A f(k^n(R)))`, strictly decreasing in `R`.
/// The constraint binds exactly when `H(R) >= gamma`.
pub fn h_ratio(tech: &Technology, s: f64, r: f64) -> Result<f64> {
    let k = kn(tech, r)?;
    Ok(r * (k - s) / tech.output(k))
}

/// Rate at or below which an agent's constraint binds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Threshold {
    At(f64),
    /// `gamma` is at least the limiting output elasticity.
    NeverBinding,
}

impl Threshold {
    pub fn value(&self) -> Option<f64> {
        match self {
            Threshold::At(r) => Some(*r),
            Threshold::NeverBinding => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BindingThreshold {
    pub id: usize,
    pub threshold: Threshold,
}

/// Root of `H(R) = gamma` on `(0, A f'(S))`.
///
/// ```
/// use credeq::concave::{threshold_ri, Threshold};
/// use credeq::econ::{StaticAgent, Technology};
///
/// let agent = StaticAgent::new(1, Technology::cobb_douglas(1.0, 0.5), 0.25, 1.0);
/// let Threshold::At(r) = threshold_ri(&agent).unwrap().threshold else { panic!() };
/// assert!((r - 0.5 * 0.5f64.sqrt()).abs() < 1e-12);
/// ```
pub fn threshold_ri(agent: &StaticAgent) -> Result<BindingThreshold> {
    require_concave(&agent.tech)?;
    let id = agent.id;
    if agent.gamma >= agent.tech.elasticity_limit() {
        return Ok(BindingThreshold { id, threshold: Threshold::NeverBinding });
    }
    let hi = agent.tech.marginal(agent.s);
    let g = |r: f64| h_ratio(&agent.tech, agent.s, r).map_or(f64::NAN, |h| h - agent.gamma);
    let mut lo = 0.5 * hi;
    let mut steps = 0;
    while g(lo) <= 0.0 {
        lo *= 0.5;
        steps += 1;
        if steps > GROW_LIMIT || lo == 0.0 {
            return Err(Error::Bracket(format!("H never reaches gamma for agent {id}")));
        }
    }
    let r = bisect(g, lo, hi, Stop::Machine, Tolerances::DEFAULT.max_iter, true)?;
    Ok(BindingThreshold { id, threshold: Threshold::At(r) })
}

/// Optimal choice of one concave producer at rate `R`.
pub fn individual_choice_concave(agent: &StaticAgent, r: f64) -> Result<AgentAllocation> {
    let k_free = kn(&agent.tech, r)?;
    let h = r * (k_free - agent.s) / agent.tech.output(k_free);
    let binding = h >= agent.gamma;
    let k = if binding { kb(&agent.tech, agent.gamma, agent.s, r)? } else { k_free };
    let b = k - agent.s;
    Ok(AgentAllocation {
        id: agent.id,
        k,
        b,
        binding,
        profit: agent.tech.output(k) - r * b,
    })
}

fn demand(econ: &StaticEconomy, r: f64) -> Result<f64> {
    econ.agents
        .iter()
        .map(|a| individual_choice_concave(a, r).map(|al| al.k))
        .sum()
}

fn ensure_concave(econ: &StaticEconomy) -> Result<()> {
    ensure_valid(econ)?;
    econ.agents.iter().try_for_each(|a| require_concave(&a.tech))
}

/// Bracket `[lo, hi]` with `D(lo) > S > D(hi)`, growing from `start`.
fn bracket<D: FnMut(f64) -> Result<f64>>(mut d: D, s: f64, start: f64) -> Result<(f64, f64)> {
    let mut lo = start;
    let mut steps = 0;
    while d(lo)? <= s {
        lo *= 0.5;
        steps += 1;
        if steps > GROW_LIMIT || lo == 0.0 {
            return Err(Error::Bracket("capital demand never exceeds supply".into()));
        }
    }
    let mut hi = 2.0 * lo;
    while d(hi)? >= s {
        hi *= 2.0;
        steps += 1;
        if steps > GROW_LIMIT || !hi.is_finite() {
            return Err(Error::Bracket("capital demand never falls below supply".into()));
        }
    }
    Ok((lo, hi))
}

/// Bisection on `D(R) = sum_i k_i(R) = S`, remembering the first error a
/// demand evaluation raises.
fn clear_market<D: Fn(f64) -> Result<f64>>(d: D, s: f64, start: f64, tol: &Tolerances) -> Result<f64> {
    let (lo, hi) = bracket(&d, s, start)?;
    let mut failure = None;
    let r = bisect(
        |r| match d(r) {
            Ok(v) => v - s,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        Stop::Width(tol.root_rel),
        tol.max_iter,
        true,
    );
    match failure {
        Some(e) => Err(e),
        None => r,
    }
}

/// Solve a concave economy.
///
/// ```
/// use credeq::concave::solve_equilibrium_concave;
/// use credeq::econ::{StaticAgent, StaticEconomy, Technology};
///
/// let econ = StaticEconomy::new(vec![
///     StaticAgent::new(1, Technology::cobb_douglas(0.05, 0.5), 0.2, 1.0),
///     StaticAgent::new(2, Technology::cobb_douglas(2.0, 0.5), 0.2, 1.0),
/// ]);
/// let eq = solve_equilibrium_concave(&econ).unwrap();
/// assert!(eq.allocations[1].binding);
/// assert!(eq.net_assets().abs() < 1e-9);
/// ```
pub fn solve_equilibrium_concave(econ: &StaticEconomy) -> Result<StaticEquilibrium> {
    ensure_concave(econ)?;
    let tol = Tolerances::DEFAULT;
    let s = econ.total_wealth();
    let floor = econ
        .agents
        .iter()
        .map(|a| a.gamma * a.tech.marginal(s))
        .fold(f64::MIN_POSITIVE, f64::max)
        * (1.0 - 1e-9);
    let r = clear_market(|r| demand(econ, r), s, floor, &tol)?;

    let allocations = econ
        .agents
        .iter()
        .map(|a| individual_choice_concave(a, r))
        .collect::<Result<Vec<_>>>()?;
    let thresholds = econ
        .agents
        .iter()
        .map(|a| threshold_ri(a).map(|t| t.threshold))
        .collect::<Result<Vec<_>>>()?;
    let regime = label(&thresholds, r);
    let y = aggregate_output(econ, &allocations)?;
    Ok(StaticEquilibrium { r, allocations, regime, y })
}

fn label(thresholds: &[Threshold], r: f64) -> RegimeLabel {
    let finite: Vec<f64> = thresholds.iter().filter_map(Threshold::value).collect();
    if finite.iter().all(|&ri| r > ri) {
        return RegimeLabel::FrictionlessConcave;
    }
    let as_rate: Vec<f64> = thresholds.iter().map(|t| t.value().unwrap_or(0.0)).collect();
    if as_rate.windows(2).all(|w| w[0] < w[1]) {
        let slack = as_rate.iter().filter(|&&ri| ri < r).count();
        RegimeLabel::Interior(slack.saturating_sub(1))
    } else {
        RegimeLabel::UnorderedThresholds
    }
}

/// Output-maximising allocation without credit constraints.
#[derive(Clone, Debug, PartialEq)]
pub struct FrictionlessEquilibrium {
    pub r: f64,
    /// Capital per agent, in the economy's order.
    pub k: Vec<f64>,
    pub y: f64,
}

/// Equalise marginal products: bisection on `sum_i k^n_i(R) = S`.
pub fn frictionless_concave(econ: &StaticEconomy) -> Result<FrictionlessEquilibrium> {
    ensure_concave(econ)?;
    let tol = Tolerances::DEFAULT;
    let s = econ.total_wealth();
    let free = |r: f64| econ.agents.iter().map(|a| kn(&a.tech, r)).sum::<Result<f64>>();
    let start = econ
        .agents
        .iter()
        .map(|a| a.tech.marginal(s))
        .fold(f64::MIN_POSITIVE, f64::max);
    let r = clear_market(free, s, start, &tol)?;
    let k = econ
        .agents
        .iter()
        .map(|a| kn(&a.tech, r))
        .collect::<Result<Vec<_>>>()?;
    let y = econ.agents.iter().zip(&k).map(|(a, &ki)| a.tech.output(ki)).sum();
    Ok(FrictionlessEquilibrium { r, k, y })
}

/// Closed forms for `f(k) = k^alpha`.
pub mod cobb_douglas {
    use super::Threshold;

    /// `k^n = (alpha A / R)^(1 / (1 - alpha))`.
    pub fn kn(a: f64, alpha: f64, r: f64) -> f64 {
        (alpha * a / r).powf(1.0 / (1.0 - alpha))
    }

    /// `R_i = alpha A S^(alpha - 1) (1 - gamma / alpha)^(1 - alpha)` when
    /// `gamma < alpha`.
    pub fn threshold(a: f64, alpha: f64, gamma: f64, s: f64) -> Threshold {
        if gamma >= alpha {
            Threshold::NeverBinding
        } else {
            Threshold::At(alpha * a * s.powf(alpha - 1.0) * (1.0 - gamma / alpha).powf(1.0 - alpha))
        }
    }
}
