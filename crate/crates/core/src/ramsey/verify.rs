//! First-order-condition certificate for a candidate path.
//!
//! With `lambda_t = beta^t / c_t`, the multipliers on the credit constraint
//! and on `k >= 0` are `mu_{t+1} = lambda_t / R_{t+1} - lambda_{t+1}` and
//! `eta_t = lambda_t - A_{t+1} (lambda_{t+1} + gamma mu_{t+1})`. Both are
//! reported divided by `lambda_t`, which makes them unit-free:
//! `mu~ = 1 - R beta c_t / c_{t+1}` and
//! `eta~ = 1 - A (beta c_t / c_{t+1} + gamma mu~ / R)`.
//! Agent-level identities are scaled by the agent's own savings or net
//! worth, the bond market by gross bond volume, the capital market by
//! aggregate savings and output by itself, so one
//! tolerance serves every economy size.

use std::fmt;

use super::{DynamicEconomy, EquilibriumPath};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Check {
    /// `mu~ >= 0`.
    CreditMultiplier,
    /// `eta~ >= 0`.
    CapitalMultiplier,
    /// `mu~ (gamma A k - R b) = 0`.
    CreditSlackness,
    /// `eta~ k = 0`.
    CapitalSlackness,
    /// `R b <= gamma A k`.
    Collateral,
    /// `k >= 0`.
    NonNegativeCapital,
    /// `c + s = W`.
    Budget,
    /// `s = k - b`.
    Savings,
    /// `sum b = 0`.
    BondMarket,
    /// `sum k = sum s`.
    CapitalMarket,
    /// `Y_t = sum A_t k_{t-1}`.
    Output,
    /// `c > 0`.
    Consumption,
    /// `max_i beta_i^T s_{i,T} / c_{i,T}` above the caller's bound.
    Transversality,
    /// A path entry is NaN or infinite.
    NonFinite,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Check::CreditMultiplier => "credit multiplier negative",
            Check::CapitalMultiplier => "capital multiplier negative",
            Check::CreditSlackness => "credit slackness",
            Check::CapitalSlackness => "capital slackness",
            Check::Collateral => "borrowing above collateral",
            Check::NonNegativeCapital => "negative capital",
            Check::Budget => "budget",
            Check::Savings => "savings identity",
            Check::BondMarket => "bond market",
            Check::CapitalMarket => "capital market",
            Check::Output => "output identity",
            Check::Consumption => "non-positive consumption",
            Check::Transversality => "transversality proxy",
            Check::NonFinite => "non-finite value",
        };
        f.write_str(s)
    }
}

/// One violated check. `agent` is a position, `None` for market-wide checks.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub t: usize,
    pub agent: Option<usize>,
    pub check: Check,
    pub value: f64,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.agent {
            Some(i) => write!(f, "t = {}, agent {}: {} ({:e})", self.t, i + 1, self.check, self.value),
            None => write!(f, "t = {}: {} ({:e})", self.t, self.check, self.value),
        }
    }
}

/// Largest residual of each kind at one date (zero when not applicable).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PeriodResiduals {
    pub t: usize,
    /// Worst negative part of either normalized multiplier.
    pub multiplier_sign: f64,
    pub slackness: f64,
    pub collateral: f64,
    pub capital_sign: f64,
    pub budget: f64,
    pub savings: f64,
    pub bond_market: f64,
    pub capital_market: f64,
    pub output: f64,
}

impl PeriodResiduals {
    pub fn max(&self) -> f64 {
        [
            self.multiplier_sign,
            self.slackness,
            self.collateral,
            self.capital_sign,
            self.budget,
            self.savings,
            self.bond_market,
            self.capital_market,
            self.output,
        ]
        .into_iter()
        .fold(0.0, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    /// Dates `0..=T`.
    pub periods: Vec<PeriodResiduals>,
    pub max_residual: f64,
    pub tvc_proxy: f64,
    pub failures: Vec<Failure>,
    pub pass: bool,
}

/// Collects residuals for one date and records failures against `tol`.
struct Recorder<'a> {
    t: usize,
    tol: f64,
    failures: &'a mut Vec<Failure>,
}

impl Recorder<'_> {
    /// Record `value` (a non-negative residual) and return it.
    fn note(&mut self, slot: &mut f64, agent: Option<usize>, check: Check, value: f64) {
        if !(value <= self.tol) {
            let check = if value.is_nan() { Check::NonFinite } else { check };
            self.failures.push(Failure { t: self.t, agent, check, value });
        }
        if value.is_nan() || value > *slot {
            *slot = value;
        }
    }
}

/// Check `path` against the equilibrium conditions of `econ`.
///
/// `pass` requires every residual to be at most `tol` and the
/// transversality proxy to be at most `tvc_tol`.
pub fn verify_path(econ: &DynamicEconomy, path: &EquilibriumPath, tol: f64, tvc_tol: f64) -> VerificationReport {
    let m = econ.len();
    let horizon = path.horizon;
    let mut failures = Vec::new();
    let mut periods = Vec::with_capacity(horizon + 1);
    let shape_ok = path.r.len() == horizon
        && path.y.len() == horizon
        && [&path.k, &path.b, &path.c, &path.s]
            .iter()
            .all(|v| v.len() == m && v.iter().all(|x| x.len() == horizon + 1));
    if !shape_ok {
        failures.push(Failure { t: 0, agent: None, check: Check::NonFinite, value: f64::NAN });
        return VerificationReport {
            periods,
            max_residual: f64::NAN,
            tvc_proxy: f64::NAN,
            failures,
            pass: false,
        };
    }

    for t in 0..=horizon {
        let mut res = PeriodResiduals { t, ..Default::default() };
        let mut rec = Recorder { t, tol, failures: &mut failures };
        let sav: f64 = (0..m).map(|i| path.s[i][t]).sum();
        let worth: Vec<f64> = (0..m)
            .map(|i| {
                if t == 0 {
                    econ.agents[i].w0
                } else {
                    econ.agents[i].a.at(t) * path.k[i][t - 1] - path.rate(t) * path.b[i][t - 1]
                }
            })
            .collect();

        for i in 0..m {
            let (k, b, c, s) = (path.k[i][t], path.b[i][t], path.c[i][t], path.s[i][t]);
            if !(c > 0.0) {
                rec.failures.push(Failure { t, agent: Some(i), check: Check::Consumption, value: c });
            }
            // agent-level identities are scaled by the agent's own wealth
            let own = s.abs();
            rec.note(&mut res.capital_sign, Some(i), Check::NonNegativeCapital, (-k / own).max(0.0));
            rec.note(&mut res.budget, Some(i), Check::Budget, (c + s - worth[i]).abs() / worth[i].abs());
            rec.note(&mut res.savings, Some(i), Check::Savings, (s - (k - b)).abs() / own);

            if t == horizon {
                continue;
            }
            let ag = &econ.agents[i];
            let (r, a) = (path.rate(t + 1), ag.a.at(t + 1));
            let ratio = ag.beta * c / path.c[i][t + 1];
            let mu = 1.0 - r * ratio;
            let eta = 1.0 - a * (ratio + ag.gamma * mu / r);
            rec.note(&mut res.multiplier_sign, Some(i), Check::CreditMultiplier, (-mu).max(0.0));
            rec.note(&mut res.multiplier_sign, Some(i), Check::CapitalMultiplier, (-eta).max(0.0));
            let gap = ag.gamma * a * k - r * b;
            rec.note(&mut res.slackness, Some(i), Check::CreditSlackness, (mu * gap).abs() / (r * own));
            rec.note(&mut res.slackness, Some(i), Check::CapitalSlackness, (eta * k).abs() / own);
            rec.note(&mut res.collateral, Some(i), Check::Collateral, (-gap).max(0.0) / (r * own));
        }

        let bonds: f64 = (0..m).map(|i| path.b[i][t]).sum();
        let capital: f64 = (0..m).map(|i| path.k[i][t]).sum();
        let volume: f64 = (0..m).map(|i| path.b[i][t].abs()).sum();
        rec.note(&mut res.bond_market, None, Check::BondMarket, bonds.abs() / volume.max(f64::MIN_POSITIVE));
        rec.note(&mut res.capital_market, None, Check::CapitalMarket, (capital - sav).abs() / sav);
        if t >= 1 {
            let y = path.output(t);
            let produced: f64 = (0..m).map(|i| econ.agents[i].a.at(t) * path.k[i][t - 1]).sum();
            rec.note(&mut res.output, None, Check::Output, (y - produced).abs() / y.abs());
        }
        periods.push(res);
    }

    let max_residual = periods.iter().map(PeriodResiduals::max).fold(0.0, |a, b| {
        if b.is_nan() { f64::NAN } else { a.max(b) }
    });
    let (tvc_agent, tvc_proxy) = (0..m)
        .map(|i| {
            let ag = &econ.agents[i];
            (i, ag.beta.powi(horizon as i32) * path.s[i][horizon] / path.c[i][horizon])
        })
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 || x.1.is_nan() { x } else { acc });
    if !(tvc_proxy <= tvc_tol) {
        failures.push(Failure { t: horizon, agent: Some(tvc_agent), check: Check::Transversality, value: tvc_proxy });
    }
    let pass = failures.is_empty();
    VerificationReport { periods, max_residual, tvc_proxy, failures, pass }
}

/// Raw Lagrange multipliers implied by a path, indexed `[agent][t]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Multipliers {
    /// `lambda_t`, `t = 0..=T`.
    pub lambda: Vec<Vec<f64>>,
    /// `mu_{t+1}`, `t = 0..T`.
    pub mu: Vec<Vec<f64>>,
    /// `eta_t`, `t = 0..T`.
    pub eta: Vec<Vec<f64>>,
}

pub fn recover_multipliers(econ: &DynamicEconomy, path: &EquilibriumPath) -> Multipliers {
    let horizon = path.horizon;
    let mut out = Multipliers { lambda: Vec::new(), mu: Vec::new(), eta: Vec::new() };
    for (i, ag) in econ.agents.iter().enumerate() {
        let lambda: Vec<f64> = (0..=horizon).map(|t| ag.beta.powi(t as i32) / path.c[i][t]).collect();
        let mu: Vec<f64> = (0..horizon).map(|t| lambda[t] / path.rate(t + 1) - lambda[t + 1]).collect();
        let eta = (0..horizon)
            .map(|t| lambda[t] - ag.a.at(t + 1) * (lambda[t + 1] + ag.gamma * mu[t]))
            .collect();
        out.lambda.push(lambda);
        out.mu.push(mu);
        out.eta.push(eta);
    }
    out
}
