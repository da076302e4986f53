//! Infinite-horizon economies with log utility and linear technologies.
//!
//! With log utility every agent saves the fraction `beta_i` of its net worth
//! whatever the future rates are. Each date `t -> t+1` is therefore a static
//! linear economy with wealth `s_{i,t}` and productivities `A_{i,t+1}`, and
//! an equilibrium path is a sequence of such static equilibria. The
//! constructors here impose a rate pattern (for instance `R_t = A_h` at every
//! date), build the path it implies, and fail with the first date at which
//! the pattern stops being feasible.
//!
//! Dates count from 0 and agents are addressed by position, both from zero.
//! `R[t-1]` and `y[t-1]` hold `R_t` and `Y_t` for `t = 1..=T`.

use std::fmt;

use crate::econ::{Rule, StaticEconomy, Violation};
use crate::error::{Error, Result};

mod derivative;
mod engine;
mod verify;

pub use derivative::{dyt_dgamma_analytic, first_negative_tail};
pub use engine::{
    auto_construct, construct_path_ah, construct_path_frictionless, construct_path_interior_all,
    construct_path_interior_then_ah, construct_path_m1mh, AutoConstruction,
};
pub use verify::{recover_multipliers, verify_path, Check, Failure, Multipliers, PeriodResiduals, VerificationReport};

/// Productivities `A_{i,1}, A_{i,2}, ...`; the last entry repeats forever.
#[derive(Clone, Debug, PartialEq)]
pub enum ProductivityPath {
    Constant(f64),
    Path(Vec<f64>),
}

impl ProductivityPath {
    /// `A_{i,t}` for `t >= 1`.
    pub fn at(&self, t: usize) -> f64 {
        match self {
            ProductivityPath::Constant(a) => *a,
            ProductivityPath::Path(v) => v[t.saturating_sub(1).min(v.len() - 1)],
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            ProductivityPath::Constant(_) => true,
            ProductivityPath::Path(v) => v.windows(2).all(|w| w[0] == w[1]),
        }
    }

    fn explicit_len(&self) -> usize {
        match self {
            ProductivityPath::Constant(_) => 1,
            ProductivityPath::Path(v) => v.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicAgent {
    pub id: usize,
    pub beta: f64,
    pub gamma: f64,
    /// Initial wealth `w_{i,0}`.
    pub w0: f64,
    pub a: ProductivityPath,
}

impl DynamicAgent {
    pub fn new(id: usize, beta: f64, gamma: f64, w0: f64, a: ProductivityPath) -> Self {
        DynamicAgent { id, beta, gamma, w0, a }
    }

    /// Agent described by its initial savings `s_{i,0} = beta_i w_{i,0}`.
    pub fn with_s0(id: usize, beta: f64, gamma: f64, s0: f64, a: f64) -> Self {
        DynamicAgent { id, beta, gamma, w0: s0 / beta, a: ProductivityPath::Constant(a) }
    }

    pub fn s0(&self) -> f64 {
        self.beta * self.w0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicEconomy {
    pub agents: Vec<DynamicAgent>,
    pub horizon: usize,
}

impl DynamicEconomy {
    pub fn new(agents: Vec<DynamicAgent>, horizon: usize) -> Self {
        DynamicEconomy { agents, horizon }
    }

    /// Stationary economy from parallel slices; ids count from 1.
    pub fn stationary(beta: &[f64], gamma: &[f64], s0: &[f64], a: &[f64], horizon: usize) -> Self {
        let m = beta.len();
        assert!(gamma.len() == m && s0.len() == m && a.len() == m, "slice lengths differ");
        let agents = (0..m)
            .map(|i| DynamicAgent::with_s0(i + 1, beta[i], gamma[i], s0[i], a[i]))
            .collect();
        DynamicEconomy { agents, horizon }
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn with_horizon(&self, horizon: usize) -> Self {
        DynamicEconomy { horizon, ..self.clone() }
    }

    pub fn s0(&self) -> Vec<f64> {
        self.agents.iter().map(DynamicAgent::s0).collect()
    }

    pub fn is_stationary(&self) -> bool {
        self.agents.iter().all(|a| a.a.is_constant())
    }

    /// `A_{i,t}` for every agent.
    pub fn tfps_at(&self, t: usize) -> Vec<f64> {
        self.agents.iter().map(|a| a.a.at(t)).collect()
    }

    /// The static economy deciding the transition `t -> t+1` when agents
    /// hold savings `s`.
    pub fn static_at(&self, t: usize, s: &[f64]) -> StaticEconomy {
        let a = self.tfps_at(t + 1);
        let gamma: Vec<f64> = self.agents.iter().map(|a| a.gamma).collect();
        let mut econ = StaticEconomy::linear(&a, &gamma, s);
        for (st, ag) in econ.agents.iter_mut().zip(&self.agents) {
            st.id = ag.id;
        }
        econ
    }

    /// Copy with one agent's credit limit replaced.
    pub fn with_gamma(&self, pos: usize, gamma: f64) -> Self {
        let mut out = self.clone();
        out.agents[pos].gamma = gamma;
        out
    }

    /// Copy with one agent's productivity replaced by a constant.
    pub fn with_tfp(&self, pos: usize, a: f64) -> Self {
        let mut out = self.clone();
        out.agents[pos].a = ProductivityPath::Constant(a);
        out
    }
}

/// Check parameter ranges and, for every date up to `T + 1`,
/// `max_i gamma_i A_{i,t} < A_{1,t} < ... < A_{m,t}`.
pub fn validate_dynamic(econ: &DynamicEconomy) -> Vec<Violation> {
    let mut out = Vec::new();
    if econ.agents.is_empty() {
        out.push(Violation::new(None, Rule::Empty, ""));
        return out;
    }
    if econ.horizon == 0 {
        out.push(Violation::new(None, Rule::EmptyHorizon, ""));
    }
    for (i, ag) in econ.agents.iter().enumerate() {
        let id = Some(ag.id);
        if econ.agents[..i].iter().any(|o| o.id == ag.id) {
            out.push(Violation::new(id, Rule::DuplicateId, ""));
        }
        let tfps: Vec<f64> = match &ag.a {
            ProductivityPath::Constant(a) => vec![*a],
            ProductivityPath::Path(v) => v.clone(),
        };
        if tfps.is_empty() {
            out.push(Violation::new(id, Rule::TfpNonPositive, "empty productivity path"));
            return out;
        }
        if !(ag.beta.is_finite() && ag.gamma.is_finite() && ag.w0.is_finite())
            || tfps.iter().any(|a| !a.is_finite())
        {
            out.push(Violation::new(id, Rule::NonFinite, ""));
            continue;
        }
        if !(ag.beta > 0.0 && ag.beta < 1.0) {
            out.push(Violation::new(id, Rule::BetaRange, format!("beta = {}", ag.beta)));
        }
        if !(ag.gamma > 0.0 && ag.gamma < 1.0) {
            out.push(Violation::new(id, Rule::GammaRange, format!("gamma = {}", ag.gamma)));
        }
        if ag.w0 <= 0.0 {
            out.push(Violation::new(id, Rule::WealthNonPositive, format!("w0 = {}", ag.w0)));
        }
        if tfps.iter().any(|&a| a <= 0.0) {
            out.push(Violation::new(id, Rule::TfpNonPositive, ""));
        }
    }
    if !out.is_empty() {
        return out;
    }
    let last = econ.agents.iter().map(|a| a.a.explicit_len()).max().unwrap_or(1);
    for t in 1..=(econ.horizon + 1).max(last) {
        let a = econ.tfps_at(t);
        for (w, ag) in a.windows(2).zip(&econ.agents[1..]) {
            if w[1] <= w[0] {
                out.push(Violation::new(
                    Some(ag.id),
                    Rule::NonStrictOrdering,
                    format!("t = {t}: A = {} follows A = {}", w[1], w[0]),
                ));
            }
        }
        let top = econ.agents.iter().zip(&a).map(|(g, x)| g.gamma * x).fold(0.0, f64::max);
        if top >= a[0] {
            out.push(Violation::new(None, Rule::CollateralAboveTfp, format!("t = {t}")));
        }
        if !out.is_empty() {
            break;
        }
    }
    out
}

pub(crate) fn ensure_dynamic(econ: &DynamicEconomy) -> Result<()> {
    let v = validate_dynamic(econ);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(v))
    }
}

/// Rate pattern a path was built under. Positions count from zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    /// `R_t = A_m` with agent `m` unconstrained: the frictionless path.
    Frictionless,
    /// `R_t = A_h` at every date.
    AtTfp { h: usize },
    /// `R_1` strictly between `A_{n-1}` and `A_n` (agents `n..` borrow at
    /// date 0), then `R_t = A_h` with `n <= h`.
    InteriorThenAtTfp { n: usize, h: usize },
    /// Only the top agent borrows at date 0, then `R_t = A_h` with `h` below
    /// the second most productive agent's position.
    TopThenAtTfp { h: usize },
    /// Only the top agent borrows, at every date.
    InteriorAll,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::Frictionless => f.write_str("frictionless: R_t = A_m"),
            Hypothesis::AtTfp { h } => write!(f, "R_t = A_{}", h + 1),
            Hypothesis::InteriorThenAtTfp { n, h } => {
                write!(f, "R_1 in (A_{}, A_{}), R_t = A_{}", n, n + 1, h + 1)
            }
            Hypothesis::TopThenAtTfp { h } => write!(f, "R_1 in (A_m-1, A_m), R_t = A_{}", h + 1),
            Hypothesis::InteriorAll => f.write_str("R_t in (A_m-1, A_m) for all t"),
        }
    }
}

/// Equilibrium sequences. Per-agent vectors are indexed `[agent][t]` for
/// `t = 0..=T`; `r` and `y` hold dates `1..=T`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumPath {
    pub horizon: usize,
    pub r: Vec<f64>,
    pub k: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    pub s: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub hypothesis: Hypothesis,
}

impl EquilibriumPath {
    /// `R_t`, `t >= 1`.
    pub fn rate(&self, t: usize) -> f64 {
        self.r[t - 1]
    }

    /// `Y_t`, `t >= 1`.
    pub fn output(&self, t: usize) -> f64 {
        self.y[t - 1]
    }

    /// `G_t = Y_t / Y_{t-1}`, `t >= 2`.
    pub fn growth(&self, t: usize) -> f64 {
        self.y[t - 1] / self.y[t - 2]
    }
}

/// `1 / max_i beta_i`.
pub fn steady_state_rate(econ: &DynamicEconomy) -> f64 {
    1.0 / econ.agents.iter().map(|a| a.beta).fold(0.0, f64::max)
}

/// Output and growth without credit constraints.
#[derive(Clone, Debug, PartialEq)]
pub struct FrictionlessPath {
    /// `Y*_t` for `t = 1..=T`.
    pub y: Vec<f64>,
    /// `G*_t = Y*_t / Y*_{t-1}` for `t = 2..=T`.
    pub g: Vec<f64>,
}

/// `Y*_t = A_{m,t} ... A_{m,1} sum_i beta_i^(t-1) s_{i,0}`.
///
/// ```
/// use credeq::ramsey::{frictionless_path, DynamicEconomy};
///
/// let econ = DynamicEconomy::stationary(&[0.5], &[0.3], &[0.5], &[2.0], 5);
/// let fp = frictionless_path(&econ);
/// assert!(fp.y.iter().all(|y| (y - 1.0).abs() < 1e-12));
/// ```
pub fn frictionless_path(econ: &DynamicEconomy) -> FrictionlessPath {
    let top = econ.len() - 1;
    let s0 = econ.s0();
    let mut scale = 1.0;
    let y: Vec<f64> = (1..=econ.horizon)
        .map(|t| {
            scale *= econ.agents[top].a.at(t);
            let mass: f64 = econ.agents.iter().zip(&s0).map(|(a, s)| a.beta.powi(t as i32 - 1) * s).sum();
            scale * mass
        })
        .collect();
    let g = y.windows(2).map(|w| w[1] / w[0]).collect();
    FrictionlessPath { y, g }
}

/// Outcome of [`check_conditions_ah`].
#[derive(Clone, Debug, PartialEq)]
pub struct AhCheck {
    /// Every date up to `T` passes and the dominance comparison (when
    /// evaluated) holds.
    pub holds: bool,
    /// First date `t` at which the double inequality fails.
    pub first_failure: Option<usize>,
    /// Stationary economies only: `beta_h = max_{i<=h} beta_i` exceeds
    /// `max_{j>h} beta_j (1-gamma_j) A_j / (A_h - gamma_j A_j)`, which makes
    /// the inequality hold at every date beyond `T` as well.
    pub dominance: Option<bool>,
}

/// `rhs(t)` of the `R_t = A_h` existence condition: agent `h`'s capital at
/// date `t`, scaled by `A_{h,t} ... A_{h,1}`.
pub fn ah_capital_term(econ: &DynamicEconomy, h: usize, t: usize) -> f64 {
    let s0 = econ.s0();
    let mut total: f64 = (0..=h).map(|i| econ.agents[i].beta.powi(t as i32) * s0[i]).sum();
    for j in h + 1..econ.len() {
        let ag = &econ.agents[j];
        let (ah1, aj1) = (econ.agents[h].a.at(t + 1), ag.a.at(t + 1));
        let mut term = ag.beta.powi(t as i32) * ag.gamma * aj1 / (ah1 - ag.gamma * aj1) * s0[j];
        for tau in 1..=t {
            let (ah, aj) = (econ.agents[h].a.at(tau), ag.a.at(tau));
            term *= (1.0 - ag.gamma) * aj / (ah - ag.gamma * aj);
        }
        total -= term;
    }
    total
}

/// Transformed growth base `beta_j (1-gamma_j) A_j / (A_h - gamma_j A_j)`
/// of a borrower `j > h` when `R = A_h` (stationary productivities).
pub fn borrower_base(econ: &DynamicEconomy, h: usize, j: usize) -> f64 {
    let ag = &econ.agents[j];
    let (ah, aj) = (econ.agents[h].a.at(1), ag.a.at(1));
    ag.beta * (1.0 - ag.gamma) * aj / (ah - ag.gamma * aj)
}

/// Evaluate, for `t = 0..=T`,
/// `beta_h^t s_{h,0} / (1 - gamma_h) >= rhs(t) > 0`
/// and, for stationary economies, the dominance comparison that carries the
/// inequality past the horizon.
pub fn check_conditions_ah(econ: &DynamicEconomy, h: usize, horizon: usize) -> Result<AhCheck> {
    ensure_dynamic(econ)?;
    if h >= econ.len() {
        return Err(Error::InvalidPerturbation(format!("no agent at position {h}")));
    }
    let ag = &econ.agents[h];
    let sh0 = ag.s0();
    let first_failure = (0..=horizon).find(|&t| {
        let rhs = ah_capital_term(econ, h, t);
        let lhs = ag.beta.powi(t as i32) * sh0 / (1.0 - ag.gamma);
        !(lhs >= rhs && rhs > 0.0)
    });
    let dominance = econ.is_stationary().then(|| {
        let top_below = econ.agents[..=h].iter().map(|a| a.beta).fold(0.0, f64::max);
        let top_above = (h + 1..econ.len()).map(|j| borrower_base(econ, h, j)).fold(0.0, f64::max);
        ag.beta == top_below && ag.beta > top_above
    });
    Ok(AhCheck {
        holds: first_failure.is_none() && dominance.unwrap_or(true),
        first_failure,
        dominance,
    })
}

/// Date-0 bracket for `R_1` strictly between `A_{n-1}` and `A_n`: lenders'
/// savings lie strictly between the borrowers' collateral demand evaluated
/// at `A_n` and at `A_{n-1}`.
pub fn interior_bracket_holds(econ: &DynamicEconomy, n: usize) -> bool {
    if n == 0 || n >= econ.len() {
        return false;
    }
    let s0 = econ.s0();
    let lenders: f64 = s0[..n].iter().sum();
    let demand = |rate: f64| -> f64 {
        (n..econ.len())
            .map(|j| {
                let c = econ.agents[j].gamma * econ.agents[j].a.at(1);
                c * s0[j] / (rate - c)
            })
            .sum()
    };
    let (lo, hi) = (econ.agents[n - 1].a.at(1), econ.agents[n].a.at(1));
    demand(hi) < lenders && lenders < demand(lo)
}

/// Dominance comparison for `R_t = A_h` from date 2 on: `beta_h` is the
/// largest discount factor up to `h` and exceeds every borrower base above `h`.
pub fn tail_dominance(econ: &DynamicEconomy, h: usize) -> bool {
    let bh = econ.agents[h].beta;
    let below = econ.agents[..h].iter().map(|a| a.beta).fold(0.0, f64::max);
    let above = (h + 1..econ.len()).map(|j| borrower_base(econ, h, j)).fold(0.0, f64::max);
    bh >= below && bh > above
}

/// Closed-form `Y_t` under `R_t = A_{h,t}`:
/// `prod A_h [sum_{i<=h} beta_i^(t-1) s_{i,0} + sum_{j>h} beta_j^(t-1) (1-gamma_j)^t prod_tau A_{j,tau}/(A_{h,tau} - gamma_j A_{j,tau}) s_{j,0}]`.
pub fn ah_output(econ: &DynamicEconomy, h: usize, t: usize) -> f64 {
    let s0 = econ.s0();
    let scale: f64 = (1..=t).map(|tau| econ.agents[h].a.at(tau)).product();
    let p = t as i32 - 1;
    let mut inner: f64 = (0..=h).map(|i| econ.agents[i].beta.powi(p) * s0[i]).sum();
    for j in h + 1..econ.len() {
        let ag = &econ.agents[j];
        let mut term = ag.beta.powi(p) * (1.0 - ag.gamma).powi(t as i32) * s0[j];
        for tau in 1..=t {
            let (ah, aj) = (econ.agents[h].a.at(tau), ag.a.at(tau));
            term *= aj / (ah - ag.gamma * aj);
        }
        inner += term;
    }
    scale * inner
}

/// Closed-form `Y_t` for stationary two-stage paths: agents `n..` borrow at
/// date 0 at rate `r1`, then `R_t = A_h`. With `W_{i,1}` the date-1 net
/// worth (`R_1 s_{i,0}` for lenders, `(1-gamma_i) A_i R_1 s_{i,0}/(R_1 - gamma_i A_i)`
/// for borrowers),
/// `Y_{t+1} = A_h^t [sum_{i<=h} beta_i^t W_{i,1} + sum_{j>h} x_j^t W_{j,1}]`
/// where `x_j` is [`borrower_base`].
pub fn two_stage_output(econ: &DynamicEconomy, n: usize, h: usize, r1: f64, t: usize) -> f64 {
    let s0 = econ.s0();
    let ag = &econ.agents;
    if t == 1 {
        return (n..ag.len())
            .map(|j| {
                let (a, c) = (ag[j].a.at(1), ag[j].gamma * ag[j].a.at(1));
                a * r1 * s0[j] / (r1 - c)
            })
            .sum();
    }
    let w1 = |i: usize| {
        if i < n {
            r1 * s0[i]
        } else {
            let a = ag[i].a.at(1);
            (1.0 - ag[i].gamma) * a * r1 * s0[i] / (r1 - ag[i].gamma * a)
        }
    };
    let p = t as i32 - 1;
    let inner: f64 = (0..ag.len())
        .map(|i| {
            let base = if i <= h { ag[i].beta } else { borrower_base(econ, h, i) };
            base.powi(p) * w1(i)
        })
        .sum();
    ag[h].a.at(1).powi(p) * inner
}

/// Closed-form `Y_t` when only the top agent borrows at date 0 and then
/// produces alone at its own TFP:
/// `Y_t = S_0 A_m^t (gamma_m sum_{i != m} beta_i^(t-1) s_{i,0} / sum_{j != m} s_{j,0} + beta_m^(t-1) (1 - gamma_m))`.
pub fn top_alone_output(econ: &DynamicEconomy, t: usize) -> f64 {
    let s0 = econ.s0();
    let m = econ.len() - 1;
    let top = &econ.agents[m];
    let total: f64 = s0.iter().sum();
    let others: f64 = s0[..m].iter().sum();
    let p = t as i32 - 1;
    let weighted: f64 = (0..m).map(|i| econ.agents[i].beta.powi(p) * s0[i]).sum();
    total
        * top.a.at(1).powi(t as i32)
        * (top.gamma * weighted / others + top.beta.powi(p) * (1.0 - top.gamma))
}

/// `R_1 = gamma_m A_m S_0 / sum_{i != m} s_{i,0}` when only the top agent borrows.
pub fn top_borrower_rate(econ: &DynamicEconomy) -> f64 {
    let s0 = econ.s0();
    let m = econ.len() - 1;
    let total: f64 = s0.iter().sum();
    econ.agents[m].gamma * econ.agents[m].a.at(1) * total / (total - s0[m])
}

/// Closed-form `R_{t+1}` on a path where only the top agent ever borrows:
/// `A_m (gamma_m + (1-gamma_m) beta_m sum_{i<m} beta_i^(t-1) s_{i,0} / sum_{i<m} beta_i^t s_{i,0})`
/// for `t >= 1`; `t = 0` gives [`top_borrower_rate`].
pub fn interior_all_rate(econ: &DynamicEconomy, t: usize) -> f64 {
    if t == 0 {
        return top_borrower_rate(econ);
    }
    let s0 = econ.s0();
    let m = econ.len() - 1;
    let top = &econ.agents[m];
    let sum = |p: i32| (0..m).map(|i| econ.agents[i].beta.powi(p) * s0[i]).sum::<f64>();
    top.a.at(1) * (top.gamma + (1.0 - top.gamma) * top.beta * sum(t as i32 - 1) / sum(t as i32))
}

/// `A_m (gamma_m + beta_m (1 - gamma_m) / max_{i<m} beta_i)`, the limit of
/// [`interior_all_rate`].
pub fn interior_all_rate_limit(econ: &DynamicEconomy) -> f64 {
    let m = econ.len() - 1;
    let top = &econ.agents[m];
    let b0 = econ.agents[..m].iter().map(|a| a.beta).fold(0.0, f64::max);
    top.a.at(1) * (top.gamma + top.beta * (1.0 - top.gamma) / b0)
}
