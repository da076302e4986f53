//! Domain types shared by every solver, plus validation and aggregate accounting.
//!
//! Agents are addressed two ways: by `id` (a caller-chosen label that shows
//! up in diagnostics and output files) and by position in
//! [`StaticEconomy::agents`]. Regime labels and parameter references use
//! positions, counted from zero.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A real function of one nonnegative real, shared between threads.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Numerical tolerances used by the solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute tolerance on market clearing and feasibility.
    pub market_abs: f64,
    /// Relative bracket width at which bisection declares convergence.
    pub root_rel: f64,
    /// Iteration cap for every bisection.
    pub max_iter: usize,
    /// Number of log-spaced points used to check custom technologies.
    pub sample_points: usize,
    pub sample_lo: f64,
    pub sample_hi: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        market_abs: 1e-9,
        root_rel: 1e-12,
        max_iter: 200,
        sample_points: 64,
        sample_lo: 1e-6,
        sample_hi: 1e6,
    };

    /// The log-spaced grid on which custom technologies are checked.
    pub fn sample_grid(&self) -> Vec<f64> {
        let n = self.sample_points.max(2);
        let (lo, hi) = (self.sample_lo.ln(), self.sample_hi.ln());
        (0..n)
            .map(|j| (lo + (hi - lo) * j as f64 / (n - 1) as f64).exp())
            .collect()
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// A user-supplied concave base technology `f` with its derivative.
#[derive(Clone)]
pub struct CustomConcave {
    pub a: f64,
    pub f: ScalarFn,
    pub f_prime: ScalarFn,
}

impl fmt::Debug for CustomConcave {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomConcave").field("a", &self.a).finish_non_exhaustive()
    }
}

/// Production technology `F(k) = A f(k)`.
#[derive(Clone, Debug)]
pub enum Technology {
    Linear { a: f64 },
    CobbDouglas { a: f64, alpha: f64 },
    Custom(CustomConcave),
}

impl Technology {
    pub fn linear(a: f64) -> Self {
        Technology::Linear { a }
    }

    pub fn cobb_douglas(a: f64, alpha: f64) -> Self {
        Technology::CobbDouglas { a, alpha }
    }

    pub fn custom<F, G>(a: f64, f: F, f_prime: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Technology::Custom(CustomConcave {
            a,
            f: Arc::new(f),
            f_prime: Arc::new(f_prime),
        })
    }

    /// The TFP scale `A`.
    pub fn a(&self) -> f64 {
        match self {
            Technology::Linear { a } | Technology::CobbDouglas { a, .. } => *a,
            Technology::Custom(c) => c.a,
        }
    }

    /// Same shape, different TFP scale.
    pub fn with_a(&self, a: f64) -> Self {
        match self {
            Technology::Linear { .. } => Technology::Linear { a },
            Technology::CobbDouglas { alpha, .. } => Technology::CobbDouglas { a, alpha: *alpha },
            Technology::Custom(c) => Technology::Custom(CustomConcave { a, ..c.clone() }),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, Technology::Linear { .. })
    }

    /// Base technology `f(k)`.
    pub fn base(&self, k: f64) -> f64 {
        match self {
            Technology::Linear { .. } => k,
            Technology::CobbDouglas { alpha, .. } => k.powf(*alpha),
            Technology::Custom(c) => (c.f)(k),
        }
    }

    /// Derivative `f'(k)` of the base technology.
    pub fn base_prime(&self, k: f64) -> f64 {
        match self {
            Technology::Linear { .. } => 1.0,
            Technology::CobbDouglas { alpha, .. } => alpha * k.powf(alpha - 1.0),
            Technology::Custom(c) => (c.f_prime)(k),
        }
    }

    /// `F(k) = A f(k)`.
    pub fn output(&self, k: f64) -> f64 {
        self.a() * self.base(k)
    }

    /// `F'(k) = A f'(k)`.
    pub fn marginal(&self, k: f64) -> f64 {
        self.a() * self.base_prime(k)
    }

    /// `lim k f'(k) / f(k)` as `k` grows. Credit limits at or above this value
    /// never bind. For custom technologies the elasticity is nondecreasing, so
    /// its value at the top of the sampling grid is used.
    pub fn elasticity_limit(&self) -> f64 {
        match self {
            Technology::Linear { .. } => 1.0,
            Technology::CobbDouglas { alpha, .. } => *alpha,
            Technology::Custom(c) => {
                let k = Tolerances::DEFAULT.sample_hi;
                k * (c.f_prime)(k) / (c.f)(k)
            }
        }
    }
}

/// One producer in the two-period economy.
#[derive(Clone, Debug)]
pub struct StaticAgent {
    pub id: usize,
    pub tech: Technology,
    /// Credit limit: repayment may not exceed `gamma * F(k)`.
    pub gamma: f64,
    /// Initial wealth.
    pub s: f64,
}

impl StaticAgent {
    pub fn new(id: usize, tech: Technology, gamma: f64, s: f64) -> Self {
        StaticAgent { id, tech, gamma, s }
    }

    pub fn linear(id: usize, a: f64, gamma: f64, s: f64) -> Self {
        Self::new(id, Technology::linear(a), gamma, s)
    }

    pub fn a(&self) -> f64 {
        self.tech.a()
    }
}

/// A parameter that sensitivity analysis and sweeps can move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Param {
    A,
    Gamma,
    S,
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Param::A => "A",
            Param::Gamma => "gamma",
            Param::S => "S",
        })
    }
}

/// An ordered list of agents.
#[derive(Clone, Debug)]
pub struct StaticEconomy {
    pub agents: Vec<StaticAgent>,
}

impl StaticEconomy {
    pub fn new(agents: Vec<StaticAgent>) -> Self {
        StaticEconomy { agents }
    }

    /// Linear economy from parallel slices of `A`, `gamma` and `S`; ids count from 1.
    pub fn linear(a: &[f64], gamma: &[f64], s: &[f64]) -> Self {
        assert!(a.len() == gamma.len() && a.len() == s.len(), "slice lengths differ");
        let agents = (0..a.len())
            .map(|i| StaticAgent::linear(i + 1, a[i], gamma[i], s[i]))
            .collect();
        StaticEconomy { agents }
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    /// Aggregate wealth `S`.
    pub fn total_wealth(&self) -> f64 {
        self.agents.iter().map(|a| a.s).sum()
    }

    /// `max_i gamma_i A_i`.
    pub fn max_gamma_a(&self) -> f64 {
        self.agents
            .iter()
            .map(|a| a.gamma * a.a())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_linear(&self) -> bool {
        !self.agents.is_empty() && self.agents.iter().all(|a| a.tech.is_linear())
    }

    pub fn param(&self, pos: usize, p: Param) -> f64 {
        let ag = &self.agents[pos];
        match p {
            Param::A => ag.a(),
            Param::Gamma => ag.gamma,
            Param::S => ag.s,
        }
    }

    /// Copy with one parameter of the agent at `pos` replaced.
    pub fn with_param(&self, pos: usize, p: Param, value: f64) -> Self {
        let mut out = self.clone();
        let ag = &mut out.agents[pos];
        match p {
            Param::A => ag.tech = ag.tech.with_a(value),
            Param::Gamma => ag.gamma = value,
            Param::S => ag.s = value,
        }
        out
    }

    /// Copy with every TFP replaced.
    pub fn with_tfps(&self, a: &[f64]) -> Self {
        assert_eq!(a.len(), self.len(), "one TFP per agent");
        let mut out = self.clone();
        for (ag, &x) in out.agents.iter_mut().zip(a) {
            ag.tech = ag.tech.with_a(x);
        }
        out
    }

    pub fn position(&self, id: usize) -> Option<usize> {
        self.agents.iter().position(|a| a.id == id)
    }
}

/// Which rule an economy breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Empty,
    DuplicateId,
    NonFinite,
    GammaRange,
    WealthNonPositive,
    TfpNonPositive,
    AlphaRange,
    NonStrictOrdering,
    MixedTechnology,
    CustomOrigin,
    CustomIncreasing,
    CustomConcavity,
    CustomElasticity,
    BetaRange,
    EmptyHorizon,
    CollateralAboveTfp,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Empty => "economy has no agents",
            Rule::DuplicateId => "duplicate agent id",
            Rule::NonFinite => "non-finite parameter",
            Rule::GammaRange => "gamma out of (0,1)",
            Rule::WealthNonPositive => "wealth must be positive",
            Rule::TfpNonPositive => "A must be positive",
            Rule::AlphaRange => "alpha out of (0,1)",
            Rule::NonStrictOrdering => "non-strict A ordering",
            Rule::MixedTechnology => "mixed linear and concave technologies",
            Rule::CustomOrigin => "f(0) must be 0",
            Rule::CustomIncreasing => "f must be strictly increasing",
            Rule::CustomConcavity => "f must be strictly concave",
            Rule::CustomElasticity => "k f'(k)/f(k) must be nondecreasing",
            Rule::BetaRange => "beta out of (0,1)",
            Rule::EmptyHorizon => "horizon must be at least 1",
            Rule::CollateralAboveTfp => "max gamma A must be below the lowest A",
        })
    }
}

/// One broken rule, tied to an agent id when it concerns a single agent.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub agent: Option<usize>,
    pub rule: Rule,
    pub detail: String,
}

impl Violation {
    pub(crate) fn new(agent: Option<usize>, rule: Rule, detail: impl Into<String>) -> Self {
        Violation { agent, rule, detail: detail.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.agent {
            Some(id) => write!(f, "agent {id}: {}", self.rule)?,
            None => write!(f, "{}", self.rule)?,
        }
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

/// Check every type invariant. An empty list means the economy is admissible.
///
/// Linear economies must list agents by strictly increasing `A`; ties are
/// rejected rather than aggregated.
pub fn validate_economy(econ: &StaticEconomy) -> Vec<Violation> {
    validate_with(econ, &Tolerances::DEFAULT)
}

pub fn validate_with(econ: &StaticEconomy, tol: &Tolerances) -> Vec<Violation> {
    let mut out = Vec::new();
    if econ.agents.is_empty() {
        out.push(Violation::new(None, Rule::Empty, ""));
        return out;
    }
    for (i, ag) in econ.agents.iter().enumerate() {
        if econ.agents[..i].iter().any(|o| o.id == ag.id) {
            out.push(Violation::new(Some(ag.id), Rule::DuplicateId, ""));
        }
        let a = ag.a();
        if !(a.is_finite() && ag.gamma.is_finite() && ag.s.is_finite()) {
            out.push(Violation::new(Some(ag.id), Rule::NonFinite, ""));
            continue;
        }
        if !(ag.gamma > 0.0 && ag.gamma < 1.0) {
            out.push(Violation::new(Some(ag.id), Rule::GammaRange, format!("gamma = {}", ag.gamma)));
        }
        if ag.s <= 0.0 {
            out.push(Violation::new(Some(ag.id), Rule::WealthNonPositive, format!("S = {}", ag.s)));
        }
        if a <= 0.0 {
            out.push(Violation::new(Some(ag.id), Rule::TfpNonPositive, format!("A = {a}")));
        }
        match &ag.tech {
            Technology::Linear { .. } => {}
            Technology::CobbDouglas { alpha, .. } => {
                if !(*alpha > 0.0 && *alpha < 1.0) {
                    out.push(Violation::new(Some(ag.id), Rule::AlphaRange, format!("alpha = {alpha}")));
                }
            }
            Technology::Custom(c) => out.extend(check_custom(ag.id, c, tol)),
        }
    }
    let linear = econ.agents.iter().filter(|a| a.tech.is_linear()).count();
    if linear > 0 && linear < econ.agents.len() {
        out.push(Violation::new(None, Rule::MixedTechnology, ""));
    }
    if linear == econ.agents.len() {
        for w in econ.agents.windows(2) {
            if w[1].a() <= w[0].a() {
                out.push(Violation::new(
                    Some(w[1].id),
                    Rule::NonStrictOrdering,
                    format!("A = {} follows A = {}", w[1].a(), w[0].a()),
                ));
            }
        }
    }
    out
}

fn check_custom(id: usize, c: &CustomConcave, tol: &Tolerances) -> Vec<Violation> {
    let mut out = Vec::new();
    let f0 = (c.f)(0.0);
    if f0.abs() > 1e-12 {
        out.push(Violation::new(Some(id), Rule::CustomOrigin, format!("f(0) = {f0}")));
    }
    let grid = tol.sample_grid();
    let fv: Vec<f64> = grid.iter().map(|&k| (c.f)(k)).collect();
    let dv: Vec<f64> = grid.iter().map(|&k| (c.f_prime)(k)).collect();
    if fv.iter().chain(&dv).any(|x| !x.is_finite()) {
        out.push(Violation::new(Some(id), Rule::NonFinite, "f or f' not finite on the sampling grid"));
        return out;
    }
    if fv.windows(2).any(|w| w[1] <= w[0]) || dv.iter().any(|&d| d <= 0.0) {
        out.push(Violation::new(Some(id), Rule::CustomIncreasing, ""));
    }
    if dv.windows(2).any(|w| w[1] >= w[0]) {
        out.push(Violation::new(Some(id), Rule::CustomConcavity, ""));
    }
    let el: Vec<f64> = grid.iter().zip(fv.iter().zip(&dv)).map(|(k, (f, d))| k * d / f).collect();
    if el.windows(2).any(|w| w[1] < w[0] * (1.0 - 1e-12)) {
        out.push(Violation::new(Some(id), Rule::CustomElasticity, ""));
    }
    out
}

/// Fail with [`Error::Invalid`] unless the economy is admissible.
pub fn ensure_valid(econ: &StaticEconomy) -> Result<()> {
    let v = validate_economy(econ);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(v))
    }
}

/// One agent's equilibrium choice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgentAllocation {
    pub id: usize,
    /// Capital.
    pub k: f64,
    /// Asset position; negative means lending.
    pub b: f64,
    /// Whether the borrowing constraint binds.
    pub binding: bool,
    /// `F(k) - R b`.
    pub profit: f64,
}

/// Cell of the regime partition. Indices are positions counted from zero;
/// `Display` counts from one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegimeLabel {
    /// `R` equals the TFP of the agent at this position.
    AtTfp(usize),
    /// Linear: `A_n < R < A_{n+1}`. Concave: agents `0..=n` are slack and
    /// the rest bind.
    Interior(usize),
    /// No constraint binds.
    FrictionlessConcave,
    /// Concave economy whose thresholds are not increasing along the list,
    /// so no interior cell index is assigned.
    UnorderedThresholds,
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegimeLabel::AtTfp(n) => write!(f, "A{}", n + 1),
            RegimeLabel::Interior(n) => write!(f, "R{}", n + 1),
            RegimeLabel::FrictionlessConcave => f.write_str("frictionless"),
            RegimeLabel::UnorderedThresholds => f.write_str("unordered"),
        }
    }
}

/// Prices and allocations that clear both markets.
#[derive(Clone, Debug, PartialEq)]
pub struct StaticEquilibrium {
    /// Gross interest rate.
    pub r: f64,
    /// One allocation per agent, in the economy's order.
    pub allocations: Vec<AgentAllocation>,
    pub regime: RegimeLabel,
    /// Aggregate output.
    pub y: f64,
}

impl StaticEquilibrium {
    pub fn allocation(&self, id: usize) -> Option<&AgentAllocation> {
        self.allocations.iter().find(|a| a.id == id)
    }

    pub fn capital(&self) -> Vec<f64> {
        self.allocations.iter().map(|a| a.k).collect()
    }

    /// `sum_i b_i`; zero in equilibrium.
    pub fn net_assets(&self) -> f64 {
        self.allocations.iter().map(|a| a.b).sum()
    }
}

/// `Y = sum_i F_i(k_i)`.
///
/// ```
/// use credeq::econ::{aggregate_output, AgentAllocation, StaticEconomy};
///
/// let econ = StaticEconomy::linear(&[1.0, 2.0], &[0.2, 0.2], &[1.0, 1.0]);
/// let alloc = |id, k| AgentAllocation { id, k, b: 0.0, binding: false, profit: 0.0 };
/// let y = aggregate_output(&econ, &[alloc(1, 1.0), alloc(2, 1.0)]).unwrap();
/// assert_eq!(y, 3.0);
/// ```
pub fn aggregate_output(econ: &StaticEconomy, allocations: &[AgentAllocation]) -> Result<f64> {
    let mut y = 0.0;
    for ag in &econ.agents {
        let al = allocations
            .iter()
            .find(|a| a.id == ag.id)
            .ok_or(Error::MissingAgent(ag.id))?;
        y += ag.tech.output(al.k);
    }
    Ok(y)
}
