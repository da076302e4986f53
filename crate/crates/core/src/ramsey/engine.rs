//! Path construction under an imposed rate pattern.

use rayon::prelude::*;

use super::{ensure_dynamic, interior_bracket_holds, verify_path, DynamicEconomy, EquilibriumPath, Hypothesis};
use crate::econ::Tolerances;
use crate::error::{Error, Result};
use crate::linear::interior_root;

/// Rate rule for one transition `t -> t+1`.
#[derive(Clone, Copy, Debug)]
enum Rule {
    /// `R_{t+1} = A_{h,t+1}`; agent `h` absorbs the residual capital.
    AtTfp(usize),
    /// `R_{t+1}` strictly between `A_{n-1}` and `A_n`; agents `n..` borrow.
    Interior(usize),
}

/// Relative slack allowed on the pivot agent's capital and constraint.
const FEASIBILITY: f64 = 1e-12;

fn condition(period: usize, reason: String) -> Error {
    Error::Condition { period, reason }
}

/// One period's rate and allocation, or the reason the rule is infeasible.
fn step(econ: &DynamicEconomy, t: usize, s: &[f64], rule: Rule) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let m = econ.len();
    let a = econ.tfps_at(t + 1);
    let c: Vec<f64> = econ.agents.iter().zip(&a).map(|(ag, x)| ag.gamma * x).collect();
    let total: f64 = s.iter().sum();
    let mut k = vec![0.0; m];
    let mut b: Vec<f64> = s.iter().map(|x| -x).collect();
    let borrow = |j: usize, r: f64, k: &mut [f64], b: &mut [f64]| {
        k[j] = r * s[j] / (r - c[j]);
        b[j] = c[j] * s[j] / (r - c[j]);
    };
    match rule {
        Rule::Interior(n) => {
            let r = interior_root(&c[n..], &s[n..], total, &Tolerances::DEFAULT)
                .map_err(|e| condition(t, e.to_string()))?;
            if !(a[n - 1] < r && r < a[n]) {
                return Err(condition(
                    t,
                    format!("R_{} = {r} outside (A_{}, A_{}) = ({}, {})", t + 1, n, n + 1, a[n - 1], a[n]),
                ));
            }
            for j in n..m {
                borrow(j, r, &mut k, &mut b);
            }
            Ok((r, k, b))
        }
        Rule::AtTfp(h) => {
            let r = a[h];
            for j in h + 1..m {
                borrow(j, r, &mut k, &mut b);
            }
            // the pivot clears the bond market; its capital follows from its budget
            let bh = -(b[..h].iter().sum::<f64>() + b[h + 1..].iter().sum::<f64>());
            let kh = s[h] + bh;
            let slack = FEASIBILITY * total;
            if kh < -slack {
                return Err(condition(t, format!("agent {} would need capital {kh} < 0", h + 1)));
            }
            let gamma = econ.agents[h].gamma;
            if r * bh > gamma * r * kh + r * slack {
                return Err(condition(
                    t,
                    format!("agent {} would borrow {bh}, above its limit {}", h + 1, gamma * kh),
                ));
            }
            k[h] = kh;
            b[h] = bh;
            Ok((r, k, b))
        }
    }
}

fn build<F: Fn(usize) -> Rule>(econ: &DynamicEconomy, hypothesis: Hypothesis, rule: F) -> Result<EquilibriumPath> {
    ensure_dynamic(econ)?;
    let m = econ.len();
    let horizon = econ.horizon;
    let mut k = vec![Vec::with_capacity(horizon + 1); m];
    let mut b = vec![Vec::with_capacity(horizon + 1); m];
    let mut c = vec![Vec::with_capacity(horizon + 1); m];
    let mut s = vec![Vec::with_capacity(horizon + 1); m];
    let mut r = Vec::with_capacity(horizon);
    let mut y = Vec::with_capacity(horizon);

    let mut sav: Vec<f64> = econ.s0();
    for (i, ag) in econ.agents.iter().enumerate() {
        c[i].push((1.0 - ag.beta) * ag.w0);
        s[i].push(sav[i]);
    }
    for t in 0..=horizon {
        let (rate, kt, bt) = step(econ, t, &sav, rule(t))?;
        for i in 0..m {
            k[i].push(kt[i]);
            b[i].push(bt[i]);
        }
        if t == horizon {
            break;
        }
        let a = econ.tfps_at(t + 1);
        y.push(a.iter().zip(&kt).map(|(x, ki)| x * ki).sum());
        r.push(rate);
        for (i, ag) in econ.agents.iter().enumerate() {
            let worth = a[i] * kt[i] - rate * bt[i];
            sav[i] = ag.beta * worth;
            s[i].push(sav[i]);
            c[i].push((1.0 - ag.beta) * worth);
        }
    }
    Ok(EquilibriumPath { horizon, r, k, b, c, s, y, hypothesis })
}

/// `R_t = A_m` with the top agent unconstrained at every date.
pub fn construct_path_frictionless(econ: &DynamicEconomy) -> Result<EquilibriumPath> {
    let top = econ.len().saturating_sub(1);
    build(econ, Hypothesis::Frictionless, |_| Rule::AtTfp(top))
}

/// `R_t = A_{h,t}` at every date.
///
/// ```
/// use credeq::ramsey::{construct_path_ah, DynamicEconomy};
///
/// let econ = DynamicEconomy::stationary(&[0.99, 0.4], &[0.2, 0.4], &[200.0, 100.0], &[1.5, 2.25], 10);
/// let path = construct_path_ah(&econ, 0).unwrap();
/// assert!((path.output(1) - 637.5).abs() < 1e-9);
/// ```
pub fn construct_path_ah(econ: &DynamicEconomy, h: usize) -> Result<EquilibriumPath> {
    if h >= econ.len() {
        return Err(Error::InvalidPerturbation(format!("no agent at position {h}")));
    }
    build(econ, Hypothesis::AtTfp { h }, |_| Rule::AtTfp(h))
}

/// `R_1` strictly between `A_{n-1}` and `A_n`, then `R_t = A_h` (`1 <= n <= h`).
pub fn construct_path_interior_then_ah(econ: &DynamicEconomy, n: usize, h: usize) -> Result<EquilibriumPath> {
    if !(1 <= n && n <= h && h < econ.len()) {
        return Err(Error::InvalidPerturbation(format!(
            "need 1 <= n <= h < m, got n = {n}, h = {h}, m = {}",
            econ.len()
        )));
    }
    ensure_dynamic(econ)?;
    if !interior_bracket_holds(econ, n) {
        return Err(condition(0, format!("lenders' savings outside the bracket for R_1 in (A_{n}, A_{})", n + 1)));
    }
    build(econ, Hypothesis::InteriorThenAtTfp { n, h }, |t| {
        if t == 0 {
            Rule::Interior(n)
        } else {
            Rule::AtTfp(h)
        }
    })
}

/// Only the top agent borrows at date 0; `R_t = A_h` afterwards (`h < m - 1`).
pub fn construct_path_m1mh(econ: &DynamicEconomy, h: usize) -> Result<EquilibriumPath> {
    let m = econ.len();
    if !(m >= 2 && h + 1 < m) {
        return Err(Error::InvalidPerturbation(format!("need h < m - 1, got h = {h}, m = {m}")));
    }
    build(econ, Hypothesis::TopThenAtTfp { h }, |t| {
        if t == 0 {
            Rule::Interior(m - 1)
        } else {
            Rule::AtTfp(h)
        }
    })
}

/// Only the top agent borrows, at every date.
pub fn construct_path_interior_all(econ: &DynamicEconomy) -> Result<EquilibriumPath> {
    let m = econ.len();
    if m < 2 {
        return Err(Error::InvalidPerturbation("needs at least two agents".into()));
    }
    build(econ, Hypothesis::InteriorAll, |_| Rule::Interior(m - 1))
}

/// First verified path and every hypothesis rejected along the way.
#[derive(Clone, Debug, PartialEq)]
pub struct AutoConstruction {
    pub path: EquilibriumPath,
    /// `(hypothesis, reason)` for each candidate tried before the winner.
    pub rejected: Vec<(String, String)>,
}

fn candidates(m: usize) -> Vec<Hypothesis> {
    let mut out = vec![Hypothesis::Frictionless];
    out.extend((0..m.saturating_sub(1)).rev().map(|h| Hypothesis::AtTfp { h }));
    for h in (1..m).rev() {
        out.extend((1..=h).rev().map(|n| Hypothesis::InteriorThenAtTfp { n, h }));
    }
    if m >= 2 {
        out.extend((0..m - 1).rev().map(|h| Hypothesis::TopThenAtTfp { h }));
        out.push(Hypothesis::InteriorAll);
    }
    out
}

fn construct(econ: &DynamicEconomy, hyp: Hypothesis) -> Result<EquilibriumPath> {
    match hyp {
        Hypothesis::Frictionless => construct_path_frictionless(econ),
        Hypothesis::AtTfp { h } => construct_path_ah(econ, h),
        Hypothesis::InteriorThenAtTfp { n, h } => construct_path_interior_then_ah(econ, n, h),
        Hypothesis::TopThenAtTfp { h } => construct_path_m1mh(econ, h),
        Hypothesis::InteriorAll => construct_path_interior_all(econ),
    }
}

/// Try every rate pattern in a fixed order and return the first path the
/// verifier accepts at tolerance `1e-9`.
///
/// Order: frictionless; `R_t = A_h` for `h` from the top down; interior
/// date 0 then `A_h` (larger `h` first); top borrower then `A_h`; top
/// borrower at every date. The transversality proxy is not part of the
/// acceptance test here, since it depends only on discount factors and the
/// horizon; callers that need it can run [`verify_path`] themselves.
pub fn auto_construct(econ: &DynamicEconomy) -> Result<AutoConstruction> {
    ensure_dynamic(econ)?;
    let order = candidates(econ.len());
    let outcomes: Vec<std::result::Result<EquilibriumPath, String>> = order
        .par_iter()
        .map(|&hyp| {
            let path = construct(econ, hyp).map_err(|e| e.to_string())?;
            let report = verify_path(econ, &path, 1e-9, f64::INFINITY);
            if report.pass {
                Ok(path)
            } else {
                let first = report.failures.first().map_or(String::new(), |f| f.to_string());
                Err(format!("verification failed: {first}"))
            }
        })
        .collect();
    let mut rejected = Vec::new();
    for (hyp, outcome) in order.iter().zip(outcomes) {
        match outcome {
            Ok(path) => return Ok(AutoConstruction { path, rejected }),
            Err(reason) => rejected.push((hyp.to_string(), reason)),
        }
    }
    Err(Error::NoConstructor(rejected))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn candidate_order_prefers_larger_h() {
        let c = candidates(3);
        assert_eq!(c[0], Hypothesis::Frictionless);
        assert_eq!(c[1], Hypothesis::AtTfp { h: 1 });
        assert_eq!(c[2], Hypothesis::AtTfp { h: 0 });
        assert_eq!(c[3], Hypothesis::InteriorThenAtTfp { n: 2, h: 2 });
        assert_eq!(*c.last().unwrap(), Hypothesis::InteriorAll);
        assert_eq!(candidates(1), vec![Hypothesis::Frictionless]);
    }
}
