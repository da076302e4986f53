//! Analytic `dY_t / dgamma_v` on two-stage paths.

use super::{borrower_base, DynamicEconomy, EquilibriumPath, Hypothesis};
use crate::error::{Error, Result};

/// `dY_t / dgamma_v` on a stationary path built under
/// [`Hypothesis::InteriorThenAtTfp`], holding the rate pattern fixed.
///
/// A change in `gamma_v` moves `R_1` (through date-0 market clearing), the
/// date-1 net worth of every agent, and for `v > h` the growth base of `v`.
/// Agents below `n` do not borrow at any date, so their derivative is zero.
pub fn dyt_dgamma_analytic(econ: &DynamicEconomy, path: &EquilibriumPath, v: usize, t: usize) -> Result<f64> {
    let (n, h) = match path.hypothesis {
        Hypothesis::InteriorThenAtTfp { n, h } if econ.is_stationary() => (n, h),
        other => {
            return Err(Error::RegimeMismatch {
                expected: "a stationary economy with R_1 interior then R_t = A_h".into(),
                found: other.to_string(),
            })
        }
    };
    let m = econ.len();
    if v >= m {
        return Err(Error::InvalidPerturbation(format!("no agent at position {v}")));
    }
    if t == 0 {
        return Err(Error::InvalidPerturbation("output is defined from t = 1".into()));
    }
    if v < n {
        return Ok(0.0);
    }
    let ag = &econ.agents;
    let s0 = econ.s0();
    let r = path.rate(1);
    let a: Vec<f64> = ag.iter().map(|x| x.a.at(1)).collect();
    let c: Vec<f64> = ag.iter().zip(&a).map(|(x, a)| x.gamma * a).collect();

    let slope: f64 = (n..m).map(|j| c[j] * s0[j] / (r - c[j]).powi(2)).sum();
    let push = a[v] * r * s0[v] / (r - c[v]).powi(2);
    let dr = push / slope;

    if t == 1 {
        let weighted: f64 = (n..m).map(|j| a[j] * c[j] * s0[j] / (r - c[j]).powi(2)).sum();
        return Ok(a[v] * push - dr * weighted);
    }

    // Date-1 net worth and its derivative.
    let w1 = |i: usize| {
        if i < n {
            r * s0[i]
        } else {
            (1.0 - ag[i].gamma) * a[i] * r * s0[i] / (r - c[i])
        }
    };
    let dw1 = |i: usize| {
        let via_rate = if i < n {
            s0[i]
        } else {
            -(1.0 - ag[i].gamma) * a[i] * c[i] * s0[i] / (r - c[i]).powi(2)
        };
        let direct = if i == v { a[v] * r * s0[v] * (a[v] - r) / (r - c[v]).powi(2) } else { 0.0 };
        via_rate * dr + direct
    };

    let p = t as i32 - 1;
    let mut inner: f64 = (0..m)
        .map(|i| {
            let base = if i <= h { ag[i].beta } else { borrower_base(econ, h, i) };
            base.powi(p) * dw1(i)
        })
        .sum();
    if v > h {
        let x = borrower_base(econ, h, v);
        let dx = ag[v].beta * a[v] * (a[v] - a[h]) / (a[h] - c[v]).powi(2);
        inner += p as f64 * x.powi(p - 1) * dx * w1(v);
    }
    Ok(a[h].powi(p) * inner)
}

/// Smallest `t0` such that `dY_t / dgamma_v < 0` for every `t` in `t0..=T`,
/// or `None` when the derivative at `T` is not negative.
pub fn first_negative_tail(econ: &DynamicEconomy, path: &EquilibriumPath, v: usize) -> Result<Option<usize>> {
    let mut start = None;
    for t in (1..=path.horizon).rev() {
        if dyt_dgamma_analytic(econ, path, v, t)? < 0.0 {
            start = Some(t);
        } else {
            break;
        }
    }
    Ok(start)
}
