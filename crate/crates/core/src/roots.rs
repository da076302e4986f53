//! Bracketing root finders and a golden-section minimiser.

use crate::error::{Error, Result};

/// How a bisection decides it is done.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Stop {
    /// Width at most `rel * (1 + |mid|)`.
    Width(f64),
    /// Run until the midpoint no longer separates the endpoints.
    Machine,
}

/// Bisection on `[lo, hi]` where `g(lo)` and `g(hi)` have opposite signs.
/// With `geometric`, midpoints are geometric means (for positive brackets
/// spanning several orders of magnitude).
pub(crate) fn bisect<G: FnMut(f64) -> f64>(
    mut g: G,
    mut lo: f64,
    mut hi: f64,
    stop: Stop,
    max_iter: usize,
    geometric: bool,
) -> Result<f64> {
    let glo = g(lo);
    let ghi = g(hi);
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo.signum() == ghi.signum() || glo.is_nan() || ghi.is_nan() {
        return Err(Error::Bracket(format!(
            "g({lo}) = {glo} and g({hi}) = {ghi} do not straddle zero"
        )));
    }
    let lo_sign = glo.signum();
    for _ in 0..max_iter {
        let mid = if geometric && lo > 0.0 && hi / lo > 4.0 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        match stop {
            Stop::Width(rel) if hi - lo <= rel * (1.0 + mid.abs()) => return Ok(mid),
            Stop::Machine if mid <= lo || mid >= hi => return Ok(mid),
            _ => {}
        }
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    match stop {
        Stop::Machine => Ok(0.5 * (lo + hi)),
        Stop::Width(_) => Err(Error::NoConvergence(max_iter)),
    }
}

/// Minimise a unimodal `f` on `[a, b]` by golden-section search until the
/// bracket is narrower than `tol`.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, Stop::Machine, 200, false).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bisect_rejects_bad_bracket() {
        assert!(matches!(
            bisect(|x| x * x + 1.0, 0.0, 2.0, Stop::Machine, 200, false),
            Err(Error::Bracket(_))
        ));
    }

    #[test]
    fn width_stop_reports_non_convergence() {
        let r = bisect(|x| x - 0.3, 0.0, 1.0, Stop::Width(1e-300), 10, false);
        assert_eq!(r, Err(Error::NoConvergence(10)));
    }

    #[test]
    fn golden_section_locates_parabola_minimum() {
        let (x, _) = golden_section_min(|x| (x - 0.7).powi(2), 0.0, 2.0, 1e-10);
        assert!((x - 0.7).abs() < 1e-8);
    }
}
