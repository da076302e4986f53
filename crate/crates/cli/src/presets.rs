//! Hard-coded reproduction runs.

use credeq::econ::{Param, StaticEconomy};
use credeq::ramsey::{auto_construct, DynamicEconomy};
use credeq::sensitivity::{sweep, sweep_open, SweepTable};

use crate::table::{Cell, ResultTable};

pub const NAMES: [&str; 5] = ["fig-a1", "fig-gamma2", "fig-gamma3", "ramsey-a1-shock", "ramsey-gamma2-compare"];

fn three_agent(gamma2: f64) -> StaticEconomy {
    StaticEconomy::linear(&[1.0, 1.2, 1.5], &[0.2, gamma2, 0.3], &[4.0, 4.0, 3.0])
}

fn sweep_table(name: &str, column: &str, table: &SweepTable) -> ResultTable {
    let mut out = ResultTable::new([column, "R", "Y", "regime"]);
    out.meta("preset", name);
    for row in &table.rows {
        out.push(match &row.outcome {
            Ok(p) => vec![Cell::Num(row.value), Cell::Num(p.r), Cell::Num(p.y), Cell::Text(p.regime.to_string())],
            Err(_) => vec![Cell::Num(row.value), Cell::Num(f64::NAN), Cell::Num(f64::NAN), Cell::Text("error".into())],
        });
    }
    out
}

fn outputs(econ: &DynamicEconomy) -> Result<Vec<f64>, String> {
    auto_construct(econ).map(|a| a.path.y).map_err(|e| e.to_string())
}

/// Run a preset; `Ok(None)` for an unknown name.
pub fn run(name: &str) -> Result<Option<ResultTable>, String> {
    let table = match name {
        "fig-a1" => {
            let e = StaticEconomy::linear(&[0.5, 1.0], &[0.2, 0.2], &[1.0, 0.7]);
            let t = sweep_open(&e, 0, Param::A, 0.34, 1.0, 133).map_err(|e| e.to_string())?;
            sweep_table(name, "A1", &t)
        }
        "fig-gamma2" => {
            let t = sweep(&three_agent(0.3), 1, Param::Gamma, 0.15, 0.45, 61).map_err(|e| e.to_string())?;
            sweep_table(name, "gamma2", &t)
        }
        "fig-gamma3" => {
            let t = sweep(&three_agent(0.3), 2, Param::Gamma, 0.15, 0.45, 61).map_err(|e| e.to_string())?;
            sweep_table(name, "gamma3", &t)
        }
        "ramsey-a1-shock" => {
            let econ = |a1: f64| DynamicEconomy::stationary(&[0.99, 0.4], &[0.2, 0.4], &[200.0, 100.0], &[a1, 2.25], 50);
            let base = outputs(&econ(1.5))?;
            let small = outputs(&econ(1.53))?;
            let large = outputs(&econ(1.95))?;
            let mut out = ResultTable::new(["t", "Y_A1_1.50", "Y_A1_1.53", "Y_A1_1.95", "dY_1.53", "dY_1.95"]);
            out.meta("preset", name);
            for t in 0..base.len() {
                out.push(vec![
                    Cell::Int(t + 1),
                    Cell::Num(base[t]),
                    Cell::Num(small[t]),
                    Cell::Num(large[t]),
                    Cell::Num(small[t] - base[t]),
                    Cell::Num(large[t] - base[t]),
                ]);
            }
            out
        }
        "ramsey-gamma2-compare" => {
            let econ = |g: f64| {
                DynamicEconomy::stationary(&[0.2, 0.2, 0.95], &[0.2, g, 0.3], &[4.0, 4.0, 3.0], &[1.0, 1.2, 1.5], 50)
            };
            let low = outputs(&econ(0.30))?;
            let high = outputs(&econ(0.35))?;
            let mut out = ResultTable::new(["t", "Y_gamma2_0.30", "Y_gamma2_0.35", "dY"]);
            out.meta("preset", name);
            for t in 0..low.len() {
                out.push(vec![Cell::Int(t + 1), Cell::Num(low[t]), Cell::Num(high[t]), Cell::Num(high[t] - low[t])]);
            }
            out
        }
        _ => return Ok(None),
    };
    Ok(Some(table))
}
