//! Equilibrium paths as CSV: one row per date `t = 0..=T`.
//!
//! Columns are `t, R, Y` followed by `k_<id>, b_<id>, c_<id>, s_<id>` for
//! each agent. `R` and `Y` are `NaN` at `t = 0`.

use credeq::ramsey::{DynamicEconomy, EquilibriumPath, Hypothesis};

use crate::table::{read_table, Cell, ResultTable};

/// Stable text form of a hypothesis, positions counted from zero.
pub fn hypothesis_key(h: Hypothesis) -> String {
    match h {
        Hypothesis::Frictionless => "frictionless".into(),
        Hypothesis::AtTfp { h } => format!("at-tfp {h}"),
        Hypothesis::InteriorThenAtTfp { n, h } => format!("interior-then-at-tfp {n} {h}"),
        Hypothesis::TopThenAtTfp { h } => format!("top-then-at-tfp {h}"),
        Hypothesis::InteriorAll => "interior-all".into(),
    }
}

pub fn parse_hypothesis(key: &str) -> Option<Hypothesis> {
    let mut parts = key.split_whitespace();
    let kind = parts.next()?;
    let nums: Vec<usize> = parts.map(|p| p.parse().ok()).collect::<Option<_>>()?;
    Some(match (kind, nums.as_slice()) {
        ("frictionless", []) => Hypothesis::Frictionless,
        ("at-tfp", &[h]) => Hypothesis::AtTfp { h },
        ("interior-then-at-tfp", &[n, h]) => Hypothesis::InteriorThenAtTfp { n, h },
        ("top-then-at-tfp", &[h]) => Hypothesis::TopThenAtTfp { h },
        ("interior-all", []) => Hypothesis::InteriorAll,
        _ => return None,
    })
}

pub fn path_table(econ: &DynamicEconomy, path: &EquilibriumPath) -> ResultTable {
    let mut header = vec!["t".to_string(), "R".into(), "Y".into()];
    for ag in &econ.agents {
        for q in ["k", "b", "c", "s"] {
            header.push(format!("{q}_{}", ag.id));
        }
    }
    let mut table = ResultTable::new(header);
    table.meta("hypothesis", hypothesis_key(path.hypothesis));
    table.meta("rates", path.hypothesis);
    for t in 0..=path.horizon {
        let (r, y) = if t == 0 { (f64::NAN, f64::NAN) } else { (path.rate(t), path.output(t)) };
        let mut row = vec![Cell::Int(t), Cell::Num(r), Cell::Num(y)];
        for i in 0..econ.len() {
            for q in [&path.k, &path.b, &path.c, &path.s] {
                row.push(Cell::Num(q[i][t]));
            }
        }
        table.push(row);
    }
    table
}

/// Read a path written by [`path_table`]; agent columns are matched by id.
pub fn read_path(text: &str, econ: &DynamicEconomy) -> Result<EquilibriumPath, String> {
    let (meta, header, rows) = read_table(text)?;
    let hypothesis = meta
        .iter()
        .find(|(k, _)| k == "hypothesis")
        .ok_or("missing '# hypothesis = ...' line")?;
    let hypothesis = parse_hypothesis(&hypothesis.1).ok_or_else(|| format!("unknown hypothesis '{}'", hypothesis.1))?;
    let col = |name: &str| header.iter().position(|h| h == name).ok_or_else(|| format!("missing column {name}"));
    let value = |row: &csv::StringRecord, j: usize, t: usize| -> Result<f64, String> {
        row[j].parse::<f64>().map_err(|_| format!("row t = {t}, column {}: '{}' is not a number", header[j], &row[j]))
    };
    if rows.len() < 2 {
        return Err("a path needs dates 0 and 1 at least".into());
    }
    let horizon = rows.len() - 1;
    let (jr, jy) = (col("R")?, col("Y")?);
    let mut path = EquilibriumPath {
        horizon,
        r: Vec::with_capacity(horizon),
        k: vec![Vec::new(); econ.len()],
        b: vec![Vec::new(); econ.len()],
        c: vec![Vec::new(); econ.len()],
        s: vec![Vec::new(); econ.len()],
        y: Vec::with_capacity(horizon),
        hypothesis,
    };
    let cols: Vec<[usize; 4]> = econ
        .agents
        .iter()
        .map(|ag| {
            Ok([col(&format!("k_{}", ag.id))?, col(&format!("b_{}", ag.id))?, col(&format!("c_{}", ag.id))?, col(&format!("s_{}", ag.id))?])
        })
        .collect::<Result<_, String>>()?;
    for (t, row) in rows.iter().enumerate() {
        if t >= 1 {
            path.r.push(value(row, jr, t)?);
            path.y.push(value(row, jy, t)?);
        }
        for (i, c) in cols.iter().enumerate() {
            path.k[i].push(value(row, c[0], t)?);
            path.b[i].push(value(row, c[1], t)?);
            path.c[i].push(value(row, c[2], t)?);
            path.s[i].push(value(row, c[3], t)?);
        }
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use credeq::ramsey::construct_path_ah;

    #[test]
    fn hypothesis_keys_round_trip() {
        for h in [
            Hypothesis::Frictionless,
            Hypothesis::AtTfp { h: 2 },
            Hypothesis::InteriorThenAtTfp { n: 1, h: 3 },
            Hypothesis::TopThenAtTfp { h: 0 },
            Hypothesis::InteriorAll,
        ] {
            assert_eq!(parse_hypothesis(&hypothesis_key(h)), Some(h));
        }
        assert_eq!(parse_hypothesis("at-tfp"), None);
    }

    #[test]
    fn paths_round_trip_exactly() {
        let econ = DynamicEconomy::stationary(&[0.99, 0.4], &[0.2, 0.4], &[200.0, 100.0], &[1.5, 2.25], 20);
        let path = construct_path_ah(&econ, 0).unwrap();
        let text = String::from_utf8(path_table(&econ, &path).to_bytes()).unwrap();
        assert_eq!(read_path(&text, &econ).unwrap(), path);
    }
}
