//! Parser for the MATPOWER `mpc` case format (bus/gen/branch/gencost tables).
//!
//! Supports the subset needed here: per-unit conversion on `baseMVA`, bus
//! kinds from the bus-type column, dense reindexing, linear generator
//! costs. Polynomial cost rows of degree above one are rejected.

use std::collections::BTreeMap;

use crate::error::{CcopfError, Result};
use crate::network::{Branch, Bus, BusKind, Generator, NetworkCase};

/// Parse MATPOWER case text into a validated per-unit [`NetworkCase`].
pub fn parse_case(text: &str) -> Result<NetworkCase> {
    let bus_rows = read_table(text, "bus")?;
    let gen_rows = read_table(text, "gen")?;
    let branch_rows = read_table(text, "branch")?;
    let gencost_rows = read_table(text, "gencost").unwrap_or_default();
    let base_mva = read_base_mva(text)?;

    if !gencost_rows.is_empty() && gencost_rows.len() != gen_rows.len() {
        return Err(CcopfError::Validation(format!(
            "gencost has {} rows but gen has {}",
            gencost_rows.len(),
            gen_rows.len()
        )));
    }

    let mut buses = Vec::with_capacity(bus_rows.len());
    let mut bus_index = BTreeMap::new();
    for (r, row) in bus_rows.iter().enumerate() {
        let get = |c: usize| field("bus", row, r, c);
        let id = get(0)? as usize;
        let kind = match get(1)? as i64 {
            1 => BusKind::Pq,
            2 => BusKind::Pv,
            3 => BusKind::Slack,
            4 => {
                return Err(CcopfError::Parse {
                    table: "bus".into(),
                    row: r,
                    column: 1,
                    message: format!("bus {id} is isolated (type 4)"),
                })
            }
            t => {
                return Err(CcopfError::Parse {
                    table: "bus".into(),
                    row: r,
                    column: 1,
                    message: format!("unknown bus type {t}"),
                })
            }
        };
        let v_max = get(11)?;
        let v_min = get(12)?;
        if !(v_min > 0.0 && v_min <= v_max) {
            return Err(CcopfError::Validation(format!(
                "bus {id}: voltage bounds must satisfy 0 < v_min <= v_max, got [{v_min}, {v_max}]"
            )));
        }
        if bus_index.insert(id, buses.len()).is_some() {
            return Err(CcopfError::Validation(format!("duplicate bus label {id}")));
        }
        buses.push(Bus {
            id,
            kind,
            v_min,
            v_max,
            g_shunt: get(4)? / base_mva,
            b_shunt: get(5)? / base_mva,
            p_load: get(2)? / base_mva,
            q_load: get(3)? / base_mva,
        });
    }

    let mut generators = Vec::new();
    for (r, row) in gen_rows.iter().enumerate() {
        let get = |c: usize| field("gen", row, r, c);
        let status = get(7)? != 0.0;
        if !status {
            continue;
        }
        let label = get(0)? as usize;
        let Some(&bus) = bus_index.get(&label) else {
            return Err(CcopfError::Validation(format!(
                "gen row {r} references bus {label} absent from the bus table"
            )));
        };
        let (cost_linear, cost_offset) = if gencost_rows.is_empty() {
            (0.0, 0.0)
        } else {
            linear_cost(&gencost_rows[r], r)?
        };
        let p_min = get(9)? / base_mva;
        let p_max = get(8)? / base_mva;
        let q_min = get(4)? / base_mva;
        let q_max = get(3)? / base_mva;
        if p_min > p_max || q_min > q_max {
            return Err(CcopfError::Validation(format!(
                "gen row {r} at bus {label}: capability bounds are crossed"
            )));
        }
        generators.push(Generator {
            bus,
            p_min,
            p_max,
            q_min,
            q_max,
            cost_linear,
            cost_offset,
        });
    }

    let mut branches = Vec::with_capacity(branch_rows.len());
    for (r, row) in branch_rows.iter().enumerate() {
        let get = |c: usize| field("branch", row, r, c);
        let f_label = get(0)? as usize;
        let t_label = get(1)? as usize;
        let (Some(&from_bus), Some(&to_bus)) = (bus_index.get(&f_label), bus_index.get(&t_label))
        else {
            return Err(CcopfError::Validation(format!(
                "branch row {r} references bus {} absent from the bus table",
                if bus_index.contains_key(&f_label) {
                    t_label
                } else {
                    f_label
                }
            )));
        };
        let res = get(2)?;
        let x = get(3)?;
        let z2 = res * res + x * x;
        if z2 == 0.0 {
            return Err(CcopfError::Parse {
                table: "branch".into(),
                row: r,
                column: 2,
                message: format!("branch {f_label}-{t_label} has zero series impedance"),
            });
        }
        // Taps and phase shifts (columns 8-9) are intentionally ignored.
        branches.push(Branch {
            from_bus,
            to_bus,
            g: res / z2,
            b: -x / z2,
            b_sh: get(4)?,
            s_rating: get(5)? / base_mva,
            status: get(10)? != 0.0,
        });
    }

    let mut case = NetworkCase {
        buses,
        branches,
        generators,
        wind_farms: Vec::new(),
        base_mva,
        bus_index,
    };
    // A PV bus without an in-service generator has nothing to hold its
    // voltage; treat it as PQ.
    let mut has_gen = vec![false; case.n_buses()];
    for g in &case.generators {
        has_gen[g.bus] = true;
    }
    for (i, bus) in case.buses.iter_mut().enumerate() {
        if bus.kind == BusKind::Pv && !has_gen[i] {
            bus.kind = BusKind::Pq;
        }
    }
    case.validate()?;
    Ok(case)
}

/// Extract (c_linear, c_offset) from a MATPOWER gencost row, rejecting
/// anything that is not an (at most) linear polynomial.
fn linear_cost(row: &[f64], r: usize) -> Result<(f64, f64)> {
    let model = field("gencost", row, r, 0)? as i64;
    if model != 2 {
        return Err(CcopfError::Parse {
            table: "gencost".into(),
            row: r,
            column: 0,
            message: format!("only polynomial cost model 2 is supported, got {model}"),
        });
    }
    let n = field("gencost", row, r, 3)? as usize;
    if row.len() < 4 + n {
        return Err(CcopfError::Parse {
            table: "gencost".into(),
            row: r,
            column: row.len(),
            message: format!("expected {n} polynomial coefficients"),
        });
    }
    let coeffs = &row[4..4 + n];
    // Coefficients are highest-degree first; anything above degree 1 must be zero.
    if n > 2 {
        for (k, &c) in coeffs[..n - 2].iter().enumerate() {
            if c != 0.0 {
                return Err(CcopfError::Parse {
                    table: "gencost".into(),
                    row: r,
                    column: 4 + k,
                    message: format!(
                        "cost polynomial has degree {} but only linear costs are supported",
                        n - 1 - k
                    ),
                });
            }
        }
    }
    let c1 = if n >= 2 { coeffs[n - 2] } else { 0.0 };
    let c0 = if n >= 1 { coeffs[n - 1] } else { 0.0 };
    Ok((c1, c0))
}

fn field(table: &str, row: &[f64], r: usize, c: usize) -> Result<f64> {
    row.get(c).copied().ok_or_else(|| CcopfError::Parse {
        table: table.into(),
        row: r,
        column: c,
        message: "missing column".into(),
    })
}

fn read_base_mva(text: &str) -> Result<f64> {
    for line in text.lines() {
        let line = strip_comment(line);
        if let Some(rest) = line.trim().strip_prefix("mpc.baseMVA") {
            let value = rest.trim_start_matches([' ', '\t', '=']).trim_end_matches(';');
            let base: f64 = value.trim().parse().map_err(|_| CcopfError::Parse {
                table: "baseMVA".into(),
                row: 0,
                column: 0,
                message: format!("cannot parse '{}'", value.trim()),
            })?;
            if base <= 0.0 {
                return Err(CcopfError::Validation("baseMVA must be positive".into()));
            }
            return Ok(base);
        }
    }
    Err(CcopfError::Validation("mpc.baseMVA not found".into()))
}

/// Read the numeric matrix `mpc.<name> = [ ... ];`.
fn read_table(text: &str, name: &str) -> Result<Vec<Vec<f64>>> {
    let clean: String = text
        .lines()
        .map(strip_comment)
        .collect::<Vec<_>>()
        .join("\n");
    let needle = format!("mpc.{name}");
    let mut from = 0;
    while let Some(rel) = clean[from..].find(&needle) {
        let after_name = from + rel + needle.len();
        from = after_name;
        // Reject partial matches like mpc.bus_name and non-assignments.
        let rest = &clean[after_name..];
        if rest.starts_with(|ch: char| ch.is_alphanumeric() || ch == '_') {
            continue;
        }
        let rest = rest.trim_start();
        let Some(rest) = rest.strip_prefix('=') else {
            continue;
        };
        let rest = rest.trim_start();
        let Some(body) = rest.strip_prefix('[') else {
            continue;
        };
        let Some(end) = body.find(']') else {
            return Err(CcopfError::Parse {
                table: name.into(),
                row: 0,
                column: 0,
                message: "table is not terminated with ']'".into(),
            });
        };
        return parse_rows(&body[..end], name);
    }
    Err(CcopfError::Validation(format!("table mpc.{name} not found")))
}

/// Rows are separated by ';' or newlines; fields by whitespace or commas.
fn parse_rows(body: &str, table: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for piece in body.split([';', '\n', '\r']) {
        let mut row = Vec::new();
        for tok in piece.split([' ', '\t', ',']) {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            let v: f64 = tok.parse().map_err(|_| CcopfError::Parse {
                table: table.into(),
                row: rows.len(),
                column: row.len(),
                message: format!("cannot parse '{tok}' as a number"),
            })?;
            row.push(v);
        }
        if !row.is_empty() {
            rows.push(row);
        }
    }
    Ok(rows)
}

fn strip_comment(line: &str) -> &str {
    match line.find('%') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CASE118: &str = include_str!("../../cases/case118.m");

    #[test]
    fn ieee118_counts() {
        let case = parse_case(CASE118).unwrap();
        assert_eq!(case.n_buses(), 118);
        assert_eq!(case.n_branches(), 186);
        assert_eq!(case.generators.len(), 54);
    }

    #[test]
    fn ieee118_diagonal_matches_direct_ybus_assembly() {
        // Oracle: assemble the complex bus admittance matrix directly from
        // the raw tables and compare diagonals.
        let case = parse_case(CASE118).unwrap();
        let n = case.n_buses();
        let mut g_ii = vec![0.0; n];
        let mut b_ii = vec![0.0; n];
        for (i, bus) in case.buses.iter().enumerate() {
            g_ii[i] += bus.g_shunt;
            b_ii[i] += bus.b_shunt;
        }
        for (_, br) in case.live_branches() {
            let (g, b) = (br.g, br.b);
            for end in [br.from_bus, br.to_bus] {
                g_ii[end] += g;
                b_ii[end] += b + br.b_sh / 2.0;
            }
        }
        let adm = case.branch_admittances();
        for i in 0..n {
            assert!((adm.g_diag[i] - g_ii[i]).abs() < 1e-12);
            assert!((adm.b_diag[i] - b_ii[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn per_unit_consistency() {
        let case = parse_case(CASE118).unwrap();
        // bus 1 load is 51 MW / 27 Mvar in the file
        let b0 = &case.buses[0];
        assert!(((b0.p_load * case.base_mva) - 51.0).abs() / 51.0 < 1e-12);
        assert!(((b0.q_load * case.base_mva) - 27.0).abs() / 27.0 < 1e-12);
    }

    #[test]
    fn dangling_branch_reference_is_rejected() {
        let text = super::super::tests::TWO_BUS.replace("1 2 0.0 0.1", "1 999 0.0 0.1");
        let err = parse_case(&text).unwrap_err();
        assert!(err.to_string().contains("999"));
    }

    #[test]
    fn missing_slack_is_rejected() {
        let text = super::super::tests::TWO_BUS.replace("1 3 0", "1 2 0");
        let err = parse_case(&text).unwrap_err();
        assert!(err.to_string().contains("slack"));
    }

    #[test]
    fn disconnected_network_reports_islands() {
        let text = r#"
mpc.baseMVA = 100;
mpc.bus = [
    1 3 0  0 0 0 1 1 0 138 1 1.1 0.9;
    2 1 10 0 0 0 1 1 0 138 1 1.1 0.9;
    3 1 10 0 0 0 1 1 0 138 1 1.1 0.9;
    4 1 10 0 0 0 1 1 0 138 1 1.1 0.9;
];
mpc.gen = [
    1 0 0 100 -100 1.0 100 1 200 0;
];
mpc.branch = [
    1 2 0.0 0.1 0 0 0 0 0 0 1 -360 360;
    3 4 0.0 0.1 0 0 0 0 0 0 1 -360 360;
];
mpc.gencost = [
    2 0 0 2 25 0;
];
"#;
        let err = parse_case(text).unwrap_err();
        assert!(err.to_string().contains("islands"));
    }

    #[test]
    fn quadratic_cost_is_rejected() {
        let text = super::super::tests::TWO_BUS.replace("2 0 0 2 25 0", "2 0 0 3 0.1 25 0");
        let err = parse_case(&text).unwrap_err();
        assert!(err.to_string().contains("degree"));
        // but a 3-coefficient row with zero quadratic term is fine
        let text = super::super::tests::TWO_BUS.replace("2 0 0 2 25 0", "2 0 0 3 0 25 0");
        let case = parse_case(&text).unwrap();
        assert_eq!(case.generators[0].cost_linear, 25.0);
    }

    #[test]
    fn roundtrip_through_json() {
        let case = parse_case(CASE118).unwrap();
        let json = serde_json::to_string(&case).unwrap();
        let back: crate::network::NetworkCase = serde_json::from_str(&json).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }
}
