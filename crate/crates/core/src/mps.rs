//! MPS import and export.
//!
//! The writer lays records out on the classic fixed columns (field starts at
//! 2, 5, 15, 25, 40, 50) and widens a field only when a name or number does
//! not fit. The reader splits records on whitespace, so it accepts both the
//! fixed and the free layout as long as names contain no spaces.
//!
//! Extensions understood in both directions: an `OBJSENSE` section (`MAX` or
//! `MIN`), `INTORG`/`INTEND` markers, `BV` bounds for binaries, and an
//! objective constant stored as the negated right-hand side of the objective
//! row.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{Integrality, MipProblem, Relation, Sense};

const OBJ_ROW: &str = "obj";

fn num(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn record(out: &mut String, code: &str, fields: &[&str]) {
    let mut line = format!(" {code:<2}");
    let starts = [4usize, 14, 24, 39, 49];
    for (f, &start) in fields.iter().zip(&starts) {
        if !line.ends_with(' ') {
            line.push(' ');
        }
        while line.len() < start {
            line.push(' ');
        }
        line.push_str(f);
    }
    out.push_str(line.trim_end());
    out.push('\n');
}

/// Serializes `prob` as MPS text.
pub fn write_mps(prob: &MipProblem) -> String {
    let mut out = String::new();
    let name = if prob.name.is_empty() { "PROBLEM".to_string() } else { prob.name.replace(' ', "_") };
    writeln!(out, "NAME          {name}").unwrap();
    out.push_str("OBJSENSE\n");
    out.push_str(match prob.sense {
        Sense::Maximize => "    MAX\n",
        Sense::Minimize => "    MIN\n",
    });
    out.push_str("ROWS\n");
    record(&mut out, "N", &[OBJ_ROW]);
    for row in &prob.constraints {
        let code = match row.relation {
            Relation::Le => "L",
            Relation::Ge => "G",
            Relation::Eq => "E",
        };
        record(&mut out, code, &[&row.name]);
    }

    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); prob.num_vars()];
    for (r, row) in prob.constraints.iter().enumerate() {
        for &(c, a) in &row.coefficients {
            by_col[c].push((r, a));
        }
    }
    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut marker = 0;
    for (c, var) in prob.variables.iter().enumerate() {
        let integral = var.integrality.is_integral();
        if integral != in_int {
            let kind = if integral { "'INTORG'" } else { "'INTEND'" };
            record(&mut out, "", &[&format!("MARKER{marker:03}"), "'MARKER'", "", kind]);
            marker += 1;
            in_int = integral;
        }
        let mut entries: Vec<(&str, f64)> = Vec::new();
        if prob.objective[c] != 0.0 {
            entries.push((OBJ_ROW, prob.objective[c]));
        }
        entries.extend(by_col[c].iter().map(|&(r, a)| (prob.constraints[r].name.as_str(), a)));
        if entries.is_empty() {
            // keep the column declared
            entries.push((OBJ_ROW, 0.0));
        }
        for pair in entries.chunks(2) {
            let mut fields = vec![var.name.as_str()];
            let vals: Vec<String> = pair.iter().map(|e| num(e.1)).collect();
            for (e, v) in pair.iter().zip(&vals) {
                fields.push(e.0);
                fields.push(v);
            }
            let refs: Vec<&str> = fields.to_vec();
            record(&mut out, "", &refs);
        }
    }
    if in_int {
        record(&mut out, "", &[&format!("MARKER{marker:03}"), "'MARKER'", "", "'INTEND'"]);
    }

    out.push_str("RHS\n");
    if prob.objective_constant != 0.0 {
        record(&mut out, "", &["RHS", OBJ_ROW, &num(-prob.objective_constant)]);
    }
    for row in &prob.constraints {
        if row.rhs != 0.0 {
            record(&mut out, "", &["RHS", &row.name, &num(row.rhs)]);
        }
    }

    out.push_str("BOUNDS\n");
    for var in &prob.variables {
        let (lo, hi) = (var.lower, var.upper);
        let n = var.name.as_str();
        let binary = var.integrality == Integrality::Binary;
        if binary {
            record(&mut out, "BV", &["BND", n]);
            if lo == 0.0 && hi == 1.0 {
                continue;
            }
        }
        if lo == hi {
            record(&mut out, "FX", &["BND", n, &num(lo)]);
        } else if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
            record(&mut out, "FR", &["BND", n]);
        } else {
            if lo == f64::NEG_INFINITY {
                record(&mut out, "MI", &["BND", n]);
            } else if lo != 0.0 || binary {
                record(&mut out, "LO", &["BND", n, &num(lo)]);
            }
            if hi.is_finite() {
                record(&mut out, "UP", &["BND", n, &num(hi)]);
            } else if var.integrality.is_integral() {
                record(&mut out, "PL", &["BND", n]);
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    ObjSense,
    Rows,
    Columns,
    Rhs,
    Bounds,
    End,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Mps { line, message: message.into() }
}

fn parse_num(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().map_err(|_| err(line, format!("`{tok}` is not a number")))
}

/// Parses MPS text. Structured column keys are not recovered, so
/// `var_index` of the result is empty.
pub fn read_mps(text: &str) -> Result<MipProblem> {
    let mut prob = MipProblem::new("", Sense::Minimize);
    let mut section = Section::None;
    let mut obj_name: Option<String> = None;
    let mut rows: HashMap<String, usize> = HashMap::new();
    let mut cols: HashMap<String, usize> = HashMap::new();
    let mut in_int = false;
    let mut explicit_upper: Vec<bool> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with([' ', '\t']) {
            section = match toks[0] {
                "NAME" => {
                    prob.name = toks.get(1).copied().unwrap_or("").to_string();
                    Section::None
                }
                "OBJSENSE" => {
                    if let Some(s) = toks.get(1) {
                        prob.sense = parse_sense(s, ln)?;
                        Section::None
                    } else {
                        Section::ObjSense
                    }
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "RANGES" => return Err(err(ln, "RANGES is not supported")),
                "ENDATA" => Section::End,
                other => return Err(err(ln, format!("unknown section `{other}`"))),
            };
            if section == Section::End {
                break;
            }
            continue;
        }
        match section {
            Section::ObjSense => prob.sense = parse_sense(toks[0], ln)?,
            Section::Rows => {
                if toks.len() != 2 {
                    return Err(err(ln, "ROWS record needs a type and a name"));
                }
                let relation = match toks[0] {
                    "N" => {
                        if obj_name.is_none() {
                            obj_name = Some(toks[1].to_string());
                        }
                        continue;
                    }
                    "L" => Relation::Le,
                    "G" => Relation::Ge,
                    "E" => Relation::Eq,
                    t => return Err(err(ln, format!("unknown row type `{t}`"))),
                };
                if rows.insert(toks[1].to_string(), prob.constraints.len()).is_some() {
                    return Err(err(ln, format!("duplicate row `{}`", toks[1])));
                }
                prob.add_constraint(toks[1], Vec::new(), relation, 0.0);
            }
            Section::Columns => {
                if toks.len() >= 3 && toks[1] == "'MARKER'" {
                    match toks[toks.len() - 1] {
                        "'INTORG'" => in_int = true,
                        "'INTEND'" => in_int = false,
                        m => return Err(err(ln, format!("unknown marker {m}"))),
                    }
                    continue;
                }
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(err(ln, "COLUMNS record needs one or two (row, value) pairs"));
                }
                let c = match cols.get(toks[0]) {
                    Some(&c) => c,
                    None => {
                        let integrality = if in_int { Integrality::Integer } else { Integrality::Continuous };
                        let c = prob.add_variable(toks[0], 0.0, f64::INFINITY, integrality, 0.0);
                        cols.insert(toks[0].to_string(), c);
                        explicit_upper.push(false);
                        c
                    }
                };
                for pair in toks[1..].chunks(2) {
                    let v = parse_num(pair[1], ln)?;
                    if obj_name.as_deref() == Some(pair[0]) {
                        prob.objective[c] += v;
                    } else if let Some(&r) = rows.get(pair[0]) {
                        if v != 0.0 {
                            prob.constraints[r].coefficients.push((c, v));
                        }
                    } else {
                        return Err(err(ln, format!("unknown row `{}`", pair[0])));
                    }
                }
            }
            Section::Rhs => {
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(err(ln, "RHS record needs a set name and (row, value) pairs"));
                }
                for pair in toks[1..].chunks(2) {
                    let v = parse_num(pair[1], ln)?;
                    if obj_name.as_deref() == Some(pair[0]) {
                        prob.objective_constant = -v;
                    } else if let Some(&r) = rows.get(pair[0]) {
                        prob.constraints[r].rhs = v;
                    } else {
                        return Err(err(ln, format!("unknown row `{}`", pair[0])));
                    }
                }
            }
            Section::Bounds => {
                if toks.len() < 3 {
                    return Err(err(ln, "BOUNDS record needs a type, set name and column"));
                }
                let &c = cols.get(toks[2]).ok_or_else(|| err(ln, format!("unknown column `{}`", toks[2])))?;
                let value = || -> Result<f64> {
                    let t = toks.get(3).ok_or_else(|| err(ln, "missing bound value"))?;
                    parse_num(t, ln)
                };
                let var = &mut prob.variables[c];
                match toks[0] {
                    "UP" => {
                        var.upper = value()?;
                        explicit_upper[c] = true;
                    }
                    "LO" => var.lower = value()?,
                    "FX" => {
                        let v = value()?;
                        var.lower = v;
                        var.upper = v;
                        explicit_upper[c] = true;
                    }
                    "FR" => {
                        var.lower = f64::NEG_INFINITY;
                        var.upper = f64::INFINITY;
                        explicit_upper[c] = true;
                    }
                    "MI" => var.lower = f64::NEG_INFINITY,
                    "PL" => {
                        var.upper = f64::INFINITY;
                        explicit_upper[c] = true;
                    }
                    "BV" => {
                        var.lower = 0.0;
                        var.upper = 1.0;
                        var.integrality = Integrality::Binary;
                        explicit_upper[c] = true;
                    }
                    t => return Err(err(ln, format!("unsupported bound type `{t}`"))),
                }
            }
            Section::None => return Err(err(ln, "record outside of a section")),
            Section::End => unreachable!(),
        }
    }
    // Integer columns without an upper bound default to binary range.
    for (var, &ex) in prob.variables.iter_mut().zip(&explicit_upper) {
        if var.integrality == Integrality::Integer && !ex {
            var.upper = 1.0;
        }
    }
    for row in &mut prob.constraints {
        row.coefficients.sort_by_key(|e| e.0);
    }
    Ok(prob)
}

fn parse_sense(tok: &str, line: usize) -> Result<Sense> {
    match tok {
        "MAX" | "MAXIMIZE" => Ok(Sense::Maximize),
        "MIN" | "MINIMIZE" => Ok(Sense::Minimize),
        t => Err(err(line, format!("unknown objective sense `{t}`"))),
    }
}
