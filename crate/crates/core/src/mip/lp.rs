//! CPLEX LP-format writer and a reader for the subset it emits.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::model::{MilpModel, Sense, VarKind};
use super::MipError;

/// Twelve significant digits, shortest form, no trailing `.0`.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "+inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    let s = format!("{rounded:?}");
    match s.strip_suffix(".0") {
        Some(t) => t.to_string(),
        None => s,
    }
}

fn write_expr(out: &mut String, model: &MilpModel, terms: &[(usize, f64)]) {
    let mut first = true;
    for &(j, a) in terms {
        if a == 0.0 {
            continue;
        }
        let name = &model.vars[j].name;
        let mag = a.abs();
        if first {
            if a < 0.0 {
                out.push_str(" -");
            }
        } else {
            out.push_str(if a < 0.0 { " -" } else { " +" });
        }
        if mag == 1.0 {
            let _ = write!(out, " {name}");
        } else {
            let _ = write!(out, " {} {name}", fmt_num(mag));
        }
        first = false;
    }
    if first {
        out.push_str(" 0");
    }
}

/// Deterministic LP text: variables and rows in model order.
pub fn export_lp(model: &MilpModel) -> Result<String, MipError> {
    model.validate()?;
    let mut out = String::new();
    for c in &model.comments {
        let _ = writeln!(out, "\\ {c}");
    }
    if model.obj_constant != 0.0 {
        let _ = writeln!(out, "\\ objective constant: {}", fmt_num(model.obj_constant));
    }
    out.push_str("Maximize\n obj:");
    write_expr(&mut out, model, &model.objective);
    out.push('\n');
    if !model.cons.is_empty() {
        out.push_str("Subject To\n");
        for c in &model.cons {
            let _ = write!(out, " {}:", c.name);
            write_expr(&mut out, model, &c.terms);
            let _ = writeln!(out, " {} {}", c.sense.symbol(), fmt_num(c.rhs));
        }
    }
    if !model.vars.is_empty() {
        out.push_str("Bounds\n");
        for v in &model.vars {
            if v.lb == f64::NEG_INFINITY && v.ub == f64::INFINITY {
                let _ = writeln!(out, " {} free", v.name);
            } else if v.lb == v.ub {
                let _ = writeln!(out, " {} = {}", v.name, fmt_num(v.lb));
            } else {
                let _ = writeln!(out, " {} <= {} <= {}", fmt_num(v.lb), v.name, fmt_num(v.ub));
            }
        }
    }
    let generals: Vec<&str> =
        model.vars.iter().filter(|v| v.kind == VarKind::Integer).map(|v| v.name.as_str()).collect();
    if !generals.is_empty() {
        out.push_str("Generals\n");
        for n in generals {
            let _ = writeln!(out, " {n}");
        }
    }
    let binaries: Vec<&str> =
        model.vars.iter().filter(|v| v.kind == VarKind::Binary).map(|v| v.name.as_str()).collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for n in binaries {
            let _ = writeln!(out, " {n}");
        }
    }
    out.push_str("End\n");
    Ok(out)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Rows,
    Bounds,
    Generals,
    Binaries,
    Done,
}

fn parse_num(tok: &str, line: usize) -> Result<f64, MipError> {
    match tok {
        "+inf" | "inf" | "+infinity" | "infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => tok.parse().map_err(|_| MipError::Parse { line, message: format!("bad number `{tok}`") }),
    }
}

struct Builder {
    model: MilpModel,
    index: HashMap<String, usize>,
}

impl Builder {
    fn var(&mut self, name: &str) -> usize {
        if let Some(&j) = self.index.get(name) {
            return j;
        }
        let j = self.model.add_var(name, VarKind::Continuous, 0.0, f64::INFINITY);
        self.index.insert(name.to_string(), j);
        j
    }
}

fn is_number(tok: &str) -> bool {
    tok.parse::<f64>().is_ok()
}

/// Parses `[-] [coef] name (+|-) [coef] name ...` into terms.
fn parse_terms(b: &mut Builder, toks: &[&str], line: usize) -> Result<Vec<(usize, f64)>, MipError> {
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for &t in toks {
        match t {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            _ if is_number(t) => coef = Some(parse_num(t, line)?),
            _ => {
                let j = b.var(t);
                terms.push((j, sign * coef.unwrap_or(1.0)));
                sign = 1.0;
                coef = None;
            }
        }
    }
    if coef.is_some_and(|c| c != 0.0) {
        return Err(MipError::Parse { line, message: "dangling coefficient".into() });
    }
    Ok(terms)
}

/// Reads LP text produced by [`export_lp`].
pub fn parse_lp(text: &str) -> Result<MilpModel, MipError> {
    let mut b = Builder { model: MilpModel::new(), index: HashMap::new() };
    // Variables are declared in Bounds order, which is model order.
    let mut in_bounds = false;
    for raw in text.lines() {
        let t = raw.trim();
        if t.starts_with('\\') || t.is_empty() {
            continue;
        }
        let lower = t.to_ascii_lowercase();
        if lower == "bounds" {
            in_bounds = true;
            continue;
        }
        if matches!(lower.as_str(), "generals" | "general" | "integers" | "binaries" | "binary" | "end") {
            in_bounds = false;
        }
        if in_bounds {
            let toks: Vec<&str> = t.split_whitespace().collect();
            let name = match toks.as_slice() {
                [_, "<=", name, "<=", _] => name,
                [name, ..] => name,
                [] => continue,
            };
            b.var(name);
        }
    }
    let mut section = Section::Preamble;
    let mut objective_terms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if let Some(c) = trimmed.strip_prefix('\\') {
            let c = c.trim();
            if let Some(v) = c.strip_prefix("objective constant:") {
                b.model.obj_constant = parse_num(v.trim(), line)?;
            } else if section == Section::Preamble {
                b.model.comments.push(c.to_string());
            }
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        match trimmed.to_ascii_lowercase().as_str() {
            "maximize" | "maximum" | "max" => {
                section = Section::Objective;
                continue;
            }
            "minimize" | "minimum" | "min" => {
                return Err(MipError::Parse { line, message: "only maximization models are supported".into() })
            }
            "subject to" | "such that" | "st" | "s.t." => {
                section = Section::Rows;
                continue;
            }
            "bounds" => {
                section = Section::Bounds;
                continue;
            }
            "generals" | "general" | "integers" => {
                section = Section::Generals;
                continue;
            }
            "binaries" | "binary" => {
                section = Section::Binaries;
                continue;
            }
            "end" => {
                section = Section::Done;
                continue;
            }
            _ => {}
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        match section {
            Section::Preamble | Section::Done => {
                return Err(MipError::Parse { line, message: format!("unexpected `{trimmed}`") })
            }
            Section::Objective => {
                let body = match toks.first() {
                    Some(t) if t.ends_with(':') => &toks[1..],
                    _ => &toks[..],
                };
                objective_terms.extend(parse_terms(&mut b, body, line)?);
            }
            Section::Rows => {
                let Some(label) = toks.first().and_then(|t| t.strip_suffix(':')) else {
                    return Err(MipError::Parse { line, message: "rows must be named".into() });
                };
                let pos = toks
                    .iter()
                    .position(|t| matches!(*t, "<=" | ">=" | "=" | "=<" | "=>"))
                    .ok_or_else(|| MipError::Parse { line, message: "row without a sense".into() })?;
                let sense = match toks[pos] {
                    "<=" | "=<" => Sense::Le,
                    ">=" | "=>" => Sense::Ge,
                    _ => Sense::Eq,
                };
                let rhs_tok = toks.get(pos + 1).ok_or_else(|| MipError::Parse { line, message: "missing rhs".into() })?;
                let rhs = parse_num(rhs_tok, line)?;
                let terms = parse_terms(&mut b, &toks[1..pos], line)?;
                b.model.add_con(label, terms, sense, rhs);
            }
            Section::Bounds => match toks.as_slice() {
                [name, "free"] => {
                    let j = b.var(name);
                    b.model.vars[j].lb = f64::NEG_INFINITY;
                    b.model.vars[j].ub = f64::INFINITY;
                }
                [lo, "<=", name, "<=", hi] => {
                    let j = b.var(name);
                    b.model.vars[j].lb = parse_num(lo, line)?;
                    b.model.vars[j].ub = parse_num(hi, line)?;
                }
                [name, "=", v] => {
                    let j = b.var(name);
                    let v = parse_num(v, line)?;
                    b.model.vars[j].lb = v;
                    b.model.vars[j].ub = v;
                }
                [name, "<=", v] if !is_number(name) => {
                    let j = b.var(name);
                    b.model.vars[j].ub = parse_num(v, line)?;
                }
                [name, ">=", v] if !is_number(name) => {
                    let j = b.var(name);
                    b.model.vars[j].lb = parse_num(v, line)?;
                }
                _ => return Err(MipError::Parse { line, message: format!("unsupported bound `{trimmed}`") }),
            },
            Section::Generals | Section::Binaries => {
                for t in toks {
                    let j = b.var(t);
                    let v = &mut b.model.vars[j];
                    if section == Section::Binaries {
                        v.kind = VarKind::Binary;
                        v.lb = 0.0;
                        v.ub = 1.0;
                    } else {
                        v.kind = VarKind::Integer;
                    }
                }
            }
        }
    }
    if section != Section::Done {
        return Err(MipError::Parse { line: text.lines().count(), message: "missing `End`".into() });
    }
    for (j, a) in objective_terms {
        b.model.add_obj(j, a);
    }
    Ok(b.model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_variable_model() {
        let mut m = MilpModel::new();
        let x = m.add_var("x", VarKind::Continuous, 0.0, 3.0);
        m.add_obj(x, 1.0);
        assert_eq!(export_lp(&m).unwrap(), "Maximize\n obj: x\nBounds\n 0 <= x <= 3\nEnd\n");
    }

    #[test]
    fn numbers_keep_twelve_digits() {
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(-2.5), "-2.5");
        assert_eq!(fmt_num(1e-20), "1e-20");
        assert_eq!(fmt_num(123456789012345.0), "123456789012000");
        assert_eq!(fmt_num(50.0), "50");
    }

    #[test]
    fn round_trip() {
        let mut m = MilpModel::new();
        m.comments.push("test model".into());
        let x = m.add_var("x_S_R1", VarKind::Integer, 0.0, 10.0);
        let g = m.add_var("g_S_R1", VarKind::Binary, 0.0, 1.0);
        let s = m.add_var("sa_R1_0", VarKind::Continuous, 0.0, 2.0);
        let f = m.add_var("free_v", VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY);
        let z = m.add_var("fixed_v", VarKind::Continuous, 1.5, 1.5);
        m.add_obj(s, 50.0);
        m.add_obj(g, -50.0);
        m.add_obj(f, 0.25);
        m.obj_constant = 3.5;
        m.add_con("ind1", vec![(g, 1.0), (x, -1.0)], Sense::Le, 0.0);
        m.add_con("ind2", vec![(x, 1.0), (g, -10.0)], Sense::Le, 0.0);
        m.add_con("bal", vec![(s, 1.0), (f, -1.0), (z, 2.0)], Sense::Eq, -0.125);
        m.add_con("lo", vec![(f, 1.0)], Sense::Ge, -7.0);
        let text = export_lp(&m).unwrap();
        let back = parse_lp(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(export_lp(&back).unwrap(), text);
    }

    #[test]
    fn name_collisions_are_rejected() {
        let mut m = MilpModel::new();
        m.add_var("x", VarKind::Continuous, 0.0, 1.0);
        m.add_var("x", VarKind::Continuous, 0.0, 1.0);
        assert!(matches!(export_lp(&m), Err(MipError::NameCollision(_))));
        let mut m = MilpModel::new();
        m.add_var("e12", VarKind::Continuous, 0.0, 1.0);
        assert!(export_lp(&m).is_err());
    }
}
