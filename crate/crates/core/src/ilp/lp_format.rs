//! Plain-text LP format (objective, named rows, integer section).
//!
//! The header comment records `n`, the hex truth table and the target so
//! that parsing restores the model exactly.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::model::{IpModel, ModelTarget, Row, RowKind, Sense, Var};
use crate::boolfn::TruthTable;
use crate::error::{Error, Result};
use crate::passign::pow3;

pub fn write_lp(m: &IpModel) -> String {
    let mut out = String::with_capacity(m.rows.len() * 32 + 64);
    let target = match m.target {
        ModelTarget::Goal => String::from("goal"),
        ModelTarget::KGoal(k) => alloc::format!("kgoal{}", k as u8),
    };
    let _ = writeln!(out, "\\ goal value model n={} f={} target={target}", m.n(), m.f.to_hex());
    out.push_str("Minimize\n obj: Q\nSubject To\n");
    for r in &m.rows {
        let _ = write!(out, " {}:", r.kind);
        for (idx, &(v, c)) in r.terms().iter().enumerate() {
            let sign = if c < 0 { "-" } else if idx > 0 { "+" } else { "" };
            let name = m.var_name(v);
            match (c.unsigned_abs(), sign.is_empty()) {
                (1, true) => write!(out, " {name}"),
                (1, false) => write!(out, " {sign} {name}"),
                (a, _) => write!(out, " {sign} {a} {name}"),
            }
            .ok();
        }
        let op = match r.sense {
            Sense::Le => "<=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", r.rhs);
    }
    out.push_str("General\n");
    let nv = m.num_vars() as Var;
    for chunk in (0..nv).collect::<Vec<_>>().chunks(16) {
        out.push(' ');
        for (idx, &v) in chunk.iter().enumerate() {
            if idx > 0 {
                out.push(' ');
            }
            out.push_str(&m.var_name(v));
        }
        out.push('\n');
    }
    out.push_str("End\n");
    out
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos: line,
        msg: msg.into(),
    }
}

#[derive(PartialEq)]
enum Section {
    Header,
    Objective,
    Constraints,
    General,
    Done,
}

/// Parses text written by [`write_lp`]; positions in errors are 1-based lines.
pub fn parse_lp(text: &str) -> Result<IpModel> {
    let mut header: Option<(usize, TruthTable, ModelTarget)> = None;
    let mut rows = Vec::new();
    let mut section = Section::Header;
    let mut general = 0usize;
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('\\') {
            if header.is_none() {
                header = Some(parse_header(comment, ln)?);
            }
            continue;
        }
        match line.to_ascii_lowercase().as_str() {
            "minimize" | "minimise" | "min" => {
                section = Section::Objective;
                continue;
            }
            "subject to" | "st" | "s.t." => {
                section = Section::Constraints;
                continue;
            }
            "general" | "generals" | "gen" => {
                section = Section::General;
                continue;
            }
            "end" => {
                section = Section::Done;
                continue;
            }
            _ => {}
        }
        let (n, _, _) = header.as_ref().ok_or_else(|| perr(ln, "missing model header comment"))?;
        let q = pow3(*n);
        match section {
            Section::Objective => {
                let expr = line.split_once(':').map_or(line, |(_, e)| e).trim();
                if expr != "Q" {
                    return Err(perr(ln, "objective must be `Q`"));
                }
            }
            Section::Constraints => rows.push(parse_row(line, q, ln)?),
            Section::General => {
                for tok in line.split_whitespace() {
                    parse_var(tok, q).ok_or_else(|| perr(ln, alloc::format!("unknown variable `{tok}`")))?;
                    general += 1;
                }
            }
            Section::Header | Section::Done => return Err(perr(ln, "text outside a section")),
        }
    }
    let (n, f, target) = header.ok_or_else(|| perr(1, "missing model header comment"))?;
    if section != Section::Done {
        return Err(perr(text.lines().count(), "missing `End`"));
    }
    if general != pow3(n) as usize + 1 {
        return Err(perr(text.lines().count(), "integer section must list every variable"));
    }
    Ok(IpModel { f, target, rows })
}

fn parse_header(comment: &str, ln: usize) -> Result<(usize, TruthTable, ModelTarget)> {
    let mut n = None;
    let mut hex = None;
    let mut target = None;
    for tok in comment.split_whitespace() {
        if let Some(v) = tok.strip_prefix("n=") {
            n = Some(v.parse::<usize>().map_err(|_| perr(ln, "bad arity"))?);
        } else if let Some(v) = tok.strip_prefix("f=") {
            hex = Some(v);
        } else if let Some(v) = tok.strip_prefix("target=") {
            target = Some(match v {
                "goal" => ModelTarget::Goal,
                "kgoal0" => ModelTarget::KGoal(false),
                "kgoal1" => ModelTarget::KGoal(true),
                _ => return Err(perr(ln, "unknown target")),
            });
        }
    }
    match (n, hex, target) {
        (Some(n), Some(hex), Some(t)) => Ok((n, TruthTable::from_hex(n, hex)?, t)),
        _ => Err(perr(ln, "header must give n, f and target")),
    }
}

fn parse_var(tok: &str, q: Var) -> Option<Var> {
    if tok == "Q" {
        return Some(q);
    }
    let v: Var = tok.strip_prefix('g')?.parse().ok()?;
    (v < q).then_some(v)
}

fn parse_row(line: &str, q: Var, ln: usize) -> Result<Row> {
    let (name, body) = line.split_once(':').ok_or_else(|| perr(ln, "row needs a name"))?;
    let kind = RowKind::parse(name.trim()).ok_or_else(|| perr(ln, alloc::format!("unrecognized row name `{}`", name.trim())))?;
    let (lhs, sense, rhs) = if let Some((l, r)) = body.split_once("<=") {
        (l, Sense::Le, r)
    } else if let Some((l, r)) = body.split_once('=') {
        (l, Sense::Eq, r)
    } else {
        return Err(perr(ln, "row needs `<=` or `=`"));
    };
    let rhs: i8 = rhs.trim().parse().map_err(|_| perr(ln, "bad right-hand side"))?;
    let mut terms: Vec<(Var, i8)> = Vec::new();
    let mut sign = 1i8;
    let mut coef: Option<i8> = None;
    for tok in lhs.split_whitespace() {
        match tok {
            "+" => sign = 1,
            "-" => sign = -1,
            _ => {
                if let Ok(c) = tok.parse::<i8>() {
                    coef = Some(c);
                    continue;
                }
                let v = parse_var(tok, q).ok_or_else(|| perr(ln, alloc::format!("unknown variable `{tok}`")))?;
                terms.push((v, sign * coef.take().unwrap_or(1)));
                sign = 1;
            }
        }
    }
    if terms.is_empty() || terms.len() > 4 {
        return Err(perr(ln, "rows carry one to four terms"));
    }
    Ok(Row::new(kind, &terms, sense, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::Family;
    use crate::ilp::model::{build_k_model, build_model};

    #[test]
    fn round_trip() {
        for f in [
            Family::Or.build(2).unwrap(),
            Family::KofN { k: 2 }.build(3).unwrap(),
            Family::Pairs.build(4).unwrap(),
        ] {
            let m = build_model(&f).unwrap();
            assert_eq!(parse_lp(&write_lp(&m)).unwrap(), m);
            let k = build_k_model(&f, false).unwrap();
            assert_eq!(parse_lp(&write_lp(&k)).unwrap(), k);
        }
    }

    #[test]
    fn or2_export() {
        let m = build_model(&Family::Or.build(2).unwrap()).unwrap();
        let text = write_lp(&m);
        let rows = text.lines().filter(|l| l.starts_with(" mono_") || l.starts_with(" subm_") || l.starts_with(" val_"));
        assert_eq!(rows.count(), 25);
        assert!(text.contains(" val_8: g8 = 0\n"));
        assert!(text.contains(" mono_8_1_0: g8 - g6 <= 0\n"));
        let general: usize = text
            .split("General\n")
            .nth(1)
            .unwrap()
            .lines()
            .take_while(|l| *l != "End")
            .map(|l| l.split_whitespace().count())
            .sum();
        assert_eq!(general, 10);
    }

    #[test]
    fn rejects_malformed() {
        let m = build_model(&Family::Or.build(2).unwrap()).unwrap();
        let text = write_lp(&m);
        assert!(parse_lp(&text.replace("n=2", "n=x")).is_err());
        assert!(parse_lp(&text.replace("End\n", "")).is_err());
        assert!(parse_lp(&text.replace("mono_8_1_0", "mono_8_1")).is_err());
        assert!(parse_lp(&text.replace("g6 <= 0", "g6 >> 0")).is_err());
        assert!(parse_lp(&text.replace(" obj: Q", " obj: g1")).is_err());
    }
}
