//! Two-level formulas (DNF and CNF) over literals `x_i` / `~x_i`.
//!
//! Text forms: a DNF is terms joined by `|`, each term literals joined by
//! `&`; the empty DNF is `0` and the empty term is `1`. A CNF is the dual:
//! parenthesized clauses joined by `&`, literals inside joined by `|`; the
//! empty CNF is `1` and the empty clause is `0`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::TruthTable;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Self { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Self { var, positive: false }
    }

    #[inline]
    pub fn holds(&self, x: usize) -> bool {
        ((x >> self.var) & 1 == 1) == self.positive
    }

    pub fn complement(self) -> Self {
        Self {
            var: self.var,
            positive: !self.positive,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("~")?;
        }
        write!(f, "x{}", self.var + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FormKind {
    Dnf,
    Cnf,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CnfDnf {
    pub n: usize,
    pub kind: FormKind,
    /// Terms of a DNF or clauses of a CNF.
    pub terms: Vec<Vec<Literal>>,
}

impl CnfDnf {
    pub fn new(n: usize, kind: FormKind, terms: Vec<Vec<Literal>>) -> Result<Self> {
        let form = Self { n, kind, terms };
        form.validate()?;
        Ok(form)
    }

    fn validate(&self) -> Result<()> {
        for term in &self.terms {
            for (a, l) in term.iter().enumerate() {
                if l.var >= self.n {
                    return Err(Error::UnknownVariable(l.var + 1));
                }
                if term[a + 1..].iter().any(|m| m.var == l.var && m.positive != l.positive) {
                    return Err(Error::InvalidParams(alloc::format!(
                        "term contains both x{0} and ~x{0}",
                        l.var + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: usize) -> bool {
        match self.kind {
            FormKind::Dnf => self.terms.iter().any(|t| t.iter().all(|l| l.holds(x))),
            FormKind::Cnf => self.terms.iter().all(|c| c.iter().any(|l| l.holds(x))),
        }
    }

    pub fn to_truth_table(&self) -> Result<TruthTable> {
        TruthTable::from_fn(self.n, |x| self.eval(x))
    }

    pub fn represents(&self, f: &TruthTable) -> bool {
        f.n() == self.n && (0..f.len()).all(|x| self.eval(x) == f.get(x))
    }

    pub fn parse(n: usize, kind: FormKind, text: &str) -> Result<Self> {
        let text = text.trim();
        let (outer, inner, unit, zero) = match kind {
            FormKind::Dnf => ('|', '&', "1", "0"),
            FormKind::Cnf => ('&', '|', "0", "1"),
        };
        if text == zero {
            return Self::new(n, kind, Vec::new());
        }
        let mut terms = Vec::new();
        let mut offset = 0usize;
        for raw in text.split(outer) {
            let pos = offset + (raw.len() - raw.trim_start().len());
            offset += raw.len() + 1;
            let mut part = raw.trim();
            if kind == FormKind::Cnf {
                part = part
                    .strip_prefix('(')
                    .and_then(|p| p.strip_suffix(')'))
                    .map(str::trim)
                    .unwrap_or(part);
            }
            if part == unit {
                terms.push(Vec::new());
                continue;
            }
            let mut term = Vec::new();
            for lit in part.split(inner) {
                term.push(parse_literal(lit.trim(), pos)?);
            }
            terms.push(term);
        }
        Self::new(n, kind, terms)
    }
}

fn parse_literal(s: &str, pos: usize) -> Result<Literal> {
    let (positive, rest) = match s.strip_prefix('~') {
        Some(r) => (false, r.trim_start()),
        None => (true, s),
    };
    let digits = rest.strip_prefix('x').ok_or_else(|| Error::Parse {
        pos,
        msg: alloc::format!("expected literal, found `{s}`"),
    })?;
    let v: usize = digits.parse().map_err(|_| Error::Parse {
        pos,
        msg: alloc::format!("bad variable index in `{s}`"),
    })?;
    if v == 0 {
        return Err(Error::Parse {
            pos,
            msg: String::from("variables are numbered from x1"),
        });
    }
    Ok(Literal { var: v - 1, positive })
}

impl fmt::Display for CnfDnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (outer, inner, unit, zero) = match self.kind {
            FormKind::Dnf => (" | ", " & ", "1", "0"),
            FormKind::Cnf => (" & ", " | ", "0", "1"),
        };
        if self.terms.is_empty() {
            return f.write_str(zero);
        }
        for (k, term) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(outer)?;
            }
            let wrap = self.kind == FormKind::Cnf && self.terms.len() > 1 && term.len() > 1;
            if wrap {
                f.write_str("(")?;
            }
            if term.is_empty() {
                f.write_str(unit)?;
            }
            for (a, l) in term.iter().enumerate() {
                if a > 0 {
                    f.write_str(inner)?;
                }
                write!(f, "{l}")?;
            }
            if wrap {
                f.write_str(")")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn parse_and_print_dnf() {
        let d = CnfDnf::parse(4, FormKind::Dnf, "x1 & x2 | x3 & ~x4").unwrap();
        assert_eq!(d.terms, vec![vec![Literal::pos(0), Literal::pos(1)], vec![Literal::pos(2), Literal::neg(3)]]);
        assert_eq!(d.to_string(), "x1 & x2 | x3 & ~x4");
        assert_eq!(CnfDnf::parse(4, FormKind::Dnf, &d.to_string()).unwrap(), d);
        assert!(CnfDnf::parse(2, FormKind::Dnf, "x1 & ~x1").is_err());
        assert!(CnfDnf::parse(2, FormKind::Dnf, "x3").is_err());
        assert!(CnfDnf::parse(2, FormKind::Dnf, "y1").is_err());
    }

    #[test]
    fn parse_and_print_cnf() {
        let c = CnfDnf::parse(3, FormKind::Cnf, "(x1 | x2) & (~x3 | x1)").unwrap();
        assert!(!c.eval(0b000));
        assert!(c.eval(0b001));
        assert!(!c.eval(0b110));
        assert_eq!(CnfDnf::parse(3, FormKind::Cnf, &c.to_string()).unwrap(), c);
    }

    #[test]
    fn constants() {
        let zero = CnfDnf::parse(2, FormKind::Dnf, "0").unwrap();
        let one = CnfDnf::parse(2, FormKind::Dnf, "1").unwrap();
        assert!(zero.is_empty());
        assert_eq!(one.terms, vec![Vec::<Literal>::new()]);
        assert!((0..4).all(|x| !zero.eval(x) && one.eval(x)));
        let c1 = CnfDnf::parse(2, FormKind::Cnf, "1").unwrap();
        let c0 = CnfDnf::parse(2, FormKind::Cnf, "0").unwrap();
        assert!((0..4).all(|x| c1.eval(x) && !c0.eval(x)));
        assert_eq!(c0.to_string(), "0");
        assert_eq!(one.to_string(), "1");
    }
}
