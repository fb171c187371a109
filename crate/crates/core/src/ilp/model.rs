use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::boolfn::{CertKind, CertTable, TruthTable};
use crate::error::Result;
use crate::passign::{self, pow3};

/// Model variable index: a partial-assignment code, or `3^n` for `Q`.
pub type Var = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Le,
    Eq,
}

/// Where a row comes from; determines its name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowKind {
    /// `g(b) - g(b_{x_var <- value}) <= 0`; `var` is 1-based.
    Mono { code: u32, var: u8, value: bool },
    /// Cycle inequality of the `id`-th small diagram.
    Subm { id: u32 },
    /// Value condition at `code`.
    Val { code: u32 },
}

impl fmt::Display for RowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RowKind::Mono { code, var, value } => write!(f, "mono_{code}_{var}_{}", value as u8),
            RowKind::Subm { id } => write!(f, "subm_{id}"),
            RowKind::Val { code } => write!(f, "val_{code}"),
        }
    }
}

impl RowKind {
    pub fn parse(name: &str) -> Option<Self> {
        let mut parts = name.split('_');
        let kind = parts.next()?;
        let mut num = || parts.next()?.parse::<u32>().ok();
        let row = match kind {
            "mono" => {
                let code = num()?;
                let var = u8::try_from(num()?).ok()?;
                let value = match num()? {
                    0 => false,
                    1 => true,
                    _ => return None,
                };
                RowKind::Mono { code, var, value }
            }
            "subm" => RowKind::Subm { id: num()? },
            "val" => RowKind::Val { code: num()? },
            _ => return None,
        };
        parts.next().is_none().then_some(row)
    }
}

/// A constraint with at most four unit-coefficient terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Row {
    pub kind: RowKind,
    terms: [(Var, i8); 4],
    len: u8,
    pub sense: Sense,
    pub rhs: i8,
}

impl Row {
    pub fn new(kind: RowKind, terms: &[(Var, i8)], sense: Sense, rhs: i8) -> Self {
        assert!(terms.len() <= 4, "rows carry at most four terms");
        let mut buf = [(0, 0); 4];
        buf[..terms.len()].copy_from_slice(terms);
        Self {
            kind,
            terms: buf,
            len: terms.len() as u8,
            sense,
            rhs,
        }
    }

    pub fn terms(&self) -> &[(Var, i8)] {
        &self.terms[..self.len as usize]
    }
}

/// Which value condition the model encodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTarget {
    /// `g = Q` on every certificate.
    Goal,
    /// `g = Q` on `k`-certificates only.
    KGoal(bool),
}

/// The integer program minimizing `Q` over goal functions of `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IpModel {
    pub f: TruthTable,
    pub target: ModelTarget,
    pub rows: Vec<Row>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelStats {
    pub variables: u64,
    pub constraints: u64,
}

impl IpModel {
    pub fn n(&self) -> usize {
        self.f.n()
    }

    /// Index of the `Q` variable.
    pub fn q_var(&self) -> Var {
        pow3(self.n())
    }

    pub fn num_vars(&self) -> usize {
        pow3(self.n()) as usize + 1
    }

    pub fn stats(&self) -> ModelStats {
        ModelStats {
            variables: self.num_vars() as u64,
            constraints: self.rows.len() as u64,
        }
    }

    pub fn var_name(&self, v: Var) -> String {
        if v == self.q_var() {
            String::from("Q")
        } else {
            alloc::format!("g{v}")
        }
    }
}

/// Closed-form sizes: `3^n + 1` variables and
/// `2n·3^(n-1) + 2n(n-1)·3^(n-2) + 3^n` constraints.
pub fn model_stats(n: usize) -> ModelStats {
    ModelStats {
        variables: passign::vertex_count(n) + 1,
        constraints: passign::edge_count(n) + passign::small_diagram_count(n) + passign::vertex_count(n),
    }
}

pub fn build_model(f: &TruthTable) -> Result<IpModel> {
    build(f, ModelTarget::Goal)
}

pub fn build_k_model(f: &TruthTable, k: bool) -> Result<IpModel> {
    build(f, ModelTarget::KGoal(k))
}

fn build(f: &TruthTable, target: ModelTarget) -> Result<IpModel> {
    let n = f.n();
    passign::check_arity(n)?;
    let certs = CertTable::new(f);
    let q = pow3(n);
    let empty = q - 1;
    let edges = passign::edge_count(n) as usize;
    let diagrams = passign::small_diagram_count(n) as usize;
    let mut rows = Vec::with_capacity(edges + diagrams + q as usize);
    for e in passign::edges(n) {
        let to = e.to().code();
        let kind = RowKind::Mono {
            code: e.from.code(),
            var: e.var as u8 + 1,
            value: e.value,
        };
        rows.push(Row::new(kind, &[(e.from.code(), 1), (to, -1)], Sense::Le, 0));
    }
    for (id, d) in passign::small_diagrams(n).enumerate() {
        let [a, b, ap, bp] = d.corners();
        let terms = [(bp, 1), (ap, -1), (a, 1), (b, -1)];
        rows.push(Row::new(RowKind::Subm { id: id as u32 }, &terms, Sense::Le, 0));
    }
    for code in 0..q {
        let kind = RowKind::Val { code };
        let hit = match target {
            ModelTarget::Goal => certs.kind(code).is_cert(),
            ModelTarget::KGoal(k) => certs.kind(code) == CertKind::of_value(k),
        };
        let row = if code == empty {
            Row::new(kind, &[(code, 1)], Sense::Eq, 0)
        } else if hit {
            Row::new(kind, &[(code, 1), (q, -1)], Sense::Eq, 0)
        } else {
            Row::new(kind, &[(code, 1), (q, -1)], Sense::Le, -1)
        };
        rows.push(row);
    }
    Ok(IpModel { f: f.clone(), target, rows })
}

/// Checks a labeling against every row of the model.
pub fn satisfies(model: &IpModel, g: &[u64], q: u64) -> bool {
    let value = |v: Var| if v == model.q_var() { q as i128 } else { g[v as usize] as i128 };
    model.rows.iter().all(|r| {
        let lhs: i128 = r.terms().iter().map(|&(v, c)| c as i128 * value(v)).sum();
        match r.sense {
            Sense::Le => lhs <= r.rhs as i128,
            Sense::Eq => lhs == r.rhs as i128,
        }
    })
}
