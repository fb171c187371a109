//! Read-once AND/OR formulas.
//!
//! For a read-once `f` the goal value has a closed form, `Γ(f) = ds(f)·cs(f)`
//! with `Γ⁰(f) = ds(f)` and `Γ¹(f) = cs(f)`, and `ds`/`cs` follow from one
//! pass over the tree. Text form: a literal is `x<i>` or `~x<i>`; a gate is a
//! parenthesized list joined by a single operator, `&` or `|`. The outermost
//! parentheses may be omitted.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{certificates_intersect_once, Literal, TruthTable};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    And,
    Or,
}

impl Op {
    pub fn dual(self) -> Op {
        match self {
            Op::And => Op::Or,
            Op::Or => Op::And,
        }
    }

    fn symbol(self) -> char {
        match self {
            Op::And => '&',
            Op::Or => '|',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Lit(Literal),
    Gate(Op, Vec<Node>),
}

impl Node {
    fn eval(&self, x: usize) -> bool {
        match self {
            Node::Lit(l) => l.holds(x),
            Node::Gate(Op::And, cs) => cs.iter().all(|c| c.eval(x)),
            Node::Gate(Op::Or, cs) => cs.iter().any(|c| c.eval(x)),
        }
    }

    fn collect_vars(&self, out: &mut Vec<usize>) {
        match self {
            Node::Lit(l) => out.push(l.var),
            Node::Gate(_, cs) => cs.iter().for_each(|c| c.collect_vars(out)),
        }
    }

    fn ds_cs(&self) -> Option<(u128, u128)> {
        match self {
            Node::Lit(_) => Some((1, 1)),
            Node::Gate(op, cs) => {
                let mut prod = 1u128;
                let mut sum = 0u128;
                for c in cs {
                    let (d, k) = c.ds_cs()?;
                    // AND multiplies terms and adds clauses; OR is the dual
                    let (p, s) = if *op == Op::And { (d, k) } else { (k, d) };
                    prod = prod.checked_mul(p)?;
                    sum = sum.checked_add(s)?;
                }
                Some(if *op == Op::And { (prod, sum) } else { (sum, prod) })
            }
        }
    }

    fn strip_negations(&self) -> Node {
        match self {
            Node::Lit(l) => Node::Lit(Literal::pos(l.var)),
            Node::Gate(op, cs) => Node::Gate(*op, cs.iter().map(Node::strip_negations).collect()),
        }
    }

    /// Merges same-operator children into their parent.
    fn flatten(self) -> Node {
        match self {
            Node::Lit(_) => self,
            Node::Gate(op, cs) => {
                let mut out = Vec::with_capacity(cs.len());
                for c in cs {
                    match c.flatten() {
                        Node::Gate(o, inner) if o == op => out.extend(inner),
                        other => out.push(other),
                    }
                }
                Node::Gate(op, out)
            }
        }
    }

    /// Substitutes constants for the variables in `set`; `Err(v)` when the
    /// node collapses to the constant `v`.
    fn restrict(&self, set: &BTreeSet<usize>, v: bool) -> core::result::Result<Node, bool> {
        match self {
            Node::Lit(l) if set.contains(&l.var) => Err(v == l.positive),
            Node::Lit(_) => Ok(self.clone()),
            Node::Gate(op, cs) => {
                // the value that absorbs the gate
                let absorbing = *op == Op::Or;
                let mut kept = Vec::new();
                for c in cs {
                    match c.restrict(set, v) {
                        Ok(node) => kept.push(node),
                        Err(b) if b == absorbing => return Err(absorbing),
                        Err(_) => {}
                    }
                }
                match kept.len() {
                    0 => Err(!absorbing),
                    1 => Ok(kept.pop().unwrap_or_else(|| unreachable!())),
                    _ => Ok(Node::Gate(*op, kept).flatten()),
                }
            }
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Lit(l) => write!(f, "{l}"),
            Node::Gate(op, cs) => {
                f.write_str("(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " {} ", op.symbol())?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A read-once formula over `n` inputs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReadOnceFormula {
    n: usize,
    root: Node,
}

impl ReadOnceFormula {
    /// Validates `root` (distinct variables below `n`, gates with at least
    /// two children) and merges same-operator nesting.
    pub fn new(n: usize, root: Node) -> Result<Self> {
        fn check(node: &Node, n: usize, seen: &mut BTreeSet<usize>) -> Result<()> {
            match node {
                Node::Lit(l) => {
                    if l.var >= n {
                        return Err(Error::UnknownVariable(l.var + 1));
                    }
                    if !seen.insert(l.var) {
                        return Err(Error::DuplicateVariable(l.var + 1));
                    }
                    Ok(())
                }
                Node::Gate(_, cs) => {
                    if cs.len() < 2 {
                        return Err(Error::InvalidParams(String::from("gate with fewer than two inputs")));
                    }
                    cs.iter().try_for_each(|c| check(c, n, seen))
                }
            }
        }
        check(&root, n, &mut BTreeSet::new())?;
        Ok(Self { n, root: root.flatten() })
    }

    /// Parses with arity equal to the largest variable index.
    pub fn parse(text: &str) -> Result<Self> {
        let root = Parser::new(text).formula()?;
        let mut vars = Vec::new();
        root.collect_vars(&mut vars);
        let n = vars.iter().max().map_or(0, |v| v + 1);
        Self::new(n, root)
    }

    /// Parses over exactly `n` inputs.
    pub fn parse_with_arity(n: usize, text: &str) -> Result<Self> {
        Self::new(n, Parser::new(text).formula()?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Variables occurring in the formula, ascending, 0-based.
    pub fn variables(&self) -> Vec<usize> {
        let mut v = Vec::new();
        self.root.collect_vars(&mut v);
        v.sort_unstable();
        v
    }

    pub fn eval(&self, x: usize) -> bool {
        self.root.eval(x)
    }

    pub fn to_truth_table(&self) -> Result<TruthTable> {
        TruthTable::from_fn(self.n, |x| self.root.eval(x))
    }

    /// The same tree with every literal made positive.
    pub fn monotone(&self) -> ReadOnceFormula {
        Self {
            n: self.n,
            root: self.root.strip_negations(),
        }
    }

    /// `(ds, cs)`: minimum DNF and CNF sizes.
    pub fn ds_cs(&self) -> Result<(u128, u128)> {
        self.root
            .ds_cs()
            .ok_or_else(|| Error::InvalidParams(String::from("term count overflows 128 bits")))
    }

    /// `Γ = ds·cs`.
    pub fn gamma(&self) -> Result<u128> {
        let (d, c) = self.ds_cs()?;
        d.checked_mul(c)
            .ok_or_else(|| Error::InvalidParams(String::from("goal value overflows 128 bits")))
    }

    /// `Γ⁰ = ds`.
    pub fn gamma0(&self) -> Result<u128> {
        Ok(self.ds_cs()?.0)
    }

    /// `Γ¹ = cs`.
    pub fn gamma1(&self) -> Result<u128> {
        Ok(self.ds_cs()?.1)
    }
}

impl fmt::Display for ReadOnceFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)
    }
}

impl FromStr for ReadOnceFormula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self { s: text.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.s.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn formula(&mut self) -> Result<Node> {
        let node = self.sequence()?;
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        Ok(node)
    }

    /// `atom (op atom)*` with a single operator; a lone atom is returned as is.
    fn sequence(&mut self) -> Result<Node> {
        let first = self.atom()?;
        let mut op: Option<Op> = None;
        let mut children = vec![first];
        loop {
            let o = match self.peek() {
                Some(b'&') => Op::And,
                Some(b'|') => Op::Or,
                _ => break,
            };
            if op.is_some_and(|p| p != o) {
                return self.err("mixed operators at one level; add parentheses");
            }
            op = Some(o);
            self.pos += 1;
            children.push(self.atom()?);
        }
        Ok(match op {
            Some(o) => Node::Gate(o, children),
            None => children.pop().unwrap_or_else(|| unreachable!()),
        })
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            Some(b'(') => {
                let open = self.pos;
                self.pos += 1;
                let inner = self.sequence()?;
                if self.peek() != Some(b')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                if matches!(inner, Node::Lit(_)) || matches!(&inner, Node::Gate(_, cs) if cs.len() < 2) {
                    return Err(Error::Parse {
                        pos: open,
                        msg: String::from("gate with fewer than two inputs"),
                    });
                }
                Ok(inner)
            }
            Some(b'~') => {
                self.pos += 1;
                match self.literal()? {
                    Node::Lit(l) => Ok(Node::Lit(l.complement())),
                    other => Ok(other),
                }
            }
            Some(b'x') => self.literal(),
            Some(c) => self.err(format!("unexpected `{}`", c as char)),
            None => self.err("unexpected end of input"),
        }
    }

    fn literal(&mut self) -> Result<Node> {
        if self.peek() != Some(b'x') {
            return self.err("expected a variable `x<i>`");
        }
        self.pos += 1;
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        let digits = core::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        match digits.parse::<usize>() {
            Ok(v) if v >= 1 => Ok(Node::Lit(Literal::pos(v - 1))),
            _ => Err(Error::Parse {
                pos: start,
                msg: String::from("variables are numbered from x1"),
            }),
        }
    }
}

/// Result of fixing some variables of a formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Restricted {
    Const(bool),
    Formula(ReadOnceFormula),
}

impl Restricted {
    /// `ds`/`cs` with the constant conventions `ds(0)=0, cs(0)=1` and
    /// `ds(1)=1, cs(1)=0`.
    pub fn ds_cs(&self) -> Result<(u128, u128)> {
        match self {
            Restricted::Const(false) => Ok((0, 1)),
            Restricted::Const(true) => Ok((1, 0)),
            Restricted::Formula(f) => f.ds_cs(),
        }
    }
}

/// Sets every variable in `set` (0-based) to `v` and simplifies.
pub fn restrict_formula(f: &ReadOnceFormula, set: &[usize], v: bool) -> Result<Restricted> {
    let vars = f.variables();
    if let Some(&u) = set.iter().find(|u| vars.binary_search(u).is_err()) {
        return Err(Error::UnknownVariable(u + 1));
    }
    let set: BTreeSet<usize> = set.iter().copied().collect();
    Ok(match f.root.restrict(&set, v) {
        Ok(root) => Restricted::Formula(ReadOnceFormula { n: f.n, root }),
        Err(b) => Restricted::Const(b),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionKind {
    /// `ds(f_{S1=1}) = ds(f_{S2=1}) = ds(f)` for a minterm `S`.
    Minterm,
    /// `cs(f_{T1=0}) = cs(f_{T2=0}) = cs(f)` for a maxterm `T`.
    Maxterm,
}

/// A minterm or maxterm split into two nonempty halves, 0-based variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodPartition {
    pub kind: PartitionKind,
    pub set: Vec<usize>,
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

impl GoodPartition {
    fn base(kind: PartitionKind, a: usize, b: usize) -> Self {
        Self {
            kind,
            set: sorted(vec![a, b]),
            first: vec![a],
            second: vec![b],
        }
    }

    fn with_variable(mut self, y: usize) -> Self {
        self.set.push(y);
        self.first.push(y);
        self.set.sort_unstable();
        self.first.sort_unstable();
        self
    }

    fn union(mut self, o: GoodPartition) -> Self {
        self.set.extend(o.set);
        self.first.extend(o.first);
        self.second.extend(o.second);
        self.set.sort_unstable();
        self.first.sort_unstable();
        self.second.sort_unstable();
        self
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// Good minterm or maxterm partition of the monotone version of `f`, built
/// bottom-up over the binarized tree and re-verified on restrictions.
pub fn good_partition(f: &ReadOnceFormula) -> Result<GoodPartition> {
    if f.variables().len() < 2 {
        return Err(Error::Precondition(String::from("good partitions need at least two variables")));
    }
    let m = f.monotone();
    let p = partition_of(&m.root).ok_or_else(|| Error::Verification(String::from("no partition built")))?;
    if !partition_holds(&m, &p)? {
        return Err(Error::Verification(format!("partition {p:?} fails its defining equalities")));
    }
    Ok(p)
}

fn partition_of(node: &Node) -> Option<GoodPartition> {
    let Node::Gate(op, cs) = node else {
        return None;
    };
    let left = &cs[0];
    let rest;
    let right = if cs.len() == 2 {
        &cs[1]
    } else {
        rest = Node::Gate(*op, cs[1..].to_vec());
        &rest
    };
    // a partition of the kind matching the dual operator passes through
    // unchanged; the other kind is merged across the two sides
    let (pass, merge) = match op {
        Op::And => (PartitionKind::Maxterm, PartitionKind::Minterm),
        Op::Or => (PartitionKind::Minterm, PartitionKind::Maxterm),
    };
    let pl = partition_of(left);
    let pr = partition_of(right);
    for p in [&pl, &pr].into_iter().flatten() {
        if p.kind == pass {
            return Some(p.clone());
        }
    }
    let var = |n: &Node| match n {
        Node::Lit(l) => Some(l.var),
        Node::Gate(..) => None,
    };
    Some(match (pl, pr) {
        (None, None) => GoodPartition::base(merge, var(left)?, var(right)?),
        (Some(p), None) => p.with_variable(var(right)?),
        (None, Some(p)) => p.with_variable(var(left)?),
        (Some(a), Some(b)) => a.union(b),
    })
}

/// Checks the defining equalities of `p` on a monotone formula, and that
/// `p.set` is a minimal certificate of the right kind.
pub fn partition_holds(f: &ReadOnceFormula, p: &GoodPartition) -> Result<bool> {
    let disjoint = p.first.iter().all(|v| !p.second.contains(v));
    let covers = sorted([p.first.clone(), p.second.clone()].concat()) == p.set;
    if p.first.is_empty() || p.second.is_empty() || !disjoint || !covers {
        return Ok(false);
    }
    let (ds, cs) = f.ds_cs()?;
    let (value, pick): (bool, fn((u128, u128)) -> u128) = match p.kind {
        PartitionKind::Minterm => (true, |x| x.0),
        PartitionKind::Maxterm => (false, |x| x.1),
    };
    let target = pick((ds, cs));
    for half in [&p.first, &p.second] {
        if pick(restrict_formula(f, half, value)?.ds_cs()?) != target {
            return Ok(false);
        }
    }
    if restrict_formula(f, &p.set, value)? != Restricted::Const(value) {
        return Ok(false);
    }
    for drop in &p.set {
        let smaller: Vec<usize> = p.set.iter().copied().filter(|v| v != drop).collect();
        if restrict_formula(f, &smaller, value)? == Restricted::Const(value) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether every minterm meets every maxterm in exactly one variable, read
/// off the minimal certificates of `f`.
pub fn minterm_maxterm_intersection_check(f: &TruthTable) -> bool {
    certificates_intersect_once(f)
}

/// A random read-once formula using every one of `n` variables, with each
/// literal negated with probability `neg`.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, n: usize, neg: f64) -> Result<ReadOnceFormula> {
    if n == 0 {
        return Err(Error::InvalidParams(String::from("a formula needs at least one variable")));
    }
    let mut vars: Vec<usize> = (0..n).collect();
    vars.shuffle(rng);
    let op = if rng.random_bool(0.5) { Op::And } else { Op::Or };
    let root = random_node(rng, &vars, op, neg);
    ReadOnceFormula::new(n, root)
}

fn random_node<R: Rng + ?Sized>(rng: &mut R, vars: &[usize], op: Op, neg: f64) -> Node {
    if vars.len() == 1 {
        let l = Literal::pos(vars[0]);
        return Node::Lit(if rng.random_bool(neg) { l.complement() } else { l });
    }
    let k = rng.random_range(2..=vars.len());
    // k-1 distinct cut points in 1..len
    let mut cuts: Vec<usize> = (1..vars.len()).collect();
    cuts.shuffle(rng);
    let mut cuts = cuts[..k - 1].to_vec();
    cuts.sort_unstable();
    let mut children = Vec::with_capacity(k);
    let mut start = 0;
    for end in cuts.into_iter().chain(core::iter::once(vars.len())) {
        children.push(random_node(rng, &vars[start..end], op.dual(), neg));
        start = end;
    }
    Node::Gate(op, children)
}

/// `x1 & x2 & … & xn` style single-gate formula.
pub fn single_gate(op: Op, n: usize) -> Result<ReadOnceFormula> {
    match n {
        0 => Err(Error::InvalidParams(String::from("a formula needs at least one variable"))),
        1 => ReadOnceFormula::new(1, Node::Lit(Literal::pos(0))),
        _ => ReadOnceFormula::new(n, Node::Gate(op, (0..n).map(|i| Node::Lit(Literal::pos(i))).collect())),
    }
}
