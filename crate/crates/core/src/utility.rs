//! Utility tables over partial assignments and their verification.
//!
//! A [`UtilityTable`] stores one non-negative integer per partial assignment,
//! indexed by code. Submodularity has two independent checks: the local one
//! over small diagrams of the extension graph and the definitional one over
//! all pairs `b' ⪰ b` sharing an unset coordinate. Telescoping the local
//! inequality along any path from `b` to `b'` yields the definitional one,
//! so the two must always agree.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::boolfn::{CertKind, CertTable, TruthTable};
use crate::error::{Error, Result};
use crate::passign::{self, pow3, Edge, PartialAssignment, SmallDiagram, Trit};

/// Witness lists are truncated to this many entries.
pub const MAX_WITNESSES: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTable")]
pub struct UtilityTable {
    n: usize,
    values: Vec<u64>,
}

#[derive(Deserialize)]
struct RawTable {
    n: usize,
    values: Vec<u64>,
}

impl TryFrom<RawTable> for UtilityTable {
    type Error = Error;

    fn try_from(raw: RawTable) -> Result<Self> {
        UtilityTable::new(raw.n, raw.values)
    }
}

impl UtilityTable {
    pub fn new(n: usize, values: Vec<u64>) -> Result<Self> {
        passign::check_arity(n)?;
        if values.len() != pow3(n) as usize {
            return Err(Error::InvalidParams(alloc::format!(
                "utility table on {n} variables needs {} values, found {}",
                pow3(n),
                values.len()
            )));
        }
        Ok(Self { n, values })
    }

    pub fn from_fn(n: usize, mut g: impl FnMut(PartialAssignment) -> u64) -> Result<Self> {
        passign::check_arity(n)?;
        let values = (0..pow3(n))
            .map(|c| g(PartialAssignment::from_code_unchecked(n, c)))
            .collect();
        Ok(Self { n, values })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::from_fn(n, |_| 0)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, code: u32) -> u64 {
        self.values[code as usize]
    }

    pub fn value(&self, b: &PartialAssignment) -> u64 {
        self.get(b.code())
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn max_value(&self) -> u64 {
        self.values.iter().copied().max().unwrap_or(0)
    }

    pub fn at_empty(&self) -> u64 {
        self.get(pow3(self.n) - 1)
    }

    /// Greatest common divisor of all positive values (0 if there are none).
    pub fn value_gcd(&self) -> u64 {
        self.values
            .iter()
            .filter(|&&v| v > 0)
            .fold(0u64, |a, &b| gcd(a, b))
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// A concrete violation found during verification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `g(to) < g(from)` along an edge.
    Monotone {
        from: PartialAssignment,
        to: PartialAssignment,
    },
    /// `g(β') - g(α') + g(α) - g(β) > 0` on a small diagram.
    Diagram {
        alpha: PartialAssignment,
        beta: PartialAssignment,
        alpha_prime: PartialAssignment,
        beta_prime: PartialAssignment,
    },
    /// `g(b_{x_i<-l}) - g(b) < g(b'_{x_i<-l}) - g(b')`.
    Definitional {
        b: PartialAssignment,
        b_prime: PartialAssignment,
        var: usize,
        value: bool,
    },
    /// Value condition of the goal property fails at `at`.
    Value {
        at: PartialAssignment,
        value: u64,
        cert: CertKind,
    },
}

impl Witness {
    /// Re-evaluates the witness against `g`; true when it is a genuine violation.
    pub fn is_violation(&self, g: &UtilityTable) -> bool {
        let v = |b: &PartialAssignment| g.value(b) as i128;
        match self {
            Witness::Monotone { from, to } => v(to) < v(from),
            Witness::Diagram {
                alpha,
                beta,
                alpha_prime,
                beta_prime,
            } => v(beta_prime) - v(alpha_prime) + v(alpha) - v(beta) > 0,
            Witness::Definitional {
                b,
                b_prime,
                var,
                value,
            } => {
                let t = Trit::from_bit(*value);
                v(&b.with(*var, t)) - v(b) < v(&b_prime.with(*var, t)) - v(b_prime)
            }
            // value witnesses depend on f; they are checked by `classify`
            Witness::Value { at, value, .. } => g.value(at) == *value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub ok: bool,
    pub witnesses: Vec<Witness>,
}

impl Check {
    fn new() -> Self {
        Self {
            ok: true,
            witnesses: Vec::new(),
        }
    }

    fn fail(&mut self, w: Witness) {
        self.ok = false;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(w);
        }
    }
}

pub fn is_monotone(g: &UtilityTable) -> Check {
    let mut check = Check::new();
    for Edge { from, var, value } in passign::edges(g.n()) {
        let to = from.with(var, Trit::from_bit(value));
        if g.value(&to) < g.value(&from) {
            check.fail(Witness::Monotone { from, to });
        }
    }
    check
}

/// Cycle inequality over every small diagram.
pub fn is_submodular_local(g: &UtilityTable) -> Check {
    let mut check = Check::new();
    for d in passign::small_diagrams(g.n()) {
        if diagram_excess(g, &d) > 0 {
            check.fail(diagram_witness(&d));
        }
    }
    check
}

fn diagram_excess(g: &UtilityTable, d: &SmallDiagram) -> i128 {
    let [a, b, ap, bp] = d.corners().map(|c| g.get(c) as i128);
    bp - ap + a - b
}

fn diagram_witness(d: &SmallDiagram) -> Witness {
    Witness::Diagram {
        alpha: d.alpha,
        beta: d.beta(),
        alpha_prime: d.alpha_prime(),
        beta_prime: d.beta_prime(),
    }
}

/// Diminishing returns over all `b' ⪰ b` and every coordinate unset in both.
pub fn is_submodular_definitional(g: &UtilityTable) -> Check {
    let n = g.n();
    let mut check = Check::new();
    for code in 0..pow3(n) {
        let b = PartialAssignment::from_code_unchecked(n, code);
        let stars: Vec<usize> = (0..n).filter(|&i| b.trit(i) == Trit::Star).collect();
        // every extension b' of b: choose a trit for each star of b
        for sel in 0..pow3(stars.len()) {
            let mut bp = b;
            let mut s = sel;
            for &i in &stars {
                bp = bp.with(i, Trit::from_digit(s % 3));
                s /= 3;
            }
            for &i in &stars {
                if bp.trit(i) != Trit::Star {
                    continue;
                }
                for value in [false, true] {
                    let t = Trit::from_bit(value);
                    let gain_b = g.value(&b.with(i, t)) as i128 - g.value(&b) as i128;
                    let gain_bp = g.value(&bp.with(i, t)) as i128 - g.value(&bp) as i128;
                    if gain_b < gain_bp {
                        check.fail(Witness::Definitional {
                            b,
                            b_prime: bp,
                            var: i,
                            value,
                        });
                    }
                }
            }
        }
    }
    check
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "q", rename_all = "snake_case")]
pub enum GoalStatus {
    Goal(u64),
    OneGoal(u64),
    ZeroGoal(u64),
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub monotone: bool,
    pub submodular: bool,
    pub goal_status: GoalStatus,
    pub witnesses: Vec<Witness>,
}

/// `Q` if `g(b) = Q` exactly on certificates of `f`.
pub fn goal_value_of(g: &UtilityTable, certs: &CertTable) -> Option<u64> {
    let q = g.get(0);
    (0..g.values.len() as u32).all(|c| (g.get(c) == q) == certs.kind(c).is_cert()).then_some(q)
}

/// `Q` if `g(b) = Q` exactly on `k`-certificates of `f`; undefined when `f`
/// has no `k`-certificate.
pub fn k_goal_value_of(g: &UtilityTable, certs: &CertTable, k: bool) -> Option<u64> {
    let want = CertKind::of_value(k);
    let first = (0..g.values.len() as u32).find(|&c| certs.kind(c) == want)?;
    let q = g.get(first);
    (0..g.values.len() as u32)
        .all(|c| {
            if certs.kind(c) == want {
                g.get(c) == q
            } else {
                g.get(c) < q
            }
        })
        .then_some(q)
}

fn value_witnesses(g: &UtilityTable, certs: &CertTable, q: u64, target: Option<CertKind>) -> Vec<Witness> {
    let mut out = Vec::new();
    for c in 0..g.values.len() as u32 {
        let kind = certs.kind(c);
        let hit = match target {
            None => kind.is_cert(),
            Some(t) => kind == t,
        };
        let bad = if hit { g.get(c) != q } else { g.get(c) >= q };
        if bad && out.len() < MAX_WITNESSES {
            out.push(Witness::Value {
                at: PartialAssignment::from_code_unchecked(g.n(), c),
                value: g.get(c),
                cert: kind,
            });
        }
    }
    out
}

/// Determines whether `g` is a goal, 1-goal or 0-goal function for `f`
/// (checked in that order).
pub fn classify(g: &UtilityTable, f: &TruthTable) -> Result<VerifyReport> {
    if g.n() != f.n() {
        return Err(Error::ArityMismatch {
            expected: f.n(),
            found: g.n(),
        });
    }
    let certs = CertTable::new(f);
    Ok(classify_with(g, &certs))
}

pub fn classify_with(g: &UtilityTable, certs: &CertTable) -> VerifyReport {
    let mono = is_monotone(g);
    let subm = is_submodular_local(g);
    let mut witnesses: Vec<Witness> = mono.witnesses.iter().chain(&subm.witnesses).cloned().collect();
    witnesses.truncate(MAX_WITNESSES);
    let goal_status = if !(mono.ok && subm.ok) {
        GoalStatus::None
    } else if let Some(q) = goal_value_of(g, certs) {
        GoalStatus::Goal(q)
    } else if let Some(q) = k_goal_value_of(g, certs, true) {
        GoalStatus::OneGoal(q)
    } else if let Some(q) = k_goal_value_of(g, certs, false) {
        GoalStatus::ZeroGoal(q)
    } else {
        GoalStatus::None
    };
    if goal_status == GoalStatus::None && witnesses.is_empty() {
        // explain the value failure relative to the full-assignment value
        witnesses = value_witnesses(g, certs, g.get(0), None);
    }
    VerifyReport {
        monotone: mono.ok,
        submodular: subm.ok,
        goal_status,
        witnesses,
    }
}

/// True when `g` is a `k`-goal function for `f`, returning its value.
pub fn k_goal_status(g: &UtilityTable, f: &TruthTable, k: bool) -> Result<Option<u64>> {
    if g.n() != f.n() {
        return Err(Error::ArityMismatch {
            expected: f.n(),
            found: g.n(),
        });
    }
    let certs = CertTable::new(f);
    if !is_monotone(g).ok || !is_submodular_local(g).ok {
        return Ok(None);
    }
    Ok(k_goal_value_of(g, &certs, k))
}

/// Replaces the value on every `(1-k)`-certificate by `Q - 1`, turning a goal
/// function into a `k`-goal function with the same `Q`.
pub fn goal_to_k_goal(g: &UtilityTable, f: &TruthTable, k: bool) -> Result<UtilityTable> {
    if f.is_constant() {
        return Err(Error::Precondition(String::from("f must not be constant")));
    }
    let report = classify(g, f)?;
    let GoalStatus::Goal(q) = report.goal_status else {
        return Err(Error::NotGoalFunction(String::from(
            "input does not classify as a goal function for f",
        )));
    };
    let certs = CertTable::new(f);
    let other = CertKind::of_value(!k);
    UtilityTable::from_fn(g.n(), |b| {
        if certs.kind(b.code()) == other {
            q - 1
        } else {
            g.value(&b)
        }
    })
}

/// `g^b(a) = g(a \ b)` on the unset variables of `b`.
pub fn induce(g: &UtilityTable, b: &PartialAssignment) -> Result<UtilityTable> {
    if g.n() != b.n() {
        return Err(Error::ArityMismatch {
            expected: g.n(),
            found: b.n(),
        });
    }
    let free: Vec<usize> = (0..b.n()).filter(|&i| b.trit(i) == Trit::Star).collect();
    if free.is_empty() {
        return Err(Error::Precondition(String::from(
            "inducing needs at least one unset variable",
        )));
    }
    UtilityTable::from_fn(free.len(), |a| {
        let full = free
            .iter()
            .enumerate()
            .fold(*b, |acc, (k, &i)| acc.with(i, a.trit(k)));
        g.value(&full)
    })
}

/// Subtracts `g(*…*)` from every entry.
pub fn normalize(g: &UtilityTable) -> Result<UtilityTable> {
    let base = g.at_empty();
    let mut values = Vec::with_capacity(g.values.len());
    for (code, &v) in g.values.iter().enumerate() {
        if v < base {
            return Err(Error::Verification(alloc::format!(
                "monotonicity violated: g({}) = {v} is below g(empty) = {base}",
                PartialAssignment::from_code_unchecked(g.n(), code as u32)
            )));
        }
        values.push(v - base);
    }
    UtilityTable::new(g.n(), values)
}

/// Query access to a utility function.
pub trait GoalOracle {
    fn query(&mut self, b: &PartialAssignment) -> u64;
}

impl GoalOracle for &UtilityTable {
    fn query(&mut self, b: &PartialAssignment) -> u64 {
        self.value(b)
    }
}

/// Wraps an oracle and counts queries.
pub struct CountingOracle<O> {
    pub inner: O,
    pub queries: usize,
}

impl<O: GoalOracle> CountingOracle<O> {
    pub fn new(inner: O) -> Self {
        Self { inner, queries: 0 }
    }
}

impl<O: GoalOracle> GoalOracle for CountingOracle<O> {
    fn query(&mut self, b: &PartialAssignment) -> u64 {
        self.queries += 1;
        self.inner.query(b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recovery {
    /// Member of the pair with `f(0…0) = 0`.
    pub f: TruthTable,
    pub not_f: TruthTable,
    pub queries: usize,
}

/// Recovers `{f, ¬f}` from a goal-function oracle.
///
/// One query at the all-zero input gives `Q`. A breadth-first search over
/// the hypercube from that input then spends one query per tree edge: the
/// vertex with the differing bit erased has value `Q` iff both endpoints
/// take the same value. Total `2^n` queries.
pub fn recover_function(oracle: &mut impl GoalOracle, n: usize) -> Result<Recovery> {
    passign::check_arity(n)?;
    let size = 1usize << n;
    let mut queries = 0usize;
    let mut ask = |b: PartialAssignment, queries: &mut usize| {
        *queries += 1;
        oracle.query(&b)
    };
    let q = ask(PartialAssignment::from_input(n, 0), &mut queries);
    let mut color: Vec<Option<bool>> = alloc::vec![None; size];
    color[0] = Some(false);
    let mut queue = alloc::collections::VecDeque::new();
    queue.push_back(0usize);
    while let Some(v) = queue.pop_front() {
        for i in 0..n {
            let w = v ^ (1 << i);
            if color[w].is_some() {
                continue;
            }
            let merged = PartialAssignment::from_input(n, v).with(i, Trit::Star);
            let value = ask(merged, &mut queries);
            if value > q {
                return Err(Error::InconsistentOracle(alloc::format!(
                    "g({merged}) = {value} exceeds the full-assignment value {q}"
                )));
            }
            let same = value == q;
            color[w] = Some(color[v].unwrap() ^ !same);
            queue.push_back(w);
        }
    }
    let f = TruthTable::from_fn(n, |x| color[x].unwrap())?;
    let not_f = f.negate();
    Ok(Recovery { f, not_f, queries })
}
