//! Sequential evaluation of a Boolean function with priced, independent
//! random inputs.
//!
//! Adaptive greedy repeatedly buys the bit with the largest expected gain in
//! goal-function value per unit cost, stopping at a certificate. Its expected
//! cost is compared with the optimum (a dynamic program over partial
//! assignments) and with the expected cost of the cheapest certificate.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::boolfn::{CertKind, CertTable, TruthTable};
use crate::dtree::DecisionTree;
use crate::error::{Error, Result};
use crate::passign::{pow3, PartialAssignment, Trit};
use crate::rational::{self, le_two_ln_plus_one};
use crate::utility::{classify, GoalStatus, UtilityTable};

/// Largest arity for the exhaustive routines.
pub const MAX_ARITY: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SbfeInstance {
    pub f: TruthTable,
    pub g: UtilityTable,
    /// Maximum value of `g`.
    pub q: u64,
    /// Cost of querying each variable, all positive.
    pub costs: Vec<BigRational>,
    /// `Pr[x_i = 1]`, each strictly between 0 and 1.
    pub probs: Vec<BigRational>,
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

impl SbfeInstance {
    /// Unit costs and uniform inputs; `g` must be a goal function for `f`.
    pub fn new(f: TruthTable, g: UtilityTable) -> Result<Self> {
        let n = f.n();
        Self::with(f, g, vec![BigRational::one(); n], vec![half(); n])
    }

    pub fn with(f: TruthTable, g: UtilityTable, costs: Vec<BigRational>, probs: Vec<BigRational>) -> Result<Self> {
        let n = f.n();
        if n > MAX_ARITY {
            return Err(Error::ArityOutOfRange { n, max: MAX_ARITY });
        }
        if costs.len() != n || probs.len() != n {
            return Err(Error::ArityMismatch {
                expected: n,
                found: if costs.len() != n { costs.len() } else { probs.len() },
            });
        }
        if costs.iter().any(|c| !c.is_positive()) {
            return Err(Error::InvalidParams(String::from("costs must be positive")));
        }
        if probs.iter().any(|p| !p.is_positive() || *p >= BigRational::one()) {
            return Err(Error::InvalidParams(String::from("probabilities must lie strictly between 0 and 1")));
        }
        let q = match classify(&g, &f)?.goal_status {
            GoalStatus::Goal(q) => q,
            other => return Err(Error::NotGoalFunction(format!("table classifies as {other:?}"))),
        };
        Ok(Self { f, g, q, costs, probs })
    }

    pub fn n(&self) -> usize {
        self.f.n()
    }
}

fn leaf_of(kind: CertKind) -> Option<DecisionTree> {
    match kind {
        CertKind::OneCert => Some(DecisionTree::Leaf(1)),
        CertKind::ZeroCert => Some(DecisionTree::Leaf(0)),
        CertKind::NotCert => None,
    }
}

/// The strategy tree of adaptive greedy; ties go to the lowest index.
pub fn adaptive_greedy(inst: &SbfeInstance) -> Result<DecisionTree> {
    let certs = CertTable::new(&inst.f);
    Ok(greedy_from(inst, &certs, PartialAssignment::empty(inst.n())))
}

fn greedy_from(inst: &SbfeInstance, certs: &CertTable, b: PartialAssignment) -> DecisionTree {
    if let Some(leaf) = leaf_of(certs.kind(b.code())) {
        return leaf;
    }
    let here = BigRational::from_integer(BigInt::from(inst.g.value(&b)));
    let mut best: Option<(usize, BigRational)> = None;
    for i in (0..b.n()).filter(|&i| b.trit(i) == Trit::Star) {
        let v1 = BigRational::from_integer(BigInt::from(inst.g.value(&b.with(i, Trit::One))));
        let v0 = BigRational::from_integer(BigInt::from(inst.g.value(&b.with(i, Trit::Zero))));
        let p = &inst.probs[i];
        let gain = (p * (v1 - &here) + (BigRational::one() - p) * (v0 - &here)) / &inst.costs[i];
        if best.as_ref().is_none_or(|(_, s)| gain > *s) {
            best = Some((i, gain));
        }
    }
    // a full assignment is always a certificate, so some variable is unset
    let (i, _) = best.unwrap_or_else(|| unreachable!("non-certificate with every variable set"));
    DecisionTree::node(
        i,
        greedy_from(inst, certs, b.with(i, Trit::Zero)),
        greedy_from(inst, certs, b.with(i, Trit::One)),
    )
}

/// Expected cost of a strategy tree, checking that it never re-queries a
/// variable and that each leaf sits on a certificate with the right value.
pub fn expected_cost(t: &DecisionTree, inst: &SbfeInstance) -> Result<BigRational> {
    let certs = CertTable::new(&inst.f);
    validate_strategy(t, &certs, PartialAssignment::empty(inst.n()))?;
    t.expected_cost(&inst.costs, &inst.probs)
}

fn validate_strategy(t: &DecisionTree, certs: &CertTable, b: PartialAssignment) -> Result<()> {
    match t {
        DecisionTree::Leaf(v) => match certs.kind(b.code()) {
            CertKind::NotCert => Err(Error::Verification(format!("leaf at {b} is not a certificate"))),
            k if leaf_of(k) != Some(DecisionTree::Leaf(*v)) => {
                Err(Error::Verification(format!("leaf at {b} outputs {v} against a {k:?}")))
            }
            _ => Ok(()),
        },
        DecisionTree::Node { var, lo, hi } => {
            if *var >= b.n() {
                return Err(Error::UnknownVariable(var + 1));
            }
            if b.trit(*var) != Trit::Star {
                return Err(Error::Verification(format!("x{} queried twice on the path to {b}", var + 1)));
            }
            validate_strategy(lo, certs, b.with(*var, Trit::Zero))?;
            validate_strategy(hi, certs, b.with(*var, Trit::One))
        }
    }
}

/// Minimum expected depth over all decision trees for `f`, uniform inputs.
pub fn optimal_expected_depth(f: &TruthTable) -> Result<BigRational> {
    let n = f.n();
    optimal_expected_cost(f, &vec![BigRational::one(); n], &vec![half(); n])
}

/// Minimum expected cost over all strategies, by a dynamic program over
/// partial assignments (every extension has a smaller code).
pub fn optimal_expected_cost(f: &TruthTable, costs: &[BigRational], probs: &[BigRational]) -> Result<BigRational> {
    let n = f.n();
    if n > MAX_ARITY {
        return Err(Error::ArityOutOfRange { n, max: MAX_ARITY });
    }
    if costs.len() != n || probs.len() != n {
        return Err(Error::ArityMismatch { expected: n, found: costs.len().min(probs.len()) });
    }
    let certs = CertTable::new(f);
    let total = pow3(n) as usize;
    let mut value: Vec<BigRational> = Vec::with_capacity(total);
    for code in 0..total as u32 {
        if certs.kind(code).is_cert() {
            value.push(BigRational::zero());
            continue;
        }
        let mut best: Option<BigRational> = None;
        let mut rest = code;
        let mut place = 1u32;
        for i in 0..n {
            if rest % 3 == 2 {
                let zero = &value[(code - 2 * place) as usize];
                let one = &value[(code - place) as usize];
                let p = &probs[i];
                let v = &costs[i] + p * one + (BigRational::one() - p) * zero;
                if best.as_ref().is_none_or(|b| v < *b) {
                    best = Some(v);
                }
            }
            rest /= 3;
            place *= 3;
        }
        value.push(best.unwrap_or_else(BigRational::zero));
    }
    Ok(value.pop().unwrap_or_else(BigRational::zero))
}

/// Expected cost of the cheapest certificate inside a random input.
pub fn expected_certificate_cost(f: &TruthTable, costs: &[BigRational], probs: &[BigRational]) -> Result<BigRational> {
    let n = f.n();
    if n > MAX_ARITY {
        return Err(Error::ArityOutOfRange { n, max: MAX_ARITY });
    }
    let certs = CertTable::new(f);
    let mut total = BigRational::zero();
    for x in 0..f.len() {
        let mut best: Option<BigRational> = None;
        for keep in 0..1usize << n {
            let code = (0..n).rev().fold(0u32, |c, i| {
                c * 3 + if keep >> i & 1 == 1 { ((x >> i) & 1) as u32 } else { 2 }
            });
            if !certs.kind(code).is_cert() {
                continue;
            }
            let c: BigRational = (0..n).filter(|i| keep >> i & 1 == 1).map(|i| costs[i].clone()).sum();
            if best.as_ref().is_none_or(|b| c < *b) {
                best = Some(c);
            }
        }
        let px: BigRational = (0..n)
            .map(|i| if x >> i & 1 == 1 { probs[i].clone() } else { BigRational::one() - &probs[i] })
            .product();
        total += px * best.unwrap_or_else(BigRational::zero);
    }
    Ok(total)
}

/// Quantities behind the greedy guarantee, all exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub q: u64,
    #[serde(with = "rational::as_string")]
    pub greedy: BigRational,
    #[serde(with = "rational::as_string")]
    pub optimal: BigRational,
    #[serde(with = "rational::as_string")]
    pub cert: BigRational,
    /// `greedy ≤ (2 ln Q + 1)·cert`.
    pub greedy_bound_holds: bool,
    /// `cert ≤ optimal ≤ greedy`.
    pub ordering_holds: bool,
    pub passed: bool,
    /// Six-digit renderings of greedy, optimal and cert.
    pub decimal: [String; 3],
}

/// Runs greedy on `inst` and checks it against the optimum and the
/// certificate cost, the logarithm being decided by a certified enclosure.
pub fn check_greedy_bound(inst: &SbfeInstance) -> Result<BoundReport> {
    let tree = adaptive_greedy(inst)?;
    let greedy = expected_cost(&tree, inst)?;
    let optimal = optimal_expected_cost(&inst.f, &inst.costs, &inst.probs)?;
    let cert = expected_certificate_cost(&inst.f, &inst.costs, &inst.probs)?;
    let greedy_bound_holds = if inst.q == 0 {
        // constant f: nothing is ever queried
        greedy.is_zero()
    } else {
        le_two_ln_plus_one(&greedy, inst.q, &cert)
            .ok_or_else(|| Error::Verification(String::from("logarithm bound undecided at the refinement cap")))?
    };
    let ordering_holds = cert <= optimal && optimal <= greedy;
    let decimal = [&greedy, &optimal, &cert].map(|r| rational::to_decimal(r, 6));
    Ok(BoundReport {
        q: inst.q,
        greedy,
        optimal,
        cert,
        greedy_bound_holds,
        ordering_holds,
        passed: greedy_bound_holds && ordering_holds,
        decimal,
    })
}
