//! Explicit goal-function constructions.

use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::boolfn::{exact_min_cnf, exact_min_dnf, CertKind, CertTable, CnfDnf, FormKind, Literal, TruthTable};
use crate::error::{Error, Result};
use crate::passign::{PartialAssignment, Trit};
use crate::utility::{self, classify_with, GoalStatus, UtilityTable};

fn fixes_true(b: &PartialAssignment, l: &Literal) -> bool {
    b.trit(l.var) == Trit::from_bit(l.positive)
}

fn fixes_false(b: &PartialAssignment, l: &Literal) -> bool {
    b.trit(l.var) == Trit::from_bit(!l.positive)
}

fn count_ones(b: &PartialAssignment) -> u64 {
    b.trits().iter().filter(|&&t| t == Trit::One).count() as u64
}

fn count_zeros(b: &PartialAssignment) -> u64 {
    b.trits().iter().filter(|&&t| t == Trit::Zero).count() as u64
}

/// Number of clauses of `phi` satisfied by `b`.
pub fn cnf_one_goal(phi: &CnfDnf) -> Result<UtilityTable> {
    if phi.kind != FormKind::Cnf {
        return Err(Error::InvalidParams(String::from("expected a CNF formula")));
    }
    UtilityTable::from_fn(phi.n, |b| {
        phi.terms
            .iter()
            .filter(|c| c.iter().any(|l| fixes_true(&b, l)))
            .count() as u64
    })
}

/// Number of terms of `psi` falsified by `b`.
pub fn dnf_zero_goal(psi: &CnfDnf) -> Result<UtilityTable> {
    if psi.kind != FormKind::Dnf {
        return Err(Error::InvalidParams(String::from("expected a DNF formula")));
    }
    UtilityTable::from_fn(psi.n, |b| {
        psi.terms
            .iter()
            .filter(|t| t.iter().any(|l| fixes_false(&b, l)))
            .count() as u64
    })
}

/// k-goal value of `g`, accepting functions for which `f` has no
/// `k`-certificate when `g` stays below `q`.
fn k_goal_value(g: &UtilityTable, certs: &CertTable, k: bool, q_hint: Option<u64>) -> Option<u64> {
    if let Some(q) = utility::k_goal_value_of(g, certs, k) {
        return Some(q);
    }
    let want = CertKind::of_value(k);
    let none = (0..g.values().len() as u32).all(|c| certs.kind(c) != want);
    match q_hint {
        Some(q) if none && g.values().iter().all(|&v| v < q) => Some(q),
        _ => None,
    }
}

fn require_shape(g: &UtilityTable, what: &str) -> Result<()> {
    if !utility::is_monotone(g).ok || !utility::is_submodular_local(g).ok {
        return Err(Error::NotGoalFunction(alloc::format!("{what} is not monotone submodular")));
    }
    if g.at_empty() != 0 {
        return Err(Error::Precondition(alloc::format!("{what} must be normalized")));
    }
    Ok(())
}

/// `g(b) = Q1 Q0 - (Q1 - g1(b)) (Q0 - g0(b))`.
///
/// `g1` must be a normalized 1-goal function and `g0` a normalized 0-goal
/// function for `f`, with values `q1` and `q0`.
pub fn or_combine(
    f: &TruthTable,
    g1: &UtilityTable,
    q1: u64,
    g0: &UtilityTable,
    q0: u64,
) -> Result<UtilityTable> {
    for g in [g1, g0] {
        if g.n() != f.n() {
            return Err(Error::ArityMismatch {
                expected: f.n(),
                found: g.n(),
            });
        }
    }
    require_shape(g1, "1-goal input")?;
    require_shape(g0, "0-goal input")?;
    let certs = CertTable::new(f);
    if k_goal_value(g1, &certs, true, Some(q1)) != Some(q1) {
        return Err(Error::NotGoalFunction(alloc::format!("first input is not a 1-goal function with value {q1}")));
    }
    if k_goal_value(g0, &certs, false, Some(q0)) != Some(q0) {
        return Err(Error::NotGoalFunction(alloc::format!("second input is not a 0-goal function with value {q0}")));
    }
    UtilityTable::from_fn(f.n(), |b| {
        let c = b.code();
        q1 * q0 - (q1 - g1.get(c)) * (q0 - g0.get(c))
    })
}

/// `2^n - 1` on assignments containing a certificate, otherwise
/// `Σ_{i=1}^{m} 2^{n-i}` where `m` is the number of fixed positions.
pub fn generic_goal(f: &TruthTable) -> Result<UtilityTable> {
    let n = f.n();
    if n > 63 {
        return Err(Error::ArityOutOfRange { n, max: 63 });
    }
    let certs = CertTable::new(f);
    let full = (1u64 << n) - 1;
    UtilityTable::from_fn(n, |b| {
        if certs.kind(b.code()).is_cert() {
            full
        } else {
            let m = b.weight();
            full - ((1u64 << (n - m)) - 1)
        }
    })
}

/// `min(k, #1)`, `min(n-k+1, #0)` and their OR combination.
pub fn kofn_goals(k: usize, n: usize) -> Result<(UtilityTable, UtilityTable, UtilityTable)> {
    if k < 1 || k > n {
        return Err(Error::InvalidParams(String::from("k-of-n requires 1 <= k <= n")));
    }
    let (q1, q0) = (k as u64, (n - k + 1) as u64);
    let one = UtilityTable::from_fn(n, |b| count_ones(&b).min(q1))?;
    let zero = UtilityTable::from_fn(n, |b| count_zeros(&b).min(q0))?;
    let goal = UtilityTable::from_fn(n, |b| {
        q1 * q0 - (q1 - one.value(&b)) * (q0 - zero.value(&b))
    })?;
    Ok((one, zero, goal))
}

/// Number of fixed positions.
pub fn xor_goal(n: usize) -> Result<UtilityTable> {
    UtilityTable::from_fn(n, |b| b.weight() as u64)
}

/// `n` once any position is 0, otherwise the number of 1s.
pub fn and_goal(n: usize) -> Result<UtilityTable> {
    UtilityTable::from_fn(n, |b| if count_zeros(&b) > 0 { n as u64 } else { count_ones(&b) })
}

/// `n` once any position is 1, otherwise the number of 0s.
pub fn or_goal(n: usize) -> Result<UtilityTable> {
    UtilityTable::from_fn(n, |b| if count_ones(&b) > 0 { n as u64 } else { count_zeros(&b) })
}

/// Which notion a recipe output is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Goal,
    OneGoal,
    ZeroGoal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "recipe", rename_all = "lowercase")]
pub enum GoalRecipe {
    /// Clause counting over a CNF; the exact minimum CNF when absent.
    #[serde(rename = "cnf1")]
    CnfOneGoal { cnf: Option<CnfDnf> },
    /// Term counting over a DNF; the exact minimum DNF when absent.
    #[serde(rename = "dnf0")]
    DnfZeroGoal { dnf: Option<CnfDnf> },
    /// OR combination of the two above.
    #[serde(rename = "orcombine")]
    OrCombine { cnf: Option<CnfDnf>, dnf: Option<CnfDnf> },
    #[serde(rename = "generic")]
    Generic2n,
    #[serde(rename = "kofn1")]
    KofNOne { k: usize },
    #[serde(rename = "kofn0")]
    KofNZero { k: usize },
    #[serde(rename = "kofn")]
    KofNGoal { k: usize },
    #[serde(rename = "xor")]
    XorGoal,
    #[serde(rename = "and")]
    AndGoal,
    #[serde(rename = "or")]
    OrGoal,
}

/// Recipe output after its post-construction check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Built {
    pub table: UtilityTable,
    pub target: Target,
    pub q: u64,
}

impl GoalRecipe {
    /// Parses a CLI recipe name; `k` is consulted by the k-of-n recipes.
    pub fn from_name(name: &str, k: Option<usize>) -> Result<Self> {
        let need_k = || k.ok_or_else(|| Error::InvalidParams(alloc::format!("recipe `{name}` needs k")));
        Ok(match name {
            "cnf1" => GoalRecipe::CnfOneGoal { cnf: None },
            "dnf0" => GoalRecipe::DnfZeroGoal { dnf: None },
            "orcombine" => GoalRecipe::OrCombine { cnf: None, dnf: None },
            "generic" => GoalRecipe::Generic2n,
            "kofn" => GoalRecipe::KofNGoal { k: need_k()? },
            "kofn1" => GoalRecipe::KofNOne { k: need_k()? },
            "kofn0" => GoalRecipe::KofNZero { k: need_k()? },
            "xor" => GoalRecipe::XorGoal,
            "and" => GoalRecipe::AndGoal,
            "or" => GoalRecipe::OrGoal,
            _ => return Err(Error::InvalidParams(alloc::format!("unknown recipe `{name}`"))),
        })
    }

    pub fn target(&self) -> Target {
        match self {
            GoalRecipe::CnfOneGoal { .. } | GoalRecipe::KofNOne { .. } => Target::OneGoal,
            GoalRecipe::DnfZeroGoal { .. } | GoalRecipe::KofNZero { .. } => Target::ZeroGoal,
            _ => Target::Goal,
        }
    }

    /// Emits the table for `f` and checks it classifies as intended.
    pub fn build(&self, f: &TruthTable) -> Result<Built> {
        let n = f.n();
        let cnf = |given: &Option<CnfDnf>| match given {
            Some(c) => check_form(c, f, FormKind::Cnf).map(|_| c.clone()),
            None => exact_min_cnf(f),
        };
        let dnf = |given: &Option<CnfDnf>| match given {
            Some(d) => check_form(d, f, FormKind::Dnf).map(|_| d.clone()),
            None => exact_min_dnf(f),
        };
        let (table, q_hint) = match self {
            GoalRecipe::CnfOneGoal { cnf: c } => {
                let c = cnf(c)?;
                (cnf_one_goal(&c)?, c.len() as u64)
            }
            GoalRecipe::DnfZeroGoal { dnf: d } => {
                let d = dnf(d)?;
                (dnf_zero_goal(&d)?, d.len() as u64)
            }
            GoalRecipe::OrCombine { cnf: c, dnf: d } => {
                let (c, d) = (cnf(c)?, dnf(d)?);
                let (q1, q0) = (c.len() as u64, d.len() as u64);
                (or_combine(f, &cnf_one_goal(&c)?, q1, &dnf_zero_goal(&d)?, q0)?, q1 * q0)
            }
            GoalRecipe::Generic2n => (generic_goal(f)?, (1u64 << n) - 1),
            GoalRecipe::KofNOne { k } => (kofn_goals(*k, n)?.0, *k as u64),
            GoalRecipe::KofNZero { k } => (kofn_goals(*k, n)?.1, (n - k + 1) as u64),
            GoalRecipe::KofNGoal { k } => (kofn_goals(*k, n)?.2, (k * (n - k + 1)) as u64),
            GoalRecipe::XorGoal => (xor_goal(n)?, n as u64),
            GoalRecipe::AndGoal => (and_goal(n)?, n as u64),
            GoalRecipe::OrGoal => (or_goal(n)?, n as u64),
        };
        let target = self.target();
        let q = check_built(&table, f, target, q_hint)?;
        Ok(Built { table, target, q })
    }
}

fn check_form(form: &CnfDnf, f: &TruthTable, kind: FormKind) -> Result<()> {
    if form.kind != kind || !form.represents(f) {
        return Err(Error::InvalidParams(String::from("formula does not represent f")));
    }
    Ok(())
}

/// Classifies `table` against `target` for `f`, returning its value.
pub fn check_built(table: &UtilityTable, f: &TruthTable, target: Target, q_hint: u64) -> Result<u64> {
    if table.n() != f.n() {
        return Err(Error::ArityMismatch {
            expected: f.n(),
            found: table.n(),
        });
    }
    let certs = CertTable::new(f);
    let report = classify_with(table, &certs);
    let fail = || Error::Verification(alloc::format!("recipe output does not classify as {target:?} for f"));
    if !report.monotone || !report.submodular {
        return Err(fail());
    }
    if !utility::is_submodular_definitional(table).ok {
        return Err(fail());
    }
    let q = match target {
        Target::Goal => match report.goal_status {
            GoalStatus::Goal(q) => Some(q),
            _ => None,
        },
        Target::OneGoal => k_goal_value(table, &certs, true, Some(q_hint)),
        Target::ZeroGoal => k_goal_value(table, &certs, false, Some(q_hint)),
    };
    q.ok_or_else(fail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{exact_ds_cs, Family};

    fn pa(s: &str) -> PartialAssignment {
        s.parse().unwrap()
    }

    fn all_functions(n: usize) -> impl Iterator<Item = TruthTable> {
        (0..1u64 << (1 << n)).map(move |bits| TruthTable::from_u64(n, bits).unwrap())
    }

    #[test]
    fn clause_and_term_counting() {
        let and2 = CnfDnf::parse(2, FormKind::Cnf, "(x1) & (x2)").unwrap();
        let g = cnf_one_goal(&and2).unwrap();
        assert_eq!(g.value(&pa("1*")), 1);
        assert_eq!(g.value(&pa("11")), 2);
        let or2 = CnfDnf::parse(2, FormKind::Cnf, "(x1 | x2)").unwrap();
        let g = cnf_one_goal(&or2).unwrap();
        assert_eq!(g.value(&pa("0*")), 0);
        assert_eq!(g.value(&pa("*1")), 1);

        let d = CnfDnf::parse(2, FormKind::Dnf, "x1 & x2").unwrap();
        assert_eq!(dnf_zero_goal(&d).unwrap().value(&pa("0*")), 1);
        let pairs = CnfDnf::parse(4, FormKind::Dnf, "x1 & x2 | x3 & x4").unwrap();
        let g = dnf_zero_goal(&pairs).unwrap();
        assert_eq!(g.value(&pa("0*0*")), 2);
        assert_eq!(g.at_empty(), 0);
        assert!(cnf_one_goal(&pairs).is_err());

        let maj = Family::KofN { k: 2 }.build(3).unwrap();
        let built = GoalRecipe::CnfOneGoal { cnf: None }.build(&maj).unwrap();
        assert_eq!(built.q, 3);
    }

    #[test]
    fn or_combination() {
        let and2 = Family::And.build(2).unwrap();
        let built = GoalRecipe::OrCombine { cnf: None, dnf: None }.build(&and2).unwrap();
        assert_eq!(built.q, 2);
        assert_eq!(built.table.value(&pa("1*")), 1);
        assert_eq!(built.table.value(&pa("0*")), 2);
        assert_eq!(built.table.at_empty(), 0);
        let pairs = Family::Pairs.build(4).unwrap();
        assert_eq!(GoalRecipe::OrCombine { cnf: None, dnf: None }.build(&pairs).unwrap().q, 8);

        let g1 = cnf_one_goal(&exact_min_cnf(&and2).unwrap()).unwrap();
        let g0 = dnf_zero_goal(&exact_min_dnf(&and2).unwrap()).unwrap();
        assert!(or_combine(&and2, &g0, 1, &g1, 2).is_err());
        let lifted = UtilityTable::from_fn(2, |b| g1.value(&b) + 1).unwrap();
        assert!(or_combine(&and2, &lifted, 3, &g0, 1).is_err());
    }

    #[test]
    fn generic_two_to_the_n() {
        let or2 = Family::Or.build(2).unwrap();
        let g = generic_goal(&or2).unwrap();
        assert_eq!(g.value(&pa("0*")), 2);
        assert_eq!(g.value(&pa("1*")), 3);
        assert_eq!(g.at_empty(), 0);
        assert_eq!(GoalRecipe::Generic2n.build(&or2).unwrap().q, 3);
    }

    #[test]
    fn symmetric_families() {
        let (one, zero, goal) = kofn_goals(2, 3).unwrap();
        let maj = Family::KofN { k: 2 }.build(3).unwrap();
        for (recipe, q) in [
            (GoalRecipe::KofNOne { k: 2 }, 2),
            (GoalRecipe::KofNZero { k: 2 }, 2),
            (GoalRecipe::KofNGoal { k: 2 }, 4),
        ] {
            assert_eq!(recipe.build(&maj).unwrap().q, q);
        }
        assert_eq!(one.value(&pa("11*")), 2);
        assert_eq!(zero.value(&pa("0*0")), 2);
        assert_eq!(goal.get(0), 4);
        assert_eq!(GoalRecipe::KofNGoal { k: 1 }.build(&Family::Or.build(3).unwrap()).unwrap().q, 3);
        assert_eq!(GoalRecipe::KofNGoal { k: 3 }.build(&Family::And.build(3).unwrap()).unwrap().q, 3);
        assert!(kofn_goals(0, 3).is_err());
        assert!(kofn_goals(4, 3).is_err());

        let and3 = and_goal(3).unwrap();
        assert_eq!(and3.value(&pa("*0*")), 3);
        assert_eq!(and3.value(&pa("11*")), 2);
        assert_eq!(xor_goal(4).unwrap().value(&pa("10**")), 2);
        for n in 1..=4 {
            for (recipe, fam) in [
                (GoalRecipe::AndGoal, Family::And),
                (GoalRecipe::OrGoal, Family::Or),
                (GoalRecipe::XorGoal, Family::Xor),
            ] {
                let f = fam.build(n).unwrap();
                assert_eq!(recipe.build(&f).unwrap().q, n as u64);
                assert_eq!(recipe.build(&f.negate()).unwrap().q, n as u64);
            }
        }
        assert!(GoalRecipe::AndGoal.build(&Family::Or.build(3).unwrap()).is_err());
    }

    #[test]
    fn every_recipe_on_all_small_functions() {
        for n in 1..=3 {
            for f in all_functions(n) {
                let (ds, cs) = exact_ds_cs(&f).unwrap();
                for recipe in [
                    GoalRecipe::CnfOneGoal { cnf: None },
                    GoalRecipe::DnfZeroGoal { dnf: None },
                    GoalRecipe::OrCombine { cnf: None, dnf: None },
                    GoalRecipe::Generic2n,
                ] {
                    let built = recipe.build(&f).unwrap_or_else(|e| panic!("{recipe:?} on {f}: {e}"));
                    let expect = match recipe {
                        GoalRecipe::CnfOneGoal { .. } => cs as u64,
                        GoalRecipe::DnfZeroGoal { .. } => ds as u64,
                        GoalRecipe::OrCombine { .. } => (ds * cs) as u64,
                        _ => (1u64 << n) - 1,
                    };
                    assert_eq!(built.q, expect);
                }
            }
        }
    }

    #[test]
    fn clause_counting_ignores_zeros_for_monotone_f() {
        for n in 1..=4 {
            for f in all_functions(n).filter(|f| f.is_monotone()) {
                let g = cnf_one_goal(&exact_min_cnf(&f).unwrap()).unwrap();
                let m = f.n();
                for c in 0..crate::passign::pow3(m) {
                    let b = PartialAssignment::from_code(m, c).unwrap();
                    let stripped = (0..m).fold(b, |acc, i| {
                        if acc.trit(i) == Trit::Zero { acc.with(i, Trit::Star) } else { acc }
                    });
                    assert_eq!(g.value(&b), g.value(&stripped));
                }
            }
        }
    }

    #[test]
    fn recipe_names() {
        for name in ["cnf1", "dnf0", "orcombine", "generic", "xor", "and", "or"] {
            assert!(GoalRecipe::from_name(name, None).is_ok());
        }
        assert!(GoalRecipe::from_name("kofn", None).is_err());
        assert_eq!(GoalRecipe::from_name("kofn", Some(2)).unwrap(), GoalRecipe::KofNGoal { k: 2 });
        assert!(GoalRecipe::from_name("bogus", None).is_err());
    }
}
