//! The integer program whose optimum is the goal value, and an exact solver.
//!
//! Variables are `g(b)` for every partial assignment `b` plus `Q`; rows are
//! monotonicity along each edge, the cycle inequality on each small diagram
//! and the value condition at each vertex. The solver substitutes the
//! equality rows, then runs best-bound branch-and-bound over a fraction-free
//! dual simplex, warm-started with the best explicit construction.

mod bnb;
mod coeff;
pub mod lp_format;
pub mod model;
mod simplex;

use alloc::vec::Vec;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::boolfn::{relevant_variables, TruthTable};
use crate::constructions::{check_built, GoalRecipe, Target};
use crate::error::{Error, Result};
use crate::utility::{goal_to_k_goal, UtilityTable};

pub use lp_format::{parse_lp, write_lp};
pub use model::{build_k_model, build_model, model_stats, IpModel, ModelStats, ModelTarget, Row, RowKind, Sense, Var};

use simplex::{SRow, Sub};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub gamma: Option<u64>,
    /// Certified `(lower, upper)`; equal when optimal.
    pub bounds: Option<(u64, u64)>,
    pub witness: Option<UtilityTable>,
    #[serde(default)]
    pub nodes: u64,
    #[serde(default)]
    pub pivots: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub node_limit: Option<u64>,
    /// Adds `Q >= #relevant variables` to goal models.
    pub use_structural_lower_bound: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            node_limit: None,
            use_structural_lower_bound: true,
        }
    }
}

/// `Γ(f)`.
pub fn solve_goal(f: &TruthTable, opts: &SolveOptions, stop: &mut dyn FnMut() -> bool) -> Result<SolveResult> {
    solve_exact(&build_model(f)?, opts, stop)
}

/// `Γ^k(f)`.
pub fn solve_k_goal(
    f: &TruthTable,
    k: bool,
    opts: &SolveOptions,
    stop: &mut dyn FnMut() -> bool,
) -> Result<SolveResult> {
    solve_exact(&build_k_model(f, k)?, opts, stop)
}

fn target_of(t: ModelTarget) -> Target {
    match t {
        ModelTarget::Goal => Target::Goal,
        ModelTarget::KGoal(true) => Target::OneGoal,
        ModelTarget::KGoal(false) => Target::ZeroGoal,
    }
}

/// Explicit feasible labelings, smallest `Q` first.
fn warm_starts(m: &IpModel) -> Vec<(u64, UtilityTable)> {
    let f = &m.f;
    let mut out = Vec::new();
    let mut add = |r: Result<(u64, UtilityTable)>| {
        if let Ok((q, t)) = r {
            if model::satisfies(m, t.values(), q) {
                out.push((q, t));
            }
        }
    };
    let recipe = |r: GoalRecipe| r.build(f).map(|b| (b.q, b.table));
    match m.target {
        ModelTarget::Goal => {
            add(recipe(GoalRecipe::OrCombine { cnf: None, dnf: None }));
            add(recipe(GoalRecipe::Generic2n));
        }
        ModelTarget::KGoal(k) => {
            add(recipe(if k {
                GoalRecipe::CnfOneGoal { cnf: None }
            } else {
                GoalRecipe::DnfZeroGoal { dnf: None }
            }));
            if !f.is_constant() {
                add(recipe(GoalRecipe::Generic2n).and_then(|(q, t)| Ok((q, goal_to_k_goal(&t, f, k)?))));
            }
        }
    }
    out.sort_by_key(|(q, _)| *q);
    out
}

fn constant_result(m: &IpModel, value: bool) -> Result<SolveResult> {
    let q = match m.target {
        ModelTarget::Goal => 0,
        ModelTarget::KGoal(k) => u64::from(k != value),
    };
    let table = UtilityTable::zero(m.n())?;
    if !model::satisfies(m, table.values(), q) {
        return Err(Error::Verification(alloc::string::String::from("constant model rejects the zero labeling")));
    }
    Ok(SolveResult {
        status: SolveStatus::Optimal,
        gamma: Some(q),
        bounds: Some((q, q)),
        witness: Some(table),
        nodes: 0,
        pivots: 0,
    })
}

/// Exact optimum of `m`, or certified bounds when the budget runs out.
///
/// `stop` is polled between nodes and every few dozen pivots.
pub fn solve_exact(m: &IpModel, opts: &SolveOptions, stop: &mut dyn FnMut() -> bool) -> Result<SolveResult> {
    if let Some(v) = m.f.constant_value() {
        return constant_result(m, v);
    }
    let warm = warm_starts(m);
    let Some(p) = simplex::presolve(m)? else {
        return Ok(infeasible());
    };
    let mut base = p.rows.clone();
    let mut lower0 = 0i64;
    if m.target == ModelTarget::Goal && opts.use_structural_lower_bound {
        lower0 = relevant_variables(&m.f).len() as i64;
        base.push(SRow {
            terms: alloc::vec![(p.q(), -1)],
            rhs: -lower0,
        });
    }
    let upper = warm.first().map(|(q, _)| *q as i64);
    let mut limits = bnb::Limits {
        node_limit: opts.node_limit,
        stop,
    };
    let out = match bnb::search::<i128>(p.nv, &base, upper, &mut limits) {
        Ok(o) => o,
        Err(_) => bnb::search::<BigInt>(p.nv, &base, upper, &mut limits)
            .map_err(|_| Error::Verification(alloc::string::String::from("arithmetic overflow")))?,
    };
    let incumbent = match out.best {
        Some((q, point)) => Some((q as u64, labeling(m, &p, &point)?)),
        None => warm.into_iter().next(),
    };
    let mut res = SolveResult {
        status: SolveStatus::Optimal,
        gamma: None,
        bounds: None,
        witness: None,
        nodes: out.nodes,
        pivots: out.pivots,
    };
    match (out.finish, incumbent) {
        (bnb::Finish::Exhausted, None) => return Ok(SolveResult { nodes: out.nodes, pivots: out.pivots, ..infeasible() }),
        (bnb::Finish::Exhausted, Some((q, table))) => {
            check_built(&table, &m.f, target_of(m.target), q)?;
            res.gamma = Some(q);
            res.bounds = Some((q, q));
            res.witness = Some(table);
        }
        (bnb::Finish::Stopped(lower), inc) => {
            let lower = lower.max(lower0).max(0) as u64;
            res.status = SolveStatus::BudgetExceeded;
            match inc {
                Some((q, table)) => {
                    res.bounds = Some((lower.min(q), q));
                    res.witness = Some(table);
                }
                None => res.bounds = Some((lower, u64::MAX)),
            }
        }
    }
    Ok(res)
}

fn infeasible() -> SolveResult {
    SolveResult {
        status: SolveStatus::Infeasible,
        gamma: None,
        bounds: None,
        witness: None,
        nodes: 0,
        pivots: 0,
    }
}

/// Expands a structural point into the full table of `g` values.
fn labeling(m: &IpModel, p: &simplex::Presolved, point: &[i64]) -> Result<UtilityTable> {
    let codes = m.num_vars() - 1;
    let values = (0..codes)
        .map(|c| match p.map[c] {
            Sub::Var(j) => u64::try_from(point[j as usize]).map_err(|_| Error::Verification(alloc::string::String::from("negative label"))),
            Sub::Zero => Ok(0),
        })
        .collect::<Result<Vec<u64>>>()?;
    UtilityTable::new(m.n(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::Family;
    use crate::utility::{classify, GoalStatus};

    fn gamma(f: &TruthTable) -> u64 {
        let r = solve_goal(f, &SolveOptions::default(), &mut || false).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        let g = r.gamma.unwrap();
        let w = r.witness.unwrap();
        assert_eq!(classify(&w, f).unwrap().goal_status, GoalStatus::Goal(g));
        if g > 0 {
            assert_eq!(w.value_gcd(), 1);
        }
        g
    }

    fn kgamma(f: &TruthTable, k: bool) -> u64 {
        let r = solve_k_goal(f, k, &SolveOptions::default(), &mut || false).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        r.gamma.unwrap()
    }

    #[test]
    fn named_functions() {
        assert_eq!(gamma(&Family::And.build(3).unwrap()), 3);
        assert_eq!(gamma(&Family::KofN { k: 2 }.build(3).unwrap()), 4);
        assert_eq!(gamma(&Family::Xor.build(3).unwrap()), 3);
        assert_eq!(gamma(&Family::Pairs.build(4).unwrap()), 8);
        assert_eq!(gamma(&TruthTable::zero(2).unwrap()), 0);
    }

    #[test]
    fn k_goal_values() {
        assert_eq!(kgamma(&Family::Xor.build(3).unwrap(), true), 3);
        let maj = Family::KofN { k: 2 }.build(3).unwrap();
        assert_eq!(kgamma(&maj, true), 2);
        assert_eq!(kgamma(&maj, false), 2);
        assert_eq!(kgamma(&Family::And.build(2).unwrap(), false), 1);
        let one = TruthTable::zero(2).unwrap().negate();
        assert_eq!(kgamma(&one, true), 0);
        assert_eq!(kgamma(&one, false), 1);
    }

    #[test]
    fn budget_reports_bounds() {
        let f = Family::Pairs.build(4).unwrap();
        let opts = SolveOptions {
            node_limit: Some(0),
            use_structural_lower_bound: true,
        };
        let r = solve_goal(&f, &opts, &mut || false).unwrap();
        if r.status == SolveStatus::BudgetExceeded {
            let (lo, hi) = r.bounds.unwrap();
            assert!(lo <= 8 && 8 <= hi);
        }
        let r = solve_goal(&f, &SolveOptions::default(), &mut || true).unwrap();
        assert_eq!(r.status, SolveStatus::BudgetExceeded);
        let (lo, hi) = r.bounds.unwrap();
        assert!(lo <= 8 && 8 <= hi, "{lo} {hi}");
    }

    #[test]
    fn parsed_model_solves_identically() {
        let f = Family::KofN { k: 2 }.build(3).unwrap();
        let m = build_model(&f).unwrap();
        let back = parse_lp(&write_lp(&m)).unwrap();
        let a = solve_exact(&m, &SolveOptions::default(), &mut || false).unwrap();
        let b = solve_exact(&back, &SolveOptions::default(), &mut || false).unwrap();
        assert_eq!(a, b);
    }
}
