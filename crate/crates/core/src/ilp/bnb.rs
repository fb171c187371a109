//! Best-bound branch-and-bound over the exact relaxation.

use alloc::collections::BinaryHeap;
use alloc::rc::Rc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::coeff::Coeff;
use super::simplex::{LpOutcome, LpStats, Overflow, Rows, SRow, State};

/// Stored warm-start states are dropped once this many matrix entries
/// would be held by open nodes.
const STATE_BUDGET: usize = 24_000_000;

struct Node<C> {
    bound: i64,
    depth: u32,
    seq: u64,
    extra: Vec<SRow>,
    state: Option<Rc<State<C>>>,
}

impl<C> Node<C> {
    fn key(&self) -> (i64, core::cmp::Reverse<u32>, u64) {
        (self.bound, core::cmp::Reverse(self.depth), self.seq)
    }
}

impl<C> PartialEq for Node<C> {
    fn eq(&self, o: &Self) -> bool {
        self.key() == o.key()
    }
}

impl<C> Eq for Node<C> {}

impl<C> PartialOrd for Node<C> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl<C> Ord for Node<C> {
    // max-heap: the smallest key pops first
    fn cmp(&self, o: &Self) -> Ordering {
        o.key().cmp(&self.key())
    }
}

pub(crate) enum Finish {
    Exhausted,
    /// Search stopped early; the value is a certified lower bound.
    Stopped(i64),
}

pub(crate) struct Outcome {
    pub finish: Finish,
    /// Best integral objective and point found below the initial cutoff.
    pub best: Option<(i64, Vec<i64>)>,
    pub nodes: u64,
    pub pivots: u64,
}

pub(crate) struct Limits<'a> {
    pub node_limit: Option<u64>,
    pub stop: &'a mut dyn FnMut() -> bool,
}

/// Minimizes the last structural variable over integer points satisfying
/// `base`, searching only for values strictly below `upper`.
pub(crate) fn search<C: Coeff>(
    nv: usize,
    base: &[SRow],
    upper: Option<i64>,
    limits: &mut Limits<'_>,
) -> Result<Outcome, Overflow> {
    let mut stats = LpStats { pivots: 0 };
    let mut ub = upper;
    let mut best: Option<(i64, Vec<i64>)> = None;
    let mut nodes = 0u64;
    let stop = &mut *limits.stop;

    let mut root = State::<C>::initial(nv);
    let rows = Rows { base, extra: &[] };
    let done = |finish, best, nodes, stats: &LpStats| Outcome {
        finish,
        best,
        nodes,
        pivots: stats.pivots,
    };
    match root.solve(&rows, ub, &mut stats, stop)? {
        LpOutcome::Infeasible | LpOutcome::Cutoff => return Ok(done(Finish::Exhausted, None, 1, &stats)),
        LpOutcome::Stopped => {
            let lower = root.z_ceil()?.max(0);
            return Ok(done(Finish::Stopped(lower), None, 1, &stats));
        }
        LpOutcome::Optimal => {}
    }
    let root = Rc::new(root);
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(Node {
        bound: root.z_ceil()?,
        depth: 0,
        seq,
        extra: Vec::new(),
        state: Some(root.clone()),
    });
    while let Some(node) = heap.pop() {
        if ub.is_some_and(|u| node.bound >= u) {
            continue;
        }
        nodes += 1;
        let exceeded = limits.node_limit.is_some_and(|l| nodes > l);
        if exceeded || stop() {
            let lower = heap.iter().map(|n| n.bound).fold(node.bound, i64::min);
            let lower = ub.map_or(lower, |u| lower.min(u));
            return Ok(done(Finish::Stopped(lower), best, nodes, &stats));
        }
        let mut st = match &node.state {
            Some(s) => (**s).clone(),
            None => (*root).clone(),
        };
        let rows = Rows { base, extra: &node.extra };
        match st.solve(&rows, ub, &mut stats, stop)? {
            LpOutcome::Infeasible | LpOutcome::Cutoff => continue,
            LpOutcome::Stopped => {
                let here = st.z_ceil()?.max(node.bound);
                let lower = heap.iter().map(|n| n.bound).fold(here, i64::min);
                let lower = ub.map_or(lower, |u| lower.min(u));
                return Ok(done(Finish::Stopped(lower), best, nodes, &stats));
            }
            LpOutcome::Optimal => {}
        }
        let bound = st.z_ceil()?;
        if ub.is_some_and(|u| bound >= u) {
            continue;
        }
        match most_fractional(&st)? {
            None => {
                let (y, det) = st.point();
                let point = y
                    .iter()
                    .map(|v| v.div_exact(det).and_then(|q| q.to_i64()))
                    .collect::<Option<Vec<i64>>>()
                    .ok_or(Overflow)?;
                ub = Some(bound);
                best = Some((bound, point));
            }
            Some((j, floor)) => {
                let keep = (heap.len() + 2) * nv * nv <= STATE_BUDGET;
                let shared = keep.then(|| Rc::new(st));
                for (terms, rhs) in [(vec![(j as u32, 1)], floor), (vec![(j as u32, -1)], -(floor + 1))] {
                    let mut extra = node.extra.clone();
                    extra.push(SRow { terms, rhs });
                    seq += 1;
                    heap.push(Node {
                        bound,
                        depth: node.depth + 1,
                        seq,
                        extra,
                        state: shared.clone(),
                    });
                }
            }
        }
    }
    Ok(done(Finish::Exhausted, best, nodes, &stats))
}

/// Variable whose fractional part is closest to one half, lowest index on
/// ties; returns its floor.
fn most_fractional<C: Coeff>(st: &State<C>) -> Result<Option<(usize, i64)>, Overflow> {
    let (y, det) = st.point();
    let mut pick: Option<(usize, C, i64)> = None;
    for (j, v) in y.iter().enumerate() {
        let (q, r) = v.divmod(det).ok_or(Overflow)?;
        if r.is_nil() {
            continue;
        }
        let score = r.add(&r).ok_or(Overflow)?.sub(det).ok_or(Overflow)?;
        let score = if score.sign() < 0 { C::from_i64(0).sub(&score).ok_or(Overflow)? } else { score };
        if pick.as_ref().is_none_or(|(_, s, _)| score.cmp_value(s).is_lt()) {
            pick = Some((j, score, q.to_i64().ok_or(Overflow)?));
        }
    }
    Ok(pick.map(|(j, _, f)| (j, f)))
}
