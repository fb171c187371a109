//! Presolve and a fraction-free dual simplex.
//!
//! All constraints are rows `a·y <= b` over non-negative structural
//! variables `y`, including the bound rows `-y_j <= 0` which occupy ids
//! `0..nv`. A basis is a set of `nv` tight rows `N`; the solver keeps
//! `B = D·A_N^{-1}` and `y = D·A_N^{-1} b_N` as integers with the common
//! denominator `D = |det A_N|`, updated by Bareiss-style exact division.
//! The objective is the last structural variable (`Q`), so the reduced
//! costs are the negated last row of `B` and the slack basis is dual
//! feasible from the start.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::coeff::Coeff;
use super::model::{IpModel, Sense};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct SRow {
    pub terms: Vec<(u32, i64)>,
    pub rhs: i64,
}

/// Image of a model variable after substituting the equality rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Sub {
    Var(u32),
    Zero,
}

pub(crate) struct Presolved {
    pub nv: usize,
    pub map: Vec<Sub>,
    pub rows: Vec<SRow>,
}

impl Presolved {
    pub fn q(&self) -> u32 {
        self.nv as u32 - 1
    }
}

/// Eliminates `g = Q` and `g = 0` rows, drops trivial and duplicate rows.
/// `None` when a row reduces to an unsatisfiable constant inequality.
pub(crate) fn presolve(m: &IpModel) -> Result<Option<Presolved>> {
    let nmv = m.num_vars();
    let qv = m.q_var();
    let mut fixed: Vec<Option<Sub>> = vec![None; nmv];
    for r in &m.rows {
        if r.sense != Sense::Eq {
            continue;
        }
        let sub = match (r.terms(), r.rhs) {
            ([(c, 1)], 0) if *c != qv => (*c, Sub::Zero),
            ([(c, 1), (q, -1)], 0) if *q == qv && *c != qv => (*c, Sub::Var(u32::MAX)),
            _ => {
                return Err(Error::InvalidParams(alloc::format!(
                    "unsupported equality row {}",
                    r.kind
                )))
            }
        };
        if fixed[sub.0 as usize].replace(sub.1).is_some() {
            return Err(Error::InvalidParams(alloc::format!("variable g{} fixed twice", sub.0)));
        }
    }
    let mut map = vec![Sub::Zero; nmv];
    let mut nv = 0u32;
    for v in 0..nmv {
        if v as u32 != qv && fixed[v].is_none() {
            map[v] = Sub::Var(nv);
            nv += 1;
        }
    }
    let q = nv;
    nv += 1;
    map[qv as usize] = Sub::Var(q);
    for v in 0..nmv {
        match fixed[v] {
            Some(Sub::Var(_)) => map[v] = Sub::Var(q),
            Some(Sub::Zero) => map[v] = Sub::Zero,
            None => {}
        }
    }
    let nv = nv as usize;
    let mut rows: Vec<SRow> = (0..nv as u32)
        .map(|j| SRow {
            terms: vec![(j, -1)],
            rhs: 0,
        })
        .collect();
    let mut seen: BTreeSet<SRow> = rows.iter().cloned().collect();
    for r in &m.rows {
        if r.sense == Sense::Eq {
            continue;
        }
        let mut terms: Vec<(u32, i64)> = Vec::with_capacity(4);
        for &(v, c) in r.terms() {
            if let Sub::Var(j) = map[v as usize] {
                match terms.iter_mut().find(|t| t.0 == j) {
                    Some(t) => t.1 += c as i64,
                    None => terms.push((j, c as i64)),
                }
            }
        }
        terms.retain(|t| t.1 != 0);
        terms.sort_unstable();
        let row = SRow {
            terms,
            rhs: r.rhs as i64,
        };
        if row.terms.is_empty() {
            if row.rhs < 0 {
                return Ok(None);
            }
            continue;
        }
        if seen.insert(row.clone()) {
            rows.push(row);
        }
    }
    Ok(Some(Presolved { nv, map, rows }))
}

#[derive(Debug)]
pub(crate) struct Overflow;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum LpOutcome {
    Optimal,
    Infeasible,
    /// The objective bound reached the cutoff.
    Cutoff,
    /// The stop callback fired.
    Stopped,
}

#[derive(Clone, Debug)]
pub(crate) struct State<C> {
    nv: usize,
    pub nonbasic: Vec<u32>,
    binv: Vec<C>,
    pub y: Vec<C>,
    pub det: C,
}

/// Row lookup over base rows plus per-node extras.
pub(crate) struct Rows<'a> {
    pub base: &'a [SRow],
    pub extra: &'a [SRow],
}

impl Rows<'_> {
    pub fn len(&self) -> usize {
        self.base.len() + self.extra.len()
    }

    #[inline]
    pub fn get(&self, id: usize) -> &SRow {
        if id < self.base.len() {
            &self.base[id]
        } else {
            &self.extra[id - self.base.len()]
        }
    }
}

pub(crate) struct LpStats {
    pub pivots: u64,
}

const STALL_LIMIT: u32 = 50;

impl<C: Coeff> State<C> {
    /// All bound rows tight: `y = 0`, `B = -I`, `D = 1`.
    pub fn initial(nv: usize) -> Self {
        let mut binv = vec![C::from_i64(0); nv * nv];
        for j in 0..nv {
            binv[j * nv + j] = C::from_i64(-1);
        }
        Self {
            nv,
            nonbasic: (0..nv as u32).collect(),
            binv,
            y: vec![C::from_i64(0); nv],
            det: C::from_i64(1),
        }
    }

    /// Objective numerator over `det`.
    pub fn z(&self) -> &C {
        &self.y[self.nv - 1]
    }

    /// `ceil(z)`.
    pub fn z_ceil(&self) -> core::result::Result<i64, Overflow> {
        let (q, r) = self.z().divmod(&self.det).ok_or(Overflow)?;
        let q = q.to_i64().ok_or(Overflow)?;
        Ok(if r.is_nil() { q } else { q + 1 })
    }

    #[inline]
    fn b(&self, i: usize, k: usize) -> &C {
        &self.binv[i * self.nv + k]
    }

    /// `D·(b_r - a_r·y)`.
    fn slack(&self, row: &SRow) -> Option<C> {
        let mut s = self.det.mul(&C::from_i64(row.rhs))?;
        for &(j, c) in &row.terms {
            let t = self.y[j as usize].mul(&C::from_i64(c))?;
            s = s.sub(&t)?;
        }
        Some(s)
    }

    /// Runs dual simplex pivots until optimal, infeasible, cut off at
    /// `ceil(z) >= cutoff`, or stopped.
    pub fn solve(
        &mut self,
        rows: &Rows<'_>,
        cutoff: Option<i64>,
        stats: &mut LpStats,
        stop: &mut dyn FnMut() -> bool,
    ) -> core::result::Result<LpOutcome, Overflow> {
        let nv = self.nv;
        let total = rows.len();
        let mut tight = vec![false; total];
        for &r in &self.nonbasic {
            tight[r as usize] = true;
        }
        let mut stall = 0u32;
        let mut alpha: Vec<C> = vec![C::from_i64(0); nv];
        let mut iter = 0u64;
        loop {
            if let Some(cut) = cutoff {
                if self.z_ceil()? >= cut {
                    return Ok(LpOutcome::Cutoff);
                }
            }
            iter += 1;
            if iter.is_multiple_of(64) && stop() {
                return Ok(LpOutcome::Stopped);
            }
            // leaving row: most violated, or lowest id while stalling
            let bland = stall >= STALL_LIMIT;
            let mut leave: Option<(usize, C)> = None;
            for id in 0..total {
                if tight[id] {
                    continue;
                }
                let s = if id < nv { self.y[id].clone() } else { self.slack(rows.get(id)).ok_or(Overflow)? };
                if s.sign() >= 0 {
                    continue;
                }
                let better = match &leave {
                    None => true,
                    Some((_, best)) => !bland && s.cmp_value(best).is_lt(),
                };
                if better {
                    leave = Some((id, s));
                    if bland {
                        break;
                    }
                }
            }
            let Some((r, s_r)) = leave else {
                return Ok(LpOutcome::Optimal);
            };
            let row = rows.get(r);
            for (k, a) in alpha.iter_mut().enumerate() {
                let mut acc = C::from_i64(0);
                for &(i, c) in &row.terms {
                    let bik = self.b(i as usize, k);
                    if !bik.is_nil() {
                        acc = acc.add(&bik.mul(&C::from_i64(c)).ok_or(Overflow)?).ok_or(Overflow)?;
                    }
                }
                *a = acc;
            }
            // entering position: min d_k / alpha_k over alpha_k > 0, d_k = -B[q][k]
            let q = nv - 1;
            let mut enter: Option<usize> = None;
            for k in 0..nv {
                if alpha[k].sign() <= 0 {
                    continue;
                }
                enter = match enter {
                    None => Some(k),
                    Some(e) => {
                        // d_k alpha_e vs d_e alpha_k, with d = -B[q]
                        let lhs = self.b(q, e).mul(&alpha[k]).ok_or(Overflow)?;
                        let rhs = self.b(q, k).mul(&alpha[e]).ok_or(Overflow)?;
                        match lhs.cmp_value(&rhs) {
                            core::cmp::Ordering::Less => Some(k),
                            core::cmp::Ordering::Equal if self.nonbasic[k] < self.nonbasic[e] => Some(k),
                            _ => Some(e),
                        }
                    }
                };
            }
            let Some(k) = enter else {
                return Ok(LpOutcome::Infeasible);
            };
            if self.b(q, k).is_nil() {
                stall += 1;
            } else {
                stall = 0;
            }
            self.pivot(k, &alpha, &s_r).ok_or(Overflow)?;
            tight[self.nonbasic[k] as usize] = false;
            self.nonbasic[k] = r as u32;
            tight[r] = true;
            stats.pivots += 1;
        }
    }

    fn pivot(&mut self, k: usize, alpha: &[C], s_r: &C) -> Option<()> {
        let nv = self.nv;
        let ak = alpha[k].clone();
        let det = self.det.clone();
        for i in 0..nv {
            let yi = self.y[i].mul(&ak)?.add(&s_r.mul(self.b(i, k))?)?;
            self.y[i] = yi.div_exact(&det)?;
        }
        let nz: Vec<usize> = (0..nv).filter(|&j| j != k && !alpha[j].is_nil()).collect();
        if ak.cmp_value(&det).is_eq() {
            for i in 0..nv {
                let bik = self.b(i, k).clone();
                if bik.is_nil() {
                    continue;
                }
                for &j in &nz {
                    let t = alpha[j].mul(&bik)?.div_exact(&det)?;
                    let e = &mut self.binv[i * nv + j];
                    *e = e.sub(&t)?;
                }
            }
        } else {
            for i in 0..nv {
                let bik = self.b(i, k).clone();
                for j in 0..nv {
                    if j == k {
                        continue;
                    }
                    let e = &self.binv[i * nv + j];
                    let v = if alpha[j].is_nil() || bik.is_nil() {
                        e.mul(&ak)?.div_exact(&det)?
                    } else {
                        C::mul_sub(e, &ak, &alpha[j], &bik)?.div_exact(&det)?
                    };
                    self.binv[i * nv + j] = v;
                }
            }
        }
        self.det = ak;
        Some(())
    }

    /// Structural values as `(numerators, denominator)`.
    pub fn point(&self) -> (&[C], &C) {
        (&self.y, &self.det)
    }
}
