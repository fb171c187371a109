//! Exact two-level minimization: prime implicants plus minimum set cover.
//!
//! Prime implicants of `f` are its minimal 1-certificates. The cover search
//! runs twice: a branch-and-bound pass finds the minimum size `k`, then an
//! include-first scan over primes in ascending code order returns the
//! lexicographically least cover of size `k`.

use alloc::vec;
use alloc::vec::Vec;

use super::{arity_guard, CertKind, CertTable, CnfDnf, FormKind, Limits, Literal, TruthTable};
use crate::error::Result;
use crate::passign::{PartialAssignment, Trit};

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i >> 6] |= 1 << (i & 63);
    }
    fn get(&self, i: usize) -> bool {
        (self.0[i >> 6] >> (i & 63)) & 1 == 1
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
    fn minus(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & !b).collect())
    }
    fn and_count(&self, o: &Bits) -> usize {
        self.0
            .iter()
            .zip(&o.0)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }
    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.0.len() * 64).filter(move |&i| self.get(i))
    }
}

struct CoverProblem {
    /// Points covered by each candidate set, indexed by point id.
    sets: Vec<Bits>,
    universe: Bits,
    /// For each point, candidate sets covering it, ascending.
    covering: Vec<Vec<usize>>,
}

impl CoverProblem {
    fn new(points: usize, sets: Vec<Bits>) -> Self {
        let mut universe = Bits::new(points);
        let mut covering = vec![Vec::new(); points];
        for (s, bits) in sets.iter().enumerate() {
            for p in bits.iter() {
                if p < points {
                    covering[p].push(s);
                    universe.set(p);
                }
            }
        }
        Self {
            sets,
            universe,
            covering,
        }
    }

    fn greedy(&self) -> usize {
        let mut left = self.universe.clone();
        let mut used = 0;
        while !left.is_empty() {
            let best = (0..self.sets.len())
                .max_by_key(|&s| (self.sets[s].and_count(&left), core::cmp::Reverse(s)))
                .unwrap();
            left = left.minus(&self.sets[best]);
            used += 1;
        }
        used
    }

    fn min_size(&self) -> usize {
        let mut best = self.greedy();
        let max_set = self.sets.iter().map(Bits::count).max().unwrap_or(1).max(1);
        self.bnb(&self.universe, 0, &mut best, max_set);
        best
    }

    fn bnb(&self, left: &Bits, used: usize, best: &mut usize, max_set: usize) {
        if left.is_empty() {
            *best = (*best).min(used);
            return;
        }
        let need = left.count().div_ceil(max_set);
        if used + need >= *best {
            return;
        }
        // branch on the uncovered point with the fewest candidates
        let p = left
            .iter()
            .min_by_key(|&p| (self.covering[p].len(), p))
            .unwrap();
        let mut cands = self.covering[p].clone();
        cands.sort_by_key(|&s| (core::cmp::Reverse(self.sets[s].and_count(left)), s));
        for s in cands {
            self.bnb(&left.minus(&self.sets[s]), used + 1, best, max_set);
        }
    }

    fn lex_least(&self, k: usize) -> Vec<usize> {
        let last_cover: Vec<usize> = self
            .covering
            .iter()
            .map(|c| c.last().copied().unwrap_or(0))
            .collect();
        let mut chosen = Vec::with_capacity(k);
        let found = self.lex(0, &self.universe, k, &mut chosen, &last_cover);
        debug_assert!(found);
        chosen
    }

    fn lex(&self, idx: usize, left: &Bits, k: usize, chosen: &mut Vec<usize>, last: &[usize]) -> bool {
        if left.is_empty() {
            return true;
        }
        if chosen.len() == k || idx == self.sets.len() {
            return false;
        }
        if left.iter().any(|p| last[p] < idx) {
            return false;
        }
        let max_set = self.sets[idx..]
            .iter()
            .map(|s| s.and_count(left))
            .max()
            .unwrap_or(0);
        if max_set == 0 || chosen.len() + left.count().div_ceil(max_set) > k {
            return false;
        }
        if self.sets[idx].and_count(left) > 0 {
            chosen.push(idx);
            if self.lex(idx + 1, &left.minus(&self.sets[idx]), k, chosen, last) {
                return true;
            }
            chosen.pop();
        }
        self.lex(idx + 1, left, k, chosen, last)
    }
}

fn term_of(b: &PartialAssignment) -> Vec<Literal> {
    (0..b.n())
        .filter_map(|i| match b.trit(i) {
            Trit::Zero => Some(Literal::neg(i)),
            Trit::One => Some(Literal::pos(i)),
            Trit::Star => None,
        })
        .collect()
}

fn min_cover_of(f: &TruthTable, certs: &CertTable, kind: CertKind) -> Vec<PartialAssignment> {
    let primes = certs.minimal(kind);
    let want = kind == CertKind::OneCert;
    let sets: Vec<Bits> = primes
        .iter()
        .map(|b| {
            let mut bits = Bits::new(f.len());
            for x in b.completions() {
                bits.set(x);
            }
            bits
        })
        .collect();
    let problem = CoverProblem::new(f.len(), sets);
    // points outside the relevant on/off set never appear in `sets`
    debug_assert!((0..f.len()).all(|x| problem.universe.get(x) == (f.get(x) == want)));
    if problem.universe.first().is_none() {
        return Vec::new();
    }
    let k = problem.min_size();
    let chosen = problem.lex_least(k);
    chosen.into_iter().map(|s| primes[s]).collect()
}

/// Minimum DNF of `f`; the lexicographically least among minimum covers.
pub fn exact_min_dnf(f: &TruthTable) -> Result<CnfDnf> {
    exact_min_dnf_with(f, &Limits::default())
}

fn exact_min_dnf_with(f: &TruthTable, limits: &Limits) -> Result<CnfDnf> {
    arity_guard(f.n(), limits.ds_cs_arity)?;
    let certs = CertTable::new(f);
    let terms = min_cover_of(f, &certs, CertKind::OneCert)
        .iter()
        .map(term_of)
        .collect();
    let dnf = CnfDnf::new(f.n(), FormKind::Dnf, terms)?;
    debug_assert!(dnf.represents(f));
    Ok(dnf)
}

/// Minimum CNF of `f`, obtained from a minimum DNF of `¬f` by De Morgan.
pub fn exact_min_cnf(f: &TruthTable) -> Result<CnfDnf> {
    exact_min_cnf_with(f, &Limits::default())
}

fn exact_min_cnf_with(f: &TruthTable, limits: &Limits) -> Result<CnfDnf> {
    let neg = exact_min_dnf_with(&f.negate(), limits)?;
    let clauses = neg
        .terms
        .into_iter()
        .map(|t| t.into_iter().map(Literal::complement).collect())
        .collect();
    let cnf = CnfDnf::new(f.n(), FormKind::Cnf, clauses)?;
    debug_assert!(cnf.represents(f));
    Ok(cnf)
}

/// `(ds(f), cs(f))`.
pub fn exact_ds_cs(f: &TruthTable) -> Result<(usize, usize)> {
    exact_ds_cs_with(f, &Limits::default())
}

pub fn exact_ds_cs_with(f: &TruthTable, limits: &Limits) -> Result<(usize, usize)> {
    Ok((
        exact_min_dnf_with(f, limits)?.len(),
        exact_min_cnf_with(f, limits)?.len(),
    ))
}
