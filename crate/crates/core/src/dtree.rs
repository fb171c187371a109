//! Decision trees, rank, decision lists and threshold polynomials.
//!
//! A monotone submodular set function with range `{0..d}` has a decision
//! tree of rank at most `d`; applied to the zero-stripped form of a 1-goal
//! function this gives a Boolean tree of rank at most `Γ¹(f)` for monotone
//! `f`. Rank-`d` trees convert to `d`-decision lists, and those to degree-`d`
//! threshold polynomials.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::boolfn::{Literal, TruthTable};
use crate::error::{Error, Result};
use crate::utility::{k_goal_status, UtilityTable};

/// Left (`lo`) is the `x_var = 0` branch. Boolean trees use leaves `0`/`1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TreeRepr", into = "TreeRepr")]
pub enum DecisionTree {
    Leaf(u64),
    Node {
        var: usize,
        lo: Box<DecisionTree>,
        hi: Box<DecisionTree>,
    },
}

/// JSON form with 1-based variables.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TreeRepr {
    Leaf { leaf: u64 },
    Node { var: usize, lo: Box<TreeRepr>, hi: Box<TreeRepr> },
}

impl From<DecisionTree> for TreeRepr {
    fn from(t: DecisionTree) -> Self {
        match t {
            DecisionTree::Leaf(v) => TreeRepr::Leaf { leaf: v },
            DecisionTree::Node { var, lo, hi } => TreeRepr::Node {
                var: var + 1,
                lo: Box::new((*lo).into()),
                hi: Box::new((*hi).into()),
            },
        }
    }
}

impl TryFrom<TreeRepr> for DecisionTree {
    type Error = String;

    fn try_from(r: TreeRepr) -> core::result::Result<Self, String> {
        Ok(match r {
            TreeRepr::Leaf { leaf } => DecisionTree::Leaf(leaf),
            TreeRepr::Node { var: 0, .. } => return Err(String::from("variables are numbered from 1")),
            TreeRepr::Node { var, lo, hi } => DecisionTree::node(var - 1, (*lo).try_into()?, (*hi).try_into()?),
        })
    }
}

impl DecisionTree {
    pub fn node(var: usize, lo: DecisionTree, hi: DecisionTree) -> Self {
        DecisionTree::Node {
            var,
            lo: Box::new(lo),
            hi: Box::new(hi),
        }
    }

    /// `0` for a leaf; the larger child rank if they differ, else one more.
    pub fn rank(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 0,
            DecisionTree::Node { lo, hi, .. } => {
                let (a, b) = (lo.rank(), hi.rank());
                if a == b {
                    a + 1
                } else {
                    a.max(b)
                }
            }
        }
    }

    /// Largest number of internal nodes on a root-leaf path.
    pub fn depth(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 0,
            DecisionTree::Node { lo, hi, .. } => 1 + lo.depth().max(hi.depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 1,
            DecisionTree::Node { lo, hi, .. } => 1 + lo.size() + hi.size(),
        }
    }

    /// Value at input `x` (bit `i` is `x_{i+1}`).
    pub fn eval(&self, x: usize) -> u64 {
        let mut t = self;
        loop {
            match t {
                DecisionTree::Leaf(v) => return *v,
                DecisionTree::Node { var, lo, hi } => t = if (x >> var) & 1 == 1 { hi } else { lo },
            }
        }
    }

    /// Checks variables are below `n` and never repeat on a path.
    pub fn is_valid(&self, n: usize) -> bool {
        fn go(t: &DecisionTree, n: usize, used: u64) -> bool {
            match t {
                DecisionTree::Leaf(_) => true,
                DecisionTree::Node { var, lo, hi } => {
                    *var < n && *var < 64 && used & (1 << var) == 0 && go(lo, n, used | 1 << var) && go(hi, n, used | 1 << var)
                }
            }
        }
        go(self, n, 0)
    }

    /// Whether the Boolean tree computes `f` on every input.
    pub fn computes(&self, f: &TruthTable) -> bool {
        self.is_valid(f.n()) && (0..f.len()).all(|x| self.eval(x) == u64::from(f.get(x)))
    }

    /// Expected cost of the path taken on a random input, where `probs[i]`
    /// is `Pr[x_i = 1]` and querying `x_i` costs `costs[i]`.
    pub fn expected_cost(&self, costs: &[BigRational], probs: &[BigRational]) -> Result<BigRational> {
        match self {
            DecisionTree::Leaf(_) => Ok(BigRational::zero()),
            DecisionTree::Node { var, lo, hi } => {
                let (c, p) = costs
                    .get(*var)
                    .zip(probs.get(*var))
                    .ok_or(Error::UnknownVariable(var + 1))?;
                let q = BigRational::one() - p;
                Ok(c + q * lo.expected_cost(costs, probs)? + p * hi.expected_cost(costs, probs)?)
            }
        }
    }

    /// Expected depth under the product distribution `probs`.
    pub fn expected_depth(&self, probs: &[BigRational]) -> Result<BigRational> {
        let ones = vec![BigRational::one(); probs.len()];
        self.expected_cost(&ones, probs)
    }

    /// Expected depth under the uniform distribution on `n` inputs.
    pub fn expected_depth_uniform(&self, n: usize) -> Result<BigRational> {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        self.expected_depth(&vec![half; n])
    }

    fn map_leaves(self, f: &impl Fn(u64) -> u64) -> DecisionTree {
        match self {
            DecisionTree::Leaf(v) => DecisionTree::Leaf(f(v)),
            DecisionTree::Node { var, lo, hi } => DecisionTree::node(var, lo.map_leaves(f), hi.map_leaves(f)),
        }
    }

    /// Exchanges every pair of branches, i.e. reads each input negated.
    fn mirror(self) -> DecisionTree {
        match self {
            DecisionTree::Leaf(_) => self,
            DecisionTree::Node { var, lo, hi } => DecisionTree::node(var, hi.mirror(), lo.mirror()),
        }
    }
}

/// Checks that `h` (indexed by subset bitmask) is monotone and submodular.
pub fn check_set_function(n: usize, h: &[u64]) -> Result<()> {
    if h.len() != 1usize << n {
        return Err(Error::InvalidParams(format!("set function on {n} variables needs {} values", 1usize << n)));
    }
    for s in 0..h.len() {
        for i in (0..n).filter(|i| s >> i & 1 == 0) {
            let si = s | 1 << i;
            if h[si] < h[s] {
                return Err(Error::NotGoalFunction(format!("not monotone at set {s:#b} adding x{}", i + 1)));
            }
            for j in (i + 1..n).filter(|j| s >> j & 1 == 0) {
                let sj = s | 1 << j;
                if h[si | 1 << j] as i128 + h[s] as i128 > h[si] as i128 + h[sj] as i128 {
                    return Err(Error::NotGoalFunction(format!(
                        "not submodular at set {s:#b} with x{} and x{}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Tree computing `h` on inputs (the set of ones of `x`) with rank at most
/// `max h - h(∅)`.
///
/// At each node the variable is the lowest-index one with positive singleton
/// gain inside the least (by bitmask) maximizing set.
pub fn tree_from_monotone_submodular(n: usize, h: &[u64]) -> Result<DecisionTree> {
    check_set_function(n, h)?;
    let free = (1usize << n) - 1;
    build_rank_tree(h, 0, free)
}

/// Subproblem `A ↦ h(fixed ∪ A) - h(fixed)` over `A ⊆ free`.
fn build_rank_tree(h: &[u64], fixed: usize, free: usize) -> Result<DecisionTree> {
    let base = h[fixed];
    let mut best = fixed;
    let mut a = free;
    // enumerate subsets of `free` in increasing order
    let mut subsets = Vec::new();
    loop {
        subsets.push(a);
        if a == 0 {
            break;
        }
        a = (a - 1) & free;
    }
    for &a in subsets.iter().rev() {
        if h[fixed | a] > h[best] {
            best = fixed | a;
        }
    }
    if h[best] == base {
        return Ok(DecisionTree::Leaf(base));
    }
    let s = best & !fixed;
    let i = (0..usize::BITS as usize)
        .find(|&i| s >> i & 1 == 1 && h[fixed | 1 << i] > base)
        .ok_or_else(|| Error::NotGoalFunction(String::from("no variable with positive gain in a maximizer")))?;
    let rest = free & !(1 << i);
    let lo = build_rank_tree(h, fixed, rest)?;
    let hi = build_rank_tree(h, fixed | 1 << i, rest)?;
    Ok(DecisionTree::node(i, lo, hi))
}

/// Code of the partial assignment with `value` on `set` and stars elsewhere.
fn code_on(n: usize, set: usize, value: bool) -> u32 {
    let digit = u32::from(value);
    (0..n).rev().fold(0u32, |c, i| c * 3 + if set >> i & 1 == 1 { digit } else { 2 })
}

/// Boolean tree for a monotone `f` from a `k`-goal function `g` of value
/// `d`; its rank is at most `d`.
///
/// For `k = 1` the set function is `h(S) = g(1 on S, * elsewhere)` and a leaf
/// computes `1` exactly when it carries `d`. `k = 0` is the dual: the tree is
/// built on zero sets and its branches exchanged.
pub fn goal_to_boolean_tree(g: &UtilityTable, f: &TruthTable, k: bool) -> Result<DecisionTree> {
    if !f.is_monotone() {
        return Err(Error::Precondition(String::from("f must be monotone")));
    }
    if let Some(v) = f.constant_value() {
        return Ok(DecisionTree::Leaf(u64::from(v)));
    }
    let d = k_goal_status(g, f, k)?
        .ok_or_else(|| Error::NotGoalFunction(format!("table is not a {}-goal function for f", u8::from(k))))?;
    let n = f.n();
    let h: Vec<u64> = (0..1usize << n).map(|s| g.get(code_on(n, s, k))).collect();
    let tree = tree_from_monotone_submodular(n, &h)?;
    let (hit, miss) = (u64::from(k), u64::from(!k));
    let tree = tree.map_leaves(&|v| if v == d { hit } else { miss });
    Ok(if k { tree } else { tree.mirror() })
}

/// Ordered rules; the output is the bit of the first rule whose term holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DecisionList {
    pub items: Vec<ListItem>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListItem {
    #[serde(with = "term_text")]
    pub term: Vec<Literal>,
    pub value: bool,
}

/// Terms as text: `"x1 & ~x3"`, the empty term as `"1"`.
mod term_text {
    use alloc::string::String;
    use alloc::vec::Vec;

    use serde::{de, Deserialize, Deserializer, Serializer};

    use crate::boolfn::{CnfDnf, FormKind, Literal};

    pub fn serialize<S: Serializer>(t: &[Literal], s: S) -> Result<S::Ok, S::Error> {
        let n = t.iter().map(|l| l.var + 1).max().unwrap_or(0);
        let form = CnfDnf::new(n, FormKind::Dnf, alloc::vec![t.to_vec()]).map_err(serde::ser::Error::custom)?;
        s.collect_str(&form)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Literal>, D::Error> {
        let text = String::deserialize(d)?;
        let form = CnfDnf::parse(usize::MAX >> 1, FormKind::Dnf, &text).map_err(de::Error::custom)?;
        match form.terms.as_slice() {
            [t] => Ok(t.clone()),
            _ => Err(de::Error::custom("expected a single term")),
        }
    }
}

impl DecisionList {
    pub fn eval(&self, x: usize) -> bool {
        self.items
            .iter()
            .find(|it| it.term.iter().all(|l| l.holds(x)))
            .is_some_and(|it| it.value)
    }

    /// Largest term length.
    pub fn width(&self) -> usize {
        self.items.iter().map(|it| it.term.len()).max().unwrap_or(0)
    }

    pub fn computes(&self, f: &TruthTable) -> bool {
        self.items.last().is_some_and(|it| it.term.is_empty()) && (0..f.len()).all(|x| self.eval(x) == f.get(x))
    }
}

/// Decision list of width at most `rank(t)` for a Boolean tree: the
/// lower-rank branch is emitted first with its literal prepended, then the
/// other branch.
pub fn tree_to_decision_list(t: &DecisionTree) -> Result<DecisionList> {
    let mut items = Vec::new();
    peel(t, &mut Vec::new(), &mut items)?;
    Ok(DecisionList { items })
}

fn peel(t: &DecisionTree, prefix: &mut Vec<Literal>, out: &mut Vec<ListItem>) -> Result<()> {
    match t {
        DecisionTree::Leaf(v) if *v <= 1 => {
            out.push(ListItem {
                term: prefix.clone(),
                value: *v == 1,
            });
            Ok(())
        }
        DecisionTree::Leaf(v) => Err(Error::Precondition(format!("leaf value {v} is not a bit"))),
        DecisionTree::Node { var, lo, hi } => {
            let (first, lit) = if hi.rank() < lo.rank() {
                (hi, Literal::pos(*var))
            } else {
                (lo, Literal::neg(*var))
            };
            let second = if lit.positive { lo } else { hi };
            // the first branch is emitted under its literal; the second only
            // sees inputs the first did not catch
            let mut sub = Vec::new();
            peel(first, &mut Vec::new(), &mut sub)?;
            for mut it in sub {
                let mut term = prefix.clone();
                term.push(lit);
                term.append(&mut it.term);
                out.push(ListItem { term, value: it.value });
            }
            peel(second, prefix, out)
        }
    }
}

/// Multilinear integer polynomial; keys are variable bitmasks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "PolyRepr", try_from = "PolyRepr")]
pub struct ThresholdPoly {
    pub n: usize,
    pub terms: BTreeMap<u64, BigInt>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    n: usize,
    terms: Vec<MonomialRepr>,
}

#[derive(Serialize, Deserialize)]
struct MonomialRepr {
    vars: Vec<usize>,
    coeff: String,
}

impl From<ThresholdPoly> for PolyRepr {
    fn from(p: ThresholdPoly) -> Self {
        PolyRepr {
            n: p.n,
            terms: p
                .terms
                .into_iter()
                .map(|(m, c)| MonomialRepr {
                    vars: (0..64).filter(|i| m >> i & 1 == 1).map(|i| i + 1).collect(),
                    coeff: c.to_string(),
                })
                .collect(),
        }
    }
}

impl TryFrom<PolyRepr> for ThresholdPoly {
    type Error = String;

    fn try_from(r: PolyRepr) -> core::result::Result<Self, String> {
        let mut terms = BTreeMap::new();
        for t in r.terms {
            let mut m = 0u64;
            for v in t.vars {
                if v == 0 || v > 64 {
                    return Err(format!("variable {v} out of range"));
                }
                m |= 1 << (v - 1);
            }
            let c: BigInt = t.coeff.parse().map_err(|_| format!("bad coefficient `{}`", t.coeff))?;
            *terms.entry(m).or_insert_with(BigInt::zero) += c;
        }
        terms.retain(|_, c: &mut BigInt| !c.is_zero());
        Ok(ThresholdPoly { n: r.n, terms })
    }
}

impl ThresholdPoly {
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.count_ones() as usize).max().unwrap_or(0)
    }

    pub fn value(&self, x: usize) -> BigInt {
        let x = x as u64;
        self.terms
            .iter()
            .filter(|(m, _)| x & **m == **m)
            .map(|(_, c)| c.clone())
            .sum()
    }

    /// `sgn(p(x))`, with `sgn(z) = 1` iff `z >= 0`.
    pub fn sign(&self, x: usize) -> bool {
        !self.value(x).is_negative()
    }

    pub fn computes(&self, f: &TruthTable) -> bool {
        self.n == f.n() && (0..f.len()).all(|x| self.sign(x) == f.get(x))
    }
}

/// `p(x) = Σ ±2^(m-i) · t_i(x)` over the `m` rules, with the sign of rule
/// `i` given by its bit and `~x_j` written as `1 - x_j`. The first satisfied
/// rule outweighs all later ones, so `sgn(p)` is the list's output.
pub fn decision_list_to_ptf(n: usize, l: &DecisionList) -> Result<ThresholdPoly> {
    let m = l.items.len();
    let mut terms: BTreeMap<u64, BigInt> = BTreeMap::new();
    for (idx, it) in l.items.iter().enumerate() {
        let weight = BigInt::one() << (m - 1 - idx);
        let weight = if it.value { weight } else { -weight };
        let mut pos = 0u64;
        let mut negs = Vec::new();
        for lit in &it.term {
            if lit.var >= n || lit.var >= 64 {
                return Err(Error::UnknownVariable(lit.var + 1));
            }
            if lit.positive {
                pos |= 1 << lit.var;
            } else {
                negs.push(lit.var);
            }
        }
        // ∏(1 - x_j) = Σ_{U ⊆ negs} (-1)^|U| x_U
        for sel in 0..1usize << negs.len() {
            let mut mono = pos;
            for (b, &v) in negs.iter().enumerate() {
                if sel >> b & 1 == 1 {
                    mono |= 1 << v;
                }
            }
            let c = if sel.count_ones() % 2 == 1 { -weight.clone() } else { weight.clone() };
            *terms.entry(mono).or_insert_with(BigInt::zero) += c;
        }
    }
    terms.retain(|_, c| !c.is_zero());
    Ok(ThresholdPoly { n, terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::Family;
    use crate::constructions::{kofn_goals, GoalRecipe};
    use crate::rational::ratio;

    fn leaf(v: u64) -> DecisionTree {
        DecisionTree::Leaf(v)
    }

    #[test]
    fn rank_and_depth() {
        assert_eq!((leaf(0).rank(), leaf(0).depth()), (0, 0));
        let t = DecisionTree::node(0, DecisionTree::node(1, leaf(0), leaf(1)), DecisionTree::node(1, leaf(1), leaf(0)));
        assert_eq!((t.rank(), t.depth()), (2, 2));
        let and2 = DecisionTree::node(0, leaf(0), DecisionTree::node(1, leaf(0), leaf(1)));
        assert_eq!(and2.rank(), 1);
        assert_eq!(and2.expected_depth_uniform(2).unwrap(), ratio(3, 2));
        assert!(and2.computes(&Family::And.build(2).unwrap()));
        let bad = DecisionTree::node(0, leaf(0), DecisionTree::node(0, leaf(0), leaf(1)));
        assert!(!bad.is_valid(2));
    }

    #[test]
    fn json_uses_one_based_variables() {
        let t = DecisionTree::node(0, leaf(0), leaf(1));
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"var":1,"lo":{"leaf":0},"hi":{"leaf":1}}"#);
        assert_eq!(serde_json::from_str::<DecisionTree>(&s).unwrap(), t);
        assert!(serde_json::from_str::<DecisionTree>(r#"{"var":0,"lo":{"leaf":0},"hi":{"leaf":1}}"#).is_err());
    }

    #[test]
    fn rank_construction_examples() {
        let or = |s: usize| u64::from(s != 0);
        let h: Vec<u64> = (0..8).map(or).collect();
        let t = tree_from_monotone_submodular(3, &h).unwrap();
        assert_eq!(t.rank(), 1);
        assert!((0..8).all(|x| t.eval(x) == h[x]));
        assert_eq!(tree_from_monotone_submodular(2, &[5; 4]).unwrap(), leaf(5));
        let h: Vec<u64> = (0..8usize).map(|s| (s.count_ones() as u64).min(2)).collect();
        let t = tree_from_monotone_submodular(3, &h).unwrap();
        assert!(t.rank() <= 2);
        assert!((0..8).all(|x| t.eval(x) == h[x]));
        // supermodular
        assert!(tree_from_monotone_submodular(2, &[0, 0, 0, 1]).is_err());
    }

    #[test]
    fn boolean_trees_lists_and_polynomials() {
        let cases = [
            (Family::Or.build(3).unwrap(), kofn_goals(1, 3).unwrap().0, true, 1),
            (Family::KofN { k: 2 }.build(3).unwrap(), kofn_goals(2, 3).unwrap().0, true, 2),
            (Family::And.build(2).unwrap(), kofn_goals(2, 2).unwrap().0, true, 2),
            (Family::And.build(3).unwrap(), kofn_goals(3, 3).unwrap().1, false, 1),
        ];
        for (f, g, k, d) in cases {
            let t = goal_to_boolean_tree(&g, &f, k).unwrap();
            assert!(t.computes(&f), "{f}");
            assert!(t.rank() <= d, "{f} rank {}", t.rank());
            let l = tree_to_decision_list(&t).unwrap();
            assert!(l.computes(&f));
            assert!(l.width() <= t.rank());
            let p = decision_list_to_ptf(f.n(), &l).unwrap();
            assert!(p.computes(&f));
            assert!(p.degree() <= l.width());
            let back: ThresholdPoly = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
            assert_eq!(back, p);
            let lb: DecisionList = serde_json::from_str(&serde_json::to_string(&l).unwrap()).unwrap();
            assert_eq!(lb, l);
        }
        let one = DecisionList {
            items: vec![ListItem { term: vec![], value: true }],
        };
        assert_eq!(tree_to_decision_list(&leaf(1)).unwrap(), one);
        let p = decision_list_to_ptf(2, &one).unwrap();
        assert_eq!(p.terms, BTreeMap::from([(0u64, BigInt::one())]));
    }

    #[test]
    fn monotone_functions_up_to_three() {
        for n in 1..=3 {
            for bits in 0..1u64 << (1 << n) {
                let f = TruthTable::from_u64(n, bits).unwrap();
                if !f.is_monotone() {
                    continue;
                }
                for (recipe, k) in [(GoalRecipe::CnfOneGoal { cnf: None }, true), (GoalRecipe::DnfZeroGoal { dnf: None }, false)] {
                    let b = recipe.build(&f).unwrap();
                    let t = goal_to_boolean_tree(&b.table, &f, k).unwrap_or_else(|e| panic!("{f} k={k}: {e}"));
                    assert!(t.computes(&f), "{f} k={k}");
                    assert!(t.rank() as u64 <= b.q, "{f} k={k}");
                    let l = tree_to_decision_list(&t).unwrap();
                    assert!(l.computes(&f) && l.width() <= t.rank());
                    assert!(decision_list_to_ptf(n, &l).unwrap().computes(&f));
                }
            }
        }
    }
}
