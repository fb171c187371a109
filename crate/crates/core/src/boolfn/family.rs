use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::TruthTable;
use crate::error::{Error, Result};

/// Named function families.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Family {
    And,
    Or,
    Xor,
    /// At least `k` inputs are 1.
    KofN { k: usize },
    /// `x_1 x_2 ∨ x_3 x_4 ∨ …`, `n` even.
    Pairs,
    /// `x_1 x_2 x_3 ∨ x_4 x_5 x_6 ∨ …`, `3 | n`.
    Triples,
    /// First half strictly less than second half as binary numbers, most
    /// significant bit first within each half; `n` even.
    #[serde(rename = "lt")]
    LessThan,
    /// 1 exactly on the input `b`, given as 0/1 per variable.
    Unique { b: Vec<bool> },
    /// 1 iff the input agrees with `b` in at least `k` positions.
    Agree { b: Vec<bool>, k: usize },
}

impl Family {
    pub fn build(&self, n: usize) -> Result<TruthTable> {
        let invalid = |msg: &str| Err(Error::InvalidParams(String::from(msg)));
        let ones = |x: usize| x.count_ones() as usize;
        match self {
            Family::And => TruthTable::from_fn(n, |x| ones(x) == n),
            Family::Or => TruthTable::from_fn(n, |x| x != 0),
            Family::Xor => TruthTable::from_fn(n, |x| ones(x) % 2 == 1),
            Family::KofN { k } => {
                if *k < 1 || *k > n {
                    return invalid("k-of-n requires 1 <= k <= n");
                }
                TruthTable::from_fn(n, |x| ones(x) >= *k)
            }
            Family::Pairs => grouped(n, 2),
            Family::Triples => grouped(n, 3),
            Family::LessThan => {
                if n == 0 || !n.is_multiple_of(2) {
                    return invalid("less-than requires even n");
                }
                let m = n / 2;
                let half = |x: usize, off: usize| {
                    (0..m).fold(0usize, |acc, i| (acc << 1) | ((x >> (off + i)) & 1))
                };
                TruthTable::from_fn(n, |x| half(x, 0) < half(x, m))
            }
            Family::Unique { b } => {
                if b.len() != n {
                    return invalid("assignment length must equal n");
                }
                let target = pack(b);
                TruthTable::from_fn(n, |x| x == target)
            }
            Family::Agree { b, k } => {
                if b.len() != n || *k > n {
                    return invalid("agree-in-k requires |b| = n and k <= n");
                }
                let target = pack(b);
                TruthTable::from_fn(n, |x| n - ones(x ^ target) >= *k)
            }
        }
    }
}

fn pack(b: &[bool]) -> usize {
    b.iter()
        .enumerate()
        .fold(0usize, |acc, (i, &v)| acc | ((v as usize) << i))
}

fn grouped(n: usize, size: usize) -> Result<TruthTable> {
    if n == 0 || !n.is_multiple_of(size) {
        return Err(Error::InvalidParams(alloc::format!(
            "group size {size} must divide n"
        )));
    }
    let group = (1usize << size) - 1;
    TruthTable::from_fn(n, |x| (0..n / size).any(|g| (x >> (g * size)) & group == group))
}
