//! Partial assignments over `{0,1,*}^n` and the extension graph they span.
//!
//! A partial assignment is stored as its base-3 code `Σ t_i 3^i` with the
//! trit encoding `0 ↦ 0`, `1 ↦ 1`, `* ↦ 2` and `x_1` in the least
//! significant position. The all-star assignment therefore has code
//! `3^n - 1` and full assignments are exactly the codes without a 2 digit.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest arity for which codes fit comfortably in `u32` with room for
/// arithmetic (`3^20 < 2^32`).
pub const MAX_CODE_ARITY: usize = 20;

/// `3^k`.
#[inline]
pub const fn pow3(k: usize) -> u32 {
    let mut r = 1u32;
    let mut i = 0;
    while i < k {
        r *= 3;
        i += 1;
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Trit {
    Zero,
    One,
    Star,
}

impl Trit {
    #[inline]
    pub const fn digit(self) -> u32 {
        match self {
            Trit::Zero => 0,
            Trit::One => 1,
            Trit::Star => 2,
        }
    }

    #[inline]
    pub const fn from_digit(d: u32) -> Trit {
        match d {
            0 => Trit::Zero,
            1 => Trit::One,
            _ => Trit::Star,
        }
    }

    pub const fn from_bit(bit: bool) -> Trit {
        if bit {
            Trit::One
        } else {
            Trit::Zero
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Trit::Zero => '0',
            Trit::One => '1',
            Trit::Star => '*',
        }
    }
}

/// An element of `{0,1,*}^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialAssignment {
    n: u8,
    code: u32,
}

impl PartialAssignment {
    pub fn from_code(n: usize, code: u32) -> Result<Self> {
        check_arity(n)?;
        if code >= pow3(n) {
            return Err(Error::InvalidCode { n, code });
        }
        Ok(Self { n: n as u8, code })
    }

    /// Caller guarantees `code < 3^n` and `n <= MAX_CODE_ARITY`.
    #[inline]
    pub(crate) const fn from_code_unchecked(n: usize, code: u32) -> Self {
        Self { n: n as u8, code }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_code_unchecked(n, pow3(n) - 1)
    }

    pub fn from_trits(trits: &[Trit]) -> Result<Self> {
        check_arity(trits.len())?;
        let code = trits.iter().rev().fold(0u32, |acc, t| acc * 3 + t.digit());
        Ok(Self::from_code_unchecked(trits.len(), code))
    }

    /// The full assignment for the input index `x = Σ x_i 2^(i-1)`.
    pub fn from_input(n: usize, x: usize) -> Self {
        let mut code = 0u32;
        for i in (0..n).rev() {
            code = code * 3 + ((x >> i) & 1) as u32;
        }
        Self::from_code_unchecked(n, code)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn code(&self) -> u32 {
        self.code
    }

    #[inline]
    pub fn trit(&self, i: usize) -> Trit {
        Trit::from_digit((self.code / pow3(i)) % 3)
    }

    pub fn trits(&self) -> Vec<Trit> {
        let mut out = Vec::with_capacity(self.n());
        let mut c = self.code;
        for _ in 0..self.n() {
            out.push(Trit::from_digit(c % 3));
            c /= 3;
        }
        out
    }

    /// Number of non-star positions.
    pub fn weight(&self) -> usize {
        let mut c = self.code;
        let mut w = 0;
        for _ in 0..self.n() {
            if c % 3 != 2 {
                w += 1;
            }
            c /= 3;
        }
        w
    }

    pub fn stars(&self) -> usize {
        self.n() - self.weight()
    }

    pub fn is_full(&self) -> bool {
        self.weight() == self.n()
    }

    /// `b_{x_i <- t}`.
    pub fn with(&self, i: usize, t: Trit) -> Self {
        let p = pow3(i);
        let old = (self.code / p) % 3;
        let code = self.code - old * p + t.digit() * p;
        Self::from_code_unchecked(self.n(), code)
    }

    /// Input index of a full assignment, `None` if any position is a star.
    pub fn input_index(&self) -> Option<usize> {
        let mut c = self.code;
        let mut x = 0usize;
        for i in 0..self.n() {
            match c % 3 {
                0 => {}
                1 => x |= 1 << i,
                _ => return None,
            }
            c /= 3;
        }
        Some(x)
    }

    /// `self ⪰ other`: every non-star of `other` is set identically in `self`.
    pub fn extends(&self, other: &PartialAssignment) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::ArityMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        let (mut a, mut b) = (self.code, other.code);
        for _ in 0..self.n() {
            let (ta, tb) = (a % 3, b % 3);
            if tb != 2 && ta != tb {
                return Ok(false);
            }
            a /= 3;
            b /= 3;
        }
        Ok(true)
    }

    /// All one-step extensions in ascending code order.
    pub fn extensions_one_step(&self) -> Vec<PartialAssignment> {
        let mut out = Vec::with_capacity(2 * self.stars());
        for i in 0..self.n() {
            if self.trit(i) == Trit::Star {
                out.push(self.with(i, Trit::Zero));
                out.push(self.with(i, Trit::One));
            }
        }
        out.sort_unstable();
        out
    }

    /// Every full assignment extending `self`, as input indices in ascending order.
    pub fn completions(&self) -> Vec<usize> {
        let mut fixed = 0usize;
        let mut free = Vec::new();
        for i in 0..self.n() {
            match self.trit(i) {
                Trit::Zero => {}
                Trit::One => fixed |= 1 << i,
                Trit::Star => free.push(i),
            }
        }
        let mut out = Vec::with_capacity(1 << free.len());
        for m in 0..(1usize << free.len()) {
            let mut x = fixed;
            for (k, &i) in free.iter().enumerate() {
                if (m >> k) & 1 == 1 {
                    x |= 1 << i;
                }
            }
            out.push(x);
        }
        out.sort_unstable();
        out
    }
}

impl fmt::Display for PartialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in self.trits() {
            write!(f, "{}", t.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for PartialAssignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut trits = Vec::with_capacity(s.len());
        for (pos, ch) in s.chars().enumerate() {
            trits.push(match ch {
                '0' => Trit::Zero,
                '1' => Trit::One,
                '*' => Trit::Star,
                _ => {
                    return Err(Error::Parse {
                        pos,
                        msg: String::from("expected one of 0, 1, *"),
                    })
                }
            });
        }
        if trits.is_empty() {
            return Err(Error::Parse {
                pos: 0,
                msg: String::from("empty partial assignment"),
            });
        }
        Self::from_trits(&trits)
    }
}

impl Serialize for PartialAssignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PartialAssignment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = <alloc::borrow::Cow<'de, str>>::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) fn check_arity(n: usize) -> Result<()> {
    if n == 0 || n > MAX_CODE_ARITY {
        Err(Error::ArityOutOfRange {
            n,
            max: MAX_CODE_ARITY,
        })
    } else {
        Ok(())
    }
}

/// A directed edge `from -> from_{x_var <- value}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: PartialAssignment,
    pub var: usize,
    pub value: bool,
}

impl Edge {
    pub fn to(&self) -> PartialAssignment {
        self.from.with(self.var, Trit::from_bit(self.value))
    }
}

/// Four-cycle in the extension graph: `alpha` refined by `x_i <- l_i`
/// (giving `beta`), by `x_j <- l_j` (giving `alpha'`), and by both
/// (giving `beta'`). `i < j` always holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SmallDiagram {
    pub alpha: PartialAssignment,
    pub i: usize,
    pub j: usize,
    pub li: bool,
    pub lj: bool,
}

impl SmallDiagram {
    pub fn beta(&self) -> PartialAssignment {
        self.alpha.with(self.i, Trit::from_bit(self.li))
    }

    pub fn alpha_prime(&self) -> PartialAssignment {
        self.alpha.with(self.j, Trit::from_bit(self.lj))
    }

    pub fn beta_prime(&self) -> PartialAssignment {
        self.beta().with(self.j, Trit::from_bit(self.lj))
    }

    /// Corner codes `[alpha, beta, alpha', beta']`.
    pub fn corners(&self) -> [u32; 4] {
        [
            self.alpha.code(),
            self.beta().code(),
            self.alpha_prime().code(),
            self.beta_prime().code(),
        ]
    }

    pub fn is_well_formed(&self) -> bool {
        if self.i == self.j
            || self.alpha.trit(self.i) != Trit::Star
            || self.alpha.trit(self.j) != Trit::Star
        {
            return false;
        }
        let c = self.corners();
        (0..4).all(|a| (a + 1..4).all(|b| c[a] != c[b]))
    }
}

/// Edges in ascending order of source code, then variable, then value.
pub fn edges(n: usize) -> impl Iterator<Item = Edge> {
    let total = pow3(n);
    (0..total).flat_map(move |code| {
        let from = PartialAssignment::from_code_unchecked(n, code);
        (0..n)
            .filter(move |&i| from.trit(i) == Trit::Star)
            .flat_map(move |var| {
                [false, true]
                    .into_iter()
                    .map(move |value| Edge { from, var, value })
            })
    })
}

/// Small diagrams in ascending order of `alpha`, then `(i, j)`, then `(l_i, l_j)`.
pub fn small_diagrams(n: usize) -> impl Iterator<Item = SmallDiagram> {
    let total = pow3(n);
    (0..total).flat_map(move |code| {
        let alpha = PartialAssignment::from_code_unchecked(n, code);
        let stars: Vec<usize> = (0..n).filter(|&i| alpha.trit(i) == Trit::Star).collect();
        let mut out = Vec::new();
        for (a, &i) in stars.iter().enumerate() {
            for &j in &stars[a + 1..] {
                for li in [false, true] {
                    for lj in [false, true] {
                        out.push(SmallDiagram { alpha, i, j, li, lj });
                    }
                }
            }
        }
        out.into_iter()
    })
}

pub fn vertex_count(n: usize) -> u64 {
    3u64.pow(n as u32)
}

/// `2n · 3^(n-1)`.
pub fn edge_count(n: usize) -> u64 {
    if n == 0 {
        return 0;
    }
    2 * n as u64 * 3u64.pow(n as u32 - 1)
}

/// `2n(n-1) · 3^(n-2)`, zero for `n < 2`.
pub fn small_diagram_count(n: usize) -> u64 {
    if n < 2 {
        return 0;
    }
    2 * (n as u64) * (n as u64 - 1) * 3u64.pow(n as u32 - 2)
}
