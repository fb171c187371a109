//! Boolean functions as truth tables.
//!
//! Input `x` is identified with the index `Σ x_i 2^(i-1)`, i.e. `x_1` is the
//! least significant bit. Variables are 0-based in the API (`0` is `x_1`)
//! and 1-based in every textual form.

mod cover;
mod family;
mod form;

pub use cover::{exact_ds_cs, exact_ds_cs_with, exact_min_cnf, exact_min_dnf};
pub use family::Family;
pub use form::{CnfDnf, FormKind, Literal};

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::passign::{pow3, PartialAssignment, Trit};

/// Arity caps for the exhaustive routines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub table_arity: usize,
    pub ds_cs_arity: usize,
    pub class_count_arity: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            table_arity: 12,
            ds_cs_arity: 6,
            class_count_arity: 4,
        }
    }
}

fn arity_guard(n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        Err(Error::ArityOutOfRange { n, max })
    } else {
        Ok(())
    }
}

/// A Boolean function `f : {0,1}^n -> {0,1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn zero(n: usize) -> Result<Self> {
        Self::zero_with(n, &Limits::default())
    }

    pub fn zero_with(n: usize, limits: &Limits) -> Result<Self> {
        arity_guard(n, limits.table_arity)?;
        Ok(Self {
            n,
            words: vec![0; (1usize << n).div_ceil(64)],
        })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> bool) -> Result<Self> {
        let mut t = Self::zero(n)?;
        for x in 0..t.len() {
            if f(x) {
                t.set(x, true);
            }
        }
        Ok(t)
    }

    /// Truth table of an `n <= 6` function given as the integer whose bit `x` is `f(x)`.
    pub fn from_u64(n: usize, bits: u64) -> Result<Self> {
        if n > 6 {
            return Err(Error::ArityOutOfRange { n, max: 6 });
        }
        let mut t = Self::zero(n)?;
        let mask = if n == 6 { u64::MAX } else { (1u64 << (1 << n)) - 1 };
        if bits & !mask != 0 {
            return Err(Error::InvalidParams(String::from("bits beyond 2^n")));
        }
        t.words[0] = bits;
        Ok(t)
    }

    /// Bits of an `n <= 6` table packed into a `u64`.
    pub fn as_u64(&self) -> Option<u64> {
        (self.n <= 6).then(|| self.words[0])
    }

    /// Hexadecimal form: `max(1, 2^n / 4)` digits, most significant digit first.
    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        let mut t = Self::zero(n)?;
        let hex = hex.trim();
        let hex = hex.strip_prefix("0x").unwrap_or(hex);
        let digits = Self::hex_digits(n);
        if hex.len() != digits {
            return Err(Error::Parse {
                pos: 0,
                msg: alloc::format!("expected {digits} hex digits for n={n}, found {}", hex.len()),
            });
        }
        for (k, ch) in hex.chars().rev().enumerate() {
            let d = ch.to_digit(16).ok_or_else(|| Error::Parse {
                pos: digits - 1 - k,
                msg: String::from("not a hex digit"),
            })? as usize;
            for b in 0..4 {
                if (d >> b) & 1 == 1 {
                    let x = 4 * k + b;
                    if x >= t.len() {
                        return Err(Error::Parse {
                            pos: digits - 1 - k,
                            msg: String::from("bit beyond 2^n"),
                        });
                    }
                    t.set(x, true);
                }
            }
        }
        Ok(t)
    }

    fn hex_digits(n: usize) -> usize {
        core::cmp::max(1, (1usize << n) / 4)
    }

    pub fn to_hex(&self) -> String {
        let digits = Self::hex_digits(self.n);
        let mut s = String::with_capacity(digits);
        for k in (0..digits).rev() {
            let mut d = 0u32;
            for b in 0..4 {
                let x = 4 * k + b;
                if x < self.len() && self.get(x) {
                    d |= 1 << b;
                }
            }
            s.push(core::char::from_digit(d, 16).unwrap());
        }
        s
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// `2^n`.
    #[inline]
    pub fn len(&self) -> usize {
        1 << self.n
    }

    #[inline]
    pub fn get(&self, x: usize) -> bool {
        (self.words[x >> 6] >> (x & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: usize, v: bool) {
        if v {
            self.words[x >> 6] |= 1 << (x & 63);
        } else {
            self.words[x >> 6] &= !(1 << (x & 63));
        }
    }

    pub fn evaluate(&self, x: &[bool]) -> Result<bool> {
        if x.len() != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        let idx = x
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &b)| acc | ((b as usize) << i));
        Ok(self.get(idx))
    }

    pub fn ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn constant_value(&self) -> Option<bool> {
        match self.ones() {
            0 => Some(false),
            k if k == self.len() => Some(true),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn negate(&self) -> Self {
        let mut t = self.clone();
        for x in 0..t.len() {
            t.set(x, !self.get(x));
        }
        t
    }

    /// `f'(x) = f(x ⊕ mask)`.
    pub fn complement_inputs(&self, mask: usize) -> Self {
        let mut t = self.clone();
        for x in 0..t.len() {
            t.set(x, self.get(x ^ mask));
        }
        t
    }

    /// `f'(x) = f(y)` where `y_i = x_{perm[i]}`.
    pub fn permute_inputs(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                found: perm.len(),
            });
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || core::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParams(String::from("not a permutation")));
            }
        }
        let mut t = self.clone();
        for x in 0..t.len() {
            let y = (0..self.n).fold(0usize, |acc, i| acc | (((x >> perm[i]) & 1) << i));
            t.set(x, self.get(y));
        }
        Ok(t)
    }

    pub fn is_monotone(&self) -> bool {
        (0..self.len()).all(|x| {
            !self.get(x) || (0..self.n).all(|i| self.get(x | (1 << i)))
        })
    }

    /// Bits listed from index 0 upwards, e.g. `00010111` for majority of 3.
    pub fn bit_string(&self) -> String {
        (0..self.len()).map(|x| if self.get(x) { '1' } else { '0' }).collect()
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable(n={}, 0x{})", self.n, self.to_hex())
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CertKind {
    ZeroCert,
    OneCert,
    NotCert,
}

impl CertKind {
    pub fn is_cert(self) -> bool {
        self != CertKind::NotCert
    }

    pub fn of_value(v: bool) -> CertKind {
        if v {
            CertKind::OneCert
        } else {
            CertKind::ZeroCert
        }
    }
}

/// Certificate status of every partial assignment, indexed by code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertTable {
    n: usize,
    kinds: Vec<CertKind>,
}

impl CertTable {
    /// Fills all `3^n` entries bottom-up: a code with a star at position `i`
    /// combines its two refinements at `i`, both of which have smaller codes.
    pub fn new(f: &TruthTable) -> Self {
        let n = f.n();
        let total = pow3(n) as usize;
        let mut kinds = Vec::with_capacity(total);
        for code in 0..total as u32 {
            let mut c = code;
            let mut star = None;
            let mut x = 0usize;
            for i in 0..n {
                match c % 3 {
                    0 => {}
                    1 => x |= 1 << i,
                    _ => {
                        star = Some(i);
                        break;
                    }
                }
                c /= 3;
            }
            let kind = match star {
                None => CertKind::of_value(f.get(x)),
                Some(i) => {
                    let p = pow3(i);
                    let lo = kinds[(code - 2 * p) as usize];
                    let hi = kinds[(code - p) as usize];
                    if lo == hi {
                        lo
                    } else {
                        CertKind::NotCert
                    }
                }
            };
            kinds.push(kind);
        }
        Self { n, kinds }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn kind(&self, code: u32) -> CertKind {
        self.kinds[code as usize]
    }

    pub fn kinds(&self) -> &[CertKind] {
        &self.kinds
    }

    /// Minimal certificates of the given kind: certificates none of whose
    /// one-step generalizations is still a certificate.
    pub fn minimal(&self, kind: CertKind) -> Vec<PartialAssignment> {
        let mut out = Vec::new();
        for code in 0..self.kinds.len() as u32 {
            if self.kinds[code as usize] != kind {
                continue;
            }
            let b = PartialAssignment::from_code_unchecked(self.n, code);
            let minimal = (0..self.n).all(|i| {
                b.trit(i) == Trit::Star || self.kind(b.with(i, Trit::Star).code()) != kind
            });
            if minimal {
                out.push(b);
            }
        }
        out
    }
}

/// Direct scan over the `2^{#*}` extensions of `b`.
pub fn certificate_kind(f: &TruthTable, b: &PartialAssignment) -> Result<CertKind> {
    if f.n() != b.n() {
        return Err(Error::ArityMismatch {
            expected: f.n(),
            found: b.n(),
        });
    }
    let mut seen = [false; 2];
    for x in b.completions() {
        seen[f.get(x) as usize] = true;
    }
    Ok(match seen {
        [true, false] => CertKind::ZeroCert,
        [false, true] => CertKind::OneCert,
        _ => CertKind::NotCert,
    })
}

/// The function induced on the star variables of `b`, in their original order.
pub fn restrict(f: &TruthTable, b: &PartialAssignment) -> Result<TruthTable> {
    if f.n() != b.n() {
        return Err(Error::ArityMismatch {
            expected: f.n(),
            found: b.n(),
        });
    }
    let free: Vec<usize> = (0..f.n()).filter(|&i| b.trit(i) == Trit::Star).collect();
    if free.is_empty() {
        return Err(Error::Precondition(String::from(
            "restriction needs at least one unset variable",
        )));
    }
    let fixed = (0..f.n())
        .filter(|&i| b.trit(i) == Trit::One)
        .fold(0usize, |acc, i| acc | (1 << i));
    TruthTable::from_fn(free.len(), |a| {
        let x = free
            .iter()
            .enumerate()
            .fold(fixed, |acc, (k, &i)| acc | (((a >> k) & 1) << i));
        f.get(x)
    })
}

pub fn depends_on(f: &TruthTable, i: usize) -> bool {
    (0..f.len()).any(|x| x & (1 << i) == 0 && f.get(x) != f.get(x | (1 << i)))
}

/// Variables `f` depends on, ascending.
pub fn relevant_variables(f: &TruthTable) -> Vec<usize> {
    (0..f.n()).filter(|&i| depends_on(f, i)).collect()
}

/// Ring-sum expansion: the set of monomials (variable masks) whose GF(2)
/// sum is `f`, ascending by mask.
pub fn gf2_polynomial(f: &TruthTable) -> Vec<u32> {
    let mut a: Vec<bool> = (0..f.len()).map(|x| f.get(x)).collect();
    for i in 0..f.n() {
        for x in 0..f.len() {
            if x & (1 << i) != 0 {
                a[x] ^= a[x ^ (1 << i)];
            }
        }
    }
    (0..f.len() as u32).filter(|&m| a[m as usize]).collect()
}

/// Evaluates a monomial set mod 2 at input `x`.
pub fn eval_gf2(monomials: &[u32], x: usize) -> bool {
    monomials
        .iter()
        .fold(false, |acc, &m| acc ^ ((x as u32) & m == m))
}

/// Size of the smallest certificate contained in the full input `x`.
pub fn min_certificate_size_within(certs: &CertTable, x: usize) -> usize {
    let n = certs.n();
    let mut best = n;
    // `keep` selects which positions of x stay set; the rest become stars.
    for keep in 0..(1usize << n) {
        let w = keep.count_ones() as usize;
        if w >= best {
            continue;
        }
        let mut code = 0u32;
        for i in (0..n).rev() {
            let d = if (keep >> i) & 1 == 1 { ((x >> i) & 1) as u32 } else { 2 };
            code = code * 3 + d;
        }
        if certs.kind(code).is_cert() {
            best = w;
        }
    }
    best
}

/// `CERT(f)` under the uniform distribution.
pub fn expected_certificate_size(f: &TruthTable) -> BigRational {
    let certs = CertTable::new(f);
    let total: usize = (0..f.len())
        .map(|x| min_certificate_size_within(&certs, x))
        .sum();
    BigRational::new(total.into(), f.len().into())
}

/// Lexicographically least table (highest input index most significant)
/// among all input and output complementations of `f`.
pub fn c_canonical(f: &TruthTable) -> TruthTable {
    let mut best = f.clone();
    for mask in 0..f.len() {
        let g = f.complement_inputs(mask);
        let ng = g.negate();
        for cand in [g, ng] {
            if table_less(&cand, &best) {
                best = cand;
            }
        }
    }
    best
}

fn table_less(a: &TruthTable, b: &TruthTable) -> bool {
    a.words.iter().rev().lt(b.words.iter().rev())
}

/// Number of C-equivalence classes by enumeration of canonical forms.
pub fn count_c_classes(n: usize) -> Result<BigUint> {
    count_c_classes_with(n, &Limits::default())
}

pub fn count_c_classes_with(n: usize, limits: &Limits) -> Result<BigUint> {
    arity_guard(n, limits.class_count_arity.min(5))?;
    let size = 1usize << n;
    // n <= 5 keeps each table inside a single u64; we enumerate as integers.
    let total: u64 = if size == 64 { u64::MAX } else { (1u64 << size) - 1 };
    let full = total;
    let mut count = 0u64;
    let mut t: u64 = 0;
    loop {
        let mut canonical = true;
        'outer: for mask in 0..size {
            let g = permute_bits_xor(t, size, mask);
            if g < t || (!g & full) < t {
                canonical = false;
                break 'outer;
            }
        }
        if canonical {
            count += 1;
        }
        if t == total {
            break;
        }
        t += 1;
    }
    Ok(BigUint::from(count))
}

fn permute_bits_xor(t: u64, size: usize, mask: usize) -> u64 {
    let mut g = 0u64;
    for x in 0..size {
        g |= ((t >> (x ^ mask)) & 1) << x;
    }
    g
}

/// `(2^{2^n} + (2^n - 1) 2^{2^{n-1}+1}) / 2^{n+1}`.
pub fn c_class_count_formula(n: usize) -> BigUint {
    let one = BigUint::one();
    let a = &one << (1usize << n);
    let b = (BigUint::from((1u64 << n) - 1)) << ((1usize << (n - 1)) + 1);
    let d = &one << (n + 1);
    (a + b) / d
}

/// First `(i, value)` in the order `i` ascending, value `0` then `1`, such
/// that fixing `x_i` leaves a function depending on all other variables.
pub fn find_dependence_preserving_restriction(f: &TruthTable) -> Result<(usize, bool)> {
    let n = f.n();
    if n < 2 || relevant_variables(f).len() != n {
        return Err(Error::Precondition(String::from(
            "function must depend on all of at least two variables",
        )));
    }
    for i in 0..n {
        for v in [false, true] {
            let b = PartialAssignment::empty(n).with(i, Trit::from_bit(v));
            let r = restrict(f, &b)?;
            if relevant_variables(&r).len() == n - 1 {
                return Ok((i, v));
            }
        }
    }
    Err(Error::Verification(String::from(
        "no dependence-preserving restriction exists",
    )))
}

/// Checks that every minimal 1-certificate and every minimal 0-certificate
/// share exactly one variable.
pub fn certificates_intersect_once(f: &TruthTable) -> bool {
    let certs = CertTable::new(f);
    let support = |b: &PartialAssignment| {
        (0..b.n())
            .filter(|&i| b.trit(i) != Trit::Star)
            .fold(0u32, |m, i| m | (1 << i))
    };
    let ones: Vec<u32> = certs.minimal(CertKind::OneCert).iter().map(support).collect();
    let zeros: Vec<u32> = certs.minimal(CertKind::ZeroCert).iter().map(support).collect();
    ones.iter()
        .all(|s| zeros.iter().all(|t| (s & t).count_ones() == 1))
}
