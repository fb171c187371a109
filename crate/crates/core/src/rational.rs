//! Exact rational helpers: certified natural-log enclosures, decimal
//! rendering and string serde.

use alloc::string::{String, ToString};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

pub fn int(a: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(a))
}

/// `2 atanh(t)` enclosed using `terms` series terms, for `0 <= t < 1`.
fn atanh2(t: &BigRational, terms: u32) -> (BigRational, BigRational) {
    let t2 = t * t;
    let mut power = t.clone();
    let mut sum = BigRational::zero();
    for k in 0..terms {
        sum += &power / int(2 * k as u64 + 1);
        power *= &t2;
    }
    // tail: sum_{k >= K} t^{2k+1}/(2k+1) <= t^{2K+1} / ((2K+1)(1 - t^2))
    let tail = &power / (int(2 * terms as u64 + 1) * (BigRational::one() - &t2));
    let two = int(2);
    (&sum * &two, (sum + tail) * two)
}

/// Certified `[lo, hi]` containing `ln x` for an integer `x >= 1`; the width
/// shrinks geometrically in `terms`.
pub fn ln_enclosure(x: u64, terms: u32) -> (BigRational, BigRational) {
    assert!(x >= 1, "ln enclosure needs x >= 1");
    if x == 1 {
        return (BigRational::zero(), BigRational::zero());
    }
    // x = 2^m · r, 1 <= r < 2
    let m = 63 - x.leading_zeros() as u64;
    let r = BigRational::new(BigInt::from(x), BigInt::from(1u64) << m);
    let t = (&r - BigRational::one()) / (&r + BigRational::one());
    let (rlo, rhi) = atanh2(&t, terms);
    let (l2lo, l2hi) = atanh2(&ratio(1, 3), terms);
    let m = int(m);
    (&m * l2lo + rlo, m * l2hi + rhi)
}

/// Decides `lhs <= (2 ln q + 1) · scale` by refining the enclosure of
/// `ln q`; `None` if still undecided after the refinement cap.
pub fn le_two_ln_plus_one(lhs: &BigRational, q: u64, scale: &BigRational) -> Option<bool> {
    let mut terms = 4;
    while terms <= 512 {
        let (lo, hi) = ln_enclosure(q, terms);
        let one = BigRational::one();
        let bound_lo = (int(2) * lo + &one) * scale;
        let bound_hi = (int(2) * hi + &one) * scale;
        if *lhs <= bound_lo {
            return Some(true);
        }
        if *lhs > bound_hi {
            return Some(false);
        }
        terms *= 2;
    }
    None
}

/// Decimal rendering rounded toward zero with `digits` fractional digits.
pub fn to_decimal(r: &BigRational, digits: usize) -> String {
    let neg = r.is_negative();
    let num = r.numer().abs().to_biguint().unwrap_or_default();
    let den = r.denom().to_biguint().unwrap_or_else(BigUint::one);
    let (whole, mut rem) = num.div_rem(&den);
    let mut out = String::new();
    if neg && !r.is_zero() {
        out.push('-');
    }
    out.push_str(&whole.to_string());
    if digits > 0 {
        out.push('.');
        for _ in 0..digits {
            rem *= 10u32;
            let (d, r2) = rem.div_rem(&den);
            out.push_str(&d.to_string());
            rem = r2;
        }
    }
    out
}

/// Serializes a rational as the string `"a/b"` (or `"a"` when integral).
pub mod as_string {
    use alloc::string::{String, ToString};

    use num_rational::BigRational;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse(&text).ok_or_else(|| de::Error::custom("expected a rational `a/b`"))
    }
}

/// Same as [`as_string`] for vectors.
pub mod vec_as_string {
    use alloc::string::{String, ToString};
    use alloc::vec::Vec;

    use num_rational::BigRational;
    use serde::ser::SerializeSeq;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&r.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| super::parse(t).ok_or_else(|| de::Error::custom("expected a rational `a/b`")))
            .collect()
    }
}

/// Parses `a`, `a/b`, or a finite decimal such as `0.25`.
pub fn parse(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        return (!b.is_zero()).then(|| BigRational::new(a, b));
    }
    if let Some((w, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let neg = w.starts_with('-');
        let w: BigInt = if w.is_empty() || w == "-" { BigInt::zero() } else { w.parse().ok()? };
        let f: BigInt = frac.parse().ok()?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = BigRational::new(w.abs() * &scale + f, scale);
        return Some(if neg { -mag } else { mag });
    }
    text.parse::<BigInt>().ok().map(BigRational::from_integer)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_enclosures_contain_known_values() {
        // ln 2 = 0.693147180559945..., ln 3 = 1.098612288668109...
        for (x, lo, hi) in [(2, ratio(693147, 1_000_000), ratio(693148, 1_000_000)), (3, ratio(1098612, 1_000_000), ratio(1098613, 1_000_000)), (65535, ratio(11090339, 1_000_000), ratio(11090340, 1_000_000))] {
            let (a, b) = ln_enclosure(x, 40);
            assert!(a <= b);
            assert!(lo <= a && b <= hi, "ln {x}: [{}, {}]", to_decimal(&a, 9), to_decimal(&b, 9));
        }
        let (a, b) = ln_enclosure(1, 3);
        assert!(a.is_zero() && b.is_zero());
    }

    #[test]
    fn inequality_decisions() {
        // 3/2 <= (2 ln 2 + 1) 5/4 = 2.98...
        assert_eq!(le_two_ln_plus_one(&ratio(3, 2), 2, &ratio(5, 4)), Some(true));
        assert_eq!(le_two_ln_plus_one(&ratio(3, 1), 2, &ratio(5, 4)), Some(false));
        assert_eq!(le_two_ln_plus_one(&ratio(1, 1), 1, &ratio(1, 1)), Some(true));
        assert_eq!(le_two_ln_plus_one(&ratio(11, 10), 1, &ratio(1, 1)), Some(false));
    }

    #[test]
    fn parsing_and_rendering() {
        assert_eq!(parse("3/4"), Some(ratio(3, 4)));
        assert_eq!(parse("0.25"), Some(ratio(1, 4)));
        assert_eq!(parse("-1.5"), Some(ratio(-3, 2)));
        assert_eq!(parse("2"), Some(int(2)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("x"), None);
        assert_eq!(to_decimal(&ratio(2, 3), 4), "0.6666");
        assert_eq!(to_decimal(&ratio(-3, 2), 2), "-1.50");
    }
}
