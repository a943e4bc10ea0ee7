//! Binary strings, the encodings of ℕ, ω and ℤ, and the tupling functions.

use crate::{Error, Result};
use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;
use std::fmt;
use std::str::FromStr;

/// A finite string over {0,1}.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinStr(Vec<bool>);

impl BinStr {
    pub fn new() -> Self {
        BinStr(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BinStr(bits)
    }

    /// Panics on characters other than '0' and '1'; use `FromStr` for input.
    pub fn lit(s: &str) -> Self {
        s.parse().expect("binary literal")
    }

    pub fn zeros(n: usize) -> Self {
        BinStr(vec![false; n])
    }

    pub fn ones(n: usize) -> Self {
        BinStr(vec![true; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.0.get(i).copied()
    }

    pub fn push(&mut self, b: bool) {
        self.0.push(b);
    }

    pub fn extend(&mut self, other: &BinStr) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &BinStr) -> BinStr {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        BinStr(v)
    }

    /// b·self, one symbol prepended.
    pub fn prefixed(&self, b: bool) -> BinStr {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(b);
        v.extend_from_slice(&self.0);
        BinStr(v)
    }

    pub fn slice(&self, from: usize, to: usize) -> BinStr {
        BinStr(self.0[from..to].to_vec())
    }

    pub fn prefix(&self, n: usize) -> BinStr {
        BinStr(self.0[..n.min(self.len())].to_vec())
    }

    /// Splits off the first symbol.
    pub fn split_first(&self) -> Option<(bool, BinStr)> {
        self.0.split_first().map(|(b, rest)| (*b, BinStr(rest.to_vec())))
    }

    pub fn reversed(&self) -> BinStr {
        BinStr(self.0.iter().rev().copied().collect())
    }

    pub fn is_all(&self, b: bool) -> bool {
        self.0.iter().all(|&x| x == b)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    /// All strings of length exactly n, in lexicographic order.
    pub fn all_of_len(n: usize) -> impl Iterator<Item = BinStr> {
        assert!(n < 64, "string enumeration limited to length < 64");
        (0u64..(1u64 << n)).map(move |v| BinStr((0..n).map(|i| v >> (n - 1 - i) & 1 == 1).collect()))
    }

    /// All strings of length ≤ n, shortest first.
    pub fn all_up_to(n: usize) -> impl Iterator<Item = BinStr> {
        (0..=n).flat_map(BinStr::all_of_len)
    }
}

impl FromStr for BinStr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("not a binary string: {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BinStr)
    }
}

impl fmt::Display for BinStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "ε")
        } else {
            write!(f, "\"{self}\"")
        }
    }
}

pub fn str_len(a: &BinStr) -> usize {
    a.len()
}

/// 1^n, the element n of ω.
pub fn unary(n: usize) -> BinStr {
    BinStr::ones(n)
}

/// Binary numeral without leading zeros; 0 is ε.
pub fn encode_nat_big(n: &BigUint) -> BinStr {
    if n.is_zero() {
        return BinStr::new();
    }
    let bits = n.bits();
    BinStr((0..bits).rev().map(|i| n.bit(i)).collect())
}

pub fn encode_nat(n: u64) -> BinStr {
    if n == 0 {
        return BinStr::new();
    }
    let bits = 64 - n.leading_zeros();
    BinStr((0..bits).rev().map(|i| n >> i & 1 == 1).collect())
}

pub fn is_nat_encoding(a: &BinStr) -> bool {
    a.get(0) != Some(false)
}

pub fn decode_nat_big(a: &BinStr) -> Result<BigUint> {
    if !is_nat_encoding(a) {
        return Err(Error::MalformedEncoding { what: "natural number", value: a.clone() });
    }
    let mut n = BigUint::zero();
    for b in a.iter() {
        n <<= 1;
        if b {
            n += 1u32;
        }
    }
    Ok(n)
}

pub fn decode_nat(a: &BinStr) -> Result<u64> {
    if !is_nat_encoding(a) {
        return Err(Error::MalformedEncoding { what: "natural number", value: a.clone() });
    }
    if a.len() > 64 {
        return Err(Error::Overflow { value: a.to_string(), target: "u64" });
    }
    Ok(a.iter().fold(0u64, |n, b| n << 1 | b as u64))
}

/// n > 0 ↦ numeral, −n ↦ 0·numeral, 0 ↦ ε.
/// A bit string read as a binary number with leading zeros, as a numeral.
pub fn trim_numeral(a: &BinStr) -> BinStr {
    match a.iter().position(|b| b) {
        Some(i) => a.slice(i, a.len()),
        None => BinStr::new(),
    }
}

pub fn encode_int(z: &BigInt) -> BinStr {
    let numeral = encode_nat_big(z.magnitude());
    if z.sign() == Sign::Minus {
        numeral.prefixed(false)
    } else {
        numeral
    }
}

pub fn encode_i64(z: i64) -> BinStr {
    encode_int(&BigInt::from(z))
}

/// Inverse of `encode_int`. The sign-only string "0" is also read as 0.
pub fn decode_int(a: &BinStr) -> Result<BigInt> {
    match a.split_first() {
        None => Ok(BigInt::zero()),
        Some((true, _)) => Ok(BigInt::from(decode_nat_big(a)?)),
        Some((false, rest)) => {
            if rest.get(0) == Some(false) {
                return Err(Error::MalformedEncoding { what: "integer", value: a.clone() });
            }
            Ok(-BigInt::from(decode_nat_big(&rest)?))
        }
    }
}

pub fn decode_i64(a: &BinStr) -> Result<i64> {
    let z = decode_int(a)?;
    i64::try_from(&z).map_err(|_| Error::Overflow { value: z.to_string(), target: "i64" })
}

/// ⟨a_1,…,a_k⟩: each part padded to max|a_i|+1 symbols by 1·0^*, then the
/// padded parts interleaved column by column. k = 1 gives a·1, k = 0 gives ε.
pub fn tuple(parts: &[BinStr]) -> BinStr {
    let k = parts.len();
    if k == 0 {
        return BinStr::new();
    }
    let m = parts.iter().map(BinStr::len).max().unwrap_or(0) + 1;
    let mut out = Vec::with_capacity(k * m);
    for t in 0..m {
        for a in parts {
            out.push(match t.cmp(&a.len()) {
                std::cmp::Ordering::Less => a.0[t],
                std::cmp::Ordering::Equal => true,
                std::cmp::Ordering::Greater => false,
            });
        }
    }
    BinStr(out)
}

/// The components of b if b is a k-tuple.
pub fn untuple(k: usize, b: &BinStr) -> Option<Vec<BinStr>> {
    if k == 0 {
        return b.is_empty().then(Vec::new);
    }
    let n = b.len();
    if n == 0 || n % k != 0 {
        return None;
    }
    let m = n / k;
    let mut parts = Vec::with_capacity(k);
    let mut longest = 0;
    for i in 0..k {
        let col = (0..m).map(|t| b.0[t * k + i]);
        let last_one = col.clone().enumerate().filter(|(_, x)| *x).map(|(t, _)| t).last()?;
        longest = longest.max(last_one);
        parts.push(BinStr(col.take(last_one).collect()));
    }
    (longest + 1 == m).then_some(parts)
}

/// π_i^k(b): 0·a_i when b = ⟨a_1,…,a_k⟩, ε when b is not a k-tuple.
pub fn proj(i: usize, k: usize, b: &BinStr) -> BinStr {
    assert!(1 <= i && i <= k, "projection index out of range");
    let n = b.len();
    if n == 0 || n % k != 0 {
        return BinStr::new();
    }
    let m = n / k;
    let mut longest = 0;
    let mut cut = 0;
    for c in 0..k {
        let Some(last) = (0..m).rev().find(|&t| b.0[t * k + c]) else { return BinStr::new() };
        longest = longest.max(last);
        if c == i - 1 {
            cut = last;
        }
    }
    if longest + 1 != m {
        return BinStr::new();
    }
    let mut out = Vec::with_capacity(cut + 1);
    out.push(false);
    out.extend((0..cut).map(|t| b.0[t * k + i - 1]));
    BinStr(out)
}

/// The component a_i itself, marker stripped.
pub fn component(i: usize, k: usize, b: &BinStr) -> Option<BinStr> {
    let p = proj(i, k, b);
    p.split_first().map(|(_, a)| a)
}

/// ⟨k, ⟨a_1,…,a_k⟩⟩ for lists of arbitrary length.
pub fn tuple_list(parts: &[BinStr]) -> BinStr {
    tuple(&[encode_nat(parts.len() as u64), tuple(parts)])
}

pub fn untuple_list(b: &BinStr) -> Option<Vec<BinStr>> {
    let outer = untuple(2, b)?;
    let k = decode_nat(&outer[0]).ok()?;
    untuple(k as usize, &outer[1])
}

/// ~a: 0 ↦ 01, 1 ↦ 11.
pub fn double_digits(a: &BinStr) -> BinStr {
    BinStr(a.iter().flat_map(|b| [b, true]).collect())
}
