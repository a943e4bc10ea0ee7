use super::{ceil_q, floor_q, pow2, pow2_int, Q};
use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// coef·2^exp with rational exp, normalized so that 0 ≤ exp < 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Surd {
    coef: Q,
    exp: Q,
}

impl Surd {
    pub fn new(coef: Q, exp: Q) -> Self {
        if coef.is_zero() {
            return Surd::zero();
        }
        let whole = floor_q(&exp);
        let frac = &exp - Q::from_integer(whole.clone());
        let k = whole.to_i64().expect("surd exponent out of range");
        Surd { coef: coef * pow2(k), exp: frac }
    }

    pub fn rational(coef: Q) -> Self {
        Surd::new(coef, Q::zero())
    }

    pub fn zero() -> Self {
        Surd { coef: Q::zero(), exp: Q::zero() }
    }

    /// ±2^exp.
    pub fn signed_pow2(sign: i8, exp: Q) -> Self {
        Surd::new(Q::from_integer(BigInt::from(sign)), exp)
    }

    pub fn coef(&self) -> &Q {
        &self.coef
    }

    pub fn exp(&self) -> &Q {
        &self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.coef.is_zero()
    }

    pub fn signum(&self) -> i8 {
        match self.coef.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn to_q(&self) -> Option<Q> {
        if self.exp.is_zero() {
            Some(self.coef.clone())
        } else {
            None
        }
    }

    pub fn mul(&self, other: &Surd) -> Surd {
        Surd::new(&self.coef * &other.coef, &self.exp + &other.exp)
    }

    pub fn mul_q(&self, c: &Q) -> Surd {
        Surd::new(&self.coef * c, self.exp.clone())
    }

    pub fn neg(&self) -> Surd {
        Surd { coef: -&self.coef, exp: self.exp.clone() }
    }

    /// |self|^p when it is again of the form c·2^e with rational c: p an
    /// integer, or |coef| a power of two.
    pub fn abs_pow(&self, p: &Q) -> Option<Surd> {
        if self.is_zero() {
            return Some(Surd::zero());
        }
        let c = self.coef.abs();
        if p.denom().is_one() {
            let k = p.numer().to_i32()?;
            let mag = if k >= 0 {
                num_traits::pow(c, k as usize)
            } else {
                num_traits::pow(c.recip(), (-k) as usize)
            };
            return Some(Surd::new(mag, &self.exp * p));
        }
        let k = power_of_two_exponent(&c)?;
        Some(Surd::new(Q::one(), (Q::from_integer(BigInt::from(k)) + &self.exp) * p))
    }

    /// Rational enclosure of the value with width about |coef|·2^(−bits).
    pub fn enclosure(&self, bits: u32) -> Interval {
        let base = pow2_frac_enclosure(&self.exp, bits);
        base.scale(&self.coef)
    }
}

fn power_of_two_exponent(c: &Q) -> Option<i64> {
    let n = c.numer().magnitude();
    let d = c.denom().magnitude();
    let is_p2 = |x: &BigUint| x.count_ones() == 1;
    if n.is_one() && is_p2(d) {
        Some(-((d.bits() - 1) as i64))
    } else if d.is_one() && is_p2(n) {
        Some((n.bits() - 1) as i64)
    } else {
        None
    }
}

/// Enclosure of 2^e for 0 ≤ e < 1.
fn pow2_frac_enclosure(e: &Q, bits: u32) -> Interval {
    if e.is_zero() {
        return Interval::point(Q::one());
    }
    let s = e.numer().to_u64().expect("exponent numerator");
    let t = e.denom().to_u32().expect("exponent denominator");
    let radicand = BigUint::one() << (s + t as u64 * bits as u64);
    let r = radicand.nth_root(t);
    let den = pow2_int(bits as u64);
    let lo = Q::new(BigInt::from(r.clone()), den.clone());
    let hi = Q::new(BigInt::from(r + 1u32), den);
    Interval::new(lo, hi)
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp.is_zero() {
            write!(f, "{}", self.coef)
        } else {
            write!(f, "{}·2^({})", self.coef, self.exp)
        }
    }
}

/// A finite sum of surds, grouped by fractional exponent. Powers 2^r with
/// distinct r ∈ [0,1) ∩ ℚ are linearly independent over ℚ, so the map is a
/// canonical form and equality is structural.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct SurdSum {
    terms: BTreeMap<Q, Q>,
}

impl SurdSum {
    pub fn zero() -> Self {
        SurdSum::default()
    }

    pub fn from_q(c: Q) -> Self {
        let mut s = SurdSum::zero();
        s.add_surd(&Surd::rational(c));
        s
    }

    pub fn from_surd(x: &Surd) -> Self {
        let mut s = SurdSum::zero();
        s.add_surd(x);
        s
    }

    pub fn add_surd(&mut self, x: &Surd) {
        if x.is_zero() {
            return;
        }
        let entry = self.terms.entry(x.exp.clone()).or_insert_with(Q::zero);
        *entry += &x.coef;
        if entry.is_zero() {
            self.terms.remove(&x.exp);
        }
    }

    pub fn add(&self, other: &SurdSum) -> SurdSum {
        let mut s = self.clone();
        for (e, c) in &other.terms {
            s.add_surd(&Surd { coef: c.clone(), exp: e.clone() });
        }
        s
    }

    pub fn sub(&self, other: &SurdSum) -> SurdSum {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SurdSum {
        self.mul_q(&-Q::one())
    }

    pub fn mul_q(&self, c: &Q) -> SurdSum {
        let mut s = SurdSum::zero();
        for (e, x) in &self.terms {
            s.add_surd(&Surd { coef: x * c, exp: e.clone() });
        }
        s
    }

    pub fn mul_surd(&self, y: &Surd) -> SurdSum {
        let mut s = SurdSum::zero();
        for (e, x) in &self.terms {
            s.add_surd(&Surd::new(x * &y.coef, e + &y.exp));
        }
        s
    }

    pub fn mul(&self, other: &SurdSum) -> SurdSum {
        let mut s = SurdSum::zero();
        for (e, x) in &other.terms {
            s = s.add(&self.mul_surd(&Surd { coef: x.clone(), exp: e.clone() }));
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = Surd> + '_ {
        self.terms.iter().map(|(e, c)| Surd { coef: c.clone(), exp: e.clone() })
    }

    pub fn to_q(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Q::zero()).cloned(),
            _ => None,
        }
    }

    pub fn enclosure(&self, bits: u32) -> Interval {
        let mut acc = Interval::point(Q::zero());
        for s in self.terms() {
            acc = acc.add(&s.enclosure(bits));
        }
        acc
    }

    /// Exact sign; refines the enclosure until it excludes zero.
    pub fn signum(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let mut bits = 32;
        loop {
            let iv = self.enclosure(bits);
            if iv.lo.is_positive() {
                return 1;
            }
            if iv.hi.is_negative() {
                return -1;
            }
            bits *= 2;
        }
    }

    pub fn cmp_q(&self, c: &Q) -> Ordering {
        match self.sub(&SurdSum::from_q(c.clone())).signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    /// Nearest integer to self·scale, exact up to ties (ties away from zero).
    pub fn round_scaled(&self, scale: &Q) -> BigInt {
        let v = self.mul_q(scale);
        if let Some(x) = v.to_q() {
            return super::round_half_away(&x);
        }
        // irrational: never a tie, so refine until floor(v + 1/2) is certain
        let mut bits = 64;
        loop {
            let iv = v.enclosure(bits);
            let half = Q::new(BigInt::one(), BigInt::from(2));
            let a = floor_q(&(&iv.lo + &half));
            let b = floor_q(&(&iv.hi + &half));
            if a == b {
                return a;
            }
            bits *= 2;
        }
    }
}

impl fmt::Debug for SurdSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms().map(|s| format!("{s:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Closed rational interval [lo, hi].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn new(lo: Q, hi: Q) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: Q) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn scale(&self, c: &Q) -> Interval {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if a <= b {
            Interval::new(a, b)
        } else {
            Interval::new(b, a)
        }
    }

    pub fn abs(&self) -> Interval {
        if self.lo.is_negative() && self.hi.is_positive() {
            Interval::new(Q::zero(), self.hi.clone().max(-self.lo.clone()))
        } else if self.hi.is_negative() || self.hi.is_zero() {
            Interval::new(-self.hi.clone(), -self.lo.clone())
        } else {
            self.clone()
        }
    }

    /// Integer power of a non-negative interval.
    pub fn powi(&self, p: u32) -> Interval {
        debug_assert!(!self.lo.is_negative());
        Interval::new(num_traits::pow(self.lo.clone(), p as usize), num_traits::pow(self.hi.clone(), p as usize))
    }

    /// Enclosure of the p-th root of a non-negative interval.
    pub fn root(&self, p: u32, bits: u32) -> Interval {
        if p == 1 {
            return self.clone();
        }
        let scale = pow2_int(p as u64 * bits as u64);
        let den = pow2_int(bits as u64);
        let lo_int = floor_q(&(&self.lo * Q::from_integer(scale.clone())));
        let hi_int = ceil_q(&(&self.hi * Q::from_integer(scale)));
        let lo_r = lo_int.to_biguint().unwrap_or_default().nth_root(p);
        let hi_r = hi_int.to_biguint().unwrap_or_default().nth_root(p) + 1u32;
        Interval::new(
            Q::new(BigInt::from(lo_r), den.clone()),
            Q::new(BigInt::from(hi_r), den),
        )
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Q {
        (&self.lo + &self.hi) / Q::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qi};

    #[test]
    fn normalization_moves_integer_part() {
        let s = Surd::new(qi(3), q(5, 2));
        assert_eq!(s.coef(), &qi(12));
        assert_eq!(s.exp(), &q(1, 2));
        let t = Surd::new(qi(1), q(-1, 2));
        assert_eq!(t.coef(), &q(1, 2));
        assert_eq!(t.exp(), &q(1, 2));
        assert_eq!(Surd::new(qi(3), qi(2)).to_q(), Some(qi(12)));
    }

    #[test]
    fn sqrt2_squared_is_two() {
        let r = Surd::new(qi(1), q(1, 2));
        assert_eq!(r.mul(&r).to_q(), Some(qi(2)));
        assert_eq!(r.abs_pow(&qi(2)).unwrap().to_q(), Some(qi(2)));
        let c = Surd::new(qi(1), q(1, 3));
        assert_eq!(c.abs_pow(&qi(3)).unwrap().to_q(), Some(qi(2)));
        assert_eq!(Surd::new(q(1, 4), q(1, 3)).abs_pow(&q(3, 2)).unwrap(), Surd::new(qi(1), q(-5, 2)));
    }

    #[test]
    fn enclosures_contain_the_value() {
        let r = Surd::new(qi(1), q(1, 2));
        let iv = r.enclosure(40);
        assert!(iv.lo < q(14143, 10000) && iv.hi > q(14142, 10000));
        assert!(iv.width() <= crate::num::pow2(-39));
        let sq = iv.powi(2);
        assert!(sq.contains(&qi(2)));
        let root = Interval::point(qi(2)).root(2, 30);
        assert!(root.lo <= q(14143, 10000) && root.hi >= q(14142, 10000));
    }

    #[test]
    fn sums_cancel_exactly() {
        let r = Surd::new(qi(1), q(1, 2));
        let mut s = SurdSum::from_surd(&r);
        s.add_surd(&r.neg());
        assert!(s.is_zero());
        let a = SurdSum::from_surd(&r).add(&SurdSum::from_q(qi(1)));
        // (1 + √2)(√2 − 1) = 1
        let b = SurdSum::from_surd(&r).add(&SurdSum::from_q(qi(-1)));
        assert_eq!(a.mul(&b).to_q(), Some(qi(1)));
        assert_eq!(b.signum(), 1);
        assert_eq!(b.neg().signum(), -1);
        assert_eq!(a.round_scaled(&qi(10)), BigInt::from(24));
        assert_eq!(SurdSum::from_q(q(5, 2)).round_scaled(&qi(1)), BigInt::from(3));
    }
}
