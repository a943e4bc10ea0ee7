use super::{pow2_int, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// num·2^(−scale), kept canonical: num odd or scale = 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    scale: u32,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, scale: u32) -> Self {
        let mut num = num.into();
        let mut scale = scale;
        if num.is_zero() {
            return Dyadic { num, scale: 0 };
        }
        let tz = num.trailing_zeros().unwrap_or(0).min(scale as u64) as u32;
        if tz > 0 {
            num >>= tz;
            scale -= tz;
        }
        Dyadic { num, scale }
    }

    pub fn zero() -> Self {
        Dyadic::new(0, 0)
    }

    pub fn one() -> Self {
        Dyadic::new(1, 0)
    }

    pub fn from_int(z: impl Into<BigInt>) -> Self {
        Dyadic::new(z, 0)
    }

    /// 2^k for any integer k.
    pub fn pow2(k: i64) -> Self {
        if k >= 0 {
            Dyadic::new(pow2_int(k as u64), 0)
        } else {
            Dyadic::new(1, (-k) as u32)
        }
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn abs(&self) -> Self {
        Dyadic { num: self.num.abs(), scale: self.scale }
    }

    /// self·2^k.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if k >= 0 {
            let shift = (k as u64).min(self.scale as u64) as u32;
            let rest = k as u64 - shift as u64;
            Dyadic::new(&self.num << rest, self.scale - shift)
        } else {
            Dyadic::new(self.num.clone(), self.scale + (-k) as u32)
        }
    }

    pub fn to_q(&self) -> Q {
        Q::new(self.num.clone(), pow2_int(self.scale as u64))
    }

    /// Exact conversion when the denominator is a power of two.
    pub fn from_q(x: &Q) -> Option<Self> {
        let d = x.denom();
        let tz = d.trailing_zeros().unwrap_or(0);
        if (d >> tz).is_one() {
            Some(Dyadic::new(x.numer().clone(), tz as u32))
        } else {
            None
        }
    }

    /// The value num′·2^(−k) with num′ = ⌊self·2^k⌋.
    pub fn floor_at(&self, k: u32) -> BigInt {
        if k >= self.scale {
            &self.num << (k - self.scale)
        } else {
            self.num.div_floor(&pow2_int((self.scale - k) as u64))
        }
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, u32) {
        let s = self.scale.max(other.scale);
        (
            &self.num << (s - self.scale),
            &other.num << (s - other.scale),
            s,
        )
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, s) = self.aligned(rhs);
        Dyadic::new(a + b, s)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, s) = self.aligned(rhs);
        Dyadic::new(a - b, s)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.scale + rhs.scale)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -&self.num, scale: self.scale }
    }
}

macro_rules! by_value {
    ($tr:ident, $m:ident) => {
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
    };
}
by_value!(Add, add);
by_value!(Sub, sub);
by_value!(Mul, mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.scale)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<i64> for Dyadic {
    fn from(z: i64) -> Self {
        Dyadic::from_int(z)
    }
}
