use crate::baire::{pair_names, LengthFn, Name};
use crate::num::{round_half_away, Q};
use crate::strings::{decode_int, decode_nat_big, encode_int, encode_nat_big, is_nat_encoding, untuple, BinStr};
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed};

/// z/(n+1), an approximation with error at most 1/(n+1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealApprox {
    pub z: BigInt,
    pub n: BigUint,
}

impl RealApprox {
    pub fn value(&self) -> Q {
        Q::new(self.z.clone(), BigInt::from(self.n.clone() + 1u32))
    }

    pub fn error(&self) -> Q {
        Q::new(BigInt::one(), BigInt::from(self.n.clone() + 1u32))
    }

    pub fn within(&self, x: &Q) -> bool {
        (x - self.value()).abs() <= self.error()
    }
}

/// φ(n) = round(x·(n+1)), ties away from zero; queries outside ℕ give ε.
pub fn real_name(x: &Q) -> Name {
    let x = x.clone();
    Name::new(format!("real {x}"), move |a| {
        if !is_nat_encoding(a) {
            return BinStr::new();
        }
        let n = decode_nat_big(a).expect("checked numeral");
        encode_int(&round_half_away(&(&x * Q::from_integer(BigInt::from(n) + 1))))
    })
}

/// Bound on |real_name(x)| for |x| < 2^c: n ↦ n + c + 2.
pub fn real_length(c: usize) -> LengthFn {
    LengthFn::affine(1, c + 2)
}

pub fn real_decode(phi: &Name, n: &BigUint) -> Result<RealApprox> {
    let a = encode_nat_big(n);
    let v = phi.query(&a)?;
    let z = decode_int(&v).map_err(|_| Error::MalformedName(format!("value {v:?} at {a:?} is not an integer")))?;
    Ok(RealApprox { z, n: n.clone() })
}

pub fn real_decode_u64(phi: &Name, n: u64) -> Result<RealApprox> {
    real_decode(phi, &BigUint::from(n))
}

/// Consistency of real-name values up to depth: every value is an integer and
/// |φ(i)/(i+1) − φ(j)/(j+1)| ≤ 1/(i+1) + 1/(j+1).
pub fn validate_real_name(phi: &Name, depth: u64) -> Result<Option<(u64, u64)>> {
    let vals: Vec<RealApprox> = (0..=depth).map(|n| real_decode_u64(phi, n)).collect::<Result<_>>()?;
    for (i, a) in vals.iter().enumerate() {
        for (j, b) in vals.iter().enumerate().skip(i + 1) {
            if (a.value() - b.value()).abs() > a.error() + b.error() {
                return Ok(Some((i as u64, j as u64)));
            }
        }
    }
    Ok(None)
}

/// ⟨φ,ψ⟩.
pub fn product_name(phi: &Name, psi: &Name) -> Name {
    pair_names(phi, psi)
}

/// Splits a product name. The value at ε is checked eagerly, every other value
/// when it is queried.
pub fn product_split(chi: &Name) -> Result<(Name, Name)> {
    let e = BinStr::new();
    if untuple(2, &chi.query(&e)?).is_none() {
        return Err(Error::NotAPair(e));
    }
    Ok(crate::baire::unpair(chi))
}

/// The d-fold product ⟨φ_1, ⟨φ_2, …⟩⟩ of real names.
pub fn real_vector_name(xs: &[Q]) -> Name {
    assert!(!xs.is_empty(), "empty vector");
    let mut it = xs.iter().rev();
    let mut name = real_name(it.next().unwrap());
    for x in it {
        name = product_name(&real_name(x), &name);
    }
    name
}

/// The length 2d(n + C + 4) of the product representation on [−2^C, 2^C]^d.
pub fn product_real_length(d: usize, c: usize) -> LengthFn {
    LengthFn::from_fn(format!("2*{d}(n+{c}+4)"), move |n| 2 * d * (n + c + 4))
}

/// Decodes a d-fold product name coordinatewise at precision n.
pub fn real_vector_decode(chi: &Name, d: usize, n: u64) -> Result<Vec<RealApprox>> {
    let mut out = Vec::with_capacity(d);
    let mut rest = chi.clone();
    for _ in 1..d {
        let (a, b) = product_split(&rest)?;
        out.push(real_decode_u64(&a, n)?);
        rest = b;
    }
    out.push(real_decode_u64(&rest, n)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baire::{length_of, SCAN_CUTOFF};
    use crate::num::{q, qi};
    use crate::strings::encode_nat;

    #[test]
    fn examples() {
        let zero = real_name(&qi(0));
        for n in 0..20 {
            assert_eq!(real_decode_u64(&zero, n).unwrap().z, BigInt::from(0));
        }
        assert_eq!(real_decode_u64(&real_name(&q(1, 2)), 1).unwrap().z, BigInt::from(1));
        assert_eq!(real_decode_u64(&real_name(&q(3, 4)), 3).unwrap().z, BigInt::from(3));
        let half = real_decode_u64(&real_name(&q(1, 2)), 3).unwrap();
        assert_eq!(half.value(), q(2, 4));
        assert_eq!(real_name(&q(1, 2)).query_str("0").unwrap(), BinStr::new());
    }

    #[test]
    fn rejects_garbage() {
        let bad = Name::new("bad", |_| BinStr::lit("00"));
        assert!(matches!(real_decode_u64(&bad, 2), Err(Error::MalformedName(_))));
    }

    #[test]
    fn validation_flags_inconsistent_values() {
        assert_eq!(validate_real_name(&real_name(&q(-7, 3)), 30).unwrap(), None);
        let jump = Name::new("jump", |a| if a == &encode_nat(9) { encode_int(&30.into()) } else { BinStr::new() });
        assert_eq!(validate_real_name(&jump, 12).unwrap(), Some((0, 9)));
    }

    #[test]
    fn product_roundtrip_and_split() {
        let chi = product_name(&real_name(&q(1, 3)), &real_name(&q(-5, 2)));
        let (a, b) = product_split(&chi).unwrap();
        for n in 0..30 {
            assert!(real_decode_u64(&a, n).unwrap().within(&q(1, 3)));
            assert!(real_decode_u64(&b, n).unwrap().within(&q(-5, 2)));
        }
        assert!(matches!(product_split(&Name::constant(BinStr::new())), Err(Error::NotAPair(_))));
    }

    #[test]
    fn product_length_example() {
        let c = 2;
        for d in 1..=3 {
            let xs: Vec<Q> = (0..d).map(|i| q(7 - 5 * i as i64, 2)).collect();
            let chi = real_vector_name(&xs);
            let ell = product_real_length(d, c);
            for n in 0..=10 {
                assert!(length_of(&chi, n).unwrap() <= ell.eval(n), "d={d} n={n}");
            }
            let back = real_vector_decode(&chi, d, 9).unwrap();
            assert!(back.iter().zip(&xs).all(|(a, x)| a.within(x)));
        }
        assert!(SCAN_CUTOFF >= 10);
    }
}
