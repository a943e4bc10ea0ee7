//! Metric spaces with a fixed dense sequence and an exact distance.

use crate::num::{ceil_lb, ceil_q, floor_lb, floor_q, pow2, q, round_half_away, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

fn bits(x: u64) -> u64 {
    64 - x.leading_zeros() as u64
}

/// (M, d, (r_i)) with exact distances.
pub trait MetricSpace: Send + Sync {
    type Point: Clone + fmt::Debug + Send + Sync;

    fn label(&self) -> String;

    /// r_i.
    fn point(&self, i: u64) -> Self::Point;

    fn d(&self, x: &Self::Point, y: &Self::Point) -> Q;

    /// An integer z with |d(r_i, r_j) − z/(p+1)| ≤ 1/(p+1).
    fn dist(&self, i: u64, j: u64, p: u64) -> BigInt {
        let d = self.d(&self.point(i), &self.point(j));
        round_half_away(&(d * Q::from_integer(BigInt::from(p) + 1)))
    }

    /// Bookkeeping steps charged for one evaluation of `dist`.
    fn dist_cost(&self, i: u64, j: u64, p: u64) -> u64 {
        bits(i) + bits(j) + bits(p) + 1
    }

    /// The least i with d(x, r_i) ≤ 1/(n+1).
    fn least_index_within(&self, x: &Self::Point, n: u64) -> u64;
}

impl<M: MetricSpace + ?Sized> MetricSpace for std::sync::Arc<M> {
    type Point = M::Point;
    fn label(&self) -> String {
        (**self).label()
    }
    fn point(&self, i: u64) -> M::Point {
        (**self).point(i)
    }
    fn d(&self, x: &M::Point, y: &M::Point) -> Q {
        (**self).d(x, y)
    }
    fn dist(&self, i: u64, j: u64, p: u64) -> BigInt {
        (**self).dist(i, j, p)
    }
    fn dist_cost(&self, i: u64, j: u64, p: u64) -> u64 {
        (**self).dist_cost(i, j, p)
    }
    fn least_index_within(&self, x: &M::Point, n: u64) -> u64 {
        (**self).least_index_within(x, n)
    }
}

/// Inverse of the Cantor pairing (a, k) ↦ (a+k)(a+k+1)/2 + k.
pub fn cantor_unpair(i: u64) -> (u64, u64) {
    let mut w = (((8 * i as u128 + 1) as f64).sqrt() as u64).saturating_sub(1) / 2;
    while (w + 1) * (w + 2) / 2 <= i {
        w += 1;
    }
    while w * (w + 1) / 2 > i {
        w -= 1;
    }
    let k = i - w * (w + 1) / 2;
    (w - k, k)
}

pub fn cantor_pair(a: u64, k: u64) -> Option<u64> {
    let w = a.checked_add(k)?;
    w.checked_mul(w + 1).map(|t| t / 2)?.checked_add(k)
}

/// 0, 1, −1, 2, −2, …
fn zigzag(a: u64) -> i64 {
    if a % 2 == 1 {
        (a / 2 + 1) as i64
    } else {
        -((a / 2) as i64)
    }
}

/// 1, −1, 3, −3, …
fn odd_of(a: u64) -> i64 {
    if a % 2 == 0 {
        a as i64 + 1
    } else {
        -(a as i64)
    }
}

/// The real line with an enumeration of all dyadic rationals: r_i = z·2^{−k}
/// where (a, k) is the Cantor unpairing of i, z runs through ℤ for k = 0 and
/// through the odd integers for k ≥ 1.
#[derive(Clone, Copy, Debug, Default)]
pub struct DyadicLine;

impl DyadicLine {
    fn value(a: u64, k: u64) -> Q {
        if k == 0 {
            Q::from_integer(zigzag(a).into())
        } else {
            Q::new(odd_of(a).into(), BigInt::one() << k)
        }
    }

    /// Least a at level k whose point lies in [lo, hi], if any.
    fn least_a_in(k: u64, lo: &Q, hi: &Q) -> Option<u64> {
        let scale = pow2(k as i64);
        let (lo, hi) = (lo * &scale, hi * &scale);
        let (clo, fhi) = (ceil_q(&lo), floor_q(&hi));
        if clo > fhi {
            return None;
        }
        let pick = |z: &BigInt| -> Option<u64> {
            let z = z.to_i64()?;
            if k == 0 {
                Some(if z > 0 { 2 * z as u64 - 1 } else { 2 * (-z) as u64 })
            } else if z > 0 {
                Some(z as u64 - 1)
            } else {
                Some((-z) as u64)
            }
        };
        let zero = BigInt::zero();
        let candidates: Vec<BigInt> = if k == 0 {
            if clo <= zero && zero <= fhi {
                vec![zero]
            } else if clo > zero {
                vec![clo]
            } else {
                vec![fhi]
            }
        } else {
            let odd_at_least = |z: BigInt| if z.is_even() { z + 1 } else { z };
            let odd_at_most = |z: BigInt| if z.is_even() { z - 1 } else { z };
            let mut c = Vec::new();
            if clo <= zero && zero <= fhi {
                c.push(odd_at_least(BigInt::zero()));
                c.push(odd_at_most(BigInt::zero()));
            } else if clo > zero {
                c.push(odd_at_least(clo.clone()));
            } else {
                c.push(odd_at_most(fhi.clone()));
            }
            c.retain(|z| &clo <= z && z <= &fhi);
            c
        };
        candidates.iter().filter_map(pick).min()
    }
}

impl MetricSpace for DyadicLine {
    type Point = Q;

    fn label(&self) -> String {
        "dyadic line".into()
    }

    fn point(&self, i: u64) -> Q {
        let (a, k) = cantor_unpair(i);
        DyadicLine::value(a, k)
    }

    fn d(&self, x: &Q, y: &Q) -> Q {
        (x - y).abs()
    }

    fn least_index_within(&self, x: &Q, n: u64) -> u64 {
        let eps = q(1, n as i64 + 1);
        let (lo, hi) = (x - &eps, x + &eps);
        let mut best = u64::MAX;
        for k in 0u64.. {
            // every index on level k is at least pair(0, k)
            if cantor_pair(0, k).map_or(true, |m| m > best) {
                break;
            }
            if let Some(a) = DyadicLine::least_a_in(k, &lo, &hi) {
                if let Some(i) = cantor_pair(a, k) {
                    best = best.min(i);
                }
            }
        }
        best
    }
}

/// q_0 = 0, q_1 = 1, q_i = (2(i − 2^{⌊lb(i−1)⌋}) − 1) / 2^{⌈lb i⌉}.
pub fn q_seq(i: u64) -> Q {
    match i {
        0 => Q::zero(),
        1 => Q::one(),
        _ => {
            let num = 2 * (i - (1u64 << floor_lb(i - 1))) - 1;
            Q::new(num.into(), BigInt::one() << ceil_lb(i))
        }
    }
}

/// Index of a dyadic point of [0,1] in the q-sequence.
pub fn q_index(x: &Q) -> Option<u64> {
    if x.is_zero() {
        return Some(0);
    }
    if x.is_one() {
        return Some(1);
    }
    if x.is_negative() || x > &Q::one() {
        return None;
    }
    let d = x.denom().to_u64()?;
    if !d.is_power_of_two() {
        return None;
    }
    let k = d.trailing_zeros();
    let t = (x.numer().to_u64()? + 1) / 2;
    Some((1u64 << (k - 1)) + t)
}

/// [0,1] with the q-sequence.
#[derive(Clone, Copy, Debug, Default)]
pub struct UnitInterval;

impl MetricSpace for UnitInterval {
    type Point = Q;

    fn label(&self) -> String {
        "unit interval".into()
    }

    fn point(&self, i: u64) -> Q {
        q_seq(i)
    }

    fn d(&self, x: &Q, y: &Q) -> Q {
        (x - y).abs()
    }

    fn least_index_within(&self, x: &Q, n: u64) -> u64 {
        let eps = q(1, n as i64 + 1);
        if (x - Q::zero()).abs() <= eps {
            return 0;
        }
        if (x - Q::one()).abs() <= eps {
            return 1;
        }
        // level k holds (2t − 1)/2^k, t = 1..2^{k−1}, at indices 2^{k−1} + t
        for k in 1u32..63 {
            let scale = pow2(k as i64);
            let lo = ((x - &eps) * &scale + Q::one()) / Q::from_integer(2.into());
            let t = ceil_q(&lo).max(BigInt::one());
            let t = t.to_u64().unwrap_or(u64::MAX);
            if t <= 1u64 << (k - 1) {
                let p = Q::new(BigInt::from(2 * t - 1), BigInt::one() << k);
                if (&p - x).abs() <= eps {
                    return (1u64 << (k - 1)) + t;
                }
            }
        }
        unreachable!("points of [0,1] are approximated by some level")
    }
}

/// A finite space given by labelled points and an exact distance; r_i cycles
/// through the points.
pub struct FiniteSpace<P> {
    label: String,
    points: Vec<P>,
    dist: Box<dyn Fn(&P, &P) -> Q + Send + Sync>,
}

impl<P: Clone + fmt::Debug + Send + Sync> FiniteSpace<P> {
    pub fn new(label: impl Into<String>, points: Vec<P>, dist: impl Fn(&P, &P) -> Q + Send + Sync + 'static) -> Self {
        assert!(!points.is_empty(), "finite space needs a point");
        FiniteSpace { label: label.into(), points, dist: Box::new(dist) }
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }
}

impl<P: Clone + fmt::Debug + Send + Sync> MetricSpace for FiniteSpace<P> {
    type Point = P;

    fn label(&self) -> String {
        self.label.clone()
    }

    fn point(&self, i: u64) -> P {
        self.points[(i % self.points.len() as u64) as usize].clone()
    }

    fn d(&self, x: &P, y: &P) -> Q {
        (self.dist)(x, y)
    }

    fn least_index_within(&self, x: &P, n: u64) -> u64 {
        let eps = q(1, n as i64 + 1);
        self.points
            .iter()
            .position(|p| (self.dist)(x, p) <= eps)
            .expect("point not within the finite space") as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::qi;

    #[test]
    fn dyadic_enumeration() {
        let m = DyadicLine;
        let first: Vec<Q> = (0..6).map(|i| m.point(i)).collect();
        assert_eq!(first, vec![qi(0), qi(1), q(1, 2), qi(-1), q(-1, 2), q(1, 4)]);
        for i in 0..500 {
            let (a, k) = cantor_unpair(i);
            assert_eq!(cantor_pair(a, k), Some(i));
        }
    }

    #[test]
    fn dyadic_enumeration_is_injective() {
        let m = DyadicLine;
        let mut seen = std::collections::HashSet::new();
        for i in 0..3000 {
            assert!(seen.insert(m.point(i)), "repeat at {i}");
        }
    }

    #[test]
    fn least_index_matches_linear_search() {
        let m = DyadicLine;
        let xs = [qi(0), q(1, 4), q(-3, 8), q(5, 3), q(7, 16), qi(-2), q(1, 1000)];
        for x in &xs {
            for n in 0..40 {
                let eps = q(1, n + 1);
                let want = (0..).find(|&i| (m.point(i) - x).abs() <= eps).unwrap();
                assert_eq!(m.least_index_within(x, n as u64), want, "x={x} n={n}");
            }
        }
        assert_eq!(m.least_index_within(&q(1, 4), 4), 5);
        assert_eq!(m.least_index_within(&q(1, 4), 3), 0);
    }

    #[test]
    fn q_sequence() {
        let listed = [qi(0), qi(1), q(1, 2), q(1, 4), q(3, 4), q(1, 8), q(3, 8), q(5, 8), q(7, 8), q(1, 16)];
        for (i, x) in listed.iter().enumerate() {
            assert_eq!(&q_seq(i as u64), x);
            assert_eq!(q_index(x), Some(i as u64));
        }
        for i in 0..2000 {
            assert_eq!(q_index(&q_seq(i)), Some(i));
        }
        assert_eq!(q_index(&q(1, 3)), None);
    }

    #[test]
    fn unit_interval_least_index() {
        let m = UnitInterval;
        for x in [qi(0), q(1, 3), q(5, 7), qi(1), q(3, 8), q(1, 1024)] {
            for n in 0..40u64 {
                let eps = q(1, n as i64 + 1);
                let want = (0..).find(|&i| (q_seq(i) - &x).abs() <= eps).unwrap();
                assert_eq!(m.least_index_within(&x, n), want, "x={x} n={n}");
            }
        }
    }

    #[test]
    fn dist_contract() {
        let m = DyadicLine;
        for i in 0..30 {
            for j in 0..30 {
                for p in [0u64, 1, 5, 17] {
                    let z = m.dist(i, j, p);
                    let d = m.d(&m.point(i), &m.point(j));
                    let err = (d - Q::new(z, BigInt::from(p + 1))).abs();
                    assert!(err <= q(1, p as i64 + 1));
                }
            }
        }
    }
}
