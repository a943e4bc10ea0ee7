//! Lᵖ([0,1]) with the p-normalized Haar system and the representation ξ_p.
//!
//! f_0 = 1. For i ≥ 1 let j = i + 1 and k = ⌈lb j⌉: f_i is +2^{(k−1)/p} on
//! [q_j − 2^{−k}, q_j) and −2^{(k−1)/p} on [q_j, q_j + 2^{−k}).
//!
//! A ξ_p-name ψ of f answers ⟨k, l, 1^m, 1^n⟩ (k ≤ l ≤ 2^m binary) by ⟨q, 0^j⟩
//! with |∫_{k2^{−m}}^{l2^{−m}} f − q·2^{−j}| < 2^{−n}, and |ψ| is an Lᵖ-modulus of f.

use super::fs::{fit, padded_length};
use super::piecewise::PiecewiseFn;
use super::xi::{parse_xi_query, precision_setup, read_z, xi_pad, BanachParams, XiQuery};
use super::{norm_answer, NormKind, SchauderSystem};
use crate::baire::{LengthFn, Name};
use crate::machine::{OracleProgram, Port};
use crate::num::{bit_len, ceil_lb_q, ceil_q, floor_q, pow2, round_half_away, Interval, Surd, SurdSum, Q};
use crate::strings::{decode_int, decode_nat_big, encode_int, encode_nat_big, tuple, untuple, BinStr};
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HaarSystem {
    p: Q,
}

impl HaarSystem {
    pub fn new(p: Q) -> Result<Self> {
        if p < Q::one() {
            return Err(Error::ParameterViolation(format!("p = {p} < 1")));
        }
        Ok(HaarSystem { p })
    }

    pub fn p(&self) -> &Q {
        &self.p
    }
}

/// sign·2^exp.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HaarValue {
    pub sign: i8,
    pub exp: Q,
}

impl HaarValue {
    pub fn to_surd(&self) -> Surd {
        if self.sign == 0 {
            Surd::zero()
        } else {
            Surd::signed_pow2(self.sign, self.exp.clone())
        }
    }
}

/// Level k, left end, node and right end of the support of f_i, i ≥ 1.
fn support(i: &BigUint) -> (u64, Q, Q, Q) {
    let k = bit_len(i);
    let t = BigInt::from(i + 1u32) - (BigInt::one() << (k - 1));
    let den = BigInt::one() << k;
    let lo = Q::new((&t - 1) * 2, den.clone());
    let mid = Q::new(&t * 2 - 1, den.clone());
    let hi = Q::new(&t * 2, den);
    (k, lo, mid, hi)
}

fn height_exp(k: u64, p: &Q) -> Q {
    Q::from_integer(BigInt::from(k - 1)) / p
}

pub fn haar_eval(i: u64, p: &Q, x: &Q) -> HaarValue {
    if i == 0 {
        return HaarValue { sign: 1, exp: Q::zero() };
    }
    let (k, lo, mid, hi) = support(&BigUint::from(i));
    let exp = height_exp(k, p);
    let sign = if x >= &lo && x < &mid {
        1
    } else if x >= &mid && (x < &hi || (x == &hi && hi.is_one())) {
        -1
    } else {
        0
    };
    HaarValue { sign, exp: if sign == 0 { Q::zero() } else { exp } }
}

fn overlap(a: &Q, b: &Q, lo: &Q, hi: &Q) -> Q {
    let l = if a > lo { a } else { lo };
    let r = if b < hi { b } else { hi };
    if l < r {
        r - l
    } else {
        Q::zero()
    }
}

/// ∫_a^b f_i exactly.
pub fn haar_integral(i: &BigUint, p: &Q, a: &Q, b: &Q) -> Surd {
    if i.is_zero() {
        return Surd::rational(overlap(a, b, &Q::zero(), &Q::one()));
    }
    let (k, lo, mid, hi) = support(i);
    let d = overlap(a, b, &lo, &mid) - overlap(a, b, &mid, &hi);
    Surd::new(d, height_exp(k, p))
}

/// ∫ |f_i|^p, which is 1.
pub fn haar_unit_norm(i: u64, p: &Q) -> Option<Q> {
    if i == 0 {
        return Some(Q::one());
    }
    let (k, lo, _, hi) = support(&BigUint::from(i));
    let h = Surd::signed_pow2(1, height_exp(k, p)).abs_pow(p)?;
    h.mul_q(&(hi - lo)).to_q()
}

/// λ_0 = ∫_0^1 f and λ_i = 2^{(k−1)(1−1/p)}(∫_L f − ∫_R f) over the two halves
/// of the support of f_i, from an integral oracle.
pub fn haar_coeffs(integral: &dyn Fn(&Q, &Q) -> SurdSum, p: &Q, up_to: usize) -> Vec<SurdSum> {
    (0..up_to as u64)
        .map(|i| {
            if i == 0 {
                return integral(&Q::zero(), &Q::one());
            }
            let (k, lo, mid, hi) = support(&BigUint::from(i));
            let diff = integral(&lo, &mid).sub(&integral(&mid, &hi));
            let e = Q::from_integer(BigInt::from(k - 1)) * (Q::one() - p.recip());
            diff.mul_surd(&Surd::signed_pow2(1, e))
        })
        .collect()
}

pub fn haar_coeffs_of(f: &PiecewiseFn, p: &Q, up_to: usize) -> Vec<SurdSum> {
    haar_coeffs(&|a, b| SurdSum::from_q(f.integral(a, b)), p, up_to)
}

/// Coefficients of χ_[q_i, q_j], read off the exact integrals of the indicator.
pub fn chi_expand(i: u64, j: u64, p: &Q) -> Vec<SurdSum> {
    let chi = PiecewiseFn::indicator(&crate::reprs::q_seq(i), &crate::reprs::q_seq(j));
    haar_coeffs_of(&chi, p, i.max(j) as usize + 1)
}

/// Σ λ_i ∫_a^b f_i.
pub fn haar_sum_integral(coeffs: &[SurdSum], p: &Q, a: &Q, b: &Q) -> SurdSum {
    let mut s = SurdSum::zero();
    for (i, c) in coeffs.iter().enumerate() {
        let v = haar_integral(&BigUint::from(i), p, a, b);
        if !v.is_zero() {
            s = s.add(&c.mul_surd(&v));
        }
    }
    s
}

/// Indices i whose ∫_a^b f_i can be non-zero, on levels ≤ max_level: f_0 and
/// the supports that contain a or b in their interior.
pub fn haar_active(a: &Q, b: &Q, max_level: u64) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero()];
    for level in 1..=max_level {
        let scale = BigInt::one() << (level - 1);
        for x in [a, b] {
            let y = x * Q::from_integer(scale.clone());
            if y.is_integer() || y.is_negative() || y >= Q::from_integer(scale.clone()) {
                continue;
            }
            let i = (&scale + floor_q(&y)).to_biguint().expect("non-negative index");
            if !out.contains(&i) {
                out.push(i);
            }
        }
    }
    out
}

/// Values of Σ c_i f_i on the cells of the grid 2^{−K}, K the finest level present.
fn cell_values(coeffs: &[Q], p: &Q) -> (u64, Vec<SurdSum>) {
    let top = coeffs.len().saturating_sub(1);
    let k = if top == 0 { 0 } else { bit_len(&BigUint::from(top)) };
    let size = 1usize << k;
    let mut cells = vec![SurdSum::zero(); size];
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if i == 0 {
            for v in cells.iter_mut() {
                *v = v.add(&SurdSum::from_q(c.clone()));
            }
            continue;
        }
        let (lev, lo, mid, hi) = support(&BigUint::from(i));
        let h = SurdSum::from_surd(&Surd::new(c.clone(), height_exp(lev, p)));
        let at = |x: &Q| (x * Q::from_integer(BigInt::from(size))).to_integer().to_usize().expect("grid index");
        let (l, m, r) = (at(&lo), at(&mid), at(&hi));
        for v in &mut cells[l..m] {
            *v = v.add(&h);
        }
        for v in &mut cells[m..r] {
            *v = v.sub(&h);
        }
    }
    (k, cells)
}

/// Enclosure of |x|^p for x in iv, p = a/b rational.
fn pow_enclosure(iv: &Interval, p: &Q, bits: u32) -> Interval {
    let a = p.numer().to_u32().expect("small p numerator");
    let b = p.denom().to_u32().expect("small p denominator");
    iv.abs().powi(a).root(b, bits)
}

impl SchauderSystem for HaarSystem {
    fn label(&self) -> String {
        format!("Haar, p = {}", self.p)
    }
    fn norm_kind(&self) -> NormKind {
        NormKind::Lp(self.p.clone())
    }
    fn norm_enclosure(&self, coeffs: &[Q], bits: u32) -> Interval {
        let (k, cells) = cell_values(coeffs, &self.p);
        let mut acc = Interval::point(Q::zero());
        let inner = bits + 8 + k as u32;
        for v in &cells {
            acc = acc.add(&pow_enclosure(&v.enclosure(inner), &self.p, inner));
        }
        let acc = acc.scale(&pow2(-(k as i64)));
        pow_enclosure(&acc, &self.p.recip(), bits)
    }
}

/// A_m f(x) = 2^{m−1} ∫_{x−2^{−m}}^{x+2^{−m}} f, the average over the window,
/// as a polygon on the breakpoints c ± 2^{−m}.
pub fn smooth(f: &PiecewiseFn, m: u32) -> PiecewiseFn {
    let h = pow2(-(m as i64));
    let mut xs: Vec<Q> = f.breakpoints().iter().flat_map(|c| [c - &h, c + &h]).collect();
    xs.sort();
    xs.dedup();
    let scale = pow2(m as i64 - 1);
    let pts: Vec<(Q, Q)> = xs.iter().map(|x| (x.clone(), f.integral(&(x - &h), &(x + &h)) * &scale)).collect();
    if pts.len() < 2 {
        return PiecewiseFn::zero();
    }
    PiecewiseFn::polygon(&pts).expect("sorted breakpoints")
}

/// ∫ |f − f(· + h)|^p over the line.
fn shift_energy(f: &PiecewiseFn, p: u32, h: &Q) -> Q {
    f.sub(&f.translate(h)).pow_integral(p)
}

/// Shift energies of a step function: exact values at the differences of
/// cuts and at 2^{−m} above the smallest cut gap g, and the slope A with
/// E(h) = h·A for 0 < h ≤ g (the pulses at the cuts are then disjoint).
struct ShiftTable {
    p: u32,
    diffs: Vec<(Q, Q)>,
    coarse: Vec<Q>,
    slope: Q,
}

impl ShiftTable {
    fn new(f: &PiecewiseFn, p: u32) -> Result<Self> {
        if !f.is_step() {
            return Err(Error::ParameterViolation("Lp modulus needs a step function".into()));
        }
        let cuts = f.breakpoints();
        let mut ds: Vec<Q> = Vec::new();
        for a in &cuts {
            for b in &cuts {
                if a > b {
                    ds.push(a - b);
                }
            }
        }
        ds.sort();
        ds.dedup();
        let diffs: Vec<(Q, Q)> = ds.iter().map(|d| (d.clone(), shift_energy(f, p, d))).collect();
        let (coarse, slope) = match ds.first() {
            None => (Vec::new(), Q::zero()),
            Some(g) => {
                let mut coarse = Vec::new();
                while &pow2(-(coarse.len() as i64)) > g {
                    coarse.push(shift_energy(f, p, &pow2(-(coarse.len() as i64))));
                }
                (coarse, shift_energy(f, p, g) / g)
            }
        };
        Ok(ShiftTable { p, diffs, coarse, slope })
    }

    fn modulus(&self, n: u64) -> u64 {
        let target = pow2(-((n * self.p as u64) as i64));
        for (m, e) in self.coarse.iter().enumerate() {
            let delta = pow2(-(m as i64));
            let inner_ok = self.diffs.iter().take_while(|(d, _)| d < &delta).all(|(_, e)| e <= &target);
            if inner_ok && e <= &target {
                return m as u64;
            }
        }
        let m0 = self.coarse.len() as u64;
        if !self.slope.is_positive() {
            return m0;
        }
        // 2^{−m}·A ≤ 2^{−np}
        let need = ceil_lb_q(&self.slope) + (n * self.p as u64) as i64;
        m0.max(need.max(0) as u64)
    }
}

/// Least m with ‖f − f(· + h)‖_p ≤ 2^{−n} for all |h| ≤ 2^{−m}, for a step
/// function f and integer p. The shift energy is piecewise linear in h with
/// breakpoints at differences of cuts, so the supremum over (0, 2^{−m}] sits
/// at 2^{−m} or at one of those differences.
pub fn lp_modulus(f: &PiecewiseFn, p: u32, n: u64) -> Result<u64> {
    Ok(ShiftTable::new(f, p)?.modulus(n))
}

/// n ↦ lp_modulus(f, p, n), memoized.
pub fn lp_modulus_fn(f: &PiecewiseFn, p: u32) -> Result<LengthFn> {
    let table = ShiftTable::new(f, p)?;
    let memo: Mutex<HashMap<usize, usize>> = Mutex::new(HashMap::new());
    Ok(LengthFn::from_fn(format!("Lp modulus, p = {p}"), move |n| {
        if let Some(v) = memo.lock().unwrap().get(&n) {
            return *v;
        }
        let v = table.modulus(n as u64) as usize;
        memo.lock().unwrap().insert(n, v);
        v
    }))
}

/// ‖f − A_{μ(n)} f‖_p < 2^{−n}, compared through p-th powers.
pub fn approx_check(f: &PiecewiseFn, p: u32, n: u64) -> Result<bool> {
    let m = lp_modulus(f, p, n)?;
    let err = f.sub(&smooth(f, m as u32)).pow_integral(p);
    Ok(err < pow2(-((n * p as u64) as i64)))
}

/// n ↦ μ(n + m) is a modulus of continuity of A_m f: the oscillation of A_m f
/// at width 2^{−μ(n+m)} is at most 2^{−n}.
pub fn lp_modulus_check(f: &PiecewiseFn, p: u32, m: u32, n: u64) -> Result<bool> {
    let mu = lp_modulus(f, p, n + m as u64)?;
    let g = smooth(f, m);
    Ok(g.oscillation(&pow2(-(mu as i64))) <= pow2(-(n as i64)))
}

pub fn lp_query(k: &BigUint, l: &BigUint, m: u64, n: u64) -> BinStr {
    tuple(&[encode_nat_big(k), encode_nat_big(l), BinStr::ones(m as usize), BinStr::ones(n as usize)])
}

/// (a, b, n) when the query is well formed with k ≤ l ≤ 2^m.
pub(crate) fn parse_lp_query(a: &BinStr) -> Option<(Q, Q, u64, u64)> {
    let parts = untuple(4, a)?;
    let k = decode_nat_big(&parts[0]).ok()?;
    let l = decode_nat_big(&parts[1]).ok()?;
    if !parts[2].is_all(true) || !parts[3].is_all(true) {
        return None;
    }
    let m = parts[2].len() as u64;
    if k > l || l > BigUint::one() << m {
        return None;
    }
    let den = BigInt::one() << m;
    Some((Q::new(k.into(), den.clone()), Q::new(l.into(), den), m, parts[3].len() as u64))
}

fn lp_answer(q0: &BigInt, j0: u64, width: u64) -> Result<BinStr> {
    let (q, t) = fit(q0, j0, width)?;
    Ok(tuple(&[encode_int(&q), BinStr::zeros((j0 + t) as usize)]))
}

fn read_lp_answer(v: &BinStr) -> Result<Q> {
    let bad = || Error::MalformedName(format!("integral answer {v:?}"));
    let parts = untuple(2, v).ok_or_else(bad)?;
    if !parts[1].is_all(false) {
        return Err(bad());
    }
    let q = decode_int(&parts[0]).map_err(|_| bad())?;
    Ok(Q::new(q, BigInt::one() << parts[1].len()))
}

/// The approximation of ∫_{k2^{−m}}^{l2^{−m}} f to 2^{−n} read from a ξ_p-name.
pub fn lp_value(psi: &Name, k: &BigUint, l: &BigUint, m: u64, n: u64) -> Result<Q> {
    read_lp_answer(&psi.query(&lp_query(k, l, m, n))?)
}

/// The ξ_p-name of a step function f on [0,1] with Lᵖ-modulus μ. Answers to
/// queries of length s have length 2(J(s)+1) with J(s) = max(μ(t) for t ≤ s, s + c_f).
pub fn lp_name(f: &PiecewiseFn, mu: &LengthFn) -> Name {
    let c = (ceil_lb_q(&(f.sup_norm() + Q::one())).max(0) + 3) as usize;
    let j = padded_length(mu, c);
    let len = {
        let j = j.clone();
        LengthFn::from_fn(format!("2(J+1), J = {}", j.desc()), move |s| 2 * (j.eval(s) + 1))
    };
    let f = f.clone();
    Name::fallible(format!("xi_p({:?})", f.pieces().len()), move |a| {
        let width = j.eval(a.len()) as u64;
        match parse_lp_query(a) {
            Some((lo, hi, _, n)) => {
                let v = f.integral(&lo, &hi) * pow2(n as i64 + 1);
                lp_answer(&round_half_away(&v), n + 1, width)
            }
            None => Ok(BinStr::zeros(2 * (width as usize + 1))),
        }
    })
    .with_bound(len)
}

/// ξ (Haar) to ξ_p. Over [a, b] with dyadic ends of level m only f_0 and at
/// most two supports per level ≤ m contribute; their coefficients are read at
/// precision 2^{n+2} − 1 and the exact integral is rounded to 2^{−(n+2)}.
pub struct XiToLp {
    params: BanachParams,
    p: Q,
}

impl OracleProgram for XiToLp {
    fn label(&self) -> String {
        format!("xi to xi_p, p = {}", self.p)
    }
    fn run(&self, port: &mut Port<'_>) -> Result<()> {
        let a = port.input().clone();
        let s = a.len() as u64;
        let eval = self.params.evaluator().clone();
        let (k, b) = xi_pad(port, eval.as_ref(), s as usize)?;
        let pc = ceil_q(&self.p).to_u64().expect("small p");
        let width = pc * (s + b + k + 3) + k + 2;
        let Some((lo, hi, m, n)) = parse_lp_query(&a) else {
            return port.write(&BinStr::zeros(2 * (width as usize + 1)));
        };
        let np = (BigUint::one() << (n + 2)) - 1u32;
        let (big_n, big_m) = precision_setup(port, eval.as_ref(), &np)?;
        let den = Q::from_integer(BigInt::from(&big_m + 1u32));
        let mut v = SurdSum::zero();
        for i in haar_active(&lo, &hi, m) {
            if i > big_n {
                continue;
            }
            let w = haar_integral(&i, &self.p, &lo, &hi);
            if w.is_zero() {
                continue;
            }
            let z = read_z(port, &i, &np, &big_m)?;
            v.add_surd(&w.mul_q(&(Q::from_integer(z) / &den)));
        }
        let q0 = v.round_scaled(&pow2(n as i64 + 2));
        port.tick(bit_len(q0.magnitude()))?;
        port.write(&lp_answer(&q0, n + 2, width)?)
    }
}

pub fn xi_to_lp(params: &BanachParams, p: &Q) -> Arc<dyn OracleProgram> {
    Arc::new(XiToLp { params: params.clone(), p: p.clone() })
}

/// ξ_p to ξ (Haar), for S(l,n) = 2^{max(l(n),n)}. Coefficients come from
/// integrals over the two halves of each support; the norm branch is
/// computed directly.
pub struct LpToXi {
    system: HaarSystem,
}

impl OracleProgram for LpToXi {
    fn label(&self) -> String {
        format!("xi_p to xi, p = {}", self.system.p)
    }
    fn run(&self, port: &mut Port<'_>) -> Result<()> {
        let a = port.input().clone();
        let p = self.system.p.clone();
        let integral = |port: &mut Port<'_>, lo: &BigUint, hi: &BigUint, m: u64, t: u64| -> Result<Q> {
            let v = port.query(&lp_query(lo, hi, m, t))?;
            read_lp_answer(&v)
        };
        match parse_xi_query(&a) {
            XiQuery::Length(k) => {
                let l = port.query(&BinStr::zeros(4 * k + 12))?.len();
                port.write(&BinStr::zeros(l + k + 4))
            }
            XiQuery::Coeff { i, m, .. } => {
                let scale = Q::from_integer(BigInt::from(&m + 1u32));
                let lam = if i.is_zero() {
                    let v = integral(port, &BigUint::zero(), &BigUint::one(), 0, bit_len(&m) + 2)?;
                    SurdSum::from_q(v)
                } else {
                    let k = bit_len(&i);
                    let t = &i + 1u32 - (BigUint::one() << (k - 1));
                    let prec = bit_len(&m) + k + 2;
                    let left = integral(port, &((&t - 1u32) * 2u32), &(&t * 2u32 - 1u32), k, prec)?;
                    let right = integral(port, &(&t * 2u32 - 1u32), &(&t * 2u32), k, prec)?;
                    let e = Q::from_integer(BigInt::from(k - 1)) * (Q::one() - p.recip());
                    SurdSum::from_surd(&Surd::new(left - right, e))
                };
                port.write(&encode_int(&lam.round_scaled(&scale)))
            }
            XiQuery::Norm { zs, n, m } => {
                let den = BigInt::from(m + 1u32);
                let c: Vec<Q> = zs.iter().map(|z| Q::new(z.clone(), den.clone())).collect();
                port.tick(a.len() as u64)?;
                port.write(&encode_int(&norm_answer(&self.system, &c, &n)))
            }
            XiQuery::Other => Ok(()),
        }
    }
}

pub fn lp_to_xi(p: &Q) -> Result<Arc<dyn OracleProgram>> {
    Ok(Arc::new(LpToXi { system: HaarSystem::new(p.clone())? }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::banach::{banach_name, xi_coefficient};
    use crate::machine::{translate, RunningTime};
    use crate::num::{abs_q, q, q_to_f64, qi};
    use proptest::prelude::*;

    fn approx_norm(system: &HaarSystem, coeffs: &[Q]) -> f64 {
        q_to_f64(&system.norm_enclosure(coeffs, 40).mid())
    }

    fn big(i: u64) -> BigUint {
        BigUint::from(i)
    }

    #[test]
    fn values_of_the_first_functions() {
        for p in [qi(1), qi(2), q(3, 2)] {
            assert_eq!(haar_eval(0, &p, &q(1, 3)), HaarValue { sign: 1, exp: qi(0) });
            assert_eq!(haar_eval(1, &p, &q(1, 4)), HaarValue { sign: 1, exp: qi(0) });
            assert_eq!(haar_eval(1, &p, &q(3, 4)).sign, -1);
            assert_eq!(haar_eval(1, &p, &qi(1)).sign, -1);
        }
        // f_2 lives on [0, 1/2]
        assert_eq!(haar_eval(2, &qi(2), &q(3, 4)).sign, 0);
        assert_eq!(haar_eval(2, &qi(2), &q(1, 8)), HaarValue { sign: 1, exp: q(1, 2) });
    }

    #[test]
    fn integrals() {
        for p in [qi(1), qi(2), qi(3)] {
            assert_eq!(haar_integral(&big(1), &p, &qi(0), &q(1, 2)).to_q(), Some(q(1, 2)));
            for i in 1..40 {
                assert!(haar_integral(&big(i), &p, &qi(0), &qi(1)).is_zero());
            }
        }
        // left half of the support of f_{j−1}: 2^{(k−1)/p − k}, which is 2^{−1/p} at p = 1
        for j in 2..32u64 {
            let k = crate::num::ceil_lb(j) as i64;
            let (c, h) = (crate::reprs::q_seq(j), pow2(-k));
            let v = haar_integral(&big(j - 1), &qi(1), &(&c - &h), &c);
            assert_eq!(v.to_q(), Some(q(1, 2)));
            let v = haar_integral(&big(j - 1), &qi(2), &(&c - &h), &c);
            assert_eq!(v, Surd::new(qi(1), Q::from_integer((k - 1).into()) / qi(2) - Q::from_integer(k.into())));
        }
    }

    #[test]
    fn triangularity() {
        for p in [qi(1), qi(2), qi(3)] {
            for j in 2..=32u64 {
                let k = crate::num::ceil_lb(j) as i64;
                let (c, h) = (crate::reprs::q_seq(j), pow2(-k));
                for i in j..=40 {
                    assert!(haar_integral(&big(i), &p, &(&c - &h), &c).is_zero(), "i = {i}, j = {j}");
                }
            }
        }
    }

    #[test]
    fn unit_norms() {
        for p in [qi(1), qi(2), qi(3), q(5, 2)] {
            for i in 0..=64 {
                assert_eq!(haar_unit_norm(i, &p), Some(qi(1)));
            }
        }
    }

    #[test]
    fn coefficient_examples() {
        for p in [qi(1), qi(2)] {
            let one = haar_coeffs_of(&PiecewiseFn::indicator(&qi(0), &qi(1)), &p, 8);
            assert_eq!(one[0].to_q(), Some(qi(1)));
            assert!(one[1..].iter().all(SurdSum::is_zero));
            let half = haar_coeffs_of(&PiecewiseFn::indicator(&qi(0), &q(1, 2)), &p, 8);
            assert_eq!(half[0].to_q(), Some(q(1, 2)));
            assert_eq!(half[1].to_q(), Some(q(1, 2)));
            assert!(half[2..].iter().all(SurdSum::is_zero));
        }
        for p in [qi(1), qi(2), q(3, 2)] {
            for k in 0..20u64 {
                let c = haar_coeffs(&|a, b| SurdSum::from_surd(&haar_integral(&big(k), &p, a, b)), &p, 24);
                for (i, x) in c.iter().enumerate() {
                    let want = if i as u64 == k { SurdSum::from_q(qi(1)) } else { SurdSum::zero() };
                    assert_eq!(x, &want, "f_{k}, coefficient {i}, p = {p}");
                }
            }
        }
    }

    #[test]
    fn chi_expansion_integrates_correctly() {
        assert!(chi_expand(0, 0, &qi(2)).iter().all(SurdSum::is_zero));
        let half = chi_expand(0, 2, &qi(1));
        assert_eq!(half[0].to_q(), Some(q(1, 2)));
        assert_eq!(half[1].to_q(), Some(q(1, 2)));
        for p in [qi(1), qi(2)] {
            for i in 0..=12u64 {
                for j in 0..=12u64 {
                    let (a, b) = (crate::reprs::q_seq(i), crate::reprs::q_seq(j));
                    if a > b {
                        continue;
                    }
                    let c = chi_expand(i, j, &p);
                    let chi = PiecewiseFn::indicator(&a, &b);
                    for r in 0..32 {
                        let (lo, hi) = (q(r, 32), q(r + 1, 32));
                        let got = haar_sum_integral(&c, &p, &lo, &hi);
                        assert_eq!(got, SurdSum::from_q(chi.integral(&lo, &hi)), "χ[q_{i}, q_{j}] on cell {r}");
                    }
                }
            }
        }
    }

    #[test]
    fn active_supports_cover_the_integral() {
        let c: Vec<SurdSum> = (0..32).map(|i| SurdSum::from_q(q(i % 5 - 2, 3))).collect();
        for (k, l) in [(0i64, 3i64), (1, 7), (5, 8), (2, 2)] {
            let (a, b) = (q(k, 8), q(l, 8));
            let all = haar_sum_integral(&c, &qi(2), &a, &b);
            let mut part = SurdSum::zero();
            for i in haar_active(&a, &b, 3) {
                let i = i.to_usize().unwrap();
                part = part.add(&c[i].mul_surd(&haar_integral(&big(i as u64), &qi(2), &a, &b)));
            }
            assert_eq!(part, all);
        }
    }

    #[test]
    fn smoothing_examples() {
        let f = PiecewiseFn::indicator(&qi(0), &q(1, 2));
        assert_eq!(smooth(&f, 1).eval(&q(1, 2)), q(1, 2));
        let c = PiecewiseFn::step(&[qi(0), qi(1)], &[qi(3)]).unwrap();
        let g = smooth(&c, 3);
        for r in 1..=7 {
            assert_eq!(g.eval(&q(r, 8)), qi(3));
        }
    }

    #[test]
    fn modulus_of_an_indicator() {
        // ‖χ − χ(·+h)‖_p^p = 2h for small h
        let f = PiecewiseFn::indicator(&qi(0), &q(1, 2));
        assert_eq!(lp_modulus(&f, 1, 0).unwrap(), 0);
        assert_eq!(lp_modulus(&f, 1, 3).unwrap(), 4);
        assert_eq!(lp_modulus(&f, 2, 3).unwrap(), 7);
        assert!(lp_modulus(&crate::banach::fs_basis(2), 1, 0).is_err());
    }

    fn direct_modulus(f: &PiecewiseFn, p: u32, n: u64) -> u64 {
        let target = pow2(-((n * p as u64) as i64));
        let cuts = f.breakpoints();
        (0..)
            .find(|&m| {
                let delta = pow2(-(m as i64));
                let inner = cuts.iter().flat_map(|a| cuts.iter().map(move |b| a - b));
                inner.filter(|d| d.is_positive() && d < &delta).all(|d| shift_energy(f, p, &d) <= target)
                    && shift_energy(f, p, &delta) <= target
            })
            .unwrap()
    }

    #[test]
    fn modulus_matches_direct_search() {
        for (levels, cuts) in [(vec![1], vec![]), (vec![3, -5, 1, 7], vec![4, 9, 20]), (vec![0, 2], vec![1, 31]), (vec![0], vec![])] {
            let f = random_step(&levels, &cuts);
            for p in [1, 2] {
                for n in 0..8 {
                    assert_eq!(lp_modulus(&f, p, n).unwrap(), direct_modulus(&f, p, n), "p = {p}, n = {n}");
                }
            }
        }
    }

    fn random_step(levels: &[i64], cuts_num: &[i64]) -> PiecewiseFn {
        let mut xs: Vec<i64> = cuts_num.to_vec();
        xs.push(0);
        xs.push(32);
        xs.sort();
        xs.dedup();
        let cuts: Vec<Q> = xs.iter().map(|&x| q(x, 32)).collect();
        let ls: Vec<Q> = (0..cuts.len() - 1).map(|t| q(levels[t % levels.len()], 4)).collect();
        PiecewiseFn::step(&cuts, &ls).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn smoothing_lemmas(levels in proptest::collection::vec(-8i64..8, 1..5), cuts in proptest::collection::vec(1i64..32, 0..4), p in 1u32..3, n in 0u64..5) {
            let f = random_step(&levels, &cuts);
            prop_assert!(approx_check(&f, p, n).unwrap());
            for m in 0..4 {
                prop_assert!(lp_modulus_check(&f, p, m, n).unwrap());
            }
        }
    }

    #[test]
    fn lp_name_values() {
        let f = PiecewiseFn::indicator(&qi(0), &q(1, 2));
        let psi = lp_name(&f, &lp_modulus_fn(&f, 1).unwrap());
        for n in 0..8 {
            let v = lp_value(&psi, &big(0), &big(1), 1, n).unwrap();
            assert!(abs_q(&(v - q(1, 2))) < pow2(-(n as i64)));
        }
        assert!(crate::baire::is_length_monotone(&psi, 6).unwrap());
    }

    fn xi_of(f: &PiecewiseFn, p: &Q, levels: u32) -> Name {
        let c = haar_coeffs_of(f, p, 1 << levels);
        let sys = Arc::new(HaarSystem::new(p.clone()).unwrap());
        banach_name(sys, c, LengthFn::affine(1, 8), &RunningTime::exp_max()).unwrap()
    }

    #[test]
    fn xi_to_lp_preserves_integrals() {
        let f = random_step(&[3, -5, 1, 7], &[4, 9, 20]);
        for p in [qi(1), qi(2)] {
            let psi = translate(xi_to_lp(&BanachParams::exp_max(), &p), &xi_of(&f, &p, 5));
            for (k, l, m) in [(0u64, 1u64, 0u64), (1, 3, 2), (3, 11, 4), (0, 32, 5)] {
                let want = f.integral(&q(k as i64, 1 << m), &q(l as i64, 1 << m));
                for n in [0u64, 4, 10] {
                    let v = lp_value(&psi, &big(k), &big(l), m, n).unwrap();
                    assert!(abs_q(&(v - &want)) < pow2(-(n as i64)), "[{k},{l}]/2^{m} at n = {n}");
                }
            }
        }
    }

    #[test]
    fn lp_to_xi_on_the_constant() {
        let f = PiecewiseFn::indicator(&qi(0), &qi(1));
        for p in [qi(1), qi(2)] {
            let psi = lp_name(&f, &lp_modulus_fn(&f, p.to_integer().to_u32().unwrap()).unwrap());
            let phi = translate(lp_to_xi(&p).unwrap(), &psi);
            let m = big(999);
            for i in 0..8u64 {
                let z = xi_coefficient(&phi, &big(i), &big(3), &m).unwrap();
                let want = if i == 0 { 1000 } else { 0 };
                assert!((z - BigInt::from(want)).abs() <= BigInt::one(), "coefficient {i}");
            }
        }
    }

    #[test]
    fn norms_of_simple_sums() {
        let sys = HaarSystem::new(qi(2)).unwrap();
        // ‖(f_0 + f_1)/2‖_2 = ‖χ[0,1/2)‖_2 = 2^{−1/2}
        let v = approx_norm(&sys, &[q(1, 2), q(1, 2)]);
        assert!((v - 0.5f64.sqrt()).abs() < 1e-9);
        let iv = sys.norm_enclosure(&[qi(1), qi(0), qi(1)], 30);
        // f_0 + f_2: 1 + √2 on [0,1/4), 1 − √2 on [1/4,1/2), 1 on [1/2,1]
        let exact = ((1.0 + 2f64.sqrt()).powi(2) / 4.0 + (1.0 - 2f64.sqrt()).powi(2) / 4.0 + 0.5).sqrt();
        assert!((q_to_f64(&iv.mid()) - exact).abs() < 1e-6);
    }
}
