//! The coefficient representation ξ of a Banach space with a Schauder basis.
//!
//! Query layout of a ξ-name φ:
//! - 0^k ↦ 0^{|φ|(k)}, so the name provides its own length;
//! - 0⟨i, n, m⟩ ↦ z with z/(m+1) near the i-th coefficient (n, m numerals);
//! - 1⟨⟨z_0, …, z_N⟩, N, n, m⟩ ↦ w with |‖Σ z_i/(m+1)·b_i‖ − w/(n+1)| ≤ 1/(n+1).

use super::SchauderSystem;
use crate::baire::{LengthFn, Name};
use crate::machine::{run_free, OracleProgram, Port, RunningTime};
use crate::num::{biguint_to_u64, bit_len, ceil_lb, round_half_away, SurdSum, Q};
use crate::reprs::quarter;
use crate::strings::{decode_int, decode_nat_big, encode_int, encode_nat_big, tuple, untuple, BinStr};
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum XiQuery {
    Length(usize),
    Coeff { i: BigUint, n: BigUint, m: BigUint },
    Norm { zs: Vec<BigInt>, n: BigUint, m: BigUint },
    Other,
}

fn numeral(a: &BinStr) -> Option<BigUint> {
    decode_nat_big(a).ok()
}

pub fn parse_xi_query(a: &BinStr) -> XiQuery {
    if a.is_all(false) {
        return XiQuery::Length(a.len());
    }
    let Some((tag, rest)) = a.split_first() else { return XiQuery::Other };
    if !tag {
        let Some(parts) = untuple(3, &rest) else { return XiQuery::Other };
        return match (numeral(&parts[0]), numeral(&parts[1]), numeral(&parts[2])) {
            (Some(i), Some(n), Some(m)) => XiQuery::Coeff { i, n, m },
            _ => XiQuery::Other,
        };
    }
    let Some(parts) = untuple(4, &rest) else { return XiQuery::Other };
    let (Some(big_n), Some(n), Some(m)) = (numeral(&parts[1]), numeral(&parts[2]), numeral(&parts[3])) else {
        return XiQuery::Other;
    };
    let Some(count) = big_n.to_usize().and_then(|k| k.checked_add(1)) else { return XiQuery::Other };
    if count > parts[0].len() {
        return XiQuery::Other;
    }
    let Some(list) = untuple(count, &parts[0]) else { return XiQuery::Other };
    match list.iter().map(decode_int).collect::<Result<Vec<_>>>() {
        Ok(zs) => XiQuery::Norm { zs, n, m },
        Err(_) => XiQuery::Other,
    }
}

pub fn coeff_query(i: &BigUint, n: &BigUint, m: &BigUint) -> BinStr {
    tuple(&[encode_nat_big(i), encode_nat_big(n), encode_nat_big(m)]).prefixed(false)
}

/// zs must be non-empty.
pub fn norm_query(zs: &[BigInt], n: &BigUint, m: &BigUint) -> BinStr {
    let list: Vec<BinStr> = zs.iter().map(encode_int).collect();
    let big_n = BigUint::from(zs.len() - 1);
    tuple(&[tuple(&list), encode_nat_big(&big_n), encode_nat_big(n), encode_nat_big(m)]).prefixed(true)
}

/// w = round((n+1)·‖Σ c_i b_i‖) from an enclosure of width ≤ 1/(2(n+1)).
pub fn norm_answer(system: &dyn SchauderSystem, coeffs: &[Q], n: &BigUint) -> BigInt {
    let np1 = Q::from_integer(BigInt::from(n + 1u32));
    let target = Q::one() / (&np1 * Q::from_integer(2.into()));
    let mut bits = bit_len(n) as u32 + 2;
    loop {
        let iv = system.norm_enclosure(coeffs, bits);
        if iv.width() <= target {
            return round_half_away(&(iv.mid() * &np1));
        }
        bits *= 2;
    }
}

fn scaled_coeffs(zs: &[BigInt], m: &BigUint) -> Vec<Q> {
    let den = BigInt::from(m + 1u32);
    zs.iter().map(|z| Q::new(z.clone(), den.clone())).collect()
}

/// S(l, k) saturating into u64, compared against big indices.
fn s_at(s: &RunningTime, l: &LengthFn, k: usize) -> BigUint {
    BigUint::from(s.eval(l, k))
}

/// The ξ-name of Σ λ_i b_i for finitely many exact coefficients.
///
/// Every coefficient has to be reached at the coarsest precision, that is
/// coeffs.len() ≤ S(l, 0) + 1. Answers are bounded by l, which must be
/// non-decreasing and large enough for the rounded coefficients.
pub fn banach_name(system: Arc<dyn SchauderSystem>, coeffs: Vec<SurdSum>, l: LengthFn, s: &RunningTime) -> Result<Name> {
    let s0 = s.eval(&l, 0);
    if coeffs.len() as u64 > s0.saturating_add(1) {
        return Err(Error::ParameterViolation(format!(
            "{} coefficients but S(l,0) = {s0} reaches only {} of them",
            coeffs.len(),
            s0.saturating_add(1)
        )));
    }
    let label = format!("xi[{}] of {} coefficients", system.label(), coeffs.len());
    let sums = coeffs;
    let (s, l2) = (s.clone(), l.clone());
    let name = Name::fallible(label, move |a| {
        Ok(match parse_xi_query(a) {
            XiQuery::Length(k) => BinStr::zeros(l2.eval(k)),
            XiQuery::Coeff { i, n, m } => {
                let reach = s_at(&s, &l2, bit_len(&n) as usize);
                match i.to_usize() {
                    Some(i) if i < sums.len() && BigUint::from(i) <= reach => {
                        let scale = Q::from_integer(BigInt::from(m + 1u32));
                        encode_int(&sums[i].round_scaled(&scale))
                    }
                    _ => BinStr::new(),
                }
            }
            XiQuery::Norm { zs, n, m } => encode_int(&norm_answer(system.as_ref(), &scaled_coeffs(&zs, &m), &n)),
            XiQuery::Other => BinStr::new(),
        })
    });
    Ok(name.with_bound(l))
}

/// The answer to 0⟨i, n, m⟩.
pub fn xi_coefficient(phi: &Name, i: &BigUint, n: &BigUint, m: &BigUint) -> Result<BigInt> {
    let v = phi.query(&coeff_query(i, n, m))?;
    decode_int(&v).map_err(|_| Error::MalformedName(format!("coefficient answer {v:?}")))
}

/// The running-time parameter S of ξ with its evaluator.
#[derive(Clone, Debug)]
pub struct BanachParams {
    s: RunningTime,
}

impl BanachParams {
    pub fn new(s: RunningTime) -> Result<Self> {
        if s.evaluator().is_none() {
            return Err(Error::ParameterViolation(format!("S = {} has no evaluator", s.label())));
        }
        Ok(BanachParams { s })
    }

    /// S(l, n) = 2^{max(l(n), n)}.
    pub fn exp_max() -> Self {
        BanachParams { s: RunningTime::exp_max() }
    }

    pub fn s(&self) -> &RunningTime {
        &self.s
    }

    pub(crate) fn evaluator(&self) -> &Arc<dyn OracleProgram> {
        self.s.evaluator().expect("checked in the constructor")
    }

    /// For every tabulated l some tabulated l′ has S(l′, n) ≥ l(n) for n ≤ depth.
    pub fn growth_witness(&self, samples: &[LengthFn], depth: usize) -> bool {
        samples.iter().all(|l| {
            samples.iter().any(|l2| (0..=depth).all(|n| self.s.eval(l2, n) >= l.eval(n) as u64))
        })
    }

    /// l(n + ⌈lb(S(l,n+1)+1)⌉ + 1)·S(l, n+1).
    pub fn step_bound(&self, l: &LengthFn, n: usize) -> u64 {
        let s1 = self.s.eval(l, n + 1);
        let shift = ceil_lb(s1.saturating_add(1)) as usize + 1;
        (l.eval(n + shift) as u64).saturating_mul(s1)
    }

    /// Step bound of [`BanachNorm`] on inputs of length k:
    /// (S(l,k+3)+2)·(l(Q)+Q) with Q = 3(⌈lb(S(l,k+4)+2)⌉ + k + 8).
    pub fn norm_time(&self, l: &LengthFn, k: usize) -> u64 {
        let n_terms = self.s.eval(l, k + 3).saturating_add(2);
        let q = 3 * (ceil_lb(self.s.eval(l, k + 4).saturating_add(2)) as usize + k + 8);
        n_terms.saturating_mul((l.eval(q) + q) as u64)
    }

    pub fn norm_running_time(&self) -> RunningTime {
        let p = self.clone();
        RunningTime::new(format!("norm time for S = {}", self.s.label()), move |l, k| p.norm_time(l, k))
    }
}

/// S(|φ|, k) through the evaluator.
pub(crate) fn s_value(port: &mut Port<'_>, eval: &dyn OracleProgram, k: usize) -> Result<BigUint> {
    let out = port.subrun(eval, BinStr::ones(k))?;
    port.tick(out.len() as u64)?;
    decode_nat_big(&out).map_err(|_| Error::ContractViolation(format!("evaluator output {out:?}")))
}

/// For approximation precision n′: N = S(|φ|, |n′|) and
/// M = (S(|φ|, |n′|+1) + 1)(n′+1) + 1.
pub(crate) fn precision_setup(port: &mut Port<'_>, eval: &dyn OracleProgram, np: &BigUint) -> Result<(BigUint, BigUint)> {
    let k = bit_len(np) as usize;
    let big_n = s_value(port, eval, k)?;
    let s1 = s_value(port, eval, k + 1)?;
    let m = (s1 + 1u32) * (np + 1u32) + 1u32;
    port.tick(bit_len(&m))?;
    Ok((big_n, m))
}

pub(crate) fn read_z(port: &mut Port<'_>, i: &BigUint, n: &BigUint, m: &BigUint) -> Result<BigInt> {
    let a = port.query(&coeff_query(i, n, m))?;
    decode_int(&a).map_err(|_| Error::MalformedName(format!("coefficient answer {a:?}")))
}

/// Bounds used by the translations out of ξ for queries of length s:
/// K = |S(|φ|, s+3)| and B = |φ|(Q) for a query length Q that covers
/// every coefficient query made at precisions with |n′| ≤ s+3.
pub(crate) fn xi_pad(port: &mut Port<'_>, eval: &dyn OracleProgram, s: usize) -> Result<(u64, u64)> {
    let k = bit_len(&s_value(port, eval, s + 3)?);
    let m_len = bit_len(&(s_value(port, eval, s + 4)? + 1u32)) + s as u64 + 4;
    let q = 3 * (k.max(s as u64 + 3).max(m_len) + 1) + 1;
    let b = port.query(&BinStr::zeros(q as usize))?.len() as u64;
    Ok((k, b))
}

/// Computes w with |‖x‖ − w/(n+1)| ≤ 1/(n+1) from a ξ-name of x.
///
/// Approximates x at precision 8n+7, then asks the norm oracle at 4n+3
/// and divides by four.
pub struct BanachNorm {
    params: BanachParams,
}

impl BanachNorm {
    pub fn new(params: BanachParams) -> Self {
        BanachNorm { params }
    }
}

impl OracleProgram for BanachNorm {
    fn label(&self) -> String {
        format!("banach norm, S = {}", self.params.s.label())
    }
    fn run(&self, port: &mut Port<'_>) -> Result<()> {
        let input = port.input().clone();
        let n = decode_nat_big(&input).map_err(|_| Error::Parse(format!("precision {input:?}")))?;
        let np = &n * 8u32 + 7u32;
        let (big_n, m) = precision_setup(port, self.params.evaluator().as_ref(), &np)?;
        let count = biguint_to_u64(&big_n)?;
        let mut zs = Vec::new();
        for i in 0..=count {
            zs.push(read_z(port, &BigUint::from(i), &np, &m)?);
        }
        let a = port.query(&norm_query(&zs, &(&n * 4u32 + 3u32), &m))?;
        let w = decode_int(&a).map_err(|_| Error::MalformedName(format!("norm answer {a:?}")))?;
        port.write(&encode_int(&quarter(&w)))
    }
}

pub fn banach_norm(phi: &Name, params: &BanachParams, n: u64) -> Result<BigInt> {
    let out = run_free(&BanachNorm::new(params.clone()), phi, &encode_nat_big(&BigUint::from(n)))?;
    decode_int(&out)
}

/// The sum of two ξ-names, reading the pair ⟨φ(a), ψ(a)⟩ from one oracle.
///
/// Coefficients are taken at precision 4n+3 and 4m+3 and divided by four,
/// truncated at N = S(|φ|, |n|+2) with S(l,n) = 2^{max(l(n),n)}. The result
/// has length max(|φ|,|ψ|)(k+6) + 1.
pub struct VectorSum;

fn pair_parts(v: &BinStr) -> Result<(BinStr, BinStr)> {
    let mut p = untuple(2, v).ok_or_else(|| Error::MalformedName(format!("not a pair: {v:?}")))?;
    let b = p.pop().expect("two parts");
    let a = p.pop().expect("two parts");
    Ok((a, b))
}

impl OracleProgram for VectorSum {
    fn label(&self) -> String {
        "vector sum".into()
    }
    fn run(&self, port: &mut Port<'_>) -> Result<()> {
        let a = port.input().clone();
        match parse_xi_query(&a) {
            XiQuery::Length(k) => {
                let (u, v) = pair_parts(&port.query(&BinStr::zeros(k + 6))?)?;
                port.write(&BinStr::zeros(u.len().max(v.len()) + 1))
            }
            XiQuery::Coeff { i, n, m } => {
                let k = bit_len(&n) as usize + 2;
                let (lu, lv) = pair_parts(&port.query(&BinStr::zeros(k))?)?;
                // i ≤ 2^{max(|φ|(k), k)}
                let within = |len: usize| {
                    let e = len.max(k) as u64;
                    bit_len(&i) <= e || i == BigUint::one() << e
                };
                let (use_u, use_v) = (within(lu.len()), within(lv.len()));
                if !use_u && !use_v {
                    return Ok(());
                }
                let q = coeff_query(&i, &(n * 4u32 + 3u32), &(m * 4u32 + 3u32));
                let (u, v) = pair_parts(&port.query(&q)?)?;
                let read = |x: &BinStr, used: bool| -> Result<BigInt> {
                    if !used {
                        return Ok(BigInt::zero());
                    }
                    decode_int(x).map_err(|_| Error::MalformedName(format!("coefficient answer {x:?}")))
                };
                let z = read(&u, use_u)? + read(&v, use_v)?;
                port.write(&encode_int(&round_half_away(&Q::new(z, BigInt::from(4)))))
            }
            XiQuery::Norm { .. } => {
                let (u, _) = pair_parts(&port.query(&a)?)?;
                port.write(&u)
            }
            XiQuery::Other => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::banach::FaberSchauder;
    use crate::baire::pair_names;
    use crate::machine::{run_with_budget, translate};
    use crate::num::{q, qi};

    fn fs() -> Arc<dyn SchauderSystem> {
        Arc::new(FaberSchauder)
    }

    fn name_of(coeffs: &[Q], l: LengthFn) -> Name {
        let c = coeffs.iter().map(|x| SurdSum::from_q(x.clone())).collect();
        banach_name(fs(), c, l, &RunningTime::exp_max()).unwrap()
    }

    #[test]
    fn query_layout_roundtrips() {
        let (i, n, m) = (BigUint::from(5u32), BigUint::from(3u32), BigUint::from(40u32));
        assert_eq!(parse_xi_query(&coeff_query(&i, &n, &m)), XiQuery::Coeff { i, n: n.clone(), m: m.clone() });
        let zs = vec![BigInt::from(-3), BigInt::zero(), BigInt::from(7)];
        assert_eq!(parse_xi_query(&norm_query(&zs, &n, &m)), XiQuery::Norm { zs, n, m });
        assert_eq!(parse_xi_query(&BinStr::zeros(4)), XiQuery::Length(4));
        assert_eq!(parse_xi_query(&BinStr::lit("1")), XiQuery::Other);
    }

    #[test]
    fn coefficients_and_length() {
        let phi = name_of(&[qi(1), q(1, 3)], LengthFn::affine(1, 6));
        assert_eq!(phi.query(&BinStr::zeros(3)).unwrap().len(), 9);
        let z = xi_coefficient(&phi, &BigUint::one(), &BigUint::from(2u32), &BigUint::from(29u32)).unwrap();
        assert_eq!(z, BigInt::from(10));
        let z = xi_coefficient(&phi, &BigUint::from(7u32), &BigUint::from(2u32), &BigUint::from(29u32)).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn too_many_coefficients_are_rejected() {
        let c = vec![SurdSum::from_q(qi(1)); 200];
        assert!(banach_name(fs(), c, LengthFn::affine(1, 4), &RunningTime::exp_max()).is_err());
    }

    fn within(w: &BigInt, target: &Q, n: u64) -> bool {
        let d = Q::from_integer(w.clone()) / qi(n as i64 + 1) - target;
        num_traits::Signed::abs(&d) <= q(1, n as i64 + 1)
    }

    #[test]
    fn norm_of_unit_vector_and_average() {
        let params = BanachParams::exp_max();
        let e0 = name_of(&[qi(1)], LengthFn::affine(1, 3));
        let half = name_of(&[q(1, 2), q(1, 2)], LengthFn::affine(1, 3));
        for n in [0u64, 1, 3] {
            assert!(within(&banach_norm(&e0, &params, n).unwrap(), &qi(1), n));
            assert!(within(&banach_norm(&half, &params, n).unwrap(), &q(1, 2), n));
        }
    }

    #[test]
    fn norm_program_stays_within_its_bound() {
        let params = BanachParams::exp_max();
        let l = LengthFn::affine(1, 2);
        let phi = name_of(&[qi(1), qi(-1)], l.clone());
        for n in 0u64..3 {
            let input = encode_nat_big(&BigUint::from(n));
            let budget = 8 * params.norm_time(&l, input.len()) + 8;
            let out = run_with_budget(&BanachNorm::new(params.clone()), &phi, &input, budget).unwrap();
            assert!(out.report.steps_used <= budget);
        }
    }

    #[test]
    fn vector_sum_adds_coefficients() {
        let l = LengthFn::affine(1, 6);
        let x = name_of(&[qi(1), q(1, 4)], l.clone());
        let y = name_of(&[q(1, 2), q(-1, 4), qi(1)], l);
        let sum = translate(Arc::new(VectorSum), &pair_names(&x, &y));
        let (n, m) = (BigUint::from(3u32), BigUint::from(1000u32));
        let z = |i: u32| xi_coefficient(&sum, &BigUint::from(i), &n, &m).unwrap();
        assert!(z(0) == BigInt::from(1501) || z(0) == BigInt::from(1502));
        assert_eq!(z(1), BigInt::zero());
        assert_eq!(z(2), BigInt::from(1001));
        assert!(z(9).is_zero());
        // ‖1.5(1−x) + e_2‖ = 1.75, attained at x = 1/2
        let zs = [1501, 0, 1001].map(BigInt::from);
        let w = decode_int(&sum.query(&norm_query(&zs, &BigUint::from(4u32), &m)).unwrap()).unwrap();
        assert!(within(&w, &q(7, 4), 4));
    }

    #[test]
    fn growth_witness_on_tables() {
        let p = BanachParams::exp_max();
        let ls = [LengthFn::affine(1, 1), LengthFn::affine(2, 0), LengthFn::affine(1, 4)];
        assert!(p.growth_witness(&ls, 6));
        assert!(p.step_bound(&LengthFn::affine(1, 1), 2) > 0);
    }
}
