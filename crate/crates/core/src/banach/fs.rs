//! C([0,1]) with the Faber–Schauder system and the standard representation δ_□.
//!
//! e_0 = 1 − x, e_1 = x and for i ≥ 2 the hat of height 1 and half-width
//! 2^{−⌈lb i⌉} peaked at q_i.
//!
//! A δ_□-name ψ of f answers ⟨0^n, r, 1 0^m⟩ with r ≤ 2^m by ⟨q, 1 0^k⟩ where
//! |f(r·2^{−m}) − q·2^{−k}| ≤ 2^{−n}, and |ψ| is a modulus of continuity of f.

use super::piecewise::PiecewiseFn;
use super::xi::{parse_xi_query, precision_setup, read_z, xi_pad, BanachParams, XiQuery};
use super::{norm_answer, NormKind, SchauderSystem};
use crate::baire::{LengthFn, Name};
use crate::entropy::{max_packing, packing_witness, spanning_exp, PointCloud};
use crate::machine::{OracleProgram, Port, RunningTime};
use crate::num::{abs_q, bit_len, ceil_lb, ceil_lb_q, floor_q, pow2, round_half_away, Interval, Q};
use crate::reprs::q_seq;
use crate::strings::{decode_int, decode_nat_big, encode_int, encode_nat_big, tuple, untuple, BinStr};
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// The separation constant: ‖e_i − e_j‖_∞ ≥ 1 > α for i ≠ j.
pub const FS_ALPHA: (i64, i64) = (1, 2);

#[derive(Clone, Copy, Debug, Default)]
pub struct FaberSchauder;

impl SchauderSystem for FaberSchauder {
    fn label(&self) -> String {
        "Faber-Schauder".into()
    }
    fn norm_kind(&self) -> NormKind {
        NormKind::Sup
    }
    fn norm_enclosure(&self, coeffs: &[Q], _bits: u32) -> Interval {
        Interval::point(fs_partial_sum(coeffs).sup_norm())
    }
}

fn two() -> Q {
    Q::from_integer(2.into())
}

/// max(1 − 2^{⌈lb i⌉}|x − q_i|, 0) for x ∈ [0,1].
pub fn fs_eval(i: u64, x: &Q) -> Q {
    let v = Q::one() - pow2(ceil_lb(i) as i64) * abs_q(&(x - q_seq(i)));
    if v.is_negative() {
        Q::zero()
    } else {
        v
    }
}

/// e_i as a polygon on [0,1].
pub fn fs_basis(i: u64) -> PiecewiseFn {
    let pts = match i {
        0 => vec![(Q::zero(), Q::one()), (Q::one(), Q::zero())],
        1 => vec![(Q::zero(), Q::zero()), (Q::one(), Q::one())],
        _ => {
            let (c, h) = (q_seq(i), pow2(-(ceil_lb(i) as i64)));
            let mut pts = vec![(Q::zero(), Q::zero())];
            for (x, y) in [(&c - &h, Q::zero()), (c.clone(), Q::one()), (&c + &h, Q::zero()), (Q::one(), Q::zero())] {
                if pts.last().map(|p: &(Q, Q)| p.0 < x).unwrap_or(true) {
                    pts.push((x, y));
                }
            }
            pts
        }
    };
    PiecewiseFn::polygon(&pts).expect("increasing nodes")
}

/// λ_0 = f(0), λ_1 = f(1), λ_j = f(q_j) − (f(q_j − 2^{−k}) + f(q_j + 2^{−k}))/2 with k = ⌈lb j⌉.
pub fn fs_coeffs(f: &dyn Fn(&Q) -> Q, up_to: usize) -> Vec<Q> {
    (0..up_to as u64)
        .map(|j| match j {
            0 => f(&Q::zero()),
            1 => f(&Q::one()),
            _ => {
                let (c, h) = (q_seq(j), pow2(-(ceil_lb(j) as i64)));
                f(&c) - (f(&(&c - &h)) + f(&(&c + &h))) / two()
            }
        })
        .collect()
}

pub fn fs_coeffs_of(f: &PiecewiseFn, up_to: usize) -> Vec<Q> {
    fs_coeffs(&|x| f.eval(x), up_to)
}

/// Σ λ_i e_i as a polygon on the grid of the finest level present.
pub fn fs_partial_sum(coeffs: &[Q]) -> PiecewiseFn {
    let top = coeffs.len().saturating_sub(1) as u64;
    let k = ceil_lb(top.max(1));
    let size = 1usize << k;
    let mut v = vec![Q::zero(); size + 1];
    v[0] = coeffs.first().cloned().unwrap_or_default();
    v[size] = coeffs.get(1).cloned().unwrap_or_default();
    for level in 1..=k {
        let step = size >> level;
        for t in 1..=(1usize << (level - 1)) {
            let at = (2 * t - 1) * step;
            let j = (1usize << (level - 1)) + t;
            let own = coeffs.get(j).cloned().unwrap_or_default();
            v[at] = (&v[at - step] + &v[at + step]) / two() + own;
        }
    }
    let den = BigInt::from(size);
    let pts: Vec<(Q, Q)> = v.into_iter().enumerate().map(|(r, y)| (Q::new(BigInt::from(r), den.clone()), y)).collect();
    PiecewiseFn::polygon(&pts).expect("increasing grid")
}

/// The indices i with e_i(x) ≠ 0 possible, up to max_level, with e_i(x).
/// At most one index per level besides e_0 and e_1.
pub fn fs_active(x: &Q, max_level: u64) -> Vec<(BigUint, Q)> {
    let mut out = vec![(BigUint::zero(), Q::one() - x), (BigUint::one(), x.clone())];
    for level in 1..=max_level {
        let scale = BigInt::one() << (level - 1);
        let y = x * Q::from_integer(scale.clone());
        if y.is_integer() || y >= Q::from_integer(scale.clone()) {
            continue;
        }
        let t: BigInt = floor_q(&y) + BigInt::one();
        let j = (&scale + &t).to_biguint().expect("positive index");
        let node = Q::new(&t * 2 - 1, scale << 1);
        let value = Q::one() - pow2(level as i64) * abs_q(&(x - node));
        out.push((j, value));
    }
    out
}

/// Σ λ_i e_i(x), summing only the terms that can be non-zero at x.
pub fn fs_partial_sum_eval(coeffs: &[Q], x: &Q) -> Q {
    let top = coeffs.len().saturating_sub(1) as u64;
    let mut s = Q::zero();
    for (i, e) in fs_active(x, ceil_lb(top.max(1)) as u64) {
        if let Some(c) = i.to_usize().and_then(|i| coeffs.get(i)) {
            s += c * e;
        }
    }
    s
}

/// ‖f − Σ λ_i e_i‖_∞, exact on the merged breakpoint grid.
pub fn sup_error(f: &PiecewiseFn, coeffs: &[Q]) -> Q {
    f.sub(&fs_partial_sum(coeffs)).sup_norm()
}

/// min over i < j ≤ max_index of ‖e_i − e_j‖_∞.
pub fn fs_separation(max_index: u64) -> Q {
    let basis: Vec<PiecewiseFn> = (0..=max_index).map(fs_basis).collect();
    let mut best: Option<Q> = None;
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let d = basis[i].sub(&basis[j]).sup_norm();
            if best.as_ref().map(|b| &d < b).unwrap_or(true) {
                best = Some(d);
            }
        }
    }
    best.unwrap_or_else(Q::zero)
}

/// Least m with sup{|f(x) − f(y)| : |x − y| ≤ 2^{−m}} ≤ 2^{−n}, for a polygon.
pub fn pl_modulus(f: &PiecewiseFn, n: u64) -> u64 {
    let target = pow2(-(n as i64));
    // start from the slope bound, which is exact below the smallest piece
    let lip = f
        .pieces()
        .iter()
        .map(|p| abs_q(&((&p.yb - &p.ya) / (&p.b - &p.a))))
        .max()
        .unwrap_or_else(Q::zero);
    let mut m = 0u64;
    if lip.is_positive() {
        let mut lo = (n as i64 + ceil_lb_q(&lip)).max(0) as u64;
        while lo > 0 && f.oscillation(&pow2(-(lo as i64 - 1))) <= target {
            lo -= 1;
        }
        m = lo;
    }
    while f.oscillation(&pow2(-(m as i64))) > target {
        m += 1;
    }
    m
}

fn cached(desc: String, f: impl Fn(usize) -> usize + Send + Sync + 'static) -> LengthFn {
    let memo: Mutex<HashMap<usize, usize>> = Mutex::new(HashMap::new());
    LengthFn::from_fn(desc, move |n| {
        if let Some(v) = memo.lock().unwrap().get(&n) {
            return *v;
        }
        let v = f(n);
        memo.lock().unwrap().insert(n, v);
        v
    })
}

/// n ↦ pl_modulus(f, n), memoized.
pub fn pl_modulus_fn(f: &PiecewiseFn) -> LengthFn {
    let f = f.clone();
    cached("modulus of a polygon".into(), move |n| pl_modulus(&f, n as u64) as usize)
}

/// Non-decreasing n ↦ max(max_{t≤n} μ(t), n + c).
pub(crate) fn padded_length(mu: &LengthFn, c: usize) -> LengthFn {
    let mu = mu.clone();
    cached(format!("max({}, n+{c})", mu.desc()), move |n| (0..=n).map(|t| mu.eval(t)).max().unwrap_or(0).max(n + c))
}

/// Scales (q0, j0) by 2^t so that max(|q|, j0 + t) = width, returning (q, t).
pub(crate) fn fit(q0: &BigInt, j0: u64, width: u64) -> Result<(BigInt, u64)> {
    let have = bit_len(q0.magnitude()) + u64::from(q0.is_negative());
    let have = have.max(j0);
    if have > width {
        return Err(Error::ContractViolation(format!("value needs {have} symbols, the layout allows {width}")));
    }
    let t = width - have;
    Ok((q0 << t, t))
}

pub fn dsq_query(n: u64, r: &BigUint, m: u64) -> BinStr {
    tuple(&[BinStr::zeros(n as usize), encode_nat_big(r), BinStr::zeros(m as usize).prefixed(true)])
}

/// (n, r, m) when a is a well-formed query with r ≤ 2^m.
pub(crate) fn parse_dsq_query(a: &BinStr) -> Option<(u64, BigUint, u64)> {
    let parts = untuple(3, a)?;
    if !parts[0].is_all(false) {
        return None;
    }
    let r = decode_nat_big(&parts[1]).ok()?;
    let (head, zeros) = parts[2].split_first()?;
    if !head || !zeros.is_all(false) {
        return None;
    }
    let m = zeros.len() as u64;
    (r <= BigUint::one() << m).then_some((parts[0].len() as u64, r, m))
}

fn dsq_answer(q0: &BigInt, n0: u64, width: u64) -> Result<BinStr> {
    let (q, t) = fit(q0, n0 + 1, width)?;
    Ok(tuple(&[encode_int(&q), BinStr::zeros((n0 + t) as usize).prefixed(true)]))
}

fn read_dsq_answer(v: &BinStr) -> Result<Q> {
    let bad = || Error::MalformedName(format!("standard representation answer {v:?}"));
    let parts = untuple(2, v).ok_or_else(bad)?;
    let q = decode_int(&parts[0]).map_err(|_| bad())?;
    let (head, zeros) = parts[1].split_first().ok_or_else(bad)?;
    if !head || !zeros.is_all(false) {
        return Err(bad());
    }
    Ok(Q::new(q, BigInt::one() << zeros.len()))
}

/// The approximation of f(r·2^{−m}) to 2^{−n} read from a δ_□-name.
pub fn dsq_value(psi: &Name, n: u64, r: &BigUint, m: u64) -> Result<Q> {
    read_dsq_answer(&psi.query(&dsq_query(n, r, m))?)
}

/// The δ_□-name of a polygon f on [0,1] with modulus μ. Every answer to a
/// query of length s has length 2(J(s)+1) with J(s) = max(μ(t) for t ≤ s, s + c_f).
pub fn delta_square_name(f: &PiecewiseFn, mu: &LengthFn) -> Name {
    let c = (ceil_lb_q(&(f.sup_norm() + Q::one())).max(0) + 3) as usize;
    let j = padded_length(mu, c);
    let f = f.clone();
    let len = {
        let j = j.clone();
        LengthFn::from_fn(format!("2(J+1), J = {}", j.desc()), move |s| 2 * (j.eval(s) + 1))
    };
    let j2 = j.clone();
    Name::fallible(format!("delta_square({:?})", f.pieces().len()), move |a| {
        let width = j2.eval(a.len()) as u64;
        match parse_dsq_query(a) {
            Some((n, r, m)) => {
                let x = Q::new(BigInt::from(r), BigInt::one() << m);
                let q0 = round_half_away(&(f.eval(&x) * pow2(n as i64)));
                dsq_answer(&q0, n, width)
            }
            None => Ok(BinStr::zeros(2 * (width as usize + 1))),
        }
    })
    .with_bound(len)
}

/// ξ (Faber–Schauder) to δ_□. At x = r·2^{−m} only e_0, e_1 and one hat per
/// level ≤ m are non-zero; those coefficients are read at precision
/// 2^{n+2} − 1 and the exact sum is rounded to 2^{−(n+1)}.
pub struct XiToDsq {
    params: BanachParams,
}

impl OracleProgram for XiToDsq {
    fn label(&self) -> String {
        "xi to delta_square".into()
    }
    fn run(&self, port: &mut Port<'_>) -> Result<()> {
        let a = port.input().clone();
        let s = a.len();
        let eval = self.params.evaluator().clone();
        let (k, b) = xi_pad(port, eval.as_ref(), s)?;
        let width = s as u64 + b + 2 * k + 6;
        let Some((n, r, m)) = parse_dsq_query(&a) else {
            return port.write(&BinStr::zeros(2 * (width as usize + 1)));
        };
        let x = Q::new(BigInt::from(r), BigInt::one() << m);
        let np = (BigUint::one() << (n + 2)) - 1u32;
        let (big_n, big_m) = precision_setup(port, eval.as_ref(), &np)?;
        let den = Q::from_integer(BigInt::from(&big_m + 1u32));
        let mut y = Q::zero();
        for (i, e) in fs_active(&x, m) {
            if i > big_n || e.is_zero() {
                continue;
            }
            let z = read_z(port, &i, &np, &big_m)?;
            y += Q::from_integer(z) / &den * e;
        }
        let q0 = round_half_away(&(y * pow2(n as i64 + 1)));
        port.tick(bit_len(q0.magnitude()))?;
        port.write(&dsq_answer(&q0, n + 1, width)?)
    }
}

pub fn xi_to_dsq(params: &BanachParams) -> Arc<dyn OracleProgram> {
    Arc::new(XiToDsq { params: params.clone() })
}

/// The node, as (r, m) with q_i = r·2^{−m}, and the two neighbours of λ_i.
fn node_of(i: &BigUint) -> (BigUint, u64) {
    if i.is_zero() {
        return (BigUint::zero(), 0);
    }
    if i.is_one() {
        return (BigUint::one(), 0);
    }
    let level = bit_len(&(i - 1u32));
    let t = i - (BigUint::one() << (level - 1));
    (t * 2u32 - 1u32, level)
}

/// δ_□ to ξ (Faber–Schauder), for S(l,n) = 2^{max(l(n),n)}. Coefficients
/// come from dyadic-point values at precision |m| + 2; the norm branch is
/// computed directly.
pub struct DsqToXi;

impl DsqToXi {
    fn value(port: &mut Port<'_>, t: u64, r: &BigUint, m: u64) -> Result<Q> {
        let v = port.query(&dsq_query(t, r, m))?;
        read_dsq_answer(&v)
    }
}

impl OracleProgram for DsqToXi {
    fn label(&self) -> String {
        "delta_square to xi".into()
    }
    fn run(&self, port: &mut Port<'_>) -> Result<()> {
        let a = port.input().clone();
        match parse_xi_query(&a) {
            XiQuery::Length(k) => {
                let l = port.query(&BinStr::zeros(k + 9))?.len();
                port.write(&BinStr::zeros(l + k + 4))
            }
            XiQuery::Coeff { i, m, .. } => {
                let t = bit_len(&m) + 2;
                let (r, level) = node_of(&i);
                let lam = if level == 0 {
                    Self::value(port, t, &r, 0)?
                } else {
                    let c = Self::value(port, t, &r, level)?;
                    let lo = Self::value(port, t, &(&r - 1u32), level)?;
                    let hi = Self::value(port, t, &(&r + 1u32), level)?;
                    c - (lo + hi) / two()
                };
                let z = round_half_away(&(lam * Q::from_integer(BigInt::from(m + 1u32))));
                port.write(&encode_int(&z))
            }
            XiQuery::Norm { zs, n, m } => {
                let den = BigInt::from(m + 1u32);
                let c: Vec<Q> = zs.iter().map(|z| Q::new(z.clone(), den.clone())).collect();
                port.tick(a.len() as u64)?;
                port.write(&encode_int(&norm_answer(&FaberSchauder, &c, &n)))
            }
            XiQuery::Other => Ok(()),
        }
    }
}

pub fn dsq_to_xi() -> Arc<dyn OracleProgram> {
    Arc::new(DsqToXi)
}

/// Outcome of the packing check for the family {2^{−n}e_i : |i| ≤ S}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingCertificate {
    pub n: u64,
    /// S(l, n) for the given l.
    pub s: u64,
    /// C = −⌈lb α⌉ + 1 with α the recorded separation constant.
    pub c: u64,
    /// Index length up to which the family was enumerated.
    pub enumerated_len: u64,
    /// ⌊lb⌋ of the maximal packing of the enumerated family at n + C (exact up
    /// to the exact-mode limit, a greedy witness beyond).
    pub measured_exp: u64,
    /// Every pair i < j with |j| ≤ S has ‖e_i − e_j‖_∞ ≥ 1, since e_i(q_j) = 0
    /// for i > j besides e_0, e_1 which are checked directly.
    pub triangular: bool,
    /// The packing exponent the full family attains when `triangular` holds: S.
    pub certified_exp: u64,
}

/// Packing of 2^{−n}e_i, |i| ≤ S(l,n), at separation 2^{−(n+C)+1}: the
/// family is enumerated for index length ≤ horizon and certified beyond.
pub fn packing_certificate(l: &LengthFn, s: &RunningTime, n: u64, horizon: u64) -> Result<PackingCertificate> {
    let s_val = s.eval(l, n as usize);
    let alpha = Q::new(FS_ALPHA.0.into(), FS_ALPHA.1.into());
    let c = (1 - ceil_lb_q(&alpha)) as u64;
    let len = s_val.min(horizon);
    let count = 1u64 << len;
    let scale = pow2(-(n as i64));
    let basis: Vec<PiecewiseFn> = (0..count).map(|i| fs_basis(i).scale(&scale)).collect();
    let cloud = {
        let ids: Vec<usize> = (0..basis.len()).collect();
        PointCloud::from_points(&ids, |&i, &j| basis[i].sub(&basis[j]).sup_norm())
    };
    // the greedy witness is a lower bound for the maximal packing
    let packed = match max_packing(&cloud, (n + c) as i64) {
        Ok(size) => size,
        Err(Error::SizeExceeded { .. }) => packing_witness(&cloud, (n + c) as i64).len(),
        Err(e) => return Err(e),
    };
    let measured_exp = spanning_exp(packed) as u64;
    // e_j(q_i) = 0 for j > i ≥ 2 and e_j(q_i) = δ_ij among the peaks, so
    // |e_i − e_j|(q_i) = 1 for i ≥ 2; e_0, e_1 against any j ≥ 2 at x = 0, 1.
    let probe = count.min(1 << 10);
    let triangular = (2..probe).all(|i| (i + 1..probe).all(|j| fs_eval(j, &q_seq(i)).is_zero()) && fs_eval(i, &q_seq(i)).is_one())
        && (2..probe).all(|j| fs_eval(j, &Q::zero()).is_zero() && fs_eval(j, &Q::one()).is_zero());
    Ok(PackingCertificate {
        n,
        s: s_val,
        c,
        enumerated_len: len,
        measured_exp,
        triangular,
        certified_exp: if triangular { s_val } else { measured_exp },
    })
}
