use crate::baire::{pair_names, LengthFn, Name};
use crate::machine::{run_free, OracleProgram, Port, RunningTime};
use crate::entropy::unit_interval_size;
use crate::num::ceil_lb;
use crate::reprs::{numeral_query, quarter, MetricSpace};
use crate::strings::{decode_int, decode_nat, encode_int, encode_nat, trim_numeral, tuple, untuple, BinStr};
use crate::{Error, Result};
use std::sync::Arc;

/// The length ℓ of the representation and the chunk count S.
#[derive(Clone, Debug)]
pub struct CompactParams {
    pub ell: LengthFn,
    pub s: RunningTime,
}

impl CompactParams {
    pub fn new(ell: LengthFn, s: RunningTime) -> Self {
        CompactParams { ell, s }
    }

    /// First n < horizon with ℓ(n)·S(ℓ,n) < size(n) + ⌈lb(n+1)⌉.
    pub fn condition_time_failure(&self, size: &[u32], horizon: usize) -> Option<usize> {
        (0..horizon.min(size.len())).find(|&n| {
            let have = (self.ell.eval(n) as u64).saturating_mul(self.s.eval(&self.ell, n));
            have < u64::from(size[n] + ceil_lb(n as u64 + 1))
        })
    }

    fn chunk_layout(&self, m: usize) -> (usize, u64) {
        (self.ell.eval(m), self.s.eval(&self.ell, m))
    }
}

fn malformed(what: &str, v: &BinStr) -> Error {
    Error::MalformedName(format!("{what}: {v:?}"))
}

fn numerals<const K: usize>(rest: &BinStr) -> Result<Option<[BinStr; K]>> {
    let Some(parts) = untuple(K, rest) else { return Ok(None) };
    for p in &parts {
        if numeral_query(p)?.is_none() {
            return Ok(None);
        }
    }
    Ok(parts.try_into().ok())
}

/// Chunk j of the index: bits [jL, (j+1)L) of its numeral.
fn chunk(index: &BinStr, j: u64, l: usize, s: u64) -> Result<BinStr> {
    let cap = (s as usize + 1).saturating_mul(l);
    if index.len() > cap {
        return Err(Error::ParameterViolation(format!(
            "index of {} bits does not fit into {} chunks of {l} bits",
            index.len(),
            s + 1
        )));
    }
    if j > s {
        return Ok(BinStr::new());
    }
    let from = (j as usize * l).min(index.len());
    Ok(index.slice(from, (from + l).min(index.len())))
}

/// φ(0^k) = 0^{ℓ(k)}; φ(0⟨j,n⟩) is chunk j of the numeral of approx(n), every
/// chunk at most ℓ(|n|) bits long and j = 0..S(ℓ,|n|); φ(1⟨i,j,n⟩) is the
/// distance of r_i and r_j at precision n; other queries give ε.
pub fn compact_name<M: MetricSpace + 'static>(
    space: Arc<M>,
    params: CompactParams,
    label: impl Into<String>,
    approx: impl Fn(u64) -> u64 + Send + Sync + 'static,
) -> Name {
    Name::fallible(label, move |a| {
        if a.is_all(false) {
            return Ok(BinStr::zeros(params.ell.eval(a.len())));
        }
        let (tag, rest) = a.split_first().expect("non-empty");
        if !tag {
            let Some([j, n]) = numerals::<2>(&rest)? else { return Ok(BinStr::new()) };
            let (l, s) = params.chunk_layout(n.len());
            return chunk(&encode_nat(approx(decode_nat(&n)?)), decode_nat(&j)?, l, s);
        }
        let Some([i, k, p]) = numerals::<3>(&rest)? else { return Ok(BinStr::new()) };
        Ok(encode_int(&space.dist(decode_nat(&i)?, decode_nat(&k)?, decode_nat(&p)?)))
    })
}

pub fn compact_name_of<M: MetricSpace + 'static>(space: Arc<M>, params: CompactParams, x: M::Point) -> Name
where
    M::Point: 'static,
{
    let m = space.clone();
    compact_name(space, params, format!("compact {x:?}"), move |n| m.least_index_within(&x, n))
}

fn chunk_query(j: u64, n: &BinStr) -> BinStr {
    tuple(&[encode_nat(j), n.clone()]).prefixed(false)
}

/// The metric on compact names: N = S(|⟨φ,ψ⟩|, |8n+7|) from the evaluator,
/// indices from the chunks at 8n+7, one distance query at 4n+3, then round(v/4).
pub struct CompactMetric {
    s: RunningTime,
    eval: Arc<dyn OracleProgram>,
}

impl CompactMetric {
    pub fn new(s: RunningTime) -> Result<Self> {
        let eval = s.evaluator().cloned().ok_or_else(|| Error::ParameterViolation(format!("{} has no evaluator", s.label())))?;
        Ok(CompactMetric { s, eval })
    }

    /// T(l, n) = (S(l, n+3) + 1)·(l(n+3) + n + 4 + ⌈lb(S(l, n+3) + 1)⌉).
    pub fn bound(&self) -> RunningTime {
        let s = self.s.clone();
        RunningTime::new(format!("(S+1)(l(n+3)+n+4+lb S) for S = {}", s.label()), move |l, n| {
            let big = s.eval(l, n + 3);
            let per = l.eval(n + 3) as u64 + n as u64 + 4 + u64::from(ceil_lb(big.saturating_add(1)));
            big.saturating_add(1).saturating_mul(per)
        })
    }

    /// c·T + c with the constant used throughout the tests.
    pub fn running_time(&self) -> RunningTime {
        self.bound().scaled(COMPACT_C)
    }
}

/// Constant of the compact metric's running time.
pub const COMPACT_C: u64 = 8;

impl OracleProgram for CompactMetric {
    fn label(&self) -> String {
        format!("compact metric, S = {}", self.s.label())
    }

    fn run(&self, port: &mut Port<'_>) -> Result<()> {
        let input = port.input().clone();
        let Some(n) = numeral_query(&input)? else { return Ok(()) };
        port.tick(input.len() as u64 + 3)?;
        let m = encode_nat(8 * n + 7);
        let count = port.subrun(self.eval.as_ref(), BinStr::ones(m.len()))?;
        port.tick(count.len() as u64)?;
        let count = decode_nat(&count).map_err(|_| malformed("chunk count", &count))?;
        let (mut bi, mut bk) = (BinStr::new(), BinStr::new());
        for j in 0..=count {
            let ans = port.query(&chunk_query(j, &m))?;
            port.tick(ans.len() as u64)?;
            let parts = untuple(2, &ans).ok_or_else(|| malformed("not a pair of chunks", &ans))?;
            bi.extend(&parts[0]);
            bk.extend(&parts[1]);
        }
        let q = tuple(&[trim_numeral(&bi), trim_numeral(&bk), encode_nat(4 * n + 3)]).prefixed(true);
        let ans = port.query(&q)?;
        port.tick(ans.len() as u64)?;
        let parts = untuple(2, &ans).ok_or_else(|| malformed("not a pair of distances", &ans))?;
        let v = decode_int(&parts[0]).map_err(|_| malformed("distance", &parts[0]))?;
        port.write(&encode_int(&quarter(&v)))
    }
}

pub fn compact_metric(phi: &Name, psi: &Name, n: u64, params: &CompactParams) -> Result<BinStr> {
    run_free(&CompactMetric::new(params.s.clone())?, &pair_names(phi, psi), &encode_nat(n))
}

/// Translation to the relativized Cauchy representation: 0n ↦ the assembled
/// index, 1⟨k,m,n⟩ forwarded.
pub struct CompactToRelativized {
    eval: Arc<dyn OracleProgram>,
}

pub fn compact_to_relativized(s: &RunningTime) -> Result<Arc<dyn OracleProgram>> {
    let eval = s.evaluator().cloned().ok_or_else(|| Error::ParameterViolation(format!("{} has no evaluator", s.label())))?;
    Ok(Arc::new(CompactToRelativized { eval }))
}

impl OracleProgram for CompactToRelativized {
    fn label(&self) -> String {
        "compact to relativized".into()
    }

    fn run(&self, port: &mut Port<'_>) -> Result<()> {
        let a = port.input().clone();
        let Some((tag, rest)) = a.split_first() else { return Ok(()) };
        if tag {
            let v = port.query(&a)?;
            return port.write(&v);
        }
        if numeral_query(&rest)?.is_none() {
            return Ok(());
        }
        let count = port.subrun(self.eval.as_ref(), BinStr::ones(rest.len()))?;
        let count = decode_nat(&count).map_err(|_| malformed("chunk count", &count))?;
        let mut bits = BinStr::new();
        for j in 0..=count {
            bits.extend(&port.query(&chunk_query(j, &rest))?);
        }
        port.write(&trim_numeral(&bits))
    }
}

/// Translation from the relativized Cauchy representation with the given layout.
pub struct RelativizedToCompact {
    params: CompactParams,
}

pub fn relativized_to_compact(params: CompactParams) -> Arc<dyn OracleProgram> {
    Arc::new(RelativizedToCompact { params })
}

impl OracleProgram for RelativizedToCompact {
    fn label(&self) -> String {
        "relativized to compact".into()
    }

    fn run(&self, port: &mut Port<'_>) -> Result<()> {
        let a = port.input().clone();
        if a.is_all(false) {
            let l = self.params.ell.eval(a.len());
            port.tick(l as u64)?;
            return port.write(&BinStr::zeros(l));
        }
        let (tag, rest) = a.split_first().expect("non-empty");
        if tag {
            let v = port.query(&a)?;
            return port.write(&v);
        }
        let Some([j, n]) = numerals::<2>(&rest)? else { return Ok(()) };
        let (l, s) = self.params.chunk_layout(n.len());
        port.tick(l as u64 + 1)?;
        let index = trim_numeral(&port.query(&n.prefixed(false))?);
        port.write(&chunk(&index, decode_nat(&j)?, l, s)?)
    }
}

/// Measured sizes of [0,1] up to `depth`, continued past it by the last measured increment.
pub fn unit_interval_size_fn(depth: u32) -> impl Fn(usize) -> u32 + Send + Sync + Clone {
    let table: Vec<u32> = (0..=depth.max(1)).map(unit_interval_size).collect();
    move |n| match table.get(n) {
        Some(&v) => v,
        None => {
            let k = table.len() - 1;
            let step = table[k] - table[k - 1];
            table[k] + step * (n - k) as u32
        }
    }
}

/// ℓ(n) = size(n) + ⌈lb(n+1)⌉ and S ≡ 1 on [0,1].
pub fn unit_interval_params() -> CompactParams {
    let size = unit_interval_size_fn(12);
    let ell = LengthFn::from_fn("size(n)+lb(n+1)", move |n| (size(n) + ceil_lb(n as u64 + 1)) as usize);
    CompactParams::new(ell, RunningTime::constant(1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClauseOutcome {
    /// l(n)·S(l,n) > size(n−1): nothing to check.
    Vacuous,
    Holds,
    Fails,
}

/// l(n)·S(l,n) ≤ size(n−1) ⇒ l(n)·S(l,n) ≤ packing_exp + 1, where packing_exp
/// is a measured spanning exponent of ξ(K_l) at n+1.
pub fn lower_bound_clause(l: &LengthFn, s: &RunningTime, size: &[u32], n: usize, packing_exp: u32) -> ClauseOutcome {
    let ls = (l.eval(n) as u64).saturating_mul(s.eval(l, n));
    if n == 0 || ls > u64::from(size[n - 1]) {
        return ClauseOutcome::Vacuous;
    }
    if ls <= u64::from(packing_exp) + 1 {
        ClauseOutcome::Holds
    } else {
        ClauseOutcome::Fails
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baire::{in_kl, length_of, length_table};
    use crate::machine::{metered_run, translate};
    use crate::num::{q, qi, Q};
    use crate::reprs::{relativized_reject, RejectOutcome, UnitInterval};
    use num_bigint::BigInt;
    use num_traits::Signed;

    fn unit_params() -> CompactParams {
        unit_interval_params()
    }

    fn check(d: &Q, out: &BinStr, n: u64) {
        let z = decode_int(out).unwrap();
        assert!((d - Q::new(z, BigInt::from(n + 1))).abs() <= q(1, n as i64 + 1), "d={d} n={n} out={out:?}");
    }

    #[test]
    fn condition_time_holds_for_the_unit_interval() {
        let size: Vec<u32> = (0..12).map(unit_interval_size).collect();
        assert_eq!(unit_params().condition_time_failure(&size, 12), None);
        let tight = CompactParams::new(LengthFn::constant(1), RunningTime::constant(1));
        assert_eq!(tight.condition_time_failure(&size, 12), Some(2));
    }

    #[test]
    fn chunks_recover_indices() {
        let m = Arc::new(UnitInterval);
        let params = CompactParams::new(LengthFn::affine(1, 1), RunningTime::constant(1));
        let phi = compact_name_of(m.clone(), params.clone(), q(1, 2));
        for n in 0..40u64 {
            let nn = encode_nat(n);
            let mut bits = BinStr::new();
            for j in 0..=1 {
                let c = phi.query(&chunk_query(j, &nn)).unwrap();
                assert!(c.len() <= params.ell.eval(nn.len()));
                bits.extend(&c);
            }
            let i = decode_nat(&trim_numeral(&bits)).unwrap();
            assert!((m.point(i) - q(1, 2)).abs() <= q(1, n as i64 + 1));
        }
    }

    #[test]
    fn length_condition_and_class() {
        let m = Arc::new(UnitInterval);
        let p = unit_params();
        for x in [qi(0), q(1, 3), q(5, 8), qi(1)] {
            let phi = compact_name_of(m.clone(), p.clone(), x);
            for n in 0..=8 {
                assert_eq!(phi.query(&BinStr::zeros(n)).unwrap().len(), length_of(&phi, n).unwrap());
            }
            assert!(in_kl(&phi, &p.ell, 10).unwrap());
        }
    }

    #[test]
    fn metric_oracle_branch() {
        let m = Arc::new(UnitInterval);
        let phi = compact_name_of(m.clone(), unit_params(), q(1, 7));
        for (i, j, n) in [(0u64, 1u64, 0u64), (5, 9, 17), (33, 2, 100)] {
            let v = phi.query(&tuple(&[encode_nat(i), encode_nat(j), encode_nat(n)]).prefixed(true)).unwrap();
            check(&(m.point(i) - m.point(j)).abs(), &v, n);
        }
        assert_eq!(phi.query_str("1").unwrap(), BinStr::new());
    }

    #[test]
    fn metric_contract_and_budget() {
        let m = Arc::new(UnitInterval);
        let p = unit_params();
        let prog = CompactMetric::new(p.s.clone()).unwrap();
        let t = prog.running_time();
        let pts = [qi(0), qi(1), q(1, 3), q(3, 16), q(7, 9)];
        for x in &pts {
            for y in &pts {
                let pair = pair_names(&compact_name_of(m.clone(), p.clone(), x.clone()), &compact_name_of(m.clone(), p.clone(), y.clone()));
                let l = LengthFn::table(length_table(&pair, 8).unwrap());
                for n in 0..120 {
                    let r = metered_run(&prog, &pair, &encode_nat(n), &t, &l).unwrap();
                    check(&(x - y).abs(), &r.output, n);
                }
            }
        }
    }

    #[test]
    fn round_trip_through_relativized() {
        let m = Arc::new(UnitInterval);
        let p = unit_params();
        let to_rel = compact_to_relativized(&p.s).unwrap();
        let back = relativized_to_compact(p.clone());
        for x in [q(2, 9), q(15, 16)] {
            let phi = compact_name_of(m.clone(), p.clone(), x.clone());
            let rel = translate(to_rel.clone(), &phi);
            assert_eq!(relativized_reject(&rel, m.as_ref(), 6).unwrap(), RejectOutcome::Undecided);
            let again = translate(back.clone(), &rel);
            for a in BinStr::all_up_to(7) {
                assert_eq!(again.query(&a).unwrap(), phi.query(&a).unwrap(), "{a:?}");
            }
        }
    }

    #[test]
    fn clause_outcomes() {
        let size: Vec<u32> = (0..10).map(unit_interval_size).collect();
        let one = RunningTime::constant(1);
        // strictly increasing l exceeds size(n−1) = n − 2 on the unit interval
        for n in 0..8 {
            assert_eq!(lower_bound_clause(&LengthFn::identity(), &one, &size, n, 0), ClauseOutcome::Vacuous);
        }
        let square: Vec<u32> = size.iter().map(|s| 2 * s).collect();
        assert_eq!(lower_bound_clause(&LengthFn::identity(), &one, &square, 4, 3), ClauseOutcome::Holds);
        assert_eq!(lower_bound_clause(&LengthFn::identity(), &one, &square, 4, 2), ClauseOutcome::Fails);
    }
}
