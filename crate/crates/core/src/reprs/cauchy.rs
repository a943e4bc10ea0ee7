use super::space::MetricSpace;
use crate::baire::{pair_names, Name};
use crate::machine::{run_free, OracleProgram, Port, RunningTime};
use crate::num::{q, round_half_away, Q};
use crate::strings::{decode_int, decode_nat, encode_int, encode_nat, is_nat_encoding, tuple, untuple, BinStr};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::Signed;
use std::sync::Arc;

pub(crate) fn numeral_query(a: &BinStr) -> Result<Option<u64>> {
    if is_nat_encoding(a) {
        decode_nat(a).map(Some)
    } else {
        Ok(None)
    }
}

fn malformed(what: &str, v: &BinStr) -> Error {
    Error::MalformedName(format!("{what}: {v:?}"))
}

pub(crate) fn read_index(v: &BinStr) -> Result<u64> {
    decode_nat(v).map_err(|_| malformed("not an index", v))
}

/// round(v/4), the shift from precision 4n+3 down to n.
pub(crate) fn quarter(v: &BigInt) -> BigInt {
    round_half_away(&Q::new(v.clone(), BigInt::from(4)))
}

/// φ(n) = approx(n) as a binary numeral; other queries give ε.
pub fn cauchy_name(label: impl Into<String>, approx: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Name {
    Name::fallible(label, move |a| Ok(numeral_query(a)?.map(|n| encode_nat(approx(n))).unwrap_or_default()))
}

/// The Cauchy name of x choosing the least admissible index.
pub fn cauchy_name_of<M: MetricSpace + 'static>(m: Arc<M>, x: M::Point) -> Name
where
    M::Point: 'static,
{
    let label = format!("cauchy {x:?}");
    cauchy_name(label, move |n| m.least_index_within(&x, n))
}

/// The metric on Cauchy names. On input n it reads i = φ(8n+7) and
/// j = ψ(8n+7) from the paired oracle, evaluates the discrete metric at
/// precision 4n+3 and halves twice.
pub struct CauchyMetric<M> {
    space: Arc<M>,
}

impl<M: MetricSpace> CauchyMetric<M> {
    pub fn new(space: Arc<M>) -> Self {
        CauchyMetric { space }
    }

    /// T(l, n) = t(l(n+3), n+1) with t(a, b) = 8(a + b).
    pub fn running_time() -> RunningTime {
        RunningTime::new("8(l(n+3)+n+1)", |l, n| 8 * (l.eval(n + 3) as u64 + n as u64 + 1))
    }
}

impl<M: MetricSpace> OracleProgram for CauchyMetric<M> {
    fn label(&self) -> String {
        format!("cauchy metric on {}", self.space.label())
    }

    fn run(&self, port: &mut Port<'_>) -> Result<()> {
        let input = port.input().clone();
        let Some(n) = numeral_query(&input)? else { return Ok(()) };
        let big = n.checked_mul(8).and_then(|v| v.checked_add(7)).ok_or(Error::Overflow {
            value: format!("8*{n}+7"),
            target: "u64",
        })?;
        port.tick(input.len() as u64 + 3)?;
        let ans = port.query(&encode_nat(big))?;
        port.tick(ans.len() as u64)?;
        let parts = untuple(2, &ans).ok_or_else(|| malformed("not a pair of indices", &ans))?;
        let (i, j) = (read_index(&parts[0])?, read_index(&parts[1])?);
        let p = 4 * n + 3;
        port.tick(self.space.dist_cost(i, j, p))?;
        let v = self.space.dist(i, j, p);
        let w = quarter(&v);
        port.tick(v.bits() + 1)?;
        port.write(&encode_int(&w))
    }
}

/// The metric value of two Cauchy names at index n, computed without a budget.
pub fn cauchy_metric<M: MetricSpace>(phi: &Name, psi: &Name, n: u64, m: Arc<M>) -> Result<BinStr> {
    run_free(&CauchyMetric::new(m), &pair_names(phi, psi), &encode_nat(n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejectOutcome {
    /// d(r_φ(i), r_φ(j)) > 1/(i+1) + 1/(j+1), certified.
    Rejected { i: u64, j: u64 },
    /// φ(i) is not a natural number.
    Malformed { i: u64 },
    Undecided,
}

/// Semi-decision of non-membership in the domain of the Cauchy representation.
/// Stage s compares all i < j ≤ s at precision 2^s − 1; `budget` stages are run.
pub fn co_re_reject<M: MetricSpace>(phi: &Name, m: &M, budget: u64) -> Result<RejectOutcome> {
    let mut idx: Vec<u64> = Vec::new();
    for s in 0..budget.min(62) {
        match read_index(&phi.query(&encode_nat(s))?) {
            Ok(v) => idx.push(v),
            Err(_) => return Ok(RejectOutcome::Malformed { i: s }),
        }
        let p = (1u64 << s) - 1;
        let p1 = BigInt::from(p + 1);
        for i in 0..=s {
            for j in i + 1..=s {
                let v = m.dist(idx[i as usize], idx[j as usize], p);
                let lower = Q::new(v - 1, p1.clone());
                if lower > q(1, i as i64 + 1) + q(1, j as i64 + 1) {
                    return Ok(RejectOutcome::Rejected { i, j });
                }
            }
        }
    }
    Ok(RejectOutcome::Undecided)
}

/// φ(0n) = index of a 1/(n+1)-approximation, φ(1⟨k,m,n⟩) = d̃(k,m) at
/// precision n; other queries give ε.
pub fn relativized_name<M: MetricSpace + 'static>(
    space: Arc<M>,
    label: impl Into<String>,
    approx: impl Fn(u64) -> u64 + Send + Sync + 'static,
) -> Name {
    Name::fallible(label, move |a| {
        let Some((tag, rest)) = a.split_first() else { return Ok(BinStr::new()) };
        if !tag {
            return Ok(numeral_query(&rest)?.map(|n| encode_nat(approx(n))).unwrap_or_default());
        }
        let Some(parts) = untuple(3, &rest) else { return Ok(BinStr::new()) };
        let mut v = [0u64; 3];
        for (slot, p) in v.iter_mut().zip(&parts) {
            match numeral_query(p)? {
                Some(x) => *slot = x,
                None => return Ok(BinStr::new()),
            }
        }
        Ok(encode_int(&space.dist(v[0], v[1], v[2])))
    })
}

pub fn relativized_name_of<M: MetricSpace + 'static>(space: Arc<M>, x: M::Point) -> Name
where
    M::Point: 'static,
{
    let m2 = space.clone();
    relativized_name(space, format!("relativized {x:?}"), move |n| m2.least_index_within(&x, n))
}

/// The query 1⟨k,m,n⟩.
pub fn dist_query(k: u64, m: u64, n: u64) -> BinStr {
    tuple(&[encode_nat(k), encode_nat(m), encode_nat(n)]).prefixed(true)
}

/// The query 0n.
pub fn index_query(n: u64) -> BinStr {
    encode_nat(n).prefixed(false)
}

/// The metric on relativized names: indices at 8n+7, then one oracle
/// query for the distance at precision 4n+3.
pub struct RelativizedMetric;

impl RelativizedMetric {
    /// C·max(l(n+4), n+1) + C with C = 32, valid for spaces whose distance
    /// answers have length |precision| + O(1).
    pub fn running_time() -> RunningTime {
        RunningTime::new("32max(l(n+4),n+1)+32", |l, n| 32 * (l.eval(n + 4).max(n + 1) as u64) + 32)
    }
}

impl OracleProgram for RelativizedMetric {
    fn label(&self) -> String {
        "relativized metric".into()
    }

    fn run(&self, port: &mut Port<'_>) -> Result<()> {
        let input = port.input().clone();
        let Some(n) = numeral_query(&input)? else { return Ok(()) };
        port.tick(input.len() as u64 + 3)?;
        let ans = port.query(&index_query(8 * n + 7))?;
        port.tick(ans.len() as u64)?;
        let parts = untuple(2, &ans).ok_or_else(|| malformed("not a pair of indices", &ans))?;
        if !is_nat_encoding(&parts[0]) || !is_nat_encoding(&parts[1]) {
            return Err(malformed("not an index", &ans));
        }
        let query = tuple(&[parts[0].clone(), parts[1].clone(), encode_nat(4 * n + 3)]).prefixed(true);
        let dv = port.query(&query)?;
        port.tick(dv.len() as u64)?;
        let dv = untuple(2, &dv).ok_or_else(|| malformed("not a pair of distances", &dv))?;
        let v = decode_int(&dv[0]).map_err(|_| malformed("distance not an integer", &dv[0]))?;
        port.tick(dv[0].len() as u64 + 1)?;
        port.write(&encode_int(&quarter(&v)))
    }
}

/// Semi-decision for relativized names: the index branch as for Cauchy names,
/// dovetailed with exact checks of the distance branch for k, m, n < budget.
pub fn relativized_reject<M: MetricSpace>(phi: &Name, space: &M, budget: u64) -> Result<RejectOutcome> {
    let index_part = Name::fallible("index branch", {
        let phi = phi.clone();
        move |a| phi.query(&a.prefixed(false))
    });
    let r = co_re_reject(&index_part, space, budget)?;
    if r != RejectOutcome::Undecided {
        return Ok(r);
    }
    for k in 0..budget {
        for m in 0..budget {
            for n in 0..budget {
                let v = phi.query(&dist_query(k, m, n))?;
                let Ok(z) = decode_int(&v) else { return Ok(RejectOutcome::Malformed { i: k }) };
                let d = space.d(&space.point(k), &space.point(m));
                if (d - Q::new(z, BigInt::from(n + 1))).abs() > q(1, n as i64 + 1) {
                    return Ok(RejectOutcome::Rejected { i: k, j: m });
                }
            }
        }
    }
    Ok(RejectOutcome::Undecided)
}
