//! Names as memoized string functions, length functions, the sets K_l and padding.

use crate::strings::{double_digits, tuple, untuple, BinStr};
use crate::{Error, Result};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

/// Default bound on the query length of exhaustive scans.
pub const SCAN_CUTOFF: usize = 20;

/// Levels up to this query length are kept in the memo during scans.
const SCAN_MEMO_LEVEL: usize = 12;

type LenFnInner = dyn Fn(usize) -> usize + Send + Sync;

/// A map ω → ω, used for lengths |φ| and their bounds l.
#[derive(Clone)]
pub struct LengthFn {
    f: Arc<LenFnInner>,
    desc: Arc<str>,
}

impl LengthFn {
    pub fn from_fn(desc: impl Into<String>, f: impl Fn(usize) -> usize + Send + Sync + 'static) -> Self {
        LengthFn { f: Arc::new(f), desc: desc.into().into() }
    }

    pub fn constant(c: usize) -> Self {
        LengthFn::from_fn(format!("{c}"), move |_| c)
    }

    pub fn identity() -> Self {
        LengthFn::from_fn("n", |n| n)
    }

    /// n ↦ a·n + b.
    pub fn affine(a: usize, b: usize) -> Self {
        LengthFn::from_fn(format!("{a}n+{b}"), move |n| a.saturating_mul(n).saturating_add(b))
    }

    /// Tabulated values; the last entry is repeated beyond the table.
    pub fn table(values: Vec<usize>) -> Self {
        assert!(!values.is_empty(), "empty length table");
        let desc = format!("table{values:?}");
        LengthFn::from_fn(desc, move |n| values[n.min(values.len() - 1)])
    }

    /// n ↦ self(n + k).
    pub fn shift(&self, k: usize) -> Self {
        let f = self.clone();
        LengthFn::from_fn(format!("({})(n+{k})", self.desc), move |n| f.eval(n + k))
    }

    pub fn max(&self, other: &LengthFn) -> Self {
        let (f, g) = (self.clone(), other.clone());
        LengthFn::from_fn(format!("max({},{})", self.desc, other.desc), move |n| f.eval(n).max(g.eval(n)))
    }

    /// Length of paired values: 2·(max(f, g) + 1).
    pub fn pair_len(&self, other: &LengthFn) -> Self {
        let (f, g) = (self.clone(), other.clone());
        LengthFn::from_fn(format!("pair({},{})", self.desc, other.desc), move |n| {
            2 * (f.eval(n).max(g.eval(n)) + 1)
        })
    }

    pub fn eval(&self, n: usize) -> usize {
        (self.f)(n)
    }

    pub fn desc(&self) -> &str {
        &self.desc
    }

    pub fn table_upto(&self, depth: usize) -> Vec<usize> {
        (0..=depth).map(|n| self.eval(n)).collect()
    }

    /// True when self(n) ≤ other(n) for all n ≤ depth.
    pub fn le_upto(&self, other: &LengthFn, depth: usize) -> bool {
        (0..=depth).all(|n| self.eval(n) <= other.eval(n))
    }

    pub fn is_nondecreasing_upto(&self, depth: usize) -> bool {
        (1..=depth).all(|n| self.eval(n - 1) <= self.eval(n))
    }
}

impl fmt::Debug for LengthFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LengthFn({})", self.desc)
    }
}

type EvalFn = dyn Fn(&BinStr) -> Result<BinStr> + Send + Sync;

struct NameInner {
    eval: Arc<EvalFn>,
    bound: Option<LengthFn>,
    memo: RwLock<HashMap<BinStr, BinStr>>,
    // levels[k] = (min, max) of |φ(a)| over |a| = k
    levels: RwLock<Vec<(usize, usize)>>,
    label: Arc<str>,
}

/// A point of Baire space, queried on demand.
#[derive(Clone)]
pub struct Name(Arc<NameInner>);

impl Name {
    fn build(label: Arc<str>, eval: Arc<EvalFn>, bound: Option<LengthFn>) -> Self {
        Name(Arc::new(NameInner {
            eval,
            bound,
            memo: RwLock::new(HashMap::new()),
            levels: RwLock::new(Vec::new()),
            label,
        }))
    }

    pub fn new(label: impl Into<String>, f: impl Fn(&BinStr) -> BinStr + Send + Sync + 'static) -> Self {
        Name::build(label.into().into(), Arc::new(move |a: &BinStr| Ok(f(a))), None)
    }

    /// A name whose evaluation may fail, e.g. one derived from a partial source.
    pub fn fallible(
        label: impl Into<String>,
        f: impl Fn(&BinStr) -> Result<BinStr> + Send + Sync + 'static,
    ) -> Self {
        Name::build(label.into().into(), Arc::new(f), None)
    }

    /// The same function with a declared length bound, checked on every query.
    pub fn with_bound(&self, bound: LengthFn) -> Self {
        Name::build(self.0.label.clone(), self.0.eval.clone(), Some(bound))
    }

    pub fn constant(value: BinStr) -> Self {
        let len = value.len();
        Name::new(format!("const {value}"), move |_| value.clone()).with_bound(LengthFn::constant(len))
    }

    pub fn identity() -> Self {
        Name::new("id", |a| a.clone()).with_bound(LengthFn::identity())
    }

    pub fn label(&self) -> &str {
        &self.0.label
    }

    pub fn declared_bound(&self) -> Option<&LengthFn> {
        self.0.bound.as_ref()
    }

    fn check(&self, a: &BinStr, v: &BinStr) -> Result<()> {
        if let Some(b) = &self.0.bound {
            let bound = b.eval(a.len());
            if v.len() > bound {
                return Err(Error::BoundViolation { query: a.clone(), len: v.len(), bound });
            }
        }
        Ok(())
    }

    pub fn query(&self, a: &BinStr) -> Result<BinStr> {
        if let Some(v) = self.0.memo.read().unwrap().get(a) {
            return Ok(v.clone());
        }
        let v = (self.0.eval)(a)?;
        self.check(a, &v)?;
        // a concurrent writer may have won; both computed the same value
        self.0.memo.write().unwrap().entry(a.clone()).or_insert_with(|| v.clone());
        Ok(v)
    }

    /// Evaluates without growing the memo (used by exponential scans).
    fn peek(&self, a: &BinStr) -> Result<BinStr> {
        if let Some(v) = self.0.memo.read().unwrap().get(a) {
            return Ok(v.clone());
        }
        let v = (self.0.eval)(a)?;
        self.check(a, &v)?;
        Ok(v)
    }

    pub fn query_str(&self, a: &str) -> Result<BinStr> {
        self.query(&BinStr::lit(a))
    }

    pub fn memo_size(&self) -> usize {
        self.0.memo.read().unwrap().len()
    }

    fn level_stats(&self, k: usize) -> Result<(usize, usize)> {
        if let Some(s) = self.0.levels.read().unwrap().get(k) {
            return Ok(*s);
        }
        let have = self.0.levels.read().unwrap().len();
        for level in have..=k {
            let mut lo = usize::MAX;
            let mut hi = 0;
            for a in BinStr::all_of_len(level) {
                let v = if level <= SCAN_MEMO_LEVEL { self.query(&a)? } else { self.peek(&a)? };
                lo = lo.min(v.len());
                hi = hi.max(v.len());
            }
            let mut levels = self.0.levels.write().unwrap();
            if levels.len() == level {
                levels.push((lo, hi));
            }
        }
        Ok(self.0.levels.read().unwrap()[k])
    }

    /// Renders the answers to the given queries in the trace format.
    pub fn to_trace<'a>(&self, queries: impl IntoIterator<Item = &'a BinStr>) -> Result<String> {
        let mut out = String::new();
        for q in queries {
            let v = self.query(q)?;
            out.push_str(&format!("{q}\t{v}\n"));
        }
        Ok(out)
    }

    /// A name replaying a "query<TAB>answer" table; unlisted queries are errors.
    pub fn from_trace(text: &str) -> Result<Self> {
        let table = parse_trace(text)?;
        Ok(Name::fallible("trace", move |a| table.get(a).cloned().ok_or_else(|| Error::TraceMiss(a.clone()))))
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Name({})", self.0.label)
    }
}

pub fn parse_trace(text: &str) -> Result<HashMap<BinStr, BinStr>> {
    let mut table = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (q, a) = line
            .split_once('\t')
            .ok_or_else(|| Error::Parse(format!("trace line {}: expected query<TAB>answer", lineno + 1)))?;
        let q: BinStr = q.parse()?;
        let a: BinStr = a.parse()?;
        if let Some(prev) = table.insert(q.clone(), a.clone()) {
            if prev != a {
                return Err(Error::Parse(format!("trace line {}: conflicting answers for {q:?}", lineno + 1)));
            }
        }
    }
    Ok(table)
}

/// ⟨φ,ψ⟩(a) = ⟨φ(a),ψ(a)⟩.
pub fn pair_names(phi: &Name, psi: &Name) -> Name {
    let (f, g) = (phi.clone(), psi.clone());
    let n = Name::fallible(format!("<{},{}>", phi.label(), psi.label()), move |a| {
        Ok(tuple(&[f.query(a)?, g.query(a)?]))
    });
    match (phi.declared_bound(), psi.declared_bound()) {
        (Some(l), Some(m)) => n.with_bound(l.pair_len(m)),
        _ => n,
    }
}

/// The two components of a paired name; values outside the pair image are errors.
pub fn unpair(chi: &Name) -> (Name, Name) {
    let side = |i: usize| {
        let c = chi.clone();
        Name::fallible(format!("{}.{}", chi.label(), i + 1), move |a| {
            let v = c.query(a)?;
            untuple(2, &v).map(|mut p| p.swap_remove(i)).ok_or_else(|| Error::NotAPair(a.clone()))
        })
    };
    (side(0), side(1))
}

/// |φ|(n) = max{|φ(a)| : |a| ≤ n}, by exhaustive scan up to the given cutoff.
pub fn length_of_with_cutoff(phi: &Name, n: usize, cutoff: usize) -> Result<usize> {
    if n > cutoff {
        return Err(Error::CutoffExceeded { depth: n, cutoff });
    }
    let mut m = 0;
    for k in 0..=n {
        m = m.max(phi.level_stats(k)?.1);
    }
    Ok(m)
}

pub fn length_of(phi: &Name, n: usize) -> Result<usize> {
    length_of_with_cutoff(phi, n, SCAN_CUTOFF)
}

/// The scanned length function as a table up to depth.
pub fn length_table(phi: &Name, depth: usize) -> Result<Vec<usize>> {
    (0..=depth).map(|n| length_of(phi, n)).collect()
}

/// Finite-depth check of |φ| ≤ l.
pub fn in_kl(phi: &Name, l: &LengthFn, depth: usize) -> Result<bool> {
    for n in 0..=depth {
        if length_of(phi, n)? > l.eval(n) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// |a| ≤ |b| ⇒ |φ(a)| ≤ |φ(b)| for all |a|, |b| ≤ depth.
pub fn is_length_monotone(phi: &Name, depth: usize) -> Result<bool> {
    if depth > SCAN_CUTOFF {
        return Err(Error::CutoffExceeded { depth, cutoff: SCAN_CUTOFF });
    }
    let mut prev_max = 0;
    for k in 0..=depth {
        let (lo, hi) = phi.level_stats(k)?;
        if lo != hi || lo < prev_max {
            return Ok(false);
        }
        prev_max = hi;
    }
    Ok(true)
}

/// pad(φ)(a) = ~φ(a)·0^{2·max(m(|a|) − |φ(a)|, 0)}.
pub fn pad(phi: &Name, m: &LengthFn) -> Name {
    let (f, m2) = (phi.clone(), m.clone());
    let n = Name::fallible(format!("pad({})", phi.label()), move |a| {
        let v = f.query(a)?;
        let mut out = double_digits(&v);
        let fill = m2.eval(a.len()).saturating_sub(v.len());
        out.extend(&BinStr::zeros(2 * fill));
        Ok(out)
    });
    let bound = match phi.declared_bound() {
        Some(b) => b.max(m),
        None => m.clone(),
    };
    let b2 = bound.clone();
    n.with_bound(LengthFn::from_fn(format!("2*{}", bound.desc()), move |k| 2 * b2.eval(k)))
}

/// Inverse of the padding on a single value.
pub fn unpad_value(query: &BinStr, v: &BinStr) -> Result<BinStr> {
    let bad = || Error::MalformedPadding { query: query.clone(), value: v.clone() };
    if v.len() % 2 != 0 {
        return Err(bad());
    }
    let bits = v.bits();
    let mut end = bits.len();
    while end >= 2 && !bits[end - 2] && !bits[end - 1] {
        end -= 2;
    }
    let mut out = Vec::with_capacity(end / 2);
    for pair in bits[..end].chunks(2) {
        if !pair[1] {
            return Err(bad());
        }
        out.push(pair[0]);
    }
    Ok(BinStr::from_bits(out))
}

pub fn unpad(psi: &Name) -> Name {
    let f = psi.clone();
    Name::fallible(format!("unpad({})", psi.label()), move |a| unpad_value(a, &f.query(a)?))
}
