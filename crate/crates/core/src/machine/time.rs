use super::{run_with_budget, OracleProgram, Port};
use crate::baire::{LengthFn, Name};
use crate::strings::{encode_nat, BinStr};
use crate::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Default constant c of the budget c·S + c used by the constructibility check.
pub const CONSTRUCTIBLE_C: u64 = 8;

pub type TimeFn = dyn Fn(&LengthFn, usize) -> u64 + Send + Sync;

/// A second-order bound (l, n) ↦ T(l, n).
#[derive(Clone)]
pub struct RunningTime {
    label: Arc<str>,
    f: Arc<TimeFn>,
    monotone: bool,
    constructible: bool,
    evaluator: Option<Arc<dyn OracleProgram>>,
}

pub(crate) fn pow2_sat(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        1u64 << k
    }
}

impl RunningTime {
    /// A monotone bound without an evaluator.
    pub fn new(label: impl Into<String>, f: impl Fn(&LengthFn, usize) -> u64 + Send + Sync + 'static) -> Self {
        RunningTime { label: label.into().into(), f: Arc::new(f), monotone: true, constructible: false, evaluator: None }
    }

    pub fn with_monotone(mut self, monotone: bool) -> Self {
        self.monotone = monotone;
        self
    }

    /// Attaches the program computing (φ, a) ↦ T(|φ|, |a|) and flags the bound constructible.
    pub fn with_evaluator(mut self, program: Arc<dyn OracleProgram>, constructible: bool) -> Self {
        self.evaluator = Some(program);
        self.constructible = constructible;
        self
    }

    pub fn eval(&self, l: &LengthFn, n: usize) -> u64 {
        (self.f)(l, n)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn monotone_flag(&self) -> bool {
        self.monotone
    }

    pub fn constructible_flag(&self) -> bool {
        self.constructible
    }

    pub fn evaluator(&self) -> Option<&Arc<dyn OracleProgram>> {
        self.evaluator.as_ref()
    }

    pub fn constant(c: u64) -> Self {
        RunningTime::new(format!("{c}"), move |_, _| c).with_evaluator(Arc::new(ConstEval(c)), true)
    }

    /// (l, n) ↦ n + 1.
    pub fn input_succ() -> Self {
        RunningTime::new("n+1", |_, n| n as u64 + 1).with_evaluator(Arc::new(SuccEval), true)
    }

    /// (l, n) ↦ 2^{max(l(n), n)}; its evaluator reads the length off φ(0^n).
    pub fn exp_max() -> Self {
        RunningTime::new("2^max(l(n),n)", |l, n| pow2_sat(l.eval(n).max(n)))
            .with_evaluator(Arc::new(ExpMaxEval), true)
    }

    /// (l, n) ↦ l(n), evaluated by scanning all queries of length ≤ n.
    pub fn length() -> Self {
        RunningTime::new("l(n)", |l, n| l.eval(n) as u64).with_evaluator(Arc::new(LengthScanEval), false)
    }

    /// (l, n) ↦ c·T(l, n) + c.
    pub fn scaled(&self, c: u64) -> Self {
        let t = self.clone();
        RunningTime {
            label: format!("{c}*({})+{c}", self.label).into(),
            f: Arc::new(move |l, n| c.saturating_mul(t.eval(l, n)).saturating_add(c)),
            monotone: self.monotone,
            constructible: false,
            evaluator: None,
        }
    }

    /// (l, n) ↦ T(l, n + k).
    pub fn shifted(&self, k: usize) -> Self {
        let t = self.clone();
        RunningTime {
            label: format!("({})(n+{k})", self.label).into(),
            f: Arc::new(move |l, n| t.eval(l, n + k)),
            monotone: self.monotone,
            constructible: false,
            evaluator: None,
        }
    }
}

impl fmt::Debug for RunningTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RunningTime({}, monotone={}, constructible={})", self.label, self.monotone, self.constructible)
    }
}

struct ConstEval(u64);

impl OracleProgram for ConstEval {
    fn label(&self) -> String {
        format!("const {}", self.0)
    }
    fn run(&self, port: &mut Port<'_>) -> Result<()> {
        port.write(&encode_nat(self.0))
    }
}

struct SuccEval;

impl OracleProgram for SuccEval {
    fn label(&self) -> String {
        "n+1".into()
    }
    fn run(&self, port: &mut Port<'_>) -> Result<()> {
        let n = port.input().len() as u64;
        // one pass over the input to count it
        port.tick(n)?;
        port.write(&encode_nat(n + 1))
    }
}

struct ExpMaxEval;

impl OracleProgram for ExpMaxEval {
    fn label(&self) -> String {
        "2^max(l(n),n)".into()
    }
    fn run(&self, port: &mut Port<'_>) -> Result<()> {
        let n = port.input().len();
        let a = port.query(&BinStr::zeros(n))?;
        let k = a.len().max(n);
        port.write_bit(true)?;
        port.write(&BinStr::zeros(k))
    }
}

struct LengthScanEval;

impl OracleProgram for LengthScanEval {
    fn label(&self) -> String {
        "l(n) by scan".into()
    }
    fn run(&self, port: &mut Port<'_>) -> Result<()> {
        let n = port.input().len();
        let mut m = 0;
        for a in BinStr::all_up_to(n) {
            m = m.max(port.query(&a)?.len());
        }
        port.write(&encode_nat(m as u64))
    }
}

/// Runs the evaluator of `s` under budget c·S + c on every probe and every
/// input of length ≤ depth. Probes without a declared bound count as failures.
pub fn is_time_constructible_with(s: &RunningTime, probes: &[Name], depth: usize, c: u64) -> bool {
    let Some(eval) = s.evaluator() else { return false };
    for probe in probes {
        let Some(l) = probe.declared_bound() else { return false };
        for a in BinStr::all_up_to(depth) {
            let budget = c.saturating_mul(s.eval(l, a.len())).saturating_add(c);
            match run_with_budget(eval.as_ref(), probe, &a, budget) {
                Ok(_) => {}
                Err(Error::BudgetExhausted(_)) => return false,
                Err(_) => return false,
            }
        }
    }
    true
}

pub fn is_time_constructible(s: &RunningTime, probes: &[Name], depth: usize) -> bool {
    is_time_constructible_with(s, probes, depth, CONSTRUCTIBLE_C)
}

/// Sampled check of monotonicity: whenever l(n) ≤ l′(m) for all n ≤ m ≤ horizon,
/// T(l, n) ≤ T(l′, m) must hold for all n ≤ m ≤ depth. Returns the first
/// violating (sample index pair, n, m).
pub fn check_monotone(
    t: &RunningTime,
    samples: &[LengthFn],
    depth: usize,
    horizon: usize,
) -> Option<(usize, usize, usize, usize)> {
    let tables: Vec<Vec<usize>> = samples.iter().map(|l| l.table_upto(horizon)).collect();
    for (i, l) in samples.iter().enumerate() {
        for (j, l2) in samples.iter().enumerate() {
            let mut run_max = 0;
            let dominated = (0..=horizon).all(|m| {
                run_max = run_max.max(tables[i][m]);
                run_max <= tables[j][m]
            });
            if !dominated {
                continue;
            }
            for m in 0..=depth {
                let right = t.eval(l2, m);
                for n in 0..=m {
                    if t.eval(l, n) > right {
                        return Some((i, j, n, m));
                    }
                }
            }
        }
    }
    None
}
