//! Step-metered oracle computations.
//!
//! A program talks to its oracle through a [`Port`]. Costs: one step per
//! output symbol, |q| + 1 per query (the symbols plus entering the query
//! state), one per answer symbol read plus one for detecting the end of the
//! answer, plus explicit bookkeeping ticks and one step to halt. Producing the
//! answer is free and so is reading the input.

mod equality;
mod time;

pub use equality::EqualityFromMetric;
pub use time::{
    check_monotone, is_time_constructible, is_time_constructible_with, RunningTime, TimeFn,
    CONSTRUCTIBLE_C,
};

use crate::baire::{LengthFn, Name};
use crate::strings::{encode_nat, tuple, BinStr};
use crate::{Error, Result};
use std::fmt;
use std::sync::Arc;

pub trait OracleProgram: Send + Sync {
    fn label(&self) -> String;
    fn run(&self, port: &mut Port<'_>) -> Result<()>;
}

impl<P: OracleProgram + ?Sized> OracleProgram for Arc<P> {
    fn label(&self) -> String {
        (**self).label()
    }
    fn run(&self, port: &mut Port<'_>) -> Result<()> {
        (**self).run(port)
    }
}

/// Accounting of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeterReport {
    pub steps_used: u64,
    pub budget: u64,
    /// (query, the part of the answer the program actually read)
    pub queries: Vec<(BinStr, BinStr)>,
}

impl MeterReport {
    pub fn to_text(&self) -> String {
        let mut s = format!("steps\tbudget\n{}\t{}\n", self.steps_used, self.budget);
        for (q, a) in &self.queries {
            s.push_str(&format!("Q\t{q}\t{a}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let err = |m: &str| Error::Parse(format!("meter report: {m}"));
        let mut lines = text.lines();
        if lines.next() != Some("steps\tbudget") {
            return Err(err("missing header"));
        }
        let (steps, budget) = lines
            .next()
            .and_then(|l| l.split_once('\t'))
            .ok_or_else(|| err("missing totals"))?;
        let steps_used = steps.parse().map_err(|_| err("bad step count"))?;
        let budget = budget.parse().map_err(|_| err("bad budget"))?;
        let mut queries = Vec::new();
        for l in lines {
            let mut f = l.split('\t');
            match (f.next(), f.next(), f.next(), f.next()) {
                (Some("Q"), Some(q), Some(a), None) => queries.push((q.parse()?, a.parse()?)),
                _ => return Err(err("bad query line")),
            }
        }
        Ok(MeterReport { steps_used, budget, queries })
    }
}

/// Query count and the answers truncated to the run's budget.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dialog {
    pub truncation: u64,
    pub answers: Vec<BinStr>,
}

impl Dialog {
    pub fn query_count(&self) -> usize {
        self.answers.len()
    }

    /// ⟨N, ⟨b_1, …, b_N⟩⟩.
    pub fn encode(&self) -> BinStr {
        tuple(&[encode_nat(self.answers.len() as u64), tuple(&self.answers)])
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("queries\ttruncation\n{}\t{}\n", self.answers.len(), self.truncation);
        for a in &self.answers {
            s.push_str(&format!("A\t{a}\n"));
        }
        s
    }
}

/// 2(T(T+1) + 1), saturating.
pub fn dialog_length_bound(t: u64) -> u64 {
    t.saturating_mul(t.saturating_add(1)).saturating_add(1).saturating_mul(2)
}

pub struct Port<'a> {
    oracle: &'a Name,
    input: BinStr,
    output: BinStr,
    steps: u64,
    budget: u64,
    read_log: Vec<(BinStr, BinStr)>,
    dialog: Vec<BinStr>,
}

impl<'a> Port<'a> {
    fn new(oracle: &'a Name, input: BinStr, budget: u64) -> Self {
        Port {
            oracle,
            input,
            output: BinStr::new(),
            steps: 0,
            budget,
            read_log: Vec::new(),
            dialog: Vec::new(),
        }
    }

    fn report(&self) -> MeterReport {
        MeterReport { steps_used: self.steps, budget: self.budget, queries: self.read_log.clone() }
    }

    fn charge(&mut self, k: u64) -> Result<()> {
        self.steps = self.steps.saturating_add(k);
        if self.steps > self.budget {
            return Err(Error::BudgetExhausted(Box::new(self.report())));
        }
        Ok(())
    }

    pub fn input(&self) -> &BinStr {
        &self.input
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn remaining(&self) -> u64 {
        self.budget - self.steps
    }

    /// Internal bookkeeping.
    pub fn tick(&mut self, k: u64) -> Result<()> {
        self.charge(k)
    }

    pub fn write(&mut self, s: &BinStr) -> Result<()> {
        self.charge(s.len() as u64)?;
        self.output.extend(s);
        Ok(())
    }

    pub fn write_bit(&mut self, b: bool) -> Result<()> {
        self.charge(1)?;
        self.output.push(b);
        Ok(())
    }

    fn ask(&mut self, q: &BinStr) -> Result<BinStr> {
        self.charge(q.len() as u64 + 1)?;
        let a = self.oracle.query(q)?;
        self.dialog.push(a.prefix(self.budget.min(usize::MAX as u64) as usize));
        self.read_log.push((q.clone(), BinStr::new()));
        Ok(a)
    }

    fn note_read(&mut self, r: &BinStr) {
        if let Some(last) = self.read_log.last_mut() {
            last.1 = r.clone();
        }
    }

    /// Writes q, then reads the whole answer.
    pub fn query(&mut self, q: &BinStr) -> Result<BinStr> {
        let a = self.ask(q)?;
        // reading stops one step after the last symbol
        let charge = a.len() as u64 + 1;
        if self.steps.saturating_add(charge) > self.budget {
            let avail = (self.budget - self.steps) as usize;
            self.note_read(&a.prefix(avail));
            return self.charge(charge).map(|_| unreachable!());
        }
        self.charge(charge)?;
        self.note_read(&a);
        Ok(a)
    }

    /// Writes q, then reads at most k symbols of the answer.
    pub fn query_prefix(&mut self, q: &BinStr, k: usize) -> Result<BinStr> {
        let a = self.ask(q)?;
        let r = a.prefix(k);
        let charge = r.len() as u64 + u64::from(r.len() < k);
        if self.steps.saturating_add(charge) > self.budget {
            let avail = (self.budget - self.steps) as usize;
            self.note_read(&r.prefix(avail));
            return self.charge(charge).map(|_| unreachable!());
        }
        self.charge(charge)?;
        self.note_read(&r);
        Ok(r)
    }

    /// Runs another program on the same oracle and meter with a different input.
    pub fn subrun(&mut self, program: &dyn OracleProgram, input: BinStr) -> Result<BinStr> {
        let saved_in = std::mem::replace(&mut self.input, input);
        let saved_out = std::mem::take(&mut self.output);
        let r = program.run(self);
        self.input = saved_in;
        let out = std::mem::replace(&mut self.output, saved_out);
        r.map(|_| out)
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub output: BinStr,
    pub report: MeterReport,
    pub dialog: Dialog,
}

/// Runs with the explicit budget.
pub fn run_with_budget(program: &dyn OracleProgram, oracle: &Name, input: &BinStr, budget: u64) -> Result<RunOutcome> {
    let mut port = Port::new(oracle, input.clone(), budget);
    program.run(&mut port)?;
    port.charge(1)?;
    let dialog = Dialog { truncation: budget, answers: std::mem::take(&mut port.dialog) };
    Ok(RunOutcome { report: port.report(), output: port.output, dialog })
}

/// Runs with budget T(l, |a|), where l is a certified bound on |φ|.
pub fn metered_run(
    program: &dyn OracleProgram,
    oracle: &Name,
    input: &BinStr,
    time: &RunningTime,
    l: &LengthFn,
) -> Result<RunOutcome> {
    run_with_budget(program, oracle, input, time.eval(l, input.len()))
}

/// Runs without a budget, for computing values.
/// The name a ↦ program(oracle, a), computed without a budget.
pub fn translate(program: Arc<dyn OracleProgram>, oracle: &Name) -> Name {
    let oracle = oracle.clone();
    Name::fallible(format!("{} of {}", program.label(), oracle.label()), move |a| run_free(program.as_ref(), &oracle, a))
}

pub fn run_free(program: &dyn OracleProgram, oracle: &Name, input: &BinStr) -> Result<BinStr> {
    let mut port = Port::new(oracle, input.clone(), u64::MAX);
    program.run(&mut port)?;
    Ok(port.output)
}

/// A program given by a closure.
pub struct FnProgram<F> {
    label: String,
    f: F,
}

impl<F: Fn(&mut Port<'_>) -> Result<()> + Send + Sync> FnProgram<F> {
    pub fn new(label: impl Into<String>, f: F) -> Self {
        FnProgram { label: label.into(), f }
    }
}

impl<F: Fn(&mut Port<'_>) -> Result<()> + Send + Sync> OracleProgram for FnProgram<F> {
    fn label(&self) -> String {
        self.label.clone()
    }
    fn run(&self, port: &mut Port<'_>) -> Result<()> {
        (self.f)(port)
    }
}

impl<F> fmt::Debug for FnProgram<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnProgram({})", self.label)
    }
}
