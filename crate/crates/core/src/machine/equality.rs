use super::{OracleProgram, Port, RunningTime};
use crate::strings::{decode_int, BinStr};
use crate::Result;
use num_bigint::BigInt;
use std::sync::Arc;

/// Approximates equality from a metric program: on input 1^n, runs the metric
/// at index 2^{n+2} − 1 and answers 0 iff the approximation exceeds
/// 2^{−n−1} + 2^{−n−2}.
pub struct EqualityFromMetric {
    metric: Arc<dyn OracleProgram>,
    metric_time: RunningTime,
}

impl EqualityFromMetric {
    pub fn new(metric: Arc<dyn OracleProgram>, metric_time: RunningTime) -> Self {
        EqualityFromMetric { metric, metric_time }
    }

    /// The budget c·T(l, n+2) + c.
    pub fn running_time(&self, c: u64) -> RunningTime {
        self.metric_time.shifted(2).scaled(c)
    }
}

impl OracleProgram for EqualityFromMetric {
    fn label(&self) -> String {
        format!("eq from {}", self.metric.label())
    }

    fn run(&self, port: &mut Port<'_>) -> Result<()> {
        let n = port.input().len();
        // the numeral of 2^{n+2} − 1 is 1^{n+2}
        let z = port.subrun(self.metric.as_ref(), BinStr::ones(n + 2))?;
        port.tick(z.len() as u64 + 1)?;
        // approximation z/2^{n+2}; compare against 3/2^{n+2}
        let far = decode_int(&z)? > BigInt::from(3);
        port.write_bit(!far)
    }
}
