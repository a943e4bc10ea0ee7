use crate::config::{io_err, length_or, Output};
use crate::{Failure, Outcome};
use clap::Args;
use metrep::baire::{pair_names, LengthFn, Name};
use metrep::entropy::{
    cauchy_equality, covering_number, dialog_cover_experiment, packing_witness, sample_unit_dyadics, CoverMode,
    PointCloud, EXACT_LIMIT,
};
use metrep::machine::{dialog_length_bound, metered_run, EqualityFromMetric, RunningTime};
use metrep::num::{abs_q, fmt_q, pow2, Q};
use metrep::reprs::{cauchy_name_of, UnitInterval};
use metrep::strings::BinStr;
use std::path::PathBuf;
use std::sync::Arc;

pub const ENTROPY_COLUMNS: &str = "\
CSV columns, one row per n = 0..=n-max:
  n           precision index; balls have radius 2^-n
  seed        the sampling seed
  samples     number of sampled names
  distinct    number of distinct sampled points
  packing     size of a greedy 2^(1-n)-separated subset of the sample
  cover       number of 2^-n-balls centred at sample points covering the sample
  cover_mode  exact (optimal cover) or greedy (sample above the exact-mode limit)
  classes     distinct dialogs of the equality program on input 1^(n+1)
  T           the equality running time at (l', n+1), l' the length of paired names
  bound_exp   2(T(T+1)+1); classes must not exceed 2^bound_exp
  l_ref       the length table l(n) of a single name
  within      true when classes <= 2^bound_exp
An empty sample gives the header alone. Exit code 3 when a row has within = false.";

pub const DIALOG_COLUMNS: &str = "\
CSV columns, one row per n = 0..=n-max:
  n             precision index
  seed          the sampling seed
  samples       number of sampled names
  classes       distinct dialogs of the equality program on input 1^(n+1)
  max_radius    largest distance from a name to the first name of its class (exact rational)
  radius        2^-n
  max_dialog    longest encoded dialog seen
  dialog_bound  2(T(T+1)+1), the bound on the encoded dialog length
  within        true when every dialog fits and classes <= 2^dialog_bound
Exit code 3 when a row has within = false or two names of one class lie more than 2^-n apart.";

#[derive(Args, Clone, Debug)]
pub struct EntropyArgs {
    /// Space id; `unit` is the interval [0,1].
    #[arg(long, default_value = "unit")]
    pub space: String,
    /// Representation id; `cauchy` is the Cauchy representation over the dyadic grid.
    #[arg(long, default_value = "cauchy")]
    pub rep: String,
    /// CSV with columns n,l bounding the length of one name (default l(n) = n + 2).
    #[arg(long = "l-table", value_name = "CSV")]
    pub l_table: Option<PathBuf>,
    #[arg(long = "n-max", default_value_t = 6)]
    pub n_max: usize,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampled points are k/2^s with s <= scale.
    #[arg(long, default_value_t = 10)]
    pub scale: u32,
    #[command(flatten)]
    pub output: Output,
}

struct Setup {
    xs: Vec<Q>,
    sample: Vec<Name>,
    eq: EqualityFromMetric,
    t: RunningTime,
    l: LengthFn,
    paired: LengthFn,
}

fn setup(a: &EntropyArgs) -> Result<Setup, Failure> {
    if a.space != "unit" {
        return Err(Failure::Config(format!("unknown space {:?} (known: unit)", a.space)));
    }
    if a.rep != "cauchy" {
        return Err(Failure::Config(format!("unknown representation {:?} for {} (known: cauchy)", a.rep, a.space)));
    }
    let l = length_or(&a.l_table, LengthFn::affine(1, 2))?;
    let m = Arc::new(UnitInterval);
    let (eq, t) = cauchy_equality(m.clone());
    let xs = sample_unit_dyadics(a.seed, a.samples, a.scale);
    let sample = xs.iter().map(|x| cauchy_name_of(m.clone(), x.clone())).collect();
    let paired = l.pair_len(&l);
    Ok(Setup { xs, sample, eq, t, l, paired })
}

fn distinct(xs: &[Q]) -> Vec<Q> {
    let mut v = xs.to_vec();
    v.sort();
    v.dedup();
    v
}

pub fn cmd_entropy(a: &EntropyArgs) -> Outcome {
    let s = setup(a)?;
    let mut w = a.output.csv()?;
    w.write_record([
        "n", "seed", "samples", "distinct", "packing", "cover", "cover_mode", "classes", "T", "bound_exp", "l_ref",
        "within",
    ])
    .map_err(io_err)?;
    let mut bad = Vec::new();
    if !s.sample.is_empty() {
        let cloud = PointCloud::line(&distinct(&s.xs));
        let mode = if cloud.len() <= EXACT_LIMIT { CoverMode::Exact } else { CoverMode::Greedy };
        for n in 0..=a.n_max {
            let packing = packing_witness(&cloud, n as i64).len();
            let cover = covering_number(&cloud, n as i64, mode)?;
            let dist = |i: usize, j: usize| abs_q(&(&s.xs[i] - &s.xs[j]));
            let rep = dialog_cover_experiment(&s.sample, &s.eq, &s.t, &s.paired, n, &dist)?;
            let t = s.t.eval(&s.paired, n + 1);
            if !rep.within_bound {
                bad.push(n);
            }
            w.write_record([
                n.to_string(),
                a.seed.to_string(),
                s.sample.len().to_string(),
                cloud.len().to_string(),
                packing.to_string(),
                cover.count.to_string(),
                mode.to_string(),
                rep.classes.to_string(),
                t.to_string(),
                rep.bound_exp.to_string(),
                s.l.eval(n).to_string(),
                rep.within_bound.to_string(),
            ])
            .map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)?;
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Contract(format!("class count above the bound at n = {bad:?}")))
    }
}

pub fn cmd_dialog_cover(a: &EntropyArgs) -> Outcome {
    let s = setup(a)?;
    let mut w = a.output.csv()?;
    w.write_record(["n", "seed", "samples", "classes", "max_radius", "radius", "max_dialog", "dialog_bound", "within"])
        .map_err(io_err)?;
    let mut bad = Vec::new();
    if !s.sample.is_empty() {
        for n in 0..=a.n_max {
            let input = BinStr::ones(n + 1);
            let bound = dialog_length_bound(s.t.eval(&s.paired, n + 1));
            let mut longest = 0u64;
            for psi in &s.sample {
                let run = metered_run(&s.eq, &pair_names(psi, psi), &input, &s.t, &s.paired)?;
                longest = longest.max(run.dialog.encode().len() as u64);
            }
            let dist = |i: usize, j: usize| abs_q(&(&s.xs[i] - &s.xs[j]));
            let rep = dialog_cover_experiment(&s.sample, &s.eq, &s.t, &s.paired, n, &dist)?;
            let within = rep.within_bound && longest <= bound;
            if !within {
                bad.push(n);
            }
            w.write_record([
                n.to_string(),
                a.seed.to_string(),
                s.sample.len().to_string(),
                rep.classes.to_string(),
                fmt_q(&rep.max_radius),
                fmt_q(&pow2(-(n as i64))),
                longest.to_string(),
                bound.to_string(),
                within.to_string(),
            ])
            .map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)?;
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Contract(format!("dialog bound violated at n = {bad:?}")))
    }
}
