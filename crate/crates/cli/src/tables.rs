use crate::config::{io_err, Output};
use crate::functions::{parse_fn, FORMS};
use crate::Outcome;
use clap::{Args, ValueEnum};
use metrep::banach::{fs_coeffs, fs_partial_sum_eval, haar_integral, haar_unit_norm};
use metrep::entropy::{lorentz_bounds, ApproxSetSpec};
use metrep::machine::dialog_length_bound;
use metrep::num::{abs_q, fmt_q, parse_q, q_to_f64, Surd, Q};
use num_bigint::{BigInt, BigUint};

pub const EVAL_COLUMNS: &str = "\
--table fs, one row per level k = 0..=n-max:
  level      k
  terms      2^k + 1 Faber-Schauder coefficients
  grid       the error is measured at j/grid for j = 0..=grid, grid = 2^(k+4)
  max_error  the largest |f - partial sum| on the grid, exact rational
  max_error_f64  the same as a float
--table haar, one row per index i = 0..=n-max:
  i          basis index
  level      k with 2^(k-1) <= i < 2^k (0 for i = 0)
  lo         left end of the support of f_i
  hi         right end of the support
  int_left   the integral of f_i over the left half of its support
  int_right  the integral over the right half
  int_total  the integral over [0,1]
  norm_p     the integral of |f_i|^p
Exact values are written c or c*2^(e) with rational c and e.";

pub const BOUNDS_COLUMNS: &str = "\
--table dialog, one row per T = 0..=n-max:
  T      a running-time value
  bound  2(T(T+1)+1), the bound on the encoded length of a T-step dialog
--table lorentz, one row per n = 0..=n-max, for delta_k = 2^-k:
  n      the entropy is taken at radius 2^-n
  lower  natural-log lower bound on the entropy of the approximation set
  upper  natural-log upper bound";

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum EvalTable {
    Fs,
    Haar,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BoundsTable {
    Dialog,
    Lorentz,
}

#[derive(Args, Clone, Debug)]
#[command(after_help = FORMS)]
pub struct EvalArgs {
    #[arg(long, value_enum, default_value = "fs")]
    pub table: EvalTable,
    #[arg(long = "n-max", default_value_t = 6)]
    pub n_max: u32,
    /// The function expanded by --table fs.
    #[arg(long, value_name = "SPEC", default_value = "parabola")]
    pub function: String,
    /// The exponent of the Haar normalisation.
    #[arg(long, default_value = "2")]
    pub p: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Clone, Debug)]
pub struct BoundsArgs {
    #[arg(long, value_enum, default_value = "dialog")]
    pub table: BoundsTable,
    #[arg(long = "n-max", default_value_t = 10)]
    pub n_max: u32,
    #[command(flatten)]
    pub output: Output,
}

fn fmt_surd(s: &Surd) -> String {
    if s.is_zero() || s.exp() == &Q::from_integer(0.into()) {
        fmt_q(s.coef())
    } else {
        format!("{}*2^({})", fmt_q(s.coef()), fmt_q(s.exp()))
    }
}

pub fn cmd_eval(a: &EvalArgs) -> Outcome {
    let mut w = a.output.csv()?;
    match a.table {
        EvalTable::Fs => {
            let f = parse_fn(&a.function)?;
            w.write_record(["level", "terms", "grid", "max_error", "max_error_f64"]).map_err(io_err)?;
            for k in 0..=a.n_max {
                let terms = (1usize << k) + 1;
                let coeffs = fs_coeffs(&|x| f.eval(x), terms);
                let grid = 1i64 << (k + 4);
                let err = (0..=grid)
                    .map(|j| {
                        let x = Q::new(BigInt::from(j), BigInt::from(grid));
                        abs_q(&(f.eval(&x) - fs_partial_sum_eval(&coeffs, &x)))
                    })
                    .max()
                    .unwrap_or_default();
                w.write_record([k.to_string(), terms.to_string(), grid.to_string(), fmt_q(&err), q_to_f64(&err).to_string()])
                    .map_err(io_err)?;
            }
        }
        EvalTable::Haar => {
            let p = parse_q(&a.p)?;
            if p < Q::from_integer(1.into()) {
                return Err(crate::Failure::Config(format!("p = {p} below 1")));
            }
            w.write_record(["i", "level", "lo", "hi", "int_left", "int_right", "int_total", "norm_p"]).map_err(io_err)?;
            let zero = Q::from_integer(0.into());
            let one = Q::from_integer(1.into());
            for i in 0..=a.n_max as u64 {
                let big = BigUint::from(i);
                let (level, lo, hi) = if i == 0 {
                    (0, zero.clone(), one.clone())
                } else {
                    let k = 64 - i.leading_zeros() as u64;
                    let t = (i + 1 - (1 << (k - 1))) as i64;
                    let den = BigInt::from(1) << (k - 1);
                    (k, Q::new(BigInt::from(t - 1), den.clone()), Q::new(BigInt::from(t), den))
                };
                let mid = (&lo + &hi) / Q::from_integer(2.into());
                let norm = haar_unit_norm(i, &p).map(|v| fmt_q(&v)).unwrap_or_else(|| "irrational".into());
                w.write_record([
                    i.to_string(),
                    level.to_string(),
                    fmt_q(&lo),
                    fmt_q(&hi),
                    fmt_surd(&haar_integral(&big, &p, &lo, &mid)),
                    fmt_surd(&haar_integral(&big, &p, &mid, &hi)),
                    fmt_surd(&haar_integral(&big, &p, &zero, &one)),
                    norm,
                ])
                .map_err(io_err)?;
            }
        }
    }
    w.flush().map_err(io_err)
}

pub fn cmd_bounds(a: &BoundsArgs) -> Outcome {
    let mut w = a.output.csv()?;
    match a.table {
        BoundsTable::Dialog => {
            w.write_record(["T", "bound"]).map_err(io_err)?;
            for t in 0..=a.n_max as u64 {
                w.write_record([t.to_string(), dialog_length_bound(t).to_string()]).map_err(io_err)?;
            }
        }
        BoundsTable::Lorentz => {
            let spec = ApproxSetSpec::geometric(a.n_max as usize + 3);
            w.write_record(["n", "lower", "upper"]).map_err(io_err)?;
            for n in 0..=a.n_max as usize {
                let b = lorentz_bounds(&spec, n)?;
                w.write_record([n.to_string(), format!("{:.6}", b.lower), format!("{:.6}", b.upper)]).map_err(io_err)?;
            }
        }
    }
    w.flush().map_err(io_err)
}
