use crate::config::{length_or, running_time, Output};
use crate::functions::{dyadic_level, parse_fn, FORMS};
use crate::{Failure, Outcome};
use clap::Args;
use metrep::baire::{LengthFn, Name};
use metrep::banach::{
    banach_name, coeff_query, delta_square_name, dsq_query, dsq_to_xi, fs_coeffs_of, haar_coeffs_of, lp_modulus_fn,
    lp_name, lp_query, lp_to_xi, pl_modulus_fn, xi_to_dsq, xi_to_lp, BanachParams, FaberSchauder, HaarSystem,
};
use metrep::machine::{run_with_budget, translate, OracleProgram};
use metrep::num::{parse_q, SurdSum, Q};
use metrep::strings::BinStr;
use metrep::Error;
use num_bigint::BigUint;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

pub const HELP: &str = "\
Representations:
  xi-fs    coefficients in the Faber-Schauder basis of C[0,1]
  dsq      values at dyadic points (the standard representation of C[0,1])
  xi-haar  coefficients in the Lp-normalised Haar basis (needs --p)
  lp       integrals over dyadic intervals (needs --p)
Translations: xi-fs <-> dsq and xi-haar <-> lp; --from = --to prints the source.
--via R translates to R and on to --to, so --from dsq --via xi-fs --to dsq is a
round trip.

Queries printed at depth d:
  xi-*   0^k for k <= d, and the coefficient queries <i,n,m> for i <= 2^d, n, m <= d
  dsq    <0^n, r, 10^m> for n, m <= d and r <= 2^m
  lp     <k, l, 1^m, 1^n> for n, m <= d and k <= l <= 2^m

The source is a trace file (--input, lines query<TAB>answer in binary) or a
function (--function). The output is a trace in the same format. A meter
report goes to stderr: targets, total and largest step counts, and the number
of distinct source queries. --source-trace writes the source queries that were
read, so the output can be reproduced from that file alone. When the input
trace lacks queries the run fails with exit code 2 and lists them.
";

#[derive(Args, Clone, Debug)]
#[command(after_help = FORMS)]
pub struct TranslateArgs {
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
    /// An intermediate representation.
    #[arg(long)]
    pub via: Option<String>,
    /// Source trace file.
    #[arg(long, value_name = "PATH", conflicts_with = "function", required_unless_present = "function")]
    pub input: Option<PathBuf>,
    /// Source function, for example poly:0:0,1:1.
    #[arg(long, value_name = "SPEC")]
    pub function: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub depth: u64,
    /// The exponent p >= 1 of the Lp representations.
    #[arg(long)]
    pub p: Option<String>,
    /// Length table of coefficient names built from --function (CSV n,l; default l(n) = n + 8).
    #[arg(long = "l-table", value_name = "CSV")]
    pub l_table: Option<PathBuf>,
    /// Running time id of the ξ representation.
    #[arg(long = "S", default_value = "exp-max")]
    pub s: String,
    /// Write the source queries read to this file.
    #[arg(long = "source-trace", value_name = "PATH")]
    pub source_trace: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Rep {
    XiFs,
    Dsq,
    XiHaar,
    Lp,
}

fn rep(id: &str) -> Result<Rep, Failure> {
    match id {
        "xi-fs" => Ok(Rep::XiFs),
        "dsq" => Ok(Rep::Dsq),
        "xi-haar" => Ok(Rep::XiHaar),
        "lp" => Ok(Rep::Lp),
        _ => Err(Failure::Config(format!("unknown representation {id:?} (known: xi-fs, dsq, xi-haar, lp)"))),
    }
}

struct Ctx {
    params: BanachParams,
    l: LengthFn,
    p: Option<Q>,
}

impl Ctx {
    fn p(&self) -> Result<&Q, Failure> {
        self.p.as_ref().ok_or_else(|| Failure::Config("this representation needs --p".into()))
    }

    fn p_int(&self) -> Result<u32, Failure> {
        let p = self.p()?;
        if !p.is_integer() {
            return Err(Failure::Config(format!("names built from functions need an integer p, not {p}")));
        }
        u32::try_from(p.to_integer()).map_err(|_| Failure::Config(format!("p = {p} out of range")))
    }
}

fn name_of(r: Rep, spec: &str, ctx: &Ctx) -> Result<Name, Failure> {
    let f = parse_fn(spec)?;
    let f = f.piecewise()?;
    let levels = dyadic_level(f)?;
    let need_pl = || {
        if f.is_continuous() {
            Ok(())
        } else {
            Err(Failure::Config("this representation needs a continuous function".into()))
        }
    };
    let need_step = || if f.is_step() { Ok(()) } else { Err(Failure::Config("this representation needs a step function".into())) };
    Ok(match r {
        Rep::XiFs => {
            need_pl()?;
            let c = fs_coeffs_of(f, (1usize << levels) + 1).into_iter().map(SurdSum::from_q).collect();
            banach_name(Arc::new(FaberSchauder), c, ctx.l.clone(), ctx.params.s())?
        }
        Rep::Dsq => {
            need_pl()?;
            delta_square_name(f, &pl_modulus_fn(f))
        }
        Rep::XiHaar => {
            need_step()?;
            let p = ctx.p()?;
            let sys = Arc::new(HaarSystem::new(p.clone())?);
            banach_name(sys, haar_coeffs_of(f, p, 1usize << levels), ctx.l.clone(), ctx.params.s())?
        }
        Rep::Lp => {
            need_step()?;
            lp_name(f, &lp_modulus_fn(f, ctx.p_int()?)?)
        }
    })
}

fn targets(r: Rep, d: u64) -> Vec<BinStr> {
    let mut out = Vec::new();
    match r {
        Rep::XiFs | Rep::XiHaar => {
            out.extend((0..=d as usize).map(BinStr::zeros));
            for i in 0..=(1u64 << d) {
                for n in 0..=d {
                    for m in 0..=d {
                        out.push(coeff_query(&i.into(), &n.into(), &m.into()));
                    }
                }
            }
        }
        Rep::Dsq => {
            for n in 0..=d {
                for m in 0..=d {
                    for r in 0..=(1u64 << m) {
                        out.push(dsq_query(n, &BigUint::from(r), m));
                    }
                }
            }
        }
        Rep::Lp => {
            for n in 0..=d {
                for m in 0..=d {
                    for k in 0..=(1u64 << m) {
                        for l in k..=(1u64 << m) {
                            out.push(lp_query(&k.into(), &l.into(), m, n));
                        }
                    }
                }
            }
        }
    }
    out
}

fn program(from: Rep, to: Rep, ctx: &Ctx) -> Result<Arc<dyn OracleProgram>, Failure> {
    Ok(match (from, to) {
        (Rep::XiFs, Rep::Dsq) => xi_to_dsq(&ctx.params),
        (Rep::Dsq, Rep::XiFs) => dsq_to_xi(),
        (Rep::XiHaar, Rep::Lp) => xi_to_lp(&ctx.params, ctx.p()?),
        (Rep::Lp, Rep::XiHaar) => lp_to_xi(ctx.p()?)?,
        _ => return Err(Failure::Config(format!("no translation from {from:?} to {to:?}"))),
    })
}

type Log = Arc<Mutex<BTreeMap<BinStr, Option<BinStr>>>>;

/// Wraps a name so that every query, answered or missed, is logged.
fn recording(inner: Name, log: Log) -> Name {
    Name::fallible(format!("recorded {}", inner.label()), move |a| {
        let r = inner.query(a);
        let mut log = log.lock().unwrap();
        match &r {
            Ok(v) => {
                log.insert(a.clone(), Some(v.clone()));
            }
            Err(Error::TraceMiss(q)) => {
                log.insert(q.clone(), None);
            }
            Err(_) => {}
        }
        r
    })
}

fn write_text(path: &PathBuf, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))
}

pub fn cmd_translate(a: &TranslateArgs) -> Outcome {
    let (from, to) = (rep(&a.from)?, rep(&a.to)?);
    let ctx = Ctx {
        params: BanachParams::new(running_time(&a.s)?)?,
        l: length_or(&a.l_table, LengthFn::affine(1, 8))?,
        p: a.p.as_deref().map(parse_q).transpose()?,
    };
    let source = match (&a.input, &a.function) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            Name::from_trace(&text)?
        }
        (None, Some(spec)) => name_of(from, spec, &ctx)?,
        (None, None) => return Err(Failure::Config("give --input or --function".into())),
    };
    let log: Log = Arc::default();
    let mut source = recording(source, log.clone());
    let mut from = from;
    if let Some(via) = &a.via {
        let via = rep(via)?;
        source = translate(program(from, via, &ctx)?, &source);
        from = via;
    }
    let prog = if from == to { None } else { Some(program(from, to, &ctx)?) };
    let mut text = String::new();
    let (mut total, mut most) = (0u64, 0u64);
    let mut missed = false;
    let queries = targets(to, a.depth);
    for q in &queries {
        let answer = match &prog {
            None => source.query(q),
            Some(p) => run_with_budget(p.as_ref(), &source, q, u64::MAX).map(|run| {
                total += run.report.steps_used;
                most = most.max(run.report.steps_used);
                run.output
            }),
        };
        match answer {
            Ok(v) => text.push_str(&format!("{q}\t{v}\n")),
            Err(Error::TraceMiss(_)) => missed = true,
            Err(e) => return Err(e.into()),
        }
    }
    let log = log.lock().unwrap();
    if missed {
        let list: Vec<BinStr> = log.iter().filter(|(_, v)| v.is_none()).map(|(q, _)| q.clone()).collect();
        return Err(Error::MissingQueries(list).into());
    }
    if let Some(path) = &a.source_trace {
        let mut s = String::new();
        for (q, v) in log.iter() {
            if let Some(v) = v {
                s.push_str(&format!("{q}\t{v}\n"));
            }
        }
        write_text(path, &s)?;
    }
    let mut out = a.output.open()?;
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(crate::config::io_err)?;
    eprintln!("targets\tsteps_total\tsteps_max\tsource_queries\n{}\t{total}\t{most}\t{}", queries.len(), log.len());
    Ok(())
}
