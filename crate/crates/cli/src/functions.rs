use crate::Failure;
use metrep::num::{parse_q, Q};
use metrep::banach::PiecewiseFn;

/// A function on [0,1] given on the command line.
pub enum FnSpec {
    Piecewise(PiecewiseFn),
    /// x(1 − x)
    Parabola,
}

pub const FORMS: &str = "\
Function forms:
  poly:X:Y,X:Y,...      the polygon through the listed points, first X = 0, last X = 1
  step:C,C,...:V,V,...  the step function with cuts 0 = C_0 < ... < C_k = 1 and k values
  parabola              x(1-x) (eval only)
Rationals are written a, a/b or a/2^k.";

fn qs(list: &str) -> Result<Vec<Q>, Failure> {
    list.split(',').map(|s| parse_q(s).map_err(Failure::from)).collect()
}

pub fn parse_fn(spec: &str) -> Result<FnSpec, Failure> {
    let bad = |m: &str| Failure::Config(format!("function {spec:?}: {m}"));
    if spec == "parabola" {
        return Ok(FnSpec::Parabola);
    }
    let (kind, rest) = spec.split_once(':').ok_or_else(|| bad("expected poly:… or step:…"))?;
    match kind {
        "poly" => {
            let mut pts = Vec::new();
            for p in rest.split(',') {
                let (x, y) = p.split_once(':').ok_or_else(|| bad("points are X:Y"))?;
                pts.push((parse_q(x)?, parse_q(y)?));
            }
            Ok(FnSpec::Piecewise(PiecewiseFn::polygon(&pts)?))
        }
        "step" => {
            let (cuts, vals) = rest.split_once(':').ok_or_else(|| bad("expected cuts:values"))?;
            Ok(FnSpec::Piecewise(PiecewiseFn::step(&qs(cuts)?, &qs(vals)?)?))
        }
        _ => Err(bad("unknown form")),
    }
}

impl FnSpec {
    pub fn piecewise(&self) -> Result<&PiecewiseFn, Failure> {
        match self {
            FnSpec::Piecewise(f) => Ok(f),
            FnSpec::Parabola => Err(Failure::Config("parabola is not piecewise linear".into())),
        }
    }

    pub fn eval(&self, x: &Q) -> Q {
        match self {
            FnSpec::Piecewise(f) => f.eval(x),
            FnSpec::Parabola => x * (Q::from_integer(1.into()) - x),
        }
    }
}

/// The least k with every breakpoint of f in 2^{−k}ℤ.
pub fn dyadic_level(f: &PiecewiseFn) -> Result<u32, Failure> {
    let mut k = 0;
    for x in f.breakpoints() {
        let d = x.denom();
        let bits = d.bits() - 1;
        if d.clone() != num_bigint::BigInt::from(1) << bits {
            return Err(Failure::Config(format!("breakpoint {x} is not dyadic")));
        }
        k = k.max(bits as u32);
    }
    Ok(k)
}
