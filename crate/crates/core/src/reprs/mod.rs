//! Representations of metric spaces by names.

mod cauchy;
mod reals;
mod space;

pub use cauchy::{
    cauchy_metric, cauchy_name, cauchy_name_of, co_re_reject, dist_query, index_query, relativized_name,
    relativized_name_of, relativized_reject, CauchyMetric, RejectOutcome, RelativizedMetric,
};
pub(crate) use cauchy::{numeral_query, quarter, read_index};
pub use reals::{
    product_name, product_real_length, product_split, real_decode, real_decode_u64, real_length, real_name,
    real_vector_decode, real_vector_name, validate_real_name, RealApprox,
};
pub use space::{cantor_pair, cantor_unpair, q_index, q_seq, DyadicLine, FiniteSpace, MetricSpace, UnitInterval};

use crate::baire::{LengthFn, Name};
use crate::strings::encode_nat;
use crate::Result;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validation {
    Consistent,
    Rejected(String),
}

impl Validation {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Validation::Consistent)
    }
}

pub trait Representation: Send + Sync {
    type Approx;

    fn label(&self) -> String;
    /// An approximation within 1/(n+1) of the represented point.
    fn decode(&self, phi: &Name, n: u64) -> Result<Self::Approx>;
    fn validate(&self, phi: &Name, depth: u64) -> Result<Validation>;
    fn length(&self) -> Option<LengthFn> {
        None
    }
}

/// The standard representation of the reals, optionally restricted to |x| < 2^c.
#[derive(Clone, Debug, Default)]
pub struct RealRepr {
    pub bound_exp: Option<usize>,
}

impl Representation for RealRepr {
    type Approx = RealApprox;

    fn label(&self) -> String {
        "reals".into()
    }

    fn decode(&self, phi: &Name, n: u64) -> Result<RealApprox> {
        real_decode_u64(phi, n)
    }

    fn validate(&self, phi: &Name, depth: u64) -> Result<Validation> {
        match validate_real_name(phi, depth) {
            Ok(None) => Ok(Validation::Consistent),
            Ok(Some((i, j))) => Ok(Validation::Rejected(format!("values at {i} and {j} disagree"))),
            Err(crate::Error::MalformedName(m)) => Ok(Validation::Rejected(m)),
            Err(e) => Err(e),
        }
    }

    fn length(&self) -> Option<LengthFn> {
        self.bound_exp.map(real_length)
    }
}

/// The Cauchy representation over a dense sequence.
pub struct CauchyRepr<M> {
    pub space: Arc<M>,
}

impl<M: MetricSpace> CauchyRepr<M> {
    pub fn new(space: Arc<M>) -> Self {
        CauchyRepr { space }
    }
}

fn reject_message(r: RejectOutcome) -> Validation {
    match r {
        RejectOutcome::Undecided => Validation::Consistent,
        RejectOutcome::Rejected { i, j } => Validation::Rejected(format!("indices {i} and {j} too far apart")),
        RejectOutcome::Malformed { i } => Validation::Rejected(format!("value at {i} is malformed")),
    }
}

impl<M: MetricSpace> Representation for CauchyRepr<M> {
    type Approx = M::Point;

    fn label(&self) -> String {
        format!("cauchy over {}", self.space.label())
    }

    fn decode(&self, phi: &Name, n: u64) -> Result<M::Point> {
        Ok(self.space.point(read_index(&phi.query(&encode_nat(n))?)?))
    }

    fn validate(&self, phi: &Name, depth: u64) -> Result<Validation> {
        co_re_reject(phi, self.space.as_ref(), depth + 1).map(reject_message)
    }
}

/// The Cauchy representation carrying its own distance oracle.
pub struct RelativizedRepr<M> {
    pub space: Arc<M>,
}

impl<M: MetricSpace> RelativizedRepr<M> {
    pub fn new(space: Arc<M>) -> Self {
        RelativizedRepr { space }
    }
}

impl<M: MetricSpace> Representation for RelativizedRepr<M> {
    type Approx = M::Point;

    fn label(&self) -> String {
        format!("relativized cauchy over {}", self.space.label())
    }

    fn decode(&self, phi: &Name, n: u64) -> Result<M::Point> {
        Ok(self.space.point(read_index(&phi.query(&index_query(n))?)?))
    }

    fn validate(&self, phi: &Name, depth: u64) -> Result<Validation> {
        relativized_reject(phi, self.space.as_ref(), depth + 1).map(reject_message)
    }
}

/// The d-fold product of the reals on [−2^c, 2^c]^d.
#[derive(Clone, Debug)]
pub struct ProductRealRepr {
    pub dim: usize,
    pub bound_exp: usize,
}

impl Representation for ProductRealRepr {
    type Approx = Vec<RealApprox>;

    fn label(&self) -> String {
        format!("reals^{}", self.dim)
    }

    fn decode(&self, phi: &Name, n: u64) -> Result<Vec<RealApprox>> {
        real_vector_decode(phi, self.dim, n)
    }

    fn validate(&self, phi: &Name, depth: u64) -> Result<Validation> {
        let mut rest = phi.clone();
        for k in 0..self.dim {
            let coord = if k + 1 == self.dim {
                rest.clone()
            } else {
                match product_split(&rest) {
                    Ok((a, b)) => {
                        rest = b;
                        a
                    }
                    Err(e) => return Ok(Validation::Rejected(e.to_string())),
                }
            };
            let v = RealRepr::default().validate(&coord, depth)?;
            if !v.is_consistent() {
                return Ok(v);
            }
        }
        Ok(Validation::Consistent)
    }

    fn length(&self) -> Option<LengthFn> {
        Some(product_real_length(self.dim, self.bound_exp))
    }
}
