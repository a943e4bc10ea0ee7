use crate::num::{fmt_q, Q};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};
use std::fmt;

/// The linear function on [a, b] through (a, ya) and (b, yb).
#[derive(Clone, PartialEq, Eq)]
pub struct Piece {
    pub a: Q,
    pub b: Q,
    pub ya: Q,
    pub yb: Q,
}

impl Piece {
    pub fn at(&self, x: &Q) -> Q {
        &self.ya + (&self.yb - &self.ya) * (x - &self.a) / (&self.b - &self.a)
    }

    fn is_flat(&self) -> bool {
        self.ya == self.yb
    }
}

impl fmt::Debug for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]: {} → {}", fmt_q(&self.a), fmt_q(&self.b), fmt_q(&self.ya), fmt_q(&self.yb))
    }
}

/// ∫_a^b |y|^p for the linear y with y(a) = ya, y(b) = yb.
fn pow_integral_linear(a: &Q, b: &Q, ya: &Q, yb: &Q, p: u32) -> Q {
    let w = b - a;
    if ya.is_negative() && yb.is_positive() || ya.is_positive() && yb.is_negative() {
        let r = a + &w * ya.abs() / (ya.abs() + yb.abs());
        let z = Q::zero();
        return pow_integral_linear(a, &r, ya, &z, p) + pow_integral_linear(&r, b, &z, yb, p);
    }
    let (u, v) = (ya.abs(), yb.abs());
    if u == v {
        return w * num_traits::pow(u, p as usize);
    }
    let k = p as usize + 1;
    w * (num_traits::pow(v.clone(), k) - num_traits::pow(u.clone(), k)) / (Q::from_integer((k as i64).into()) * (v - u))
}

/// A function made of linear pieces on consecutive intervals, zero outside
/// their union. Jumps between pieces are allowed, so polygons and step
/// functions share the type. At a jump the value is the right limit.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct PiecewiseFn {
    pieces: Vec<Piece>,
}

impl PiecewiseFn {
    pub fn zero() -> Self {
        PiecewiseFn::default()
    }

    pub fn from_pieces(pieces: Vec<Piece>) -> Result<Self> {
        for (k, p) in pieces.iter().enumerate() {
            if p.a >= p.b {
                return Err(Error::ParameterViolation(format!("empty piece {p:?}")));
            }
            if k > 0 && pieces[k - 1].b > p.a {
                return Err(Error::ParameterViolation(format!("pieces overlap at {}", fmt_q(&p.a))));
            }
        }
        Ok(PiecewiseFn { pieces })
    }

    /// The polygon through the given points, x strictly increasing.
    pub fn polygon(points: &[(Q, Q)]) -> Result<Self> {
        let pieces = points
            .windows(2)
            .map(|w| Piece { a: w[0].0.clone(), b: w[1].0.clone(), ya: w[0].1.clone(), yb: w[1].1.clone() })
            .collect();
        PiecewiseFn::from_pieces(pieces)
    }

    /// levels[t] on [cuts[t], cuts[t+1]).
    pub fn step(cuts: &[Q], levels: &[Q]) -> Result<Self> {
        if cuts.len() != levels.len() + 1 {
            return Err(Error::ParameterViolation(format!("{} cuts for {} levels", cuts.len(), levels.len())));
        }
        let pieces = levels
            .iter()
            .enumerate()
            .map(|(t, y)| Piece { a: cuts[t].clone(), b: cuts[t + 1].clone(), ya: y.clone(), yb: y.clone() })
            .collect();
        PiecewiseFn::from_pieces(pieces)
    }

    /// χ_[a,b].
    pub fn indicator(a: &Q, b: &Q) -> Self {
        if a >= b {
            return PiecewiseFn::zero();
        }
        PiecewiseFn::step(&[a.clone(), b.clone()], &[Q::one()]).expect("a < b")
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_step(&self) -> bool {
        self.pieces.iter().all(Piece::is_flat)
    }

    pub fn is_continuous(&self) -> bool {
        self.pieces.windows(2).all(|w| w[0].b == w[1].a && w[0].yb == w[1].ya)
    }

    /// Sorted, distinct piece endpoints.
    pub fn breakpoints(&self) -> Vec<Q> {
        let mut out: Vec<Q> = Vec::with_capacity(self.pieces.len() + 1);
        for p in &self.pieces {
            for x in [&p.a, &p.b] {
                if out.last() != Some(x) {
                    out.push(x.clone());
                }
            }
        }
        out
    }

    fn piece_index(&self, x: &Q) -> Option<usize> {
        let k = self.pieces.partition_point(|p| &p.b <= x);
        (k < self.pieces.len() && &self.pieces[k].a <= x).then_some(k)
    }

    pub fn eval(&self, x: &Q) -> Q {
        if let Some(k) = self.piece_index(x) {
            return self.pieces[k].at(x);
        }
        match self.pieces.iter().rev().find(|p| &p.b == x) {
            Some(p) => p.yb.clone(),
            None => Q::zero(),
        }
    }

    /// The values at u and v of the linear branch on (u, v), assumed free of breakpoints.
    fn branch(&self, u: &Q, v: &Q) -> (Q, Q) {
        let mid = (u + v) / Q::from_integer(2.into());
        match self.piece_index(&mid) {
            Some(k) => (self.pieces[k].at(u), self.pieces[k].at(v)),
            None => (Q::zero(), Q::zero()),
        }
    }

    fn merged_grid(&self, other: &PiecewiseFn) -> Vec<Q> {
        let mut g = self.breakpoints();
        g.extend(other.breakpoints());
        g.sort();
        g.dedup();
        g
    }

    /// a·self + b·other.
    pub fn combine(&self, a: &Q, other: &PiecewiseFn, b: &Q) -> PiecewiseFn {
        let grid = self.merged_grid(other);
        let mut pieces = Vec::with_capacity(grid.len());
        for w in grid.windows(2) {
            let (f0, f1) = self.branch(&w[0], &w[1]);
            let (g0, g1) = other.branch(&w[0], &w[1]);
            pieces.push(Piece { a: w[0].clone(), b: w[1].clone(), ya: a * f0 + b * g0, yb: a * f1 + b * g1 });
        }
        PiecewiseFn { pieces }
    }

    pub fn add(&self, other: &PiecewiseFn) -> PiecewiseFn {
        self.combine(&Q::one(), other, &Q::one())
    }

    pub fn sub(&self, other: &PiecewiseFn) -> PiecewiseFn {
        self.combine(&Q::one(), other, &-Q::one())
    }

    pub fn scale(&self, c: &Q) -> PiecewiseFn {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece { a: p.a.clone(), b: p.b.clone(), ya: c * &p.ya, yb: c * &p.yb })
            .collect();
        PiecewiseFn { pieces }
    }

    /// x ↦ self(x + h).
    pub fn translate(&self, h: &Q) -> PiecewiseFn {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece { a: &p.a - h, b: &p.b - h, ya: p.ya.clone(), yb: p.yb.clone() })
            .collect();
        PiecewiseFn { pieces }
    }

    /// sup |self|, attained at a piece endpoint.
    pub fn sup_norm(&self) -> Q {
        self.pieces.iter().flat_map(|p| [p.ya.abs(), p.yb.abs()]).max().unwrap_or_else(Q::zero)
    }

    /// ∫_a^b self.
    pub fn integral(&self, a: &Q, b: &Q) -> Q {
        let mut s = Q::zero();
        for p in &self.pieces {
            let lo = if &p.a > a { &p.a } else { a };
            let hi = if &p.b < b { &p.b } else { b };
            if lo < hi {
                s += (hi - lo) * (p.at(lo) + p.at(hi)) / Q::from_integer(2.into());
            }
        }
        s
    }

    /// ∫ |self|^p over the whole line.
    pub fn pow_integral(&self, p: u32) -> Q {
        self.pieces.iter().map(|q| pow_integral_linear(&q.a, &q.b, &q.ya, &q.yb, p)).sum()
    }

    /// sup{|self(x) − self(y)| : |x − y| ≤ δ} over x, y in the hull of the
    /// pieces, for a continuous polygon. The maximum sits at a vertex of the
    /// arrangement of the breakpoint lines with the diagonals y = x and y = x + δ.
    pub fn oscillation(&self, delta: &Q) -> Q {
        let bp = self.breakpoints();
        let mut best = Q::zero();
        let (Some(lo), Some(hi)) = (bp.first().cloned(), bp.last().cloned()) else { return best };
        let mut probe = |x: &Q, y: &Q| {
            if x < &lo || y > &hi {
                return;
            }
            let d = (self.eval(x) - self.eval(y)).abs();
            if d > best {
                best = d;
            }
        };
        for (i, x) in bp.iter().enumerate() {
            probe(x, &(x + delta));
            probe(&(x - delta), x);
            for y in bp[i + 1..].iter().take_while(|y| &(*y - x) <= delta) {
                probe(x, y);
            }
        }
        best
    }
}

impl fmt::Debug for PiecewiseFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.pieces).finish()
    }
}
