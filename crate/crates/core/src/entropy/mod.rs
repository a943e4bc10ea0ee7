//! Covering numbers, packings and the entropy experiments.

mod dialog;
mod lorentz;

pub use dialog::{cauchy_equality, dialog_cover_experiment, sample_unit_dyadics, DialogCoverReport};
pub use lorentz::{lorentz_bounds, ApproxSetSpec, LorentzBounds};

use crate::num::{ceil_lb, floor_lb, pow2, Q};
use crate::{Error, Result};
use num_traits::Signed;
use std::fmt;

/// Largest cloud handled by exact set cover and exact packing.
pub const EXACT_LIMIT: usize = 20;

/// A finite metric space given by its distance matrix.
#[derive(Clone)]
pub struct PointCloud {
    labels: Vec<String>,
    /// Distance matrix, empty for clouds on the line.
    dist: Vec<Vec<Q>>,
    line: Option<Vec<Q>>,
}

impl fmt::Debug for PointCloud {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PointCloud").field("points", &self.labels).finish()
    }
}

impl PointCloud {
    pub fn from_points<P: fmt::Debug>(points: &[P], d: impl Fn(&P, &P) -> Q) -> Self {
        let dist = points.iter().map(|a| points.iter().map(|b| d(a, b)).collect()).collect();
        let labels = points.iter().map(|p| format!("{p:?}")).collect();
        PointCloud { labels, dist, line: None }
    }

    /// Points on the real line.
    pub fn line(xs: &[Q]) -> Self {
        PointCloud { labels: xs.iter().map(|x| x.to_string()).collect(), dist: Vec::new(), line: Some(xs.to_vec()) }
    }

    /// Vectors under the maximum norm; shorter vectors are padded with zeros.
    pub fn sup(points: &[Vec<Q>]) -> Self {
        PointCloud::from_points(points, |a, b| sup_dist(a, b))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn d(&self, i: usize, j: usize) -> Q {
        match &self.line {
            Some(xs) => (&xs[i] - &xs[j]).abs(),
            None => self.dist[i][j].clone(),
        }
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// First (i, j, k) with d(i,k) > d(i,j) + d(j,k), or an asymmetric pair.
    pub fn metric_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        for i in 0..n {
            if !self.d(i, i).is_zero_q() {
                return Some((i, i, i));
            }
            for j in 0..n {
                if self.d(i, j) != self.d(j, i) || self.d(i, j).is_negative() {
                    return Some((i, j, i));
                }
                for k in 0..n {
                    if self.d(i, k) > self.d(i, j) + self.d(j, k) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }
}

trait ZeroQ {
    fn is_zero_q(&self) -> bool;
}

impl ZeroQ for Q {
    fn is_zero_q(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

pub(crate) fn sup_dist(a: &[Q], b: &[Q]) -> Q {
    let zero = Q::from_integer(0.into());
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| (a.get(k).unwrap_or(&zero) - b.get(k).unwrap_or(&zero)).abs())
        .max()
        .unwrap_or(zero)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverMode {
    Exact,
    Greedy,
}

impl fmt::Display for CoverMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoverMode::Exact => "exact",
            CoverMode::Greedy => "greedy",
        })
    }
}

/// A cover by closed 2^{−n}-balls centred at cloud points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub count: usize,
    /// ⌈lb count⌉
    pub exp: u32,
    pub mode: CoverMode,
    pub centers: Vec<usize>,
}

fn balls(k: &PointCloud, r: &Q) -> Vec<u32> {
    (0..k.len())
        .map(|c| (0..k.len()).filter(|&p| k.d(c, p) <= *r).fold(0u32, |m, p| m | 1 << p))
        .collect()
}

fn set_cover(balls: &[u32], all: u32, k: usize, covered: u32, chosen: &mut Vec<usize>) -> bool {
    if covered == all {
        return true;
    }
    if k == 0 {
        return false;
    }
    let p = (!covered & all).trailing_zeros();
    for (c, &b) in balls.iter().enumerate() {
        if b >> p & 1 == 1 {
            chosen.push(c);
            if set_cover(balls, all, k - 1, covered | b, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

fn line_cover(xs: &[Q], r: &Q) -> Vec<usize> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].cmp(&xs[b]));
    let mut centers = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let reach = &xs[order[i]] + r;
        let mut c = i;
        while c + 1 < order.len() && xs[order[c + 1]] <= reach {
            c += 1;
        }
        centers.push(order[c]);
        let right = &xs[order[c]] + r;
        while i < order.len() && xs[order[i]] <= right {
            i += 1;
        }
    }
    centers
}

fn greedy_cover(k: &PointCloud, r: &Q) -> Vec<usize> {
    if k.is_empty() {
        return Vec::new();
    }
    let mut centers = vec![0];
    let mut near: Vec<Q> = (0..k.len()).map(|p| k.d(0, p)).collect();
    loop {
        let (far, dist) = near.iter().enumerate().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0))).unwrap();
        if dist <= r {
            return centers;
        }
        centers.push(far);
        for (p, v) in near.iter_mut().enumerate() {
            let d = k.d(far, p);
            if d < *v {
                *v = d;
            }
        }
    }
}

/// Least (exact) or witnessed (greedy, farthest point first) number of closed
/// 2^{−n}-balls centred at cloud points that cover the cloud. Exact mode works
/// for clouds on the line of any size and for other clouds up to 20 points.
pub fn covering_number(k: &PointCloud, n: i64, mode: CoverMode) -> Result<Cover> {
    let r = pow2(-n);
    let centers = match mode {
        CoverMode::Greedy => greedy_cover(k, &r),
        CoverMode::Exact => match &k.line {
            Some(xs) => line_cover(xs, &r),
            None => {
                if k.len() > EXACT_LIMIT {
                    return Err(Error::SizeExceeded { size: k.len(), limit: EXACT_LIMIT });
                }
                let b = balls(k, &r);
                let all = if k.is_empty() { 0 } else { u32::MAX >> (32 - k.len()) };
                let mut chosen = Vec::new();
                let mut size = 0;
                while !set_cover(&b, all, size, 0, &mut chosen) {
                    size += 1;
                }
                chosen
            }
        },
    };
    Ok(Cover { count: centers.len(), exp: ceil_lb(centers.len() as u64), mode, centers })
}

/// Greedy maximal subset, in index order, with pairwise distances > 2^{−n+1}.
pub fn packing_witness(k: &PointCloud, n: i64) -> Vec<usize> {
    let t = pow2(1 - n);
    let mut out: Vec<usize> = Vec::new();
    for p in 0..k.len() {
        if out.iter().all(|&c| k.d(c, p) > t) {
            out.push(p);
        }
    }
    out
}

fn max_independent(adj: &[u32], cand: u32, size: usize, best: &mut usize) {
    if cand == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + cand.count_ones() as usize <= *best {
        return;
    }
    let p = cand.trailing_zeros();
    max_independent(adj, cand & !(1 << p) & !adj[p as usize], size + 1, best);
    max_independent(adj, cand & !(1 << p), size, best);
}

/// Size of a largest subset with pairwise distances > 2^{−n+1}.
pub fn max_packing(k: &PointCloud, n: i64) -> Result<usize> {
    if k.len() > EXACT_LIMIT {
        return Err(Error::SizeExceeded { size: k.len(), limit: EXACT_LIMIT });
    }
    let t = pow2(1 - n);
    let adj: Vec<u32> = (0..k.len())
        .map(|a| (0..k.len()).filter(|&b| b != a && k.d(a, b) <= t).fold(0u32, |m, b| m | 1 << b))
        .collect();
    let all = if k.is_empty() { 0 } else { u32::MAX >> (32 - k.len()) };
    let mut best = 0;
    max_independent(&adj, all, 0, &mut best);
    Ok(best)
}

/// The spanning exponent ⌊lb size⌋ of a packing.
pub fn spanning_exp(size: usize) -> u32 {
    floor_lb(size as u64)
}

/// ⌊lb(largest packing)⌋ ≤ ⌈lb(exact cover)⌉.
pub fn check_spanning_le_covering(k: &PointCloud, n: i64) -> Result<bool> {
    let pack = if k.len() <= EXACT_LIMIT { max_packing(k, n)? } else { packing_witness(k, n).len() };
    Ok(spanning_exp(pack) <= covering_number(k, n, CoverMode::Exact)?.exp)
}

/// The grid {k/2^{n+1}} of [0,1].
pub fn unit_grid(n: u32) -> Vec<Q> {
    (0..=1u64 << (n + 1)).map(|k| Q::new(k.into(), (1u64 << (n + 1)).into())).collect()
}

/// Measured metric entropy of [0,1]: the exact cover exponent of the grid at resolution 2^{−n−1}.
pub fn unit_interval_size(n: u32) -> u32 {
    covering_number(&PointCloud::line(&unit_grid(n)), n as i64, CoverMode::Exact).expect("line clouds are exact").exp
}

/// Node values ±1 following the bits of j: PL functions on a common grid of
/// `dim` nodes with sup distance 2 between distinct j.
pub fn sign_pattern_family(dim: usize) -> impl Fn(usize) -> Vec<Q> {
    move |j| (0..dim).map(|b| Q::from_integer(if j >> b & 1 == 1 { 1 } else { -1 }.into())).collect()
}

/// Faber–Schauder style peaks with disjoint supports: the j-th unit vector.
pub fn peak_family() -> impl Fn(usize) -> Vec<Q> {
    |j| {
        let mut v = vec![Q::from_integer(0.into()); j + 1];
        v[j] = Q::from_integer(1.into());
        v
    }
}

/// {0} together with the shells 2^{−i+1}·x_j for i < horizon, shell i getting
/// 2^{μ(i)} − 2^{μ(i−1)} fresh elements of the family.
pub fn build_large_compact(mu: &[u32], family: &dyn Fn(usize) -> Vec<Q>, horizon: usize) -> Result<PointCloud> {
    if mu.len() < horizon {
        return Err(Error::InsufficientTabulation { have: mu.len(), need: horizon });
    }
    if mu.windows(2).take(horizon.saturating_sub(1)).any(|w| w[0] > w[1]) {
        return Err(Error::ParameterViolation("μ must be non-decreasing".into()));
    }
    if mu.iter().take(horizon).any(|&m| m > 16) {
        return Err(Error::ParameterViolation("μ too large to materialize".into()));
    }
    let mut points = vec![Vec::new()];
    let mut next = 0;
    let mut prev = 0u64;
    for (i, &m) in mu.iter().enumerate().take(horizon) {
        let scale = pow2(1 - i as i64);
        let total = 1u64 << m;
        for _ in prev..total {
            points.push(family(next).iter().map(|v| v * &scale).collect());
            next += 1;
        }
        prev = total;
    }
    Ok(PointCloud::sup(&points))
}
