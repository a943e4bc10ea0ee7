//! Uniformly dense sequences and the representation of compact spaces built on them.

mod name;

pub use name::{
    compact_metric, compact_name, compact_name_of, compact_to_relativized, lower_bound_clause, relativized_to_compact,
    unit_interval_params, unit_interval_size_fn, ClauseOutcome, CompactMetric, CompactParams, COMPACT_C,
};

use crate::entropy::PointCloud;
use crate::num::{ceil_lb, pow2, Q};

/// A finite sequence of cloud points with the entropy exponents it is checked against.
#[derive(Clone, Debug)]
pub struct UniformSeqSpec {
    /// Cloud indices in sequence order; the last element repeats.
    pub seq: Vec<usize>,
    pub size: Vec<u32>,
    pub horizon: usize,
}

impl UniformSeqSpec {
    pub fn at(&self, i: u64) -> usize {
        self.seq[(i as usize).min(self.seq.len() - 1)]
    }
}

/// Levels I_0 ⊆ I_1 ⊆ … ⊆ I_{horizon+1}, each a maximal subset with pairwise
/// distances > 2^{−n+1} grown greedily from the previous one; the sequence
/// lists each level's new points after the earlier ones.
pub fn greedy_uniform_seq(k: &PointCloud, size: Vec<u32>, horizon: usize) -> UniformSeqSpec {
    assert!(!k.is_empty(), "empty cloud");
    let mut seq: Vec<usize> = Vec::new();
    for n in 0..=horizon as i64 + 1 {
        let t = pow2(1 - n);
        for p in 0..k.len() {
            if !seq.contains(&p) && seq.iter().all(|&c| k.d(c, p) > t) {
                seq.push(p);
            }
        }
    }
    UniformSeqSpec { seq, size, horizon }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DensityFailure {
    /// Some grid point is farther than 2^{−n} from the first 2^{size(n)+⌈lb(n+1)⌉} elements.
    Covering { n: usize },
    /// The first 2^k elements hold no ⌈2^{k−1}⌉ points with pairwise distance > 2^{−n}.
    Spanning { n: usize, k: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityCheck {
    pub covering: bool,
    pub spanning: bool,
    pub first_failure: Option<DensityFailure>,
}

/// Largest prefix length examined by the checks.
const PREFIX_CAP: u32 = 16;

/// Checks (c) against `grid` for n < horizon and (s) for 1 ≤ n < horizon.
/// The spanning count uses the in-order greedy selection.
pub fn check_uniformly_dense<P>(
    seq: &dyn Fn(u64) -> P,
    d: &dyn Fn(&P, &P) -> Q,
    size: &[u32],
    grid: &[P],
    horizon: usize,
) -> DensityCheck {
    let mut out = DensityCheck { covering: true, spanning: true, first_failure: None };
    let fail = |out: &mut DensityCheck, f: DensityFailure| {
        match f {
            DensityFailure::Covering { .. } => out.covering = false,
            DensityFailure::Spanning { .. } => out.spanning = false,
        }
        if out.first_failure.is_none() {
            out.first_failure = Some(f);
        }
    };
    for n in 0..horizon.min(size.len()) {
        let r = pow2(-(n as i64));
        let e = (size[n] + ceil_lb(n as u64 + 1)).min(PREFIX_CAP);
        let prefix: Vec<P> = (0..1u64 << e).map(seq).collect();
        if !grid.iter().all(|g| prefix.iter().any(|p| d(p, g) <= r)) {
            fail(&mut out, DensityFailure::Covering { n });
        }
        if n == 0 {
            continue;
        }
        for k in 0..=size[n - 1].min(PREFIX_CAP) {
            let need = if k == 0 { 1 } else { 1usize << (k - 1) };
            let mut chosen: Vec<P> = Vec::new();
            for i in 0..1u64 << k {
                let p = seq(i);
                if chosen.iter().all(|c| d(c, &p) > r) {
                    chosen.push(p);
                }
            }
            if chosen.len() < need {
                fail(&mut out, DensityFailure::Spanning { n, k });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{unit_grid, unit_interval_size};
    use crate::num::{q, qi};
    use crate::reprs::q_seq;
    use num_traits::Signed;

    fn abs(a: &Q, b: &Q) -> Q {
        (a - b).abs()
    }

    fn measured(h: usize) -> Vec<u32> {
        (0..=h as u32 + 1).map(unit_interval_size).collect()
    }

    #[test]
    fn q_seq_is_uniformly_dense() {
        let grid = unit_grid(9);
        let r = check_uniformly_dense(&q_seq, &abs, &measured(8), &grid, 8);
        assert_eq!(r, DensityCheck { covering: true, spanning: true, first_failure: None });
    }

    #[test]
    fn constant_and_half_sequences_fail() {
        let grid = unit_grid(6);
        let r = check_uniformly_dense(&|_| qi(0), &abs, &measured(5), &grid, 5);
        assert!(!r.covering);
        assert_eq!(r.first_failure, Some(DensityFailure::Covering { n: 1 }));
        let r = check_uniformly_dense(&|i| q_seq(i) / qi(2), &abs, &measured(5), &grid, 5);
        assert!(!r.covering);
    }

    #[test]
    fn greedy_on_dyadic_grid() {
        let xs = unit_grid(3);
        let k = PointCloud::line(&xs);
        let spec = greedy_uniform_seq(&k, measured(4), 4);
        let r = check_uniformly_dense(&|i| xs[spec.at(i)].clone(), &abs, &spec.size, &xs, 4);
        assert!(r.covering && r.spanning, "{r:?}");
    }

    #[test]
    fn greedy_small_clouds() {
        let one = PointCloud::line(&[q(1, 3)]);
        let s = greedy_uniform_seq(&one, vec![0; 4], 3);
        assert_eq!((s.at(0), s.at(7)), (0, 0));
        let two = PointCloud::line(&[qi(0), qi(1)]);
        let s = greedy_uniform_seq(&two, vec![0, 1, 1], 2);
        // 1 > 2^{−1+1} fails, so the second point enters at level 2
        assert_eq!(s.seq, vec![0, 1]);
    }
}
