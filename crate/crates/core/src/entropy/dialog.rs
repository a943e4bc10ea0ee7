use crate::baire::{pair_names, LengthFn, Name};
use crate::machine::{dialog_length_bound, metered_run, Dialog, EqualityFromMetric, OracleProgram, RunningTime};
use crate::num::{pow2, Q};
use crate::reprs::{CauchyMetric, MetricSpace};
use crate::strings::BinStr;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct DialogCoverReport {
    pub n: usize,
    pub samples: usize,
    pub classes: usize,
    /// 2(T(T+1)+1) for T = T(l, n+1).
    pub bound_exp: u64,
    pub within_bound: bool,
    /// Class index of each sample, numbered by first appearance.
    pub class_of: Vec<usize>,
    /// Largest distance from a sample to its class representative.
    pub max_radius: Q,
}

impl DialogCoverReport {
    /// classes ≤ 2^{bound_exp}.
    fn count_fits(classes: usize, bound_exp: u64) -> bool {
        bound_exp >= 64 || (classes as u64) <= 1u64 << bound_exp
    }
}

/// Groups the sample by the dialog of `eq` on ⟨ψ,ψ⟩ with input 1^{n+1} under
/// the budget T(l, n+1), and checks that every name lies within 2^{−n} of the
/// first name of its class. `l` bounds the paired names ⟨ψ,ψ⟩.
pub fn dialog_cover_experiment(
    sample: &[Name],
    eq: &dyn OracleProgram,
    t: &RunningTime,
    l: &LengthFn,
    n: usize,
    exact_dist: &(dyn Fn(usize, usize) -> Q + Sync),
) -> Result<DialogCoverReport> {
    let input = BinStr::ones(n + 1);
    let dialogs: Vec<Dialog> = sample
        .par_iter()
        .map(|psi| metered_run(eq, &pair_names(psi, psi), &input, t, l).map(|r| r.dialog))
        .collect::<Result<_>>()?;
    let mut ids: HashMap<BinStr, usize> = HashMap::new();
    let mut reps = Vec::new();
    let mut class_of = Vec::with_capacity(sample.len());
    for (k, d) in dialogs.iter().enumerate() {
        let next = ids.len();
        let c = *ids.entry(d.encode()).or_insert(next);
        if c == reps.len() {
            reps.push(k);
        }
        class_of.push(c);
    }
    let radius = pow2(-(n as i64));
    let mut max_radius = Q::from_integer(0.into());
    for (k, &c) in class_of.iter().enumerate() {
        let d = exact_dist(reps[c], k);
        if d > radius {
            return Err(Error::ContractViolation(format!(
                "samples {} and {k} share a dialog at n = {n} but lie {d} apart",
                reps[c]
            )));
        }
        if d > max_radius {
            max_radius = d;
        }
    }
    let bound_exp = dialog_length_bound(t.eval(l, n + 1));
    Ok(DialogCoverReport {
        n,
        samples: sample.len(),
        classes: reps.len(),
        bound_exp,
        within_bound: DialogCoverReport::count_fits(reps.len(), bound_exp),
        class_of,
        max_radius,
    })
}

/// The equality program derived from the Cauchy metric on `space` and its running time.
pub fn cauchy_equality<M: MetricSpace + 'static>(space: Arc<M>) -> (EqualityFromMetric, RunningTime) {
    let eq = EqualityFromMetric::new(Arc::new(CauchyMetric::new(space)), CauchyMetric::<M>::running_time());
    let t = eq.running_time(2);
    (eq, t)
}

/// `count` dyadic rationals k/2^s in [0,1] with s ≤ max_scale, seeded.
pub fn sample_unit_dyadics(seed: u64, count: usize, max_scale: u32) -> Vec<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let s = rng.gen_range(0..=max_scale);
            let k: u64 = rng.gen_range(0..=1u64 << s);
            Q::new(k.into(), (1u64 << s).into())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baire::LengthFn;
    use crate::reprs::{cauchy_name_of, UnitInterval};
    use num_traits::Signed;

    #[test]
    fn identical_names_form_one_class() {
        let m = Arc::new(UnitInterval);
        let (eq, t) = cauchy_equality(m.clone());
        let phi = cauchy_name_of(m, crate::num::q(1, 3));
        let sample = vec![phi.clone(); 5];
        let l = LengthFn::identity().pair_len(&LengthFn::identity());
        let r = dialog_cover_experiment(&sample, &eq, &t, &l, 3, &|_, _| Q::from_integer(0.into())).unwrap();
        assert_eq!(r.classes, 1);
        assert!(r.within_bound);
    }

    #[test]
    fn unit_interval_sample() {
        let m = Arc::new(UnitInterval);
        let (eq, t) = cauchy_equality(m.clone());
        let xs = sample_unit_dyadics(7, 60, 8);
        let sample: Vec<Name> = xs.iter().map(|x| cauchy_name_of(m.clone(), x.clone())).collect();
        let l = LengthFn::identity().pair_len(&LengthFn::identity());
        for n in 0..=4 {
            let r = dialog_cover_experiment(&sample, &eq, &t, &l, n, &|a, b| (&xs[a] - &xs[b]).abs()).unwrap();
            assert!(r.within_bound);
            assert!(r.max_radius <= pow2(-(n as i64)));
        }
    }

    #[test]
    fn sampling_is_seeded() {
        assert_eq!(sample_unit_dyadics(3, 10, 6), sample_unit_dyadics(3, 10, 6));
        assert!(sample_unit_dyadics(3, 50, 6).iter().all(|x| !x.is_negative() && *x <= Q::from_integer(1.into())));
    }
}
