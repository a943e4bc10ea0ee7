use crate::num::{pow2, q_to_f64, Q};
use crate::{Error, Result};
use num_traits::Signed;

/// A tabulated non-increasing positive sequence δ_0, δ_1, …
#[derive(Clone, Debug)]
pub struct ApproxSetSpec {
    delta: Vec<Q>,
}

impl ApproxSetSpec {
    pub fn new(delta: Vec<Q>) -> Result<Self> {
        if delta.is_empty() || delta.iter().any(|d| !d.is_positive()) {
            return Err(Error::ParameterViolation("δ must be positive".into()));
        }
        if delta.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::ParameterViolation("δ must be non-increasing".into()));
        }
        Ok(ApproxSetSpec { delta })
    }

    /// δ_k = 2^{−k} for k < len.
    pub fn geometric(len: usize) -> Self {
        ApproxSetSpec { delta: (0..len).map(|k| pow2(-(k as i64))).collect() }
    }

    pub fn delta(&self) -> &[Q] {
        &self.delta
    }

    /// N_0 = 0 and N_i = min{k | δ_k ≤ 2^{−i}}.
    pub fn big_n(&self, i: usize) -> Result<usize> {
        if i == 0 {
            return Ok(0);
        }
        let t = pow2(-(i as i64));
        self.delta
            .iter()
            .position(|d| *d <= t)
            .ok_or(Error::InsufficientTabulation { have: self.delta.len(), need: self.delta.len() + 1 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Natural-log bounds on the entropy H_ε of the full approximation set at
/// ε = 2^{−n}, j = n + 2. Summands with ΔN_i = 0 are taken as 0.
pub fn lorentz_bounds(spec: &ApproxSetSpec, n: usize) -> Result<LorentzBounds> {
    let j = n + 2;
    let big: Vec<usize> = (0..=j).map(|i| spec.big_n(i)).collect::<Result<_>>()?;
    let ln2 = std::f64::consts::LN_2;
    let lower = if j >= 4 { ln2 * big[1..=j - 3].iter().map(|&v| v as f64).sum::<f64>() } else { 0.0 };
    let nj = big[j] as f64;
    let mut upper = ln2 * big[1..=j].iter().map(|&v| v as f64).sum::<f64>();
    for i in 0..j {
        let dn = big[i + 1] - big[i];
        if dn > 0 && big[i] > 0 {
            upper += big[i] as f64 * (nj / dn as f64).ln();
        }
    }
    upper += big[1] as f64 * q_to_f64(&spec.delta[0]).ln();
    upper += nj * 9f64.ln();
    Ok(LorentzBounds { lower, upper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::q;
    use proptest::prelude::*;

    #[test]
    fn geometric_sequence() {
        let s = ApproxSetSpec::geometric(20);
        for i in 0..10 {
            assert_eq!(s.big_n(i).unwrap(), i);
        }
        let b = lorentz_bounds(&s, 3).unwrap();
        let ln = f64::ln;
        assert!((b.lower - 3.0 * ln(2.0)).abs() < 1e-12);
        // 15 ln 2 + (1+2+3+4) ln 5 + 1·ln 1 + 5 ln 9
        let want = 15.0 * ln(2.0) + 10.0 * ln(5.0) + 5.0 * ln(9.0);
        assert!((b.upper - want).abs() < 1e-9, "{} vs {want}", b.upper);
    }

    #[test]
    fn constant_until_drop() {
        let s = ApproxSetSpec::new(vec![q(1, 1), q(1, 1), q(1, 1), q(1, 2), q(1, 64)]).unwrap();
        assert_eq!(s.big_n(1).unwrap(), 3);
        assert_eq!(s.big_n(2).unwrap(), 4);
        assert_eq!(s.big_n(6).unwrap(), 4);
        assert!(matches!(s.big_n(7), Err(Error::InsufficientTabulation { .. })));
        let b = lorentz_bounds(&s, 2).unwrap();
        // N = 0,3,4,4,4: lower ln2·N_1, upper with the ΔN = 0 blocks dropped
        let ln = f64::ln;
        assert!((b.lower - 3.0 * ln(2.0)).abs() < 1e-12);
        let want = 15.0 * ln(2.0) + 3.0 * ln(4.0) + 4.0 * ln(9.0);
        assert!((b.upper - want).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_sequences() {
        assert!(ApproxSetSpec::new(vec![q(1, 2), q(1, 1)]).is_err());
        assert!(ApproxSetSpec::new(vec![q(0, 1)]).is_err());
        assert!(lorentz_bounds(&ApproxSetSpec::geometric(4), 3).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn lower_below_upper(steps in prop::collection::vec(0u32..3, 1..40), head in 0i64..4, n in 0usize..=8) {
            // δ_0 = 2^head, then halving by 0, 1 or 2 bits per step
            let mut e = head;
            let mut delta = vec![pow2(e)];
            for s in steps {
                e -= s as i64;
                delta.push(pow2(e));
            }
            while e > -(n as i64) - 3 {
                e -= 1;
                delta.push(pow2(e));
            }
            let b = lorentz_bounds(&ApproxSetSpec::new(delta).unwrap(), n).unwrap();
            prop_assert!(b.lower <= b.upper + 1e-9);
        }
    }
}
