use crate::error::{Error, Result};
use crate::scalar::{Field, Reward};

/// Finite discrete distribution over non-negative integer sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeDistribution<F> {
    support: Vec<(i64, F)>,
}

impl<F: Field> SizeDistribution<F> {
    /// Validates and sorts `support` by size. Probabilities must be positive
    /// and sum to one (exactly, for exact scalar types).
    pub fn new(mut support: Vec<(i64, F)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        support.sort_by_key(|(s, _)| *s);
        for w in support.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidDistribution(format!("size {} listed twice", w[0].0)));
            }
        }
        if let Some((s, _)) = support.iter().find(|(s, _)| *s < 0) {
            return Err(Error::InvalidDistribution(format!("negative size {s}")));
        }
        if let Some((s, p)) = support.iter().find(|(_, p)| *p <= F::zero()) {
            return Err(Error::InvalidDistribution(format!("non-positive probability {p:?} on size {s}")));
        }
        let total = support.iter().fold(F::zero(), |a, (_, p)| a + p.clone());
        let gap = if total > F::one() { total.clone() - F::one() } else { F::one() - total.clone() };
        if gap > F::tolerance() {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total:?}, not 1")));
        }
        Ok(SizeDistribution { support })
    }
}

impl<F: Reward> SizeDistribution<F> {
    /// Point mass at `size`.
    pub fn deterministic(size: i64) -> Self {
        assert!(size >= 0, "sizes are non-negative");
        SizeDistribution { support: vec![(size, F::one())] }
    }

    pub fn support(&self) -> &[(i64, F)] {
        &self.support
    }

    /// `Pr[S <= limit]`.
    pub fn prob_at_most(&self, limit: i64) -> F {
        self.support.iter().filter(|(s, _)| *s <= limit).fold(F::zero(), |a, (_, p)| a + p.clone())
    }

    pub fn max_size(&self) -> i64 {
        self.support.last().map_or(0, |(s, _)| *s)
    }

    pub fn is_deterministic(&self) -> bool {
        self.support.len() == 1
    }

    pub fn mean(&self) -> F {
        self.support.iter().fold(F::zero(), |a, (s, p)| a + F::from_int(*s) * p.clone())
    }

    /// Inverse-CDF sample for a uniform draw in `[0, 1)`.
    pub fn sample(&self, uniform: f64) -> i64 {
        let mut acc = 0.0;
        for (s, p) in &self.support {
            acc += p.to_f64();
            if uniform < acc {
                return *s;
            }
        }
        self.max_size()
    }
}

/// `E[min(S, cap)]`.
pub fn truncated_mean<F: Reward>(dist: &SizeDistribution<F>, cap: &F) -> F {
    dist.support().iter().fold(F::zero(), |acc, (s, p)| {
        let s = F::from_int(*s);
        let clipped = if s > *cap { cap.clone() } else { s };
        acc + p.clone() * clipped
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn coin() -> SizeDistribution<Rational> {
        SizeDistribution::new(vec![(10, q(1, 2)), (1, q(1, 2))]).unwrap()
    }

    #[test]
    fn truncated_mean_examples() {
        assert_eq!(truncated_mean(&coin(), &q(4, 1)), q(5, 2));
        assert_eq!(truncated_mean(&SizeDistribution::deterministic(3), &q(4, 1)), q(3, 1));
        assert_eq!(truncated_mean(&coin(), &q(0, 1)), q(0, 1));
    }

    #[test]
    fn rejects_bad_supports() {
        assert!(SizeDistribution::new(vec![(1, q(9, 10))]).is_err());
        assert!(SizeDistribution::new(vec![(1, q(1, 2)), (1, q(1, 2))]).is_err());
        assert!(SizeDistribution::new(vec![(1, q(0, 1)), (2, q(1, 1))]).is_err());
        assert!(SizeDistribution::new(vec![(-1, q(1, 1))]).is_err());
        assert!(SizeDistribution::<Rational>::new(vec![]).is_err());
        assert!(SizeDistribution::new(vec![(1, 0.5f64), (2, 0.5 + 1e-9)]).is_ok());
    }

    #[test]
    fn sorted_support_and_cdf() {
        let d = coin();
        assert_eq!(d.support()[0].0, 1);
        assert_eq!(d.prob_at_most(0), q(0, 1));
        assert_eq!(d.prob_at_most(5), q(1, 2));
        assert_eq!(d.prob_at_most(10), q(1, 1));
        assert_eq!(d.mean(), q(11, 2));
        assert_eq!(d.sample(0.25), 1);
        assert_eq!(d.sample(0.75), 10);
    }
}
