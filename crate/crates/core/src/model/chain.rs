use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// One discrete level side-coupled to the bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level<T> {
    pub omega: T,
    pub kappa: T,
    pub site: i64,
}

impl<T> Level<T> {
    pub fn new(omega: T, kappa: T, site: i64) -> Self {
        Self { omega, kappa, site }
    }
}

/// Non-empty list of levels with pairwise distinct attachment sites and
/// non-negative couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelChain<T> {
    levels: Vec<Level<T>>,
}

impl<T: Real> LevelChain<T> {
    pub fn new(levels: Vec<Level<T>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidInput("a level chain needs at least one level".into()));
        }
        let mut seen = HashSet::with_capacity(levels.len());
        for l in &levels {
            if !l.omega.is_finite() || !l.kappa.is_finite() {
                return Err(Error::InvalidInput("level parameters must be finite".into()));
            }
            if l.kappa < T::zero() {
                return Err(Error::InvalidInput(format!("coupling must be non-negative, got {}", l.kappa)));
            }
            if !seen.insert(l.site) {
                return Err(Error::DuplicateSite(l.site));
            }
        }
        Ok(Self { levels })
    }

    /// `n` levels at `omega` with coupling `kappa` on sites `0, spacing, 2 spacing, ...`.
    pub fn uniform(n: usize, omega: T, kappa: T, spacing: i64) -> Result<Self> {
        Self::new((0..n).map(|a| Level::new(omega, kappa, a as i64 * spacing)).collect())
    }

    pub fn levels(&self) -> &[Level<T>] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn max_kappa(&self) -> T {
        self.levels.iter().map(|l| l.kappa).fold(T::zero(), T::max)
    }

    /// Chain sorted by ascending site, and `order` with `order[i]` the original
    /// index of sorted level `i`.
    pub fn sorted_by_site(&self) -> (Self, Vec<usize>) {
        let mut order: Vec<usize> = (0..self.levels.len()).collect();
        order.sort_by_key(|&i| self.levels[i].site);
        let levels = order.iter().map(|&i| self.levels[i]).collect();
        (Self { levels }, order)
    }

    pub fn is_sorted_by_site(&self) -> bool {
        self.levels.windows(2).all(|w| w[0].site < w[1].site)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_negative_coupling() {
        let dup = LevelChain::new(vec![Level::new(0.0, 0.1, 3), Level::new(1.0, 0.1, 3)]);
        assert_eq!(dup, Err(Error::DuplicateSite(3)));
        assert!(LevelChain::new(vec![Level::new(0.0, -0.1, 0)]).is_err());
        assert!(LevelChain::<f64>::new(vec![]).is_err());
        assert!(LevelChain::new(vec![Level::new(0.0, 0.0, 0)]).is_ok());
    }

    #[test]
    fn sorting_records_permutation() {
        let c = LevelChain::new(vec![Level::new(0.0, 0.1, 5), Level::new(1.0, 0.2, -2), Level::new(2.0, 0.3, 1)]).unwrap();
        let (s, order) = c.sorted_by_site();
        assert_eq!(order, vec![1, 2, 0]);
        assert!(s.is_sorted_by_site());
        for (i, &o) in order.iter().enumerate() {
            assert_eq!(s.levels()[i], c.levels()[o]);
        }
    }
}
