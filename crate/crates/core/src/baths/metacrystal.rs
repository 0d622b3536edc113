//! One-dimensional long-range chain whose band approximates the chiral sawtooth
//! `omega(k) = v k` on the Brillouin zone.

use std::collections::HashSet;

use num_traits::Zero;

use super::harper::{run_exact, BOUNDARY_WINDOW};
use super::integrator::{ExactTrace, Geometry, LinearOperator};
use crate::error::{Error, Result};
use crate::model::LevelChain;
use crate::scalar::{cx, expi, Cx, Real};

/// Smallest admissible hopping range.
pub const MIN_RANGE: usize = 8;

/// Window applied to the truncated Fourier series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MetacrystalWindow {
    None,
    /// `1 - |n| / (M + 1)`.
    #[default]
    Fejer,
    /// `sinc(pi n / (M + 1))`.
    Lanczos,
}

impl MetacrystalWindow {
    fn weight<T: Real>(self, n: usize, range: usize) -> T {
        let x = T::from_count(n) / T::from_count(range + 1);
        match self {
            Self::None => T::one(),
            Self::Fejer => T::one() - x,
            Self::Lanczos if n == 0 => T::one(),
            Self::Lanczos => (T::PI() * x).sin() / (T::PI() * x),
        }
    }
}

/// Hoppings `theta_{-M..=M}` with `H_{n,l} = theta_{n-l}`, so a Bloch wave
/// `e^{i k n}` has frequency `sum_d theta_d e^{-i k d}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetacrystalHoppings<T> {
    range: usize,
    theta: Vec<Cx<T>>,
}

impl<T: Real> MetacrystalHoppings<T> {
    pub fn range(&self) -> usize {
        self.range
    }

    /// `theta_d`; zero beyond the range.
    pub fn get(&self, d: i64) -> Cx<T> {
        if d.unsigned_abs() as usize > self.range {
            Cx::zero()
        } else {
            self.theta[(d + self.range as i64) as usize]
        }
    }

    /// `theta_{-M}, ..., theta_M`.
    pub fn as_slice(&self) -> &[Cx<T>] {
        &self.theta
    }

    /// `sum_d |theta_d|`, a bound on the operator norm.
    pub fn l1_norm(&self) -> T {
        self.theta.iter().map(|z| z.norm()).sum()
    }
}

/// Fourier coefficients of `omega(k) = v k` on `(-pi, pi)`:
/// `theta_0 = 0`, `theta_d = -i v (-1)^d / d`, times the window.
pub fn metacrystal_hoppings<T: Real>(v: T, range_m: usize, window: MetacrystalWindow) -> Result<MetacrystalHoppings<T>> {
    if range_m < MIN_RANGE {
        return Err(Error::InvalidInput(format!("hopping range must be at least {MIN_RANGE}, got {range_m}")));
    }
    if !v.is_finite() {
        return Err(Error::InvalidInput("velocity must be finite".into()));
    }
    let m = range_m as i64;
    let theta = (-m..=m)
        .map(|d| {
            if d == 0 {
                return Cx::zero();
            }
            let sign = if d % 2 == 0 { T::one() } else { -T::one() };
            let w: T = window.weight(d.unsigned_abs() as usize, range_m);
            cx(T::zero(), -v * sign * w / T::lit(d as f64))
        })
        .collect();
    Ok(MetacrystalHoppings { range: range_m, theta })
}

/// Band of the infinite chain at `k`.
pub fn metacrystal_dispersion<T: Real>(h: &MetacrystalHoppings<T>, k: T) -> T {
    let m = h.range as i64;
    (-m..=m).map(|d| (h.get(d) * expi(-k * T::lit(d as f64))).re).sum()
}

/// Group velocity of the band at `k`.
pub fn metacrystal_velocity<T: Real>(h: &MetacrystalHoppings<T>, k: T) -> T {
    let m = h.range as i64;
    (-m..=m)
        .map(|d| {
            let dd = T::lit(d as f64);
            (h.get(d) * expi(-k * dd) * cx(T::zero(), -dd)).re
        })
        .sum()
}

struct ChainOperator<'a, T> {
    theta: &'a MetacrystalHoppings<T>,
    len: usize,
    levels: Vec<(usize, T, T)>,
}

impl<T: Real> LinearOperator<T> for ChainOperator<'_, T> {
    fn dim(&self) -> usize {
        self.len + self.levels.len()
    }

    fn apply(&self, x: &[Cx<T>], out: &mut [Cx<T>]) {
        let m = self.theta.range as i64;
        let len = self.len as i64;
        for n in 0..len {
            let lo = (n - m).max(0);
            let hi = (n + m).min(len - 1);
            let mut acc = Cx::<T>::zero();
            for l in lo..=hi {
                acc = acc + self.theta.get(n - l) * x[l as usize];
            }
            out[n as usize] = acc;
        }
        for (a, &(site, g, w)) in self.levels.iter().enumerate() {
            let i = self.len + a;
            out[i] = x[i] * w + x[site] * g;
            out[site] = out[site] + x[i] * g;
        }
    }
}

/// Exact level amplitudes for levels side-coupled to an open chain of `len`
/// sites `0..len` with hoppings `theta`, bath initially empty, by RK4.
///
/// Level sites are chain sites. Requires `dt (sum |theta| + max kappa) <= 0.05`;
/// fails with `BoundaryReached` once the last sites pick up weight.
pub fn metacrystal_evolve<T: Real>(
    theta: &MetacrystalHoppings<T>,
    len: usize,
    chain: &LevelChain<T>,
    c0: &[Cx<T>],
    times: &[T],
    dt: T,
) -> Result<ExactTrace<T>> {
    if c0.len() != chain.len() {
        return Err(Error::DimensionMismatch { expected: chain.len(), got: c0.len() });
    }
    if len < 2 * BOUNDARY_WINDOW {
        return Err(Error::InvalidInput(format!("chain of {len} sites is too short")));
    }
    let limit = T::lit(0.05) / (theta.l1_norm() + chain.max_kappa());
    if !(dt > T::zero()) || dt > limit * (T::one() + T::lit(1e-12)) {
        return Err(Error::InvalidInput(format!("RK4 step must satisfy 0 < dt <= {limit}")));
    }
    let mut seen = HashSet::new();
    let mut levels = Vec::with_capacity(chain.len());
    for l in chain.levels() {
        if l.site < 0 || l.site as usize >= len {
            return Err(Error::InvalidInput(format!("level site {} lies outside the chain", l.site)));
        }
        if !seen.insert(l.site) {
            return Err(Error::DuplicateSite(l.site));
        }
        levels.push((l.site as usize, l.kappa, l.omega));
    }
    let op = ChainOperator { theta, len, levels };
    let watch: Vec<usize> = (len - BOUNDARY_WINDOW..len).collect();
    run_exact(&op, len, c0, times, dt, &watch, Geometry::Chain { len })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Level;
    use num_complex::Complex;
    use std::f64::consts::PI;

    #[test]
    fn unwindowed_coefficients() {
        let h = metacrystal_hoppings(1.0, 8, MetacrystalWindow::None).unwrap();
        assert_eq!(h.get(0), Complex::new(0.0, 0.0));
        assert!((h.get(1) - Complex::new(0.0, 1.0)).norm() < 1e-15);
        assert!((h.get(2) - Complex::new(0.0, -0.5)).norm() < 1e-15);
        for d in 1..=8 {
            assert!((h.get(-d) - h.get(d).conj()).norm() < 1e-15);
        }
        assert_eq!(h.get(9), Complex::new(0.0, 0.0));
    }

    #[test]
    fn zero_velocity_and_short_range() {
        let h = metacrystal_hoppings(0.0, 10, MetacrystalWindow::Lanczos).unwrap();
        assert!(h.as_slice().iter().all(|z| z.norm() == 0.0));
        assert!(metacrystal_hoppings(1.0, 7, MetacrystalWindow::Fejer).is_err());
    }

    #[test]
    fn fejer_branch_is_monotone_in_the_interior() {
        let h = metacrystal_hoppings(1.0, 32, MetacrystalWindow::Fejer).unwrap();
        let pts = 2000;
        let good = (0..pts)
            .map(|j| -0.9 * PI + 1.8 * PI * (j as f64 + 0.5) / pts as f64)
            .filter(|&k| metacrystal_velocity(&h, k) > 0.0)
            .count();
        assert!(good as f64 >= 0.99 * pts as f64);
        assert!((metacrystal_dispersion(&h, 0.3) - 0.3).abs() < 0.05);
    }

    #[test]
    fn decoupled_levels_stay_put() {
        let h = metacrystal_hoppings(1.0f64, 16, MetacrystalWindow::Fejer).unwrap();
        let chain = LevelChain::new(vec![Level::new(0.0, 0.0, 20), Level::new(0.1, 0.0, 25)]).unwrap();
        let c0 = [Complex::new(0.0, 0.6), Complex::new(0.8, 0.0)];
        let tr = metacrystal_evolve(&h, 80, &chain, &c0, &[0.0, 2.0, 4.0], 0.002).unwrap();
        for j in 0..3 {
            assert!((tr.occupation(0)[j] - 0.36).abs() < 1e-9);
        }
    }

    #[test]
    fn single_level_rate() {
        let v = 1.0;
        let kappa = 0.2;
        let h = metacrystal_hoppings(v, 32, MetacrystalWindow::Fejer).unwrap();
        // far from the upstream end: the steep fold of the windowed band near
        // k = pi carries a small backward-moving component
        let chain = LevelChain::new(vec![Level::new(0.0, kappa, 150)]).unwrap();
        let dt = 0.05 / (h.l1_norm() + kappa);
        let times: Vec<f64> = (0..=20).map(|j| j as f64 * 3.0).collect();
        let tr = metacrystal_evolve(&h, 300, &chain, &[Complex::new(1.0, 0.0)], &times, dt).unwrap();
        assert!(tr.norm_drift < 1e-6);
        // least-squares slope of ln P
        let p = tr.occupation(0);
        let (n, sx, sy, sxx, sxy) = times.iter().zip(&p).skip(3).fold((0.0, 0.0, 0.0, 0.0, 0.0), |a, (&t, &q)| {
            (a.0 + 1.0, a.1 + t, a.2 + q.ln(), a.3 + t * t, a.4 + t * q.ln())
        });
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let expected = kappa * kappa / v;
        assert!((-slope - expected).abs() < 0.1 * expected, "rate {} vs {expected}", -slope);
    }
}
