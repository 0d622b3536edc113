use crate::error::{Error, Result};
use crate::scalar::Real;

/// Minimum number of samples in a tabulated branch.
pub const MIN_TABULATED_SAMPLES: usize = 16;

const BISECTION_ITERATIONS: usize = 80;

/// Band dispersion `omega(k)` of a one-dimensional bath over the Brillouin zone.
#[derive(Debug, Clone, PartialEq)]
pub enum Dispersion<T> {
    /// `2 hopping cos k`: nearest-neighbour wire with time-reversal symmetry.
    CosineBand { hopping: T },
    /// `omega0 + velocity k` on `[-pi, pi)`, repeated periodically.
    ChiralLinear { velocity: T, omega0: T },
    /// Floquet quasi-energy `(pi + k) / period (mod 2 pi / period)`.
    FloquetSawtooth { period: T },
    /// Numerically computed increasing branch (e.g. an edge state).
    TabulatedChiral(TabulatedBranch<T>),
}

/// Resonant Bloch number and group velocity for one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance<T> {
    pub k: T,
    pub velocity: T,
}

impl<T: Real> Dispersion<T> {
    pub fn cosine(hopping: T) -> Result<Self> {
        if !(hopping > T::zero()) || !hopping.is_finite() {
            return Err(Error::InvalidInput(format!("cosine band hopping must be positive, got {hopping}")));
        }
        Ok(Self::CosineBand { hopping })
    }

    pub fn chiral_linear(velocity: T, omega0: T) -> Result<Self> {
        if !(velocity > T::zero()) || !velocity.is_finite() || !omega0.is_finite() {
            return Err(Error::InvalidInput(format!("chiral velocity must be positive, got {velocity}")));
        }
        Ok(Self::ChiralLinear { velocity, omega0 })
    }

    pub fn floquet(period: T) -> Result<Self> {
        if !(period > T::zero()) || !period.is_finite() {
            return Err(Error::InvalidInput(format!("Floquet period must be positive, got {period}")));
        }
        Ok(Self::FloquetSawtooth { period })
    }

    pub fn tabulated(k: Vec<T>, omega: Vec<T>) -> Result<Self> {
        TabulatedBranch::new(k, omega).map(Self::TabulatedChiral)
    }

    /// True for the unidirectional variants.
    pub fn is_chiral(&self) -> bool {
        !matches!(self, Self::CosineBand { .. })
    }

    /// `omega(k)`. Tabulated branches return NaN outside their sampled window.
    pub fn omega(&self, k: T) -> T {
        match self {
            Self::CosineBand { hopping } => T::lit(2.0) * *hopping * k.cos(),
            Self::ChiralLinear { velocity, omega0 } => *omega0 + *velocity * wrap_bz(k),
            Self::FloquetSawtooth { period } => (T::PI() + wrap_bz(k)) / *period,
            Self::TabulatedChiral(b) => b.eval(k).unwrap_or(T::nan()),
        }
    }

    /// `d omega / dk`; centred difference of the interpolant for tabulated branches.
    pub fn group_velocity(&self, k: T) -> T {
        match self {
            Self::CosineBand { hopping } => -T::lit(2.0) * *hopping * k.sin(),
            Self::ChiralLinear { velocity, .. } => *velocity,
            Self::FloquetSawtooth { period } => T::one() / *period,
            Self::TabulatedChiral(b) => b.centered_slope(k).unwrap_or(T::nan()),
        }
    }

    /// Closed band interval `[lo, hi]` spanned by `omega`.
    pub fn band_range(&self) -> (T, T) {
        match self {
            Self::CosineBand { hopping } => (-T::lit(2.0) * *hopping, T::lit(2.0) * *hopping),
            Self::ChiralLinear { velocity, omega0 } => (*omega0 - *velocity * T::PI(), *omega0 + *velocity * T::PI()),
            Self::FloquetSawtooth { period } => (T::zero(), T::TAU() / *period),
            Self::TabulatedChiral(b) => (b.omega[0], *b.omega.last().expect("non-empty branch")),
        }
    }

    /// Solves `omega(k) = level` on a chiral branch.
    ///
    /// Linear and Floquet bands are inverted in closed form (Floquet levels are
    /// first folded into the quasi-energy zone); tabulated branches are bisected.
    pub fn solve_resonance(&self, level: T) -> Result<Resonance<T>> {
        let (lo, hi) = self.band_range();
        let out_of_band = || Error::OutOfBand {
            omega: level.to_f64().unwrap_or(f64::NAN),
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        };
        if !level.is_finite() {
            return Err(out_of_band());
        }
        match self {
            Self::CosineBand { .. } => {
                if level <= lo || level >= hi {
                    Err(out_of_band())
                } else {
                    Err(Error::MultipleRoots { omega: level.to_f64().unwrap_or(f64::NAN) })
                }
            }
            Self::ChiralLinear { velocity, omega0 } => {
                if level < lo || level >= hi {
                    return Err(out_of_band());
                }
                Ok(Resonance { k: (level - *omega0) / *velocity, velocity: *velocity })
            }
            Self::FloquetSawtooth { period } => {
                let zone = T::TAU() / *period;
                let mut folded = level % zone;
                if folded < T::zero() {
                    folded = folded + zone;
                }
                let mut k = folded * *period - T::PI();
                if k >= T::PI() {
                    k = -T::PI();
                }
                Ok(Resonance { k, velocity: T::one() / *period })
            }
            Self::TabulatedChiral(b) => {
                if level < lo || level > hi {
                    return Err(out_of_band());
                }
                let k = b.bisect(level);
                let velocity = b.centered_slope(k).ok_or_else(out_of_band)?;
                Ok(Resonance { k: wrap_bz(k), velocity })
            }
        }
    }
}

/// Wraps `k` into `[-pi, pi)`.
pub fn wrap_bz<T: Real>(k: T) -> T {
    let tau = T::TAU();
    let mut x = (k + T::PI()) % tau;
    if x < T::zero() {
        x = x + tau;
    }
    let w = x - T::PI();
    if w >= T::PI() {
        -T::PI()
    } else {
        w
    }
}

/// Strictly increasing branch sampled on a strictly increasing `k` grid spanning
/// at most one Brillouin zone, interpolated by monotone (Fritsch–Carlson) cubics.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedBranch<T> {
    k: Vec<T>,
    omega: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Real> TabulatedBranch<T> {
    pub fn new(k: Vec<T>, omega: Vec<T>) -> Result<Self> {
        if k.len() != omega.len() {
            return Err(Error::DimensionMismatch { expected: k.len(), got: omega.len() });
        }
        if k.len() < MIN_TABULATED_SAMPLES {
            return Err(Error::InvalidInput(format!(
                "tabulated branch needs at least {MIN_TABULATED_SAMPLES} samples, got {}",
                k.len()
            )));
        }
        if k.iter().chain(&omega).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("tabulated branch contains non-finite samples".into()));
        }
        if k.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("tabulated k grid must be strictly increasing".into()));
        }
        if *k.last().unwrap() - k[0] > T::TAU() {
            return Err(Error::InvalidInput("tabulated k grid spans more than one Brillouin zone".into()));
        }
        if omega.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::NotChiral);
        }
        let slopes = pchip_slopes(&k, &omega);
        Ok(Self { k, omega, slopes })
    }

    pub fn k(&self) -> &[T] {
        &self.k
    }

    pub fn omega(&self) -> &[T] {
        &self.omega
    }

    /// Maps `k` onto the sampled window modulo `2 pi`, if it lands inside.
    fn locate(&self, k: T) -> Option<T> {
        let k0 = self.k[0];
        let k1 = *self.k.last().unwrap();
        let tau = T::TAU();
        let mut x = (k - k0) % tau;
        if x < T::zero() {
            x = x + tau;
        }
        let x = x + k0;
        if x <= k1 {
            Some(x)
        } else {
            None
        }
    }

    /// Interpolated `omega(k)`, or `None` outside the sampled window.
    pub fn eval(&self, k: T) -> Option<T> {
        self.locate(k).map(|x| self.eval_unwrapped(x))
    }

    fn eval_unwrapped(&self, x: T) -> T {
        let n = self.k.len();
        let i = match self.k.partition_point(|&kk| kk <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.k[i + 1] - self.k[i];
        let t = (x - self.k[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = -two * t3 + three * t2;
        let h11 = t3 - t2;
        h00 * self.omega[i] + h10 * h * self.slopes[i] + h01 * self.omega[i + 1] + h11 * h * self.slopes[i + 1]
    }

    /// Centred difference of the interpolant (one-sided at the window ends).
    pub fn centered_slope(&self, k: T) -> Option<T> {
        let x = self.locate(k)?;
        let k0 = self.k[0];
        let k1 = *self.k.last().unwrap();
        let step = (k1 - k0) * T::lit(1e-6);
        let a = (x - step).max(k0);
        let b = (x + step).min(k1);
        Some((self.eval_unwrapped(b) - self.eval_unwrapped(a)) / (b - a))
    }

    /// Bisection for `omega(k) = level`; `level` must lie within the samples.
    fn bisect(&self, level: T) -> T {
        let mut lo = self.k[0];
        let mut hi = *self.k.last().unwrap();
        for _ in 0..BISECTION_ITERATIONS {
            let mid = (lo + hi) * T::lit(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval_unwrapped(mid) < level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let flo = (self.eval_unwrapped(lo) - level).abs();
        let fhi = (self.eval_unwrapped(hi) - level).abs();
        if flo <= fhi {
            lo
        } else {
            hi
        }
    }
}

fn pchip_slopes<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    let n = x.len();
    let h: Vec<T> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<T> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let mut d = vec![T::zero(); n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= T::zero() {
            continue;
        }
        let w1 = two * h[i] + h[i - 1];
        let w2 = h[i] + two * h[i - 1];
        d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
    let end = |h0: T, h1: T, d0: T, d1: T| -> T {
        let s = ((two * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s.signum() != d0.signum() {
            T::zero()
        } else if d0.signum() != d1.signum() && s.abs() > three * d0.abs() {
            three * d0
        } else {
            s
        }
    };
    d[0] = end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}
