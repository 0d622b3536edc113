use crate::error::{Error, Result};
use crate::numerics::{expm, vec_norm, ComplexMatrix};
use crate::scalar::{cx, Cx, Real};

/// Amplitudes `c(t)` of the levels on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayTrace<T> {
    pub times: Vec<T>,
    /// `amplitudes[j][a]` is `c_a(times[j])`.
    pub amplitudes: Vec<Vec<Cx<T>>>,
    /// `survival[j] = sum_a |c_a(times[j])|^2`.
    pub survival: Vec<T>,
}

impl<T: Real> DecayTrace<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n_levels(&self) -> usize {
        self.amplitudes.first().map_or(0, Vec::len)
    }

    /// `|c_a(t)|^2` over the grid.
    pub fn occupation(&self, level: usize) -> Vec<T> {
        self.amplitudes.iter().map(|c| c[level].norm_sqr()).collect()
    }
}

/// `exp(-i H t)`.
pub fn propagator<T: Real>(h: &ComplexMatrix<T>, t: T) -> Result<ComplexMatrix<T>> {
    expm(&h.scale(cx(T::zero(), -t)))
}

/// Uniform spacing of `times`, if it has one.
pub(crate) fn uniform_step<T: Real>(times: &[T]) -> Option<T> {
    if times.len() < 2 {
        return None;
    }
    let dt = (times[times.len() - 1] - times[0]) / T::from_count(times.len() - 1);
    let tol = T::lit(1e-12) * dt.abs().max(T::one());
    let uniform = times
        .iter()
        .enumerate()
        .all(|(j, &t)| (t - (times[0] + dt * T::from_count(j))).abs() <= tol);
    (uniform && dt > T::zero()).then_some(dt)
}

pub(crate) fn check_grid<T: Real>(times: &[T]) -> Result<()> {
    match times.first() {
        None => return Err(Error::InvalidInput("time grid is empty".into())),
        Some(&t0) if t0 != T::zero() => return Err(Error::InvalidInput("time grid must start at t = 0".into())),
        _ => {}
    }
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidInput("time grid must be sorted".into()));
    }
    Ok(())
}

/// `c(t) = exp(-i H t) c0` on `times`.
///
/// Uniform grids reuse a single step propagator; other grids exponentiate per point.
pub fn propagate<T: Real>(h: impl AsRef<ComplexMatrix<T>>, c0: &[Cx<T>], times: &[T]) -> Result<DecayTrace<T>> {
    let h = h.as_ref();
    let n = h.ensure_square()?;
    if c0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: c0.len() });
    }
    let norm = vec_norm(c0);
    if (norm - T::one()).abs() > T::tol(1e-8) {
        return Err(Error::InvalidInput(format!("initial state must be normalized, |c0| = {norm}")));
    }
    check_grid(times)?;
    let amplitudes: Vec<Vec<Cx<T>>> = match uniform_step(times) {
        Some(dt) => {
            let step = propagator(h, dt)?;
            let mut out = Vec::with_capacity(times.len());
            let mut c = c0.to_vec();
            out.push(c.clone());
            for _ in 1..times.len() {
                c = step.mul_vec(&c)?;
                out.push(c.clone());
            }
            out
        }
        None => times
            .iter()
            .map(|&t| propagator(h, t)?.mul_vec(c0))
            .collect::<Result<_>>()?,
    };
    let survival = amplitudes.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum()).collect();
    Ok(DecayTrace { times: times.to_vec(), amplitudes, survival })
}

/// `n + 1` points `0, dt, ..., n dt`.
pub fn uniform_grid<T: Real>(dt: T, n: usize) -> Vec<T> {
    (0..=n).map(|j| dt * T::from_count(j)).collect()
}
