use super::trace::{check_grid, propagator, uniform_grid, uniform_step};
use crate::error::{Error, Result};
use crate::numerics::{largest_singular, largest_singular_from, ComplexMatrix};
use crate::scalar::{Cx, Real};

/// `sigma_max(t)`, the top eigenvalue of `A^H A` with `A = exp(-i H t)`, and the
/// matching unit eigenvector at every grid time.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaCurve<T> {
    pub times: Vec<T>,
    pub sigma: Vec<T>,
    pub vectors: Vec<Vec<Cx<T>>>,
}

impl<T: Real> SigmaCurve<T> {
    /// Initial state that maximizes the survival probability at `times[index]`.
    pub fn optimal_state(&self, index: usize) -> &[Cx<T>] {
        &self.vectors[index]
    }
}

/// Resilience time for one reference level `p_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuiescenceResult<T> {
    pub sigma_curve: SigmaCurve<T>,
    pub tau: T,
    /// Eigenvector of `A^H A` at `tau`.
    pub optimal_state: Vec<Cx<T>>,
    pub p_b: T,
}

/// `sigma_max` on `times` (which must start at 0).
///
/// Uniform grids advance `A` by one step product per point and warm-start the
/// power iteration from the previous eigenvector.
pub fn sigma_max_curve<T: Real>(h: impl AsRef<ComplexMatrix<T>>, times: &[T]) -> Result<SigmaCurve<T>> {
    let h = h.as_ref();
    let n = h.ensure_square()?;
    check_grid(times)?;
    let mut sigma = Vec::with_capacity(times.len());
    let mut vectors: Vec<Vec<Cx<T>>> = Vec::with_capacity(times.len());
    let step = uniform_step(times).map(|dt| propagator(h, dt)).transpose()?;
    let mut a = ComplexMatrix::identity(n);
    for (j, &t) in times.iter().enumerate() {
        if j > 0 {
            a = match &step {
                Some(s) => s * &a,
                None => propagator(h, t)?,
            };
        }
        let top = largest_singular_from(&a, vectors.last().map(Vec::as_slice))?;
        sigma.push(top.sigma);
        vectors.push(top.vector);
    }
    Ok(SigmaCurve { times: times.to_vec(), sigma, vectors })
}

/// Largest `tau` with `sigma_max > p_b` on `(0, tau)`, scanned on a grid of step
/// `dt` up to `t_max` and refined by bisection to `dt / 100`.
pub fn quiescence_time<T: Real>(h: impl AsRef<ComplexMatrix<T>>, p_b: T, t_max: T, dt: T) -> Result<QuiescenceResult<T>> {
    let h = h.as_ref();
    if !(p_b > T::zero() && p_b < T::one()) {
        return Err(Error::InvalidInput(format!("reference level must lie in (0, 1), got {p_b}")));
    }
    if !(dt > T::zero()) || !(t_max > T::zero()) || dt > t_max / T::lit(200.0) * (T::one() + T::lit(1e-9)) {
        return Err(Error::InvalidInput("quiescence scan needs 0 < dt <= t_max / 200".into()));
    }
    let steps = (t_max / dt).round().to_usize().unwrap_or(0);
    let curve = sigma_max_curve(h, &uniform_grid(dt, steps))?;
    quiescence_from_curve(h, curve, p_b)
}

/// [`quiescence_time`] on an already computed curve; several reference levels
/// can share one curve.
pub fn quiescence_from_curve<T: Real>(
    h: impl AsRef<ComplexMatrix<T>>,
    curve: SigmaCurve<T>,
    p_b: T,
) -> Result<QuiescenceResult<T>> {
    let h = h.as_ref();
    let times = &curve.times;
    let Some(j) = curve.sigma.iter().position(|&s| s < p_b) else {
        let t_max = times.last().copied().unwrap_or(T::zero());
        return Err(Error::NoCrossing { t_max: t_max.to_f64().unwrap_or(f64::NAN) });
    };
    if j == 0 {
        return Err(Error::InvalidInput("sigma_max starts below the reference level".into()));
    }
    let (mut lo, mut hi) = (times[j - 1], times[j]);
    let resolution = (hi - lo) / T::lit(100.0);
    let mut start = curve.vectors[j - 1].clone();
    while hi - lo > resolution {
        let mid = (lo + hi) * T::lit(0.5);
        let top = largest_singular_from(&propagator(h, mid)?, Some(&start))?;
        // ties count as still above, pushing tau to the larger time
        if top.sigma >= p_b {
            lo = mid;
            start = top.vector;
        } else {
            hi = mid;
        }
    }
    let optimal_state = largest_singular(&propagator(h, lo)?)?.vector;
    Ok(QuiescenceResult { sigma_curve: curve, tau: lo, optimal_state, p_b })
}
