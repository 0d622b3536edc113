//! Non-decay probability of `N` non-interacting identical particles that start
//! with one particle in each level.

use crate::error::{Error, Result};
use crate::model::{Dispersion, LevelChain};
use crate::numerics::{expm, permanent, ComplexMatrix, MAX_PERMANENT_DIM};
use crate::scalar::{cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StatisticsKind {
    Fermion,
    Boson,
}

/// Probability that no particle has left the levels by time `t`.
///
/// Fermions give `|det U|^2 = exp(2 t Im tr H)` with `U = exp(-i H t)`, so only
/// the trace is needed. Bosons give `|perm U|^2` and need the full propagator.
pub fn nondecay_probability<T: Real>(h: impl AsRef<ComplexMatrix<T>>, t: T, stats: StatisticsKind) -> Result<T> {
    let h = h.as_ref();
    let n = h.ensure_square()?;
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("time must be finite and non-negative, got {t}")));
    }
    match stats {
        StatisticsKind::Fermion => Ok((T::lit(2.0) * t * h.trace().im).exp()),
        StatisticsKind::Boson => {
            if n > MAX_PERMANENT_DIM {
                return Err(Error::TooLarge { n, max: MAX_PERMANENT_DIM });
            }
            let u = expm(&h.scale(cx(T::zero(), -t)))?;
            Ok(permanent(&u)?.norm_sqr())
        }
    }
}

/// `sum_a kappa_a^2 / v_a` with `v_a` the group velocity at each level's
/// resonance on a chiral band.
pub fn chiral_decay_rate<T: Real>(chain: &LevelChain<T>, dispersion: &Dispersion<T>) -> Result<T> {
    if !dispersion.is_chiral() {
        return Err(Error::NotChiral);
    }
    chain.levels().iter().try_fold(T::zero(), |acc, l| {
        let r = dispersion.solve_resonance(l.omega)?;
        Ok(acc + l.kappa * l.kappa / r.velocity)
    })
}
