use super::trace::{propagate, DecayTrace};
use crate::error::{Error, Result};
use crate::model::{build_unidirectional, Dispersion, EffectiveHamiltonian, Level, LevelChain};
use crate::numerics::eigvals;
use crate::scalar::{Cx, Real};

/// Ladder of levels with spacing `C` and a common linewidth `Delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochResult<T> {
    pub hamiltonian: EffectiveHamiltonian<T>,
    pub trace: DecayTrace<T>,
    /// `2 pi / C`.
    pub t_b: T,
    pub eigs: Vec<Cx<T>>,
}

/// Builds `n` levels at `C (a - 1)` on consecutive sites of a linear chiral band
/// with `k^2 / (2 v) = delta`, then propagates `c0`.
///
/// The band is centred on the ladder and made wide enough to contain it.
pub fn bloch_scenario<T: Real>(n: usize, c_gradient: T, delta: T, c0: &[Cx<T>], times: &[T]) -> Result<BlochResult<T>> {
    if !(c_gradient > T::zero()) || !c_gradient.is_finite() {
        return Err(Error::InvalidInput(format!("frequency gradient must be positive, got {c_gradient}")));
    }
    if !(delta >= T::zero()) || !delta.is_finite() {
        return Err(Error::InvalidInput(format!("linewidth must be non-negative, got {delta}")));
    }
    let span = c_gradient * T::from_count(n.saturating_sub(1));
    let velocity = (span / T::PI()).max(T::one());
    let kappa = (T::lit(2.0) * delta * velocity).sqrt();
    let chain = LevelChain::new(
        (0..n).map(|a| Level::new(c_gradient * T::from_count(a), kappa, a as i64)).collect(),
    )?;
    let band = Dispersion::chiral_linear(velocity, span * T::lit(0.5))?;
    let hamiltonian = build_unidirectional(&chain, &band)?;
    let trace = propagate(&hamiltonian, c0, times)?;
    let eigs = eigvals(hamiltonian.matrix())?.values;
    Ok(BlochResult { t_b: T::TAU() / c_gradient, hamiltonian, trace, eigs })
}
