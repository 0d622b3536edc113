//! Markovian self-energy `Delta` of the levels, by closed form and by direct
//! quadrature of its delta-function and principal-value parts.

use std::collections::HashMap;

use num_complex::Complex;

use super::chain::LevelChain;
use super::dispersion::Dispersion;
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::scalar::{cx, expi, Cx, Real};

/// Smallest accepted quadrature grid.
pub const MIN_GRID_POINTS: usize = 1024;
/// Relative change under grid doubling above which the quadrature is rejected.
pub const RICHARDSON_LIMIT: f64 = 1e-3;

/// Grid for the principal-value quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions<T> {
    /// Nodes per Brillouin zone (even, at least [`MIN_GRID_POINTS`]).
    pub grid_points: usize,
    /// Width of the node-free window centred on the pole.
    pub pv_exclusion: T,
}

impl<T: Real> QuadratureOptions<T> {
    /// Grid of `grid_points` nodes with the window equal to one node spacing.
    pub fn new(grid_points: usize) -> Self {
        Self { grid_points, pv_exclusion: T::TAU() / T::from_count(grid_points) }
    }
}

impl<T: Real> Default for QuadratureOptions<T> {
    fn default() -> Self {
        Self::new(4096)
    }
}

/// Closed-form `Delta` for a chiral bath in the site-sorted basis:
/// `k_b^2 / (2 v_b)` on the diagonal, `(k_a k_b / v_b) e^{i q_b (n_a - n_b)}`
/// downstream, zero upstream.
pub fn delta_closed_form<T: Real>(chain: &LevelChain<T>, dispersion: &Dispersion<T>) -> Result<ComplexMatrix<T>> {
    assemble(chain, dispersion, |d| {
        let half = T::lit(0.5);
        match d {
            0 => Ok(half),
            d if d > 0 => Ok(T::one()),
            _ => Ok(T::zero()),
        }
        .map(Complex::from)
    })
}

/// `Delta` from its two integral parts with the band linearised at each resonance.
///
/// The delta-function part contributes `(k_a k_b / 2 v_b) e^{i q_b d}`. The
/// principal-value part is `-(i / 2 pi) (k_a k_b / v_b) e^{i q_b d} PV int e^{i x d} / x dx`;
/// summing the real-line integrand over periods folds it onto one zone with kernel
/// `cot(x/2) / 2`, which is evaluated on a midpoint grid placed symmetrically
/// about the pole so that the singular halves cancel pairwise.
pub fn delta_numeric<T: Real>(
    chain: &LevelChain<T>,
    dispersion: &Dispersion<T>,
    quad: QuadratureOptions<T>,
) -> Result<ComplexMatrix<T>> {
    if quad.grid_points < MIN_GRID_POINTS || quad.grid_points % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "quadrature needs an even grid of at least {MIN_GRID_POINTS} points, got {}",
            quad.grid_points
        )));
    }
    if !(quad.pv_exclusion > T::zero()) || quad.pv_exclusion >= T::PI() {
        return Err(Error::InvalidInput("principal-value window must lie in (0, pi)".into()));
    }
    let mut cache: HashMap<i64, Cx<T>> = HashMap::new();
    assemble(chain, dispersion, |d| {
        let pv = match cache.get(&d) {
            Some(v) => *v,
            None => {
                let coarse = folded_pv(d, quad.grid_points, quad.pv_exclusion);
                let fine = folded_pv(d, 2 * quad.grid_points, quad.pv_exclusion * T::lit(0.5));
                let change = (fine - coarse).norm() / T::PI();
                if change > T::lit(RICHARDSON_LIMIT) {
                    return Err(Error::QuadratureDivergence { change: change.to_f64().unwrap_or(f64::NAN) });
                }
                cache.insert(d, fine);
                fine
            }
        };
        // 1/2 - (i / 2 pi) PV
        Ok(cx(T::lit(0.5), T::zero()) - cx(T::zero(), T::one()) * pv / T::TAU())
    })
}

/// `PV int_{-pi}^{pi} e^{i x d} cot(x/2) / 2 dx` on a midpoint grid of `points`
/// nodes symmetric about `x = 0`, dropping pairs inside the exclusion window.
fn folded_pv<T: Real>(d: i64, points: usize, exclusion: T) -> Cx<T> {
    let h = T::TAU() / T::from_count(points);
    let half = T::lit(0.5);
    let dd = T::lit(d as f64);
    let mut re = T::zero();
    let mut im = T::zero();
    for j in 0..points / 2 {
        let x = (T::from_count(j) + half) * h;
        if x < exclusion * half {
            continue;
        }
        let kernel = half / (x * half).tan();
        let plus = expi(x * dd) * kernel;
        let minus = expi(-x * dd) * (-kernel);
        let pair = plus + minus;
        re = re + pair.re;
        im = im + pair.im;
    }
    cx(re * h, im * h)
}

/// Fills `Delta_ab = (k_a k_b / v_b) e^{i q_b d} f(d)` over the sorted chain.
fn assemble<T: Real>(
    chain: &LevelChain<T>,
    dispersion: &Dispersion<T>,
    mut factor: impl FnMut(i64) -> Result<Cx<T>>,
) -> Result<ComplexMatrix<T>> {
    if !dispersion.is_chiral() {
        return Err(Error::NotChiral);
    }
    let (sorted, _) = chain.sorted_by_site();
    let levels = sorted.levels();
    let res = levels.iter().map(|l| dispersion.solve_resonance(l.omega)).collect::<Result<Vec<_>>>()?;
    let n = levels.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for b in 0..n {
        for a in 0..n {
            let d = levels[a].site - levels[b].site;
            let g = levels[a].kappa * levels[b].kappa / res[b].velocity;
            m[(a, b)] = expi(res[b].k * T::lit(d as f64)) * factor(d)? * g;
        }
    }
    Ok(m)
}
