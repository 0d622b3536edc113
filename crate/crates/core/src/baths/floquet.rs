//! Anomalous Floquet binary lattice: two complete dimer pulses that shift every
//! A-site excitation one cell downstream with a sign flip, then a hold period
//! during which levels talk to their A sites.

use std::collections::HashSet;

use num_traits::Zero;

use super::integrator::{Geometry, LatticeState};
use crate::error::{Error, Result};
use crate::model::{build_unidirectional, Dispersion, EffectiveHamiltonian, Level, LevelChain};
use crate::scalar::{cx, expi, mul_neg_i, Cx, Real};

/// Cells kept empty upstream of the first attached site.
const UPSTREAM_MARGIN: usize = 2;
/// Weight in the end cells that counts as having hit the lattice boundary.
pub const WRAPAROUND_WEIGHT: f64 = 1e-8;

/// One drive period: pulses of length `t1` on the intra-cell then inter-cell
/// bonds with `kappa_bath t1 = pi / 2`, then a hold of length `t2` with level
/// couplings `rho` to A cells `sites`.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetCycle<T> {
    t1: T,
    t2: T,
    kappa_bath: T,
    rho: Vec<T>,
    sites: Vec<i64>,
}

impl<T: Real> FloquetCycle<T> {
    pub fn new(t1: T, t2: T, rho: Vec<T>, sites: Vec<i64>) -> Result<Self> {
        if !(t1 > T::zero()) || !(t2 >= T::zero()) || !t1.is_finite() || !t2.is_finite() {
            return Err(Error::InvalidInput(format!("step durations must satisfy t1 > 0, t2 >= 0, got {t1}, {t2}")));
        }
        if rho.len() != sites.len() {
            return Err(Error::DimensionMismatch { expected: sites.len(), got: rho.len() });
        }
        if rho.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidInput("level couplings must be finite".into()));
        }
        let mut seen = HashSet::new();
        for &s in &sites {
            if !seen.insert(s) {
                return Err(Error::DuplicateSite(s));
            }
        }
        Ok(Self { t1, t2, kappa_bath: T::FRAC_PI_2() / t1, rho, sites })
    }

    pub fn t1(&self) -> T {
        self.t1
    }

    pub fn t2(&self) -> T {
        self.t2
    }

    pub fn kappa_bath(&self) -> T {
        self.kappa_bath
    }

    pub fn rho(&self) -> &[T] {
        &self.rho
    }

    pub fn sites(&self) -> &[i64] {
        &self.sites
    }

    /// `2 t1 + t2`.
    pub fn period(&self) -> T {
        T::lit(2.0) * self.t1 + self.t2
    }
}

/// Binary lattice `[A_0, B_0, A_1, B_1, ...]` followed by the level amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetLattice<T> {
    cycle: FloquetCycle<T>,
    cells: usize,
    /// A-cell index of each level.
    cell_of: Vec<usize>,
    /// `e^{-i omega 2 t1}` per level.
    pulse_phase: Vec<Cx<T>>,
    /// Exact hold-step propagator per level on `(level, A site)`.
    hold: Vec<[[Cx<T>; 2]; 2]>,
}

/// `exp(-i t [[w, r], [r, 0]])`.
fn hold_block<T: Real>(w: T, r: T, t: T) -> [[Cx<T>; 2]; 2] {
    let half = w * T::lit(0.5);
    let big = (half * half + r * r).sqrt();
    let global = expi(-half * t);
    let c = (big * t).cos();
    // sin(Omega t) / Omega, finite as Omega -> 0
    let s = if big > T::zero() { (big * t).sin() / big } else { t };
    let d = cx(c, -s * half) * global;
    let u = cx(c, s * half) * global;
    let off = cx(T::zero(), -s * r) * global;
    [[d, off], [off, u]]
}

impl<T: Real> FloquetLattice<T> {
    /// `lattice_size` counts A and B sites and must be even; attached sites are
    /// placed [`UPSTREAM_MARGIN`] cells from the upstream end.
    pub fn new(cycle: FloquetCycle<T>, lattice_size: usize, omega_levels: &[T]) -> Result<Self> {
        if lattice_size % 2 != 0 || lattice_size < 8 {
            return Err(Error::InvalidInput(format!("lattice size must be even and at least 8, got {lattice_size}")));
        }
        let n = cycle.sites.len();
        if omega_levels.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: omega_levels.len() });
        }
        let cells = lattice_size / 2;
        let first = cycle.sites.iter().copied().min().unwrap_or(0);
        let cell_of: Vec<usize> = cycle.sites.iter().map(|&s| (s - first) as usize + UPSTREAM_MARGIN).collect();
        if cell_of.iter().any(|&c| c + 1 >= cells) {
            return Err(Error::InvalidInput("attached sites do not fit inside the lattice".into()));
        }
        let two_t1 = T::lit(2.0) * cycle.t1;
        let pulse_phase = omega_levels.iter().map(|&w| expi(-w * two_t1)).collect();
        let hold = omega_levels.iter().zip(&cycle.rho).map(|(&w, &r)| hold_block(w, r, cycle.t2)).collect();
        Ok(Self { cycle, cells, cell_of, pulse_phase, hold })
    }

    /// Bath sites plus levels.
    pub fn dim(&self) -> usize {
        2 * self.cells + self.cell_of.len()
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Bath index of the A site in cell `cell`.
    pub fn a_index(&self, cell: usize) -> usize {
        2 * cell
    }

    /// Bath index of the A site the level `a` is attached to.
    pub fn level_site(&self, a: usize) -> usize {
        2 * self.cell_of[a]
    }

    /// One full period on `state = [bath, levels]`.
    pub fn apply_cycle(&self, state: &mut [Cx<T>]) {
        let bath = 2 * self.cells;
        // a complete dimer pulse is -i sigma_x on every bond
        let pulse = |state: &mut [Cx<T>], start: usize| {
            let mut i = start;
            while i + 1 < bath {
                let (a, b) = (state[i], state[i + 1]);
                state[i] = mul_neg_i(b);
                state[i + 1] = mul_neg_i(a);
                i += 2;
            }
        };
        pulse(state, 0);
        pulse(state, 1);
        for (a, (&cell, u)) in self.cell_of.iter().zip(&self.hold).enumerate() {
            let (l, s) = (bath + a, 2 * cell);
            let c = state[l] * self.pulse_phase[a];
            let x = state[s];
            state[l] = u[0][0] * c + u[0][1] * x;
            state[s] = u[1][0] * c + u[1][1] * x;
        }
    }

    fn end_weight(&self, state: &[Cx<T>]) -> T {
        let last = 2 * self.cells;
        [0, 1, last - 2, last - 1].iter().map(|&i| state[i].norm_sqr()).sum()
    }
}

/// Stroboscopic level amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetTrace<T> {
    /// `0, T, 2T, ...`.
    pub times: Vec<T>,
    pub levels: Vec<Vec<Cx<T>>>,
    pub final_state: LatticeState<T>,
}

impl<T: Real> FloquetTrace<T> {
    pub fn occupation(&self, level: usize) -> Vec<T> {
        self.levels.iter().map(|c| c[level].norm_sqr()).collect()
    }
}

/// Applies `n_cycles` periods to the levels `c0` with an empty bath.
pub fn floquet_cycle_evolve<T: Real>(
    cycle: &FloquetCycle<T>,
    lattice_size: usize,
    omega_levels: &[T],
    c0: &[Cx<T>],
    n_cycles: usize,
) -> Result<FloquetTrace<T>> {
    let lattice = FloquetLattice::new(cycle.clone(), lattice_size, omega_levels)?;
    if c0.len() != omega_levels.len() {
        return Err(Error::DimensionMismatch { expected: omega_levels.len(), got: c0.len() });
    }
    let bath = 2 * lattice.cells;
    let mut state = vec![Cx::<T>::zero(); bath];
    state.extend_from_slice(c0);
    let period = cycle.period();
    let mut levels = vec![c0.to_vec()];
    for _ in 0..n_cycles {
        lattice.apply_cycle(&mut state);
        let w = lattice.end_weight(&state);
        if w > T::lit(WRAPAROUND_WEIGHT) {
            return Err(Error::Wraparound { weight: w.to_f64().unwrap_or(f64::NAN) });
        }
        levels.push(state[bath..].to_vec());
    }
    let times = (0..=n_cycles).map(|j| period * T::from_count(j)).collect();
    let final_state = LatticeState {
        bath: state[..bath].to_vec(),
        levels: state[bath..].to_vec(),
        geometry: Geometry::Chain { len: bath },
        time: period * T::from_count(n_cycles),
    };
    Ok(FloquetTrace { times, levels, final_state })
}

/// Effective model of the driven lattice with its error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetEffective<T> {
    pub hamiltonian: EffectiveHamiltonian<T>,
    /// `(T / 2) max_a kappa_a^2 / (2 v)`: size of the leading commutator
    /// correction relative to the retained term.
    pub commutator_estimate: T,
}

/// Unidirectional model with `kappa_a = (t2 / T) rho_a` on the sawtooth band of
/// velocity `1 / T`, levels on their A-cell indices.
pub fn floquet_effective<T: Real>(cycle: &FloquetCycle<T>, omega_levels: &[T]) -> Result<FloquetEffective<T>> {
    if omega_levels.len() != cycle.sites.len() {
        return Err(Error::DimensionMismatch { expected: cycle.sites.len(), got: omega_levels.len() });
    }
    let period = cycle.period();
    let scale = cycle.t2 / period;
    let chain = LevelChain::new(
        omega_levels
            .iter()
            .zip(&cycle.rho)
            .zip(&cycle.sites)
            .map(|((&w, &r), &s)| Level::new(w, (scale * r).abs(), s))
            .collect(),
    )?;
    let band = Dispersion::floquet(period)?;
    let velocity = T::one() / period;
    let kmax = chain.max_kappa();
    let commutator_estimate = period * T::lit(0.5) * kmax * kmax / (T::lit(2.0) * velocity);
    let hamiltonian = build_unidirectional(&chain, &band)?;
    Ok(FloquetEffective { hamiltonian, commutator_estimate })
}
