//! Harper–Hofstadter square lattice with flux `phi` per plaquette, cut at the
//! edge `n = 1`: chiral edge branches and exact level decay on a finite strip.

use std::collections::HashSet;

use num_traits::Zero;

use super::integrator::{evolve, halving_error, ExactTrace, Geometry, LatticeState, LinearOperator};
use crate::error::{Error, Result};
use crate::model::Dispersion;
use crate::numerics::{symmetric_tridiagonal_eigen, vec_norm};
use crate::scalar::{expi, Cx, Real};

/// Rows `n <= EDGE_DEPTH` count as the edge.
pub const EDGE_DEPTH: usize = 8;
/// Minimum edge weight of an edge state.
pub const EDGE_WEIGHT: f64 = 0.9;
/// Largest branch shift tolerated when the truncation depth is doubled.
pub const TRUNCATION_TOL: f64 = 1e-6;
/// Width of the strip in the `n` direction used by [`StripGeometry::for_run`].
pub const DEFAULT_STRIP_ROWS: usize = 24;
/// Sites next to the far `m` boundary watched for arriving excitation.
pub const BOUNDARY_WINDOW: usize = 5;
/// Weight near the far boundary that aborts a run.
pub const BOUNDARY_WEIGHT: f64 = 1e-6;

const MIN_GAP_WIDTH: f64 = 0.1;

/// Which bulk gap hosts the branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GapSelector {
    Lower,
    Upper,
}

/// Edge branch of one gap, sampled on the part of the `k` grid where a state
/// localized at `n = 1` exists inside the gap.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeBranch<T> {
    pub k: Vec<T>,
    pub omega: Vec<T>,
    /// Open interval between the bulk bands that bounds the branch.
    pub gap: (T, T),
    /// Bulk bands `(bottom, top)`, ascending.
    pub bulk_bands: Vec<(T, T)>,
    pub n_max: usize,
    /// Largest shift of the branch when `n_max` was doubled.
    pub truncation_shift: T,
}

impl<T: Real> EdgeBranch<T> {
    /// The branch as a chiral dispersion; fails with `NotChiral` for a branch of
    /// negative group velocity.
    pub fn dispersion(&self) -> Result<Dispersion<T>> {
        Dispersion::tabulated(self.k.clone(), self.omega.clone())
    }
}

/// `2 kappa cos(k + n phi)` on rows `n = 1..=n_max`.
fn harper_diagonal<T: Real>(phi: T, kappa: T, k: T, n_max: usize) -> Vec<T> {
    (1..=n_max).map(|n| T::lit(2.0) * kappa * (k + T::from_count(n) * phi).cos()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum StateKind {
    NearEdge,
    Bulk,
    Other,
}

/// Eigenstates of the truncated half-plane problem at one `k`, classified.
fn classify<T: Real>(phi: T, kappa: T, k: T, n_max: usize) -> Result<Vec<(T, StateKind)>> {
    let diag = harper_diagonal(phi, kappa, k, n_max);
    let off = vec![kappa; n_max - 1];
    let eig = symmetric_tridiagonal_eigen(&diag, &off)?;
    let depth = EDGE_DEPTH.min(n_max / 4);
    Ok(eig
        .values
        .iter()
        .zip(&eig.vectors)
        .map(|(&e, v)| {
            let weight = |r: std::ops::Range<usize>| v[r].iter().map(|x| *x * *x).sum::<T>();
            let near = weight(0..depth);
            let middle = weight(depth..n_max - depth);
            let kind = if near >= T::lit(EDGE_WEIGHT) {
                StateKind::NearEdge
            } else if middle >= T::lit(0.5) {
                StateKind::Bulk
            } else {
                StateKind::Other
            };
            (e, kind)
        })
        .collect())
}

/// Near-edge state inside the gap; with `near`, the one closest to it.
fn near_edge_in_gap<T: Real>(spec: &[(T, StateKind)], in_gap: &impl Fn(T) -> bool, near: Option<T>) -> Option<T> {
    let mut cands = spec.iter().filter(|(e, s)| *s == StateKind::NearEdge && in_gap(*e)).map(|p| p.0);
    match near {
        None => cands.next(),
        Some(w) => cands.min_by(|a, b| (*a - w).abs().partial_cmp(&(*b - w).abs()).expect("finite")),
    }
}

/// Edge-state energy at `k`, retrying with up to three extra rows: where the
/// far-edge state of the truncated problem crosses the branch the two hybridize,
/// and the crossing moves with the depth.
fn edge_energy<T: Real>(
    phi: T,
    kappa: T,
    k: T,
    n_max: usize,
    in_gap: &impl Fn(T) -> bool,
    near: Option<T>,
) -> Result<Option<T>> {
    for extra in 0..4 {
        if let Some(e) = near_edge_in_gap(&classify(phi, kappa, k, n_max + extra)?, in_gap, near) {
            return Ok(Some(e));
        }
    }
    Ok(None)
}

/// Chiral edge branch of the half-plane Harper problem
/// `kappa (A_{n+1} + A_{n-1}) + 2 kappa cos(k + n phi) A_n = omega A_n`, `A_0 = 0`,
/// truncated at `n_max` rows.
///
/// Bulk bands are read off the delocalized eigenstates over `k_grid`; the branch
/// is the longest run of consecutive grid points carrying an edge state inside
/// the selected gap. The run is recomputed at `2 n_max` rows and rejected if it
/// moves by more than [`TRUNCATION_TOL`].
pub fn harper_edge_modes<T: Real>(
    phi: T,
    kappa: T,
    n_max: usize,
    k_grid: &[T],
    gap: GapSelector,
) -> Result<EdgeBranch<T>> {
    if n_max < 40 {
        return Err(Error::InvalidInput(format!("truncation depth must be at least 40 rows, got {n_max}")));
    }
    if !(kappa > T::zero()) || !phi.is_finite() {
        return Err(Error::InvalidInput("Harper hopping must be positive and flux finite".into()));
    }
    if k_grid.len() < 2 || k_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("k grid must be strictly increasing".into()));
    }
    let spectra = k_grid.iter().map(|&k| classify(phi, kappa, k, n_max)).collect::<Result<Vec<_>>>()?;

    let mut bulk: Vec<T> = spectra.iter().flatten().filter(|(_, s)| *s == StateKind::Bulk).map(|(e, _)| *e).collect();
    bulk.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    if bulk.is_empty() {
        return Err(Error::NoGap);
    }
    let min_gap = T::lit(MIN_GAP_WIDTH) * kappa;
    let mut bands = Vec::new();
    let mut start = bulk[0];
    for w in bulk.windows(2) {
        if w[1] - w[0] > min_gap {
            bands.push((start, w[0]));
            start = w[1];
        }
    }
    bands.push((start, *bulk.last().unwrap()));
    if bands.len() < 2 {
        return Err(Error::NoGap);
    }
    let gap_interval = match gap {
        GapSelector::Lower => (bands[0].1, bands[1].0),
        GapSelector::Upper => (bands[bands.len() - 2].1, bands[bands.len() - 1].0),
    };
    let in_gap = |e: T| e > gap_interval.0 && e < gap_interval.1;

    let branch: Vec<Option<T>> = spectra
        .iter()
        .zip(k_grid)
        .map(|(spec, &k)| match near_edge_in_gap(spec, &in_gap, None) {
            Some(e) => Ok(Some(e)),
            None => edge_energy(phi, kappa, k, n_max, &in_gap, None),
        })
        .collect::<Result<_>>()?;
    let (mut best, mut run_start) = ((0, 0), 0);
    for i in 0..=branch.len() {
        if i == branch.len() || branch[i].is_none() {
            if i - run_start > best.1 - best.0 {
                best = (run_start, i);
            }
            run_start = i + 1;
        }
    }
    if best.1 == best.0 {
        return Err(Error::NoGap);
    }
    let k: Vec<T> = k_grid[best.0..best.1].to_vec();
    let omega: Vec<T> = branch[best.0..best.1].iter().map(|e| e.expect("inside run")).collect();

    let mut shift = T::zero();
    for (&kk, &w) in k.iter().zip(&omega) {
        let w2 = edge_energy(phi, kappa, kk, 2 * n_max, &in_gap, Some(w))?
            .ok_or(Error::Truncation { shift: f64::INFINITY })?;
        shift = shift.max((w2 - w).abs());
    }
    if shift > T::lit(TRUNCATION_TOL) {
        return Err(Error::Truncation { shift: shift.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(EdgeBranch { k, omega, gap: gap_interval, bulk_bands: bands, n_max, truncation_shift: shift })
}

/// `points` samples of `[-pi, pi)`.
pub fn zone_grid<T: Real>(points: usize) -> Vec<T> {
    let h = T::TAU() / T::from_count(points);
    (0..points).map(|j| -T::PI() + h * T::from_count(j)).collect()
}

/// Finite strip: rows `n = 1..=l_n`, columns `m = m_min..=m_max`, open on all sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StripGeometry {
    pub l_n: usize,
    pub m_min: i64,
    pub m_max: i64,
}

impl StripGeometry {
    /// [`DEFAULT_STRIP_ROWS`] rows, 40 columns upstream of `m = 0`, and twice the
    /// distance an edge packet of speed `velocity` covers by `t_max` downstream.
    pub fn for_run(t_max: f64, velocity: f64, last_site: i64) -> Self {
        let reach = (2.0 * velocity * t_max).ceil() as i64;
        Self { l_n: DEFAULT_STRIP_ROWS, m_min: -40, m_max: last_site + reach.max(20) }
    }

    pub fn l_m(&self) -> usize {
        (self.m_max - self.m_min + 1) as usize
    }
}

/// Level side-coupled to strip site `(n, m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripAttachment<T> {
    pub n: usize,
    pub m: i64,
    pub kappa: T,
    pub omega: T,
}

struct HofstadterOperator<T> {
    kappa: T,
    l_n: usize,
    l_m: usize,
    /// `e^{i phi n}` per row.
    row_phase: Vec<Cx<T>>,
    /// `(bath index, coupling, frequency)` per level.
    levels: Vec<(usize, T, T)>,
}

impl<T: Real> LinearOperator<T> for HofstadterOperator<T> {
    fn dim(&self) -> usize {
        self.l_n * self.l_m + self.levels.len()
    }

    fn apply(&self, x: &[Cx<T>], out: &mut [Cx<T>]) {
        let (l_n, l_m, kappa) = (self.l_n, self.l_m, self.kappa);
        for r in 0..l_n {
            let p = self.row_phase[r];
            let pc = p.conj();
            let base = r * l_m;
            for c in 0..l_m {
                let i = base + c;
                let mut acc = Cx::<T>::zero();
                if r > 0 {
                    acc = acc + x[i - l_m];
                }
                if r + 1 < l_n {
                    acc = acc + x[i + l_m];
                }
                if c > 0 {
                    acc = acc + pc * x[i - 1];
                }
                if c + 1 < l_m {
                    acc = acc + p * x[i + 1];
                }
                out[i] = acc * kappa;
            }
        }
        let offset = l_n * l_m;
        for (a, &(site, g, w)) in self.levels.iter().enumerate() {
            out[offset + a] = x[offset + a] * w + x[site] * g;
            out[site] = out[site] + x[offset + a] * g;
        }
    }
}

/// Exact level amplitudes for levels side-coupled to a Harper–Hofstadter strip,
/// by RK4 on the full single-particle problem with the bath initially empty.
///
/// Column hopping carries `e^{+i phi n}` towards larger `m`, so a Bloch wave
/// `e^{i k m}` sees `2 kappa cos(k + n phi)` and lower-gap edge states travel
/// towards larger `m`.
pub fn hofstadter_evolve<T: Real>(
    phi: T,
    kappa: T,
    strip: StripGeometry,
    attachments: &[StripAttachment<T>],
    c0: &[Cx<T>],
    times: &[T],
    dt: T,
) -> Result<ExactTrace<T>> {
    if strip.l_n < 2 || strip.m_max <= strip.m_min {
        return Err(Error::InvalidInput("strip needs at least two rows and two columns".into()));
    }
    if c0.len() != attachments.len() {
        return Err(Error::DimensionMismatch { expected: attachments.len(), got: c0.len() });
    }
    let max_coupling = attachments.iter().map(|a| a.kappa.abs()).fold(T::zero(), T::max);
    let limit = T::lit(0.05) / (T::lit(4.0) * kappa.abs() + max_coupling);
    if !(dt > T::zero()) || dt > limit * (T::one() + T::lit(1e-12)) {
        return Err(Error::InvalidInput(format!("RK4 step must satisfy 0 < dt <= {limit}")));
    }
    let l_m = strip.l_m();
    let mut seen = HashSet::new();
    let mut levels = Vec::with_capacity(attachments.len());
    for a in attachments {
        if a.n < 1 || a.n > strip.l_n || a.m < strip.m_min || a.m > strip.m_max {
            return Err(Error::InvalidInput(format!("attachment ({}, {}) lies outside the strip", a.n, a.m)));
        }
        let idx = (a.n - 1) * l_m + (a.m - strip.m_min) as usize;
        if !seen.insert(idx) {
            return Err(Error::DuplicateSite(a.m));
        }
        levels.push((idx, a.kappa, a.omega));
    }
    let op = HofstadterOperator {
        kappa,
        l_n: strip.l_n,
        l_m,
        row_phase: (1..=strip.l_n).map(|n| expi(phi * T::from_count(n))).collect(),
        levels,
    };
    let watch: Vec<usize> = (0..strip.l_n)
        .flat_map(|r| (l_m.saturating_sub(BOUNDARY_WINDOW)..l_m).map(move |c| r * l_m + c))
        .collect();
    run_exact(&op, strip.l_n * l_m, c0, times, dt, &watch, Geometry::Strip { l_n: strip.l_n, l_m })
}

/// Shared driver for the static baths: empty bath, levels from `c0`, boundary
/// watch on `watch`, norm bookkeeping and a step-halving check.
pub(crate) fn run_exact<T: Real>(
    op: &impl LinearOperator<T>,
    bath_len: usize,
    c0: &[Cx<T>],
    times: &[T],
    dt: T,
    watch: &[usize],
    geometry: Geometry,
) -> Result<ExactTrace<T>> {
    if times.is_empty() || times[0] != T::zero() {
        return Err(Error::InvalidInput("time grid must start at t = 0".into()));
    }
    let mut psi = vec![Cx::<T>::zero(); bath_len];
    psi.extend_from_slice(c0);
    let n0 = vec_norm(&psi).powi(2);
    let span = times[times.len() - 1].min(T::lit(5.0));
    let step_error = if span > T::zero() { halving_error(op, &psi, span, dt)? } else { T::zero() };
    let mut levels = Vec::with_capacity(times.len());
    let mut drift = T::zero();
    evolve(op, &mut psi, times, dt, |_, state| {
        let edge: T = watch.iter().map(|&i| state[i].norm_sqr()).sum();
        if edge > T::lit(BOUNDARY_WEIGHT) {
            return Err(Error::BoundaryReached { weight: edge.to_f64().unwrap_or(f64::NAN) });
        }
        drift = drift.max((vec_norm(state).powi(2) - n0).abs());
        levels.push(state[bath_len..].to_vec());
        Ok(())
    })?;
    let final_state = LatticeState {
        bath: psi[..bath_len].to_vec(),
        levels: psi[bath_len..].to_vec(),
        geometry,
        time: times[times.len() - 1],
    };
    Ok(ExactTrace { times: times.to_vec(), levels, norm_drift: drift, step_error, final_state })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use std::f64::consts::PI;

    #[test]
    fn quarter_flux_has_two_wide_gaps() {
        let b = harper_edge_modes(PI / 2.0, 1.0, 40, &zone_grid::<f64>(256), GapSelector::Lower).unwrap();
        assert_eq!(b.bulk_bands.len(), 3, "{:?}", b.bulk_bands);
        assert!((b.gap.0 + 2.613).abs() < 0.05 && (b.gap.1 + 1.082).abs() < 0.05, "{:?}", b.gap);
        let d = b.dispersion().unwrap();
        let r = d.solve_resonance(-1.5).unwrap();
        assert!((r.k - 2.536).abs() < 0.01, "k = {}", r.k);
        assert!(b.truncation_shift < 1e-6);
    }

    #[test]
    fn upper_gap_branch_runs_backwards() {
        let b = harper_edge_modes(PI / 2.0, 1.0, 40, &zone_grid::<f64>(128), GapSelector::Upper).unwrap();
        assert!(b.gap.0 > 0.0);
        assert_eq!(b.dispersion(), Err(Error::NotChiral));
    }

    #[test]
    fn zero_flux_has_no_gap() {
        assert_eq!(harper_edge_modes(0.0, 1.0, 40, &zone_grid::<f64>(128), GapSelector::Lower), Err(Error::NoGap));
    }

    #[test]
    fn decoupled_levels_keep_their_population() {
        let strip = StripGeometry { l_n: 6, m_min: -5, m_max: 20 };
        let att = [
            StripAttachment { n: 1, m: 0, kappa: 0.0, omega: -1.5 },
            StripAttachment { n: 1, m: 3, kappa: 0.0, omega: -1.5 },
        ];
        let c0 = [Complex::new(0.6, 0.0), Complex::new(0.0, 0.8)];
        let tr = hofstadter_evolve(PI / 2.0, 1.0, strip, &att, &c0, &[0.0, 1.0, 2.0], 0.01).unwrap();
        for j in 0..3 {
            assert!((tr.occupation(0)[j] - 0.36).abs() < 1e-9);
            assert!((tr.occupation(1)[j] - 0.64).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_coarse_step_and_bad_sites() {
        let strip = StripGeometry { l_n: 4, m_min: 0, m_max: 10 };
        let att = [StripAttachment { n: 1, m: 0, kappa: 0.2, omega: -1.5 }];
        let c0 = [Complex::new(1.0, 0.0)];
        assert!(hofstadter_evolve(PI / 2.0, 1.0, strip, &att, &c0, &[0.0, 1.0], 0.1).is_err());
        let far = [StripAttachment { n: 9, m: 0, kappa: 0.2, omega: -1.5 }];
        assert!(hofstadter_evolve(PI / 2.0, 1.0, strip, &far, &c0, &[0.0, 1.0], 0.01).is_err());
    }

    #[test]
    fn short_strip_reports_boundary_arrival() {
        let strip = StripGeometry { l_n: 8, m_min: -5, m_max: 12 };
        let att = [StripAttachment { n: 1, m: 0, kappa: 0.5, omega: -1.5 }];
        let times: Vec<f64> = (0..=40).map(|j| j as f64).collect();
        let r = hofstadter_evolve(PI / 2.0, 1.0, strip, &att, &[Complex::new(1.0, 0.0)], &times, 0.01);
        assert!(matches!(r, Err(Error::BoundaryReached { .. })));
    }
}
