use num_complex::Complex;
use num_traits::Zero;

use super::chain::LevelChain;
use super::dispersion::{Dispersion, Resonance};
use crate::error::{Error, Result};
use crate::numerics::{eigvals, ComplexMatrix};
use crate::scalar::{cx, expi, Cx, Real};

/// Which bath reduction produced a Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coupling {
    Unidirectional,
    Bidirectional,
}

/// Effective non-Hermitian Hamiltonian of the levels, in site-sorted order.
///
/// Row/column `i` belongs to `chain().levels()[i]`, which is level `order()[i]`
/// of the chain the caller passed in.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveHamiltonian<T> {
    matrix: ComplexMatrix<T>,
    kind: Coupling,
    resonances: Vec<Resonance<T>>,
    chain: LevelChain<T>,
    order: Vec<usize>,
}

impl<T: Real> EffectiveHamiltonian<T> {
    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    pub fn kind(&self) -> Coupling {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    /// Resonant `(k, v)` per sorted level. For the cosine band this is the
    /// positive-`k` root with `v = |d omega / dk|`.
    pub fn resonances(&self) -> &[Resonance<T>] {
        &self.resonances
    }

    /// Sorted chain matching the matrix rows.
    pub fn chain(&self) -> &LevelChain<T> {
        &self.chain
    }

    /// `order()[i]` is the caller's index of sorted level `i`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Reorders a caller-indexed vector into the sorted basis.
    pub fn to_sorted(&self, v: &[Cx<T>]) -> Result<Vec<Cx<T>>> {
        self.check_len(v)?;
        Ok(self.order.iter().map(|&o| v[o]).collect())
    }

    /// Reorders a sorted-basis vector back to the caller's level indices.
    pub fn to_original(&self, v: &[Cx<T>]) -> Result<Vec<Cx<T>>> {
        self.check_len(v)?;
        let mut out = vec![Cx::<T>::zero(); v.len()];
        for (i, &o) in self.order.iter().enumerate() {
            out[o] = v[i];
        }
        Ok(out)
    }

    fn check_len(&self, v: &[Cx<T>]) -> Result<()> {
        if v.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: v.len() });
        }
        Ok(())
    }
}

impl<T> AsRef<ComplexMatrix<T>> for EffectiveHamiltonian<T> {
    fn as_ref(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }
}

/// Effective Hamiltonian for a chiral bath.
///
/// With levels sorted by site: `H_bb = w_b - i k_b^2 / (2 v_b)`,
/// `H_ab = -i (k_a k_b / v_b) e^{i q_b (n_a - n_b)}` below the diagonal, and
/// exact zeros above it. The phase uses the resonance of the column level.
pub fn build_unidirectional<T: Real>(chain: &LevelChain<T>, dispersion: &Dispersion<T>) -> Result<EffectiveHamiltonian<T>> {
    if !dispersion.is_chiral() {
        return Err(Error::NotChiral);
    }
    let (sorted, order) = chain.sorted_by_site();
    let levels = sorted.levels();
    let resonances = levels
        .iter()
        .map(|l| dispersion.solve_resonance(l.omega))
        .collect::<Result<Vec<_>>>()?;
    let n = levels.len();
    let half = T::lit(0.5);
    let mut m = ComplexMatrix::zeros(n, n);
    for b in 0..n {
        let (lb, rb) = (levels[b], resonances[b]);
        m[(b, b)] = cx(lb.omega, -half * lb.kappa * lb.kappa / rb.velocity);
        for a in (b + 1)..n {
            let la = levels[a];
            let g = la.kappa * lb.kappa / rb.velocity;
            if g == T::zero() {
                continue;
            }
            let d = T::lit((la.site - lb.site) as f64);
            // -i g e^{i k d}
            m[(a, b)] = expi(rb.k * d) * cx(T::zero(), -g);
        }
    }
    Ok(EffectiveHamiltonian { matrix: m, kind: Coupling::Unidirectional, resonances, chain: sorted, order })
}

/// Effective Hamiltonian for levels side-coupled to a cosine-band wire with
/// hopping `hopping`; every level must satisfy `|w| < 2 hopping`.
pub fn build_bidirectional<T: Real>(chain: &LevelChain<T>, hopping: T) -> Result<EffectiveHamiltonian<T>> {
    let band = Dispersion::cosine(hopping)?;
    let (sorted, order) = chain.sorted_by_site();
    let levels = sorted.levels();
    let two_h = T::lit(2.0) * hopping;
    for l in levels {
        if l.omega.abs() >= two_h {
            return Err(Error::OutOfBand {
                omega: l.omega.to_f64().unwrap_or(f64::NAN),
                lo: -two_h.to_f64().unwrap_or(f64::NAN),
                hi: two_h.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let n = levels.len();
    let mut m = ComplexMatrix::zeros(n, n);
    let i = cx(T::zero(), T::one());
    for b in 0..n {
        let wb = levels[b].omega;
        let root = (two_h * two_h - wb * wb).sqrt();
        // i (sqrt(4h^2 - w^2) + i w) / (2h), a unit-modulus propagation factor
        let step = i * cx(root, wb) / two_h;
        for a in 0..n {
            let d = (levels[a].site - levels[b].site).unsigned_abs();
            let coupling = levels[a].kappa * levels[b].kappa / root;
            let mut entry = powu(step, d) * cx(T::zero(), -coupling);
            if a == b {
                entry = entry + Complex::from(levels[a].omega);
            }
            m[(a, b)] = entry;
        }
    }
    let resonances = levels
        .iter()
        .map(|l| {
            let k = (l.omega / two_h).acos();
            Resonance { k, velocity: band.group_velocity(k).abs() }
        })
        .collect();
    Ok(EffectiveHamiltonian { matrix: m, kind: Coupling::Bidirectional, resonances, chain: sorted, order })
}

/// Band-centre form of the bidirectional matrix, `-i^{1+|d|} k_a k_b / (2 hopping)`,
/// for chains whose levels all sit at `w = 0`. Rows follow the site-sorted chain.
pub fn bidirectional_band_center<T: Real>(chain: &LevelChain<T>, hopping: T) -> Result<ComplexMatrix<T>> {
    let (sorted, _) = chain.sorted_by_site();
    let levels = sorted.levels();
    if levels.iter().any(|l| l.omega != T::zero()) {
        return Err(Error::InvalidInput("band-centre form requires every level at omega = 0".into()));
    }
    let n = levels.len();
    let two_h = T::lit(2.0) * hopping;
    Ok(ComplexMatrix::from_fn(n, n, |a, b| {
        let d = (levels[a].site - levels[b].site).unsigned_abs();
        let g = levels[a].kappa * levels[b].kappa / two_h;
        -i_pow::<T>(1 + d) * Complex::from(g)
    }))
}

/// Eigenvalues of `h` with `|Im| <= tol`: bound states in the continuum.
pub fn find_bound_states<T: Real>(h: &EffectiveHamiltonian<T>, tol: T) -> Result<Vec<Cx<T>>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidInput("bound-state tolerance must be positive".into()));
    }
    let spectrum = eigvals(h.matrix()).map_err(|e| Error::NumericalFailure(e.to_string()))?;
    Ok(spectrum.values.into_iter().filter(|z| z.im.abs() <= tol).collect())
}

/// Exact power `i^p`.
fn i_pow<T: Real>(p: u64) -> Cx<T> {
    match p % 4 {
        0 => cx(T::one(), T::zero()),
        1 => cx(T::zero(), T::one()),
        2 => cx(-T::one(), T::zero()),
        _ => cx(T::zero(), -T::one()),
    }
}

fn powu<T: Real>(z: Cx<T>, p: u64) -> Cx<T> {
    let mut acc = cx(T::one(), T::zero());
    let mut base = z;
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::chain::Level;
    use crate::numerics::rank;
    use proptest::prelude::*;

    type C = Complex<f64>;

    fn chain(levels: &[(f64, f64, i64)]) -> LevelChain<f64> {
        LevelChain::new(levels.iter().map(|&(w, k, s)| Level::new(w, k, s)).collect()).unwrap()
    }

    #[test]
    fn single_level_linewidth() {
        let d = Dispersion::chiral_linear(1.6, 0.0).unwrap();
        let h = build_unidirectional(&chain(&[(0.0, 0.2, 0)]), &d).unwrap();
        assert!((h.matrix()[(0, 0)] - C::new(0.0, -0.0125)).norm() < 1e-15);
    }

    #[test]
    fn two_levels_with_edge_resonance() {
        // effective model of the two levels on a Hofstadter edge
        let k: Vec<f64> = (0..64).map(|i| 2.0 + i as f64 * 0.015).collect();
        let w: Vec<f64> = k.iter().map(|&kk| -1.5 + 1.6 * (kk - 2.536)).collect();
        let d = Dispersion::tabulated(k, w).unwrap();
        let h = build_unidirectional(&chain(&[(-1.5, 0.2, 0), (-1.5, 0.2, 3)]), &d).unwrap();
        let m = h.matrix();
        let diag = C::new(-1.5, -0.0125);
        assert!((m[(0, 0)] - diag).norm() < 1e-9 && (m[(1, 1)] - diag).norm() < 1e-9);
        assert_eq!(m[(0, 1)], C::new(0.0, 0.0));
        let expected = C::new(0.0, -0.025) * C::new(0.0, 3.0 * 2.536).exp();
        assert!((m[(1, 0)] - expected).norm() < 1e-8);
    }

    #[test]
    fn decoupled_levels_are_real_diagonal() {
        let d = Dispersion::chiral_linear(1.0, 0.0).unwrap();
        let h = build_unidirectional(&chain(&[(0.1, 0.0, 0), (-0.3, 0.0, 1), (0.7, 0.0, 4)]), &d).unwrap();
        let expected = ComplexMatrix::from_diagonal(&[C::new(0.1, 0.0), C::new(-0.3, 0.0), C::new(0.7, 0.0)]);
        assert_eq!(h.matrix(), &expected);
    }

    #[test]
    fn unidirectional_rejects_cosine_and_out_of_band() {
        let c = chain(&[(0.0, 0.1, 0)]);
        assert_eq!(build_unidirectional(&c, &Dispersion::cosine(1.0).unwrap()), Err(Error::NotChiral));
        let d = Dispersion::chiral_linear(0.1, 0.0).unwrap();
        assert!(matches!(build_unidirectional(&chain(&[(5.0, 0.1, 0)]), &d), Err(Error::OutOfBand { .. })));
    }

    #[test]
    fn bidirectional_even_separation_has_bic() {
        let (kc, hop) = (0.3, 1.0);
        let h = build_bidirectional(&chain(&[(0.0, kc, 0), (0.0, kc, 2)]), hop).unwrap();
        let g = kc * kc / (2.0 * hop);
        let expected = ComplexMatrix::from_rows(&[vec![C::new(0.0, -g), C::new(0.0, g)], vec![C::new(0.0, g), C::new(0.0, -g)]]).unwrap();
        assert!(h.matrix().max_abs_diff(&expected) < 1e-15);
        let bic = find_bound_states(&h, 1e-12).unwrap();
        assert_eq!(bic.len(), 1);
        let mut ev = eigvals(h.matrix()).unwrap().values;
        ev.sort_by(|a, b| b.im.partial_cmp(&a.im).unwrap());
        assert!(ev[0].norm() < 1e-12);
        assert!((ev[1] - C::new(0.0, -kc * kc / hop)).norm() < 1e-12);
    }

    #[test]
    fn bidirectional_odd_separation_decays() {
        let h = build_bidirectional(&chain(&[(0.0, 0.3, 0), (0.0, 0.5, 1)]), 1.0).unwrap();
        assert!((h.matrix()[(1, 0)] - C::new(0.075, 0.0)).norm() < 1e-15);
        assert!(find_bound_states(&h, 1e-9).unwrap().is_empty());
        for z in eigvals(h.matrix()).unwrap().values {
            assert!(z.im < 0.0);
        }
    }

    #[test]
    fn single_level_bidirectional() {
        let h = build_bidirectional(&chain(&[(0.0, 0.4, 7)]), 2.0).unwrap();
        assert!((h.matrix()[(0, 0)] - C::new(0.0, -0.04)).norm() < 1e-16);
        assert!(build_bidirectional(&chain(&[(4.0, 0.4, 7)]), 2.0).is_err());
    }

    #[test]
    fn degenerate_chain_is_order_n_exceptional_point() {
        let d = Dispersion::chiral_linear(1.0, 0.0).unwrap();
        for n in 2..=6 {
            let h = build_unidirectional(&LevelChain::uniform(n, 0.0, 1.0, 1).unwrap(), &d).unwrap();
            let lam = h.matrix()[(0, 0)];
            let shifted = h.matrix().shift_diagonal(-lam);
            assert_eq!(rank(&shifted, 1e-8).unwrap(), n - 1);
        }
    }

    #[test]
    fn basis_mapping_roundtrip() {
        let d = Dispersion::chiral_linear(1.0, 0.0).unwrap();
        let h = build_unidirectional(&chain(&[(0.0, 0.1, 9), (0.1, 0.1, 1), (0.2, 0.1, 4)]), &d).unwrap();
        let v = vec![C::new(1.0, 0.0), C::new(2.0, 0.0), C::new(3.0, 0.0)];
        let s = h.to_sorted(&v).unwrap();
        assert_eq!(s, vec![C::new(2.0, 0.0), C::new(3.0, 0.0), C::new(1.0, 0.0)]);
        assert_eq!(h.to_original(&s).unwrap(), v);
    }

    fn arb_chain() -> impl Strategy<Value = LevelChain<f64>> {
        proptest::collection::vec((-2.0f64..2.0, 0.0f64..1.0, -30i64..30), 1..10).prop_filter_map("distinct sites", |v| {
            LevelChain::new(v.into_iter().map(|(w, k, s)| Level::new(w, k, s)).collect()).ok()
        })
    }

    proptest! {
        #[test]
        fn unidirectional_is_exactly_lower_triangular(c in arb_chain(), v in 0.7f64..5.0) {
            let d = Dispersion::ChiralLinear { velocity: v, omega0: 0.0 };
            let h = build_unidirectional(&c, &d).unwrap();
            prop_assert!(h.matrix().is_lower_triangular());
            let ev = eigvals(h.matrix()).unwrap().values;
            for (z, l) in ev.iter().zip(h.chain().levels()) {
                let expected = C::new(l.omega, -l.kappa * l.kappa / (2.0 * v));
                prop_assert!((z - expected).norm() <= 1e-12);
                if l.kappa > 0.0 {
                    prop_assert!(z.im < 0.0);
                }
            }
        }

        #[test]
        fn band_centre_form_agrees(kappas in proptest::collection::vec(0.0f64..1.0, 1..8), hop in 0.5f64..3.0) {
            let c = LevelChain::new(kappas.iter().enumerate().map(|(i, &k)| Level::new(0.0, k, (i * i) as i64)).collect()).unwrap();
            let h = build_bidirectional(&c, hop).unwrap();
            let b2 = bidirectional_band_center(&c, hop).unwrap();
            prop_assert!(h.matrix().max_abs_diff(&b2) <= 4.0 * f64::EPSILON * b2.max_abs().max(1e-300));
        }
    }
}
