//! Time evolution under an effective Hamiltonian: amplitudes, survival, the
//! optimal-state bound `sigma_max`, resilience times and Bloch ladders.

mod bloch;
mod quiescence;
mod trace;

pub use bloch::{bloch_scenario, BlochResult};
pub use quiescence::{quiescence_from_curve, quiescence_time, sigma_max_curve, QuiescenceResult, SigmaCurve};
pub use trace::{propagate, propagator, uniform_grid, DecayTrace};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_unidirectional, Dispersion, Level, LevelChain};
    use crate::numerics::ComplexMatrix;
    use crate::Error;
    use num_complex::Complex;
    use proptest::prelude::*;

    type C = Complex<f64>;

    fn unit(n: usize, i: usize) -> Vec<C> {
        let mut v = vec![C::new(0.0, 0.0); n];
        v[i] = C::new(1.0, 0.0);
        v
    }

    /// Degenerate chain on consecutive sites with `k^2 / (2 v) = 1`.
    fn degenerate(n: usize) -> ComplexMatrix<f64> {
        let d = Dispersion::chiral_linear(0.5, 0.0).unwrap();
        build_unidirectional(&LevelChain::uniform(n, 0.0, 1.0, 1).unwrap(), &d).unwrap().into_matrix()
    }

    #[test]
    fn scalar_decay() {
        let h = ComplexMatrix::from_diagonal(&[C::new(0.0, -0.3)]);
        let tr = propagate(&h, &unit(1, 0), &uniform_grid(0.25, 40)).unwrap();
        for (t, p) in tr.times.iter().zip(&tr.survival) {
            assert!((p - (-0.6 * t).exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn two_level_exceptional_point_closed_form() {
        let (v, kappa) = (2.0, 0.6);
        let d = Dispersion::chiral_linear(v, 0.0).unwrap();
        let h = build_unidirectional(&LevelChain::uniform(2, 0.0, kappa, 1).unwrap(), &d).unwrap();
        let (g, delta) = (kappa * kappa / v, kappa * kappa / (2.0 * v));
        let times: Vec<f64> = vec![0.0, 0.3, 1.7, 1.0 / delta, 12.0];
        let tr = propagate(&h, &unit(2, 0), &times).unwrap();
        for (j, &t) in times.iter().enumerate() {
            assert!((tr.amplitudes[j][1].norm() - g * t * (-delta * t).exp()).abs() < 1e-12);
        }
        // |c2| peaks at 1/delta
        let peak = |t: f64| g * t * (-delta * t).exp();
        assert!(peak(1.0 / delta) > peak(0.99 / delta) && peak(1.0 / delta) > peak(1.01 / delta));
    }

    #[test]
    fn first_level_ignores_downstream_partner() {
        let k: Vec<f64> = (0..64).map(|i| 2.0 + i as f64 * 0.015).collect();
        let w: Vec<f64> = k.iter().map(|&kk| -1.5 + 1.6 * (kk - 2.536)).collect();
        let d = Dispersion::tabulated(k, w).unwrap();
        let chain = LevelChain::new(vec![Level::new(-1.5, 0.2, 0), Level::new(-1.5, 0.2, 3)]).unwrap();
        let h = build_unidirectional(&chain, &d).unwrap();
        let tr = propagate(&h, &unit(2, 0), &uniform_grid(1.0, 150)).unwrap();
        for (t, p) in tr.times.iter().zip(tr.occupation(0)) {
            assert!((p - (-0.025 * t).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let h = ComplexMatrix::<f64>::identity(2);
        assert!(matches!(propagate(&h, &unit(3, 0), &[0.0]), Err(Error::DimensionMismatch { .. })));
        assert!(propagate(&h, &[C::new(2.0, 0.0), C::new(0.0, 0.0)], &[0.0]).is_err());
        assert!(propagate(&h, &unit(2, 0), &[0.1, 0.2]).is_err());
        assert!(propagate(&h, &unit(2, 0), &[0.0, 0.2, 0.1]).is_err());
    }

    #[test]
    fn sigma_max_scalar() {
        let h = ComplexMatrix::from_diagonal(&[C::new(0.4, -0.7)]);
        let curve = sigma_max_curve(&h, &uniform_grid(0.1, 50)).unwrap();
        assert_eq!(curve.sigma[0], 1.0);
        for (t, s) in curve.times.iter().zip(&curve.sigma) {
            assert!((s - (-1.4 * t).exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn quiescence_scalar() {
        let h = ComplexMatrix::from_diagonal(&[C::new(0.0, -1.0)]);
        let r = quiescence_time(&h, 0.5, 2.0, 0.01).unwrap();
        assert!((r.tau - 2f64.ln() / 2.0).abs() < 1e-4);
        assert!(matches!(quiescence_time(&h, 0.5, 0.2, 0.001), Err(Error::NoCrossing { .. })));
        assert!(quiescence_time(&h, 0.5, 2.0, 0.1).is_err());
        assert!(quiescence_time(&h, 1.5, 2.0, 0.01).is_err());
    }

    #[test]
    fn twenty_level_plateau() {
        let h = degenerate(20);
        let r = quiescence_time(&h, 0.97, 50.0, 0.1).unwrap();
        assert!((24.0..=32.0).contains(&r.tau), "tau = {}", r.tau);
        let curve = &r.sigma_curve;
        assert!(curve.sigma.iter().zip(&curve.times).all(|(s, t)| *t > r.tau || *s > 0.97 - 1e-9));
        // launching the optimal state attains the bound at tau
        let tr = propagate(&h, &r.optimal_state, &[0.0, r.tau]).unwrap();
        assert!((tr.survival[1] - 0.97).abs() < 2e-3);
    }

    #[test]
    fn complete_decay_of_degenerate_chain() {
        let h = degenerate(6);
        let c0: Vec<C> = (0..6).map(|_| C::new(1.0 / 6f64.sqrt(), 0.0)).collect();
        let tr = propagate(&h, &c0, &[0.0, 10.0, 40.0]).unwrap();
        assert!(tr.survival[2] < 1e-6);
    }

    #[test]
    fn bloch_ladder() {
        let delta = 0.05;
        let c = 10.0 * delta;
        let t_b = std::f64::consts::TAU / c;
        let times: Vec<f64> = (0..=200).map(|j| j as f64 * t_b / 50.0).collect();
        let r = bloch_scenario(6, c, delta, &unit(6, 0), &times).unwrap();
        assert!((r.t_b - t_b).abs() < 1e-15);
        let mut eigs = r.eigs.clone();
        eigs.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (a, z) in eigs.iter().enumerate() {
            assert!((z - C::new(c * a as f64, -delta)).norm() < 1e-13);
        }
        for j in 0..150 {
            let ratio = r.trace.survival[j + 50] / r.trace.survival[j];
            assert!((ratio - (-2.0 * delta * t_b).exp()).abs() < 1e-8);
        }
    }

    #[test]
    fn bloch_vanishing_gradient_meets_exceptional_point() {
        let delta = 0.1;
        let times = uniform_grid(0.5, 60);
        let r = bloch_scenario(4, 1e-12 * delta, delta, &unit(4, 0), &times).unwrap();
        let kappa = (2.0 * delta).sqrt();
        let d = Dispersion::chiral_linear(1.0, 0.0).unwrap();
        let ep = build_unidirectional(&LevelChain::uniform(4, 0.0, kappa, 1).unwrap(), &d).unwrap();
        let tr = propagate(&ep, &unit(4, 0), &times).unwrap();
        for (a, b) in r.trace.amplitudes.iter().zip(&tr.amplitudes) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).norm() < 1e-6);
            }
        }
    }

    fn arb_chain() -> impl Strategy<Value = LevelChain<f64>> {
        proptest::collection::vec((-1.0f64..1.0, 0.05f64..0.6, 0i64..12), 1..7).prop_filter_map("distinct sites", |v| {
            LevelChain::new(v.into_iter().map(|(w, k, s)| Level::new(w, k, s)).collect()).ok()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn survival_bounded_by_sigma_max(c in arb_chain(), seed in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 7)) {
            let d = Dispersion::ChiralLinear { velocity: 1.0, omega0: 0.0 };
            let h = build_unidirectional(&c, &d).unwrap();
            let n = h.n();
            let mut c0: Vec<C> = seed[..n].iter().map(|&(a, b)| C::new(a, b)).collect();
            let nrm = crate::numerics::vec_norm(&c0);
            prop_assume!(nrm > 1e-3);
            c0.iter_mut().for_each(|z| *z /= nrm);
            let times = uniform_grid(0.5, 40);
            let tr = propagate(&h, &c0, &times).unwrap();
            let curve = sigma_max_curve(&h, &times).unwrap();
            for (p, s) in tr.survival.iter().zip(&curve.sigma) {
                prop_assert!(*p <= s + 1e-10);
            }
        }

        #[test]
        fn common_resonance_never_gains_population(kappas in proptest::collection::vec(0.05f64..0.8, 1..7), w in -1.0f64..1.0) {
            let c = LevelChain::new(kappas.iter().enumerate().map(|(i, &k)| Level::new(w, k, 2 * i as i64)).collect()).unwrap();
            let h = build_unidirectional(&c, &Dispersion::ChiralLinear { velocity: 1.3, omega0: 0.0 }).unwrap();
            let times = uniform_grid(0.5, 40);
            let curve = sigma_max_curve(&h, &times).unwrap();
            for s in &curve.sigma {
                prop_assert!(*s <= 1.0 + 1e-10);
            }
        }

        #[test]
        fn first_level_decouples(c in arb_chain()) {
            let d = Dispersion::ChiralLinear { velocity: 1.0, omega0: 0.0 };
            let h = build_unidirectional(&c, &d).unwrap();
            let first = h.chain().levels()[0];
            let alone = build_unidirectional(&LevelChain::new(vec![first]).unwrap(), &d).unwrap();
            let times = uniform_grid(0.5, 30);
            let c0: Vec<C> = (0..h.n()).map(|i| C::new((i + 1) as f64, 0.0)).collect();
            let nrm = crate::numerics::vec_norm(&c0);
            let c0: Vec<C> = c0.iter().map(|z| z / nrm).collect();
            let full = propagate(&h, &c0, &times).unwrap();
            let single = propagate(&alone, &[C::new(1.0, 0.0)], &times).unwrap();
            for (a, b) in full.amplitudes.iter().zip(&single.amplitudes) {
                prop_assert!((a[0].norm() - b[0].norm() * c0[0].re).abs() <= 1e-12);
            }
        }
    }
}
