//! Matrix exponential by scaling and squaring with a [13/13] Padé approximant.
//!
//! Small-norm input (`‖M‖₁ < 0.5`) takes a 30-term Taylor sum instead. Both paths
//! only add and multiply matrices and solve with a triangular denominator when the
//! input is triangular, so lower-triangular input yields an exactly lower-triangular
//! result.

use super::lu::solve;
use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default cap on `‖M‖₁` above which [`expm`] refuses to run.
pub const DEFAULT_NORM_CAP: f64 = 1e4;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;
const TAYLOR_TERMS: usize = 30;
const TAYLOR_NORM: f64 = 0.5;

pub fn expm<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    expm_with_cap(m, T::lit(DEFAULT_NORM_CAP))
}

pub fn expm_with_cap<T: Real>(m: &ComplexMatrix<T>, cap: T) -> Result<ComplexMatrix<T>> {
    let n = m.ensure_square()?;
    if !m.is_finite() {
        return Err(Error::InvalidInput("matrix exponential of non-finite matrix".into()));
    }
    let norm = m.norm1();
    if norm > cap {
        return Err(Error::Overflow { norm: norm.to_f64().unwrap_or(f64::INFINITY), cap: cap.to_f64().unwrap_or(0.0) });
    }
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    if norm < T::lit(TAYLOR_NORM) {
        return Ok(taylor(m, TAYLOR_TERMS));
    }

    let ratio = (norm / T::lit(THETA13)).to_f64().unwrap_or(0.0);
    let squarings = if ratio > 1.0 { ratio.log2().ceil() as i32 } else { 0 };
    let a = m.scale_real(T::lit(2f64.powi(-squarings)));
    let mut r = pade13(&a)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

fn pade13<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let n = a.rows();
    let b = |k: usize| T::lit(PADE13[k]);
    let id = ComplexMatrix::identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let lin = |c6: T, c4: T, c2: T| -> ComplexMatrix<T> {
        &(&a6.scale_real(c6) + &a4.scale_real(c4)) + &a2.scale_real(c2)
    };

    let u_inner = &(&a6 * &lin(b(13), b(11), b(9))) + &lin(b(7), b(5), b(3));
    let u = a * &(&u_inner + &id.scale_real(b(1)));
    let v = &(&(&a6 * &lin(b(12), b(10), b(8))) + &lin(b(6), b(4), b(2))) + &id.scale_real(b(0));

    solve(&(&v - &u), &(&v + &u))
}

fn taylor<T: Real>(m: &ComplexMatrix<T>, terms: usize) -> ComplexMatrix<T> {
    // Horner form: I + M/1 (I + M/2 (I + ... (I + M/terms)))
    let n = m.rows();
    let id = ComplexMatrix::identity(n);
    let mut acc = id.clone();
    for k in (1..=terms).rev() {
        acc = &id + &(m * &acc).scale_real(T::one() / T::from_count(k));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize, norm: f64) -> ComplexMatrix<f64> {
        let m = ComplexMatrix::from_fn(n, n, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let s = norm / m.norm1();
        m.scale_real(s)
    }

    /// Literal partial sum `sum_{j<=terms} M^j / j!`, accumulated term by term.
    fn series(m: &ComplexMatrix<f64>, terms: usize) -> ComplexMatrix<f64> {
        let mut term = ComplexMatrix::identity(m.rows());
        let mut sum = term.clone();
        for j in 1..=terms {
            term = (&term * m).scale_real(1.0 / j as f64);
            sum = &sum + &term;
        }
        sum
    }

    #[test]
    fn zero_and_diagonal() {
        let z = ComplexMatrix::<f64>::zeros(3, 3);
        assert_eq!(expm(&z).unwrap(), ComplexMatrix::identity(3));
        let d = [C::new(1.0, 0.5), C::new(-2.0, 3.0), C::new(0.0, -7.0)];
        let e = expm(&ComplexMatrix::from_diagonal(&d)).unwrap();
        for (i, di) in d.iter().enumerate() {
            assert!((e[(i, i)] - di.exp()).norm() < 1e-13 * di.exp().norm().max(1.0));
        }
        assert!(e.is_lower_triangular() && e.is_upper_triangular());
    }

    #[test]
    fn shifted_nilpotent_closed_form() {
        // M = -i t [[w - i d, 0], [g, w - i d]]
        let (w, d, g, t) = (0.7, 0.3, 1.9, 4.0);
        let lam = C::new(w, -d);
        let h = ComplexMatrix::from_rows(&[vec![lam, C::new(0.0, 0.0)], vec![C::new(g, 0.0), lam]]).unwrap();
        let e = expm(&h.scale(C::new(0.0, -t))).unwrap();
        let phase = (C::new(0.0, -t) * lam).exp();
        assert!((e[(0, 0)] - phase).norm() < 1e-13);
        assert!((e[(1, 0)] - phase * C::new(0.0, -g * t)).norm() < 1e-12);
        assert_eq!(e[(0, 1)], C::new(0.0, 0.0));
        assert!((e[(1, 0)].norm() - g * t * (-d * t).exp()).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_taylor_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 3, 5, 8] {
            for norm in [0.1, 1.0, 3.0, 5.0] {
                let m = random_matrix(&mut rng, n, norm);
                let e = expm(&m).unwrap();
                let s = series(&m, 30);
                assert!(e.max_abs_diff(&s) <= 1e-10 * e.max_abs(), "n={n} norm={norm}");
            }
        }
    }

    #[test]
    fn agrees_with_scaled_series_at_norm_ten() {
        // for ‖M‖ = 10 the plain 30-term sum is not yet converged; halve first
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 4, 6] {
            let m = random_matrix(&mut rng, n, 10.0);
            let mut s = series(&m.scale_real(1.0 / 16.0), 30);
            for _ in 0..4 {
                s = &s * &s;
            }
            let e = expm(&m).unwrap();
            assert!(e.max_abs_diff(&s) <= 1e-10 * e.max_abs());
        }
    }

    #[test]
    fn inverse_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = rng.gen_range(1..7);
            let norm = rng.gen_range(0.0..5.0);
            let a = random_matrix(&mut rng, n, norm);
            let p = &expm(&a).unwrap() * &expm(&a.scale_real(-1.0)).unwrap();
            assert!(p.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-10);
        }
    }

    #[test]
    fn lower_triangular_stays_triangular() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut m = random_matrix(&mut rng, 6, 40.0);
        for i in 0..6 {
            for j in (i + 1)..6 {
                m[(i, j)] = C::new(0.0, 0.0);
            }
        }
        let e = expm(&m).unwrap();
        assert!(e.is_lower_triangular());
    }

    #[test]
    fn errors() {
        let r = ComplexMatrix::<f64>::zeros(2, 3);
        assert!(matches!(expm(&r), Err(Error::NonSquare { .. })));
        let big = ComplexMatrix::<f64>::identity(2).scale_real(2e4);
        assert!(matches!(expm(&big), Err(Error::Overflow { .. })));
        assert!(expm_with_cap(&big, 1e5).is_ok());
    }

    #[test]
    fn single_precision() {
        let m = ComplexMatrix::<f32>::from_diagonal(&[Complex::new(0.0f32, -1.0), Complex::new(-0.5, 0.0)]);
        let e = expm(&m).unwrap();
        assert!((e[(0, 0)] - Complex::new(1f32.cos(), -1f32.sin())).norm() < 1e-6);
        assert!((e[(1, 1)].re - (-0.5f32).exp()).abs() < 1e-6);
    }
}
