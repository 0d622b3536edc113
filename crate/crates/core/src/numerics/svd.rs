//! Singular values (one-sided Jacobi) and the dominant eigenpair of `M^H M`
//! (power iteration).

use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::{inner, vec_norm};
use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

const JACOBI_SWEEPS: usize = 80;
const POWER_ITERATIONS: usize = 2_000;
const POWER_SQUARINGS: usize = 4;

/// Singular values in descending order, by one-sided (Hestenes) Jacobi.
pub fn singular_values<T: Real>(m: &ComplexMatrix<T>) -> Result<Vec<T>> {
    Ok(jacobi_svd(m)?.0)
}

/// Returns descending singular values and the matching right singular vectors
/// (`vectors[j]` belongs to `values[j]`).
pub fn jacobi_svd<T: Real>(m: &ComplexMatrix<T>) -> Result<(Vec<T>, Vec<Vec<Cx<T>>>)> {
    let (rows, n) = (m.rows(), m.cols());
    // column-major working copies
    let mut a: Vec<Vec<Cx<T>>> = (0..n).map(|j| (0..rows).map(|i| m[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<Cx<T>>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { Complex::one() } else { Complex::zero() }).collect())
        .collect();
    let eps = T::epsilon();
    let mut converged = n < 2;
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = a[p].iter().map(|z| z.norm_sqr()).sum::<T>();
                let beta = a[q].iter().map(|z| z.norm_sqr()).sum::<T>();
                let gamma = inner(&a[p], &a[q]);
                let g = gamma.norm();
                if g == T::zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let rotate = |cols: &mut Vec<Vec<Cx<T>>>| {
                    for k in 0..cols[p].len() {
                        let xp = cols[p][k];
                        let xq = cols[q][k] * phase.conj();
                        cols[p][k] = xp * c - xq * s;
                        cols[q][k] = (xp * s + xq * c) * phase;
                    }
                };
                rotate(&mut a);
                rotate(&mut v);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { what: "Jacobi SVD", iterations: JACOBI_SWEEPS });
    }
    let mut pairs: Vec<(T, Vec<Cx<T>>)> = a.iter().map(|col| vec_norm(col)).zip(v).collect();
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));
    Ok(pairs.into_iter().unzip())
}

/// Numerical rank: number of singular values above `threshold`.
pub fn rank<T: Real>(m: &ComplexMatrix<T>, threshold: T) -> Result<usize> {
    Ok(singular_values(m)?.into_iter().filter(|s| *s > threshold).count())
}

/// Dominant eigenpair of `M^H M`.
#[derive(Debug, Clone)]
pub struct TopSingular<T> {
    /// Largest eigenvalue of `M^H M`, i.e. the *squared* top singular value of `M`.
    pub sigma: T,
    /// Unit eigenvector of `M^H M` for `sigma`.
    pub vector: Vec<Cx<T>>,
    pub iterations: usize,
}

/// Power iteration for the top eigenpair of `M^H M` (tolerance 1e-12 on the
/// Rayleigh quotient). See [`largest_singular_from`] for warm starts.
pub fn largest_singular<T: Real>(m: &ComplexMatrix<T>) -> Result<TopSingular<T>> {
    largest_singular_from(m, None)
}

/// Power iteration on `(M^H M)^(2^s)` with the Rayleigh quotient taken on `M^H M`.
///
/// Squaring a few times first raises the eigenvalue ratio that governs
/// convergence; the eigenvectors are unchanged. A clustered top of the spectrum
/// can still stall the iteration, in which case the pair is taken from a Jacobi SVD.
pub fn largest_singular_from<T: Real>(m: &ComplexMatrix<T>, start: Option<&[Cx<T>]>) -> Result<TopSingular<T>> {
    let n = m.ensure_square()?;
    if n == 0 {
        return Ok(TopSingular { sigma: T::zero(), vector: Vec::new(), iterations: 0 });
    }
    let b = &m.adjoint() * m;
    let bnorm = b.max_abs();
    if bnorm == T::zero() {
        let mut e = vec![Complex::zero(); n];
        e[0] = Complex::one();
        return Ok(TopSingular { sigma: T::zero(), vector: e, iterations: 0 });
    }
    let mut c = b.scale_real(T::one() / bnorm);
    for _ in 0..POWER_SQUARINGS {
        let sq = &c * &c;
        let s = sq.max_abs();
        if s == T::zero() {
            break;
        }
        c = sq.scale_real(T::one() / s);
    }

    let mut x: Vec<Cx<T>> = match start {
        Some(s) if s.len() == n && vec_norm(s) > T::zero() => s.to_vec(),
        Some(s) if s.len() != n => return Err(Error::DimensionMismatch { expected: n, got: s.len() }),
        _ => {
            // the heaviest column of B overlaps the dominant eigenvector
            let j = (0..n)
                .max_by(|&p, &q| {
                    let np = (0..n).map(|i| b[(i, p)].norm_sqr()).sum::<T>();
                    let nq = (0..n).map(|i| b[(i, q)].norm_sqr()).sum::<T>();
                    np.partial_cmp(&nq).unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(0);
            (0..n).map(|i| b[(i, j)] + Cx::<T>::from(T::lit(1e-3) * bnorm)).collect()
        }
    };
    normalize(&mut x);

    let tol = T::tol(1e-12);
    let rayleigh = |x: &[Cx<T>]| -> Result<T> { Ok(inner(x, &b.mul_vec(x)?).re) };
    let mut rho = rayleigh(&x)?;
    for it in 1..=POWER_ITERATIONS {
        let mut y = c.mul_vec(&x)?;
        if vec_norm(&y) == T::zero() {
            break;
        }
        normalize(&mut y);
        let next = rayleigh(&y)?;
        x = y;
        let settled = (next - rho).abs() <= tol * next.abs().max(T::min_positive_value());
        rho = next;
        if settled && it >= 2 {
            return Ok(TopSingular { sigma: rho.max(T::zero()), vector: x, iterations: it });
        }
    }
    let (values, mut vectors) = jacobi_svd(m)?;
    Ok(TopSingular { sigma: values[0] * values[0], vector: vectors.swap_remove(0), iterations: POWER_ITERATIONS })
}

fn normalize<T: Real>(x: &mut [Cx<T>]) {
    let nrm = vec_norm(x);
    if nrm > T::zero() {
        for z in x.iter_mut() {
            *z = *z / nrm;
        }
    }
}
