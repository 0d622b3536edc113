//! Eigenvalue kernels: complex Hessenberg–QR for general matrices and implicit QL
//! for real symmetric tridiagonal matrices.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

/// Eigenvector condition estimates above this raise [`Spectrum::ill_conditioned`].
pub const CONDITION_WARNING: f64 = 1e8;

const QR_ITERATIONS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues of a square matrix together with a conditioning diagnostic.
#[derive(Debug, Clone)]
pub struct Spectrum<T> {
    /// Eigenvalues with multiplicity, in the order they appear on the diagonal of
    /// the triangular (Schur) form.
    pub values: Vec<Cx<T>>,
    /// 1-norm condition estimate of the unit-column eigenvector matrix.
    pub condition: T,
    /// Set when `condition` exceeds [`CONDITION_WARNING`]; eigenvalues are then
    /// only accurate to roughly `eps^(1/k)` for a k-fold coalescence.
    pub ill_conditioned: bool,
}

/// Eigenvalues via Householder reduction to Hessenberg form and shifted QR.
///
/// Triangular input is recognised and returns its diagonal verbatim.
pub fn eigvals<T: Real>(m: &ComplexMatrix<T>) -> Result<Spectrum<T>> {
    let n = m.ensure_square()?;
    if n == 0 {
        return Ok(Spectrum { values: Vec::new(), condition: T::one(), ill_conditioned: false });
    }
    let schur = if m.is_upper_triangular() {
        m.clone()
    } else if m.is_lower_triangular() {
        // same spectrum, and the transposed eigenvector basis has the same conditioning
        m.transpose()
    } else {
        let mut h = hessenberg(m);
        schur_qr(&mut h)?;
        h
    };
    let values = schur.diagonal();
    let condition = triangular_eigenvector_condition(&schur);
    Ok(Spectrum { values, condition, ill_conditioned: !(condition <= T::lit(CONDITION_WARNING)) })
}

/// Unitary similarity to upper Hessenberg form.
fn hessenberg<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let n = m.rows();
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        let xnorm = ((k + 1)..n).map(|i| h[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == T::zero() { Complex::one() } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        let mut v: Vec<Cx<T>> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        v[0] = v[0] - alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if vnorm == T::zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z = *z / vnorm;
        }
        let two = T::lit(2.0);
        // left: rows k+1.., H <- (I - 2vv^H) H
        for j in k..n {
            let dot = v.iter().enumerate().fold(Cx::<T>::zero(), |acc, (r, vr)| acc + vr.conj() * h[(k + 1 + r, j)]);
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] = h[(k + 1 + r, j)] - vr * dot * two;
            }
        }
        // right: columns k+1.., H <- H (I - 2vv^H)
        for i in 0..n {
            let dot = v.iter().enumerate().fold(Cx::<T>::zero(), |acc, (c, vc)| acc + h[(i, k + 1 + c)] * vc);
            for (c, vc) in v.iter().enumerate() {
                h[(i, k + 1 + c)] = h[(i, k + 1 + c)] - dot * vc.conj() * two;
            }
        }
        h[(k + 1, k)] = alpha;
        for i in (k + 2)..n {
            h[(i, k)] = Complex::zero();
        }
    }
    h
}

/// Complex Givens rotation `[[c, s], [-conj(s), c]]` annihilating `b` against `a`.
fn givens<T: Real>(a: Cx<T>, b: Cx<T>) -> (T, Cx<T>) {
    let na = a.norm();
    let nb = b.norm();
    if nb == T::zero() {
        return (T::one(), Complex::zero());
    }
    if na == T::zero() {
        return (T::zero(), Complex::one());
    }
    let rho = na.hypot(nb);
    (na / rho, a * b.conj() / (na * rho))
}

/// Reduces an upper Hessenberg matrix in place to upper triangular Schur form.
fn schur_qr<T: Real>(h: &mut ComplexMatrix<T>) -> Result<()> {
    let n = h.rows();
    let eps = T::epsilon();
    let scale = h.max_abs().max(T::min_positive_value());
    let cap = QR_ITERATIONS_PER_EIGENVALUE * n;
    let mut total = 0usize;
    let mut its = 0usize;
    let mut hi = n - 1;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if s == T::zero() {
                s = scale;
            }
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = Complex::zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if total > cap {
            return Err(Error::NoConvergence { what: "Hessenberg QR", iterations: total });
        }

        let mu = if its % 10 == 0 {
            // exceptional shift to break cycles
            let extra = if hi >= 2 { h[(hi - 1, hi - 2)].norm() } else { T::zero() };
            h[(hi, hi)] + Complex::from(h[(hi, hi - 1)].norm() + extra)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for i in l..=hi {
            h[(i, i)] = h[(i, i)] - mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            h[(k + 1, k)] = Complex::zero();
            rots.push((c, s));
        }
        for (off, (c, s)) in rots.into_iter().enumerate() {
            let k = l + off;
            for i in 0..=(k + 2).min(hi) {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
        }
        for i in l..=hi {
            h[(i, i)] = h[(i, i)] + mu;
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = Complex::zero();
        }
    }
    Ok(())
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift<T: Real>(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>) -> Cx<T> {
    let half = T::lit(0.5);
    let mean = (a + d) * half;
    let diff = (a - d) * half;
    let root = (diff * diff + b * c).sqrt();
    let l1 = mean + root;
    let l2 = mean - root;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Condition estimate `‖X‖₁‖X⁻¹‖₁` for the unit-column eigenvector matrix of an
/// upper triangular matrix. Coalescing eigenvalues are separated by a floor of
/// `eps‖T‖`, which drives the estimate to ~`1/eps` at a defective point.
fn triangular_eigenvector_condition<T: Real>(t: &ComplexMatrix<T>) -> T {
    let n = t.rows();
    let floor = (T::epsilon() * t.max_abs()).max(T::min_positive_value());
    let mut x = ComplexMatrix::<T>::zeros(n, n);
    for j in 0..n {
        x[(j, j)] = Complex::one();
        for i in (0..j).rev() {
            let s = ((i + 1)..=j).fold(Cx::<T>::zero(), |acc, k| acc + t[(i, k)] * x[(k, j)]);
            let mut d = t[(i, i)] - t[(j, j)];
            if d.norm() < floor {
                d = Complex::from(floor);
            }
            x[(i, j)] = -s / d;
        }
        let norm = (0..=j).map(|i| x[(i, j)].norm_sqr()).sum::<T>().sqrt();
        if !norm.is_finite() {
            return T::infinity();
        }
        for i in 0..=j {
            x[(i, j)] = x[(i, j)] / norm;
        }
    }
    match super::lu::solve(&x, &ComplexMatrix::identity(n)) {
        Ok(inv) if inv.is_finite() => x.norm1() * inv.norm1(),
        _ => T::infinity(),
    }
}

/// Eigen-decomposition of a real symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct TridiagonalEigen<T> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// `vectors[j]` is the unit eigenvector for `values[j]`.
    pub vectors: Vec<Vec<T>>,
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix with
/// diagonal `diag` and off-diagonal `off` (`off[i]` couples `i` and `i + 1`).
pub fn symmetric_tridiagonal_eigen<T: Real>(diag: &[T], off: &[T]) -> Result<TridiagonalEigen<T>> {
    let n = diag.len();
    if n == 0 {
        return Ok(TridiagonalEigen { values: Vec::new(), vectors: Vec::new() });
    }
    if off.len() + 1 != n {
        return Err(Error::DimensionMismatch { expected: n - 1, got: off.len() });
    }
    let mut d = diag.to_vec();
    let mut e: Vec<T> = off.iter().copied().chain(std::iter::once(T::zero())).collect();
    // z[row][col]: columns become eigenvectors
    let mut z = vec![vec![T::zero(); n]; n];
    for (i, row) in z.iter_mut().enumerate() {
        row[i] = T::one();
    }
    let two = T::lit(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence { what: "tridiagonal QL", iterations: iter });
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let zf = row[i + 1];
                    row[i + 1] = s * row[i] + c * zf;
                    row[i] = c * row[i] - s * zf;
                }
            }
            if underflow {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&j| d[j]).collect();
    let vectors = order.iter().map(|&j| z.iter().map(|row| row[j]).collect()).collect();
    Ok(TridiagonalEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    fn sorted(mut v: Vec<C>) -> Vec<C> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn triangular_returns_diagonal_exactly() {
        let m = ComplexMatrix::from_rows(&[
            vec![C::new(1.0, -0.5), C::new(0.0, 0.0), C::new(0.0, 0.0)],
            vec![C::new(3.0, 2.0), C::new(-2.0, 0.1), C::new(0.0, 0.0)],
            vec![C::new(0.5, 0.0), C::new(1.0, 1.0), C::new(0.25, 0.0)],
        ])
        .unwrap();
        let s = eigvals(&m).unwrap();
        assert_eq!(s.values, m.diagonal());
        assert!(!s.ill_conditioned);
    }

    #[test]
    fn defective_block_is_flagged() {
        let lam = C::new(0.3, -1.0);
        let m = ComplexMatrix::from_rows(&[vec![lam, C::new(0.0, 0.0)], vec![C::new(1.0, 0.0), lam]]).unwrap();
        let s = eigvals(&m).unwrap();
        assert_eq!(s.values, vec![lam, lam]);
        assert!(s.ill_conditioned);
    }

    #[test]
    fn two_by_two_by_hand() {
        // -(i a)[[1,-1],[-1,1]] has eigenvalues 0 and -2 i a
        let a = 0.37;
        let m = ComplexMatrix::from_rows(&[
            vec![C::new(0.0, -a), C::new(0.0, a)],
            vec![C::new(0.0, a), C::new(0.0, -a)],
        ])
        .unwrap();
        let s = sorted(eigvals(&m).unwrap().values);
        let mut got: Vec<f64> = s.iter().map(|z| z.im).collect();
        got.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((got[0] + 2.0 * a).abs() < 1e-14 && got[1].abs() < 1e-14);
        assert!(s.iter().all(|z| z.re.abs() < 1e-14));
    }

    #[test]
    fn similarity_invariants_for_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in [2, 3, 5, 9, 16, 30] {
            let m = ComplexMatrix::from_fn(n, n, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let s = eigvals(&m).unwrap();
            assert_eq!(s.values.len(), n);
            let tr: C = s.values.iter().sum();
            assert!((tr - m.trace()).norm() < 1e-11 * n as f64);
            let det: C = s.values.iter().product();
            let lu = super::super::lu::determinant(&m).unwrap();
            assert!((det - lu).norm() < 1e-9 * lu.norm().max(1.0), "n={n}");
            // each eigenvalue makes M - lambda I numerically singular
            for lam in &s.values {
                let shifted = m.shift_diagonal(-lam);
                let sv = super::super::svd::singular_values(&shifted).unwrap();
                assert!(*sv.last().unwrap() < 1e-10 * sv[0], "n={n}");
            }
        }
    }

    #[test]
    fn hermitian_input_has_real_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = ComplexMatrix::from_fn(8, 8, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let h = &a + &a.adjoint();
        let s = eigvals(&h).unwrap();
        assert!(s.values.iter().all(|z| z.im.abs() < 1e-12));
        assert!(!s.ill_conditioned);
    }

    #[test]
    fn tridiagonal_matches_path_graph() {
        // path graph Laplacian-like: eigenvalues 2 cos(pi j / (n + 1))
        let n = 12;
        let eig = symmetric_tridiagonal_eigen(&vec![0.0; n], &vec![1.0; n - 1]).unwrap();
        let mut expect: Vec<f64> =
            (1..=n).map(|j| 2.0 * (std::f64::consts::PI * j as f64 / (n as f64 + 1.0)).cos()).collect();
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in eig.values.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-13);
        }
        for (lam, v) in eig.values.iter().zip(&eig.vectors) {
            let norm: f64 = v.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-12);
            for i in 0..n {
                let left = if i > 0 { v[i - 1] } else { 0.0 };
                let right = if i + 1 < n { v[i + 1] } else { 0.0 };
                assert!((left + right - lam * v[i]).abs() < 1e-12);
            }
        }
    }
}
