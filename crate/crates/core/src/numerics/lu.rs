//! LU factorisation with partial pivoting, linear solves and the determinant.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

/// Packed `PA = LU` factorisation (unit lower `L` below the diagonal, `U` on and above).
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: ComplexMatrix<T>,
    perm: Vec<usize>,
    swaps: usize,
    singular: bool,
}

impl<T: Real> Lu<T> {
    pub fn factor(m: &ComplexMatrix<T>) -> Result<Self> {
        let n = m.ensure_square()?;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut singular = false;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == T::zero() {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f.is_zero() {
                    continue;
                }
                for j in (k + 1)..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - f * u;
                }
            }
        }
        Ok(Self { lu, perm, swaps, singular })
    }

    pub fn determinant(&self) -> Cx<T> {
        if self.singular {
            return Complex::zero();
        }
        let n = self.lu.rows();
        let prod = (0..n).fold(Complex::<T>::one(), |acc, i| acc * self.lu[(i, i)]);
        if self.swaps % 2 == 1 {
            -prod
        } else {
            prod
        }
    }

    /// Solves `A X = B` for a matrix right-hand side.
    pub fn solve(&self, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        let n = self.lu.rows();
        if b.rows() != n {
            return Err(Error::DimensionMismatch { expected: n, got: b.rows() });
        }
        if self.singular {
            return Err(Error::NumericalFailure("singular matrix in linear solve".into()));
        }
        let m = b.cols();
        let mut x = ComplexMatrix::from_fn(n, m, |i, j| b[(self.perm[i], j)]);
        for j in 0..m {
            for i in 0..n {
                let mut s = x[(i, j)];
                for k in 0..i {
                    s = s - self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, j)];
                for k in (i + 1)..n {
                    s = s - self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }
}

/// Solves `A X = B`, using substitution directly when `A` is triangular so that
/// zero patterns of triangular right-hand sides survive exactly.
pub fn solve<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let n = a.ensure_square()?;
    if b.rows() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.rows() });
    }
    if a.is_lower_triangular() {
        forward_substitute(a, b)
    } else if a.is_upper_triangular() {
        back_substitute(a, b)
    } else {
        Lu::factor(a)?.solve(b)
    }
}

fn forward_substitute<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let n = a.rows();
    let mut x = b.clone();
    for j in 0..b.cols() {
        for i in 0..n {
            let d = a[(i, i)];
            if d.is_zero() {
                return Err(Error::NumericalFailure("singular triangular matrix".into()));
            }
            let mut s = x[(i, j)];
            for k in 0..i {
                let xk = x[(k, j)];
                if !xk.is_zero() {
                    s = s - a[(i, k)] * xk;
                }
            }
            x[(i, j)] = if s.is_zero() { Complex::zero() } else { s / d };
        }
    }
    Ok(x)
}

fn back_substitute<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let n = a.rows();
    let mut x = b.clone();
    for j in 0..b.cols() {
        for i in (0..n).rev() {
            let d = a[(i, i)];
            if d.is_zero() {
                return Err(Error::NumericalFailure("singular triangular matrix".into()));
            }
            let mut s = x[(i, j)];
            for k in (i + 1)..n {
                let xk = x[(k, j)];
                if !xk.is_zero() {
                    s = s - a[(i, k)] * xk;
                }
            }
            x[(i, j)] = if s.is_zero() { Complex::zero() } else { s / d };
        }
    }
    Ok(x)
}

/// Determinant via LU with partial pivoting; triangular input short-circuits to
/// the ordered product of its diagonal.
pub fn determinant<T: Real>(m: &ComplexMatrix<T>) -> Result<Cx<T>> {
    m.ensure_square()?;
    if m.is_lower_triangular() || m.is_upper_triangular() {
        return Ok(diagonal_product(m));
    }
    Ok(Lu::factor(m)?.determinant())
}

pub(crate) fn diagonal_product<T: Real>(m: &ComplexMatrix<T>) -> Cx<T> {
    m.diagonal().into_iter().fold(Complex::one(), |acc, d| acc * d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn determinant_small_cases() {
        let id = ComplexMatrix::<f64>::identity(4);
        assert_eq!(determinant(&id).unwrap(), c(1.0, 0.0));
        let ones = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0); 2], vec![c(1.0, 0.0); 2]]).unwrap();
        assert_eq!(determinant(&ones).unwrap(), c(0.0, 0.0));
        let a = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(2.0, 0.0), c(1.0, 1.0)],
            vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)],
            vec![c(3.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)],
        ])
        .unwrap();
        // cofactor expansion by hand
        let expect = c(0.0, 0.0) * (c(0.0, 1.0) * c(2.0, 0.0) - c(0.0, 0.0))
            - c(2.0, 0.0) * (c(1.0, 0.0) * c(2.0, 0.0) - c(0.0, 0.0) * c(3.0, 0.0))
            + c(1.0, 1.0) * (c(1.0, 0.0) * c(1.0, 0.0) - c(0.0, 1.0) * c(3.0, 0.0));
        assert!((determinant(&a).unwrap() - expect).norm() < 1e-14);
    }

    #[test]
    fn solve_recovers_rhs() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(4.0, 1.0), c(2.0, 0.0), c(0.0, -1.0)],
            vec![c(1.0, 0.0), c(5.0, 0.0), c(1.0, 1.0)],
            vec![c(0.5, 0.0), c(1.0, -2.0), c(3.0, 0.0)],
        ])
        .unwrap();
        let b = ComplexMatrix::from_fn(3, 2, |i, j| c(i as f64 + 1.0, j as f64 - 0.5));
        let x = solve(&a, &b).unwrap();
        assert!((&a * &x).max_abs_diff(&b) < 1e-13);
    }

    #[test]
    fn triangular_solve_keeps_zero_pattern() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(7.0, 3.0), c(0.1, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(9.0, 1.0), c(1.0, 1.0)],
        ])
        .unwrap();
        let x = solve(&a, &a.scale(c(0.3, 0.2))).unwrap();
        assert!(x.is_lower_triangular());
    }

    #[test]
    fn singular_solve_is_an_error() {
        let z = ComplexMatrix::<f64>::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]])
            .unwrap();
        assert!(solve(&z, &ComplexMatrix::identity(2)).is_err());
    }
}
