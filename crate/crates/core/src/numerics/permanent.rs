//! Matrix permanent by Ryser's formula with Gray-code subset enumeration.

use num_complex::Complex;
use num_traits::Zero;

use super::lu::diagonal_product;
use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

/// Largest dimension accepted by [`permanent`] (cost grows as `2^n n`).
pub const MAX_PERMANENT_DIM: usize = 24;

/// Complex Kahan–Neumaier accumulator.
#[derive(Debug, Clone, Copy)]
struct CompensatedSum<T> {
    sum: Cx<T>,
    carry: Cx<T>,
}

impl<T: Real> CompensatedSum<T> {
    fn new() -> Self {
        Self { sum: Complex::zero(), carry: Complex::zero() }
    }

    fn add(&mut self, x: Cx<T>) {
        let (s_re, c_re) = neumaier(self.sum.re, self.carry.re, x.re);
        let (s_im, c_im) = neumaier(self.sum.im, self.carry.im, x.im);
        self.sum = Complex::new(s_re, s_im);
        self.carry = Complex::new(c_re, c_im);
    }

    fn total(&self) -> Cx<T> {
        self.sum + self.carry
    }
}

#[inline]
fn neumaier<T: Real>(sum: T, carry: T, x: T) -> (T, T) {
    let t = sum + x;
    let c = if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
    (t, carry + c)
}

/// `perm(M) = (-1)^n sum_{S} (-1)^{|S|} prod_i sum_{j in S} m_ij`.
///
/// Row sums are updated by one column per step along a Gray code. Triangular
/// input short-circuits to the diagonal product, identical to the determinant.
pub fn permanent<T: Real>(m: &ComplexMatrix<T>) -> Result<Cx<T>> {
    let n = m.ensure_square()?;
    if n > MAX_PERMANENT_DIM {
        return Err(Error::TooLarge { n, max: MAX_PERMANENT_DIM });
    }
    if m.is_lower_triangular() || m.is_upper_triangular() {
        return Ok(diagonal_product(m));
    }
    let mut row_sums = vec![Cx::<T>::zero(); n];
    let mut acc = CompensatedSum::new();
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let j = k.trailing_zeros() as usize;
        let bit = 1u64 << j;
        let adding = gray & bit == 0;
        gray ^= bit;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if adding {
                *s = *s + m[(i, j)];
            } else {
                *s = *s - m[(i, j)];
            }
        }
        let prod = row_sums.iter().fold(Complex::new(T::one(), T::zero()), |a, b| a * b);
        if (n - gray.count_ones() as usize) % 2 == 0 {
            acc.add(prod);
        } else {
            acc.add(-prod);
        }
    }
    Ok(acc.total())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    /// Sum over all permutations by Heap's algorithm.
    fn naive_permanent(m: &ComplexMatrix<f64>) -> C {
        let n = m.rows();
        let mut p: Vec<usize> = (0..n).collect();
        let mut c = vec![0usize; n];
        let term = |p: &[usize]| (0..n).fold(C::new(1.0, 0.0), |a, i| a * m[(i, p[i])]);
        let mut total = term(&p);
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    p.swap(0, i);
                } else {
                    p.swap(c[i], i);
                }
                total += term(&p);
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        total
    }

    #[test]
    fn small_cases() {
        let one = C::new(1.0, 0.0);
        assert_eq!(permanent(&ComplexMatrix::<f64>::identity(3)).unwrap(), one);
        let ones = ComplexMatrix::from_rows(&[vec![one, one], vec![one, one]]).unwrap();
        assert!((permanent(&ones).unwrap() - C::new(2.0, 0.0)).norm() < 1e-15);
        // all-ones n x n has permanent n!
        let j4 = ComplexMatrix::from_fn(4, 4, |_, _| one);
        assert!((permanent(&j4).unwrap() - C::new(24.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn ryser_matches_permutation_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 1..=7 {
            let m = ComplexMatrix::from_fn(n, n, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let r = permanent(&m).unwrap();
            let b = naive_permanent(&m);
            assert!((r - b).norm() < 1e-10, "n={n}: {r} vs {b}");
        }
    }

    #[test]
    fn too_large_is_rejected() {
        let m = ComplexMatrix::<f64>::zeros(25, 25);
        assert!(matches!(permanent(&m), Err(Error::TooLarge { n: 25, .. })));
    }
}
