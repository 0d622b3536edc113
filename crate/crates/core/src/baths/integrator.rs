//! Fixed-step classical Runge–Kutta integration of `d psi / dt = -i H psi` for
//! matrix-free Hermitian operators.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numerics::vec_norm;
use crate::scalar::{mul_neg_i, Cx, Real};

/// Hermitian operator applied without storing a matrix.
pub trait LinearOperator<T: Real> {
    fn dim(&self) -> usize;
    /// `out = H x`.
    fn apply(&self, x: &[Cx<T>], out: &mut [Cx<T>]);
}

/// Reusable RK4 work space.
#[derive(Debug, Clone)]
pub struct Rk4<T> {
    k: [Vec<Cx<T>>; 4],
    tmp: Vec<Cx<T>>,
}

impl<T: Real> Rk4<T> {
    pub fn new(dim: usize) -> Self {
        let z = vec![Cx::<T>::zero(); dim];
        Self { k: [z.clone(), z.clone(), z.clone(), z.clone()], tmp: z }
    }

    /// Advances `psi` by one step of length `dt`.
    pub fn step(&mut self, op: &impl LinearOperator<T>, psi: &mut [Cx<T>], dt: T) {
        let half = dt * T::lit(0.5);
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        deriv(op, psi, k1);
        axpy(tmp, psi, half, k1);
        deriv(op, tmp, k2);
        axpy(tmp, psi, half, k2);
        deriv(op, tmp, k3);
        axpy(tmp, psi, dt, k3);
        deriv(op, tmp, k4);
        let sixth = dt / T::lit(6.0);
        let two = T::lit(2.0);
        for i in 0..psi.len() {
            psi[i] = psi[i] + (k1[i] + (k2[i] + k3[i]) * two + k4[i]) * sixth;
        }
    }
}

fn deriv<T: Real>(op: &impl LinearOperator<T>, x: &[Cx<T>], out: &mut [Cx<T>]) {
    op.apply(x, out);
    for z in out.iter_mut() {
        *z = mul_neg_i(*z);
    }
}

fn axpy<T: Real>(out: &mut [Cx<T>], x: &[Cx<T>], a: T, y: &[Cx<T>]) {
    for i in 0..out.len() {
        out[i] = x[i] + y[i] * a;
    }
}

/// Integrates from `times[0]` through every later grid time, splitting each
/// interval into equal steps no longer than `dt_max`, and calls `observe` with
/// the grid index and state at every grid time (including the first).
pub fn evolve<T: Real>(
    op: &impl LinearOperator<T>,
    psi: &mut [Cx<T>],
    times: &[T],
    dt_max: T,
    mut observe: impl FnMut(usize, &[Cx<T>]) -> Result<()>,
) -> Result<()> {
    if psi.len() != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), got: psi.len() });
    }
    if !(dt_max > T::zero()) {
        return Err(Error::InvalidInput("integration step must be positive".into()));
    }
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidInput("time grid must be sorted".into()));
    }
    let mut rk = Rk4::new(psi.len());
    for (j, &t) in times.iter().enumerate() {
        if j > 0 {
            let span = t - times[j - 1];
            let steps = (span / dt_max).ceil().to_usize().unwrap_or(0);
            if steps > 0 {
                let dt = span / T::from_count(steps);
                for _ in 0..steps {
                    rk.step(op, psi, dt);
                }
            }
        }
        observe(j, psi)?;
    }
    Ok(())
}

/// Largest amplitude difference between runs at `dt` and `dt / 2` over `span`.
pub fn halving_error<T: Real>(op: &impl LinearOperator<T>, psi0: &[Cx<T>], span: T, dt: T) -> Result<T> {
    let run = |step: T| -> Result<Vec<Cx<T>>> {
        let mut psi = psi0.to_vec();
        evolve(op, &mut psi, &[T::zero(), span], step, |_, _| Ok(()))?;
        Ok(psi)
    };
    let coarse = run(dt)?;
    let fine = run(dt * T::lit(0.5))?;
    Ok(coarse.iter().zip(&fine).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max))
}

/// Geometry of an exactly simulated bath.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Chain { len: usize },
    Strip { l_n: usize, l_m: usize },
}

/// Bath and level amplitudes at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState<T> {
    pub bath: Vec<Cx<T>>,
    pub levels: Vec<Cx<T>>,
    pub geometry: Geometry,
    pub time: T,
}

impl<T: Real> LatticeState<T> {
    pub fn norm_sqr(&self) -> T {
        let b = vec_norm(&self.bath);
        let l = vec_norm(&self.levels);
        b * b + l * l
    }
}

/// Level amplitudes from an exact lattice run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactTrace<T> {
    pub times: Vec<T>,
    /// `levels[j][a]` is `c_a(times[j])`, in the caller's level order.
    pub levels: Vec<Vec<Cx<T>>>,
    /// Largest `| |psi(t)|^2 - |psi(0)|^2 |` seen on the grid.
    pub norm_drift: T,
    /// Step-halving self-check on the opening stretch of the run.
    pub step_error: T,
    pub final_state: LatticeState<T>,
}

impl<T: Real> ExactTrace<T> {
    pub fn occupation(&self, level: usize) -> Vec<T> {
        self.levels.iter().map(|c| c[level].norm_sqr()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    struct Diag(Vec<f64>);

    impl LinearOperator<f64> for Diag {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn apply(&self, x: &[Cx<f64>], out: &mut [Cx<f64>]) {
            for i in 0..x.len() {
                out[i] = x[i] * self.0[i];
            }
        }
    }

    #[test]
    fn rk4_tracks_phase_rotation() {
        let op = Diag(vec![1.0, -0.5]);
        let mut psi = vec![Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)];
        let times = [0.0, 1.0, 2.0, 10.0];
        let mut seen = Vec::new();
        evolve(&op, &mut psi, &times, 0.01, |j, s| {
            seen.push((j, s.to_vec()));
            Ok(())
        })
        .unwrap();
        assert_eq!(seen.len(), 4);
        let exact = Complex::new(0.0, -10.0).exp();
        assert!((psi[0] - exact).norm() < 1e-8);
        assert!(halving_error(&op, &[Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)], 1.0, 0.1).unwrap() < 1e-6);
    }
}
