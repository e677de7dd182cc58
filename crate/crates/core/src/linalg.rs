//! Dense symmetric matrices and Cholesky factorization.
//!
//! Covariance matrices in this crate are small (a few hundred rows), so a
//! plain row-major `Vec<f64>` and an unblocked factorization are all that is
//! needed. The factorization carries the diagonal-jitter fallback used by
//! every consumer: on failure, add `1e-10 * scale` to the diagonal and retry
//! up to three times with tenfold escalation.

use crate::error::Error;
use crate::Result;
use alloc::vec;
use alloc::vec::Vec;

/// A square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Largest absolute asymmetry |a_ij - a_ji|.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn mean_diagonal(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (0..self.n).map(|i| self.get(i, i)).sum::<f64>() / self.n as f64
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    /// Lower triangle of L, row-major full storage (upper half unused).
    factor: Vec<f64>,
    jitter: f64,
}

impl Cholesky {
    /// Factor `a` without jitter. Returns the first non-positive pivot on
    /// failure.
    fn factor_raw(a: &Matrix, added: f64) -> core::result::Result<Vec<f64>, (usize, f64)> {
        let n = a.n;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = a.get(j, j) + added;
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err((j, d));
            }
            let dj = libm::sqrt(d);
            l[j * n + j] = dj;
            for i in (j + 1)..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / dj;
            }
        }
        Ok(l)
    }

    /// Factor `a`, retrying with escalating diagonal jitter on failure.
    ///
    /// `scale` sets the jitter magnitude (callers pass the covariance level,
    /// e.g. sigma^2 + tau^2); attempts use 0, 1e-10, 1e-9, 1e-8 times `scale`.
    pub fn new(a: &Matrix, scale: f64) -> Result<Self> {
        let mut jitter = 0.0;
        let mut last = (0usize, f64::NAN);
        for attempt in 0..4 {
            match Self::factor_raw(a, jitter) {
                Ok(factor) => {
                    return Ok(Cholesky {
                        n: a.n,
                        factor,
                        jitter,
                    })
                }
                Err(fail) => last = fail,
            }
            jitter = 1e-10 * scale * libm::pow(10.0, attempt as f64);
        }
        Err(Error::Factorization {
            size: a.n,
            pivot: last.0,
            value: last.1,
            jitter: 1e-8 * scale,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Jitter that was actually added to the diagonal (0 when none was needed).
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    #[inline]
    fn l(&self, i: usize, j: usize) -> f64 {
        self.factor[i * self.n + j]
    }

    /// log |A| = 2 sum ln L_ii.
    pub fn log_det(&self) -> f64 {
        (0..self.n).map(|i| 2.0 * libm::log(self.l(i, i))).sum()
    }

    /// Solve L x = b.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        debug_assert_eq!(b.len(), self.n);
        let mut x = b.to_vec();
        for i in 0..self.n {
            for k in 0..i {
                x[i] -= self.l(i, k) * x[k];
            }
            x[i] /= self.l(i, i);
        }
        x
    }

    /// Solve L^T x = b.
    pub fn solve_upper(&self, b: &[f64]) -> Vec<f64> {
        debug_assert_eq!(b.len(), self.n);
        let mut x = b.to_vec();
        for i in (0..self.n).rev() {
            for k in (i + 1)..self.n {
                x[i] -= self.l(k, i) * x[k];
            }
            x[i] /= self.l(i, i);
        }
        x
    }

    /// Solve A x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.solve_upper(&self.solve_lower(b))
    }

    /// Apply L to a vector (used to color i.i.d. normals into draws from A).
    pub fn lower_times(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..=i).map(|k| self.l(i, k) * v[k]).sum())
            .collect()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
