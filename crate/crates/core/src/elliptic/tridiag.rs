use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Tridiagonal system on the interior nodes. `sub[0]` and `sup[n-1]` are unused.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem<T> {
    pub sub: Vec<Cplx<T>>,
    pub diag: Vec<Cplx<T>>,
    pub sup: Vec<Cplx<T>>,
}

impl<T: Real> TridiagonalSystem<T> {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `y = M x`.
    pub fn apply(&self, x: &[Cplx<T>]) -> Vec<Cplx<T>> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc = acc + self.sub[i] * x[i - 1];
                }
                if i + 1 < n {
                    acc = acc + self.sup[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Thomas factorization without pivoting.
    pub fn factor(&self) -> Result<TridiagonalFactor<T>> {
        let n = self.len();
        let mut inv_pivot = Vec::with_capacity(n);
        let mut gamma = Vec::with_capacity(n);
        let mut prev_gamma = Cplx::zero();
        for i in 0..n {
            let beta = if i == 0 {
                self.diag[0]
            } else {
                self.diag[i] - self.sub[i] * prev_gamma
            };
            let mag = beta.norm();
            if !(mag > T::zero()) || !mag.is_finite() {
                return Err(Error::SingularSystem(i));
            }
            let inv = beta.inv();
            let g = if i + 1 < n {
                self.sup[i] * inv
            } else {
                Cplx::zero()
            };
            inv_pivot.push(inv);
            gamma.push(g);
            prev_gamma = g;
        }
        Ok(TridiagonalFactor {
            sub: self.sub.clone(),
            inv_pivot,
            gamma,
        })
    }

    pub fn solve(&self, rhs: &[Cplx<T>]) -> Result<Vec<Cplx<T>>> {
        let mut x = rhs.to_vec();
        self.factor()?.solve_in_place(&mut x);
        Ok(x)
    }
}

/// LU factors of a [`TridiagonalSystem`], reusable across right-hand sides.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalFactor<T> {
    sub: Vec<Cplx<T>>,
    inv_pivot: Vec<Cplx<T>>,
    gamma: Vec<Cplx<T>>,
}

impl<T: Real> TridiagonalFactor<T> {
    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    pub fn solve_in_place(&self, x: &mut [Cplx<T>]) {
        let n = self.len();
        assert_eq!(x.len(), n, "right-hand side length");
        x[0] = x[0] * self.inv_pivot[0];
        for i in 1..n {
            x[i] = (x[i] - self.sub[i] * x[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            x[i] = x[i] - self.gamma[i] * x[i + 1];
        }
    }
}
