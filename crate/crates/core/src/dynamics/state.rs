use rayon::prelude::*;

use crate::discretization::ModeField;
use crate::elliptic::EllipticSolvers;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Evolved fields `n`, `w` with their derived chemoattractant and stream function.
///
/// `c_hat` and `phi_hat` are only meaningful while the state is consistent;
/// replacing the evolved fields marks them stale until [`State::solve`] runs.
#[derive(Debug, Clone, PartialEq)]
pub struct State<T> {
    t: T,
    n_hat: ModeField<T>,
    c_hat: ModeField<T>,
    w_hat: ModeField<T>,
    phi_hat: ModeField<T>,
    consistent: bool,
}

impl<T: Real> State<T> {
    /// State whose derived fields have not been solved yet.
    pub fn unsolved(t: T, n_hat: ModeField<T>, w_hat: ModeField<T>) -> Result<Self> {
        if !n_hat.same_shape(&w_hat) {
            return Err(Error::Shape("density and vorticity shapes differ".into()));
        }
        let zeros = ModeField::zeros(n_hat.k_max(), n_hat.n_r());
        Ok(Self {
            t,
            c_hat: zeros.clone(),
            phi_hat: zeros,
            n_hat,
            w_hat,
            consistent: false,
        })
    }

    pub fn new(
        t: T,
        n_hat: ModeField<T>,
        w_hat: ModeField<T>,
        solvers: &EllipticSolvers<T>,
    ) -> Result<Self> {
        let mut s = Self::unsolved(t, n_hat, w_hat)?;
        s.solve(solvers)?;
        Ok(s)
    }

    /// Recomputes `c` and `phi` from `n` and `w`.
    pub fn solve(&mut self, solvers: &EllipticSolvers<T>) -> Result<()> {
        if solvers.k_max() != self.n_hat.k_max() {
            return Err(Error::Shape("mode field does not match the solver".into()));
        }
        let n_r = self.n_hat.n_r();
        let (n, w) = (&self.n_hat, &self.w_hat);
        self.c_hat
            .coeffs_mut()
            .par_chunks_mut(n_r)
            .zip(self.phi_hat.coeffs_mut().par_chunks_mut(n_r))
            .enumerate()
            .for_each(|(k, (c, phi))| {
                solvers.chemo_into(k, n.mode(k), c);
                solvers.stream_into(k, w.mode(k), phi);
            });
        self.consistent = true;
        Ok(())
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub(crate) fn set_t(&mut self, t: T) {
        self.t = t;
    }

    pub fn n_hat(&self) -> &ModeField<T> {
        &self.n_hat
    }

    pub fn c_hat(&self) -> &ModeField<T> {
        &self.c_hat
    }

    pub fn w_hat(&self) -> &ModeField<T> {
        &self.w_hat
    }

    pub fn phi_hat(&self) -> &ModeField<T> {
        &self.phi_hat
    }

    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    /// Mutable access to the evolved fields; marks the derived fields stale.
    pub fn evolved_mut(&mut self) -> (&mut ModeField<T>, &mut ModeField<T>) {
        self.consistent = false;
        (&mut self.n_hat, &mut self.w_hat)
    }

    pub fn k_max(&self) -> usize {
        self.n_hat.k_max()
    }

    pub fn n_r(&self) -> usize {
        self.n_hat.n_r()
    }
}
