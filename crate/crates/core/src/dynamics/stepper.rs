use num_traits::Zero;
use rayon::prelude::*;

use super::rhs::{NonlinearRhs, RhsStats};
use super::state::State;
use crate::baseflow::SimParams;
use crate::discretization::{build_grid, integrate, ModeField, RadialGrid};
use crate::elliptic::{laplacian_rows, EllipticSolvers, LaplacianRows, TridiagonalFactor};
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Explicit-stability step below which a run is declared blown up.
const MIN_STABLE_DT: f64 = 1e-10;

/// Outcome of one call to [`Stepper::step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport<T> {
    pub accepted: bool,
    pub max_n: T,
    pub min_n: T,
    /// Flat-measure mass after the step.
    pub mass: T,
    pub dt_used: T,
    pub blown_up: bool,
    /// Explicit-stability step limit at the start of the step.
    pub dt_stable: T,
    pub max_u: T,
}

/// Crank-Nicolson / Adams-Bashforth integrator owning every mutable buffer of a run.
#[derive(Debug, Clone)]
pub struct Stepper<T: Real> {
    params: SimParams,
    grid: RadialGrid<T>,
    solvers: EllipticSolvers<T>,
    rhs: NonlinearRhs<T>,
    rows: Vec<LaplacianRows<T>>,
    swirl: Vec<T>,
    diffusivity: T,
    advection: T,
    factors: Option<(T, Vec<TridiagonalFactor<T>>)>,
    nl_n: ModeField<T>,
    nl_w: ModeField<T>,
    history: Option<(ModeField<T>, ModeField<T>)>,
    dt_prev: Option<T>,
    initial_max_n: T,
    steps: u64,
}

impl<T: Real> Stepper<T> {
    pub fn new(params: &SimParams) -> Result<Self> {
        params.validate()?;
        let grid = build_grid(params.n_r, T::lit(params.outer_radius))?;
        let solvers = EllipticSolvers::new(&grid, params.k_max)?;
        let rhs = NonlinearRhs::new(params, &grid)?;
        let rows = (0..=params.k_max)
            .map(|k| laplacian_rows(&grid, k))
            .collect();
        let swirl = grid.nodes()[1..grid.len() - 1]
            .iter()
            .map(|&r| T::one() + T::one() / (r * r))
            .collect();
        let flow = params.run_mode.uses_flow();
        let zeros = ModeField::zeros(params.k_max, params.n_r);
        Ok(Self {
            params: params.clone(),
            diffusivity: T::lit(params.inverse_amplitude()),
            advection: if flow { T::one() } else { T::zero() },
            grid,
            solvers,
            rhs,
            rows,
            swirl,
            factors: None,
            nl_n: zeros.clone(),
            nl_w: zeros,
            history: None,
            dt_prev: None,
            initial_max_n: T::zero(),
            steps: 0,
        })
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn grid(&self) -> &RadialGrid<T> {
        &self.grid
    }

    pub fn solvers(&self) -> &EllipticSolvers<T> {
        &self.solvers
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn initial_max_n(&self) -> T {
        self.initial_max_n
    }

    pub fn dt_prev(&self) -> Option<T> {
        self.dt_prev
    }

    pub fn history(&self) -> Option<&(ModeField<T>, ModeField<T>)> {
        self.history.as_ref()
    }

    /// Builds the consistent initial state and records the reference maximum of `n`.
    pub fn prepare(&mut self, n0: ModeField<T>, w0: ModeField<T>) -> Result<State<T>> {
        let shape = ModeField::<T>::zeros(self.params.k_max, self.params.n_r);
        if !n0.same_shape(&shape) || !w0.same_shape(&shape) {
            return Err(Error::Shape(
                "initial data does not match k_max and n_r".into(),
            ));
        }
        let state = State::new(T::zero(), n0, w0, &self.solvers)?;
        let (max_n, _) = self.rhs.extrema(state.n_hat())?;
        self.initial_max_n = max_n;
        self.history = None;
        self.dt_prev = None;
        self.steps = 0;
        Ok(state)
    }

    /// Restores the multistep memory of an interrupted run.
    pub fn restore(
        &mut self,
        steps: u64,
        dt_prev: Option<T>,
        initial_max_n: T,
        history: Option<(ModeField<T>, ModeField<T>)>,
    ) -> Result<()> {
        if let Some((n, w)) = &history {
            if !n.same_shape(&self.nl_n) || !w.same_shape(&self.nl_n) {
                return Err(Error::Shape("history does not match the stepper".into()));
            }
        }
        if history.is_some() != dt_prev.is_some() {
            return Err(Error::InconsistentState);
        }
        self.steps = steps;
        self.dt_prev = dt_prev;
        self.initial_max_n = initial_max_n;
        self.history = history;
        Ok(())
    }

    pub fn extrema(&mut self, n_hat: &ModeField<T>) -> Result<(T, T)> {
        self.rhs.extrema(n_hat)
    }

    pub fn max_velocity(&mut self, state: &State<T>) -> Result<T> {
        self.rhs.max_velocity(state.phi_hat())
    }

    /// Flat-measure mass `int n dr dtheta`.
    pub fn mass(&self, n_hat: &ModeField<T>) -> T {
        let z: Vec<T> = n_hat.mode(0).iter().map(|c| c.re).collect();
        T::TAU() * integrate(&z, &self.grid)
    }

    fn ensure_factors(&mut self, dt: T) -> Result<()> {
        if matches!(&self.factors, Some((d, _)) if *d == dt) {
            return Ok(());
        }
        let half = dt * T::lit(0.5);
        let factors = self
            .rows
            .iter()
            .enumerate()
            .map(|(k, rows)| {
                let mut sys = rows.to_system(-half * self.diffusivity, T::one());
                let kk = T::from_usize_lossy(k) * self.advection * half;
                for (d, &s) in sys.diag.iter_mut().zip(&self.swirl) {
                    *d = *d + Cplx::new(T::zero(), kk * s);
                }
                sys.factor()
            })
            .collect::<Result<Vec<_>>>()?;
        self.factors = Some((dt, factors));
        Ok(())
    }

    /// Largest step allowed by `params.dt`, the explicit stability bound and `limit`.
    fn choose_dt(&self, stats: &RhsStats<T>, limit: Option<T>) -> (T, T) {
        let stable = if stats.rate > T::zero() {
            T::lit(self.params.cfl) / stats.rate
        } else {
            T::infinity()
        };
        let mut dt = T::lit(self.params.dt).min(stable);
        if let Some(l) = limit {
            dt = dt.min(l);
        }
        (dt, stable)
    }

    /// Advances one step of at most `limit` (if given).
    pub fn step(&mut self, state: &mut State<T>, limit: Option<T>) -> Result<StepReport<T>> {
        if !state.is_consistent() {
            return Err(Error::InconsistentState);
        }
        let stats = self.rhs.evaluate(state, &mut self.nl_n, &mut self.nl_w)?;
        let (dt, stable) = self.choose_dt(&stats, limit);
        let threshold = T::lit(self.params.blowup_threshold) * self.initial_max_n;
        let finite = stats.rate.is_finite() && stats.max_n.is_finite();
        if !finite || stable < T::lit(MIN_STABLE_DT) || !(dt > T::zero()) {
            return Ok(StepReport {
                accepted: false,
                max_n: stats.max_n,
                min_n: stats.min_n,
                mass: self.mass(state.n_hat()),
                dt_used: T::zero(),
                blown_up: !finite || stable < T::lit(MIN_STABLE_DT),
                dt_stable: stable,
                max_u: stats.max_u,
            });
        }

        // Adams-Bashforth extrapolation of the nonlinear terms, Euler on the first step.
        let (mut star_n, mut star_w) = (self.nl_n.clone(), self.nl_w.clone());
        if let (Some((hn, hw)), Some(prev)) = (&self.history, self.dt_prev) {
            let omega = dt / prev;
            let half = omega * T::lit(0.5);
            star_n.scale(T::one() + half);
            star_n.axpy(-half, hn);
            star_w.scale(T::one() + half);
            star_w.axpy(-half, hw);
        }

        self.ensure_factors(dt)?;
        let factors = &self.factors.as_ref().expect("factors prepared").1;
        let n_r = self.grid.len();
        let half = dt * T::lit(0.5);
        let (rows, swirl, diff, adv) = (&self.rows, &self.swirl, self.diffusivity, self.advection);
        let advance = |k: usize, u: &mut [Cplx<T>], nl: &[Cplx<T>]| {
            let rows = &rows[k];
            let kk = T::from_usize_lossy(k) * adv * half;
            let mut rhs = vec![Cplx::zero(); n_r - 2];
            for i in 1..n_r - 1 {
                let j = i - 1;
                let lap = u[i - 1] * rows.sub[j] + u[i] * rows.diag[j] + u[i + 1] * rows.sup[j];
                let rot = Cplx::new(T::zero(), kk * swirl[j]) * u[i];
                rhs[j] = u[i] + lap * (half * diff) - rot + nl[i] * dt;
            }
            factors[k].solve_in_place(&mut rhs);
            u[0] = Cplx::zero();
            u[n_r - 1] = Cplx::zero();
            u[1..n_r - 1].copy_from_slice(&rhs);
        };
        {
            let (n_hat, w_hat) = state.evolved_mut();
            n_hat
                .coeffs_mut()
                .par_chunks_mut(n_r)
                .zip(w_hat.coeffs_mut().par_chunks_mut(n_r))
                .zip(
                    star_n
                        .coeffs()
                        .par_chunks(n_r)
                        .zip(star_w.coeffs().par_chunks(n_r)),
                )
                .enumerate()
                .for_each(|(k, ((n, w), (sn, sw)))| {
                    advance(k, n, sn);
                    advance(k, w, sw);
                });
            for f in [n_hat, w_hat] {
                f.mode_mut(0).iter_mut().for_each(|c| c.im = T::zero());
            }
        }
        state.set_t(state.t() + dt);
        state.solve(&self.solvers)?;

        self.history = Some((self.nl_n.clone(), self.nl_w.clone()));
        self.dt_prev = Some(dt);
        self.steps += 1;

        let (max_n, min_n) = self.rhs.extrema(state.n_hat())?;
        let finite = state.n_hat().is_finite() && state.w_hat().is_finite();
        Ok(StepReport {
            accepted: true,
            max_n,
            min_n,
            mass: self.mass(state.n_hat()),
            dt_used: dt,
            blown_up: !finite
                || max_n.is_nan()
                || (self.initial_max_n > T::zero() && max_n > threshold),
            dt_stable: stable,
            max_u: stats.max_u,
        })
    }
}
