use num_traits::Zero;

use super::state::State;
use crate::baseflow::{RunMode, SimParams};
use crate::discretization::{
    d_dr_into, theta_resolution, ModeField, PhysicalField, RadialGrid, ThetaTransform,
};
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Pointwise quantities gathered while forming the nonlinear products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhsStats<T> {
    pub max_n: T,
    pub min_n: T,
    /// Largest `|u|` of the velocity perturbation `(phi_theta / r, -phi_r)`.
    pub max_u: T,
    /// Bound on the explicit growth/transport rate; stable steps satisfy `dt * rate <= cfl`.
    pub rate: T,
}

/// Pseudo-spectral evaluator of the nonlinear tendencies with reusable buffers.
#[derive(Debug, Clone)]
pub struct NonlinearRhs<T: Real> {
    mode: RunMode,
    coef: T,
    k_max: usize,
    grid: RadialGrid<T>,
    inv_r: Vec<T>,
    transform: ThetaTransform<T>,
    spec: ModeField<T>,
    dspec: ModeField<T>,
    phys: Vec<PhysicalField<T>>,
    prod: Vec<PhysicalField<T>>,
    prod_hat: Vec<ModeField<T>>,
    radial: Vec<Cplx<T>>,
}

// indices into `phys`
const N: usize = 0;
const N_R: usize = 1;
const N_T: usize = 2;
const C_R: usize = 3;
const C_T: usize = 4;
const PHI_R: usize = 5;
const PHI_T: usize = 6;
const W_R: usize = 7;
const W_T: usize = 8;

// indices into `prod`
const FLUX_R: usize = 0;
const FLUX_T: usize = 1;
const ADV_N: usize = 2;
const ADV_W: usize = 3;

impl<T: Real> NonlinearRhs<T> {
    pub fn new(params: &SimParams, grid: &RadialGrid<T>) -> Result<Self> {
        let k_max = params.k_max;
        let n_r = grid.len();
        let n_theta = theta_resolution(k_max, params.dealias);
        let transform = ThetaTransform::new(n_theta, k_max)?;
        Ok(Self {
            mode: params.run_mode,
            coef: T::lit(params.inverse_amplitude()),
            k_max,
            grid: grid.clone(),
            inv_r: grid.power(-T::one()),
            transform,
            spec: ModeField::zeros(k_max, n_r),
            dspec: ModeField::zeros(k_max, n_r),
            phys: vec![PhysicalField::zeros(n_r, n_theta); 9],
            prod: vec![PhysicalField::zeros(n_r, n_theta); 4],
            prod_hat: vec![ModeField::zeros(k_max, n_r); 4],
            radial: vec![Cplx::zero(); n_r],
        })
    }

    pub fn transform(&self) -> &ThetaTransform<T> {
        &self.transform
    }

    fn load_dr(&mut self, src: &ModeField<T>, slot: usize) -> Result<()> {
        for k in 0..=self.k_max {
            d_dr_into(src.mode(k), &self.grid, self.dspec.mode_mut(k));
        }
        self.transform
            .inverse_into(&self.dspec, &mut self.phys[slot])
    }

    fn load_dtheta(&mut self, src: &ModeField<T>, slot: usize) -> Result<()> {
        for k in 0..=self.k_max {
            let ik = Cplx::new(T::zero(), T::from_usize_lossy(k));
            for (d, &s) in self.spec.mode_mut(k).iter_mut().zip(src.mode(k)) {
                *d = ik * s;
            }
        }
        self.transform
            .inverse_into(&self.spec, &mut self.phys[slot])
    }

    /// Maximum and minimum of the reconstructed density.
    pub fn extrema(&mut self, n_hat: &ModeField<T>) -> Result<(T, T)> {
        self.transform.inverse_into(n_hat, &mut self.phys[N])?;
        Ok((self.phys[N].max(), self.phys[N].min()))
    }

    /// Largest `|u|` of the velocity perturbation generated by `phi_hat`.
    pub fn max_velocity(&mut self, phi_hat: &ModeField<T>) -> Result<T> {
        self.load_dr(phi_hat, PHI_R)?;
        self.load_dtheta(phi_hat, PHI_T)?;
        let n_theta = self.transform.n_theta();
        let mut best = T::zero();
        for (i, &inv_r) in self.inv_r.iter().enumerate() {
            for j in i * n_theta..(i + 1) * n_theta {
                let (a, b) = (
                    self.phys[PHI_R].data()[j],
                    self.phys[PHI_T].data()[j] * inv_r,
                );
                best = best.max((a * a + b * b).sqrt());
            }
        }
        Ok(best)
    }

    /// Writes the tendencies of `n_hat` and `w_hat` into `dn`, `dw`.
    pub fn evaluate(
        &mut self,
        state: &State<T>,
        dn: &mut ModeField<T>,
        dw: &mut ModeField<T>,
    ) -> Result<RhsStats<T>> {
        if !state.is_consistent() {
            return Err(Error::InconsistentState);
        }
        if state.k_max() != self.k_max || state.n_r() != self.grid.len() {
            return Err(Error::Shape("state does not match the evaluator".into()));
        }
        dn.coeffs_mut().iter_mut().for_each(|c| *c = Cplx::zero());
        dw.coeffs_mut().iter_mut().for_each(|c| *c = Cplx::zero());
        if self.mode == RunMode::LinearModel {
            let (max_n, min_n) = self.extrema(state.n_hat())?;
            return Ok(RhsStats {
                max_n,
                min_n,
                max_u: T::zero(),
                rate: T::zero(),
            });
        }
        let flow = self.mode.uses_flow();
        self.transform
            .inverse_into(state.n_hat(), &mut self.phys[N])?;
        self.load_dr(state.n_hat(), N_R)?;
        self.load_dtheta(state.n_hat(), N_T)?;
        self.load_dr(state.c_hat(), C_R)?;
        self.load_dtheta(state.c_hat(), C_T)?;
        if flow {
            self.load_dr(state.phi_hat(), PHI_R)?;
            self.load_dtheta(state.phi_hat(), PHI_T)?;
            self.load_dr(state.w_hat(), W_R)?;
            self.load_dtheta(state.w_hat(), W_T)?;
        }

        let n_theta = self.transform.n_theta();
        let h = self.grid.spacing();
        let k_top = T::from_usize_lossy(self.k_max);
        let mut stats = RhsStats {
            max_n: T::neg_infinity(),
            min_n: T::infinity(),
            max_u: T::zero(),
            rate: T::zero(),
        };
        for (i, &r) in self.grid.nodes().iter().enumerate() {
            let inv_r = self.inv_r[i];
            let row = i * n_theta..(i + 1) * n_theta;
            for j in row {
                let p = |slot: usize| self.phys[slot].data()[j];
                let n = p(N);
                let (c_r, c_t) = (p(C_R), p(C_T));
                let (phi_r, phi_t) = if flow {
                    (p(PHI_R), p(PHI_T))
                } else {
                    (T::zero(), T::zero())
                };
                self.prod[FLUX_R].data_mut()[j] = r * n * c_r;
                self.prod[FLUX_T].data_mut()[j] = n * c_t;
                if flow {
                    self.prod[ADV_N].data_mut()[j] = phi_r * p(N_T) - phi_t * p(N_R);
                    self.prod[ADV_W].data_mut()[j] = phi_r * p(W_T) - phi_t * p(W_R);
                }
                let v_r = (c_r - phi_t * inv_r).abs();
                let omega = (phi_r * inv_r + c_t * inv_r * inv_r).abs();
                let rate = self.coef * (v_r / h + omega * k_top + n.max(T::zero()));
                stats.rate = stats.rate.max(rate);
                stats.max_n = stats.max_n.max(n);
                stats.min_n = stats.min_n.min(n);
                let u2 = phi_t * phi_t * inv_r * inv_r + phi_r * phi_r;
                stats.max_u = stats.max_u.max(u2.sqrt());
                if n.is_nan() || rate.is_nan() {
                    stats.rate = T::nan();
                    stats.max_n = T::nan();
                }
            }
        }
        let used = if flow { 4 } else { 2 };
        for q in 0..used {
            self.transform
                .forward_into(&self.prod[q], &mut self.prod_hat[q])?;
        }

        let n_r = self.grid.len();
        for k in 0..=self.k_max {
            let ik = Cplx::new(T::zero(), T::from_usize_lossy(k));
            d_dr_into(self.prod_hat[FLUX_R].mode(k), &self.grid, &mut self.radial);
            let flux_t = self.prod_hat[FLUX_T].mode(k);
            let out = dn.mode_mut(k);
            for i in 1..n_r - 1 {
                let inv_r = self.inv_r[i];
                let mut v = self.radial[i] * inv_r + ik * flux_t[i] * (inv_r * inv_r);
                if flow {
                    v = v + self.prod_hat[ADV_N].mode(k)[i] * inv_r;
                }
                out[i] = -v * self.coef;
            }
            if flow {
                let adv = self.prod_hat[ADV_W].mode(k);
                let n_k = state.n_hat().mode(k);
                let out = dw.mode_mut(k);
                for i in 1..n_r - 1 {
                    out[i] = -(adv[i] + ik * n_k[i]) * (self.coef * self.inv_r[i]);
                }
            }
        }
        Ok(stats)
    }
}

/// Nonlinear tendencies `(dn_hat, dw_hat)` of a consistent state.
pub fn rhs_nonlinear<T: Real>(
    state: &State<T>,
    params: &SimParams,
    grid: &RadialGrid<T>,
) -> Result<(ModeField<T>, ModeField<T>)> {
    let mut eval = NonlinearRhs::new(params, grid)?;
    let mut dn = ModeField::zeros(state.k_max(), state.n_r());
    let mut dw = dn.clone();
    eval.evaluate(state, &mut dn, &mut dw)?;
    Ok((dn, dw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::build_grid;
    use crate::elliptic::EllipticSolvers;

    fn params(mode: RunMode) -> SimParams {
        SimParams {
            run_mode: mode,
            amplitude: 10.0,
            k_max: 6,
            n_r: 33,
            ..SimParams::default()
        }
    }

    fn bump(g: &RadialGrid<f64>, k_max: usize, modes: &[usize]) -> ModeField<f64> {
        let mut f = ModeField::zeros(k_max, g.len());
        for &k in modes {
            for (c, &r) in f.mode_mut(k).iter_mut().zip(g.nodes()) {
                let s = (r - 1.0) * (2.0 - r);
                *c = Cplx::new(s * (1.0 + k as f64), 0.5 * s * r);
            }
        }
        f.mode_mut(0).iter_mut().for_each(|c| c.im = 0.0);
        f
    }

    fn state(p: &SimParams, n: ModeField<f64>, w: ModeField<f64>) -> (RadialGrid<f64>, State<f64>) {
        let g = build_grid(p.n_r, p.outer_radius).unwrap();
        let s = EllipticSolvers::new(&g, p.k_max).unwrap();
        (g.clone(), State::new(0.0, n, w, &s).unwrap())
    }

    #[test]
    fn zero_state_has_zero_tendency() {
        let p = params(RunMode::TcCoupled);
        let z = ModeField::zeros(6, 33);
        let (g, st) = state(&p, z.clone(), z);
        let (dn, dw) = rhs_nonlinear(&st, &p, &g).unwrap();
        assert_eq!(dn.max_abs(), 0.0);
        assert_eq!(dw.max_abs(), 0.0);
    }

    #[test]
    fn single_mode_products_land_on_zero_and_two() {
        let p = params(RunMode::TcCoupled);
        let g = build_grid(33, 2.0).unwrap();
        let (g, st) = state(&p, bump(&g, 6, &[1]), bump(&g, 6, &[1]));
        let (dn, dw) = rhs_nonlinear(&st, &p, &g).unwrap();
        let size =
            |f: &ModeField<f64>, k: usize| f.mode(k).iter().map(|c| c.norm()).fold(0.0, f64::max);
        let top = dn.max_abs();
        assert!(size(&dn, 0) > 1e-6 * top && size(&dn, 2) > 1e-6 * top);
        for k in [1, 3, 4, 5, 6] {
            assert!(size(&dn, k) < 1e-13 * top, "mode {k}: {}", size(&dn, k));
        }
        // vorticity feels the transport on {0, 2} and the density feedback on mode 1
        for k in [3, 4, 5, 6] {
            assert!(size(&dw, k) < 1e-13 * dw.max_abs());
        }
        assert!(size(&dw, 1) > 0.0);
    }

    #[test]
    fn stale_state_is_rejected() {
        let p = params(RunMode::TcCoupled);
        let g = build_grid(33, 2.0).unwrap();
        let st = State::unsolved(0.0, bump(&g, 6, &[1]), ModeField::zeros(6, 33)).unwrap();
        assert!(matches!(
            rhs_nonlinear(&st, &p, &g),
            Err(Error::InconsistentState)
        ));
    }

    #[test]
    fn linear_model_has_no_nonlinearity() {
        let p = params(RunMode::LinearModel);
        let g = build_grid(33, 2.0).unwrap();
        let (g, st) = state(&p, bump(&g, 6, &[0, 2]), bump(&g, 6, &[1]));
        let (dn, dw) = rhs_nonlinear(&st, &p, &g).unwrap();
        assert_eq!(dn.max_abs() + dw.max_abs(), 0.0);
    }

    #[test]
    fn pks_only_drops_vorticity_and_scales_by_one() {
        let g = build_grid(33, 2.0).unwrap();
        let n = bump(&g, 6, &[0, 2]);
        let w = bump(&g, 6, &[1]);
        let pks = params(RunMode::PksOnly);
        let (g, st) = state(&pks, n.clone(), w.clone());
        let (dn_pks, dw_pks) = rhs_nonlinear(&st, &pks, &g).unwrap();
        assert_eq!(dw_pks.max_abs(), 0.0);

        // with zero vorticity the coupled density tendency is the same chemotaxis term times 1/A
        let tc = params(RunMode::TcCoupled);
        let (_, st0) = state(&tc, n, ModeField::zeros(6, 33));
        let (dn_tc, _) = rhs_nonlinear(&st0, &tc, &g).unwrap();
        for (a, b) in dn_tc.coeffs().iter().zip(dn_pks.coeffs()) {
            assert!((a * 10.0 - b).norm() <= 1e-12 * dn_pks.max_abs());
        }
    }

    #[test]
    fn boundary_rows_stay_zero() {
        let p = params(RunMode::TcCoupled);
        let g = build_grid(33, 2.0).unwrap();
        let (g, st) = state(&p, bump(&g, 6, &[0, 1, 3]), bump(&g, 6, &[2]));
        let (dn, dw) = rhs_nonlinear(&st, &p, &g).unwrap();
        for f in [&dn, &dw] {
            for m in f.modes() {
                assert_eq!(m[0].norm() + m[32].norm(), 0.0);
            }
        }
    }
}
