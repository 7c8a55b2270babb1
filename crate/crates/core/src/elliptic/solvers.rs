use num_traits::Zero;

use super::tridiag::{TridiagonalFactor, TridiagonalSystem};
use crate::discretization::{ModeField, RadialGrid};
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Interior rows of the discrete `d_r^2 + (1/r) d_r - k^2/r^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianRows<T> {
    pub sub: Vec<T>,
    pub diag: Vec<T>,
    pub sup: Vec<T>,
}

pub fn laplacian_rows<T: Real>(grid: &RadialGrid<T>, k: usize) -> LaplacianRows<T> {
    let h = grid.spacing();
    let inv_h2 = T::one() / (h * h);
    let inv_2h = T::one() / (T::lit(2.0) * h);
    let k2 = T::from_usize_lossy(k * k);
    let interior = &grid.nodes()[1..grid.len() - 1];
    let mut rows = LaplacianRows {
        sub: Vec::with_capacity(interior.len()),
        diag: Vec::with_capacity(interior.len()),
        sup: Vec::with_capacity(interior.len()),
    };
    for &r in interior {
        rows.sub.push(inv_h2 - inv_2h / r);
        rows.diag.push(-T::lit(2.0) * inv_h2 - k2 / (r * r));
        rows.sup.push(inv_h2 + inv_2h / r);
    }
    rows
}

impl<T: Real> LaplacianRows<T> {
    /// `scale * Delta_k + shift` as a complex tridiagonal system.
    pub fn to_system(&self, scale: T, shift: T) -> TridiagonalSystem<T> {
        let c = |v: T| Cplx::new(v, T::zero());
        TridiagonalSystem {
            sub: self.sub.iter().map(|&v| c(scale * v)).collect(),
            diag: self.diag.iter().map(|&v| c(scale * v + shift)).collect(),
            sup: self.sup.iter().map(|&v| c(scale * v)).collect(),
        }
    }
}

fn check_len<T>(profile: &[Cplx<T>], n_r: usize) -> Result<()> {
    if profile.len() != n_r {
        return Err(Error::Shape(format!(
            "profile has {} nodes, grid has {n_r}",
            profile.len()
        )));
    }
    Ok(())
}

fn solve_dirichlet<T: Real>(
    factor: &TridiagonalFactor<T>,
    rhs: &[Cplx<T>],
    scale: T,
    out: &mut [Cplx<T>],
) {
    let n = rhs.len();
    out[0] = Cplx::zero();
    out[n - 1] = Cplx::zero();
    for (o, &b) in out[1..n - 1].iter_mut().zip(&rhs[1..n - 1]) {
        *o = b * scale;
    }
    factor.solve_in_place(&mut out[1..n - 1]);
}

/// Solves `(Delta_k - 1) c_k = -n_k` with `c_k(1) = c_k(R) = 0`.
pub fn solve_chemo_mode<T: Real>(
    k: usize,
    n_hat_k: &[Cplx<T>],
    grid: &RadialGrid<T>,
) -> Result<Vec<Cplx<T>>> {
    check_len(n_hat_k, grid.len())?;
    let factor = laplacian_rows(grid, k)
        .to_system(T::one(), -T::one())
        .factor()?;
    let mut out = vec![Cplx::zero(); grid.len()];
    solve_dirichlet(&factor, n_hat_k, -T::one(), &mut out);
    Ok(out)
}

/// Solves `Delta_k phi_k = w_k` with `phi_k(1) = phi_k(R) = 0`.
pub fn solve_stream_mode<T: Real>(
    k: usize,
    w_hat_k: &[Cplx<T>],
    grid: &RadialGrid<T>,
) -> Result<Vec<Cplx<T>>> {
    check_len(w_hat_k, grid.len())?;
    let factor = laplacian_rows(grid, k)
        .to_system(T::one(), T::zero())
        .factor()?;
    let mut out = vec![Cplx::zero(); grid.len()];
    solve_dirichlet(&factor, w_hat_k, T::one(), &mut out);
    Ok(out)
}

/// Factorizations of both elliptic problems for every retained mode.
#[derive(Debug, Clone)]
pub struct EllipticSolvers<T> {
    n_r: usize,
    chemo: Vec<TridiagonalFactor<T>>,
    stream: Vec<TridiagonalFactor<T>>,
}

impl<T: Real> EllipticSolvers<T> {
    pub fn new(grid: &RadialGrid<T>, k_max: usize) -> Result<Self> {
        let mut chemo = Vec::with_capacity(k_max + 1);
        let mut stream = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let rows = laplacian_rows(grid, k);
            chemo.push(rows.to_system(T::one(), -T::one()).factor()?);
            stream.push(rows.to_system(T::one(), T::zero()).factor()?);
        }
        Ok(Self {
            n_r: grid.len(),
            chemo,
            stream,
        })
    }

    pub fn k_max(&self) -> usize {
        self.chemo.len() - 1
    }

    pub fn chemo_into(&self, k: usize, n_hat_k: &[Cplx<T>], out: &mut [Cplx<T>]) {
        solve_dirichlet(&self.chemo[k], n_hat_k, -T::one(), out);
    }

    pub fn stream_into(&self, k: usize, w_hat_k: &[Cplx<T>], out: &mut [Cplx<T>]) {
        solve_dirichlet(&self.stream[k], w_hat_k, T::one(), out);
    }

    fn check(&self, field: &ModeField<T>) -> Result<()> {
        if field.n_r() != self.n_r || field.k_max() != self.k_max() {
            return Err(Error::Shape("mode field does not match the solver".into()));
        }
        Ok(())
    }

    /// Chemoattractant for every mode of a density field.
    pub fn chemo_field(&self, n_hat: &ModeField<T>, out: &mut ModeField<T>) -> Result<()> {
        self.check(n_hat)?;
        self.check(out)?;
        for k in 0..=self.k_max() {
            self.chemo_into(k, n_hat.mode(k), out.mode_mut(k));
        }
        Ok(())
    }

    /// Stream function for every mode of a vorticity field.
    pub fn stream_field(&self, w_hat: &ModeField<T>, out: &mut ModeField<T>) -> Result<()> {
        self.check(w_hat)?;
        self.check(out)?;
        for k in 0..=self.k_max() {
            self.stream_into(k, w_hat.mode(k), out.mode_mut(k));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{build_grid, sup_norm};
    use crate::elliptic::random_smooth_profile;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use std::f64::consts::PI;

    fn to_c(v: &[f64]) -> Vec<Cplx<f64>> {
        v.iter().map(|&x| Cplx::new(x, 0.0)).collect()
    }

    fn chemo_mms_error(k: usize, n_r: usize, big_r: f64) -> f64 {
        let g = build_grid(n_r, big_r).unwrap();
        let a = PI / (big_r - 1.0);
        let kk = (k * k) as f64;
        let exact: Vec<f64> = g.nodes().iter().map(|r| (a * (r - 1.0)).sin()).collect();
        let src: Vec<f64> = g
            .nodes()
            .iter()
            .map(|&r| {
                let s = (a * (r - 1.0)).sin();
                let c = (a * (r - 1.0)).cos();
                s + a * a * s - a * c / r + kk * s / (r * r)
            })
            .collect();
        let got = solve_chemo_mode(k, &to_c(&src), &g).unwrap();
        got.iter()
            .zip(&exact)
            .map(|(c, e)| (c.re - e).abs().max(c.im.abs()))
            .fold(0.0, f64::max)
    }

    fn stream_mms_error(k: usize, n_r: usize, big_r: f64) -> f64 {
        let g = build_grid(n_r, big_r).unwrap();
        let kk = (k * k) as f64;
        let a = std::f64::consts::PI / (big_r - 1.0);
        let exact: Vec<f64> = g.nodes().iter().map(|r| (a * (r - 1.0)).sin()).collect();
        let src: Vec<f64> = g
            .nodes()
            .iter()
            .zip(&exact)
            .map(|(&r, &u)| -a * a * u + a * (a * (r - 1.0)).cos() / r - kk * u / (r * r))
            .collect();
        let got = solve_stream_mode(k, &to_c(&src), &g).unwrap();
        got.iter()
            .zip(&exact)
            .map(|(c, e)| (c.re - e).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn zero_source_gives_zero() {
        let g = build_grid(33, 2.0).unwrap();
        let z = vec![Cplx::new(0.0, 0.0); 33];
        assert!(solve_chemo_mode(3, &z, &g)
            .unwrap()
            .iter()
            .all(|c| c.norm() == 0.0));
        assert!(solve_stream_mode(0, &z, &g)
            .unwrap()
            .iter()
            .all(|c| c.norm() == 0.0));
    }

    #[test]
    fn chemo_manufactured_second_order() {
        for k in [0, 1, 5] {
            let e1 = chemo_mms_error(k, 65, 2.0);
            let e2 = chemo_mms_error(k, 129, 2.0);
            let order = (e1 / e2).log2();
            assert!(
                e1 / e2 >= 3.5 && (1.8..=2.2).contains(&order),
                "k={k} order {order}"
            );
        }
    }

    #[test]
    fn stream_manufactured_second_order() {
        for k in [0, 1, 4] {
            let e1 = stream_mms_error(k, 65, 3.0);
            let e2 = stream_mms_error(k, 129, 3.0);
            let order = (e1 / e2).log2();
            assert!((1.8..=2.2).contains(&order), "k={k} order {order}");
        }
    }

    #[test]
    fn chemo_zero_mode_maximum_principle() {
        let g = build_grid(65, 2.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let p = random_smooth_profile(&mut rng, &g);
            let src: Vec<f64> = p.iter().map(|v| v * v).collect();
            let c = solve_chemo_mode(0, &to_c(&src), &g).unwrap();
            assert!(c.iter().all(|v| v.re >= 0.0));
        }
    }

    #[test]
    fn zero_mode_stream_bounded_by_weighted_vorticity() {
        let g = build_grid(129, 2.0).unwrap();
        let r1 = g.power(1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let w = to_c(&random_smooth_profile(&mut rng, &g));
            let phi = solve_stream_mode(0, &w, &g).unwrap();
            let ratio =
                sup_norm(&phi, None) / crate::discretization::profile_norm(&w, &g, Some(&r1));
            worst = worst.max(ratio);
        }
        assert!(worst.is_finite() && worst < 1.0, "observed {worst}");
    }

    #[test]
    fn cached_solvers_match_one_shot() {
        let g = build_grid(33, 2.5).unwrap();
        let solvers = EllipticSolvers::new(&g, 4).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let src = to_c(&random_smooth_profile(&mut rng, &g));
        let mut out = vec![Cplx::new(0.0, 0.0); 33];
        solvers.chemo_into(4, &src, &mut out);
        assert_eq!(out, solve_chemo_mode(4, &src, &g).unwrap());
        solvers.stream_into(2, &src, &mut out);
        assert_eq!(out, solve_stream_mode(2, &src, &g).unwrap());
    }

    proptest! {
        #[test]
        fn solvers_are_linear(seed in any::<u64>(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0, k in 0usize..10) {
            let g = build_grid(41, 2.0).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let f = to_c(&random_smooth_profile(&mut rng, &g));
            let h = to_c(&random_smooth_profile(&mut rng, &g));
            let mix: Vec<_> = f.iter().zip(&h).map(|(a, b)| a * alpha + b * beta).collect();
            for solve in [solve_chemo_mode::<f64>, solve_stream_mode::<f64>] {
                let sf = solve(k, &f, &g).unwrap();
                let sh = solve(k, &h, &g).unwrap();
                let sm = solve(k, &mix, &g).unwrap();
                let scale = 1.0 + sup_norm(&sm, None);
                for i in 0..41 {
                    let lin = sf[i] * alpha + sh[i] * beta;
                    prop_assert!((lin - sm[i]).norm() <= 1e-12 * scale);
                }
            }
        }
    }
}
