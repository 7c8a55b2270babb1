use num_traits::Zero;

use crate::baseflow::SimParams;
use crate::discretization::{build_grid, profile_norm, RadialGrid};
use crate::elliptic::{LaplacianRows, TridiagonalSystem};
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Interior rows of `d_r^2 - (k^2 - 1/4)/r^2`, the radial Laplacian acting on `r^{1/2} f`.
pub fn weighted_operator_rows<T: Real>(grid: &RadialGrid<T>, k: usize) -> LaplacianRows<T> {
    let h = grid.spacing();
    let inv_h2 = T::one() / (h * h);
    let shift = T::from_usize_lossy(k * k) - T::lit(0.25);
    let interior = &grid.nodes()[1..grid.len() - 1];
    LaplacianRows {
        sub: vec![inv_h2; interior.len()],
        diag: interior
            .iter()
            .map(|&r| -T::lit(2.0) * inv_h2 - shift / (r * r))
            .collect(),
        sup: vec![inv_h2; interior.len()],
    }
}

/// Evolves `d_t h + L h = 0` with `L = -(1/A)(d_r^2 - (k^2 - 1/4)/r^2) + i k / r^2`
/// and Dirichlet ends by Crank-Nicolson with step `params.dt` up to `params.t_end`.
///
/// Returns `(t, |h(t)|)` at every step including `t = 0`; the norm is the
/// flat `L^2` norm in `r`.
pub fn run_linear_model<T: Real>(
    params: &SimParams,
    k: usize,
    h0: &[Cplx<T>],
) -> Result<Vec<(f64, f64)>> {
    if k == 0 {
        return Err(Error::BadDomain("the linear model needs k != 0".into()));
    }
    params.validate()?;
    let grid = build_grid(params.n_r, T::lit(params.outer_radius))?;
    if h0.len() != grid.len() {
        return Err(Error::Shape(format!(
            "profile has {} nodes, grid has {}",
            h0.len(),
            grid.len()
        )));
    }
    let dt = T::lit(params.dt);
    let half = dt * T::lit(0.5);
    let diff = T::lit(params.inverse_amplitude());
    let kk = T::from_usize_lossy(k);
    let rows = weighted_operator_rows(&grid, k);
    let interior = &grid.nodes()[1..grid.len() - 1];
    let rot: Vec<Cplx<T>> = interior
        .iter()
        .map(|&r| Cplx::new(T::zero(), kk / (r * r)))
        .collect();

    let mut implicit: TridiagonalSystem<T> = rows.to_system(-half * diff, T::one());
    for (d, &q) in implicit.diag.iter_mut().zip(&rot) {
        *d = *d + q * half;
    }
    let factor = implicit.factor()?;

    let n = grid.len();
    let mut h: Vec<Cplx<T>> = h0.to_vec();
    h[0] = Cplx::zero();
    h[n - 1] = Cplx::zero();
    let steps = (params.t_end / params.dt).round().max(1.0) as u64;
    let mut out = Vec::with_capacity(steps as usize + 1);
    out.push((0.0, profile_norm(&h, &grid, None).to_f64_lossy()));
    let mut rhs = vec![Cplx::zero(); n - 2];
    for s in 1..=steps {
        for i in 1..n - 1 {
            let j = i - 1;
            let lap = h[i - 1] * rows.sub[j] + h[i] * rows.diag[j] + h[i + 1] * rows.sup[j];
            rhs[j] = h[i] + lap * (half * diff) - rot[j] * h[i] * half;
        }
        factor.solve_in_place(&mut rhs);
        h[1..n - 1].copy_from_slice(&rhs);
        out.push((
            params.dt * s as f64,
            profile_norm(&h, &grid, None).to_f64_lossy(),
        ));
    }
    Ok(out)
}
