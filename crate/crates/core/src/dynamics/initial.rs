use crate::discretization::{integrate, ModeField, PhysicalField, RadialGrid, ThetaTransform};
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

const MAX_FINE_THETA: usize = 1 << 14;

/// Fourier weights of the Jackson kernel of degree at most `k_max`, normalized
/// so the zero mode is 1. The kernel is a nonnegative trigonometric polynomial,
/// so convolving a nonnegative function with it keeps it nonnegative.
pub fn jackson_weights(k_max: usize) -> Vec<f64> {
    let m = k_max / 2 + 1;
    let fejer = |j: i64| {
        let a = j.unsigned_abs() as usize;
        if a < m {
            1.0 - a as f64 / m as f64
        } else {
            0.0
        }
    };
    let lim = m as i64 - 1;
    let mut w: Vec<f64> = (0..=k_max as i64)
        .map(|k| (-lim..=lim).map(|j| fejer(j) * fejer(k - j)).sum())
        .collect();
    let w0 = w[0];
    w.iter_mut().for_each(|v| *v /= w0);
    w
}

/// Mollified Gaussian bump with flat-measure mass `mass`.
///
/// The planar Gaussian `exp(-|x - x0|^2 / (2 sigma^2))` centered at polar
/// point `(r0, theta0)` is convolved in `theta` with the Jackson kernel of the
/// retained band, multiplied by the cutoff `4 (r - 1)(R - r) / (R - 1)^2`, and
/// rescaled so that `int n dr dtheta = mass`.
pub fn initial_gaussian<T: Real>(
    mass: T,
    r0: T,
    theta0: T,
    sigma: T,
    grid: &RadialGrid<T>,
    k_max: usize,
) -> Result<ModeField<T>> {
    let big_r = grid.outer_radius();
    if !(r0 > T::one() && r0 < big_r) {
        return Err(Error::BadCenter(r0.to_f64_lossy()));
    }
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(Error::BadDomain("sigma must be positive".into()));
    }
    if !(mass > T::zero()) || !mass.is_finite() {
        return Err(Error::BadDomain("mass must be positive".into()));
    }
    let per_width = (T::lit(40.0) * r0 / sigma).to_f64_lossy().ceil() as usize;
    let n_fine = per_width
        .max(16 * k_max)
        .next_power_of_two()
        .min(MAX_FINE_THETA);
    let transform = ThetaTransform::new(n_fine, k_max)?;
    let two_s2 = T::lit(2.0) * sigma * sigma;
    let fine = PhysicalField::from_fn(grid.nodes(), n_fine, |r, theta| {
        let d2 = r * r + r0 * r0 - T::lit(2.0) * r * r0 * (theta - theta0).cos();
        (-d2 / two_s2).exp()
    });
    let mut n = transform.forward(&fine)?;
    let kernel = jackson_weights(k_max);
    let width = big_r - T::one();
    for (i, &r) in grid.nodes().iter().enumerate() {
        let cut = T::lit(4.0) * (r - T::one()) * (big_r - r) / (width * width);
        for (k, &wk) in kernel.iter().enumerate() {
            n.mode_mut(k)[i] = n.mode(k)[i] * (cut * T::lit(wk));
        }
    }
    n.clear_boundary();
    let zero: Vec<T> = n.mode(0).iter().map(|c| c.re).collect();
    let current = T::TAU() * integrate(&zero, grid);
    if !(current > T::zero()) {
        return Err(Error::BadDomain(
            "Gaussian has no mass inside the annulus".into(),
        ));
    }
    n.scale(mass / current);
    Ok(n)
}

/// Vorticity `amplitude * sin(pi (r - 1)/(R - 1)) * cos(k theta)`.
pub fn vorticity_mode<T: Real>(
    amplitude: T,
    k: usize,
    grid: &RadialGrid<T>,
    k_max: usize,
) -> Result<ModeField<T>> {
    if k > k_max {
        return Err(Error::BadDomain(format!(
            "vorticity mode {k} exceeds k_max {k_max}"
        )));
    }
    let mut w = ModeField::zeros(k_max, grid.len());
    let width = grid.outer_radius() - T::one();
    let coef = if k == 0 {
        amplitude
    } else {
        amplitude * T::lit(0.5)
    };
    for (c, &r) in w.mode_mut(k).iter_mut().zip(grid.nodes()) {
        *c = Cplx::new(coef * (T::PI() * (r - T::one()) / width).sin(), T::zero());
    }
    w.clear_boundary();
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{build_grid, theta_inverse};
    use std::f64::consts::PI;

    fn flat_mass(n: &ModeField<f64>, g: &RadialGrid<f64>) -> f64 {
        let z: Vec<f64> = n.mode(0).iter().map(|c| c.re).collect();
        2.0 * PI * integrate(&z, g)
    }

    #[test]
    fn jackson_weights_shape() {
        let w = jackson_weights(32);
        assert_eq!(w.len(), 33);
        assert_eq!(w[0], 1.0);
        assert!(w.windows(2).all(|p| p[1] <= p[0]));
        assert!(w[32] > 0.0);
        assert_eq!(jackson_weights(5).iter().filter(|&&v| v > 0.0).count(), 5);
    }

    #[test]
    fn mass_is_normalized() {
        let g = build_grid(129, 2.0).unwrap();
        for (r0, th) in [(1.5, 0.0), (1.2, 2.0), (1.9, -1.0)] {
            let n = initial_gaussian(4.0 * PI, r0, th, 0.1, &g, 32).unwrap();
            assert!((flat_mass(&n, &g) - 4.0 * PI).abs() <= 1e-3 * 4.0 * PI);
        }
    }

    #[test]
    fn rejects_bad_center() {
        let g = build_grid(33, 2.0).unwrap();
        assert!(matches!(
            initial_gaussian(1.0, 2.5, 0.0, 0.1, &g, 8),
            Err(Error::BadCenter(_))
        ));
        assert!(matches!(
            initial_gaussian(1.0, 1.0, 0.0, 0.1, &g, 8),
            Err(Error::BadCenter(_))
        ));
    }

    #[test]
    fn reconstruction_is_nonnegative() {
        let g = build_grid(65, 2.0).unwrap();
        for sigma in [0.05, 0.1, 0.5, 5.0] {
            let n = initial_gaussian(10.0 * PI, 1.5, 0.3, sigma, &g, 16).unwrap();
            let p = theta_inverse(&n, 64).unwrap();
            assert!(p.min() >= -1e-12 * p.max(), "sigma {sigma}: {}", p.min());
        }
    }

    #[test]
    fn supercritical_bump_is_peaked() {
        let g = build_grid(129, 2.0).unwrap();
        let n = initial_gaussian(10.0 * PI, 1.5, 0.0, 0.1, &g, 32).unwrap();
        let p = theta_inverse(&n, 128).unwrap();
        // independent quadrature of the constructed profile
        let mut mass = 0.0;
        for i in 0..g.len() {
            let ring: f64 = p.ring(i).iter().sum::<f64>() * 2.0 * PI / 128.0;
            mass += g.weights()[i] * ring;
        }
        assert!((mass - 10.0 * PI).abs() < 1e-9 * mass);
        assert!(p.max() > 10.0 * PI / (2.0 * PI * 0.01) * 0.1);
    }

    #[test]
    fn vorticity_mode_is_real_cosine() {
        let g = build_grid(33, 2.0).unwrap();
        let w = vorticity_mode(2.0, 3, &g, 4).unwrap();
        let p = theta_inverse(&w, 16).unwrap();
        let i = 16;
        let s = (PI * (g.nodes()[i] - 1.0)).sin();
        assert!((p.get(i, 0) - 2.0 * s).abs() < 1e-12);
        assert!(vorticity_mode(1.0, 5, &g, 4).is_err());
    }
}
