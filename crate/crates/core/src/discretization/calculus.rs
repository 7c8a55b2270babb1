use std::ops::{Add, Mul, Sub};

use super::grid::RadialGrid;
use super::modes::{ModeField, PhysicalField};
use crate::scalar::{Cplx, Real};

/// Values a radial profile can carry: real samples or complex mode coefficients.
pub trait RadialValue<T>:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self>
{
    fn abs_sq(self) -> T;
    fn zero_value() -> Self;
}

impl<T: Real> RadialValue<T> for T {
    #[inline]
    fn abs_sq(self) -> T {
        self * self
    }
    #[inline]
    fn zero_value() -> Self {
        T::zero()
    }
}

impl<T: Real> RadialValue<T> for Cplx<T> {
    #[inline]
    fn abs_sq(self) -> T {
        self.norm_sqr()
    }
    #[inline]
    fn zero_value() -> Self {
        Cplx::new(T::zero(), T::zero())
    }
}

/// Radial derivative: central differences inside, one-sided second order at both ends.
pub fn d_dr<T: Real, V: RadialValue<T>>(f: &[V], grid: &RadialGrid<T>) -> Vec<V> {
    let mut out = vec![V::zero_value(); f.len()];
    d_dr_into(f, grid, &mut out);
    out
}

pub fn d_dr_into<T: Real, V: RadialValue<T>>(f: &[V], grid: &RadialGrid<T>, out: &mut [V]) {
    let n = f.len();
    assert_eq!(n, grid.len(), "profile length must match the grid");
    assert_eq!(out.len(), n);
    let inv_2h = T::one() / (T::lit(2.0) * grid.spacing());
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    out[0] = (f[1] * four - f[0] * three - f[2]) * inv_2h;
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - f[i - 1]) * inv_2h;
    }
    out[n - 1] = (f[n - 1] * three - f[n - 2] * four + f[n - 3]) * inv_2h;
}

/// Second radial derivative: three-point stencil inside, four-point one-sided
/// second-order stencils at both ends.
pub fn d2_dr2<T: Real, V: RadialValue<T>>(f: &[V], grid: &RadialGrid<T>) -> Vec<V> {
    let n = f.len();
    assert_eq!(n, grid.len(), "profile length must match the grid");
    assert!(n >= 4, "second derivative needs at least 4 nodes");
    let inv_h2 = T::one() / (grid.spacing() * grid.spacing());
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let five = T::lit(5.0);
    let mut out = vec![V::zero_value(); n];
    out[0] = (f[0] * two - f[1] * five + f[2] * four - f[3]) * inv_h2;
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - f[i] * two + f[i - 1]) * inv_h2;
    }
    out[n - 1] = (f[n - 1] * two - f[n - 2] * five + f[n - 3] * four - f[n - 4]) * inv_h2;
    out
}

/// Trapezoid rule for `int_1^R f dr`.
pub fn integrate<T: Real>(f: &[T], grid: &RadialGrid<T>) -> T {
    f.iter()
        .zip(grid.weights())
        .fold(T::zero(), |acc, (&v, &w)| acc + v * w)
}

/// `(int_1^R |w f|^2 dr)^{1/2}` for one radial profile.
pub fn profile_norm<T: Real, V: RadialValue<T>>(
    f: &[V],
    grid: &RadialGrid<T>,
    weight: Option<&[T]>,
) -> T {
    let mut acc = T::zero();
    for (i, (&v, &q)) in f.iter().zip(grid.weights()).enumerate() {
        let w2 = weight.map_or(T::one(), |w| w[i] * w[i]);
        acc = acc + q * w2 * v.abs_sq();
    }
    acc.sqrt()
}

/// Largest nodal magnitude of `w f`.
pub fn sup_norm<T: Real, V: RadialValue<T>>(f: &[V], weight: Option<&[T]>) -> T {
    f.iter().enumerate().fold(T::zero(), |acc, (i, &v)| {
        let w = weight.map_or(T::one(), |w| w[i].abs());
        acc.max(w * v.abs_sq().sqrt())
    })
}

/// Flat-measure `L^2` norm of a real field from its modes (Parseval in `theta`).
///
/// Hermitian storage counts every `k >= 1` profile twice, once for `-k`.
pub fn norm_l2_flat<T: Real>(
    field: &ModeField<T>,
    grid: &RadialGrid<T>,
    weight: Option<&[T]>,
) -> T {
    let two = T::lit(2.0);
    let mut acc = T::zero();
    for (k, m) in field.modes().enumerate() {
        let p = profile_norm(m, grid, weight);
        let mult = if k == 0 || !field.is_hermitian() {
            T::one()
        } else {
            two
        };
        acc = acc + mult * p * p;
    }
    (T::TAU() * acc).sqrt()
}

/// Flat-measure `L^2` norm of real samples: trapezoid in `r`, rectangle rule in `theta`.
pub fn physical_norm_l2_flat<T: Real>(
    field: &PhysicalField<T>,
    grid: &RadialGrid<T>,
    weight: Option<&[T]>,
) -> T {
    let dth = T::TAU() / T::from_usize_lossy(field.n_theta());
    let mut acc = T::zero();
    for i in 0..field.n_r() {
        let w2 = weight.map_or(T::one(), |w| w[i] * w[i]);
        let ring = field.ring(i).iter().fold(T::zero(), |a, &v| a + v * v);
        acc = acc + grid.weights()[i] * w2 * ring;
    }
    (acc * dth).sqrt()
}

#[cfg(test)]
mod tests {
    use super::super::{build_grid, theta_inverse, ModeField};
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn derivative_exact_for_quadratics() {
        let g = build_grid(17, 2.0).unwrap();
        let lin: Vec<f64> = g.nodes().to_vec();
        for d in d_dr(&lin, &g) {
            assert!((d - 1.0).abs() < 1e-12);
        }
        let quad: Vec<f64> = g.nodes().iter().map(|r| r * r).collect();
        for (d, r) in d_dr(&quad, &g).iter().zip(g.nodes()) {
            assert!((d - 2.0 * r).abs() < 1e-11);
        }
        let cst = vec![3.25f64; 17];
        assert!(d_dr(&cst, &g).iter().all(|&d| d == 0.0));
    }

    #[test]
    fn derivative_converges_second_order() {
        let err = |n: usize| {
            let g = build_grid::<f64>(n, 2.0).unwrap();
            let f: Vec<f64> = g.nodes().iter().map(|r| r.sin()).collect();
            d_dr(&f, &g)
                .iter()
                .zip(g.nodes())
                .map(|(d, r)| (d - r.cos()).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(33), err(65));
        assert!(e1 / e2 >= 3.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn second_derivative_exact_for_cubics() {
        let g = build_grid(11, 2.0).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|r| r * r * r - r).collect();
        for (d, r) in d2_dr2(&f, &g).iter().zip(g.nodes()) {
            assert!((d - 6.0 * r).abs() < 1e-9, "{d} vs {}", 6.0 * r);
        }
    }

    #[test]
    fn derivative_of_complex_profile() {
        let g = build_grid(9, 3.0).unwrap();
        let f: Vec<Cplx<f64>> = g.nodes().iter().map(|&r| Cplx::new(r, -2.0 * r)).collect();
        for d in d_dr(&f, &g) {
            assert!((d - Cplx::new(1.0, -2.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn unit_field_norm() {
        let g = build_grid(33, 2.0).unwrap();
        let mut m = ModeField::<f64>::zeros(4, 33);
        m.mode_mut(0)
            .iter_mut()
            .for_each(|c| *c = Cplx::new(1.0, 0.0));
        let n = norm_l2_flat(&m, &g, None);
        assert!((n - std::f64::consts::TAU.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn weighted_single_mode_norm() {
        // int_1^2 r dr = 3/2 is integrated exactly by the trapezoid rule.
        let g = build_grid(33, 2.0).unwrap();
        let one = vec![Cplx::new(1.0, 0.0); 33];
        let sqrt_r = g.power(0.5);
        let n = profile_norm(&one, &g, Some(&sqrt_r));
        assert!((n - 1.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn integral_of_constant() {
        let g = build_grid(33, 2.0).unwrap();
        assert_eq!(integrate(&vec![1.0; 33], &g), 1.0);
    }

    proptest! {
        #[test]
        fn parseval_between_modes_and_samples(seed in any::<u64>(), k_max in 1usize..12) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = build_grid(21, 2.5).unwrap();
            let mut m = ModeField::<f64>::zeros(k_max, 21);
            for k in 0..=k_max {
                for c in m.mode_mut(k) {
                    *c = Cplx::new(rng.random_range(-1.0..1.0), if k == 0 { 0.0 } else { rng.random_range(-1.0..1.0) });
                }
            }
            let w = g.power(0.5);
            let phys = theta_inverse(&m, 4 * k_max + 3).unwrap();
            let a = norm_l2_flat(&m, &g, Some(&w));
            let b = physical_norm_l2_flat(&phys, &g, Some(&w));
            prop_assert!((a - b).abs() <= 1e-10 * a);
        }

        #[test]
        fn quadrature_of_nonnegative_is_nonnegative(vals in proptest::collection::vec(0.0f64..10.0, 5..40)) {
            let g = build_grid(vals.len(), 3.0).unwrap();
            prop_assert!(integrate(&vals, &g) >= 0.0);
        }
    }
}
