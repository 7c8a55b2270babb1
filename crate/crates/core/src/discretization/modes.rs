use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Radial profiles of the angular Fourier coefficients `f_k(r)` for `0 <= k <= k_max`.
///
/// With `hermitian` set the field is real and `f_{-k} = conj(f_k)`, so only the
/// non-negative half of the spectrum is stored.
#[derive(Clone, PartialEq)]
pub struct ModeField<T> {
    k_max: usize,
    n_r: usize,
    coeffs: Vec<Cplx<T>>,
    hermitian: bool,
}

impl<T: fmt::Debug> fmt::Debug for ModeField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModeField")
            .field("k_max", &self.k_max)
            .field("n_r", &self.n_r)
            .field("hermitian", &self.hermitian)
            .finish_non_exhaustive()
    }
}

impl<T: Real> ModeField<T> {
    pub fn zeros(k_max: usize, n_r: usize) -> Self {
        Self {
            k_max,
            n_r,
            coeffs: vec![Cplx::zero(); (k_max + 1) * n_r],
            hermitian: true,
        }
    }

    /// Wraps mode-major coefficients (`coeffs[k * n_r + i]`).
    pub fn from_coeffs(k_max: usize, n_r: usize, coeffs: Vec<Cplx<T>>) -> Result<Self> {
        if coeffs.len() != (k_max + 1) * n_r {
            return Err(Error::Shape(format!(
                "expected {} coefficients, got {}",
                (k_max + 1) * n_r,
                coeffs.len()
            )));
        }
        Ok(Self {
            k_max,
            n_r,
            coeffs,
            hermitian: true,
        })
    }

    #[inline]
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    #[inline]
    pub fn n_r(&self) -> usize {
        self.n_r
    }

    #[inline]
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn set_hermitian(&mut self, hermitian: bool) {
        self.hermitian = hermitian;
    }

    #[inline]
    pub fn mode(&self, k: usize) -> &[Cplx<T>] {
        &self.coeffs[k * self.n_r..(k + 1) * self.n_r]
    }

    #[inline]
    pub fn mode_mut(&mut self, k: usize) -> &mut [Cplx<T>] {
        &mut self.coeffs[k * self.n_r..(k + 1) * self.n_r]
    }

    pub fn modes(&self) -> impl Iterator<Item = &[Cplx<T>]> {
        self.coeffs.chunks_exact(self.n_r)
    }

    pub fn modes_mut(&mut self) -> impl Iterator<Item = &mut [Cplx<T>]> {
        self.coeffs.chunks_exact_mut(self.n_r)
    }

    #[inline]
    pub fn coeffs(&self) -> &[Cplx<T>] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Cplx<T>] {
        &mut self.coeffs
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.k_max == other.k_max && self.n_r == other.n_r
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: T, other: &Self) {
        debug_assert!(self.same_shape(other));
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = *a + b * alpha;
        }
    }

    pub fn scale(&mut self, alpha: T) {
        for a in &mut self.coeffs {
            *a = *a * alpha;
        }
    }

    /// Zeroes the endpoint values of every mode (homogeneous Dirichlet rows).
    pub fn clear_boundary(&mut self) {
        let n = self.n_r;
        for m in self.coeffs.chunks_exact_mut(n) {
            m[0] = Cplx::zero();
            m[n - 1] = Cplx::zero();
        }
    }

    /// Largest coefficient magnitude; `NaN` propagates.
    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, c| {
            let v = c.norm();
            if v.is_nan() || acc.is_nan() {
                T::nan()
            } else {
                acc.max(v)
            }
        })
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Real samples on the `(r_i, theta_j)` tensor grid, radius-major (`data[i * n_theta + j]`).
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField<T> {
    n_r: usize,
    n_theta: usize,
    data: Vec<T>,
}

impl<T: Real> PhysicalField<T> {
    pub fn zeros(n_r: usize, n_theta: usize) -> Self {
        Self {
            n_r,
            n_theta,
            data: vec![T::zero(); n_r * n_theta],
        }
    }

    pub fn from_fn(radii: &[T], n_theta: usize, mut f: impl FnMut(T, T) -> T) -> Self {
        let dth = T::TAU() / T::from_usize_lossy(n_theta);
        let mut data = Vec::with_capacity(radii.len() * n_theta);
        for &r in radii {
            for j in 0..n_theta {
                data.push(f(r, dth * T::from_usize_lossy(j)));
            }
        }
        Self {
            n_r: radii.len(),
            n_theta,
            data,
        }
    }

    pub fn from_vec(n_r: usize, n_theta: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n_r * n_theta {
            return Err(Error::Shape(format!(
                "expected {} samples, got {}",
                n_r * n_theta,
                data.len()
            )));
        }
        Ok(Self { n_r, n_theta, data })
    }

    #[inline]
    pub fn n_r(&self) -> usize {
        self.n_r
    }

    #[inline]
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    #[inline]
    pub fn ring(&self, i: usize) -> &[T] {
        &self.data[i * self.n_theta..(i + 1) * self.n_theta]
    }

    #[inline]
    pub fn ring_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.n_theta..(i + 1) * self.n_theta]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n_theta + j]
    }

    pub fn max(&self) -> T {
        self.data.iter().copied().fold(T::neg_infinity(), |a, b| {
            if a.is_nan() || b.is_nan() {
                T::nan()
            } else {
                a.max(b)
            }
        })
    }

    pub fn min(&self) -> T {
        self.data.iter().copied().fold(T::infinity(), |a, b| {
            if a.is_nan() || b.is_nan() {
                T::nan()
            } else {
                a.min(b)
            }
        })
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().copied().fold(T::zero(), |a, b| {
            if b.is_nan() {
                T::nan()
            } else {
                a.max(b.abs())
            }
        })
    }
}

/// Number of angular samples for a run: alias-free for quadratic products
/// (`4 k_max` rounded up to a power of two) when dealiasing, otherwise the
/// smallest even count that still carries every retained mode.
pub fn theta_resolution(k_max: usize, dealias: bool) -> usize {
    if dealias {
        (4 * k_max).next_power_of_two()
    } else {
        2 * k_max + 2
    }
}

/// Planned FFTs between angular samples and retained modes.
#[derive(Clone)]
pub struct ThetaTransform<T: Real> {
    n_theta: usize,
    k_max: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for ThetaTransform<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ThetaTransform")
            .field("n_theta", &self.n_theta)
            .field("k_max", &self.k_max)
            .finish()
    }
}

impl<T: Real> ThetaTransform<T> {
    pub fn new(n_theta: usize, k_max: usize) -> Result<Self> {
        let need = 2 * k_max + 1;
        if n_theta < need {
            return Err(Error::ResolutionTooLow {
                n_theta,
                k_max,
                need,
            });
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n_theta,
            k_max,
            forward: planner.plan_fft_forward(n_theta),
            inverse: planner.plan_fft_inverse(n_theta),
        })
    }

    #[inline]
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    #[inline]
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Angle of sample `j`.
    pub fn angle(&self, j: usize) -> T {
        T::TAU() * T::from_usize_lossy(j) / T::from_usize_lossy(self.n_theta)
    }

    /// `f_k(r_i) = (1/N) sum_j f(r_i, theta_j) e^{-i k theta_j}` for `k <= k_max`.
    pub fn forward(&self, samples: &PhysicalField<T>) -> Result<ModeField<T>> {
        let mut out = ModeField::zeros(self.k_max, samples.n_r());
        self.forward_into(samples, &mut out)?;
        Ok(out)
    }

    pub fn forward_into(&self, samples: &PhysicalField<T>, out: &mut ModeField<T>) -> Result<()> {
        if samples.n_theta() != self.n_theta {
            return Err(Error::Shape(format!(
                "transform planned for {} angles, samples carry {}",
                self.n_theta,
                samples.n_theta()
            )));
        }
        if out.k_max() != self.k_max || out.n_r() != samples.n_r() {
            return Err(Error::Shape("output mode field has the wrong shape".into()));
        }
        let n_r = samples.n_r();
        let inv_n = T::one() / T::from_usize_lossy(self.n_theta);
        let mut buf = vec![Cplx::zero(); self.n_theta];
        let mut scratch = vec![Cplx::zero(); self.forward.get_inplace_scratch_len()];
        for i in 0..n_r {
            for (b, &s) in buf.iter_mut().zip(samples.ring(i)) {
                *b = Cplx::new(s, T::zero());
            }
            self.forward.process_with_scratch(&mut buf, &mut scratch);
            for (k, &b) in buf.iter().enumerate().take(self.k_max + 1) {
                out.mode_mut(k)[i] = b * inv_n;
            }
            out.mode_mut(0)[i].im = T::zero();
        }
        out.set_hermitian(true);
        Ok(())
    }

    /// Real samples of `f_0 + 2 Re sum_{k>=1} f_k e^{i k theta}`.
    pub fn inverse(&self, modes: &ModeField<T>) -> Result<PhysicalField<T>> {
        let mut out = PhysicalField::zeros(modes.n_r(), self.n_theta);
        self.inverse_into(modes, &mut out)?;
        Ok(out)
    }

    pub fn inverse_into(&self, modes: &ModeField<T>, out: &mut PhysicalField<T>) -> Result<()> {
        if !modes.is_hermitian() {
            return Err(Error::Shape(
                "inverse transform needs a hermitian (real) mode field".into(),
            ));
        }
        if modes.k_max() > self.k_max || out.n_theta() != self.n_theta || out.n_r() != modes.n_r() {
            return Err(Error::Shape("inverse transform shape mismatch".into()));
        }
        let n = self.n_theta;
        let mut buf = vec![Cplx::zero(); n];
        let mut scratch = vec![Cplx::zero(); self.inverse.get_inplace_scratch_len()];
        for i in 0..modes.n_r() {
            buf.iter_mut().for_each(|b| *b = Cplx::zero());
            buf[0] = Cplx::new(modes.mode(0)[i].re, T::zero());
            for k in 1..=modes.k_max() {
                let c = modes.mode(k)[i];
                buf[k] = c;
                buf[n - k] = c.conj();
            }
            self.inverse.process_with_scratch(&mut buf, &mut scratch);
            for (o, b) in out.ring_mut(i).iter_mut().zip(&buf) {
                *o = b.re;
            }
        }
        Ok(())
    }
}

/// One-shot forward transform of real samples.
pub fn theta_forward<T: Real>(samples: &PhysicalField<T>, k_max: usize) -> Result<ModeField<T>> {
    ThetaTransform::new(samples.n_theta(), k_max)?.forward(samples)
}

/// One-shot inverse transform onto `n_theta` uniform angles.
pub fn theta_inverse<T: Real>(modes: &ModeField<T>, n_theta: usize) -> Result<PhysicalField<T>> {
    ThetaTransform::new(n_theta, modes.k_max())?.inverse(modes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn radii(n: usize) -> Vec<f64> {
        (0..n).map(|i| 1.0 + i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn constant_has_only_zero_mode() {
        let f = PhysicalField::from_fn(&radii(5), 16, |_, _| 1.0);
        let m = theta_forward(&f, 4).unwrap();
        for i in 0..5 {
            assert!((m.mode(0)[i].re - 1.0).abs() < 1e-15);
            for k in 1..=4 {
                assert!(m.mode(k)[i].norm() < 1e-15);
            }
        }
    }

    #[test]
    fn cosine_splits_into_halves() {
        let f = PhysicalField::from_fn(&radii(4), 16, |_, th| th.cos());
        let m = theta_forward(&f, 5).unwrap();
        for i in 0..4 {
            assert!((m.mode(1)[i] - Cplx::new(0.5, 0.0)).norm() < 1e-15);
            for k in [0, 2, 3, 4, 5] {
                assert!(m.mode(k)[i].norm() < 1e-15);
            }
        }
    }

    #[test]
    fn inverse_examples() {
        let mut m = ModeField::<f64>::zeros(3, 2);
        m.mode_mut(0)
            .iter_mut()
            .for_each(|c| *c = Cplx::new(2.0, 0.0));
        let f = theta_inverse(&m, 8).unwrap();
        assert!(f.data().iter().all(|&v| (v - 2.0).abs() < 1e-15));

        let mut m = ModeField::<f64>::zeros(3, 2);
        m.mode_mut(1)
            .iter_mut()
            .for_each(|c| *c = Cplx::new(0.5, 0.0));
        let f = theta_inverse(&m, 8).unwrap();
        for i in 0..2 {
            for j in 0..8 {
                let th = std::f64::consts::TAU * j as f64 / 8.0;
                assert!((f.get(i, j) - th.cos()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rejects_coarse_grid() {
        let f = PhysicalField::from_fn(&radii(3), 8, |_, _| 0.0);
        assert!(matches!(
            theta_forward(&f, 4),
            Err(Error::ResolutionTooLow { need: 9, .. })
        ));
    }

    #[test]
    fn resolution_rule() {
        assert_eq!(theta_resolution(32, true), 128);
        assert_eq!(theta_resolution(5, true), 32);
        assert_eq!(theta_resolution(32, false), 66);
        for k in 1..50 {
            assert!(theta_resolution(k, true) > 3 * k);
            assert!(theta_resolution(k, false) > 2 * k);
        }
    }

    proptest! {
        #[test]
        fn round_trip_random_hermitian(seed in any::<u64>(), k_max in 1usize..20, n_r in 3usize..9) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut m = ModeField::<f64>::zeros(k_max, n_r);
            for k in 0..=k_max {
                for c in m.mode_mut(k) {
                    *c = Cplx::new(rng.random_range(-1.0..1.0), if k == 0 { 0.0 } else { rng.random_range(-1.0..1.0) });
                }
            }
            let tr = ThetaTransform::new(theta_resolution(k_max, true), k_max).unwrap();
            let back = tr.forward(&tr.inverse(&m).unwrap()).unwrap();
            for (a, b) in m.coeffs().iter().zip(back.coeffs()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
            let tr = ThetaTransform::new(theta_resolution(k_max, false), k_max).unwrap();
            let back = tr.forward(&tr.inverse(&m).unwrap()).unwrap();
            for (a, b) in m.coeffs().iter().zip(back.coeffs()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
