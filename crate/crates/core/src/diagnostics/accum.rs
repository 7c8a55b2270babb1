use crate::discretization::{d_dr, profile_norm, RadialGrid};
use crate::scalar::{Cplx, Real};

/// Constants of the `X_a^k` norm for one wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XakWeights<T> {
    /// Exponential weight rate `a A^{-1/3} |k|^{2/3} R^{-2}`.
    pub rate: T,
    /// Prefactor `A^{-1/6} |k|^{1/3} R^{-1}` of the field term.
    pub field: T,
    /// Prefactor `A^{-1/2}` of the radial-derivative term.
    pub derivative: T,
    /// Prefactor `A^{-1/2} |k|` of the `f/r` term.
    pub over_r: T,
}

impl<T: Real> XakWeights<T> {
    pub fn new(k: usize, a_weight: T, amplitude: T, outer_radius: T) -> Self {
        assert!(k != 0, "X_a^k norms are defined for nonzero modes");
        let kk = T::from_usize_lossy(k);
        let third = T::one() / T::lit(3.0);
        let inv_sqrt_a = amplitude.sqrt().recip();
        Self {
            rate: a_weight * amplitude.powf(-third) * kk.powf(T::lit(2.0) * third)
                / (outer_radius * outer_radius),
            field: amplitude.powf(-T::lit(1.0 / 6.0)) * kk.powf(third) / outer_radius,
            derivative: inv_sqrt_a,
            over_r: inv_sqrt_a * kk,
        }
    }
}

/// The four terms of `|f_k|_{X_a^k}`, prefactors applied.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct XakTerms<T> {
    pub sup: T,
    pub field: T,
    pub derivative: T,
    pub over_r: T,
}

impl<T: Real> XakTerms<T> {
    pub fn total(&self) -> T {
        self.sup + self.field + self.derivative + self.over_r
    }

    pub fn to_f64(&self) -> XakTerms<f64> {
        XakTerms {
            sup: self.sup.to_f64_lossy(),
            field: self.field.to_f64_lossy(),
            derivative: self.derivative.to_f64_lossy(),
            over_r: self.over_r.to_f64_lossy(),
        }
    }
}

/// Running `X_a^k` accumulator: a running sup and trapezoid-in-time integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct XakAccumulator<T> {
    weights: XakWeights<T>,
    sup: T,
    integrals: [T; 3],
    last: Option<(T, [T; 3])>,
}

impl<T: Real> XakAccumulator<T> {
    pub fn new(weights: XakWeights<T>) -> Self {
        Self {
            weights,
            sup: T::zero(),
            integrals: [T::zero(); 3],
            last: None,
        }
    }

    pub fn weights(&self) -> &XakWeights<T> {
        &self.weights
    }

    /// Folds in the (already `r^{1/2}`-weighted) profile `f_k` sampled at time `t`.
    pub fn update(&mut self, t: T, profile: &[Cplx<T>], grid: &RadialGrid<T>) {
        let inv_r = grid.power(-T::one());
        let field = profile_norm(profile, grid, None);
        let derivative = profile_norm(&d_dr(profile, grid), grid, None);
        let over_r = profile_norm(profile, grid, Some(&inv_r));
        self.update_norms(t, [field, derivative, over_r]);
    }

    /// Same as [`update`](Self::update) from precomputed `|f|, |d_r f|, |f/r|`.
    pub fn update_norms(&mut self, t: T, norms: [T; 3]) {
        let growth = (self.weights.rate * t).exp();
        self.sup = self.sup.max(growth * norms[0]);
        let sq = norms.map(|n| (growth * n) * (growth * n));
        if let Some((t_prev, prev)) = self.last {
            let half_dt = (t - t_prev) / T::lit(2.0);
            for j in 0..3 {
                self.integrals[j] = self.integrals[j] + half_dt * (prev[j] + sq[j]);
            }
        }
        self.last = Some((t, sq));
    }

    pub fn terms(&self) -> XakTerms<T> {
        XakTerms {
            sup: self.sup,
            field: self.weights.field * self.integrals[0].sqrt(),
            derivative: self.weights.derivative * self.integrals[1].sqrt(),
            over_r: self.weights.over_r * self.integrals[2].sqrt(),
        }
    }

    pub fn value(&self) -> T {
        self.terms().total()
    }

    /// Flat state for checkpoints: `[sup, I1, I2, I3, has_last, t_last, q1, q2, q3]`.
    pub fn to_raw(&self) -> [f64; 9] {
        let (has, t, q) = match self.last {
            Some((t, q)) => (1.0, t.to_f64_lossy(), q.map(|v| v.to_f64_lossy())),
            None => (0.0, 0.0, [0.0; 3]),
        };
        [
            self.sup.to_f64_lossy(),
            self.integrals[0].to_f64_lossy(),
            self.integrals[1].to_f64_lossy(),
            self.integrals[2].to_f64_lossy(),
            has,
            t,
            q[0],
            q[1],
            q[2],
        ]
    }

    pub fn restore_raw(&mut self, raw: &[f64; 9]) {
        self.sup = T::lit(raw[0]);
        self.integrals = [T::lit(raw[1]), T::lit(raw[2]), T::lit(raw[3])];
        self.last = (raw[4] != 0.0).then(|| {
            (
                T::lit(raw[5]),
                [T::lit(raw[6]), T::lit(raw[7]), T::lit(raw[8])],
            )
        });
    }
}
