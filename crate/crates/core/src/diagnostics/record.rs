use std::fmt::Write as _;

use super::accum::{XakAccumulator, XakTerms, XakWeights};
use crate::discretization::{d_dr_into, integrate, profile_norm, ModeField, RadialGrid};
use crate::scalar::{Cplx, Real};

/// Diagnostics of one sampled time.
///
/// Per-mode vectors are indexed by `k - 1` for `k = 1..=k_max`; mode norms are
/// flat-measure `L^2` norms of the `r^{1/2}`-weighted profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagRecord {
    pub t: f64,
    /// `int n dr dtheta`.
    pub mass: f64,
    /// `int n r dr dtheta`, the area-measure mass.
    pub mass_area: f64,
    pub max_n: f64,
    pub min_n: f64,
    /// Largest velocity-perturbation magnitude on the collocation grid.
    pub max_u: f64,
    pub n_norms: Vec<f64>,
    pub w_norms: Vec<f64>,
    pub xn: Vec<XakTerms<f64>>,
    pub xw: Vec<XakTerms<f64>>,
    pub energy: f64,
    /// `|r^{1/2} n_0|` and `|r^{1/2} w_0|`.
    pub n0_norm: f64,
    pub w0_norm: f64,
}

/// Sum of `X_a^k` values over all `k != 0` for density and vorticity.
///
/// Both `k` and `-k` contribute, so every stored `k >= 1` term counts twice.
pub fn energy_e(record: &DiagRecord) -> f64 {
    record
        .xn
        .iter()
        .chain(&record.xw)
        .map(|t| 2.0 * t.total())
        .sum()
}

/// Weighted zero-mode norms `(|r^{1/2} n_0|, |r^{1/2} w_0|)`.
pub fn zero_mode_report<T: Real>(
    n_hat: &ModeField<T>,
    w_hat: &ModeField<T>,
    grid: &RadialGrid<T>,
) -> (T, T) {
    let sqrt_r = grid.power(T::lit(0.5));
    (
        profile_norm(n_hat.mode(0), grid, Some(&sqrt_r)),
        profile_norm(w_hat.mode(0), grid, Some(&sqrt_r)),
    )
}

impl DiagRecord {
    pub fn k_max(&self) -> usize {
        self.n_norms.len()
    }

    pub fn csv_header(k_max: usize) -> String {
        let mut s = String::from("t,mass,mass_area,max_n,min_n,max_u,energy,n0_norm,w0_norm");
        for field in ["n", "w"] {
            for k in 1..=k_max {
                write!(s, ",{field}{k}_norm").unwrap();
            }
        }
        for field in ["n", "w"] {
            for k in 1..=k_max {
                for term in ["sup", "field", "dr", "over_r"] {
                    write!(s, ",x{field}{k}_{term}").unwrap();
                }
            }
        }
        s
    }

    /// One CSV row matching [`csv_header`](Self::csv_header), full precision.
    pub fn to_csv_row(&self) -> String {
        let mut s = String::new();
        let mut push = |v: f64| {
            if !s.is_empty() {
                s.push(',');
            }
            write!(s, "{v:.17e}").unwrap();
        };
        for v in [
            self.t,
            self.mass,
            self.mass_area,
            self.max_n,
            self.min_n,
            self.max_u,
            self.energy,
            self.n0_norm,
            self.w0_norm,
        ] {
            push(v);
        }
        for &v in self.n_norms.iter().chain(&self.w_norms) {
            push(v);
        }
        for t in self.xn.iter().chain(&self.xw) {
            for v in [t.sup, t.field, t.derivative, t.over_r] {
                push(v);
            }
        }
        s
    }
}

/// Owns the running `X_a^k` accumulators of one run.
#[derive(Debug, Clone)]
pub struct DiagnosticsTracker<T> {
    sqrt_r: Vec<T>,
    inv_r: Vec<T>,
    xn: Vec<XakAccumulator<T>>,
    xw: Vec<XakAccumulator<T>>,
    scratch: Vec<Cplx<T>>,
    scratch_dr: Vec<Cplx<T>>,
}

impl<T: Real> DiagnosticsTracker<T> {
    pub fn new(grid: &RadialGrid<T>, k_max: usize, a_weight: T, amplitude: T) -> Self {
        let mk = || {
            (1..=k_max)
                .map(|k| {
                    XakAccumulator::new(XakWeights::new(
                        k,
                        a_weight,
                        amplitude,
                        grid.outer_radius(),
                    ))
                })
                .collect::<Vec<_>>()
        };
        Self {
            sqrt_r: grid.power(T::lit(0.5)),
            inv_r: grid.power(-T::one()),
            xn: mk(),
            xw: mk(),
            scratch: vec![Cplx::new(T::zero(), T::zero()); grid.len()],
            scratch_dr: vec![Cplx::new(T::zero(), T::zero()); grid.len()],
        }
    }

    pub fn k_max(&self) -> usize {
        self.xn.len()
    }

    fn weighted_norms(&mut self, profile: &[Cplx<T>], grid: &RadialGrid<T>) -> [T; 3] {
        for ((s, &p), &w) in self.scratch.iter_mut().zip(profile).zip(&self.sqrt_r) {
            *s = p * w;
        }
        d_dr_into(&self.scratch, grid, &mut self.scratch_dr);
        [
            profile_norm(&self.scratch, grid, None),
            profile_norm(&self.scratch_dr, grid, None),
            profile_norm(&self.scratch, grid, Some(&self.inv_r)),
        ]
    }

    /// Folds the fields at time `t` into every accumulator.
    pub fn accumulate(
        &mut self,
        t: T,
        n_hat: &ModeField<T>,
        w_hat: &ModeField<T>,
        grid: &RadialGrid<T>,
    ) {
        for k in 1..=self.k_max() {
            let nn = self.weighted_norms(n_hat.mode(k), grid);
            self.xn[k - 1].update_norms(t, nn);
            let nw = self.weighted_norms(w_hat.mode(k), grid);
            self.xw[k - 1].update_norms(t, nw);
        }
    }

    /// Record at time `t`; extrema of the reconstructed fields come from the caller.
    pub fn snapshot(
        &self,
        t: T,
        n_hat: &ModeField<T>,
        w_hat: &ModeField<T>,
        grid: &RadialGrid<T>,
        extrema: (T, T),
        max_u: T,
    ) -> DiagRecord {
        let f = |v: T| v.to_f64_lossy();
        let n0: Vec<T> = n_hat.mode(0).iter().map(|c| c.re).collect();
        let n0_area: Vec<T> = n0.iter().zip(grid.nodes()).map(|(&v, &r)| v * r).collect();
        let mode_norms = |m: &ModeField<T>| {
            (1..=self.k_max())
                .map(|k| f(profile_norm(m.mode(k), grid, Some(&self.sqrt_r))))
                .collect::<Vec<_>>()
        };
        let (n0_norm, w0_norm) = zero_mode_report(n_hat, w_hat, grid);
        let mut rec = DiagRecord {
            t: f(t),
            mass: f(T::TAU() * integrate(&n0, grid)),
            mass_area: f(T::TAU() * integrate(&n0_area, grid)),
            max_n: f(extrema.0),
            min_n: f(extrema.1),
            max_u: f(max_u),
            n_norms: mode_norms(n_hat),
            w_norms: mode_norms(w_hat),
            xn: self.xn.iter().map(|a| a.terms().to_f64()).collect(),
            xw: self.xw.iter().map(|a| a.terms().to_f64()).collect(),
            energy: 0.0,
            n0_norm: f(n0_norm),
            w0_norm: f(w0_norm),
        };
        rec.energy = energy_e(&rec);
        rec
    }

    pub fn to_raw(&self) -> Vec<[f64; 9]> {
        self.xn.iter().chain(&self.xw).map(|a| a.to_raw()).collect()
    }

    pub fn restore_raw(&mut self, raw: &[[f64; 9]]) -> bool {
        if raw.len() != 2 * self.k_max() {
            return false;
        }
        for (acc, r) in self.xn.iter_mut().chain(self.xw.iter_mut()).zip(raw) {
            acc.restore_raw(r);
        }
        true
    }
}
