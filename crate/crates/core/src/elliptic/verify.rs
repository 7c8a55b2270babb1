//! Sampling checks of the elliptic estimates behind the stability argument.
//!
//! Inputs are random Dirichlet sine series; the estimates are evaluated on the
//! `r^{1/2}`-weighted profiles with flat-measure norms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::solvers::{solve_chemo_mode, solve_stream_mode};
use crate::discretization::{build_grid, d2_dr2, d_dr, profile_norm, sup_norm, RadialGrid};
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Relative discretization slack allowed on the explicit-constant inequalities.
pub const SLACK: f64 = 0.05;

const SINE_TERMS: usize = 8;

/// `sum_{m=1}^{8} xi_m sin(m pi (r-1)/(R-1))` with standard normal `xi_m`.
pub fn random_smooth_profile<T: Real, G: Rng>(rng: &mut G, grid: &RadialGrid<T>) -> Vec<T> {
    let xi: Vec<T> = (0..SINE_TERMS)
        .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)))
        .collect();
    let width = grid.outer_radius() - T::one();
    let mut out: Vec<T> = grid
        .nodes()
        .iter()
        .map(|&r| {
            let x = T::PI() * (r - T::one()) / width;
            xi.iter().enumerate().fold(T::zero(), |acc, (m, &c)| {
                acc + c * (T::from_usize_lossy(m + 1) * x).sin()
            })
        })
        .collect();
    let n = out.len();
    out[0] = T::zero();
    out[n - 1] = T::zero();
    out
}

/// One sampled inequality or ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaRow {
    pub check: &'static str,
    pub k: usize,
    pub sample: usize,
    pub ratio: f64,
    /// `lhs / rhs` for inequalities with an explicit constant, `None` otherwise.
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LemmaReport {
    pub rows: Vec<LemmaRow>,
}

impl LemmaReport {
    pub fn extend(&mut self, other: LemmaReport) {
        self.rows.extend(other.rows);
    }

    pub fn max_margin(&self, check: &str) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.check == check)
            .filter_map(|r| r.margin)
            .reduce(f64::max)
    }

    pub fn max_ratio(&self, check: &str) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.check == check)
            .map(|r| r.ratio)
            .reduce(f64::max)
    }

    /// Rows whose margin exceeds `1 + slack` (or is not finite).
    pub fn violations(&self, slack: f64) -> impl Iterator<Item = &LemmaRow> {
        self.rows
            .iter()
            .filter(move |r| r.margin.is_some_and(|m| !(m <= 1.0 + slack)))
    }

    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "check,k,sample,ratio,margin")?;
        for r in &self.rows {
            match r.margin {
                Some(m) => writeln!(
                    out,
                    "{},{},{},{:.17e},{:.17e}",
                    r.check, r.k, r.sample, r.ratio, m
                )?,
                None => writeln!(out, "{},{},{},{:.17e},", r.check, r.k, r.sample, r.ratio)?,
            }
        }
        Ok(())
    }
}

fn to_complex<T: Real>(v: &[T]) -> Vec<Cplx<T>> {
    v.iter().map(|&x| Cplx::new(x, T::zero())).collect()
}

fn weighted<T: Real>(profile: &[Cplx<T>], w: &[T]) -> Vec<Cplx<T>> {
    profile.iter().zip(w).map(|(&c, &s)| c * s).collect()
}

fn need_samples(samples: usize) -> Result<()> {
    if samples == 0 {
        return Err(Error::InsufficientData(
            "at least one sample is required".into(),
        ));
    }
    Ok(())
}

/// Energy inequality and norm ratios of the weighted chemoattractant, nonzero modes.
///
/// Row `chemo_k` carries `sup|c_k| / |n_k|` with margin
/// `(4|c_k'|^2 + 4k^2|c_k/r|^2 + |c_k|^2) / (2|n_k|^2)`; row `chemo_k_second`
/// carries `(|r^2 c_k''| + k^2|c_k| + k|r c_k'|) / |n_k|`.
pub fn verify_lemma_ck<T: Real>(
    samples: usize,
    k_list: &[usize],
    outer_radius: T,
    n_r: usize,
    seed: u64,
) -> Result<LemmaReport> {
    need_samples(samples)?;
    let grid = build_grid(n_r, outer_radius)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = LemmaReport::default();
    for &k in k_list {
        if k == 0 {
            return Err(Error::BadDomain(
                "nonzero-mode check called with k = 0".into(),
            ));
        }
        for sample in 0..samples {
            let n_hat = to_complex(&random_smooth_profile(&mut rng, &grid));
            let (margin, sup_ratio, second_ratio) = chemo_k_quantities(k, &n_hat, &grid)?;
            report.rows.push(LemmaRow {
                check: "chemo_k",
                k,
                sample,
                ratio: sup_ratio,
                margin: Some(margin),
            });
            report.rows.push(LemmaRow {
                check: "chemo_k_second",
                k,
                sample,
                ratio: second_ratio,
                margin: None,
            });
        }
    }
    Ok(report)
}

/// `(margin, sup ratio, second-derivative ratio)` for one density profile.
pub(crate) fn chemo_k_quantities<T: Real>(
    k: usize,
    n_hat: &[Cplx<T>],
    grid: &RadialGrid<T>,
) -> Result<(f64, f64, f64)> {
    let c_hat = solve_chemo_mode(k, n_hat, grid)?;
    let sqrt_r = grid.power(T::lit(0.5));
    let inv_r = grid.power(-T::one());
    let r1 = grid.power(T::one());
    let r2 = grid.power(T::lit(2.0));
    let c = weighted(&c_hat, &sqrt_r);
    let n = weighted(n_hat, &sqrt_r);
    let dc = d_dr(&c, grid);
    let d2c = d2_dr2(&c, grid);
    let kk = T::from_usize_lossy(k);
    let n_norm = profile_norm(&n, grid, None);
    let c_norm = profile_norm(&c, grid, None);
    let dc_norm = profile_norm(&dc, grid, None);
    let c_over_r = profile_norm(&c, grid, Some(&inv_r));
    let lhs = T::lit(4.0) * dc_norm * dc_norm
        + T::lit(4.0) * kk * kk * c_over_r * c_over_r
        + c_norm * c_norm;
    let rhs = T::lit(2.0) * n_norm * n_norm;
    let second = profile_norm(&d2c, grid, Some(&r2))
        + kk * kk * c_norm
        + kk * profile_norm(&dc, grid, Some(&r1));
    Ok((
        (lhs / rhs).to_f64_lossy(),
        (sup_norm(&c, None) / n_norm).to_f64_lossy(),
        (second / n_norm).to_f64_lossy(),
    ))
}

/// Zero-mode chemoattractant: margin
/// `(|r^{1/2} c_0|^2 + 2|r^{1/2} c_0'|^2) / |r^{1/2} n_0|^2` and ratio
/// `(sup|c_0| + sup|c_0'|) / |r^{1/2} n_0|` for non-negative densities.
pub fn verify_lemma_c0<T: Real>(
    samples: usize,
    outer_radius: T,
    n_r: usize,
    seed: u64,
) -> Result<LemmaReport> {
    need_samples(samples)?;
    let grid = build_grid(n_r, outer_radius)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = LemmaReport::default();
    for sample in 0..samples {
        let p = random_smooth_profile(&mut rng, &grid);
        let density: Vec<T> = p.iter().map(|&v| v * v).collect();
        let (margin, ratio) = chemo_0_quantities(&to_complex(&density), &grid)?;
        report.rows.push(LemmaRow {
            check: "chemo_0",
            k: 0,
            sample,
            ratio,
            margin: Some(margin),
        });
    }
    Ok(report)
}

pub(crate) fn chemo_0_quantities<T: Real>(
    n_hat: &[Cplx<T>],
    grid: &RadialGrid<T>,
) -> Result<(f64, f64)> {
    let c_hat = solve_chemo_mode(0, n_hat, grid)?;
    let sqrt_r = grid.power(T::lit(0.5));
    let dc = d_dr(&c_hat, grid);
    let n_norm = profile_norm(n_hat, grid, Some(&sqrt_r));
    if n_norm == T::zero() {
        return Ok((0.0, 0.0));
    }
    let c_norm = profile_norm(&c_hat, grid, Some(&sqrt_r));
    let dc_norm = profile_norm(&dc, grid, Some(&sqrt_r));
    let lhs = c_norm * c_norm + T::lit(2.0) * dc_norm * dc_norm;
    let margin = lhs / (n_norm * n_norm);
    let ratio = (sup_norm(&c_hat, None) + sup_norm(&dc, None)) / n_norm;
    Ok((margin.to_f64_lossy(), ratio.to_f64_lossy()))
}

/// Normalized stream-function ratio
/// `(sup|r^{1/2} phi_k'| + k sup|r^{-1/2} phi_k|) k^{1/2} / |r w_k|` on weighted profiles.
/// Returns `None` for a vanishing vorticity.
pub fn stream_k_ratio<T: Real>(
    k: usize,
    w_hat: &[Cplx<T>],
    grid: &RadialGrid<T>,
) -> Result<Option<f64>> {
    let sqrt_r = grid.power(T::lit(0.5));
    let inv_sqrt_r = grid.power(-T::lit(0.5));
    let r1 = grid.power(T::one());
    let w = weighted(w_hat, &sqrt_r);
    let w_norm = profile_norm(&w, grid, Some(&r1));
    if w_norm == T::zero() {
        return Ok(None);
    }
    let phi = weighted(&solve_stream_mode(k, w_hat, grid)?, &sqrt_r);
    let dphi = d_dr(&phi, grid);
    let kk = T::from_usize_lossy(k);
    let num = sup_norm(&dphi, Some(&sqrt_r)) + kk * sup_norm(&phi, Some(&inv_sqrt_r));
    Ok(Some((num * kk.sqrt() / w_norm).to_f64_lossy()))
}

/// Random-sample sweep of [`stream_k_ratio`]; zero inputs are skipped.
pub fn verify_lemma_phik<T: Real>(
    samples: usize,
    k_list: &[usize],
    outer_radius: T,
    n_r: usize,
    seed: u64,
) -> Result<LemmaReport> {
    need_samples(samples)?;
    let grid = build_grid(n_r, outer_radius)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = LemmaReport::default();
    for &k in k_list {
        if k == 0 {
            return Err(Error::BadDomain(
                "nonzero-mode check called with k = 0".into(),
            ));
        }
        for sample in 0..samples {
            let w_hat = to_complex(&random_smooth_profile(&mut rng, &grid));
            if let Some(ratio) = stream_k_ratio(k, &w_hat, &grid)? {
                report.rows.push(LemmaRow {
                    check: "stream_k",
                    k,
                    sample,
                    ratio,
                    margin: None,
                });
            }
        }
    }
    Ok(report)
}

/// Zero-mode stream function: `sup|phi_0| / |r w_0|` over random vorticities.
pub fn verify_lemma_phi0<T: Real>(
    samples: usize,
    outer_radius: T,
    n_r: usize,
    seed: u64,
) -> Result<LemmaReport> {
    need_samples(samples)?;
    let grid = build_grid(n_r, outer_radius)?;
    let r1 = grid.power(T::one());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = LemmaReport::default();
    for sample in 0..samples {
        let w_hat = to_complex(&random_smooth_profile(&mut rng, &grid));
        let phi = solve_stream_mode(0, &w_hat, &grid)?;
        let ratio = sup_norm(&phi, None) / profile_norm(&w_hat, &grid, Some(&r1));
        report.rows.push(LemmaRow {
            check: "stream_0",
            k: 0,
            sample,
            ratio: ratio.to_f64_lossy(),
            margin: None,
        });
    }
    Ok(report)
}

/// Dependence of the normalized stream-function ratio on `k` for one fixed profile.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiScaling {
    pub ks: Vec<usize>,
    pub ratios: Vec<f64>,
    /// Least-squares slope of `log ratio` against `log k`.
    pub slope: f64,
    /// Largest relative deviation of a ratio from the mean ratio.
    pub spread: f64,
}

impl PhiScaling {
    pub fn for_profile<T: Real>(
        w_hat: &[T],
        k_list: &[usize],
        grid: &RadialGrid<T>,
    ) -> Result<Self> {
        let w = to_complex(w_hat);
        let mut ks = Vec::new();
        let mut ratios = Vec::new();
        for &k in k_list {
            if k == 0 {
                continue;
            }
            if let Some(r) = stream_k_ratio(k, &w, grid)? {
                ks.push(k);
                ratios.push(r);
            }
        }
        if ks.len() < 2 {
            return Err(Error::InsufficientData(
                "scaling needs at least two nonzero modes".into(),
            ));
        }
        let xs: Vec<f64> = ks.iter().map(|&k| (k as f64).ln()).collect();
        let ys: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
        let slope = crate::diagnostics::least_squares_slope(&xs, &ys);
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let spread = ratios
            .iter()
            .map(|r| (r / mean - 1.0).abs())
            .fold(0.0, f64::max);
        Ok(Self {
            ks,
            ratios,
            slope,
            spread,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_profiles_respect_dirichlet() {
        let g = build_grid(33, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p: Vec<f64> = random_smooth_profile(&mut rng, &g);
        assert_eq!(p[0], 0.0);
        assert_eq!(p[32], 0.0);
        assert!(p.iter().any(|v| v.abs() > 1e-3));
    }

    #[test]
    fn chemo_energy_inequality_holds() {
        let rep = verify_lemma_ck(20, &[1, 3, 9], 2.0, 129, 5).unwrap();
        assert_eq!(rep.violations(SLACK).count(), 0);
        assert!(rep.max_margin("chemo_k").unwrap() <= 1.0 + SLACK);
        assert!(rep.max_ratio("chemo_k_second").unwrap().is_finite());
    }

    #[test]
    fn zero_mode_inequality_holds() {
        let rep = verify_lemma_c0(30, 4.0, 129, 2).unwrap();
        assert_eq!(rep.violations(SLACK).count(), 0);
        assert!(rep.max_ratio("chemo_0").unwrap().is_finite());
    }

    #[test]
    fn zero_density_gives_zero_norms() {
        let g = build_grid(33, 2.0).unwrap();
        let z = vec![Cplx::new(0.0, 0.0); 33];
        assert_eq!(chemo_0_quantities(&z, &g).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn zero_vorticity_is_skipped() {
        let g = build_grid(33, 2.0).unwrap();
        let z = vec![Cplx::new(0.0, 0.0); 33];
        assert_eq!(stream_k_ratio(2, &z, &g).unwrap(), None);
    }

    #[test]
    fn samples_must_be_positive() {
        assert!(verify_lemma_ck::<f64>(0, &[1], 2.0, 33, 0).is_err());
        assert!(verify_lemma_c0::<f64>(0, 2.0, 33, 0).is_err());
    }

    #[test]
    fn stream_ratio_stable_under_refinement() {
        let coarse = verify_lemma_phik(10, &[1, 4], 2.0, 129, 9).unwrap();
        let fine = verify_lemma_phik(10, &[1, 4], 2.0, 257, 9).unwrap();
        let a = coarse.max_ratio("stream_k").unwrap();
        let b = fine.max_ratio("stream_k").unwrap();
        assert!((a / b - 1.0).abs() < 0.1, "{a} vs {b}");
    }

    #[test]
    fn csv_has_header() {
        let rep = verify_lemma_c0(2, 2.0, 17, 0).unwrap();
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("check,k,sample,ratio,margin\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
