//! Independent reference evaluations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tcpks::dynamics::State;
use tcpks::{ModeField, RunMode, SimParams};

/// Samples `sum_k f_k e^{ik theta}` (Hermitian) times `(ik)^order` at `n` equispaced angles.
fn synth(modes: &[Complex64], order: u32, n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / n as f64;
            let mut v = 0.0;
            for (k, &c) in modes.iter().enumerate() {
                let d = Complex64::new(0.0, k as f64).powu(order);
                let term = c * d * Complex64::from_polar(1.0, k as f64 * theta);
                v += if k == 0 { term.re } else { 2.0 * term.re };
            }
            v
        })
        .collect()
}

fn project(samples: &[f64], k_max: usize) -> Vec<Complex64> {
    let n = samples.len();
    (0..=k_max)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &v) in samples.iter().enumerate() {
                let theta = 2.0 * PI * j as f64 / n as f64;
                acc += v * Complex64::from_polar(1.0, -(k as f64) * theta);
            }
            acc / n as f64
        })
        .collect()
}

/// Real-space field `[i][j]` on radius `i`, angle `j`.
type Grid2 = Vec<Vec<f64>>;

fn physical(f: &ModeField, order: u32, n: usize) -> Grid2 {
    (0..f.n_r())
        .map(|i| {
            let modes: Vec<Complex64> = (0..=f.k_max()).map(|k| f.mode(k)[i]).collect();
            synth(&modes, order, n)
        })
        .collect()
}

/// Centered radial difference on interior rows; zero on the walls.
fn radial_fd(f: &Grid2, h: f64) -> Grid2 {
    let n_r = f.len();
    let n = f[0].len();
    let mut out = vec![vec![0.0; n]; n_r];
    for i in 1..n_r - 1 {
        for j in 0..n {
            out[i][j] = (f[i + 1][j] - f[i - 1][j]) / (2.0 * h);
        }
    }
    out
}

/// Tendencies `(dn, dw)` from pointwise products on a `3K+1`-point angular grid.
pub fn oracle_rhs(
    state: &State<f64>,
    params: &SimParams,
) -> (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) {
    let k_max = state.k_max();
    let n_r = state.n_r();
    let n = 3 * k_max + 1;
    let big_r = params.outer_radius;
    let h = (big_r - 1.0) / (n_r - 1) as f64;
    let r: Vec<f64> = (0..n_r).map(|i| 1.0 + h * i as f64).collect();
    let flow = params.run_mode != RunMode::PksOnly;
    let linear = params.run_mode == RunMode::LinearModel;
    let coef = if flow { 1.0 / params.amplitude } else { 1.0 };

    let nn = physical(state.n_hat(), 0, n);
    let n_t = physical(state.n_hat(), 1, n);
    let n_r_ = radial_fd(&nn, h);
    let cc = physical(state.c_hat(), 0, n);
    let c_t = physical(state.c_hat(), 1, n);
    let c_tt = physical(state.c_hat(), 2, n);
    let c_r = radial_fd(&cc, h);
    let phi = physical(state.phi_hat(), 0, n);
    let phi_t = physical(state.phi_hat(), 1, n);
    let phi_r = radial_fd(&phi, h);
    let ww = physical(state.w_hat(), 0, n);
    let w_t = physical(state.w_hat(), 1, n);
    let w_r = radial_fd(&ww, h);

    let flux: Grid2 = (0..n_r)
        .map(|i| (0..n).map(|j| r[i] * nn[i][j] * c_r[i][j]).collect())
        .collect();
    let flux_r = radial_fd(&flux, h);

    let mut dn = vec![vec![Complex64::new(0.0, 0.0); n_r]; k_max + 1];
    let mut dw = dn.clone();
    if linear {
        return (dn, dw);
    }
    for i in 1..n_r - 1 {
        let ri = r[i];
        let mut vn = vec![0.0; n];
        let mut vw = vec![0.0; n];
        for j in 0..n {
            let chemo =
                flux_r[i][j] / ri + (n_t[i][j] * c_t[i][j] + nn[i][j] * c_tt[i][j]) / (ri * ri);
            let mut v = chemo;
            if flow {
                v += (phi_r[i][j] * n_t[i][j] - phi_t[i][j] * n_r_[i][j]) / ri;
                vw[j] = -coef
                    * ((phi_r[i][j] * w_t[i][j] - phi_t[i][j] * w_r[i][j]) / ri + n_t[i][j] / ri);
            }
            vn[j] = -coef * v;
        }
        let pn = project(&vn, k_max);
        let pw = project(&vw, k_max);
        for k in 0..=k_max {
            dn[k][i] = pn[k];
            dw[k][i] = pw[k];
        }
    }
    (dn, dw)
}

/// Relative sup-norm mismatch between a library field and oracle columns.
pub fn relative_gap(lib: &ModeField, oracle: &[Vec<Complex64>]) -> f64 {
    let mut diff: f64 = 0.0;
    let mut size: f64 = 0.0;
    for (k, col) in oracle.iter().enumerate() {
        for (a, b) in lib.mode(k).iter().zip(col) {
            diff = diff.max((a - b).norm());
            size = size.max(b.norm());
        }
    }
    if size == 0.0 {
        diff
    } else {
        diff / size
    }
}

/// Random Dirichlet field populated on modes `0..=band` (zero mode real).
pub fn random_field(
    rng: &mut ChaCha8Rng,
    k_max: usize,
    n_r: usize,
    band: usize,
    big_r: f64,
) -> ModeField {
    let mut f = ModeField::zeros(k_max, n_r);
    let h = (big_r - 1.0) / (n_r - 1) as f64;
    for k in 0..=band.min(k_max) {
        let coefs: Vec<(f64, f64)> = (0..6)
            .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        for (i, c) in f.mode_mut(k).iter_mut().enumerate() {
            let x = i as f64 * h / (big_r - 1.0);
            let mut v = Complex64::new(0.0, 0.0);
            for (m, &(a, b)) in coefs.iter().enumerate() {
                let s = (PI * (m + 1) as f64 * x).sin() / (m + 1) as f64;
                v += Complex64::new(a * s, if k == 0 { 0.0 } else { b * s });
            }
            *c = v;
        }
    }
    f.clear_boundary();
    f
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
