mod common;

use common::{oracle_rhs, random_field, relative_gap, rng};
use tcpks::discretization::build_grid;
use tcpks::dynamics::{rhs_nonlinear, State};
use tcpks::elliptic::EllipticSolvers;
use tcpks::{RunMode, SimParams};

fn check(mode: RunMode, dealias: bool, band: usize, seed: u64) -> (f64, f64) {
    let params = SimParams {
        run_mode: mode,
        amplitude: 7.0,
        k_max: 8,
        n_r: 65,
        dealias,
        ..SimParams::default()
    };
    let grid = build_grid(65, 2.0).unwrap();
    let solvers = EllipticSolvers::new(&grid, 8).unwrap();
    let mut r = rng(seed);
    let n = random_field(&mut r, 8, 65, band, 2.0);
    let w = random_field(&mut r, 8, 65, band, 2.0);
    let state = State::new(0.0, n, w, &solvers).unwrap();
    let (dn, dw) = rhs_nonlinear(&state, &params, &grid).unwrap();
    let (on, ow) = oracle_rhs(&state, &params);
    (relative_gap(&dn, &on), relative_gap(&dw, &ow))
}

#[test]
fn full_band_states_match_on_the_alias_free_grid() {
    for seed in 0..10 {
        for mode in [RunMode::TcCoupled, RunMode::PksOnly] {
            let (gn, gw) = check(mode, true, 8, seed);
            assert!(
                gn < 1e-10 && gw < 1e-10,
                "{mode} seed {seed}: {gn:e} {gw:e}"
            );
        }
    }
}

#[test]
fn half_band_states_match_without_dealiasing() {
    for seed in 100..110 {
        let (gn, gw) = check(RunMode::TcCoupled, false, 4, seed);
        assert!(gn < 1e-10 && gw < 1e-10, "seed {seed}: {gn:e} {gw:e}");
    }
}

#[test]
fn truncated_grid_aliases_full_band_products() {
    // on 2K+2 angles the top-mode products fold back, so the two evaluations must differ
    let (gn, _) = check(RunMode::TcCoupled, false, 8, 7);
    assert!(gn > 1e-6, "{gn:e}");
}

#[test]
fn linear_model_matches_zero_oracle() {
    let (gn, gw) = check(RunMode::LinearModel, true, 8, 3);
    assert_eq!(gn + gw, 0.0);
}
