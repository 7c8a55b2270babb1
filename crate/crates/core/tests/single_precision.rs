use tcpks::discretization::{build_grid, ModeField};
use tcpks::dynamics::{initial_gaussian, run, vorticity_mode, Classification};
use tcpks::SimParams;

#[test]
fn f32_run_tracks_f64_run() {
    let params = SimParams {
        amplitude: 50.0,
        k_max: 8,
        n_r: 33,
        dt: 1e-3,
        t_end: 0.02,
        ..SimParams::default()
    };
    let g64 = build_grid::<f64>(33, 2.0).unwrap();
    let g32 = build_grid::<f32>(33, 2.0).unwrap();
    let n64 = initial_gaussian(3.0, 1.5, 0.0, 0.3, &g64, 8).unwrap();
    let n32 = initial_gaussian(3.0f32, 1.5, 0.0, 0.3, &g32, 8).unwrap();
    let w64 = vorticity_mode(0.5, 1, &g64, 8).unwrap();
    let w32 = vorticity_mode(0.5f32, 1, &g32, 8).unwrap();
    let a = run(&params, n64, w64).unwrap();
    let b = run::<f32>(&params, n32, w32).unwrap();
    assert_eq!(a.classification, Classification::Bounded);
    assert_eq!(b.classification, Classification::Bounded);
    assert_eq!(a.records.len(), b.records.len());
    let (ra, rb) = (a.records.last().unwrap(), b.records.last().unwrap());
    assert!((ra.max_n - rb.max_n).abs() < 1e-4 * ra.max_n);
    assert!((ra.mass - rb.mass).abs() < 1e-4 * ra.mass);
    let _: &ModeField<f32> = b.final_state.n_hat();
}
