mod common;

use common::{random_field, rng};
use tcpks::dynamics::Stepper;
use tcpks::{ModeField, RunMode, SimParams};

fn evolve(params: &SimParams, dt: f64, n0: &ModeField, w0: &ModeField) -> (ModeField, ModeField) {
    let p = SimParams {
        dt,
        ..params.clone()
    };
    let mut stepper = Stepper::<f64>::new(&p).unwrap();
    let mut state = stepper.prepare(n0.clone(), w0.clone()).unwrap();
    let steps = (p.t_end / dt).round() as usize;
    for _ in 0..steps {
        let rep = stepper.step(&mut state, None).unwrap();
        assert!(
            rep.accepted && rep.dt_used == dt,
            "step limited by stability"
        );
    }
    (state.n_hat().clone(), state.w_hat().clone())
}

fn gap(a: &(ModeField, ModeField), b: &(ModeField, ModeField)) -> f64 {
    let d = |x: &ModeField, y: &ModeField| {
        x.coeffs()
            .iter()
            .zip(y.coeffs())
            .map(|(p, q)| (p - q).norm_sqr())
            .sum::<f64>()
    };
    (d(&a.0, &b.0) + d(&a.1, &b.1)).sqrt()
}

fn observed_order(params: &SimParams, dt: f64, n0: &ModeField, w0: &ModeField) -> f64 {
    let reference = evolve(params, dt / 10.0, n0, w0);
    let coarse = evolve(params, dt, n0, w0);
    let fine = evolve(params, dt / 2.0, n0, w0);
    (gap(&coarse, &reference) / gap(&fine, &reference)).log2()
}

#[test]
fn linear_model_single_mode_is_second_order() {
    let params = SimParams {
        run_mode: RunMode::LinearModel,
        amplitude: 10.0,
        k_max: 4,
        n_r: 33,
        t_end: 1.0,
        ..SimParams::default()
    };
    let mut n0 = ModeField::zeros(4, 33);
    let src = random_field(&mut rng(5), 4, 33, 4, 2.0);
    n0.mode_mut(2).copy_from_slice(src.mode(2));
    let order = observed_order(&params, 0.02, &n0, &ModeField::zeros(4, 33));
    assert!((1.7..=2.3).contains(&order), "order {order}");
}

#[test]
fn coupled_imex_is_second_order() {
    let params = SimParams {
        run_mode: RunMode::TcCoupled,
        amplitude: 2.0,
        k_max: 4,
        n_r: 33,
        t_end: 0.4,
        ..SimParams::default()
    };
    let mut r = rng(9);
    let mut n0 = random_field(&mut r, 4, 33, 3, 2.0);
    n0.scale(3.0);
    let w0 = random_field(&mut r, 4, 33, 3, 2.0);
    let order = observed_order(&params, 0.004, &n0, &w0);
    assert!((1.7..=2.3).contains(&order), "order {order}");
}
