use std::fmt;

use super::state::State;
use super::stepper::Stepper;
use crate::baseflow::SimParams;
use crate::diagnostics::{DiagRecord, DiagnosticsTracker};
use crate::discretization::ModeField;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Consecutive sampled increases of `max n` that count as still growing.
const GROWTH_STREAK: u32 = 3;
/// Growth over the initial maximum beyond which a still-growing run is undecided.
const GROWTH_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Time between diagnostic samples; the end time is always sampled too.
    pub sample_interval: f64,
    /// Steps between checkpoints handed to the observer; 0 disables them.
    pub checkpoint_every: u64,
}

impl RunOptions {
    /// One hundred samples over the run, no checkpoints.
    pub fn new(params: &SimParams) -> Self {
        Self {
            sample_interval: params.t_end / 100.0,
            checkpoint_every: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Bounded,
    BlownUp,
    Undecided,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Bounded => "bounded",
            Self::BlownUp => "blown-up",
            Self::Undecided => "undecided",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Running record of the density maximum used for classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthMonitor {
    /// `max n` at the last sample.
    pub last_max: f64,
    /// Number of consecutive samples at which `max n` increased.
    pub streak: u32,
    /// Largest `max n` seen after any step.
    pub sup_max_n: f64,
}

impl GrowthMonitor {
    fn new(initial: f64) -> Self {
        Self {
            last_max: initial,
            streak: 0,
            sup_max_n: initial,
        }
    }

    fn observe_step(&mut self, max_n: f64) {
        self.sup_max_n = self.sup_max_n.max(max_n);
    }

    fn observe_sample(&mut self, max_n: f64) {
        self.streak = if max_n > self.last_max {
            self.streak + 1
        } else {
            0
        };
        self.last_max = max_n;
    }
}

/// Everything needed to continue a run exactly where it stopped.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSnapshot<T> {
    pub params: SimParams,
    pub options: RunOptions,
    pub t: T,
    pub steps: u64,
    pub dt_prev: Option<T>,
    pub initial_max_n: T,
    pub next_sample: u64,
    pub monitor: GrowthMonitor,
    pub n_hat: ModeField<T>,
    pub w_hat: ModeField<T>,
    /// Nonlinear tendencies of the previous step.
    pub history: Option<(ModeField<T>, ModeField<T>)>,
    /// Raw `X_a^k` accumulators, density modes first.
    pub accumulators: Vec<[f64; 9]>,
}

/// Receives samples and checkpoints while a run progresses.
pub trait RunObserver<T: Real> {
    fn on_sample(&mut self, _record: &DiagRecord) -> Result<()> {
        Ok(())
    }

    fn on_checkpoint(&mut self, _snapshot: &RunSnapshot<T>) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoObserver;

impl<T: Real> RunObserver<T> for NoObserver {}

#[derive(Debug, Clone)]
pub struct RunRecord<T> {
    pub records: Vec<DiagRecord>,
    pub final_state: State<T>,
    pub classification: Classification,
    pub initial_max_n: f64,
    pub sup_max_n: f64,
    pub steps: u64,
    /// Why the run stopped early, if it did.
    pub note: Option<String>,
}

/// A run in progress: stepper, state and diagnostics.
#[derive(Debug, Clone)]
pub struct Simulation<T: Real> {
    stepper: Stepper<T>,
    state: State<T>,
    tracker: DiagnosticsTracker<T>,
    options: RunOptions,
    next_sample: u64,
    monitor: GrowthMonitor,
}

fn tracker_for<T: Real>(stepper: &Stepper<T>) -> DiagnosticsTracker<T> {
    let p = stepper.params();
    DiagnosticsTracker::new(
        stepper.grid(),
        p.k_max,
        T::lit(p.a_weight),
        T::lit(p.effective_amplitude()),
    )
}

impl<T: Real> Simulation<T> {
    pub fn new(
        params: &SimParams,
        n0: ModeField<T>,
        w0: ModeField<T>,
        options: RunOptions,
    ) -> Result<Self> {
        if !(options.sample_interval > 0.0) {
            return Err(Error::BadDomain("sample interval must be positive".into()));
        }
        let mut stepper = Stepper::new(params)?;
        let state = stepper.prepare(n0, w0)?;
        let mut tracker = tracker_for(&stepper);
        tracker.accumulate(state.t(), state.n_hat(), state.w_hat(), stepper.grid());
        let initial = stepper.initial_max_n().to_f64_lossy();
        Ok(Self {
            stepper,
            state,
            tracker,
            options,
            next_sample: 0,
            monitor: GrowthMonitor::new(initial),
        })
    }

    pub fn from_snapshot(snap: RunSnapshot<T>) -> Result<Self> {
        let mut stepper = Stepper::new(&snap.params)?;
        let mut state = stepper.prepare(snap.n_hat, snap.w_hat)?;
        state.set_t(snap.t);
        stepper.restore(snap.steps, snap.dt_prev, snap.initial_max_n, snap.history)?;
        let mut tracker = tracker_for(&stepper);
        if !tracker.restore_raw(&snap.accumulators) {
            return Err(Error::Shape(
                "accumulator count does not match k_max".into(),
            ));
        }
        Ok(Self {
            stepper,
            state,
            tracker,
            options: snap.options,
            next_sample: snap.next_sample,
            monitor: snap.monitor,
        })
    }

    pub fn snapshot(&self) -> RunSnapshot<T> {
        RunSnapshot {
            params: self.stepper.params().clone(),
            options: self.options,
            t: self.state.t(),
            steps: self.stepper.steps(),
            dt_prev: self.stepper.dt_prev(),
            initial_max_n: self.stepper.initial_max_n(),
            next_sample: self.next_sample,
            monitor: self.monitor,
            n_hat: self.state.n_hat().clone(),
            w_hat: self.state.w_hat().clone(),
            history: self.stepper.history().cloned(),
            accumulators: self.tracker.to_raw(),
        }
    }

    pub fn state(&self) -> &State<T> {
        &self.state
    }

    pub fn stepper(&self) -> &Stepper<T> {
        &self.stepper
    }

    fn sample_time(&self, j: u64) -> T {
        T::lit(self.options.sample_interval * j as f64)
    }

    fn eps(&self) -> T {
        T::lit(1e-9 * self.options.sample_interval.min(self.stepper.params().dt))
    }

    fn emit(
        &mut self,
        observer: &mut dyn RunObserver<T>,
        records: &mut Vec<DiagRecord>,
    ) -> Result<()> {
        let grid = self.stepper.grid().clone();
        let extrema = self.stepper.extrema(self.state.n_hat())?;
        let max_u = self.stepper.max_velocity(&self.state)?;
        let rec = self.tracker.snapshot(
            self.state.t(),
            self.state.n_hat(),
            self.state.w_hat(),
            &grid,
            extrema,
            max_u,
        );
        self.monitor.observe_sample(rec.max_n);
        observer.on_sample(&rec)?;
        records.push(rec);
        Ok(())
    }

    /// Steps until the end time, blow-up or loss of positivity.
    pub fn run_to_end(mut self, observer: &mut dyn RunObserver<T>) -> Result<RunRecord<T>> {
        let params = self.stepper.params().clone();
        let t_end = T::lit(params.t_end);
        let eps = self.eps();
        let pos_tol = T::lit(params.pos_tol);
        let mut records = Vec::new();
        let mut outcome = None;
        let mut note = None;

        while self.sample_time(self.next_sample) <= self.state.t() + eps {
            self.emit(observer, &mut records)?;
            self.next_sample += 1;
        }
        while self.state.t() < t_end - eps {
            let target = self.sample_time(self.next_sample).min(t_end);
            let limit = target - self.state.t();
            let report = self.stepper.step(&mut self.state, Some(limit))?;
            if !report.accepted {
                outcome = Some(Classification::BlownUp);
                note = Some(if report.blown_up {
                    format!(
                        "stopped at t = {:e}: stable step {:e} or non-finite values",
                        self.state.t().to_f64_lossy(),
                        report.dt_stable.to_f64_lossy()
                    )
                } else {
                    "step rejected".to_string()
                });
                if !report.blown_up {
                    outcome = Some(Classification::Undecided);
                }
                break;
            }
            self.tracker.accumulate(
                self.state.t(),
                self.state.n_hat(),
                self.state.w_hat(),
                self.stepper.grid(),
            );
            self.monitor.observe_step(report.max_n.to_f64_lossy());
            if report.blown_up {
                outcome = Some(Classification::BlownUp);
                note = Some(format!(
                    "max n = {:e} exceeded the threshold at t = {:e}",
                    report.max_n.to_f64_lossy(),
                    self.state.t().to_f64_lossy()
                ));
                self.emit(observer, &mut records)?;
                break;
            }
            if report.min_n < -pos_tol * report.max_n {
                outcome = Some(Classification::Undecided);
                note = Some(format!(
                    "positivity lost at t = {:e}: min n = {:e}, max n = {:e}",
                    self.state.t().to_f64_lossy(),
                    report.min_n.to_f64_lossy(),
                    report.max_n.to_f64_lossy()
                ));
                self.emit(observer, &mut records)?;
                break;
            }
            if self.sample_time(self.next_sample) <= self.state.t() + eps {
                self.emit(observer, &mut records)?;
                self.next_sample += 1;
            }
            let every = self.options.checkpoint_every;
            if every > 0 && self.stepper.steps().is_multiple_of(every) {
                observer.on_checkpoint(&self.snapshot())?;
            }
        }
        if outcome.is_none()
            && self.next_sample > 0
            && self.sample_time(self.next_sample - 1) < self.state.t() - eps
        {
            self.emit(observer, &mut records)?;
        }
        let initial = self.stepper.initial_max_n().to_f64_lossy();
        let classification = outcome.unwrap_or_else(|| {
            let m = self.monitor;
            if m.streak >= GROWTH_STREAK && m.last_max > GROWTH_FACTOR * initial {
                Classification::Undecided
            } else {
                Classification::Bounded
            }
        });
        if note.is_some() {
            log::warn!("{}", note.as_deref().unwrap_or_default());
        }
        Ok(RunRecord {
            records,
            classification,
            initial_max_n: initial,
            sup_max_n: self.monitor.sup_max_n,
            steps: self.stepper.steps(),
            final_state: self.state,
            note,
        })
    }
}

/// Runs from `(n0, w0)` to `params.t_end` with default sampling.
pub fn run<T: Real>(
    params: &SimParams,
    n0: ModeField<T>,
    w0: ModeField<T>,
) -> Result<RunRecord<T>> {
    Simulation::new(params, n0, w0, RunOptions::new(params))?.run_to_end(&mut NoObserver)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseflow::RunMode;
    use crate::discretization::build_grid;
    use crate::dynamics::vorticity_mode;

    fn params() -> SimParams {
        SimParams {
            run_mode: RunMode::TcCoupled,
            amplitude: 50.0,
            k_max: 4,
            n_r: 33,
            dt: 0.01,
            t_end: 2.0,
            ..SimParams::default()
        }
    }

    #[test]
    fn vorticity_without_density_decays() {
        let p = params();
        let g = build_grid(33, 2.0).unwrap();
        let w0 = vorticity_mode(1.0, 2, &g, 4).unwrap();
        let rec = run(&p, ModeField::zeros(4, 33), w0).unwrap();
        assert_eq!(rec.classification, Classification::Bounded);
        assert_eq!(rec.records.len(), 101);
        let first = rec.records[0].w_norms[1];
        let last = rec.records.last().unwrap().w_norms[1];
        assert!(first > 0.0 && last < first);
        assert!((rec.records.last().unwrap().t - 2.0).abs() < 1e-12);
        assert!(rec.records.iter().all(|r| r.max_n == 0.0));
    }

    #[test]
    fn end_time_off_the_sampling_grid_is_sampled() {
        let mut p = params();
        p.t_end = 0.25;
        let opts = RunOptions {
            sample_interval: 0.1,
            checkpoint_every: 0,
        };
        let g = build_grid(33, 2.0).unwrap();
        let w0 = vorticity_mode(1.0, 1, &g, 4).unwrap();
        let rec = Simulation::new(&p, ModeField::zeros(4, 33), w0, opts)
            .unwrap()
            .run_to_end(&mut NoObserver)
            .unwrap();
        let ts: Vec<f64> = rec.records.iter().map(|r| r.t).collect();
        assert_eq!(ts.len(), 4);
        assert!((ts[3] - 0.25).abs() < 1e-12 && (ts[2] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn energy_is_non_decreasing() {
        let p = params();
        let g = build_grid(33, 2.0).unwrap();
        let w0 = vorticity_mode(1.0, 3, &g, 4).unwrap();
        let rec = run(&p, ModeField::zeros(4, 33), w0).unwrap();
        assert!(rec.records.windows(2).all(|w| w[1].energy >= w[0].energy));
    }

    #[test]
    fn growth_monitor_counts_streaks() {
        let mut m = GrowthMonitor::new(1.0);
        for v in [2.0, 3.0, 4.0] {
            m.observe_sample(v);
        }
        assert_eq!(m.streak, 3);
        m.observe_sample(3.5);
        assert_eq!(m.streak, 0);
    }

    #[test]
    fn snapshot_round_trip_preserves_run() {
        let p = params();
        let g = build_grid(33, 2.0).unwrap();
        let w0 = vorticity_mode(1.0, 1, &g, 4).unwrap();
        let sim = Simulation::new(&p, ModeField::zeros(4, 33), w0, RunOptions::new(&p)).unwrap();
        let snap = sim.snapshot();
        let back = Simulation::from_snapshot(snap.clone()).unwrap();
        assert_eq!(back.snapshot(), snap);
    }
}
