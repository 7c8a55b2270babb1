use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::checkpoint::{load_checkpoint, save_checkpoint, FORMAT_VERSION};
use super::config::{InitialKind, RunConfig};
use crate::baseflow::RunMode;
use crate::diagnostics::{
    fit_decay_rate, scaling_exponents, DiagRecord, RateRow, ScalingExponents,
};
use crate::discretization::{build_grid, ModeField, RadialGrid};
use crate::dynamics::{
    initial_gaussian, run_linear_model, vorticity_mode, Classification, RunObserver, RunOptions,
    RunRecord, RunSnapshot, Simulation,
};
use crate::elliptic::{
    random_smooth_profile, verify_lemma_c0, verify_lemma_ck, verify_lemma_phi0, verify_lemma_phik,
    LemmaReport, SLACK,
};
use crate::error::{Error, Result};
use crate::scalar::Cplx;

/// Highest mode that receives seeded vorticity noise.
const NOISE_MODES: usize = 4;

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Exit status of `simulate`: 0 bounded, 2 blown up, 3 undecided.
pub fn exit_code(c: Classification) -> i32 {
    match c {
        Classification::Bounded => 0,
        Classification::BlownUp => 2,
        Classification::Undecided => 3,
    }
}

/// Initial `(n, w)` described by the configuration.
pub fn initial_fields(
    cfg: &RunConfig,
    grid: &RadialGrid<f64>,
) -> Result<(ModeField<f64>, ModeField<f64>)> {
    let p = &cfg.params;
    let ic = &cfg.initial;
    let n0 = match ic.kind {
        InitialKind::Gaussian => {
            initial_gaussian(ic.mass, cfg.r0(), ic.theta0, ic.sigma, grid, p.k_max)?
        }
        InitialKind::Zero => ModeField::zeros(p.k_max, grid.len()),
    };
    let mut w0 = ModeField::zeros(p.k_max, grid.len());
    if ic.vort_amp != 0.0 {
        w0 = vorticity_mode(ic.vort_amp, ic.vort_mode, grid, p.k_max)?;
    }
    if ic.vort_noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        for k in 1..=p.k_max.min(NOISE_MODES) {
            let re: Vec<f64> = random_smooth_profile(&mut rng, grid);
            let im: Vec<f64> = random_smooth_profile(&mut rng, grid);
            for ((c, a), b) in w0.mode_mut(k).iter_mut().zip(re).zip(im) {
                *c += Cplx::new(a, b) * ic.vort_noise;
            }
        }
    }
    Ok((n0, w0))
}

struct SeriesSink {
    out: BufWriter<File>,
    path: PathBuf,
    dir: PathBuf,
    checkpoints: Vec<PathBuf>,
}

impl RunObserver<f64> for SeriesSink {
    fn on_sample(&mut self, record: &DiagRecord) -> Result<()> {
        writeln!(self.out, "{}", record.to_csv_row()).map_err(|e| Error::io(&self.path, e))
    }

    fn on_checkpoint(&mut self, snapshot: &RunSnapshot<f64>) -> Result<()> {
        let path = self
            .dir
            .join(format!("checkpoint_{:010}.apks", snapshot.steps));
        save_checkpoint(&path, snapshot)?;
        self.checkpoints.push(path);
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SimulateOutcome {
    pub classification: Classification,
    pub exit_code: i32,
    pub run: RunRecord<f64>,
    pub series_path: PathBuf,
    pub summary_path: PathBuf,
    pub checkpoints: Vec<PathBuf>,
}

/// Per-mode decay rates of the sampled norms; `None` where the fit is impossible.
pub fn mode_rates(records: &[DiagRecord], window: f64, vorticity: bool) -> Vec<Option<f64>> {
    let k_max = records.first().map_or(0, DiagRecord::k_max);
    (0..k_max)
        .map(|j| {
            let series: Vec<(f64, f64)> = records
                .iter()
                .map(|r| {
                    (
                        r.t,
                        if vorticity {
                            r.w_norms[j]
                        } else {
                            r.n_norms[j]
                        },
                    )
                })
                .collect();
            fit_decay_rate(&series, window).ok()
        })
        .collect()
}

fn write_summary(path: &Path, cfg: &RunConfig, run: &RunRecord<f64>) -> Result<()> {
    let mut s = String::new();
    let p = &cfg.params;
    let last = run.records.last();
    let sup = |f: fn(&DiagRecord) -> f64| run.records.iter().map(f).fold(0.0, f64::max);
    let mut line = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
    line("classification", run.classification.to_string());
    line("exit_code", exit_code(run.classification).to_string());
    line("schema_version", FORMAT_VERSION.to_string());
    line("run_mode", p.run_mode.to_string());
    line("A", format!("{:e}", p.amplitude));
    line("R", format!("{}", p.outer_radius));
    line("K_max", p.k_max.to_string());
    line("N_r", p.n_r.to_string());
    line("t_final", format!("{:e}", run.final_state.t()));
    line("steps", run.steps.to_string());
    line("initial_max_n", format!("{:e}", run.initial_max_n));
    line("sup_max_n", format!("{:e}", run.sup_max_n));
    line(
        "sup_max_n_ratio",
        format!("{:e}", run.sup_max_n / run.initial_max_n),
    );
    line(
        "min_n_sampled",
        format!(
            "{:e}",
            run.records
                .iter()
                .map(|r| r.min_n)
                .fold(f64::INFINITY, f64::min)
        ),
    );
    line("sup_max_u", format!("{:e}", sup(|r| r.max_u)));
    line("sup_n0_norm", format!("{:e}", sup(|r| r.n0_norm)));
    line("sup_w0_norm", format!("{:e}", sup(|r| r.w0_norm)));
    if let Some(r) = last {
        line("final_energy", format!("{:e}", r.energy));
        line("final_mass", format!("{:e}", r.mass));
        line("final_mass_area", format!("{:e}", r.mass_area));
    }
    line("note", run.note.clone().unwrap_or_else(|| "none".into()));
    for (name, vort) in [("n", false), ("w", true)] {
        for (j, rate) in mode_rates(&run.records, cfg.fit_window, vort)
            .into_iter()
            .enumerate()
        {
            line(
                &format!("rate_{name}{}", j + 1),
                rate.map_or("n/a".into(), |v| format!("{v:e}")),
            );
        }
    }
    fs::write(path, s).map_err(|e| Error::io(path, e))
}

/// Runs one simulation and writes `series.csv`, `summary.txt` and checkpoints.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<SimulateOutcome> {
    create_dir(&cfg.out_dir)?;
    let sim = match &cfg.resume {
        Some(path) => Simulation::from_snapshot(load_checkpoint(path)?)?,
        None => {
            let grid = build_grid(cfg.params.n_r, cfg.params.outer_radius)?;
            let (n0, w0) = initial_fields(cfg, &grid)?;
            let opts = RunOptions {
                sample_interval: cfg.sample_interval(),
                checkpoint_every: cfg.checkpoint_every,
            };
            Simulation::new(&cfg.params, n0, w0, opts)?
        }
    };
    let series_path = cfg.out_dir.join("series.csv");
    let mut sink = SeriesSink {
        out: create(&series_path)?,
        path: series_path.clone(),
        dir: cfg.out_dir.clone(),
        checkpoints: Vec::new(),
    };
    writeln!(
        sink.out,
        "{}",
        DiagRecord::csv_header(sim.stepper().params().k_max)
    )
    .map_err(|e| Error::io(&series_path, e))?;
    let run = sim.run_to_end(&mut sink)?;
    sink.out.flush().map_err(|e| Error::io(&series_path, e))?;

    let summary_path = cfg.out_dir.join("summary.txt");
    let mut effective = cfg.clone();
    effective.params = run_params(&run, cfg);
    write_summary(&summary_path, &effective, &run)?;
    log::info!("simulation finished: {}", run.classification);
    Ok(SimulateOutcome {
        classification: run.classification,
        exit_code: exit_code(run.classification),
        run,
        series_path,
        summary_path,
        checkpoints: sink.checkpoints,
    })
}

fn run_params(run: &RunRecord<f64>, cfg: &RunConfig) -> crate::baseflow::SimParams {
    let mut p = cfg.params.clone();
    p.k_max = run.final_state.k_max();
    p.n_r = run.final_state.n_r();
    p
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<RateRow>,
    pub exponents: ScalingExponents,
}

fn dedup_warn<V: PartialEq + Copy + std::fmt::Debug>(name: &str, list: &[V]) -> Vec<V> {
    let mut out: Vec<V> = Vec::with_capacity(list.len());
    for &v in list {
        if out.contains(&v) {
            log::warn!("duplicate {name} value {v:?} collapsed");
        } else {
            out.push(v);
        }
    }
    out
}

/// Decay rate of the linear model for one `(A, k)` pair.
pub fn linear_rate(cfg: &RunConfig, amplitude: f64, k: usize) -> Result<f64> {
    let mut p = cfg.params.clone();
    p.amplitude = amplitude;
    p.run_mode = RunMode::LinearModel;
    let grid = build_grid(p.n_r, p.outer_radius)?;
    let width = p.outer_radius - 1.0;
    let h0: Vec<Cplx<f64>> = grid
        .nodes()
        .iter()
        .map(|&r| Cplx::new((std::f64::consts::PI * (r - 1.0) / width).sin(), 0.0))
        .collect();
    let series = run_linear_model(&p, k, &h0)?;
    fit_decay_rate(&series, cfg.fit_window)
}

/// Linear-model rate sweep over the `(A, k)` grid; writes `rates.csv` and `exponents.txt`.
pub fn cmd_sweep(cfg: &RunConfig, workers: Option<usize>) -> Result<SweepOutcome> {
    if cfg.params.run_mode != RunMode::LinearModel {
        log::warn!(
            "rate sweeps always use the linear model; run_mode = {} ignored",
            cfg.params.run_mode
        );
    }
    let amps = dedup_warn("sweep_A", &cfg.sweep_a);
    let ks = dedup_warn("sweep_k", &cfg.sweep_k);
    if amps.is_empty() || ks.is_empty() {
        return Err(Error::InsufficientData(
            "sweep_A and sweep_k must both be non-empty".into(),
        ));
    }
    create_dir(&cfg.out_dir)?;
    let pairs: Vec<(f64, usize)> = amps
        .iter()
        .flat_map(|&a| ks.iter().map(move |&k| (a, k)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::BadDomain(format!("cannot start worker pool: {e}")))?;
    let rates: Vec<Result<f64>> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(a, k)| linear_rate(cfg, a, k))
            .collect()
    });
    let mut rows = Vec::with_capacity(pairs.len());
    for ((amplitude, k), rate) in pairs.into_iter().zip(rates) {
        rows.push(RateRow {
            amplitude,
            k,
            rate: rate?,
        });
    }
    let path = cfg.out_dir.join("rates.csv");
    let mut out = create(&path)?;
    let io = |e| Error::io(&path, e);
    writeln!(out, "A,k,rate").map_err(io)?;
    for r in &rows {
        writeln!(out, "{:.17e},{},{:.17e}", r.amplitude, r.k, r.rate).map_err(io)?;
    }
    out.flush().map_err(io)?;

    let exponents = scaling_exponents(&rows, None, None)?;
    let a_suggested = suggested_weight(&rows, cfg.params.outer_radius);
    let path = cfg.out_dir.join("exponents.txt");
    let text = format!(
        "p_A = {:.17e}\np_k = {:.17e}\nk_ref = {}\nA_ref = {:e}\nn_A = {}\nn_k = {}\na_suggested = {:.17e}\n",
        exponents.p_a, exponents.p_k, exponents.k_ref, exponents.a_ref, exponents.n_a, exponents.n_k, a_suggested
    );
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(SweepOutcome { rows, exponents })
}

/// Half the smallest normalized rate `lambda A^{1/3} k^{-2/3} R^2`: a value of the
/// weight constant `a` that the measured rates support.
pub fn suggested_weight(rows: &[RateRow], outer_radius: f64) -> f64 {
    let min = rows
        .iter()
        .map(|r| {
            r.rate
                * r.amplitude.cbrt()
                * (r.k as f64).powf(-2.0 / 3.0)
                * outer_radius
                * outer_radius
        })
        .fold(f64::INFINITY, f64::min);
    0.5 * min
}

#[derive(Debug, Clone)]
pub struct LemmaOutcome {
    /// One report per configured outer radius.
    pub reports: Vec<(f64, LemmaReport)>,
    pub violations: usize,
    pub exit_code: i32,
}

/// Random-sample checks of the elliptic estimates; writes `lemma_report.csv`.
pub fn cmd_verify_lemmas(cfg: &RunConfig) -> Result<LemmaOutcome> {
    if cfg.samples == 0 {
        return Err(Error::BadValue {
            line: 0,
            key: "samples".into(),
            reason: "samples must be at least 1".into(),
        });
    }
    create_dir(&cfg.out_dir)?;
    let (n, n_r, seed) = (cfg.samples, cfg.params.n_r, cfg.params.seed);
    let mut reports = Vec::new();
    for &big_r in &cfg.lemma_r {
        let mut report = verify_lemma_ck(n, &cfg.lemma_k, big_r, n_r, seed)?;
        report.extend(verify_lemma_c0(n, big_r, n_r, seed.wrapping_add(1))?);
        report.extend(verify_lemma_phik(
            n,
            &cfg.lemma_k,
            big_r,
            n_r,
            seed.wrapping_add(2),
        )?);
        report.extend(verify_lemma_phi0(n, big_r, n_r, seed.wrapping_add(3))?);
        reports.push((big_r, report));
    }
    let path = cfg.out_dir.join("lemma_report.csv");
    let mut out = create(&path)?;
    let io = |e| Error::io(&path, e);
    writeln!(out, "R,check,k,sample,ratio,margin,violation").map_err(io)?;
    let mut violations = 0;
    for (big_r, report) in &reports {
        for row in &report.rows {
            let bad = row.margin.is_some_and(|m| m > 1.0 + SLACK);
            violations += bad as usize;
            writeln!(
                out,
                "{big_r},{},{},{},{:.17e},{},{}",
                row.check,
                row.k,
                row.sample,
                row.ratio,
                row.margin.map_or(String::new(), |m| format!("{m:.17e}")),
                bad as u8
            )
            .map_err(io)?;
        }
    }
    out.flush().map_err(io)?;
    Ok(LemmaOutcome {
        reports,
        violations,
        exit_code: if violations == 0 { 0 } else { 1 },
    })
}

/// Numeric CSV table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

pub fn read_table(path: &Path) -> Result<Table> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Csv(format!("{}: {other:?}", path.display())),
    })?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Csv(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Csv(format!("{}: {e}", path.display())))?;
        let row = rec
            .iter()
            .map(|v| {
                v.trim().parse::<f64>().map_err(|_| {
                    Error::Csv(format!(
                        "{}: row {}: bad number `{v}`",
                        path.display(),
                        i + 1
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}

/// Re-fits per-mode decay rates from an existing `series.csv`; writes `fitted_rates.csv`.
pub fn cmd_fit_rates(series: &Path, out_dir: &Path, window: f64) -> Result<BTreeMap<String, f64>> {
    let table = read_table(series)?;
    let t = table
        .column("t")
        .ok_or_else(|| Error::Csv(format!("{}: no `t` column", series.display())))?;
    let mut rates = BTreeMap::new();
    for name in table.header.iter().filter(|h| is_mode_norm(h)) {
        let values = table.column(name).expect("listed column");
        let pairs: Vec<(f64, f64)> = t.iter().copied().zip(values).collect();
        match fit_decay_rate(&pairs, window) {
            Ok(rate) => {
                rates.insert(name.clone(), rate);
            }
            Err(e) => log::warn!("{name}: {e}"),
        }
    }
    create_dir(out_dir)?;
    let path = out_dir.join("fitted_rates.csv");
    let mut out = create(&path)?;
    let io = |e| Error::io(&path, e);
    writeln!(out, "column,rate").map_err(io)?;
    for (name, rate) in &rates {
        writeln!(out, "{name},{rate:.17e}").map_err(io)?;
    }
    out.flush().map_err(io)?;
    Ok(rates)
}

/// `n{k}_norm` or `w{k}_norm` with `k >= 1`.
fn is_mode_norm(name: &str) -> bool {
    let Some(rest) = name.strip_suffix("_norm") else {
        return false;
    };
    let mut chars = rest.chars();
    matches!(chars.next(), Some('n' | 'w')) && chars.as_str().parse::<usize>().is_ok_and(|k| k >= 1)
}
