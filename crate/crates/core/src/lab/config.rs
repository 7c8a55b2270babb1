use std::path::PathBuf;
use std::str::FromStr;

use crate::baseflow::{RunMode, SimParams};
use crate::error::{Error, Result};

/// Initial data of a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    /// Mollified Gaussian density bump.
    Gaussian,
    /// No density; only the vorticity perturbation.
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialSpec {
    pub kind: InitialKind,
    pub mass: f64,
    /// Bump center radius; `None` means the mid-gap `(1 + R)/2`.
    pub r0: Option<f64>,
    pub theta0: f64,
    pub sigma: f64,
    /// Amplitude and angular mode of `amp * sin(pi (r-1)/(R-1)) cos(k theta)` added to `w`.
    pub vort_amp: f64,
    pub vort_mode: usize,
    /// Amplitude of a seeded random smooth vorticity on modes `1..=4`.
    pub vort_noise: f64,
}

/// Fully validated configuration of one laboratory invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SimParams,
    pub initial: InitialSpec,
    pub out_dir: PathBuf,
    /// Time between diagnostic samples; `None` means `t_end / 100`.
    pub diag_interval: Option<f64>,
    /// Steps between checkpoints, 0 for none.
    pub checkpoint_every: u64,
    /// Checkpoint to continue from instead of building initial data.
    pub resume: Option<PathBuf>,
    pub sweep_a: Vec<f64>,
    pub sweep_k: Vec<usize>,
    pub sweep_m: Vec<f64>,
    pub fit_window: f64,
    pub samples: usize,
    pub lemma_k: Vec<usize>,
    pub lemma_r: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: SimParams::default(),
            initial: InitialSpec {
                kind: InitialKind::Zero,
                mass: 0.0,
                r0: None,
                theta0: 0.0,
                sigma: 0.1,
                vort_amp: 0.0,
                vort_mode: 1,
                vort_noise: 0.0,
            },
            out_dir: PathBuf::from("out"),
            diag_interval: None,
            checkpoint_every: 0,
            resume: None,
            sweep_a: Vec::new(),
            sweep_k: Vec::new(),
            sweep_m: Vec::new(),
            fit_window: crate::diagnostics::DEFAULT_FIT_WINDOW,
            samples: 200,
            lemma_k: (1..=16).collect(),
            lemma_r: vec![2.0, 4.0],
        }
    }
}

impl RunConfig {
    pub fn sample_interval(&self) -> f64 {
        self.diag_interval.unwrap_or(self.params.t_end / 100.0)
    }

    /// Bump center, defaulting to the mid-gap radius.
    pub fn r0(&self) -> f64 {
        self.initial
            .r0
            .unwrap_or(0.5 * (1.0 + self.params.outer_radius))
    }
}

/// Every recognized key with its documented default.
pub const KEYS: &[(&str, &str)] = &[
    ("A", "1 (required when run_mode=tc-coupled is given)"),
    ("R", "2"),
    ("K_max", "32"),
    ("N_r", "129"),
    ("dt", "1e-3"),
    ("t_end", "1"),
    ("a_weight", "0"),
    ("run_mode", "tc-coupled"),
    ("dealias", "true"),
    ("blowup_threshold", "1e3"),
    ("seed", "0"),
    ("pos_tol", "1e-8"),
    ("cfl", "0.25"),
    ("ic", "gaussian when M is given, otherwise zero"),
    ("M", "required for gaussian initial data"),
    ("r0", "(1+R)/2"),
    ("theta0", "0"),
    ("sigma", "0.1"),
    ("vort_amp", "0"),
    ("vort_mode", "1"),
    ("vort_noise", "0"),
    ("out_dir", "out"),
    ("diag_interval", "t_end/100"),
    ("checkpoint_every", "0"),
    ("resume", "none"),
    ("sweep_A", "empty"),
    ("sweep_k", "empty"),
    ("sweep_M", "empty"),
    ("fit_window", "0.6"),
    ("samples", "200"),
    ("lemma_k", "1,2,...,16"),
    ("lemma_R", "2,4"),
];

struct Line<'a> {
    no: usize,
    key: &'a str,
    value: &'a str,
}

impl Line<'_> {
    fn bad(&self, reason: impl Into<String>) -> Error {
        Error::BadValue {
            line: self.no,
            key: self.key.to_string(),
            reason: reason.into(),
        }
    }

    fn parse<V: FromStr>(&self) -> Result<V> {
        self.value
            .parse()
            .map_err(|_| self.bad(format!("cannot parse `{}`", self.value)))
    }

    fn real(&self) -> Result<f64> {
        let v: f64 = self.parse()?;
        if v.is_nan() {
            return Err(self.bad("NaN is not allowed"));
        }
        Ok(v)
    }

    fn positive(&self) -> Result<f64> {
        let v = self.real()?;
        if !(v > 0.0) || !v.is_finite() {
            return Err(self.bad("must be positive and finite"));
        }
        Ok(v)
    }

    fn non_negative(&self) -> Result<f64> {
        let v = self.real()?;
        if !(v >= 0.0) {
            return Err(self.bad("must be non-negative"));
        }
        Ok(v)
    }

    fn list<V: FromStr>(&self) -> Result<Vec<V>> {
        self.value
            .split(',')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|_| self.bad(format!("cannot parse list item `{s}`")))
            })
            .collect()
    }

    fn boolean(&self) -> Result<bool> {
        match self.value {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            _ => Err(self.bad("expected true or false")),
        }
    }
}

/// Parses `key=value` lines; `#` starts a comment and keys are case-sensitive.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen_a = false;
    let mut seen_m = false;
    let mut explicit_mode = None;
    let mut explicit_ic = None;
    let mut r_line = 0;
    let mut r0_line = None;

    for (idx, raw) in text.lines().enumerate() {
        let no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::BadValue {
                line: no,
                key: content.to_string(),
                reason: "expected key=value".into(),
            });
        };
        let line = Line {
            no,
            key: key.trim(),
            value: value.trim(),
        };
        let p = &mut cfg.params;
        match line.key {
            "A" => {
                p.amplitude = line.positive()?;
                seen_a = true;
            }
            "R" => {
                let v = line.real()?;
                if !(v > 1.0) || !v.is_finite() {
                    return Err(line.bad("R must exceed 1"));
                }
                p.outer_radius = v;
                r_line = no;
            }
            "K_max" => {
                p.k_max = line.parse()?;
                if p.k_max < 1 {
                    return Err(line.bad("K_max must be at least 1"));
                }
            }
            "N_r" => {
                p.n_r = line.parse()?;
                if p.n_r < 3 {
                    return Err(line.bad("N_r must be at least 3"));
                }
            }
            "dt" => p.dt = line.positive()?,
            "t_end" => p.t_end = line.positive()?,
            "a_weight" => p.a_weight = line.non_negative()?,
            "run_mode" => {
                p.run_mode = line.value.parse().map_err(|e: String| line.bad(e))?;
                explicit_mode = Some(p.run_mode);
            }
            "dealias" => p.dealias = line.boolean()?,
            "blowup_threshold" => {
                p.blowup_threshold = line.real()?;
                if !(p.blowup_threshold > 1.0) {
                    return Err(line.bad("must exceed 1"));
                }
            }
            "seed" => p.seed = line.parse()?,
            "pos_tol" => p.pos_tol = line.non_negative()?,
            "cfl" => {
                p.cfl = line.positive()?;
                if p.cfl > 1.0 {
                    return Err(line.bad("cfl must lie in (0, 1]"));
                }
            }
            "ic" => {
                explicit_ic = Some(match line.value {
                    "gaussian" => InitialKind::Gaussian,
                    "zero" => InitialKind::Zero,
                    _ => return Err(line.bad("expected gaussian or zero")),
                })
            }
            "M" => {
                cfg.initial.mass = line.positive()?;
                seen_m = true;
            }
            "r0" => {
                cfg.initial.r0 = Some(line.real()?);
                r0_line = Some(no);
            }
            "theta0" => cfg.initial.theta0 = line.real()?,
            "sigma" => cfg.initial.sigma = line.positive()?,
            "vort_amp" => cfg.initial.vort_amp = line.real()?,
            "vort_mode" => cfg.initial.vort_mode = line.parse()?,
            "vort_noise" => cfg.initial.vort_noise = line.non_negative()?,
            "out_dir" => cfg.out_dir = PathBuf::from(line.value),
            "diag_interval" => cfg.diag_interval = Some(line.positive()?),
            "checkpoint_every" => cfg.checkpoint_every = line.parse()?,
            "resume" => cfg.resume = Some(PathBuf::from(line.value)),
            "sweep_A" => {
                cfg.sweep_a = line.list()?;
                if cfg
                    .sweep_a
                    .iter()
                    .any(|&a: &f64| !(a > 0.0) || !a.is_finite())
                {
                    return Err(line.bad("amplitudes must be positive"));
                }
            }
            "sweep_k" => {
                cfg.sweep_k = line.list()?;
                if cfg.sweep_k.contains(&0) {
                    return Err(line.bad("rate sweeps need k != 0"));
                }
            }
            "sweep_M" => cfg.sweep_m = line.list()?,
            "fit_window" => {
                cfg.fit_window = line.positive()?;
                if cfg.fit_window > 1.0 {
                    return Err(line.bad("fit_window must lie in (0, 1]"));
                }
            }
            "samples" => {
                cfg.samples = line.parse()?;
                if cfg.samples == 0 {
                    return Err(line.bad("samples must be at least 1"));
                }
            }
            "lemma_k" => {
                cfg.lemma_k = line.list()?;
                if cfg.lemma_k.is_empty() || cfg.lemma_k.contains(&0) {
                    return Err(line.bad("need a non-empty list of k >= 1"));
                }
            }
            "lemma_R" => {
                cfg.lemma_r = line.list()?;
                if cfg.lemma_r.is_empty() || cfg.lemma_r.iter().any(|&r: &f64| !(r > 1.0)) {
                    return Err(line.bad("every R must exceed 1"));
                }
            }
            other => {
                return Err(Error::UnknownKey {
                    line: no,
                    key: other.to_string(),
                })
            }
        }
    }

    cfg.initial.kind = explicit_ic.unwrap_or(if seen_m {
        InitialKind::Gaussian
    } else {
        InitialKind::Zero
    });
    if cfg.initial.kind == InitialKind::Gaussian && !seen_m {
        return Err(Error::MissingRequired("M".into()));
    }
    if explicit_mode == Some(RunMode::TcCoupled) && !seen_a {
        return Err(Error::MissingRequired("A".into()));
    }
    if let (Some(r0), Some(no)) = (cfg.initial.r0, r0_line) {
        if !(r0 > 1.0 && r0 < cfg.params.outer_radius) {
            return Err(Error::BadValue {
                line: no,
                key: "r0".into(),
                reason: format!(
                    "center must lie strictly between 1 and R = {}",
                    cfg.params.outer_radius
                ),
            });
        }
    }
    if cfg.params.t_end < cfg.params.dt {
        return Err(Error::BadDomain("t_end must be at least dt".into()));
    }
    if cfg.initial.vort_mode > cfg.params.k_max {
        return Err(Error::BadDomain("vort_mode exceeds K_max".into()));
    }
    let _ = r_line;
    cfg.params.validate()?;
    Ok(cfg)
}
