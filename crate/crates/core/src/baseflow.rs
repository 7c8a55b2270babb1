//! Run parameters and the Taylor-Couette base flow `U = (A r + B/r) e_theta`.
//!
//! Downstream of this module the two amplitudes are tied, `B = A`, and time is
//! measured in units rescaled by `A`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which equations a run integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunMode {
    /// Full chemotaxis-fluid perturbation system around the base flow.
    TcCoupled,
    /// Classical parabolic-elliptic Keller-Segel: no flow, unit coefficients.
    PksOnly,
    /// Linear part only: diffusion plus shearing by the base flow.
    LinearModel,
}

impl RunMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RunMode::TcCoupled => "tc-coupled",
            RunMode::PksOnly => "pks-only",
            RunMode::LinearModel => "linear-model",
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            RunMode::TcCoupled => 0,
            RunMode::PksOnly => 1,
            RunMode::LinearModel => 2,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(RunMode::TcCoupled),
            1 => Some(RunMode::PksOnly),
            2 => Some(RunMode::LinearModel),
            _ => None,
        }
    }

    /// Whether the base flow amplitude enters the equations.
    pub fn uses_flow(self) -> bool {
        !matches!(self, RunMode::PksOnly)
    }
}

impl fmt::Display for RunMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RunMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "tc-coupled" => Ok(RunMode::TcCoupled),
            "pks-only" => Ok(RunMode::PksOnly),
            "linear-model" => Ok(RunMode::LinearModel),
            other => Err(format!(
                "unknown run mode `{other}` (expected tc-coupled, pks-only or linear-model)"
            )),
        }
    }
}

/// Physical and numerical parameters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    /// Flow amplitude `A`. Ignored in pks-only mode.
    pub amplitude: f64,
    /// Outer radius `R`; the inner radius is 1.
    pub outer_radius: f64,
    /// Highest retained angular wavenumber.
    pub k_max: usize,
    /// Radial node count, endpoints included.
    pub n_r: usize,
    /// Largest allowed time step (rescaled units).
    pub dt: f64,
    pub t_end: f64,
    /// Weight constant `a` of the enhanced-dissipation norms.
    pub a_weight: f64,
    pub run_mode: RunMode,
    pub dealias: bool,
    /// Blow-up is declared once `max n` exceeds this multiple of its initial value.
    pub blowup_threshold: f64,
    pub seed: u64,
    /// Allowed negative undershoot of `n`, relative to the current `max n`.
    pub pos_tol: f64,
    /// Safety factor applied to the explicit stability limit.
    pub cfl: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            outer_radius: 2.0,
            k_max: 32,
            n_r: 129,
            dt: 1e-3,
            t_end: 1.0,
            a_weight: 0.0,
            run_mode: RunMode::TcCoupled,
            dealias: true,
            blowup_threshold: 1e3,
            seed: 0,
            pos_tol: 1e-8,
            cfl: 0.25,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::BadDomain(what.to_string()));
        if !(self.outer_radius > 1.0) || !self.outer_radius.is_finite() {
            return bad("outer radius R must exceed 1");
        }
        if self.run_mode.uses_flow() && !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return bad("amplitude A must be positive");
        }
        if self.n_r < 3 {
            return Err(Error::TooFewPoints(self.n_r));
        }
        if self.k_max < 1 {
            return bad("k_max must be at least 1");
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad("dt must be positive");
        }
        if !(self.t_end >= self.dt) {
            return bad("t_end must be at least dt");
        }
        if !(self.a_weight >= 0.0) {
            return bad("a_weight must be non-negative");
        }
        if !(self.blowup_threshold > 1.0) {
            return bad("blowup_threshold must exceed 1");
        }
        if !(self.pos_tol >= 0.0) {
            return bad("pos_tol must be non-negative");
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad("cfl must lie in (0, 1]");
        }
        Ok(())
    }

    /// Coefficient in front of diffusion and of every nonlinear term: `1/A`, or 1 without flow.
    pub fn inverse_amplitude(&self) -> f64 {
        if self.run_mode.uses_flow() {
            1.0 / self.amplitude
        } else {
            1.0
        }
    }

    /// Amplitude entering the diagnostic weights; pks-only runs use 1.
    pub fn effective_amplitude(&self) -> f64 {
        if self.run_mode.uses_flow() {
            self.amplitude
        } else {
            1.0
        }
    }
}

/// Planar velocity of the Taylor-Couette flow at polar point `(r, theta)`.
pub fn tc_velocity<T: Real>(r: T, theta: T, a: T, b: T) -> Result<(T, T)> {
    if !(r >= T::one()) {
        return Err(Error::BadDomain(format!(
            "radius {r} lies inside the inner cylinder"
        )));
    }
    let speed = a * r + b / r;
    Ok((-theta.sin() * speed, theta.cos() * speed))
}

/// Vorticity of the base flow, uniform in `r`.
pub fn tc_vorticity<T: Real>(a: T) -> T {
    T::lit(2.0) * a
}

/// Shear rate `G = 2A (3 + R^2) / (R^2 - 1)` between cylinders of radii 1 and `R`.
pub fn shear_rate<T: Real>(a: T, outer_radius: T) -> Result<T> {
    if !(outer_radius > T::one()) {
        return Err(Error::BadDomain(format!(
            "outer radius {outer_radius} must exceed 1"
        )));
    }
    let r2 = outer_radius * outer_radius;
    Ok(T::lit(2.0) * a * (T::lit(3.0) + r2) / (r2 - T::one()))
}
