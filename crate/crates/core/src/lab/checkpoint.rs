//! Binary checkpoints.
//!
//! Everything is little-endian. After the magic `APKS` and a `u32` format
//! version come the parameter block, the run block, the evolved fields, the
//! multistep history and the diagnostic accumulators; the README lists the
//! exact byte layout.

use std::fs;
use std::path::Path;

use crate::baseflow::{RunMode, SimParams};
use crate::discretization::ModeField;
use crate::dynamics::{GrowthMonitor, RunOptions, RunSnapshot};
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

pub const MAGIC: &[u8; 4] = b"APKS";
pub const FORMAT_VERSION: u32 = 1;

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn field<T: Real>(&mut self, f: &ModeField<T>) {
        for c in f.coeffs() {
            self.f64(c.re.to_f64_lossy());
            self.f64(c.im.to_f64_lossy());
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Checkpoint(format!("truncated at byte {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }
    fn field<T: Real>(&mut self, k_max: usize, n_r: usize) -> Result<ModeField<T>> {
        let len = (k_max + 1) * n_r;
        let mut coeffs = Vec::with_capacity(len);
        for _ in 0..len {
            let re = self.f64()?;
            let im = self.f64()?;
            coeffs.push(Cplx::new(T::lit(re), T::lit(im)));
        }
        ModeField::from_coeffs(k_max, n_r, coeffs)
    }
}

/// Serializes a snapshot; values are widened to `f64`.
pub fn encode_checkpoint<T: Real>(snap: &RunSnapshot<T>) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MAGIC);
    w.u32(FORMAT_VERSION);

    let p = &snap.params;
    w.f64(p.amplitude);
    w.f64(p.outer_radius);
    w.u32(p.k_max as u32);
    w.u32(p.n_r as u32);
    w.f64(p.dt);
    w.f64(p.t_end);
    w.f64(p.a_weight);
    w.u8(p.run_mode.code());
    w.u8(p.dealias as u8);
    w.f64(p.blowup_threshold);
    w.u64(p.seed);
    w.f64(p.pos_tol);
    w.f64(p.cfl);

    w.f64(snap.options.sample_interval);
    w.u64(snap.options.checkpoint_every);
    w.f64(snap.t.to_f64_lossy());
    w.u64(snap.steps);
    w.f64(snap.dt_prev.map_or(f64::NAN, |d| d.to_f64_lossy()));
    w.f64(snap.initial_max_n.to_f64_lossy());
    w.u64(snap.next_sample);
    w.f64(snap.monitor.last_max);
    w.u32(snap.monitor.streak);
    w.f64(snap.monitor.sup_max_n);

    w.field(&snap.n_hat);
    w.field(&snap.w_hat);
    match &snap.history {
        Some((n, wf)) => {
            w.u8(1);
            w.field(n);
            w.field(wf);
        }
        None => w.u8(0),
    }
    w.u32(snap.accumulators.len() as u32);
    for acc in &snap.accumulators {
        for &v in acc {
            w.f64(v);
        }
    }
    w.0
}

pub fn decode_checkpoint<T: Real>(bytes: &[u8]) -> Result<RunSnapshot<T>> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Checkpoint("missing APKS magic".into()));
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::Checkpoint(format!(
            "format version {version}, expected {FORMAT_VERSION}"
        )));
    }
    let amplitude = r.f64()?;
    let outer_radius = r.f64()?;
    let k_max = r.u32()? as usize;
    let n_r = r.u32()? as usize;
    let dt = r.f64()?;
    let t_end = r.f64()?;
    let a_weight = r.f64()?;
    let mode = r.u8()?;
    let run_mode = RunMode::from_code(mode)
        .ok_or_else(|| Error::Checkpoint(format!("unknown run mode code {mode}")))?;
    let dealias = r.u8()? != 0;
    let params = SimParams {
        amplitude,
        outer_radius,
        k_max,
        n_r,
        dt,
        t_end,
        a_weight,
        run_mode,
        dealias,
        blowup_threshold: r.f64()?,
        seed: r.u64()?,
        pos_tol: r.f64()?,
        cfl: r.f64()?,
    };
    params
        .validate()
        .map_err(|e| Error::Checkpoint(format!("invalid parameters: {e}")))?;

    let options = RunOptions {
        sample_interval: r.f64()?,
        checkpoint_every: r.u64()?,
    };
    let t = T::lit(r.f64()?);
    let steps = r.u64()?;
    let dt_prev = r.f64()?;
    let dt_prev = (!dt_prev.is_nan()).then(|| T::lit(dt_prev));
    let initial_max_n = T::lit(r.f64()?);
    let next_sample = r.u64()?;
    let monitor = GrowthMonitor {
        last_max: r.f64()?,
        streak: r.u32()?,
        sup_max_n: r.f64()?,
    };
    let n_hat = r.field(k_max, n_r)?;
    let w_hat = r.field(k_max, n_r)?;
    let history = match r.u8()? {
        0 => None,
        1 => Some((r.field(k_max, n_r)?, r.field(k_max, n_r)?)),
        other => return Err(Error::Checkpoint(format!("bad history flag {other}"))),
    };
    let count = r.u32()? as usize;
    let mut accumulators = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let mut acc = [0.0; 9];
        for v in &mut acc {
            *v = r.f64()?;
        }
        accumulators.push(acc);
    }
    if r.pos != bytes.len() {
        return Err(Error::Checkpoint(format!(
            "{} trailing bytes",
            bytes.len() - r.pos
        )));
    }
    Ok(RunSnapshot {
        params,
        options,
        t,
        steps,
        dt_prev,
        initial_max_n,
        next_sample,
        monitor,
        n_hat,
        w_hat,
        history,
        accumulators,
    })
}

/// Writes through a temporary file so an interrupted save never leaves a torn checkpoint.
pub fn save_checkpoint<T: Real>(path: &Path, snap: &RunSnapshot<T>) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, encode_checkpoint(snap)).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint<T: Real>(path: &Path) -> Result<RunSnapshot<T>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_checkpoint(&bytes)
}
