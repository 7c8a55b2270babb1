use std::collections::BTreeMap;

use log::warn;

use crate::error::{Error, Result};

/// Fraction of samples, counted from the end, used when fitting a decay rate.
pub const DEFAULT_FIT_WINDOW: f64 = 0.6;

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Exponential decay rate `lambda` from a `(t, value)` series: the least-squares
/// slope of `-ln(value)` against `t` over the trailing `window` fraction of samples.
pub fn fit_decay_rate(series: &[(f64, f64)], window: f64) -> Result<f64> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::BadDomain(format!(
            "fit window {window} outside (0, 1]"
        )));
    }
    let start = ((1.0 - window) * series.len() as f64).floor() as usize;
    let tail = &series[start.min(series.len())..];
    if tail.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} samples in the fit window, need at least 2",
            tail.len()
        )));
    }
    if let Some((i, &(_, v))) = tail.iter().enumerate().find(|(_, (_, v))| !(*v > 0.0)) {
        return Err(Error::NonPositiveValues {
            index: start + i,
            value: v,
        });
    }
    let ts: Vec<f64> = tail.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = tail.iter().map(|p| -p.1.ln()).collect();
    Ok(least_squares_slope(&ts, &ys))
}

/// One fitted rate from a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRow {
    pub amplitude: f64,
    pub k: usize,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingExponents {
    /// Slope of `log lambda` against `log A` at `k = k_ref`.
    pub p_a: f64,
    /// Slope of `log lambda` against `log k` at `A = a_ref`.
    pub p_k: f64,
    pub k_ref: usize,
    pub a_ref: f64,
    pub n_a: usize,
    pub n_k: usize,
}

/// Log-log regression of fitted rates against amplitude and wavenumber.
///
/// Duplicate `(A, k)` entries are collapsed (first one kept). Without explicit
/// anchors, `k_ref` is the lower median of wavenumbers that have at least three
/// amplitudes and `a_ref` the upper median of amplitudes that have at least three
/// wavenumbers.
pub fn scaling_exponents(
    rows: &[RateRow],
    k_ref: Option<usize>,
    a_ref: Option<f64>,
) -> Result<ScalingExponents> {
    let mut table: BTreeMap<(u64, usize), f64> = BTreeMap::new();
    for row in rows {
        if !(row.rate > 0.0) || !(row.amplitude > 0.0) || row.k == 0 {
            return Err(Error::InsufficientData(format!(
                "rate row {row:?} cannot enter a log-log fit"
            )));
        }
        let key = (row.amplitude.to_bits(), row.k);
        if table.contains_key(&key) {
            warn!(
                "duplicate sweep entry A={} k={} ignored",
                row.amplitude, row.k
            );
            continue;
        }
        table.insert(key, row.rate);
    }
    let mut by_k: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    let mut by_a: BTreeMap<u64, Vec<(f64, f64)>> = BTreeMap::new();
    for (&(a_bits, k), &rate) in &table {
        let a = f64::from_bits(a_bits);
        by_k.entry(k).or_default().push((a, rate));
        by_a.entry(a_bits).or_default().push((k as f64, rate));
    }
    let k_ref = match k_ref {
        Some(k) => k,
        None => {
            let cands: Vec<usize> = by_k
                .iter()
                .filter(|(_, v)| v.len() >= 3)
                .map(|(&k, _)| k)
                .collect();
            *cands
                .get(cands.len().saturating_sub(1) / 2)
                .ok_or_else(|| {
                    Error::InsufficientData("no wavenumber has three distinct amplitudes".into())
                })?
        }
    };
    let a_ref = match a_ref {
        Some(a) => a,
        None => {
            let mut cands: Vec<f64> = by_a
                .iter()
                .filter(|(_, v)| v.len() >= 3)
                .map(|(&a, _)| f64::from_bits(a))
                .collect();
            cands.sort_by(f64::total_cmp);
            *cands.get(cands.len() / 2).ok_or_else(|| {
                Error::InsufficientData("no amplitude has three distinct wavenumbers".into())
            })?
        }
    };
    let along_a = by_k.get(&k_ref).filter(|v| v.len() >= 3).ok_or_else(|| {
        Error::InsufficientData(format!("fewer than three amplitudes at k = {k_ref}"))
    })?;
    let along_k = by_a
        .get(&a_ref.to_bits())
        .filter(|v| v.len() >= 3)
        .ok_or_else(|| {
            Error::InsufficientData(format!("fewer than three wavenumbers at A = {a_ref}"))
        })?;
    let loglog = |pts: &[(f64, f64)]| {
        let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
        least_squares_slope(&xs, &ys)
    };
    Ok(ScalingExponents {
        p_a: loglog(along_a),
        p_k: loglog(along_k),
        k_ref,
        a_ref,
        n_a: along_a.len(),
        n_k: along_k.len(),
    })
}
