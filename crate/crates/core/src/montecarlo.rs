//! Outage-probability estimation and diversity-exponent fitting.
//!
//! Trial `i` of an estimate always draws from stream `(seed, i)`, and the
//! same seed is reused at every SNR of a sweep, so counts depend only on
//! `(seed, trials)` and not on how the index range is partitioned.

use serde::Serialize;

use crate::cf::{cf_outage_indicator, sample_cf, CfScenario};
use crate::channel::{path_mutual_info, sample_channels, SnrPoint};
use crate::error::{Error, Result};
use crate::jeemas::{CandidateMode, CandidateSet, MPolicy, RateMode, SelectionPolicy};
use crate::numerics::{mutual_info_bits, RngStream};
use crate::topology::{Path, RelayTopology};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959964;
/// Points with fewer outage events are left out of exponent fits.
pub const MIN_FIT_EVENTS: u64 = 50;

#[derive(Debug, Clone)]
pub enum Strategy {
    Jeemas {
        topology: RelayTopology,
        policy: SelectionPolicy,
    },
    FixedPath {
        topology: RelayTopology,
        path: Path,
    },
    /// Full `nr x nt` MIMO link, or the best `nr` of `nt` transmit antennas
    /// when `selection` is set.
    PointToPoint { nt: usize, nr: usize, selection: bool },
    Cf { scenario: CfScenario },
}

/// How the trial range is split. Results are identical for every choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Executor {
    Sequential,
    /// Contiguous chunks, one per worker; run on the rayon pool when the
    /// `parallel` feature is enabled.
    Parallel { workers: usize },
}

impl Executor {
    fn chunks(&self, trials: u64) -> Vec<(u64, u64)> {
        let w = match *self {
            Executor::Sequential => 1,
            Executor::Parallel { workers } => workers.max(1) as u64,
        };
        (0..w).map(|i| (i * trials / w, (i + 1) * trials / w)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageEstimate {
    pub snr: SnrPoint,
    pub trials: u64,
    pub outage_events: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl OutageEstimate {
    pub fn from_counts(snr: SnrPoint, outage_events: u64, trials: u64) -> Result<Self> {
        if trials == 0 || outage_events > trials {
            return Err(Error::InvalidArgument("need 0 <= events <= trials and trials >= 1".into()));
        }
        let p_hat = outage_events as f64 / trials as f64;
        let (lo, hi) = wilson_interval(outage_events, trials, Z95);
        Ok(Self {
            snr,
            trials,
            outage_events,
            p_hat,
            ci_low: lo.min(p_hat),
            ci_high: hi.max(p_hat),
        })
    }

    /// Half-width of the interval divided by the quantile.
    pub fn std_error(&self) -> f64 {
        (self.ci_high - self.ci_low) / (2.0 * Z95)
    }
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentFit {
    /// Fitted slope of `log10 p` against `log10 snr`, i.e. `-d`.
    pub slope: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub points_used: usize,
    pub reliable: bool,
}

impl ExponentFit {
    pub fn diversity(&self) -> f64 {
        -self.slope
    }
}

/// Everything that stays fixed across the trials of one estimate.
enum Prepared {
    Select {
        topology: RelayTopology,
        set: CandidateSet,
    },
    Fixed {
        topology: RelayTopology,
        path: Path,
    },
    Mimo { topology: RelayTopology },
    Cf { scenario: CfScenario },
}

fn prepare(strategy: &Strategy, snr: SnrPoint, rate: RateMode) -> Result<Prepared> {
    let r = rate.multiplexing_gain();
    Ok(match strategy {
        Strategy::Jeemas { topology, policy } => Prepared::Select {
            topology: topology.clone(),
            set: CandidateSet::build(topology, policy, r)?,
        },
        Strategy::FixedPath { topology, path } => {
            if path.hops() != topology.hops() {
                return Err(Error::DimensionMismatch("path does not match topology".into()));
            }
            Prepared::Fixed {
                topology: topology.clone(),
                path: path.clone(),
            }
        }
        Strategy::PointToPoint { nt, nr, selection } => {
            let topology = RelayTopology::new(vec![*nt, *nr])?;
            if *selection {
                if nt < nr {
                    return Err(Error::RequiresMtGeMr { mt: *nt, mr: *nr });
                }
                let policy = SelectionPolicy::new(CandidateMode::Exhaustive, MPolicy::Fixed(*nr));
                let set = CandidateSet::build(&topology, &policy, r)?;
                return Ok(Prepared::Select { topology, set });
            }
            Prepared::Mimo { topology }
        }
        Strategy::Cf { scenario } => Prepared::Cf {
            scenario: scenario.at(snr),
        },
    })
}

impl Prepared {
    fn outage(&self, stream: RngStream, snr: SnrPoint, rate: RateMode) -> Result<bool> {
        let mut rng = stream.rng();
        match self {
            Prepared::Select { topology, set } => {
                let c = sample_channels(topology, &mut rng);
                Ok(rate.is_outage(set.best(&c, snr)?.1, snr))
            }
            Prepared::Fixed { topology, path } => {
                let c = sample_channels(topology, &mut rng);
                Ok(rate.is_outage(path_mutual_info(&c, path, snr)?, snr))
            }
            Prepared::Mimo { topology } => {
                let c = sample_channels(topology, &mut rng);
                Ok(rate.is_outage(mutual_info_bits(snr.snr_linear, &c.hops[0]), snr))
            }
            Prepared::Cf { scenario } => {
                let re = sample_cf(scenario, &mut rng);
                cf_outage_indicator(scenario, &re, rate)
            }
        }
    }
}

fn count_range(p: &Prepared, seed: u64, (lo, hi): (u64, u64), snr: SnrPoint, rate: RateMode) -> Result<u64> {
    let mut events = 0;
    for i in lo..hi {
        events += u64::from(p.outage(RngStream::new(seed, i), snr, rate)?);
    }
    Ok(events)
}

#[cfg(feature = "parallel")]
fn count_chunks(p: &Prepared, seed: u64, chunks: &[(u64, u64)], snr: SnrPoint, rate: RateMode) -> Result<u64> {
    use rayon::prelude::*;
    let counts: Vec<u64> = chunks
        .par_iter()
        .map(|&c| count_range(p, seed, c, snr, rate))
        .collect::<Result<_>>()?;
    Ok(counts.iter().sum())
}

#[cfg(not(feature = "parallel"))]
fn count_chunks(p: &Prepared, seed: u64, chunks: &[(u64, u64)], snr: SnrPoint, rate: RateMode) -> Result<u64> {
    chunks.iter().map(|&c| count_range(p, seed, c, snr, rate)).sum()
}

/// Counts outage events over `trials` independent realizations.
/// Infeasible compress-and-forward draws count as outages; every other
/// error aborts the estimate.
pub fn estimate_outage(
    strategy: &Strategy,
    snr: SnrPoint,
    rate: RateMode,
    trials: u64,
    seed: u64,
    exec: Executor,
) -> Result<OutageEstimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    rate.validate()?;
    let prepared = prepare(strategy, snr, rate)?;
    let events = match exec {
        Executor::Sequential => count_range(&prepared, seed, (0, trials), snr, rate)?,
        Executor::Parallel { .. } => count_chunks(&prepared, seed, &exec.chunks(trials), snr, rate)?,
    };
    OutageEstimate::from_counts(snr, events, trials)
}

/// Weighted least squares of `log10 p_hat` on `log10 snr` over the points
/// inside `window` (dB, inclusive) with at least [`MIN_FIT_EVENTS`] events.
/// Weights are inverse squared relative interval widths.
pub fn fit_exponent(points: &[OutageEstimate], window: Option<(f64, f64)>) -> ExponentFit {
    let used: Vec<(f64, f64, f64)> = points
        .iter()
        .filter(|e| window.is_none_or(|(lo, hi)| e.snr.snr_db >= lo - 1e-9 && e.snr.snr_db <= hi + 1e-9))
        .filter(|e| e.outage_events >= MIN_FIT_EVENTS && e.snr.snr_linear > 0.0)
        .map(|e| {
            let rel = (e.ci_high - e.ci_low) / e.p_hat;
            (e.snr.snr_linear.log10(), e.p_hat.log10(), 1.0 / (rel * rel))
        })
        .collect();
    let n = used.len();
    let nan = ExponentFit {
        slope: f64::NAN,
        stderr: f64::NAN,
        r_squared: f64::NAN,
        points_used: n,
        reliable: false,
    };
    if n < 2 {
        return nan;
    }
    let sw: f64 = used.iter().map(|p| p.2).sum();
    let mx = used.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = used.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = used.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    let sxy: f64 = used.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = used.iter().map(|p| p.2 * (p.1 - my).powi(2)).sum();
    if sxx.is_nan() || sxx <= 0.0 {
        return nan;
    }
    let slope = sxy / sxx;
    let ss_res: f64 = used
        .iter()
        .map(|p| p.2 * (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum();
    let stderr = if n > 2 {
        (ss_res / (n - 2) as f64 / sxx).sqrt()
    } else {
        f64::NAN
    };
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    ExponentFit {
        slope,
        stderr,
        r_squared,
        points_used: n,
        reliable: n >= 3,
    }
}

/// One estimate per grid point followed by an exponent fit over `window`.
pub fn sweep_and_fit(
    strategy: &Strategy,
    grid: &[SnrPoint],
    rate: RateMode,
    trials: u64,
    seed: u64,
    window: Option<(f64, f64)>,
    exec: Executor,
) -> Result<(Vec<OutageEstimate>, ExponentFit)> {
    if grid.is_empty() || grid.windows(2).any(|w| w[1].snr_db <= w[0].snr_db) {
        return Err(Error::InvalidArgument("SNR grid must be nonempty and ascending".into()));
    }
    if let Some((lo, hi)) = window {
        let (first, last) = (grid[0].snr_db, grid[grid.len() - 1].snr_db);
        if lo > hi || lo < first - 1e-9 || hi > last + 1e-9 {
            return Err(Error::InvalidArgument("fit window must lie within the SNR grid".into()));
        }
    }
    let est = grid
        .iter()
        .map(|&s| estimate_outage(strategy, s, rate, trials, seed, exec))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_exponent(&est, window);
    Ok((est, fit))
}
