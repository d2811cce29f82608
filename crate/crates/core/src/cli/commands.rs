//! The `analytic`, `simulate` and `compare` commands.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{Antennas, CompareConfig, CurveSelector, Kind, Scenario};
use super::files::{
    gnuplot_script, read_curve_file, tradeoff_rows, write_curve_file, write_merged, write_text, CurveFile,
    OutageRow,
};
use super::CliError;
use crate::dmt::{
    dmt_cf_upper, dmt_chain, dmt_hybrid, dmt_jeemas, dmt_mimo, dmt_p2p_selection, dmt_upper_bound, DmtCurve,
};
use crate::montecarlo::{sweep_and_fit, ExponentFit, OutageEstimate};

/// Evaluates the configured curve selector.
pub fn analytic_curve(sc: &Scenario) -> Result<DmtCurve, CliError> {
    let which = sc
        .curve
        .ok_or_else(|| CliError::Config("curve selector is required".into()))?;
    let pair = || match sc.stages() {
        Some(&[a, b]) => Ok((a, b)),
        _ => Err(CliError::Config(format!("{} needs antennas [Nt, Nr]", which.name()))),
    };
    let mismatch = || CliError::Config(format!("curve {} does not apply to this kind", which.name()));
    Ok(match which {
        CurveSelector::Mimo => {
            let (nt, nr) = pair()?;
            dmt_mimo(nt, nr)
        }
        CurveSelector::P2pSelect => {
            let (mt, mr) = pair()?;
            dmt_p2p_selection(mt, mr)?
        }
        CurveSelector::CfUpper => match &sc.antennas {
            Antennas::Cf(a) if sc.kind == Kind::Cf => {
                dmt_cf_upper(a.source, a.relays.iter().sum(), a.destination)?
            }
            _ => return Err(mismatch()),
        },
        _ if sc.kind == Kind::Cf => return Err(mismatch()),
        CurveSelector::Upper => dmt_upper_bound(&sc.topology()?),
        CurveSelector::Chain => dmt_chain(sc.m()?, sc.topology()?.hops())?,
        CurveSelector::Jeemas => dmt_jeemas(&sc.topology()?, sc.m()?)?,
        CurveSelector::Hybrid => dmt_hybrid(&sc.topology()?, sc.strategy.envelope)?,
    })
}

pub fn cmd_analytic(sc: &Scenario, out: &Path) -> Result<DmtCurve, CliError> {
    let curve = analytic_curve(sc)?;
    write_curve_file(out, &CurveFile::Tradeoff(tradeoff_rows(&curve)))?;
    Ok(curve)
}

/// Where the exponent fit of a simulation goes.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".fit.json");
    PathBuf::from(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Simulation {
    pub estimates: Vec<OutageEstimate>,
    pub fit: ExponentFit,
}

/// Runs the configured sweep, writes the CSV and its fit sidecar.
pub fn cmd_simulate(sc: &Scenario, seed: Option<u64>, out: &Path) -> Result<Simulation, CliError> {
    let grid = sc.grid()?;
    let rate = sc.rate_mode()?;
    let trials = sc.trials()?;
    let seed = seed
        .or(sc.seed)
        .ok_or_else(|| CliError::Config("seed is required".into()))?;
    let strategy = sc.strategy()?;
    let (estimates, fit) = sweep_and_fit(&strategy, &grid, rate, trials, seed, sc.fit_window, sc.executor())
        .map_err(|e| match e {
            crate::Error::InvalidArgument(m) => CliError::Config(m),
            e => CliError::Model(e),
        })?;
    let rows: Vec<OutageRow> = estimates.iter().map(OutageRow::from).collect();
    write_curve_file(out, &CurveFile::Outage(rows))?;
    let json = serde_json::to_string_pretty(&fit).map_err(|e| CliError::Config(e.to_string()))?;
    write_text(&sidecar_path(out), &(json + "\n"))?;
    Ok(Simulation { estimates, fit })
}

/// Where the plot script of a comparison goes.
pub fn script_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".gp");
    PathBuf::from(s)
}

/// Merges curve files sharing one x-axis into a long-format CSV at `out`
/// and writes a gnuplot script next to it.
pub fn cmd_compare(cfg: &CompareConfig, base: &Path, out: &Path) -> Result<(), CliError> {
    if cfg.inputs.len() < 2 {
        return Err(CliError::Config("compare needs at least two inputs".into()));
    }
    let mut series = Vec::with_capacity(cfg.inputs.len());
    for input in &cfg.inputs {
        let path = if input.path.is_absolute() {
            input.path.clone()
        } else {
            base.join(&input.path)
        };
        series.push((input.label.clone(), read_curve_file(&path)?));
    }
    let axis = series[0].1.axis();
    if series.iter().any(|s| s.1.axis() != axis) {
        return Err(CliError::Config("inputs mix (r, d) and (snr, p) curves".into()));
    }
    let labels: Vec<String> = series.iter().map(|s| s.0.clone()).collect();
    if (1..labels.len()).any(|i| labels[..i].contains(&labels[i])) {
        return Err(CliError::Config("labels must be distinct".into()));
    }
    write_merged(out, &series)?;
    let data = out
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    write_text(&script_path(out), &gnuplot_script(&data, axis, &labels))
}
