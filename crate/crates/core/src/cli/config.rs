//! JSON run configurations.

use std::path::PathBuf;

use serde::Deserialize;

use super::CliError;
use crate::cf::CfScenario;
use crate::channel::SnrPoint;
use crate::jeemas::{CandidateMode, MPolicy, RateMode, SelectionPolicy, DEFAULT_PATH_CAP};
use crate::montecarlo::{Executor, Strategy};
use crate::topology::RelayTopology;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Multihop,
    Cf,
    P2p,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CfAntennas {
    pub source: usize,
    pub relays: Vec<usize>,
    pub destination: usize,
}

/// Either a stage list `[M_0, ..., M_N]` (`[Nt, Nr]` for p2p) or the
/// compress-and-forward node layout.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum Antennas {
    Stages(Vec<usize>),
    Cf(CfAntennas),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyName {
    #[default]
    Fixed,
    Hybrid,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrategyOptions {
    pub m: Option<usize>,
    pub policy: PolicyName,
    pub candidates: Option<CandidateMode>,
    pub envelope: bool,
    pub selection: bool,
    pub path_cap: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveSelector {
    Mimo,
    Upper,
    Chain,
    Jeemas,
    Hybrid,
    P2pSelect,
    CfUpper,
}

impl CurveSelector {
    pub fn name(&self) -> &'static str {
        match self {
            CurveSelector::Mimo => "mimo",
            CurveSelector::Upper => "upper",
            CurveSelector::Chain => "chain",
            CurveSelector::Jeemas => "jeemas",
            CurveSelector::Hybrid => "hybrid",
            CurveSelector::P2pSelect => "p2p-select",
            CurveSelector::CfUpper => "cf-upper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnrGrid {
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateConfig {
    pub r: Option<f64>,
    pub fixed_bits: Option<f64>,
}

/// One `analytic` or `simulate` run.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: Kind,
    pub antennas: Antennas,
    #[serde(default)]
    pub strategy: StrategyOptions,
    pub curve: Option<CurveSelector>,
    pub snr_grid: Option<SnrGrid>,
    pub rate: Option<RateConfig>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub fit_window: Option<(f64, f64)>,
    pub workers: Option<usize>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let sc: Self = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        sc.validate_shape()?;
        Ok(sc)
    }

    fn validate_shape(&self) -> Result<(), CliError> {
        match (self.kind, &self.antennas) {
            (Kind::Multihop, Antennas::Stages(s)) if s.len() >= 2 => Ok(()),
            (Kind::P2p, Antennas::Stages(s)) if s.len() == 2 => Ok(()),
            (Kind::Cf, Antennas::Cf(_)) => Ok(()),
            (Kind::Multihop, _) => Err(config_err("multihop needs an antenna list with at least 2 stages")),
            (Kind::P2p, _) => Err(config_err("p2p needs antennas [Nt, Nr]")),
            (Kind::Cf, _) => Err(config_err("cf needs antennas {source, relays, destination}")),
        }
    }

    pub fn stages(&self) -> Option<&[usize]> {
        match &self.antennas {
            Antennas::Stages(s) => Some(s),
            Antennas::Cf(_) => None,
        }
    }

    pub fn topology(&self) -> Result<RelayTopology, CliError> {
        let s = self.stages().ok_or_else(|| config_err("a stage list is required"))?;
        Ok(RelayTopology::new(s.to_vec())?)
    }

    pub fn cf_scenario(&self, snr: SnrPoint) -> Result<CfScenario, CliError> {
        match &self.antennas {
            Antennas::Cf(a) => Ok(CfScenario::new(a.source, a.relays.clone(), a.destination, snr)?),
            Antennas::Stages(_) => Err(config_err("cf antennas are required")),
        }
    }

    pub fn m(&self) -> Result<usize, CliError> {
        self.strategy.m.ok_or_else(|| config_err("strategy.m is required"))
    }

    pub fn grid(&self) -> Result<Vec<SnrPoint>, CliError> {
        let g = self.snr_grid.ok_or_else(|| config_err("snr_grid is required"))?;
        SnrPoint::grid_db(g.start_db, g.stop_db, g.step_db).map_err(|e| config_err(e.to_string()))
    }

    pub fn rate_mode(&self) -> Result<RateMode, CliError> {
        let rate = match self.rate {
            Some(RateConfig { r: Some(r), fixed_bits: None }) => RateMode::Scaled { r },
            Some(RateConfig { r: None, fixed_bits: Some(bits) }) => RateMode::Fixed { bits },
            _ => return Err(config_err("rate needs exactly one of r or fixed_bits")),
        };
        rate.validate()?;
        Ok(rate)
    }

    pub fn trials(&self) -> Result<u64, CliError> {
        match self.trials {
            Some(t) if t >= 1 => Ok(t),
            _ => Err(config_err("trials must be at least 1")),
        }
    }

    pub fn executor(&self) -> Executor {
        match self.workers {
            Some(0) | Some(1) => Executor::Sequential,
            Some(w) => Executor::Parallel { workers: w },
            None => Executor::Parallel {
                workers: std::thread::available_parallelism().map_or(1, usize::from),
            },
        }
    }

    pub fn strategy(&self) -> Result<Strategy, CliError> {
        Ok(match self.kind {
            Kind::Multihop => {
                let m_policy = match self.strategy.policy {
                    PolicyName::Fixed => MPolicy::Fixed(self.m()?),
                    PolicyName::Hybrid => MPolicy::Hybrid,
                };
                let mut policy =
                    SelectionPolicy::new(self.strategy.candidates.unwrap_or(CandidateMode::Exhaustive), m_policy);
                policy.path_cap = self.strategy.path_cap.unwrap_or(DEFAULT_PATH_CAP);
                Strategy::Jeemas {
                    topology: self.topology()?,
                    policy,
                }
            }
            Kind::P2p => {
                let s = self.stages().ok_or_else(|| config_err("p2p needs antennas [Nt, Nr]"))?;
                Strategy::PointToPoint {
                    nt: s[0],
                    nr: s[1],
                    selection: self.strategy.selection,
                }
            }
            Kind::Cf => Strategy::Cf {
                scenario: self.cf_scenario(SnrPoint::from_db(0.0))?,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareInput {
    pub path: PathBuf,
    pub label: String,
}

/// Inputs of a `compare` run; relative paths resolve against the config
/// file's directory.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub inputs: Vec<CompareInput>,
}

impl CompareConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let c: Self = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        if c.inputs.len() < 2 {
            return Err(config_err("compare needs at least two inputs"));
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_multihop() {
        let sc = Scenario::from_json(
            r#"{"kind":"multihop","antennas":[2,4,2],"strategy":{"m":2,"policy":"hybrid"},
                "curve":"hybrid","snr_grid":{"start_db":0,"stop_db":10,"step_db":5},
                "rate":{"r":0.5},"trials":10,"seed":3,"fit_window":[0,10]}"#,
        )
        .unwrap();
        assert_eq!(sc.curve, Some(CurveSelector::Hybrid));
        assert_eq!(sc.grid().unwrap().len(), 3);
        assert_eq!(sc.rate_mode().unwrap(), RateMode::Scaled { r: 0.5 });
        assert_eq!(sc.fit_window, Some((0.0, 10.0)));
    }

    #[test]
    fn parses_cf() {
        let sc = Scenario::from_json(
            r#"{"kind":"cf","antennas":{"source":1,"relays":[1,2],"destination":2},"rate":{"fixed_bits":1}}"#,
        )
        .unwrap();
        let cf = sc.cf_scenario(SnrPoint::from_db(0.0)).unwrap();
        assert_eq!(cf.m1(), 3);
        assert_eq!(sc.rate_mode().unwrap(), RateMode::Fixed { bits: 1.0 });
    }

    #[test]
    fn rejects_bad_configs() {
        for bad in [
            r#"{"kind":"multihop","antennas":[2,4,2],"bogus":1}"#,
            r#"{"kind":"multihop","antennas":[2]}"#,
            r#"{"kind":"p2p","antennas":[2,4,2]}"#,
            r#"{"kind":"cf","antennas":[1,1,1]}"#,
            r#"{"kind":"multihop","antennas":[2,2],"curve":"nope"}"#,
            r#"{"kind":"multihop","antennas":[2,2],"strategy":{"mm":1}}"#,
            r#"{"kind":"cf","antennas":{"source":1,"relays":[1],"destination":1,"extra":2}}"#,
        ] {
            assert!(Scenario::from_json(bad).is_err(), "{bad}");
        }
        let sc = Scenario::from_json(r#"{"kind":"p2p","antennas":[1,1],"rate":{"r":1,"fixed_bits":1},"trials":0}"#)
            .unwrap();
        assert!(sc.rate_mode().is_err());
        assert!(sc.trials().is_err());
    }

    #[test]
    fn compare_needs_two_inputs() {
        assert!(CompareConfig::from_json(r#"{"inputs":[{"path":"a.csv","label":"a"}]}"#).is_err());
        let c = CompareConfig::from_json(
            r#"{"inputs":[{"path":"a.csv","label":"a"},{"path":"b.csv","label":"b"}]}"#,
        )
        .unwrap();
        assert_eq!(c.inputs[1].label, "b");
    }
}
