//! Joint end-to-end multiple antenna selection.
//!
//! The destination evaluates the mutual information of every candidate path
//! and feeds back the index of the best one. Candidates are either every
//! size-`m` subset chain, or the `kappa` independent paths plus the leftover
//! (P2) chain when it exists.

use serde::{Deserialize, Serialize};

use crate::channel::{path_mutual_info, ChannelSet, SnrPoint};
use crate::error::{Error, Result};
use crate::topology::{build_independent_paths, build_p2_chain, enumerate_paths, Path, RelayTopology};

/// Default bound on exhaustive candidate sets.
pub const DEFAULT_PATH_CAP: usize = 100_000;

/// Target rate of an outage event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateMode {
    /// `r * log2(SNR)` bits.
    Scaled { r: f64 },
    /// A constant number of bits, independent of SNR.
    Fixed { bits: f64 },
}

impl RateMode {
    pub fn threshold_bits(&self, s: SnrPoint) -> f64 {
        match *self {
            RateMode::Scaled { r } => r * s.snr_linear.log2(),
            RateMode::Fixed { bits } => bits,
        }
    }

    /// The multiplexing gain the hybrid policy keys on; fixed-rate
    /// measurements sit at `r = 0`.
    pub fn multiplexing_gain(&self) -> f64 {
        match *self {
            RateMode::Scaled { r } => r,
            RateMode::Fixed { .. } => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            RateMode::Scaled { r } => r >= 0.0 && r.is_finite(),
            RateMode::Fixed { bits } => bits >= 0.0 && bits.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument("rate must be finite and non-negative".into()))
        }
    }

    /// Outage iff `mi_bits` does not exceed the target rate.
    #[inline]
    pub fn is_outage(&self, mi_bits: f64, s: SnrPoint) -> bool {
        mi_bits <= self.threshold_bits(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateMode {
    Exhaustive,
    IndependentFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MPolicy {
    Fixed(usize),
    /// `m = 1` at `r = 0`, `m = min_n M_n` for every `r > 0`.
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionPolicy {
    pub candidates: CandidateMode,
    pub m_policy: MPolicy,
    pub path_cap: usize,
}

impl SelectionPolicy {
    pub fn new(candidates: CandidateMode, m_policy: MPolicy) -> Self {
        Self {
            candidates,
            m_policy,
            path_cap: DEFAULT_PATH_CAP,
        }
    }

    pub fn subset_size(&self, t: &RelayTopology, r: f64) -> Result<usize> {
        let m = match self.m_policy {
            MPolicy::Fixed(m) => m,
            MPolicy::Hybrid if r == 0.0 => 1,
            MPolicy::Hybrid => t.min_antennas(),
        };
        t.check_subset_size(m)?;
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub chosen: Path,
    pub mi_bits: f64,
    pub candidate_count: usize,
    pub feedback_bits: f64,
}

/// Candidate paths for one `(topology, policy, r)`, reusable across
/// channel realizations.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub m: usize,
    pub paths: Vec<Path>,
}

impl CandidateSet {
    pub fn build(t: &RelayTopology, pol: &SelectionPolicy, r: f64) -> Result<Self> {
        let m = pol.subset_size(t, r)?;
        let mut paths = match pol.candidates {
            CandidateMode::Exhaustive => enumerate_paths(t, m, pol.path_cap)?,
            CandidateMode::IndependentFamily => {
                let mut p = build_independent_paths(t, m)?.paths;
                if let Some(chain) = build_p2_chain(t, m)? {
                    p.push(chain.to_path(t)?);
                }
                p
            }
        };
        if pol.candidates == CandidateMode::IndependentFamily {
            // Lexicographic order fixes tie-breaking for both modes.
            paths.sort();
        }
        if paths.is_empty() {
            return Err(Error::InvalidArgument("empty candidate set".into()));
        }
        Ok(Self { m, paths })
    }

    pub fn from_paths(paths: Vec<Path>) -> Result<Self> {
        let m = paths
            .first()
            .map(|p| p.stage(0).len())
            .ok_or_else(|| Error::InvalidArgument("empty candidate set".into()))?;
        Ok(Self { m, paths })
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Index and MI of the best candidate; the first maximum wins ties.
    pub fn best(&self, c: &ChannelSet, s: SnrPoint) -> Result<(usize, f64)> {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, p) in self.paths.iter().enumerate() {
            let mi = path_mutual_info(c, p, s)?;
            if mi > best.1 {
                best = (i, mi);
            }
        }
        Ok(best)
    }

    pub fn select(&self, c: &ChannelSet, s: SnrPoint) -> Result<SelectionResult> {
        let (i, mi_bits) = self.best(c, s)?;
        Ok(SelectionResult {
            chosen: self.paths[i].clone(),
            mi_bits,
            candidate_count: self.paths.len(),
            feedback_bits: (self.paths.len() as f64).log2(),
        })
    }
}

/// Picks the candidate path with the largest destination mutual information.
pub fn select_path(
    c: &ChannelSet,
    t: &RelayTopology,
    s: SnrPoint,
    pol: &SelectionPolicy,
    r: f64,
) -> Result<SelectionResult> {
    CandidateSet::build(t, pol, r)?.select(c, s)
}

pub fn outage_indicator(sel: &SelectionResult, s: SnrPoint, rate: RateMode) -> bool {
    rate.is_outage(sel.mi_bits, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sample_channels;
    use crate::numerics::{ComplexMatrix, RngStream};
    use num_complex::Complex64;

    fn topo(m: &[usize]) -> RelayTopology {
        RelayTopology::new(m.to_vec()).unwrap()
    }

    #[test]
    fn single_candidate() {
        let t = topo(&[1, 1, 1]);
        let pol = SelectionPolicy::new(CandidateMode::Exhaustive, MPolicy::Fixed(1));
        let c = sample_channels(&t, &mut RngStream::new(1, 0).rng());
        let sel = select_path(&c, &t, SnrPoint::from_db(10.0), &pol, 0.0).unwrap();
        assert_eq!(sel.candidate_count, 1);
        assert_eq!(sel.feedback_bits, 0.0);
    }

    #[test]
    fn picks_stronger_relay() {
        let t = topo(&[1, 2, 1]);
        let c = ChannelSet {
            hops: vec![
                ComplexMatrix::from_row_major(2, 1, vec![Complex64::new(0.3, 0.0), Complex64::new(0.0, 0.9)])
                    .unwrap(),
                ComplexMatrix::from_row_major(1, 2, vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)])
                    .unwrap(),
            ],
        };
        // |h0 h1| = 0.3 vs 0.45
        let pol = SelectionPolicy::new(CandidateMode::Exhaustive, MPolicy::Fixed(1));
        let sel = select_path(&c, &t, SnrPoint::from_db(10.0), &pol, 0.0).unwrap();
        assert_eq!(sel.chosen.stage(1).antennas(), &[1]);
        assert_eq!(sel.candidate_count, 2);
        assert_eq!(sel.feedback_bits, 1.0);
    }

    #[test]
    fn hybrid_subset_size() {
        let t = topo(&[2, 4, 2]);
        let pol = SelectionPolicy::new(CandidateMode::Exhaustive, MPolicy::Hybrid);
        assert_eq!(pol.subset_size(&t, 0.0).unwrap(), 1);
        assert_eq!(pol.subset_size(&t, 0.01).unwrap(), 2);
        assert_eq!(pol.subset_size(&t, 1.5).unwrap(), 2);
    }

    #[test]
    fn family_counts_include_p2() {
        let pol = SelectionPolicy::new(CandidateMode::IndependentFamily, MPolicy::Fixed(3));
        let set = CandidateSet::build(&topo(&[3, 5, 3]), &pol, 0.0).unwrap();
        assert_eq!(set.len(), 2); // kappa = 1 plus the P2 chain
        let pol = SelectionPolicy::new(CandidateMode::IndependentFamily, MPolicy::Fixed(2));
        assert_eq!(CandidateSet::build(&topo(&[2, 4, 2]), &pol, 0.0).unwrap().len(), 2);
        let pol = SelectionPolicy::new(CandidateMode::IndependentFamily, MPolicy::Fixed(1));
        assert_eq!(CandidateSet::build(&topo(&[2, 4, 2]), &pol, 0.0).unwrap().len(), 8);
    }

    #[test]
    fn exhaustive_cap() {
        let mut pol = SelectionPolicy::new(CandidateMode::Exhaustive, MPolicy::Fixed(2));
        pol.path_cap = 10;
        assert!(matches!(
            CandidateSet::build(&topo(&[4, 4]), &pol, 0.0),
            Err(Error::TooManyPaths { .. })
        ));
    }

    #[test]
    fn exhaustive_dominates_family() {
        let t = topo(&[2, 4, 2]);
        let ex = CandidateSet::build(&t, &SelectionPolicy::new(CandidateMode::Exhaustive, MPolicy::Fixed(2)), 0.0)
            .unwrap();
        let fam = CandidateSet::build(
            &t,
            &SelectionPolicy::new(CandidateMode::IndependentFamily, MPolicy::Fixed(2)),
            0.0,
        )
        .unwrap();
        let s = SnrPoint::from_db(15.0);
        for trial in 0..10_000 {
            let c = sample_channels(&t, &mut RngStream::new(77, trial).rng());
            let a = ex.best(&c, s).unwrap().1;
            let b = fam.best(&c, s).unwrap().1;
            assert!(a >= b - 1e-12);
        }
    }

    #[test]
    fn argmax_dominates_fixed_paths() {
        let t = topo(&[2, 3, 2]);
        let set = CandidateSet::build(&t, &SelectionPolicy::new(CandidateMode::Exhaustive, MPolicy::Fixed(1)), 0.0)
            .unwrap();
        let s = SnrPoint::from_db(5.0);
        for trial in 0..2_000 {
            let c = sample_channels(&t, &mut RngStream::new(8, trial).rng());
            let sel = set.select(&c, s).unwrap();
            let fixed = &set.paths[(trial as usize * 7) % set.len()];
            assert!(sel.mi_bits >= path_mutual_info(&c, fixed, s).unwrap());
        }
    }

    #[test]
    fn outage_modes() {
        let s = SnrPoint::from_db(10.0);
        let sel = SelectionResult {
            chosen: Path::from_indices(&topo(&[1, 1]), &[vec![0], vec![0]]).unwrap(),
            mi_bits: 1.5,
            candidate_count: 1,
            feedback_bits: 0.0,
        };
        assert!(!outage_indicator(&sel, s, RateMode::Scaled { r: 0.0 }));
        assert!(outage_indicator(&sel, s, RateMode::Scaled { r: 0.5 })); // 0.5 log2 10 = 1.66
        assert!(outage_indicator(&sel, s, RateMode::Fixed { bits: 1.5 }));
        assert!(!outage_indicator(&sel, s, RateMode::Fixed { bits: 1.0 }));
    }

    #[test]
    fn fixed_rate_scalar_threshold() {
        // Outage iff |h|^2 < (2^R - 1)/snr for a scalar channel.
        let t = topo(&[1, 1]);
        let set = CandidateSet::build(&t, &SelectionPolicy::new(CandidateMode::Exhaustive, MPolicy::Fixed(1)), 0.0)
            .unwrap();
        let s = SnrPoint::from_db(3.0);
        let rate = RateMode::Fixed { bits: 1.0 };
        for trial in 0..5_000 {
            let c = sample_channels(&t, &mut RngStream::new(4, trial).rng());
            let g = c.hops[0][(0, 0)].norm_sqr();
            let out = rate.is_outage(set.best(&c, s).unwrap().1, s);
            let expect = g < 1.0 / s.snr_linear;
            if (g - 1.0 / s.snr_linear).abs() > 1e-12 {
                assert_eq!(out, expect);
            }
        }
    }
}
