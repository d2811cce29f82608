//! Antenna structure of a multi-hop relay network and the combinatorics of
//! antenna-subset paths.
//!
//! Stage 0 is the source, stage `N` the destination. A path picks one antenna
//! subset per stage; hop `n` of a path uses the channel coefficients
//! `S_n x S_{n+1}` of the `M_{n+1} x M_n` matrix between stages `n` and `n+1`.
//!
//! Two independence notions are provided:
//!
//! * [`Independence::StagewiseDisjoint`]: subsets disjoint at every stage.
//! * [`Independence::HopwiseCoefficientDisjoint`]: at every hop the
//!   coefficient sets `S_n x S_{n+1}` are disjoint, i.e. the two paths never
//!   overlap on two consecutive stages.
//!
//! The path count of [`max_independent_paths`] is achievable only under the
//! second notion (already `M = (1,2,1), m = 1` has two hopwise-disjoint paths
//! and no two stagewise-disjoint ones), so the constructions use it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelayTopology {
    stage_antennas: Vec<usize>,
    relay_split: Option<Vec<Vec<usize>>>,
}

impl RelayTopology {
    /// `stage_antennas` is `M_0..M_N`; at least two stages.
    pub fn new(stage_antennas: Vec<usize>) -> Result<Self> {
        if stage_antennas.len() < 2 {
            return Err(Error::InvalidTopology("need at least a source and a destination".into()));
        }
        if stage_antennas.contains(&0) {
            return Err(Error::InvalidTopology("every stage needs at least one antenna".into()));
        }
        Ok(Self {
            stage_antennas,
            relay_split: None,
        })
    }

    /// Attaches per-stage relay antenna counts `M_{kn}`; each stage's list must
    /// sum to `M_n`.
    pub fn with_relay_split(mut self, split: Vec<Vec<usize>>) -> Result<Self> {
        if split.len() != self.stage_antennas.len() {
            return Err(Error::InvalidTopology("relay split needs one list per stage".into()));
        }
        for (n, (relays, &total)) in split.iter().zip(&self.stage_antennas).enumerate() {
            if relays.contains(&0) || relays.iter().sum::<usize>() != total {
                return Err(Error::InvalidTopology(format!(
                    "relay split of stage {n} does not sum to {total}"
                )));
            }
        }
        self.relay_split = Some(split);
        Ok(self)
    }

    pub fn stage_antennas(&self) -> &[usize] {
        &self.stage_antennas
    }

    pub fn relay_split(&self) -> Option<&[Vec<usize>]> {
        self.relay_split.as_deref()
    }

    /// Number of hops `N`.
    pub fn hops(&self) -> usize {
        self.stage_antennas.len() - 1
    }

    pub fn min_antennas(&self) -> usize {
        *self.stage_antennas.iter().min().expect("non-empty")
    }

    pub fn check_subset_size(&self, m: usize) -> Result<()> {
        let max = self.min_antennas();
        if m == 0 || m > max {
            return Err(Error::InvalidSubsetSize { m, max });
        }
        Ok(())
    }
}

/// Sorted antenna indices (zero-based) of one stage.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AntennaSubset {
    pub stage: usize,
    antennas: Vec<usize>,
}

impl AntennaSubset {
    pub fn new(stage: usize, mut antennas: Vec<usize>, stage_size: usize) -> Result<Self> {
        antennas.sort_unstable();
        antennas.dedup();
        if antennas.is_empty() {
            return Err(Error::InvalidArgument("empty antenna subset".into()));
        }
        if antennas.last().is_some_and(|&a| a >= stage_size) {
            return Err(Error::InvalidArgument(format!(
                "antenna index out of range for stage {stage} with {stage_size} antennas"
            )));
        }
        Ok(Self { stage, antennas })
    }

    fn contiguous(stage: usize, range: std::ops::Range<usize>) -> Self {
        Self {
            stage,
            antennas: range.collect(),
        }
    }

    pub fn antennas(&self) -> &[usize] {
        &self.antennas
    }

    pub fn len(&self) -> usize {
        self.antennas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.antennas.is_empty()
    }

    pub fn intersects(&self, other: &Self) -> bool {
        // Both sorted: merge walk.
        let (mut i, mut j) = (0, 0);
        while i < self.antennas.len() && j < other.antennas.len() {
            match self.antennas[i].cmp(&other.antennas[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }
}

/// One antenna subset per stage, stages `0..=N` in order.
///
/// Selection paths have a uniform subset size `m`; the leftover chain of
/// [`P2Chain::to_path`] alternates sizes `m` and `beta_n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Path {
    subsets: Vec<AntennaSubset>,
}

impl Path {
    /// Uniform-size path; validates stage order, ranges and sizes.
    pub fn new(t: &RelayTopology, subsets: Vec<AntennaSubset>) -> Result<Self> {
        let p = Self::with_sizes(t, subsets)?;
        let m = p.subsets[0].len();
        if p.subsets.iter().any(|s| s.len() != m) {
            return Err(Error::InvalidArgument("path subsets must share one size".into()));
        }
        Ok(p)
    }

    fn with_sizes(t: &RelayTopology, subsets: Vec<AntennaSubset>) -> Result<Self> {
        if subsets.len() != t.stage_antennas().len() {
            return Err(Error::DimensionMismatch(format!(
                "path has {} subsets for {} stages",
                subsets.len(),
                t.stage_antennas().len()
            )));
        }
        for (n, s) in subsets.iter().enumerate() {
            if s.stage != n {
                return Err(Error::InvalidArgument("path subsets out of stage order".into()));
            }
            if s.antennas.last().is_some_and(|&a| a >= t.stage_antennas()[n]) || s.is_empty() {
                return Err(Error::InvalidArgument(format!("bad subset at stage {n}")));
            }
        }
        Ok(Self { subsets })
    }

    /// Builds a path from per-stage index lists.
    pub fn from_indices(t: &RelayTopology, indices: &[Vec<usize>]) -> Result<Self> {
        let subsets = indices
            .iter()
            .enumerate()
            .map(|(n, a)| {
                let size = t.stage_antennas().get(n).copied().unwrap_or(0);
                AntennaSubset::new(n, a.clone(), size)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(t, subsets)
    }

    pub fn subsets(&self) -> &[AntennaSubset] {
        &self.subsets
    }

    pub fn stage(&self, n: usize) -> &AntennaSubset {
        &self.subsets[n]
    }

    pub fn hops(&self) -> usize {
        self.subsets.len() - 1
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .subsets
            .iter()
            .map(|s| {
                let a: Vec<String> = s.antennas.iter().map(|a| (a + 1).to_string()).collect();
                format!("{{{}}}", a.join(","))
            })
            .collect();
        write!(f, "{}", parts.join("-"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Independence {
    StagewiseDisjoint,
    HopwiseCoefficientDisjoint,
}

/// Two paths are stagewise independent when their subsets never share an
/// antenna at any stage.
pub fn stagewise_disjoint(a: &Path, b: &Path) -> bool {
    a.subsets
        .iter()
        .zip(&b.subsets)
        .all(|(x, y)| !x.intersects(y))
}

/// Two paths are hopwise independent when no hop has overlapping coefficient
/// sets, i.e. they never intersect at two consecutive stages.
pub fn hopwise_disjoint(a: &Path, b: &Path) -> bool {
    let meet: Vec<bool> = a
        .subsets
        .iter()
        .zip(&b.subsets)
        .map(|(x, y)| x.intersects(y))
        .collect();
    !meet.windows(2).any(|w| w[0] && w[1])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathFamily {
    pub paths: Vec<Path>,
    pub independence: Independence,
}

impl PathFamily {
    /// True when every pair satisfies the family's independence notion.
    pub fn is_valid(&self) -> bool {
        let check = match self.independence {
            Independence::StagewiseDisjoint => stagewise_disjoint,
            Independence::HopwiseCoefficientDisjoint => hopwise_disjoint,
        };
        self.paths
            .iter()
            .enumerate()
            .all(|(i, a)| self.paths[i + 1..].iter().all(|b| check(a, b)))
    }
}

/// `min_n floor(M_n/m) * floor(M_{n+1}/m)`.
pub fn max_independent_paths(t: &RelayTopology, m: usize) -> Result<usize> {
    t.check_subset_size(m)?;
    Ok(t.stage_antennas()
        .windows(2)
        .map(|w| (w[0] / m) * (w[1] / m))
        .min()
        .expect("at least one hop"))
}

/// Constructs [`max_independent_paths`] hopwise-disjoint paths.
///
/// Stage `n` is cut into `floor(M_n/m)` groups of `m` consecutive antennas
/// (lowest indices first). Path `p` starts in group `p mod G_0`; at each
/// following stage, paths are taken in order of their current group and dealt
/// target groups from one running cyclic counter. Within a current group the
/// dealt groups are distinct, so no (group, group) hop pair repeats, and the
/// counter keeps per-group loads balanced for the next hop.
pub fn build_independent_paths(t: &RelayTopology, m: usize) -> Result<PathFamily> {
    let count = max_independent_paths(t, m)?;
    let groups: Vec<usize> = t.stage_antennas().iter().map(|&mn| mn / m).collect();
    let mut assign: Vec<Vec<usize>> = vec![Vec::with_capacity(groups.len()); count];
    for (p, a) in assign.iter_mut().enumerate() {
        a.push(p % groups[0]);
    }
    for n in 0..t.hops() {
        let mut order: Vec<usize> = (0..count).collect();
        order.sort_by_key(|&p| (assign[p][n], p));
        for (counter, p) in order.into_iter().enumerate() {
            assign[p].push(counter % groups[n + 1]);
        }
    }
    let paths = assign
        .iter()
        .map(|g| {
            let subsets = g
                .iter()
                .enumerate()
                .map(|(n, &grp)| AntennaSubset::contiguous(n, grp * m..(grp + 1) * m))
                .collect();
            Path::new(t, subsets)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PathFamily {
        paths,
        independence: Independence::HopwiseCoefficientDisjoint,
    })
}

/// The leftover chain alternating `m` antennas (even stages) and `beta_n`
/// antennas (odd stages), built from the trailing antennas of each stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct P2Chain {
    pub dims: Vec<usize>,
    pub subsets: Vec<AntennaSubset>,
}

impl P2Chain {
    pub fn to_path(&self, t: &RelayTopology) -> Result<Path> {
        Path::with_sizes(t, self.subsets.clone())
    }
}

/// `beta_n = M_n - floor(M_n/m) m` for every stage.
pub fn leftover_antennas(t: &RelayTopology, m: usize) -> Result<Vec<usize>> {
    t.check_subset_size(m)?;
    Ok(t.stage_antennas().iter().map(|&mn| mn % m).collect())
}

/// The P2 chain, or `None` when some odd stage has no leftover antenna.
pub fn build_p2_chain(t: &RelayTopology, m: usize) -> Result<Option<P2Chain>> {
    let betas = leftover_antennas(t, m)?;
    if betas.iter().skip(1).step_by(2).any(|&b| b == 0) {
        return Ok(None);
    }
    let (dims, subsets) = t
        .stage_antennas()
        .iter()
        .enumerate()
        .map(|(n, &mn)| {
            let d = if n % 2 == 0 { m } else { betas[n] };
            (d, AntennaSubset::contiguous(n, mn - d..mn))
        })
        .unzip();
    Ok(Some(P2Chain { dims, subsets }))
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// All `m`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if m == 0 || m > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        out.push(idx.clone());
        let mut i = m;
        while i > 0 && idx[i - 1] == n - m + (i - 1) {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Number of distinct uniform-size paths, `prod_n C(M_n, m)`.
pub fn path_count(t: &RelayTopology, m: usize) -> u128 {
    t.stage_antennas()
        .iter()
        .fold(1u128, |acc, &mn| acc.saturating_mul(binomial(mn, m)))
}

/// Every subset chain of size `m`, lexicographic in stage order.
pub fn enumerate_paths(t: &RelayTopology, m: usize, cap: usize) -> Result<Vec<Path>> {
    t.check_subset_size(m)?;
    let count = path_count(t, m);
    if count > cap as u128 {
        return Err(Error::TooManyPaths {
            count,
            cap: cap as u128,
        });
    }
    let per_stage: Vec<Vec<AntennaSubset>> = t
        .stage_antennas()
        .iter()
        .enumerate()
        .map(|(n, &mn)| {
            combinations(mn, m)
                .into_iter()
                .map(|a| AntennaSubset { stage: n, antennas: a })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(count as usize);
    let mut odometer = vec![0usize; per_stage.len()];
    loop {
        let subsets = odometer
            .iter()
            .enumerate()
            .map(|(n, &i)| per_stage[n][i].clone())
            .collect();
        out.push(Path { subsets });
        let mut n = per_stage.len();
        loop {
            if n == 0 {
                return Ok(out);
            }
            n -= 1;
            odometer[n] += 1;
            if odometer[n] < per_stage[n].len() {
                break;
            }
            odometer[n] = 0;
        }
    }
}
