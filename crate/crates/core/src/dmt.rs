//! Piecewise-linear diversity-multiplexing tradeoff curves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{build_p2_chain, max_independent_paths, RelayTopology};

/// `d(r)` as the linear interpolation of `vertices`, which start at `r = 0`
/// and have strictly increasing `r`. Beyond the last vertex `d = 0`.
///
/// `right_limit_at_zero`, when set, is `lim_{r -> 0+} d(r)` for curves whose
/// value at `r = 0` is an isolated point (the hybrid policy).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmtCurve {
    pub vertices: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_limit_at_zero: Option<f64>,
}

impl DmtCurve {
    pub fn new(vertices: Vec<(f64, f64)>) -> Result<Self> {
        Self::with_right_limit(vertices, None)
    }

    pub fn with_right_limit(vertices: Vec<(f64, f64)>, right_limit_at_zero: Option<f64>) -> Result<Self> {
        let ok = vertices.first().is_some_and(|v| v.0 == 0.0)
            && vertices.windows(2).all(|w| w[1].0 > w[0].0)
            && vertices.iter().all(|v| v.0.is_finite() && v.1.is_finite() && v.1 >= 0.0);
        if !ok {
            return Err(Error::InvalidArgument(
                "curve vertices must start at r = 0 with increasing r and d >= 0".into(),
            ));
        }
        Ok(Self {
            vertices,
            right_limit_at_zero,
        })
    }

    fn from_integer_values(d: impl IntoIterator<Item = f64>) -> Self {
        Self {
            vertices: d.into_iter().enumerate().map(|(r, d)| (r as f64, d)).collect(),
            right_limit_at_zero: None,
        }
    }

    /// Largest `r` with a vertex.
    pub fn max_multiplexing(&self) -> f64 {
        self.vertices.last().map_or(0.0, |v| v.0)
    }

    pub fn eval(&self, r: f64) -> f64 {
        curve_eval(self, r)
    }

    /// `lim_{x -> r+} d(x)`.
    fn eval_right(&self, r: f64) -> f64 {
        if r == 0.0 {
            if let Some(d) = self.right_limit_at_zero {
                return d;
            }
        }
        if r >= self.max_multiplexing() {
            return 0.0;
        }
        curve_eval(self, r)
    }

    /// `(r, d)` at every vertex followed by uniform samples with spacing `step`.
    pub fn samples(&self, step: f64) -> Vec<(f64, f64)> {
        let end = self.max_multiplexing();
        let n = (end / step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| {
                let r = i as f64 * step;
                (r, self.eval(r))
            })
            .collect()
    }
}

/// Linear interpolation between vertices; `0` beyond the last vertex.
pub fn curve_eval(c: &DmtCurve, r: f64) -> f64 {
    let v = &c.vertices;
    if r <= 0.0 {
        return v[0].1;
    }
    if r > c.max_multiplexing() {
        return 0.0;
    }
    let i = v.partition_point(|p| p.0 < r);
    if v[i].0 == r {
        return v[i].1;
    }
    let (r0, mut d0) = v[i - 1];
    if i == 1 {
        d0 = c.right_limit_at_zero.unwrap_or(d0);
    }
    let (r1, d1) = v[i];
    d0 + (d1 - d0) * (r - r0) / (r1 - r0)
}

fn combine(curves: &[DmtCurve], pick: fn(f64, f64) -> f64) -> Result<DmtCurve> {
    let first = curves
        .first()
        .ok_or_else(|| Error::InvalidArgument("no curves to combine".into()))?;
    let mut grid: Vec<f64> = curves.iter().flat_map(|c| c.vertices.iter().map(|v| v.0)).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut pts = grid.clone();
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        for (i, ci) in curves.iter().enumerate() {
            for cj in &curves[i + 1..] {
                let da = ci.eval_right(a) - cj.eval_right(a);
                let db = ci.eval(b) - cj.eval(b);
                if da * db < 0.0 {
                    pts.push(a + (b - a) * da / (da - db));
                }
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let fold = |f: &dyn Fn(&DmtCurve) -> f64| curves[1..].iter().fold(f(first), |acc, c| pick(acc, f(c)));
    let mut vertices = Vec::with_capacity(pts.len());
    for r in pts {
        let d = fold(&|c| c.eval(r));
        vertices.push((r, d));
        if d == 0.0 {
            break;
        }
    }
    let at_zero = vertices[0].1;
    let right = fold(&|c| c.eval_right(0.0));
    let right_limit_at_zero = (right != at_zero && vertices.len() > 1).then_some(right);
    DmtCurve::with_right_limit(vertices, right_limit_at_zero)
}

pub fn pointwise_min(curves: &[DmtCurve]) -> Result<DmtCurve> {
    combine(curves, f64::min)
}

pub fn pointwise_max(curves: &[DmtCurve]) -> Result<DmtCurve> {
    combine(curves, f64::max)
}

/// `(Nt - r)(Nr - r)` for `r = 0..min(Nt, Nr)`.
pub fn dmt_mimo(nt: usize, nr: usize) -> DmtCurve {
    let k = nt.min(nr);
    DmtCurve::from_integer_values((0..=k).map(|r| ((nt - r) * (nr - r)) as f64))
}

/// Cut-set style bound: the pointwise minimum of the per-hop MIMO curves.
pub fn dmt_upper_bound(t: &RelayTopology) -> DmtCurve {
    let hops: Vec<DmtCurve> = t.stage_antennas().windows(2).map(|w| dmt_mimo(w[0], w[1])).collect();
    pointwise_min(&hops).expect("a topology has at least one hop")
}

fn chain_value(m: usize, n_hops: usize, r: usize) -> usize {
    let k = m - r;
    let (a, b) = (k / n_hops, k % n_hops);
    // a (a-1) N + 2 a b is always even.
    k * (k + 1) / 2 + (a * ((a.saturating_sub(1)) * n_hops + 2 * b)) / 2
}

/// DMT of an `N`-hop chain of `m x m` Rayleigh products.
pub fn dmt_chain(m: usize, n_hops: usize) -> Result<DmtCurve> {
    if m == 0 || n_hops == 0 {
        return Err(Error::InvalidArgument("chain needs m >= 1 and at least one hop".into()));
    }
    Ok(DmtCurve::from_integer_values((0..=m).map(|r| chain_value(m, n_hops, r) as f64)))
}

fn mixed_value(sorted: &[usize], r: usize) -> usize {
    let d_min = sorted[0];
    let mut total = 0i64;
    for k in (r + 1)..=d_min {
        let k = k as i64;
        let mut prefix = sorted[0] as i64;
        let mut best = i64::MAX;
        for (n, &beta) in sorted.iter().enumerate().skip(1) {
            prefix += beta as i64;
            best = best.min((prefix - k).div_euclid(n as i64));
        }
        total += 1 - k + best;
    }
    total.max(0) as usize
}

/// DMT of a Rayleigh product chain with stage dimensions `dims`
/// (`dims.len() - 1` hops), for `r = 0..min(dims)`.
pub fn dmt_chain_mixed(dims: &[usize]) -> Result<DmtCurve> {
    if dims.len() < 2 || dims.contains(&0) {
        return Err(Error::InvalidArgument("mixed chain needs >= 2 non-zero stage dimensions".into()));
    }
    let mut sorted = dims.to_vec();
    sorted.sort_unstable();
    Ok(DmtCurve::from_integer_values((0..=sorted[0]).map(|r| mixed_value(&sorted, r) as f64)))
}

/// Achievable DMT of selection among the `kappa` independent paths and the
/// leftover chain, with fixed subset size `m`.
pub fn dmt_jeemas(t: &RelayTopology, m: usize) -> Result<DmtCurve> {
    t.check_subset_size(m)?;
    let kappa = max_independent_paths(t, m)?;
    let chain = dmt_chain(m, t.hops())?;
    let p2 = build_p2_chain(t, m)?.map(|c| dmt_chain_mixed(&c.dims)).transpose()?;
    Ok(DmtCurve::from_integer_values((0..=m).map(|r| {
        let extra = p2.as_ref().map_or(0.0, |c| c.eval(r as f64));
        kappa as f64 * chain.vertices[r].1 + extra
    })))
}

/// Hybrid policy: `m = 1` at `r = 0` and `m = min M_n` for `r > 0`. With
/// `envelope`, the pointwise maximum over every fixed `m` instead.
pub fn dmt_hybrid(t: &RelayTopology, envelope: bool) -> Result<DmtCurve> {
    let m_max = t.min_antennas();
    if envelope {
        let curves = (1..=m_max).map(|m| dmt_jeemas(t, m)).collect::<Result<Vec<_>>>()?;
        return pointwise_max(&curves);
    }
    let at_zero = dmt_jeemas(t, 1)?.vertices[0].1;
    let mut high = dmt_jeemas(t, m_max)?;
    let right = high.vertices[0].1;
    high.vertices[0].1 = at_zero;
    high.right_limit_at_zero = (right != at_zero).then_some(right);
    Ok(high)
}

/// Point-to-point `Mt x Mr` link selecting `Mr` transmit antennas.
pub fn dmt_p2p_selection(mt: usize, mr: usize) -> Result<DmtCurve> {
    if mt < mr {
        return Err(Error::RequiresMtGeMr { mt, mr });
    }
    if mr == 0 {
        return Err(Error::InvalidArgument("Mr must be at least 1".into()));
    }
    let (alpha, beta) = ((mt / mr) as f64, (mt % mr) as f64);
    let mr = mr as f64;
    Ok(DmtCurve::from_integer_values((0..=mr as usize).map(|r| {
        let r = r as f64;
        alpha * (mr - r).powi(2) + ((beta - r) * (mr - r)).max(0.0)
    })))
}

/// Cut-set bound of the compress-and-forward network with source, relay
/// cluster and destination antenna counts `M0, M1, M2`.
pub fn dmt_cf_upper(m0: usize, m1: usize, m2: usize) -> Result<DmtCurve> {
    if m0 == 0 || m2 == 0 {
        return Err(Error::InvalidArgument("source and destination need antennas".into()));
    }
    pointwise_min(&[dmt_mimo(m0, m1 + m2), dmt_mimo(m0 + m1, m2)])
}
