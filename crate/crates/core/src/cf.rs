//! Distributed compress-and-forward over a two-hop network with `K` relay
//! nodes, a direct source-destination link and inter-relay interference.
//!
//! Relay `k` quantizes its observation as `yhat_k = y_k + n_q`, with
//! `n_q ~ CN(0, N_k I)`, and the destination decodes from
//! `(y, yhat_1..yhat_K)` after recovering every relay codeword.
//!
//! Transmit symbols are stored whitened (unit variance) and the power
//! `P / M_0`, `P / m_k` is carried by the channel gains, so the joint
//! covariance stays non-singular at `P = 0`. Every mutual information is
//! invariant under this rescaling for `P > 0`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::SnrPoint;
use crate::error::{Error, Result};
use crate::jeemas::RateMode;
use crate::numerics::{
    logdet_hermitian, sample_cn_matrix, BlockId, ComplexMatrix, HermitianPsd, JointGaussianCov,
};

/// Largest relay count accepted by [`CfScenario::new`].
pub const MAX_RELAYS: usize = 4;
/// Subset gaps down to this many bits count as satisfied.
pub const GAP_TOLERANCE: f64 = -1e-9;

const DAMPING: f64 = 0.5;
const MAX_FIXED_POINT_ITERS: usize = 200;
const FIXED_POINT_RTOL: f64 = 1e-9;
const INFLATION: f64 = 1.1;
const MAX_INFLATIONS: usize = 500;
/// Solved noise above this marks a relay as effectively disconnected.
pub const DEGENERATE_NHAT: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfScenario {
    pub m0: usize,
    pub relay_antennas: Vec<usize>,
    pub m2: usize,
    pub snr: SnrPoint,
}

impl CfScenario {
    pub fn new(m0: usize, relay_antennas: Vec<usize>, m2: usize, snr: SnrPoint) -> Result<Self> {
        if relay_antennas.is_empty() || relay_antennas.len() > MAX_RELAYS {
            return Err(Error::InvalidTopology(format!(
                "between 1 and {MAX_RELAYS} relays required, got {}",
                relay_antennas.len()
            )));
        }
        if m0 == 0 || m2 == 0 || relay_antennas.contains(&0) {
            return Err(Error::InvalidTopology("every node needs at least one antenna".into()));
        }
        Ok(Self {
            m0,
            relay_antennas,
            m2,
            snr,
        })
    }

    pub fn relays(&self) -> usize {
        self.relay_antennas.len()
    }

    /// `M_1 = sum_k m_k`.
    pub fn m1(&self) -> usize {
        self.relay_antennas.iter().sum()
    }

    pub fn at(&self, snr: SnrPoint) -> Self {
        Self { snr, ..self.clone() }
    }

    fn p(&self) -> f64 {
        self.snr.snr_linear
    }
}

/// One channel draw. `f[k][l]` is the `m_k x m_l` link from relay `l` into
/// relay `k`; diagonal entries are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct CfRealization {
    pub h_sd: ComplexMatrix,
    pub h: Vec<ComplexMatrix>,
    pub g: Vec<ComplexMatrix>,
    pub f: Vec<Vec<Option<ComplexMatrix>>>,
}

impl CfRealization {
    pub fn f(&self, k: usize, l: usize) -> Option<&ComplexMatrix> {
        self.f[k][l].as_ref()
    }
}

/// Per-relay quantization noise variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionNoise {
    pub nhat: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CfRateResult {
    pub rate_bits: f64,
    pub nhat: CompressionNoise,
    pub constraints_ok: bool,
    /// Relay subset (0-based) with the smallest constraint gap.
    pub binding_subset: Option<Vec<usize>>,
}

/// Draws `H_sd`, then `H_k`, `G_k` and `F_kl` in relay order.
pub fn sample_cf<R: Rng + ?Sized>(sc: &CfScenario, rng: &mut R) -> CfRealization {
    let m = &sc.relay_antennas;
    let h_sd = sample_cn_matrix(sc.m2, sc.m0, rng);
    let h = m.iter().map(|&mk| sample_cn_matrix(mk, sc.m0, rng)).collect();
    let g = m.iter().map(|&mk| sample_cn_matrix(sc.m2, mk, rng)).collect();
    let f = (0..m.len())
        .map(|k| {
            (0..m.len())
                .map(|l| (k != l).then(|| sample_cn_matrix(m[k], m[l], rng)))
                .collect()
        })
        .collect();
    CfRealization { h_sd, h, g, f }
}

fn check_shapes(sc: &CfScenario, re: &CfRealization, nz: Option<&CompressionNoise>) -> Result<()> {
    let k = sc.relays();
    let bad = re.h.len() != k
        || re.g.len() != k
        || re.f.len() != k
        || (re.h_sd.rows(), re.h_sd.cols()) != (sc.m2, sc.m0)
        || nz.is_some_and(|n| n.nhat.len() != k || n.nhat.iter().any(|&v| v.is_nan() || v < 0.0));
    if bad {
        return Err(Error::DimensionMismatch("realization does not match scenario".into()));
    }
    Ok(())
}

/// Block layout of [`assemble_cf_covariance`].
#[derive(Debug, Clone, Copy)]
pub struct CfBlocks {
    k: usize,
}

impl CfBlocks {
    pub fn new(relays: usize) -> Self {
        Self { k: relays }
    }
    pub fn x(&self) -> BlockId {
        BlockId(0)
    }
    pub fn xk(&self, k: usize) -> BlockId {
        BlockId(1 + k)
    }
    pub fn y(&self) -> BlockId {
        BlockId(1 + self.k)
    }
    pub fn yk(&self, k: usize) -> BlockId {
        BlockId(2 + self.k + k)
    }
    pub fn yhat(&self, k: usize) -> BlockId {
        BlockId(2 + 2 * self.k + k)
    }
}

/// Joint covariance of `(x, x_1..x_K, y, y_1..y_K, yhat_1..yhat_K)` with
/// unit receiver noise. The `x` blocks are whitened.
pub fn assemble_cf_covariance(
    sc: &CfScenario,
    re: &CfRealization,
    nz: &CompressionNoise,
) -> Result<JointGaussianCov> {
    check_shapes(sc, re, Some(nz))?;
    let m = &sc.relay_antennas;
    let kk = m.len();
    let (m0, m1, m2) = (sc.m0, sc.m1(), sc.m2);
    let p = sc.p();
    let a_src = (p / m0 as f64).sqrt();
    let a_rel: Vec<f64> = m.iter().map(|&mk| (p / mk as f64).sqrt()).collect();
    let mut off = vec![0usize; kk + 1];
    for k in 0..kk {
        off[k + 1] = off[k] + m[k];
    }

    // Sources: [x~ | x~_1..x~_K | n | n_1..n_K | nq_1..nq_K].
    let c_xk = m0;
    let c_n = m0 + m1;
    let c_nk = c_n + m2;
    let c_nq = c_nk + m1;
    // Rows: [x | x_1..x_K | y | y_1..y_K | yhat_1..yhat_K].
    let r_y = m0 + m1;
    let r_yk = r_y + m2;
    let r_yhat = r_yk + m1;
    let dim = r_yhat + m1;
    let mut a = ComplexMatrix::zeros(dim, dim);

    a.set_block(0, 0, &ComplexMatrix::identity(m0));
    a.set_block(m0, c_xk, &ComplexMatrix::identity(m1));

    a.set_block(r_y, 0, &re.h_sd.scale(a_src));
    for k in 0..kk {
        a.set_block(r_y, c_xk + off[k], &re.g[k].scale(a_rel[k]));
    }
    a.set_block(r_y, c_n, &ComplexMatrix::identity(m2));

    for k in 0..kk {
        let mut rows = ComplexMatrix::zeros(m[k], dim);
        rows.set_block(0, 0, &re.h[k].scale(a_src));
        for l in (0..kk).filter(|&l| l != k) {
            let f = re.f(k, l).ok_or_else(|| Error::DimensionMismatch("missing F link".into()))?;
            rows.set_block(0, c_xk + off[l], &f.scale(a_rel[l]));
        }
        rows.set_block(0, c_nk + off[k], &ComplexMatrix::identity(m[k]));
        a.set_block(r_yk + off[k], 0, &rows);
        rows.set_block(0, c_nq + off[k], &ComplexMatrix::identity(m[k]).scale(nz.nhat[k].sqrt()));
        a.set_block(r_yhat + off[k], 0, &rows);
    }

    let names: Vec<String> = std::iter::once("x".to_string())
        .chain((1..=kk).map(|k| format!("x{k}")))
        .chain(std::iter::once("y".to_string()))
        .chain((1..=kk).map(|k| format!("y{k}")))
        .chain((1..=kk).map(|k| format!("yhat{k}")))
        .collect();
    let sizes: Vec<usize> = std::iter::once(m0)
        .chain(m.iter().copied())
        .chain(std::iter::once(m2))
        .chain(m.iter().copied())
        .chain(m.iter().copied())
        .collect();
    let blocks: Vec<(&str, usize)> = names.iter().map(String::as_str).zip(sizes).collect();
    JointGaussianCov::new(&blocks, HermitianPsd::from_trusted(a.gram()))
}

fn ln_det(m: ComplexMatrix) -> Result<f64> {
    logdet_hermitian(&HermitianPsd::from_trusted(m))
}

fn scaled_gram(h: &ComplexMatrix, s: f64) -> ComplexMatrix {
    h.gram().scale(s)
}

fn check_relay(sc: &CfScenario, k: usize) -> Result<()> {
    if k >= sc.relays() {
        return Err(Error::InvalidArgument(format!("relay index {k} out of range")));
    }
    Ok(())
}

// Natural-log versions of the closed forms.

fn ln_ls(sc: &CfScenario, re: &CfRealization, nz: &CompressionNoise) -> Result<f64> {
    let mut parts: Vec<&ComplexMatrix> = vec![&re.h_sd];
    parts.extend(re.h.iter());
    let hs = ComplexMatrix::vstack(&parts)?;
    let mut m = scaled_gram(&hs, sc.p() / sc.m0 as f64);
    let mut i = sc.m2;
    for (k, &mk) in sc.relay_antennas.iter().enumerate() {
        for _ in 0..mk {
            m[(i, i)].re += nz.nhat[k];
            i += 1;
        }
    }
    m.add_diag(1.0);
    ln_det(m)
}

fn ln_ld(sc: &CfScenario, re: &CfRealization) -> Result<f64> {
    let mut m = scaled_gram(&re.h_sd, sc.p() / sc.m0 as f64);
    for (g, &mk) in re.g.iter().zip(&sc.relay_antennas) {
        m.add_assign_scaled(&g.gram(), sc.p() / mk as f64)?;
    }
    m.add_diag(1.0);
    ln_det(m)
}

fn ln_lsd(sc: &CfScenario, re: &CfRealization) -> Result<f64> {
    let mut m = scaled_gram(&re.h_sd, sc.p() / sc.m0 as f64);
    m.add_diag(1.0);
    ln_det(m)
}

fn ln_lskd(sc: &CfScenario, re: &CfRealization, k: usize) -> Result<f64> {
    let mut m = scaled_gram(&re.h_sd, sc.p() / sc.m0 as f64);
    m.add_assign_scaled(&re.g[k].gram(), sc.p() / sc.relay_antennas[k] as f64)?;
    m.add_diag(1.0);
    ln_det(m)
}

fn ln_lsk(sc: &CfScenario, re: &CfRealization, nhat_k: f64, k: usize) -> Result<f64> {
    let mut m = scaled_gram(&re.h[k], sc.p() / sc.m0 as f64);
    m.add_diag(nhat_k + 1.0);
    ln_det(m)
}

fn ln_ls_exk(sc: &CfScenario, re: &CfRealization, nhat_k: f64, k: usize) -> Result<f64> {
    let mut m = scaled_gram(&re.h[k], sc.p() / sc.m0 as f64);
    for l in (0..sc.relays()).filter(|&l| l != k) {
        let f = re.f(k, l).ok_or_else(|| Error::DimensionMismatch("missing F link".into()))?;
        m.add_assign_scaled(&f.gram(), sc.p() / sc.relay_antennas[l] as f64)?;
    }
    m.add_diag(nhat_k + 1.0);
    ln_det(m)
}

fn ln_ls_hatk(sc: &CfScenario, re: &CfRealization, nhat_k: f64, k: usize) -> Result<f64> {
    let stacked = ComplexMatrix::vstack(&[&re.h[k], &re.h_sd])?;
    let mut m = scaled_gram(&stacked, sc.p() / sc.m0 as f64);
    for i in 0..sc.relay_antennas[k] {
        m[(i, i)].re += nhat_k;
    }
    m.add_diag(1.0);
    ln_det(m)
}

/// `L_s = det((P/M_0) H_s H_s^H + diag(I_{M_2}, (N_k+1) I_{m_k}))` with
/// `H_s = [H_sd; H_1; ...; H_K]`.
pub fn closed_form_ls(sc: &CfScenario, re: &CfRealization, nz: &CompressionNoise) -> Result<f64> {
    check_shapes(sc, re, Some(nz))?;
    Ok(ln_ls(sc, re, nz)?.exp())
}

/// `L_d = det((P/M_0) H_sd H_sd^H + sum_k (P/m_k) G_k G_k^H + I)`, a
/// determinant rather than its logarithm.
pub fn closed_form_ld(sc: &CfScenario, re: &CfRealization) -> Result<f64> {
    check_shapes(sc, re, None)?;
    Ok(ln_ld(sc, re)?.exp())
}

/// `L_sd = det((P/M_0) H_sd H_sd^H + I)`.
pub fn closed_form_lsd(sc: &CfScenario, re: &CfRealization) -> Result<f64> {
    check_shapes(sc, re, None)?;
    Ok(ln_lsd(sc, re)?.exp())
}

/// `L_skd = det((P/M_0) H_sd H_sd^H + (P/m_k) G_k G_k^H + I)`.
pub fn closed_form_lskd(sc: &CfScenario, re: &CfRealization, k: usize) -> Result<f64> {
    check_shapes(sc, re, None)?;
    check_relay(sc, k)?;
    Ok(ln_lskd(sc, re, k)?.exp())
}

/// `L_sk = det((P/M_0) H_k H_k^H + (N_k+1) I)`.
pub fn closed_form_lsk(sc: &CfScenario, re: &CfRealization, nz: &CompressionNoise, k: usize) -> Result<f64> {
    check_shapes(sc, re, Some(nz))?;
    check_relay(sc, k)?;
    Ok(ln_lsk(sc, re, nz.nhat[k], k)?.exp())
}

/// `L_{s[K]/k} = det((P/M_0) H_k H_k^H + sum_{l != k} (P/m_l) F_kl F_kl^H + (N_k+1) I)`.
pub fn closed_form_ls_exk(sc: &CfScenario, re: &CfRealization, nz: &CompressionNoise, k: usize) -> Result<f64> {
    check_shapes(sc, re, Some(nz))?;
    check_relay(sc, k)?;
    Ok(ln_ls_exk(sc, re, nz.nhat[k], k)?.exp())
}

/// `L_{s k^} = det(diag((N_k+1) I, I) + (P/M_0) [H_k; H_sd][H_k; H_sd]^H)`.
pub fn closed_form_ls_hatk(sc: &CfScenario, re: &CfRealization, nz: &CompressionNoise, k: usize) -> Result<f64> {
    check_shapes(sc, re, Some(nz))?;
    check_relay(sc, k)?;
    Ok(ln_ls_hatk(sc, re, nz.nhat[k], k)?.exp())
}

/// Rate `log2(L_s / prod_k (N_k+1)^{m_k})` for a given noise vector.
pub fn rate_for_noise(sc: &CfScenario, re: &CfRealization, nz: &CompressionNoise) -> Result<f64> {
    check_shapes(sc, re, Some(nz))?;
    let denom: f64 = nz
        .nhat
        .iter()
        .zip(&sc.relay_antennas)
        .map(|(&n, &mk)| mk as f64 * n.ln_1p())
        .sum();
    Ok(((ln_ls(sc, re, nz)? - denom) / std::f64::consts::LN_2).max(0.0))
}

/// Relay indices of the bitmask `mask`.
fn members(mask: u32, k: usize) -> Vec<usize> {
    (0..k).filter(|i| mask >> i & 1 == 1).collect()
}

fn gap_on(j: &JointGaussianCov, b: CfBlocks, k: usize, t: &[usize]) -> Result<f64> {
    let tc: Vec<usize> = (0..k).filter(|i| !t.contains(i)).collect();
    let ids = |f: &dyn Fn(usize) -> BlockId, s: &[usize]| s.iter().map(|&i| f(i)).collect::<Vec<_>>();
    let x_t = ids(&|i| b.xk(i), t);
    let x_tc = ids(&|i| b.xk(i), &tc);
    let available = j.gaussian_cmi(&x_t, &[b.y()], &x_tc)?;

    let mut given: Vec<BlockId> = (0..k).map(|i| b.xk(i)).collect();
    given.extend(ids(&|i| b.yhat(i), &tc));
    given.push(b.y());
    let mut needed = j.gaussian_cmi(&ids(&|i| b.yhat(i), t), &ids(&|i| b.yk(i), t), &given)?;
    for &i in t {
        let others: Vec<BlockId> = (0..k).filter(|&l| l != i).map(|l| b.xk(l)).collect();
        needed += j.gaussian_cmi(&[b.yhat(i)], &others, &[b.xk(i)])?;
    }
    Ok(available - needed)
}

/// Compression constraint slack for relay subset `t` (0-based indices), in
/// bits: `I(x_T; y | x_{T^C}) - I(yhat_T; y_T | x_[K], yhat_{T^C}, y)
/// - sum_{t in T} I(yhat_t; x_{[K]/t} | x_t)`.
pub fn constraint_gap(sc: &CfScenario, re: &CfRealization, nz: &CompressionNoise, t: &[usize]) -> Result<f64> {
    let k = sc.relays();
    if t.is_empty() || t.iter().any(|&i| i >= k) {
        return Err(Error::InvalidArgument("subset must be a nonempty set of relay indices".into()));
    }
    let mut t = t.to_vec();
    t.sort_unstable();
    t.dedup();
    let j = assemble_cf_covariance(sc, re, nz)?;
    gap_on(&j, CfBlocks::new(k), k, &t)
}

/// Gaps of all `2^K - 1` subsets, indexed by bitmask minus one.
pub fn all_constraint_gaps(sc: &CfScenario, re: &CfRealization, nz: &CompressionNoise) -> Result<Vec<f64>> {
    let k = sc.relays();
    let j = assemble_cf_covariance(sc, re, nz)?;
    let b = CfBlocks::new(k);
    (1..1u32 << k).map(|mask| gap_on(&j, b, k, &members(mask, k))).collect()
}

/// Right-hand side of the singleton noise condition
/// `N_k^{m_k} >= L_{s[K]/k} L_{s k^} / (L_skd L_sk)`, in natural log.
fn ln_singleton_ratio(sc: &CfScenario, re: &CfRealization, nhat_k: f64, k: usize, ln_lskd: f64) -> Result<f64> {
    Ok(ln_ls_exk(sc, re, nhat_k, k)? + ln_ls_hatk(sc, re, nhat_k, k)? - ln_lskd - ln_lsk(sc, re, nhat_k, k)?)
}

/// Damped fixed point of the singleton condition per relay, followed by
/// uniform inflation until every subset constraint holds.
pub fn solve_compression_noise(sc: &CfScenario, re: &CfRealization) -> Result<CompressionNoise> {
    check_shapes(sc, re, None)?;
    let k = sc.relays();
    let mut nhat = vec![1.0; k];
    for (i, n) in nhat.iter_mut().enumerate() {
        let lskd = ln_lskd(sc, re, i)?;
        let inv_m = 1.0 / sc.relay_antennas[i] as f64;
        for _ in 0..MAX_FIXED_POINT_ITERS {
            let target = (ln_singleton_ratio(sc, re, *n, i, lskd)? * inv_m).exp();
            if !target.is_finite() {
                break;
            }
            let next = DAMPING * *n + (1.0 - DAMPING) * target;
            let done = (next - *n).abs() <= FIXED_POINT_RTOL * n.abs();
            *n = next;
            if done {
                break;
            }
        }
    }
    let mut nz = CompressionNoise { nhat };
    for _ in 0..=MAX_INFLATIONS {
        if all_constraint_gaps(sc, re, &nz)?.iter().all(|&g| g >= GAP_TOLERANCE) {
            return Ok(nz);
        }
        for n in &mut nz.nhat {
            *n *= INFLATION;
        }
    }
    Err(Error::NoFeasibleNoise)
}

/// Achievable rate with solved compression noise; infeasible draws give
/// rate 0 and `constraints_ok = false`.
pub fn cf_rate(sc: &CfScenario, re: &CfRealization) -> Result<CfRateResult> {
    match solve_compression_noise(sc, re) {
        Ok(nz) => {
            let gaps = all_constraint_gaps(sc, re, &nz)?;
            let (mask, _) = gaps
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, &g)| if g < acc.1 { (i, g) } else { acc });
            Ok(CfRateResult {
                rate_bits: rate_for_noise(sc, re, &nz)?,
                binding_subset: Some(members(mask as u32 + 1, sc.relays())),
                nhat: nz,
                constraints_ok: true,
            })
        }
        Err(Error::NoFeasibleNoise) => Ok(CfRateResult {
            rate_bits: 0.0,
            nhat: CompressionNoise {
                nhat: vec![f64::INFINITY; sc.relays()],
            },
            constraints_ok: false,
            binding_subset: None,
        }),
        Err(e) => Err(e),
    }
}

pub fn cf_outage_indicator(sc: &CfScenario, re: &CfRealization, rate: RateMode) -> Result<bool> {
    Ok(rate.is_outage(cf_rate(sc, re)?.rate_bits, sc.snr))
}

/// Smallest integer `l_k >= 1` with `N_k <= l_k ((L_s / L_d)^{1/M_1} + 1)`.
pub fn universal_l(sc: &CfScenario, re: &CfRealization, nz: &CompressionNoise) -> Result<Vec<u64>> {
    let ratio = ((ln_ls(sc, re, nz)? - ln_ld(sc, re)?) / sc.m1() as f64).exp();
    Ok(nz
        .nhat
        .iter()
        .map(|&n| (n / (ratio + 1.0)).ceil().max(1.0) as u64)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniversalNoisePoint {
    pub snr_db: f64,
    /// Per-relay maximum of `l_k` over usable draws.
    pub max_l: Vec<u64>,
    /// Mean of `max_k l_k` over usable draws.
    pub mean_l: f64,
    /// Draws that were infeasible, singular, or needed noise above
    /// [`DEGENERATE_NHAT`].
    pub flagged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniversalNoiseReport {
    pub points: Vec<UniversalNoisePoint>,
    /// Least-squares slope of `log10 mean_l` against `log10 snr`.
    pub trend_slope: f64,
}

/// Evaluates `l_k` for every draw at every SNR. Draws at one SNR are
/// reused at all others.
pub fn universal_noise_check(
    sc: &CfScenario,
    draws: &[CfRealization],
    grid: &[SnrPoint],
) -> Result<UniversalNoiseReport> {
    if draws.is_empty() || grid.is_empty() {
        return Err(Error::InvalidArgument("universal noise check needs draws and SNR points".into()));
    }
    let mut points = Vec::with_capacity(grid.len());
    for &s in grid {
        let sc = sc.at(s);
        let mut max_l = vec![0u64; sc.relays()];
        let (mut sum, mut used, mut flagged) = (0.0, 0usize, 0usize);
        for re in draws {
            let l = solve_compression_noise(&sc, re).and_then(|nz| {
                if nz.nhat.iter().any(|&n| n > DEGENERATE_NHAT) {
                    return Err(Error::NoFeasibleNoise);
                }
                universal_l(&sc, re, &nz)
            });
            match l {
                Ok(l) => {
                    for (m, v) in max_l.iter_mut().zip(&l) {
                        *m = (*m).max(*v);
                    }
                    sum += *l.iter().max().unwrap_or(&1) as f64;
                    used += 1;
                }
                Err(_) => flagged += 1,
            }
        }
        points.push(UniversalNoisePoint {
            snr_db: s.snr_db,
            max_l,
            mean_l: if used > 0 { sum / used as f64 } else { f64::NAN },
            flagged,
        });
    }
    let xy: Vec<(f64, f64)> = grid
        .iter()
        .zip(&points)
        .filter(|(s, p)| s.snr_linear > 0.0 && p.mean_l.is_finite())
        .map(|(s, p)| (s.snr_linear.log10(), p.mean_l.log10()))
        .collect();
    Ok(UniversalNoiseReport {
        points,
        trend_slope: ls_slope(&xy),
    })
}

/// Ordinary least-squares slope; NaN with fewer than two distinct x.
pub fn ls_slope(xy: &[(f64, f64)]) -> f64 {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        f64::NAN
    }
}
