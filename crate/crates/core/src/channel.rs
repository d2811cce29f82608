//! Block-fading channel realizations of a multi-hop topology and the
//! end-to-end product channel of a path.
//!
//! The amplify-and-forward noise-whitening matrix is not modeled: its
//! eigenvalues do not scale with SNR, so it leaves outage exponents unchanged.
//! Per-stage AF gains are folded into the single aggregate [`SnrPoint`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{mutual_info_bits, sample_cn_matrix, ComplexMatrix};
use crate::topology::{Path, RelayTopology};

/// An SNR value in dB together with its linear power ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrPoint {
    pub snr_db: f64,
    pub snr_linear: f64,
}

impl SnrPoint {
    pub fn from_db(snr_db: f64) -> Self {
        Self {
            snr_db,
            snr_linear: 10f64.powf(snr_db / 10.0),
        }
    }

    /// `snr_linear` must be non-negative; zero maps to `-inf` dB.
    pub fn from_linear(snr_linear: f64) -> Result<Self> {
        if !snr_linear.is_finite() || snr_linear < 0.0 {
            return Err(Error::InvalidArgument(format!("bad linear SNR {snr_linear}")));
        }
        Ok(Self {
            snr_db: 10.0 * snr_linear.log10(),
            snr_linear,
        })
    }

    /// Points `start, start+step, ...` up to `stop` (inclusive, with a small
    /// tolerance for accumulated rounding).
    pub fn grid_db(start: f64, stop: f64, step: f64) -> Result<Vec<Self>> {
        if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() || stop < start {
            return Err(Error::InvalidArgument("SNR grid needs start <= stop and step > 0".into()));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| Self::from_db(start + i as f64 * step)).collect())
    }
}

/// Full per-hop channel matrices `H^n` of shape `M_{n+1} x M_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub hops: Vec<ComplexMatrix>,
}

/// One i.i.d. Rayleigh realization, hops drawn in order `0..N`.
pub fn sample_channels<R: Rng + ?Sized>(t: &RelayTopology, rng: &mut R) -> ChannelSet {
    let m = t.stage_antennas();
    ChannelSet {
        hops: m.windows(2).map(|w| sample_cn_matrix(w[1], w[0], rng)).collect(),
    }
}

/// `H^{N-1}[S_N, S_{N-1}] ... H^0[S_1, S_0]`.
pub fn path_product(c: &ChannelSet, p: &Path) -> Result<ComplexMatrix> {
    if c.hops.len() != p.hops() {
        return Err(Error::DimensionMismatch(format!(
            "{} channel hops for a {}-hop path",
            c.hops.len(),
            p.hops()
        )));
    }
    let mut acc: Option<ComplexMatrix> = None;
    for (n, h) in c.hops.iter().enumerate() {
        let sub = h.select(p.stage(n + 1).antennas(), p.stage(n).antennas())?;
        acc = Some(match acc {
            None => sub,
            Some(prev) => sub.matmul(&prev)?,
        });
    }
    acc.ok_or_else(|| Error::DimensionMismatch("path without hops".into()))
}

/// Destination mutual information of a path, in bits.
pub fn path_mutual_info(c: &ChannelSet, p: &Path, s: SnrPoint) -> Result<f64> {
    Ok(mutual_info_bits(s.snr_linear, &path_product(c, p)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;
    use num_complex::Complex64;

    fn topo(m: &[usize]) -> RelayTopology {
        RelayTopology::new(m.to_vec()).unwrap()
    }

    #[test]
    fn shapes_follow_topology() {
        let c = sample_channels(&topo(&[2, 4, 2]), &mut RngStream::new(1, 0).rng());
        assert_eq!((c.hops[0].rows(), c.hops[0].cols()), (4, 2));
        assert_eq!((c.hops[1].rows(), c.hops[1].cols()), (2, 4));
    }

    #[test]
    fn deterministic_per_stream() {
        let t = topo(&[2, 3, 2]);
        let s = RngStream::new(5, 11);
        assert_eq!(sample_channels(&t, &mut s.rng()), sample_channels(&t, &mut s.rng()));
    }

    #[test]
    fn per_hop_entry_variance() {
        let t = topo(&[2, 3, 2]);
        let draws = 100_000;
        let mut acc = [0.0f64; 2];
        for trial in 0..draws {
            let c = sample_channels(&t, &mut RngStream::new(3, trial).rng());
            for (a, h) in acc.iter_mut().zip(&c.hops) {
                *a += h.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>() / 6.0;
            }
        }
        for a in acc {
            assert!((a / draws as f64 - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn single_hop_is_submatrix() {
        let t = topo(&[3, 3]);
        let c = sample_channels(&t, &mut RngStream::new(2, 0).rng());
        let p = Path::from_indices(&t, &[vec![0, 2], vec![1, 2]]).unwrap();
        let prod = path_product(&c, &p).unwrap();
        assert_eq!(prod, c.hops[0].select(&[1, 2], &[0, 2]).unwrap());
    }

    #[test]
    fn scalar_chain_product() {
        let t = topo(&[1, 1, 1, 1]);
        let (a, b, cc) = (Complex64::new(0.5, 1.0), Complex64::new(-2.0, 0.25), Complex64::new(1.5, -0.5));
        let c = ChannelSet {
            hops: vec![ComplexMatrix::scalar(a), ComplexMatrix::scalar(b), ComplexMatrix::scalar(cc)],
        };
        let p = Path::from_indices(&t, &[vec![0], vec![0], vec![0], vec![0]]).unwrap();
        let prod = path_product(&c, &p).unwrap();
        assert!((prod[(0, 0)] - a * b * cc).norm() < 1e-15);
    }

    #[test]
    fn scalar_mi() {
        let t = topo(&[1, 1, 1]);
        let c = ChannelSet {
            hops: vec![
                ComplexMatrix::scalar(Complex64::new(0.0, 2.0)),
                ComplexMatrix::scalar(Complex64::new(0.5, 0.0)),
            ],
        };
        let p = Path::from_indices(&t, &[vec![0], vec![0], vec![0]]).unwrap();
        let s = SnrPoint::from_linear(3.0).unwrap();
        assert!((path_mutual_info(&c, &p, s).unwrap() - 2.0).abs() < 1e-12);
        let zero = SnrPoint::from_linear(0.0).unwrap();
        assert_eq!(path_mutual_info(&c, &p, zero).unwrap(), 0.0);
    }

    #[test]
    fn hop_count_mismatch() {
        let t = topo(&[1, 1, 1]);
        let c = sample_channels(&topo(&[1, 1]), &mut RngStream::new(1, 1).rng());
        let p = Path::from_indices(&t, &[vec![0], vec![0], vec![0]]).unwrap();
        assert!(matches!(path_product(&c, &p), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn snr_grid() {
        let g = SnrPoint::grid_db(10.0, 30.0, 2.0).unwrap();
        assert_eq!(g.len(), 11);
        assert!((g[10].snr_db - 30.0).abs() < 1e-12);
        assert!((SnrPoint::from_db(10.0).snr_linear - 10.0).abs() < 1e-12);
        assert!(SnrPoint::grid_db(5.0, 1.0, 1.0).is_err());
        assert!(SnrPoint::from_linear(-1.0).is_err());
    }
}
