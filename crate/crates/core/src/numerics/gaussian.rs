//! Entropies and mutual informations of jointly Gaussian vectors.
//!
//! Entropy convention: [`JointGaussianCov::conditional_entropy`] returns
//! `ln det` of the conditional covariance, without the `(2 pi e)^d` factor.
//! Every public information quantity is a difference of such terms, so the
//! constant always cancels.

use std::ops::Range;

use super::matrix::{logdet_hermitian, HermitianPsd};
use crate::error::{Error, Result};

/// Index of a named block inside a [`JointGaussianCov`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub name: String,
    pub span: Range<usize>,
}

/// Covariance of a zero-mean complex Gaussian vector split into named,
/// contiguous blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct JointGaussianCov {
    blocks: Vec<Block>,
    cov: HermitianPsd,
}

impl JointGaussianCov {
    /// `blocks` lists `(name, length)` in storage order.
    pub fn new(blocks: &[(&str, usize)], cov: HermitianPsd) -> Result<Self> {
        let mut start = 0;
        let mut out = Vec::with_capacity(blocks.len());
        for (name, len) in blocks {
            if out.iter().any(|b: &Block| b.name == *name) {
                return Err(Error::InvalidArgument(format!("duplicate block name {name}")));
            }
            out.push(Block {
                name: (*name).to_string(),
                span: start..start + len,
            });
            start += len;
        }
        if start != cov.dim() {
            return Err(Error::DimensionMismatch(format!(
                "blocks cover {start} entries, covariance has dimension {}",
                cov.dim()
            )));
        }
        Ok(Self { blocks: out, cov })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn cov(&self) -> &HermitianPsd {
        &self.cov
    }

    pub fn block(&self, name: &str) -> Option<BlockId> {
        self.blocks.iter().position(|b| b.name == name).map(BlockId)
    }

    pub fn span(&self, id: BlockId) -> Range<usize> {
        self.blocks[id.0].span.clone()
    }

    fn indices(&self, set: &[BlockId]) -> Vec<usize> {
        set.iter().flat_map(|&id| self.span(id)).collect()
    }

    fn logdet_of(&self, set: &[BlockId]) -> Result<f64> {
        let idx = self.indices(set);
        if idx.is_empty() {
            return Ok(0.0);
        }
        logdet_hermitian(&self.cov.principal(&idx))
    }

    fn check_ids(&self, sets: &[&[BlockId]]) -> Result<()> {
        let mut seen = vec![false; self.blocks.len()];
        for set in sets {
            for id in *set {
                if id.0 >= self.blocks.len() {
                    return Err(Error::InvalidArgument(format!("unknown block {}", id.0)));
                }
                if seen[id.0] {
                    return Err(Error::InvalidArgument(format!(
                        "block {} appears in more than one set",
                        self.blocks[id.0].name
                    )));
                }
                seen[id.0] = true;
            }
        }
        Ok(())
    }

    /// `ln det Sigma_{target | given}` in nats, via
    /// `ln det Sigma_{target u given} - ln det Sigma_{given}`.
    pub fn conditional_entropy(&self, target: &[BlockId], given: &[BlockId]) -> Result<f64> {
        self.check_ids(&[target, given])?;
        if target.is_empty() {
            return Ok(0.0);
        }
        let joint: Vec<BlockId> = target.iter().chain(given).copied().collect();
        Ok(self.logdet_of(&joint)? - self.logdet_of(given)?)
    }

    /// `I(A; B | C)` in bits. Tiny negative round-off is clamped to zero.
    pub fn gaussian_cmi(&self, a: &[BlockId], b: &[BlockId], c: &[BlockId]) -> Result<f64> {
        self.check_ids(&[a, b, c])?;
        if a.is_empty() || b.is_empty() {
            return Ok(0.0);
        }
        let ab: Vec<BlockId> = a.iter().chain(b).copied().collect();
        // h(A|C) + h(B|C) - h(AB|C); the ln det Sigma_C terms cancel once.
        let ac: Vec<BlockId> = a.iter().chain(c).copied().collect();
        let bc: Vec<BlockId> = b.iter().chain(c).copied().collect();
        let abc: Vec<BlockId> = ab.iter().chain(c).copied().collect();
        let nats = self.logdet_of(&ac)? + self.logdet_of(&bc)?
            - self.logdet_of(&abc)?
            - self.logdet_of(c)?;
        Ok((nats / std::f64::consts::LN_2).max(0.0))
    }
}
