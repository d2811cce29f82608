//! Complex-matrix primitives, seeded complex Gaussian sampling, Hermitian
//! log-determinants and Gaussian information measures.

mod gaussian;
mod matrix;
mod rng;

pub use gaussian::{Block, BlockId, JointGaussianCov};
pub use matrix::{logdet_hermitian, mutual_info_bits, ComplexMatrix, HermitianPsd, PD_RELATIVE_FLOOR};
pub use rng::{sample_cn, sample_cn_matrix, RngStream, StreamRng};
