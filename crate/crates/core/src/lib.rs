//! Diversity-multiplexing tradeoff analysis of multi-hop MIMO relay
//! networks: end-to-end antenna selection for amplify-and-forward chains,
//! distributed compress-and-forward for two-hop networks, closed-form
//! tradeoff curves and a Monte Carlo outage engine.

pub mod cf;
pub mod channel;
pub mod cli;
pub mod dmt;
pub mod error;
pub mod jeemas;
pub mod montecarlo;
pub mod numerics;
pub mod topology;

pub use error::{Error, Result};
