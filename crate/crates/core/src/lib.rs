//! Spectral construction, autocovariances and Gaussian simulation of the
//! Hardy–Rogosinski process, a centered stationary Gaussian sequence whose
//! spectral density has an almost everywhere unboundedly divergent Fourier
//! series.

pub mod error;
pub mod exact;
pub mod hardy;
pub mod kernels;
pub mod output;
pub mod quad;
pub mod rng;
pub mod sim;
pub mod spectral;

pub use error::{Error, Result};
pub use exact::{BigLag, RationalAngle};
pub use hardy::{build_level, build_level_with, HardyLevel, LevelSummary, Membership, Profile};
pub use spectral::{build_chain, build_chain_with, default_chain, AutocovRecord, Block, BlockChain, Certificate, SpacingRule};
pub use sim::{Centering, EmpiricalAcov, SimConfig, TrajectoryBatch};
