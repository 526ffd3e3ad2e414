//! Discrete orthogonal polynomial ensembles, their correlation kernels and
//! Fredholm determinants, with exact combinatorial cross-checks.

pub mod ensembles;
pub mod error;
pub mod fredholm;
pub mod kernels;
pub mod linalg;
pub mod models;
pub mod numeric;
pub mod partitions;
pub mod quad;
pub mod rsk;
pub mod sampler;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use partitions::{ParticleConfig, Partition};
