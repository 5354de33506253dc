#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod kernel;
pub mod model;
pub mod numerics;
pub mod simulator;
pub mod spectral;
pub mod thresholds;
pub mod speed;

pub use error::{Error, Result};
pub use kernel::{DiscreteKernel, Kernel, KernelProfile, KernelSpec};
pub use model::ModelParams;
