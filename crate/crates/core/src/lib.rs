//! Arbitrary-precision ball arithmetic kernel: a fused dot product, block
//! matrix multiplication over scaled integer blocks, and polynomial
//! basecase routines built on them.

pub mod dot;
pub mod error;
pub mod limb;
pub mod matmul;
pub mod numbers;
pub mod oracle;
pub mod poly;

pub use error::{Error, Result};
pub use numbers::{ApFloat, Ball, ComplexBall, Mag};
