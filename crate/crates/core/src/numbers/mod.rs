//! Floating-point midpoints, upper-bound radii and balls.

mod apfloat;
mod ball;
mod mag;
mod text;

pub use apfloat::{ApFloat, Class, Limbs, EXP_LIMIT};
pub use ball::{ball_fallback_addmul, Ball, ComplexBall};
pub use mag::{Mag, MagKind, MAG_BITS};

