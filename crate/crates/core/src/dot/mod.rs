//! Fused dot products of balls.
//!
//! All terms are summed into a single two's complement fixed-point
//! accumulator sized from a setup pass over the exponents, with one word
//! counting ulp errors and one word accumulating radius bounds. The initial
//! value, when present, is just one more term multiplied by an exact one.

mod complex;
mod engine;
mod strided;

pub use complex::{dot_complex_approx, dot_complex_ball, dot_complex_ball_with};
pub use engine::{
    bc, dot_accumulate_radius, dot_accumulate_term, dot_finalize, DotAccumulator, DotPlan, DotStatus,
    DOT_EXP_LIMIT,
};
pub use strided::Strided;

use crate::numbers::{ApFloat, Ball};
use engine::{dot_terms, plan_terms, Term, ZERO_MAG};

/// Tuning switches. The defaults are what the public functions use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DotOptions {
    /// Straight-line multiplication for one- and two-limb factors.
    pub inline_fast_path: bool,
    /// Lower the working precision when radii or the span of the terms
    /// make extra bits pointless.
    pub reduce_precision: bool,
    /// Complex terms whose parts all have at least this many limbs use
    /// three real multiplications for the imaginary part.
    pub complex_three_mult_cutoff_limbs: usize,
}

impl Default for DotOptions {
    fn default() -> Self {
        DotOptions {
            inline_fast_path: true,
            reduce_precision: true,
            complex_three_mult_cutoff_limbs: 128,
        }
    }
}

/// Setup pass over explicit term pairs.
pub fn dot_setup(terms: &[(&Ball, &Ball)], p: u64) -> DotPlan {
    let f = |i: usize| Term::ball(terms[i].0, terms[i].1, false);
    plan_terms(terms.len(), &f, p, &DotOptions::default(), true)
}

/// Ball containing `initial + (-1)^subtract * sum(x_i * y_i)` with a
/// `p`-bit midpoint.
pub fn dot_ball(initial: Option<&Ball>, subtract: bool, x: Strided<Ball>, y: Strided<Ball>, p: u64) -> Ball {
    dot_ball_with(&DotOptions::default(), initial, subtract, x, y, p)
}

pub fn dot_ball_with(
    opts: &DotOptions,
    initial: Option<&Ball>,
    subtract: bool,
    x: Strided<Ball>,
    y: Strided<Ball>,
    p: u64,
) -> Ball {
    real_dot(opts, initial, subtract, x, y, p, true)
}

/// Midpoint-only dot product: radii are ignored and no error bound is kept.
pub fn dot_approx(initial: Option<&Ball>, subtract: bool, x: Strided<Ball>, y: Strided<Ball>, p: u64) -> ApFloat {
    real_dot(&DotOptions::default(), initial, subtract, x, y, p, false).mid
}

pub fn dot_approx_with(
    opts: &DotOptions,
    initial: Option<&Ball>,
    subtract: bool,
    x: Strided<Ball>,
    y: Strided<Ball>,
    p: u64,
) -> ApFloat {
    real_dot(opts, initial, subtract, x, y, p, false).mid
}

/// `initial + sum(mid(x_i) * mid(y_i))`; the radii of `x` and `y` are
/// ignored, the radius of `initial` is kept.
pub(crate) fn dot_mid_products(initial: &Ball, x: Strided<Ball>, y: Strided<Ball>, p: u64) -> Ball {
    let n = x.len();
    let one = ApFloat::one();
    dot_terms(
        n + 1,
        |i| {
            if i < n {
                Term {
                    x: &x.get(i).mid,
                    y: &y.get(i).mid,
                    rx: &ZERO_MAG,
                    ry: &ZERO_MAG,
                    negate: false,
                    mid: true,
                    rad: false,
                }
            } else {
                Term {
                    x: &initial.mid,
                    y: &one,
                    rx: &initial.rad,
                    ry: &ZERO_MAG,
                    negate: false,
                    mid: true,
                    rad: true,
                }
            }
        },
        p,
        &DotOptions::default(),
        true,
    )
}

fn real_dot(
    opts: &DotOptions,
    initial: Option<&Ball>,
    subtract: bool,
    x: Strided<Ball>,
    y: Strided<Ball>,
    p: u64,
    with_radius: bool,
) -> Ball {
    assert_eq!(x.len(), y.len(), "dot product operands differ in length");
    let n = x.len();
    let one = ApFloat::one();
    match initial {
        None => dot_terms(n, |i| Term::ball(x.get(i), y.get(i), subtract), p, opts, with_radius),
        Some(init) => dot_terms(
            n + 1,
            |i| {
                if i < n {
                    Term::ball(x.get(i), y.get(i), subtract)
                } else {
                    Term {
                        x: &init.mid,
                        y: &one,
                        rx: &init.rad,
                        ry: &ZERO_MAG,
                        negate: false,
                        mid: true,
                        rad: true,
                    }
                }
            },
            p,
            opts,
            with_radius,
        ),
    }
}
