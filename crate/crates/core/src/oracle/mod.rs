//! Exact reference implementations for tests and verification runs.
//!
//! Nothing here shares arithmetic with the kernel beyond reading limbs;
//! everything is done with big rationals or exact sparse dyadics.

pub mod dyadic;
pub mod rational;

pub use dyadic::{ball_hull_dot, DyadicInterval, SparseDyadic};
pub use rational::{ExactRational, RationalInterval};

use crate::numbers::{ApFloat, Ball};

/// Exact `sum(x_i * y_i)` over finite floats.
pub fn rational_dot_exact(x: &[ApFloat], y: &[ApFloat]) -> ExactRational {
    assert_eq!(x.len(), y.len());
    x.iter().zip(y).fold(ExactRational::zero(), |acc, (a, b)| {
        let a = ExactRational::from_apfloat(a).expect("finite input");
        let b = ExactRational::from_apfloat(b).expect("finite input");
        acc + a * b
    })
}

/// Exact interval hull of `sum([m_i +/- r_i][m'_i +/- r'_i])`.
pub fn interval_dot_hull(x: &[Ball], y: &[Ball]) -> RationalInterval {
    assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .fold(RationalInterval::point(ExactRational::zero()), |acc, (a, b)| {
            let a = RationalInterval::from_ball(a).expect("finite input");
            let b = RationalInterval::from_ball(b).expect("finite input");
            acc.add(&a.mul(&b))
        })
}

/// Same hull as [`interval_dot_hull`] but valid for any exponent range.
pub fn wide_dot_hull(x: &[Ball], y: &[Ball]) -> DyadicInterval {
    assert_eq!(x.len(), y.len());
    let terms: Vec<(&Ball, &Ball)> = x.iter().zip(y).collect();
    ball_hull_dot(&terms)
}

/// Exact product of two row-major matrices of finite floats.
pub fn rational_matmul_exact(
    a: &[ApFloat],
    b: &[ApFloat],
    m: usize,
    k: usize,
    n: usize,
) -> Vec<ExactRational> {
    assert_eq!(a.len(), m * k);
    assert_eq!(b.len(), k * n);
    let ar: Vec<ExactRational> = a.iter().map(|v| ExactRational::from_apfloat(v).expect("finite")).collect();
    let br: Vec<ExactRational> = b.iter().map(|v| ExactRational::from_apfloat(v).expect("finite")).collect();
    let mut out = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            let mut s = ExactRational::zero();
            for t in 0..k {
                s = s + &ar[i * k + t] * &br[t * n + j];
            }
            out.push(s);
        }
    }
    out
}

/// Interval hull of the product of two row-major ball matrices.
pub fn interval_matmul_hull(a: &[Ball], b: &[Ball], m: usize, k: usize, n: usize) -> Vec<RationalInterval> {
    assert_eq!(a.len(), m * k);
    assert_eq!(b.len(), k * n);
    let ai: Vec<RationalInterval> = a.iter().map(|v| RationalInterval::from_ball(v).expect("finite")).collect();
    let bi: Vec<RationalInterval> = b.iter().map(|v| RationalInterval::from_ball(v).expect("finite")).collect();
    let mut out = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            let mut s = RationalInterval::point(ExactRational::zero());
            for t in 0..k {
                s = s.add(&ai[i * k + t].mul(&bi[t * n + j]));
            }
            out.push(s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::Mag;
    use num_bigint::BigInt;

    fn q(v: i64) -> ExactRational {
        ExactRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn small_exact_dot() {
        let x: Vec<ApFloat> = [1, 2, 3].iter().map(|&v| ApFloat::from_i64(v)).collect();
        let y = vec![ApFloat::one(); 3];
        assert_eq!(rational_dot_exact(&x, &y), q(6));
        assert_eq!(rational_dot_exact(&[], &[]), q(0));
    }

    #[test]
    fn unit_ball_square() {
        let b = Ball::new(ApFloat::zero(), Mag::pow2(0));
        let h = interval_dot_hull(std::slice::from_ref(&b), std::slice::from_ref(&b));
        assert_eq!(h.lo, q(-1));
        assert_eq!(h.hi, q(1));
        let w = wide_dot_hull(std::slice::from_ref(&b), std::slice::from_ref(&b));
        assert_eq!(w.lo, SparseDyadic::from_parts(BigInt::from(-1), 0));
    }

    #[test]
    fn exact_matmul_identity() {
        let id = vec![ApFloat::one(), ApFloat::zero(), ApFloat::zero(), ApFloat::one()];
        let a: Vec<ApFloat> = [5, -7, 11, 13].iter().map(|&v| ApFloat::from_i64(v)).collect();
        let c = rational_matmul_exact(&id, &a, 2, 2, 2);
        assert_eq!(c, vec![q(5), q(-7), q(11), q(13)]);
    }
}
