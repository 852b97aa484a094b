//! Ball matrix multiplication.
//!
//! The classical path evaluates one fused dot product per entry. The block
//! path splits the inner dimension into blocks whose rows and columns scale
//! to integers of bounded height, multiplies those exactly over the
//! integers, and bounds the radius products separately in binary64.

mod int;
mod matrix;
mod plan;
mod radius;

pub use int::{int_matmul, primes_needed, word_primes, IntAlgo, IntMatrix};
pub use matrix::{BallMatrix, ComplexBallMatrix, MagMatrix};
pub use plan::{
    entry_precision, height_bound, plan_blocks, scale_cols, scale_rows, scale_vector, scaling, BlockStep,
    BASECASE_LEN,
};
pub use radius::radius_matmul_upper;

use crate::dot::{dot_ball, dot_mid_products, Strided, DOT_EXP_LIMIT};
use crate::error::{Error, Result};
use crate::numbers::{ApFloat, Ball, Mag};

fn check_dims(a: &BallMatrix, b: &BallMatrix) -> Result<()> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch {
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    Ok(())
}

/// One dot product per entry.
pub fn classical_matmul_ball(a: &BallMatrix, b: &BallMatrix, p: u64) -> Result<BallMatrix> {
    check_dims(a, b)?;
    let cols: Vec<_> = (0..b.cols()).map(|j| b.col(j)).collect();
    Ok(BallMatrix::from_fn(a.rows(), b.cols(), |i, j| {
        dot_ball(None, false, Strided::contiguous(a.row(i)), cols[j], p)
    }))
}

/// Entries the block path can scale: finite, with exponents in the range
/// where scaled products cannot overflow.
fn block_compatible(m: &BallMatrix) -> bool {
    m.entries().iter().all(|b| {
        b.is_finite() && (b.mid.is_zero() || b.mid.exponent().abs() <= DOT_EXP_LIMIT) && {
            b.rad.is_zero() || b.rad.exponent().abs() <= DOT_EXP_LIMIT
        }
    })
}

/// Block product; returns the result and the number of blocks used (0 when
/// the product was routed to the classical path).
pub fn block_matmul_ball_counted(a: &BallMatrix, b: &BallMatrix, p: u64) -> Result<(BallMatrix, usize)> {
    check_dims(a, b)?;
    if !block_compatible(a) || !block_compatible(b) {
        return Ok((classical_matmul_ball(a, b, p)?, 0));
    }
    let (m, n) = (a.rows(), b.cols());
    let mut c = BallMatrix::zeros(m, n);
    if m == 0 || n == 0 || a.cols() == 0 {
        return Ok((c, 0));
    }
    let plan = plan_blocks(a, b, p);
    for step in &plan {
        let s = step.range.clone();
        if step.basecase {
            for i in 0..m {
                let x = Strided::contiguous(&a.row(i)[s.clone()]);
                for j in 0..n {
                    let y = Strided::new(b.entries(), s.start * n + j, n as isize, s.len())
                        .expect("column slice in range");
                    let e = c.get_mut(i, j);
                    *e = dot_mid_products(e, x, y, p);
                }
            }
            continue;
        }
        let (ai, row_e) = scale_rows(a, s.clone());
        let (bi, col_e) = scale_cols(b, s);
        int::multimodular_emit(&ai, &bi, |i, j, negative, limbs| {
            let e = c.get_mut(i, j);
            if limbs.iter().all(|&w| w == 0) || e.is_indeterminate() {
                return;
            }
            let shift = -(row_e[i] as i128) - col_e[j] as i128;
            let t = ApFloat::normalize_wide(negative, 64 * limbs.len() as i128 + shift, limbs);
            *e = match t.and_then(|t| e.mid.add_round(&t, p)) {
                Ok((mid, err)) => Ball::new(mid, e.rad.add_up(&err)),
                Err(_) => Ball::indeterminate(),
            };
        });
    }
    add_radius_products(a, b, &mut c);
    Ok((c, plan.len()))
}

/// Algorithm with scaled integer blocks; see the module documentation.
pub fn block_matmul_ball(a: &BallMatrix, b: &BallMatrix, p: u64) -> Result<BallMatrix> {
    block_matmul_ball_counted(a, b, p).map(|(c, _)| c)
}

/// Adds `|A| R_B + R_A (|B| + R_B)` to the radii of `c`.
fn add_radius_products(a: &BallMatrix, b: &BallMatrix, c: &mut BallMatrix) {
    let ra = a.radii();
    let rb = b.radii();
    let mut extra: Option<MagMatrix> = None;
    if !rb.is_zero() {
        extra = Some(radius_matmul_upper(&a.abs_mid(), &rb));
    }
    if !ra.is_zero() {
        let r2 = radius_matmul_upper(&ra, &b.abs_mid().add_up(&rb));
        extra = Some(match extra {
            Some(r1) => r1.add_up(&r2),
            None => r2,
        });
    }
    if let Some(r) = extra {
        for i in 0..c.rows() {
            for j in 0..c.cols() {
                let e = c.get_mut(i, j);
                let rad: Mag = e.rad.add_up(r.get(i, j));
                e.rad = rad;
            }
        }
    }
}

/// Which algorithm [`matmul_auto`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatmulPath {
    Classical,
    Block,
}

/// Largest minimum dimension handled by the classical path at precision `p`.
pub fn classical_cutoff(p: u64) -> usize {
    match p {
        0..=128 => 60,
        129..=512 => 50,
        _ => 40,
    }
}

pub fn matmul_path(a: &BallMatrix, b: &BallMatrix, p: u64) -> MatmulPath {
    let min_dim = a.rows().min(a.cols()).min(b.cols());
    if min_dim <= classical_cutoff(p) {
        MatmulPath::Classical
    } else {
        MatmulPath::Block
    }
}

/// Product through whichever path suits the shape, reporting the path.
pub fn matmul_auto_traced(a: &BallMatrix, b: &BallMatrix, p: u64) -> Result<(BallMatrix, MatmulPath)> {
    check_dims(a, b)?;
    let path = matmul_path(a, b, p);
    let c = match path {
        MatmulPath::Classical => classical_matmul_ball(a, b, p)?,
        MatmulPath::Block => block_matmul_ball(a, b, p)?,
    };
    Ok((c, path))
}

pub fn matmul_auto(a: &BallMatrix, b: &BallMatrix, p: u64) -> Result<BallMatrix> {
    matmul_auto_traced(a, b, p).map(|(c, _)| c)
}

/// `(A + Bi)(C + Di)` from four real products.
pub fn complex_matmul_ball(x: &ComplexBallMatrix, y: &ComplexBallMatrix, p: u64) -> Result<ComplexBallMatrix> {
    let ac = matmul_auto(&x.re, &y.re, p)?;
    let bd = matmul_auto(&x.im, &y.im, p)?;
    let ad = matmul_auto(&x.re, &y.im, p)?;
    let bc = matmul_auto(&x.im, &y.re, p)?;
    ComplexBallMatrix::new(ac.sub(&bd, p)?, ad.add(&bc, p)?)
}
