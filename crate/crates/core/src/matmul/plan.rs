//! Splitting the inner dimension into blocks that scale to integer matrices
//! of bounded height.

use std::ops::Range;

use num_bigint::BigInt;

use super::int::IntMatrix;
use super::matrix::BallMatrix;
use crate::numbers::ApFloat;

/// Blocks shorter than this are evaluated with dot products.
pub const BASECASE_LEN: usize = 30;

/// One block of inner indices.
///
/// For a non-basecase block, `2^row_scalings[i] * A[i, s]` and
/// `B[s, j] * 2^col_scalings[j]` are integer vectors of minimal height, all
/// entries below `2^h`. Basecase blocks carry no scalings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockStep {
    pub range: Range<usize>,
    pub row_scalings: Vec<i64>,
    pub col_scalings: Vec<i64>,
    pub basecase: bool,
}

impl BlockStep {
    pub fn len(&self) -> usize {
        self.range.len()
    }

    pub fn is_empty(&self) -> bool {
        self.range.is_empty()
    }
}

/// Widest bit window among the finite midpoints.
pub fn entry_precision(a: &BallMatrix) -> u64 {
    a.entries().iter().map(|b| b.mid.precision_bits()).max().unwrap_or(0)
}

/// Height bound for the integer blocks at working precision `p`.
pub fn height_bound(a: &BallMatrix, b: &BallMatrix, p: u64) -> u64 {
    let pa = entry_precision(a);
    let pb = entry_precision(b);
    5 * p.min(pa.max(pb)) / 4 + 192
}

/// `(top, bottom)` with `2^bottom | x` and `|x| < 2^top`, or `None` for zero.
#[inline]
pub(crate) fn float_window(x: &ApFloat) -> Option<(i64, i64)> {
    if x.is_regular() {
        Some((x.exponent(), x.bottom_exponent()))
    } else {
        None
    }
}

/// Running bit window of one row or column.
#[derive(Clone, Copy, Debug)]
struct Window {
    top: i64,
    bottom: i64,
}

impl Window {
    const EMPTY: Window = Window {
        top: i64::MIN,
        bottom: i64::MAX,
    };

    #[inline]
    fn merged(self, (top, bottom): (i64, i64)) -> Window {
        Window {
            top: self.top.max(top),
            bottom: self.bottom.min(bottom),
        }
    }

    #[inline]
    fn width(self) -> i128 {
        self.top as i128 - self.bottom as i128
    }
}

/// Greedy partition of `0..inner` in increasing order.
///
/// `a_win(i, t)` and `b_win(t, j)` give the bit windows of the entries;
/// an index joins the current block while every row window of the A-part
/// and every column window of the B-part stays narrower than `h` bits.
/// Blocks shorter than `basecase_len` are extended to
/// `min(basecase_len, remaining)` indices and flagged as basecase.
pub(crate) fn greedy_blocks(
    rows: usize,
    inner: usize,
    cols: usize,
    h: u64,
    a_win: impl Fn(usize, usize) -> Option<(i64, i64)>,
    b_win: impl Fn(usize, usize) -> Option<(i64, i64)>,
    basecase_len: usize,
) -> Vec<(Range<usize>, bool)> {
    let h = h as i128;
    let mut out = Vec::new();
    let mut row_w = vec![Window::EMPTY; rows];
    let mut col_w = vec![Window::EMPTY; cols];
    let mut start = 0;
    while start < inner {
        row_w.fill(Window::EMPTY);
        col_w.fill(Window::EMPTY);
        let mut end = start;
        'grow: while end < inner {
            for (i, w) in row_w.iter().enumerate() {
                if let Some(x) = a_win(i, end) {
                    if w.merged(x).width() >= h {
                        break 'grow;
                    }
                }
            }
            for (j, w) in col_w.iter().enumerate() {
                if let Some(x) = b_win(end, j) {
                    if w.merged(x).width() >= h {
                        break 'grow;
                    }
                }
            }
            for (i, w) in row_w.iter_mut().enumerate() {
                if let Some(x) = a_win(i, end) {
                    *w = w.merged(x);
                }
            }
            for (j, w) in col_w.iter_mut().enumerate() {
                if let Some(x) = b_win(end, j) {
                    *w = w.merged(x);
                }
            }
            end += 1;
        }
        let len = end - start;
        if len < basecase_len || len == 0 {
            let ext = basecase_len.max(1).min(inner - start);
            out.push((start..start + ext, basecase_len > 0));
            start += ext;
        } else {
            out.push((start..end, false));
            start = end;
        }
    }
    out
}

/// Block plan for `A * B` at precision `p`. Non-finite entries are not
/// expected; callers route those products elsewhere.
pub fn plan_blocks(a: &BallMatrix, b: &BallMatrix, p: u64) -> Vec<BlockStep> {
    assert_eq!(a.cols(), b.rows(), "inner dimensions differ");
    let h = height_bound(a, b, p);
    greedy_blocks(
        a.rows(),
        a.cols(),
        b.cols(),
        h,
        |i, t| float_window(&a.get(i, t).mid),
        |t, j| float_window(&b.get(t, j).mid),
        BASECASE_LEN,
    )
    .into_iter()
    .map(|(range, basecase)| {
        let (row_scalings, col_scalings) = if basecase {
            (Vec::new(), Vec::new())
        } else {
            (
                (0..a.rows())
                    .map(|i| scaling(range.clone().map(|t| &a.get(i, t).mid)))
                    .collect(),
                (0..b.cols())
                    .map(|j| scaling(range.clone().map(|t| &b.get(t, j).mid)))
                    .collect(),
            )
        };
        BlockStep {
            range,
            row_scalings,
            col_scalings,
            basecase,
        }
    })
    .collect()
}

/// The exponent `e` making `2^e * v` an integer vector of minimal height;
/// 0 for a zero vector.
pub fn scaling<'a>(v: impl IntoIterator<Item = &'a ApFloat>) -> i64 {
    v.into_iter()
        .filter_map(float_window)
        .map(|(_, bottom)| bottom)
        .min()
        .map_or(0, |b| -b)
}

/// Scales a vector of finite floats to integers: returns `(2^e * v, e)`.
pub fn scale_vector(v: &[&ApFloat]) -> (Vec<BigInt>, i64) {
    let e = scaling(v.iter().copied());
    let ints = v
        .iter()
        .map(|x| x.to_bigint_scaled(e).expect("finite entry scales to an integer"))
        .collect();
    (ints, e)
}

/// Rows of `A[:, s]` scaled to integers, with the row scalings.
pub fn scale_rows(a: &BallMatrix, s: Range<usize>) -> (IntMatrix, Vec<i64>) {
    let mut entries = Vec::with_capacity(a.rows() * s.len());
    let mut exps = Vec::with_capacity(a.rows());
    for i in 0..a.rows() {
        let row: Vec<&ApFloat> = s.clone().map(|t| &a.get(i, t).mid).collect();
        let (ints, e) = scale_vector(&row);
        entries.extend(ints);
        exps.push(e);
    }
    (IntMatrix::new(a.rows(), s.len(), entries), exps)
}

/// Columns of `B[s, :]` scaled to integers, with the column scalings.
pub fn scale_cols(b: &BallMatrix, s: Range<usize>) -> (IntMatrix, Vec<i64>) {
    let n = b.cols();
    let mut entries = vec![BigInt::default(); s.len() * n];
    let mut exps = Vec::with_capacity(n);
    for j in 0..n {
        let col: Vec<&ApFloat> = s.clone().map(|t| &b.get(t, j).mid).collect();
        let (ints, e) = scale_vector(&col);
        for (k, v) in ints.into_iter().enumerate() {
            entries[k * n + j] = v;
        }
        exps.push(e);
    }
    (IntMatrix::new(s.len(), n, entries), exps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::Ball;
    use crate::oracle::ExactRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(m: i64, e: i64) -> ApFloat {
        ApFloat::from_i64(m).mul_2exp(e).unwrap()
    }

    fn rand_float(rng: &mut ChaCha8Rng, e_spread: i64) -> ApFloat {
        if rng.gen_bool(0.1) {
            return ApFloat::zero();
        }
        let limbs: Vec<u64> = (0..rng.gen_range(1..4)).map(|_| rng.gen()).collect();
        ApFloat::from_raw(rng.gen(), rng.gen_range(-e_spread..=e_spread), &limbs).unwrap()
    }

    #[test]
    fn entry_precision_examples() {
        let ones = BallMatrix::from_fn(3, 3, |i, j| Ball::from_i64(if (i + j) % 2 == 0 { 1 } else { -1 }));
        assert_eq!(entry_precision(&ones), 1);
        let single = BallMatrix::new(1, 1, vec![Ball::exact(f(3, -5))]).unwrap();
        assert_eq!(entry_precision(&single), 2);
        assert_eq!(entry_precision(&BallMatrix::zeros(2, 2)), 0);
    }

    #[test]
    fn entry_precision_matches_integer_window() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let a = BallMatrix::from_fn(3, 4, |_, _| Ball::exact(rand_float(&mut rng, 1000)));
            let expect = a
                .entries()
                .iter()
                .filter(|b| !b.mid.is_zero())
                .map(|b| {
                    // odd part of the numerator (or of the integer)
                    let r = ExactRational::from_apfloat(&b.mid).unwrap();
                    let num = r.numer().magnitude().clone();
                    let tz = num.trailing_zeros().unwrap_or(0);
                    (num >> tz).bits()
                })
                .max()
                .unwrap_or(0);
            assert_eq!(entry_precision(&a), expect);
        }
    }

    #[test]
    fn scale_vector_examples() {
        let (x, y) = (f(3, -5), f(5, 7));
        let (ints, e) = scale_vector(&[&x, &y]);
        assert_eq!(e, 5);
        assert_eq!(ints, vec![BigInt::from(3), BigInt::from(5) << 12u32]);
        assert_eq!(ints.iter().map(BigInt::bits).max(), Some(15));
        let z = ApFloat::zero();
        let (ints, e) = scale_vector(&[&z, &z]);
        assert_eq!(e, 0);
        assert!(ints.iter().all(|v| v == &BigInt::default()));
    }

    #[test]
    fn scaling_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..300 {
            let v: Vec<ApFloat> = (0..rng.gen_range(1..10)).map(|_| rand_float(&mut rng, 300)).collect();
            let refs: Vec<&ApFloat> = v.iter().collect();
            let (ints, e) = scale_vector(&refs);
            for (x, n) in v.iter().zip(&ints) {
                assert_eq!(&ApFloat::from_bigint_scaled(n, -e).unwrap(), x);
            }
            if let Some(m) = ints.iter().filter(|n| n.bits() > 0).map(|n| n.trailing_zeros().unwrap()).min() {
                assert_eq!(m, 0, "minimal height");
            }
        }
    }

    #[test]
    fn uniform_is_one_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let gen = |rng: &mut ChaCha8Rng| {
            let limbs = [rng.gen::<u64>(), rng.gen::<u64>() | 1 << 63];
            Ball::exact(ApFloat::from_raw(rng.gen(), 0, &limbs).unwrap())
        };
        let a = BallMatrix::from_fn(60, 60, |_, _| gen(&mut rng));
        let b = BallMatrix::from_fn(60, 60, |_, _| gen(&mut rng));
        let plan = plan_blocks(&a, &b, 128);
        assert_eq!(plan.len(), 1);
        assert!(!plan[0].basecase);
        assert_eq!(plan[0].range, 0..60);
    }

    #[test]
    fn short_inner_dimension_is_basecase() {
        let a = BallMatrix::from_fn(4, 10, |i, j| Ball::from_i64((i * j) as i64));
        let b = BallMatrix::from_fn(10, 3, |i, j| Ball::from_i64((i + j) as i64));
        let plan = plan_blocks(&a, &b, 53);
        assert_eq!(plan.len(), 1);
        assert!(plan[0].basecase);
        assert_eq!(plan[0].range, 0..10);
    }

    #[test]
    fn wide_entries_force_basecase_extension() {
        // each column of A alone is wider than h
        let big = ApFloat::from_raw(false, 0, &[1; 10]).unwrap();
        let a = BallMatrix::from_fn(2, 70, |_, _| Ball::exact(big.clone()));
        let b = BallMatrix::from_fn(70, 2, |_, _| Ball::one());
        let plan = plan_blocks(&a, &b, 64);
        let lens: Vec<usize> = plan.iter().map(BlockStep::len).collect();
        assert_eq!(lens, vec![30, 30, 10]);
        assert!(plan.iter().all(|s| s.basecase));
    }

    #[test]
    fn plan_partitions_and_respects_height() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..40 {
            let (m, k, n) = (rng.gen_range(1..6), rng.gen_range(1..120), rng.gen_range(1..6));
            let spread = [10, 200, 2000][rng.gen_range(0..3)];
            let a = BallMatrix::from_fn(m, k, |_, _| Ball::exact(rand_float(&mut rng, spread)));
            let b = BallMatrix::from_fn(k, n, |_, _| Ball::exact(rand_float(&mut rng, spread)));
            let p = rng.gen_range(2..400);
            let h = height_bound(&a, &b, p);
            let plan = plan_blocks(&a, &b, p);
            let mut next = 0;
            for step in &plan {
                assert_eq!(step.range.start, next);
                next = step.range.end;
                if step.basecase {
                    continue;
                }
                assert!(step.len() >= BASECASE_LEN);
                let (ai, _) = scale_rows(&a, step.range.clone());
                let (bi, _) = scale_cols(&b, step.range.clone());
                assert!(ai.height() < h && bi.height() < h);
            }
            assert_eq!(next, k);
        }
    }

    #[test]
    fn greedy_without_basecase_makes_progress() {
        let blocks = greedy_blocks(1, 5, 1, 10, |_, t| Some((100 * t as i64, 100 * t as i64 - 20)), |_, _| None, 0);
        assert_eq!(blocks.len(), 5);
        assert!(blocks.iter().all(|(r, base)| r.len() == 1 && !base));
    }
}
