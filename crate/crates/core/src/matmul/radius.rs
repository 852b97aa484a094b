//! Upper bounds for products of nonnegative magnitude matrices using
//! scaled binary64 blocks.

use super::matrix::MagMatrix;
use super::plan::greedy_blocks;
use crate::numbers::{Mag, MAG_BITS};

/// Window height of one binary64 block.
const RADIUS_HEIGHT: u64 = 900;
/// Scaled row and column maxima sit just below `2^TARGET_TOP`.
const TARGET_TOP: i64 = 450;

fn mag_window(m: &Mag) -> Option<(i64, i64)> {
    if m.is_zero() {
        None
    } else {
        Some((m.exponent(), m.exponent() - MAG_BITS as i64))
    }
}

/// Exact `f64` value of `m * 2^shift`; the caller keeps it in range.
fn mag_to_f64(m: &Mag, shift: i64) -> f64 {
    if m.is_zero() {
        return 0.0;
    }
    let e = m.exponent() - MAG_BITS as i64 + shift;
    debug_assert!((-1000..1000).contains(&e));
    m.mantissa() as f64 * 2f64.powi(e as i32)
}

fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2 => v[0] + v[1],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

fn ceil_log2(n: usize) -> u32 {
    usize::BITS - n.saturating_sub(1).leading_zeros()
}

fn naive(p: &MagMatrix, q: &MagMatrix) -> MagMatrix {
    let mut out = MagMatrix::zeros(p.rows, q.cols);
    for i in 0..p.rows {
        for j in 0..q.cols {
            let mut s = Mag::zero();
            for t in 0..p.cols {
                s = s.add_up(&p.get(i, t).mul_up(q.get(t, j)));
            }
            out.entries[i * q.cols + j] = s;
        }
    }
    out
}

/// Entrywise upper bound for `P * Q`.
pub fn radius_matmul_upper(p: &MagMatrix, q: &MagMatrix) -> MagMatrix {
    assert_eq!(p.cols, q.rows, "inner dimensions differ");
    let (m, inner, n) = (p.rows, p.cols, q.cols);
    if p.is_zero() || q.is_zero() {
        return MagMatrix::zeros(m, n);
    }
    if p.entries.iter().chain(&q.entries).any(Mag::is_inf) {
        return naive(p, q);
    }
    let mut out = MagMatrix::zeros(m, n);
    let blocks = greedy_blocks(
        m,
        inner,
        n,
        RADIUS_HEIGHT,
        |i, t| mag_window(p.get(i, t)),
        |t, j| mag_window(q.get(t, j)),
        0,
    );
    let mut a = Vec::new();
    let mut bt = Vec::new();
    let mut prods = Vec::new();
    for (range, _) in blocks {
        let len = range.len();
        // s[i]: row shifts of P, t[j]: column shifts of Q
        let s: Vec<i64> = (0..m)
            .map(|i| range.clone().filter_map(|k| mag_window(p.get(i, k))).map(|w| w.0).max())
            .map(|top| top.map_or(0, |top| TARGET_TOP - top))
            .collect();
        let t: Vec<i64> = (0..n)
            .map(|j| range.clone().filter_map(|k| mag_window(q.get(k, j))).map(|w| w.0).max())
            .map(|top| top.map_or(0, |top| TARGET_TOP - top))
            .collect();
        a.clear();
        for i in 0..m {
            a.extend(range.clone().map(|k| mag_to_f64(p.get(i, k), s[i])));
        }
        bt.clear();
        for j in 0..n {
            bt.extend(range.clone().map(|k| mag_to_f64(q.get(k, j), t[j])));
        }
        let levels = ceil_log2(len) as i32 + 1;
        let inflate = (1.0 + 2f64.powi(-45)).powi(levels);
        for i in 0..m {
            let row = &a[i * len..(i + 1) * len];
            if row.iter().all(|&x| x == 0.0) {
                continue;
            }
            for j in 0..n {
                let col = &bt[j * len..(j + 1) * len];
                prods.clear();
                prods.extend(row.iter().zip(col).map(|(x, y)| x * y));
                let v = pairwise_sum(&prods);
                if v == 0.0 {
                    continue;
                }
                let bound = (v * inflate).next_up();
                let r = Mag::from_f64_upper(bound).mul_2exp(-s[i] - t[j]);
                let e = &mut out.entries[i * n + j];
                *e = e.add_up(&r);
            }
        }
    }
    out
}
