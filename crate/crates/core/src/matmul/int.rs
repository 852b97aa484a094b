//! Exact integer matrix products, classically and modulo word-size primes.

use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::limb::{mul_1_in_place, Limb};

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        IntMatrix { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::from(1);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    /// Bit length of the largest entry.
    pub fn height(&self) -> u64 {
        self.entries.iter().map(BigInt::bits).max().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntAlgo {
    Classical,
    Multimodular,
}

pub fn int_matmul(a: &IntMatrix, b: &IntMatrix, algo: IntAlgo) -> Result<IntMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            left_rows: a.rows,
            left_cols: a.cols,
            right_rows: b.rows,
            right_cols: b.cols,
        });
    }
    Ok(match algo {
        IntAlgo::Classical => classical(a, b),
        IntAlgo::Multimodular => {
            let mut out = IntMatrix::zeros(a.rows, b.cols);
            multimodular_emit(a, b, |i, j, negative, limbs| {
                let mag = BigUint::from_slice(&to_u32(limbs));
                let sign = if negative { Sign::Minus } else { Sign::Plus };
                out.entries[i * b.cols + j] = BigInt::from_biguint(sign, mag);
            });
            out
        }
    })
}

fn classical(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let mut out = IntMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for j in 0..b.cols {
            let mut s = BigInt::zero();
            for t in 0..a.cols {
                let (x, y) = (a.get(i, t), b.get(t, j));
                if !x.is_zero() && !y.is_zero() {
                    s += x * y;
                }
            }
            out.entries[i * b.cols + j] = s;
        }
    }
    out
}

fn to_u32(limbs: &[Limb]) -> Vec<u32> {
    limbs.iter().flat_map(|&x| [x as u32, (x >> 32) as u32]).collect()
}

// ---------------------------------------------------------------------------
// Word-size prime arithmetic

/// A prime just below `2^62` with the constants used for fast reduction.
#[derive(Clone, Copy, Debug)]
struct Modulus {
    p: u64,
    /// `2^64 mod p`; small because `p` is close to `2^62`.
    c: u64,
}

impl Modulus {
    fn new(p: u64) -> Self {
        let c = ((1u128 << 64) % p as u128) as u64;
        debug_assert!(c < 1 << 24);
        Modulus { p, c }
    }

    /// Replaces `hi * 2^64 + lo` by `hi * c + lo`, preserving the residue.
    #[inline(always)]
    fn fold(&self, x: u128) -> u128 {
        (x >> 64) * self.c as u128 + (x as u64) as u128
    }

    #[inline]
    fn reduce(&self, mut x: u128) -> u64 {
        while x >> 64 != 0 {
            x = self.fold(x);
        }
        (x as u64) % self.p
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }

    fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    fn inv(&self, a: u64) -> u64 {
        self.pow(a % self.p, self.p - 2)
    }

    /// Residue of a big integer.
    fn residue(&self, v: &BigInt) -> u64 {
        let mut r: u64 = 0;
        let digits: Vec<u64> = v.magnitude().iter_u64_digits().collect();
        for &d in digits.iter().rev() {
            r = self.reduce(((r as u128) << 64) | d as u128);
        }
        if v.sign() == Sign::Minus && r != 0 {
            self.p - r
        } else {
            r
        }
    }
}

/// Multiplication by a fixed `w` modulo `p` with a precomputed quotient
/// estimate (valid for `p < 2^63`).
#[derive(Clone, Copy, Debug)]
struct ShoupMul {
    w: u64,
    w_pre: u64,
}

impl ShoupMul {
    fn new(w: u64, p: u64) -> Self {
        ShoupMul {
            w,
            w_pre: (((w as u128) << 64) / p as u128) as u64,
        }
    }

    #[inline(always)]
    fn mul(&self, x: u64, p: u64) -> u64 {
        let q = ((x as u128 * self.w_pre as u128) >> 64) as u64;
        let r = x.wrapping_mul(self.w).wrapping_sub(q.wrapping_mul(p));
        if r >= p {
            r - p
        } else {
            r
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, a);
            }
            a = mulmod(a, a);
            e >>= 1;
        }
        r
    };
    // These bases are a deterministic test for all 64-bit integers.
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// The first `k` primes below `2^62`, in decreasing order.
pub fn word_primes(k: usize) -> Vec<u64> {
    static CACHE: OnceLock<Mutex<Vec<u64>>> = OnceLock::new();
    let mut list = CACHE.get_or_init(|| Mutex::new(Vec::new())).lock().unwrap();
    let mut candidate = list.last().map_or((1 << 62) - 1, |&p| p - 2);
    while list.len() < k {
        if is_prime(candidate) {
            list.push(candidate);
        }
        candidate -= 2;
    }
    list[..k].to_vec()
}

/// Number of primes whose product exceeds `2 * inner * 2^(ha + hb)`.
pub fn primes_needed(inner: usize, ha: u64, hb: u64) -> usize {
    let bits = 2 + (64 - (inner as u64).leading_zeros()) as u64 + ha + hb;
    bits.div_ceil(61).max(1) as usize
}

/// Garner reconstruction into the symmetric range.
struct Crt {
    mods: Vec<Modulus>,
    /// `inv[i][j]` multiplies by `p_j^{-1} mod p_i` for `j < i`.
    inv: Vec<Vec<ShoupMul>>,
    /// `floor(P / 2)` and `P` as limbs.
    half: Vec<Limb>,
    full: Vec<Limb>,
}

impl Crt {
    fn new(primes: &[u64]) -> Self {
        let mods: Vec<Modulus> = primes.iter().map(|&p| Modulus::new(p)).collect();
        let inv = mods
            .iter()
            .enumerate()
            .map(|(i, mi)| (0..i).map(|j| ShoupMul::new(mi.inv(primes[j]), mi.p)).collect())
            .collect();
        let mut full = vec![0 as Limb; primes.len() + 1];
        full[0] = 1;
        for &p in primes {
            let c = mul_1_in_place(&mut full, p);
            debug_assert_eq!(c, 0);
        }
        let mut half = full.clone();
        let mut carry = 0;
        for w in half.iter_mut().rev() {
            let next = *w & 1;
            *w = (*w >> 1) | (carry << 63);
            carry = next;
        }
        Crt { mods, inv, half, full }
    }

    /// Writes `|x|` into `out` (k + 1 limbs) and returns the sign of the
    /// symmetric representative `x` of the given residues.
    fn reconstruct(&self, residues: &[u64], digits: &mut [u64], out: &mut [Limb]) -> bool {
        let k = self.mods.len();
        for i in 0..k {
            let p = self.mods[i].p;
            let mut x = residues[i];
            for j in 0..i {
                let v = if digits[j] >= p { digits[j] - p } else { digits[j] };
                let d = if x >= v { x - v } else { x + p - v };
                x = self.inv[i][j].mul(d, p);
            }
            digits[i] = x;
        }
        out.fill(0);
        out[0] = digits[k - 1];
        for i in (0..k - 1).rev() {
            mul_1_in_place(out, self.mods[i].p);
            let mut carry = digits[i];
            for w in out.iter_mut() {
                let (s, c) = w.overflowing_add(carry);
                *w = s;
                carry = c as u64;
                if carry == 0 {
                    break;
                }
            }
        }
        if cmp_limbs(out, &self.half) == std::cmp::Ordering::Greater {
            // |x| = P - out
            let mut borrow = false;
            for (w, &f) in out.iter_mut().zip(&self.full) {
                let (d, b1) = f.overflowing_sub(*w);
                let (d, b2) = d.overflowing_sub(borrow as u64);
                *w = d;
                borrow = b1 | b2;
            }
            true
        } else {
            false
        }
    }
}

fn cmp_limbs(a: &[Limb], b: &[Limb]) -> std::cmp::Ordering {
    for k in (0..a.len()).rev() {
        match a[k].cmp(&b[k]) {
            std::cmp::Ordering::Equal => {}
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Sum of `a[t] * b[t]` modulo `m`, with the double-word accumulator folded
/// after every 8 products.
#[inline]
fn residue_dot(a: &[u64], b: &[u64], m: &Modulus) -> u64 {
    let mut acc: u128 = 0;
    let mut ca = a.chunks_exact(8);
    let mut cb = b.chunks_exact(8);
    for (x, y) in (&mut ca).zip(&mut cb) {
        let mut s: u128 = 0;
        for t in 0..8 {
            s += x[t] as u128 * y[t] as u128;
        }
        acc = m.fold(m.fold(acc) + s);
    }
    let mut s: u128 = 0;
    for (&x, &y) in ca.remainder().iter().zip(cb.remainder()) {
        s += x as u128 * y as u128;
    }
    m.reduce(m.fold(acc) + s)
}

/// Splits `0..len` into `parts` nearly equal consecutive ranges.
fn split_ranges(len: usize, parts: usize) -> Vec<std::ops::Range<usize>> {
    let parts = parts.clamp(1, len.max(1));
    (0..parts).map(|q| q * len / parts..(q + 1) * len / parts).collect()
}

/// Pieces for a dimension so that each piece is at most twice `smallest`.
fn pieces(dim: usize, smallest: usize) -> usize {
    dim.div_ceil(2 * smallest.max(1))
}

/// Exact product `a * b` by multimodular arithmetic; each entry is passed to
/// `emit(i, j, negative, magnitude_limbs)`. Zero entries are emitted with a
/// zero magnitude.
///
/// The product is computed in roughly square pieces whose dimensions are
/// within a factor two of each other; the residues of the inputs are
/// computed once and shared by all pieces.
pub(crate) fn multimodular_emit(a: &IntMatrix, b: &IntMatrix, mut emit: impl FnMut(usize, usize, bool, &[Limb])) {
    let (m, inner, n) = (a.rows, a.cols, b.cols);
    if m == 0 || n == 0 {
        return;
    }
    let (ha, hb) = (a.height(), b.height());
    if inner == 0 || ha == 0 || hb == 0 {
        for i in 0..m {
            for j in 0..n {
                emit(i, j, false, &[0]);
            }
        }
        return;
    }
    let k = primes_needed(inner, ha, hb);
    let primes = word_primes(k);
    let crt = Crt::new(&primes);

    // Residues of A row-major and of B transposed, one plane per prime.
    let mut ar = vec![0u64; k * m * inner];
    let mut br = vec![0u64; k * n * inner];
    for i in 0..m {
        for t in 0..inner {
            let v = a.get(i, t);
            if v.is_zero() {
                continue;
            }
            for (q, md) in crt.mods.iter().enumerate() {
                ar[(q * m + i) * inner + t] = md.residue(v);
            }
        }
    }
    for t in 0..inner {
        for j in 0..n {
            let v = b.get(t, j);
            if v.is_zero() {
                continue;
            }
            for (q, md) in crt.mods.iter().enumerate() {
                br[(q * n + j) * inner + t] = md.residue(v);
            }
        }
    }

    let smallest = m.min(n).min(inner);
    let row_parts = split_ranges(m, pieces(m, smallest));
    let col_parts = split_ranges(n, pieces(n, smallest));
    let inner_parts = split_ranges(inner, pieces(inner, smallest));

    let mut res = vec![0u64; k];
    let mut digits = vec![0u64; k];
    let mut out = vec![0 as Limb; k + 1];
    let mut block = Vec::new();
    for rows in &row_parts {
        for cols in &col_parts {
            // residues of this output piece, prime-major
            block.clear();
            block.resize(k * rows.len() * cols.len(), 0u64);
            for (q, md) in crt.mods.iter().enumerate() {
                for (bi, i) in rows.clone().enumerate() {
                    let arow = &ar[(q * m + i) * inner..(q * m + i + 1) * inner];
                    for (bj, j) in cols.clone().enumerate() {
                        let bcol = &br[(q * n + j) * inner..(q * n + j + 1) * inner];
                        let mut acc = 0u64;
                        for ts in &inner_parts {
                            let r = residue_dot(&arow[ts.clone()], &bcol[ts.clone()], md);
                            acc = (acc + r) % md.p;
                        }
                        block[(q * rows.len() + bi) * cols.len() + bj] = acc;
                    }
                }
            }
            for (bi, i) in rows.clone().enumerate() {
                for (bj, j) in cols.clone().enumerate() {
                    for q in 0..k {
                        res[q] = block[(q * rows.len() + bi) * cols.len() + bj];
                    }
                    let negative = crt.reconstruct(&res, &mut digits, &mut out);
                    emit(i, j, negative, &out);
                }
            }
        }
    }
}
