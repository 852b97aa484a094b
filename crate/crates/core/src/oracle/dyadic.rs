//! Exact dyadic numbers whose bits may be spread over a huge exponent range.
//!
//! A value is stored as a sum of chunks `m * 2^e` separated by gaps of at
//! least two zero bits. Far-apart chunks are never merged, so a sum such as
//! `2^(2^40) + 2^(-2^40)` costs two small integers instead of 2^41 bits.
//! With the gap invariant the sign of the whole sum is the sign of its top
//! chunk.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, Zero};

use super::rational::dyadic_parts;
use crate::numbers::{ApFloat, Ball, Mag};

const GAP: i64 = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Chunk {
    m: BigInt,
    e: i64,
}

impl Chunk {
    fn top(&self) -> i64 {
        self.e + self.m.bits() as i64
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseDyadic {
    // Sorted by decreasing exponent; every `m` is odd.
    chunks: Vec<Chunk>,
}

impl SparseDyadic {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `m * 2^e`.
    pub fn from_parts(m: BigInt, e: i64) -> Self {
        Self::normalized(vec![Chunk { m, e }])
    }

    /// Exact value of a finite float.
    pub fn from_apfloat(x: &ApFloat) -> Self {
        if x.is_zero() {
            return Self::zero();
        }
        assert!(x.is_regular(), "non-finite value has no dyadic form");
        let (m, e) = dyadic_parts(x);
        Self::from_parts(m, e)
    }

    /// Exact value of a finite magnitude.
    pub fn from_mag(r: &Mag) -> Self {
        let (man, e) = r.to_scaled_int().expect("finite magnitude");
        Self::from_parts(BigInt::from(man), e)
    }

    fn normalized(mut chunks: Vec<Chunk>) -> Self {
        chunks.retain(|c| !c.m.is_zero());
        for c in chunks.iter_mut() {
            make_odd(c);
        }
        loop {
            chunks.sort_by_key(|c| std::cmp::Reverse(c.top()));
            let mut out: Vec<Chunk> = Vec::with_capacity(chunks.len());
            let mut changed = false;
            for c in chunks {
                match out.last_mut() {
                    Some(last) if c.top() + GAP > last.e => {
                        let e = last.e.min(c.e);
                        let m = (&last.m << ((last.e - e) as u64)) + (&c.m << ((c.e - e) as u64));
                        changed = true;
                        if m.is_zero() {
                            out.pop();
                        } else {
                            *last = Chunk { m, e };
                            make_odd(last);
                        }
                    }
                    _ => out.push(c),
                }
            }
            chunks = out;
            if !changed {
                break;
            }
        }
        SparseDyadic { chunks }
    }

    pub fn is_zero(&self) -> bool {
        self.chunks.is_empty()
    }

    pub fn sign(&self) -> Ordering {
        match self.chunks.first() {
            None => Ordering::Equal,
            Some(c) if c.m.sign() == Sign::Minus => Ordering::Less,
            Some(_) => Ordering::Greater,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut v = self.chunks.clone();
        v.extend(other.chunks.iter().cloned());
        Self::normalized(v)
    }

    pub fn neg(&self) -> Self {
        SparseDyadic {
            chunks: self
                .chunks
                .iter()
                .map(|c| Chunk {
                    m: -&c.m,
                    e: c.e,
                })
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut v = Vec::with_capacity(self.chunks.len() * other.chunks.len());
        for a in &self.chunks {
            for b in &other.chunks {
                v.push(Chunk {
                    m: &a.m * &b.m,
                    e: a.e + b.e,
                });
            }
        }
        Self::normalized(v)
    }

    pub fn abs(&self) -> Self {
        if self.sign() == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Exponent `t` with `|x| < 2^t`, or `None` for zero.
    pub fn top_exponent(&self) -> Option<i64> {
        self.chunks.first().map(|c| c.top())
    }

    pub fn mul_2exp(&self, k: i64) -> Self {
        SparseDyadic {
            chunks: self
                .chunks
                .iter()
                .map(|c| Chunk {
                    m: c.m.clone(),
                    e: c.e + k,
                })
                .collect(),
        }
    }

    /// Number of separate chunks (diagnostics).
    pub fn chunk_count(&self) -> usize {
        self.chunks.len()
    }
}

fn make_odd(c: &mut Chunk) {
    if let Some(tz) = c.m.trailing_zeros() {
        if tz > 0 {
            c.m >>= tz;
            c.e += tz as i64;
        }
    }
}

impl PartialOrd for SparseDyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SparseDyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sub(other).sign()
    }
}

/// Closed interval with exact dyadic endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicInterval {
    pub lo: SparseDyadic,
    pub hi: SparseDyadic,
}

impl DyadicInterval {
    pub fn point(v: SparseDyadic) -> Self {
        DyadicInterval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn zero() -> Self {
        Self::point(SparseDyadic::zero())
    }

    /// `[mid - rad, mid + rad]` of a finite ball.
    pub fn from_ball(b: &Ball) -> Self {
        let m = SparseDyadic::from_apfloat(&b.mid);
        if b.rad.is_zero() {
            return Self::point(m);
        }
        let r = SparseDyadic::from_mag(&b.rad);
        DyadicInterval {
            lo: m.sub(&r),
            hi: m.add(&r),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        DyadicInterval {
            lo: self.lo.add(&other.lo),
            hi: self.hi.add(&other.hi),
        }
    }

    pub fn neg(&self) -> Self {
        DyadicInterval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.lo == self.hi && other.lo == other.hi {
            return Self::point(self.lo.mul(&other.lo));
        }
        let c = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        DyadicInterval { lo, hi }
    }

    pub fn contains(&self, v: &SparseDyadic) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    /// Whether the interval lies inside the ball. Indeterminate balls and
    /// infinite radii contain everything; an infinite midpoint contains
    /// nothing finite.
    pub fn is_subset_of_ball(&self, b: &Ball) -> bool {
        if b.mid.is_nan() || b.rad.is_inf() {
            return true;
        }
        if !b.mid.is_finite() {
            return false;
        }
        let outer = DyadicInterval::from_ball(b);
        outer.lo <= self.lo && self.hi <= outer.hi
    }

    /// Whether the interval intersects the ball.
    pub fn overlaps_ball(&self, b: &Ball) -> bool {
        if b.mid.is_nan() || b.rad.is_inf() {
            return true;
        }
        let outer = DyadicInterval::from_ball(b);
        outer.lo <= self.hi && self.lo <= outer.hi
    }
}

/// Exact hull of `sum(x_i * y_i)` over finite balls.
pub fn ball_hull_dot(terms: &[(&Ball, &Ball)]) -> DyadicInterval {
    terms.iter().fold(DyadicInterval::zero(), |acc, (x, y)| {
        acc.add(&DyadicInterval::from_ball(x).mul(&DyadicInterval::from_ball(y)))
    })
}

/// Sum of `|x_i * y_i|` over midpoints, exactly.
pub fn abs_product_sum(terms: &[(&ApFloat, &ApFloat)]) -> SparseDyadic {
    terms.iter().fold(SparseDyadic::zero(), |acc, (x, y)| {
        acc.add(&SparseDyadic::from_apfloat(x).mul(&SparseDyadic::from_apfloat(y)).abs())
    })
}

impl SparseDyadic {
    /// The value as a single integer times a power of two, when it spans at
    /// most `max_bits` bits.
    pub fn to_dense(&self, max_bits: u64) -> Option<(BigInt, i64)> {
        let (first, last) = match (self.chunks.first(), self.chunks.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Some((BigInt::zero(), 0)),
        };
        if (first.top() - last.e) as u64 > max_bits {
            return None;
        }
        let e = last.e;
        let m = self
            .chunks
            .iter()
            .fold(BigInt::zero(), |acc, c| acc + (&c.m << ((c.e - e) as u64)));
        Some((m, e))
    }

    pub fn is_negative(&self) -> bool {
        self.chunks.first().is_some_and(|c| c.m.is_negative())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> SparseDyadic {
        SparseDyadic::from_parts(BigInt::from(m), e)
    }

    #[test]
    fn far_apart_chunks_stay_separate() {
        let big = d(1, 1 << 40);
        let tiny = d(1, -(1 << 40));
        let s = big.add(&tiny);
        assert_eq!(s.chunk_count(), 2);
        assert_eq!(s.sub(&big), tiny);
        assert!(s > big);
        assert!(big.sub(&tiny) < big);
        assert!(big.sub(&tiny) > big.sub(&tiny.mul_2exp(1)));
    }

    #[test]
    fn merging_and_cancellation() {
        let a = d(3, 0).add(&d(5, 1));
        assert_eq!(a, d(13, 0));
        assert!(d(7, 10).sub(&d(7, 10)).is_zero());
        assert_eq!(d(-1, 0).add(&d(1, 100)).sign(), Ordering::Greater);
        assert_eq!(d(-1, 100).add(&d(1, 0)).sign(), Ordering::Less);
        // carry brings two chunks together
        let x = d(1, 0).add(&d(-1, 50)).add(&d(1, 50));
        assert_eq!(x, d(1, 0));
    }

    #[test]
    fn interval_products() {
        let a = DyadicInterval {
            lo: d(-1, 0),
            hi: d(1, 0),
        };
        let p = a.mul(&a);
        assert_eq!(p.lo, d(-1, 0));
        assert_eq!(p.hi, d(1, 0));
    }

    #[test]
    fn dense_view() {
        let x = d(3, 4).add(&d(1, 0));
        assert_eq!(x.to_dense(64), Some((BigInt::from(49), 0)));
        assert_eq!(d(1, 1000).add(&d(1, 0)).to_dense(64), None);
    }
}
