//! Word-array arithmetic on little-endian 64-bit limbs.
//!
//! Everything here works on caller-owned slices: `limbs[0]` is the least
//! significant word and a slice denotes `sum(limbs[k] * 2^(64 k))`. No
//! normalization is imposed at this layer.

/// A single machine word of a multi-word integer.
pub type Limb = u64;

/// Bits per limb.
pub const LIMB_BITS: u32 = 64;

#[inline(always)]
fn mac(acc: Limb, a: Limb, b: Limb, carry: Limb) -> (Limb, Limb) {
    let wide = (a as u128) * (b as u128) + (acc as u128) + (carry as u128);
    (wide as Limb, (wide >> 64) as Limb)
}

/// Writes the exact product `a * b` into `out[..a.len() + b.len()]`.
///
/// `out` must not alias either input.
pub fn mul_into(out: &mut [Limb], a: &[Limb], b: &[Limb]) {
    let n = a.len() + b.len();
    debug_assert!(!a.is_empty() && !b.is_empty());
    debug_assert!(out.len() >= n);
    let out = &mut out[..n];
    out.fill(0);
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        let mut carry = 0;
        for (j, &bj) in b.iter().enumerate() {
            let (lo, hi) = mac(out[i + j], ai, bj, carry);
            out[i + j] = lo;
            carry = hi;
        }
        out[i + b.len()] = carry;
    }
}

/// Exact `(a.len() + b.len())`-limb product.
pub fn mul_limbs(a: &[Limb], b: &[Limb]) -> Vec<Limb> {
    let mut out = vec![0; a.len() + b.len()];
    mul_into(&mut out, a, b);
    out
}

/// Adds (or subtracts, when `negate`) `t * 2^(64 offset)` into `s`.
///
/// The carry or borrow out of the window `s[offset..offset + t.len()]` is
/// propagated through at most `carry_span` limbs above it. A carry leaving the
/// top limb of `s` is dropped, which gives two's complement wraparound. A carry
/// that is still pending when the span ends below the top of `s` violates the
/// caller contract.
pub fn add_signed_range(
    s: &mut [Limb],
    t: &[Limb],
    offset: usize,
    carry_span: usize,
    negate: bool,
) {
    let end = offset + t.len();
    debug_assert!(end <= s.len());
    debug_assert!(end + carry_span <= s.len());
    let window = &mut s[offset..end];
    let mut carry = false;
    if negate {
        for (x, &y) in window.iter_mut().zip(t) {
            let (d, b1) = x.overflowing_sub(y);
            let (d, b2) = d.overflowing_sub(carry as Limb);
            *x = d;
            carry = b1 | b2;
        }
        let mut k = end;
        while carry && k < end + carry_span {
            let (d, b) = s[k].overflowing_sub(1);
            s[k] = d;
            carry = b;
            k += 1;
        }
    } else {
        for (x, &y) in window.iter_mut().zip(t) {
            let (d, c1) = x.overflowing_add(y);
            let (d, c2) = d.overflowing_add(carry as Limb);
            *x = d;
            carry = c1 | c2;
        }
        let mut k = end;
        while carry && k < end + carry_span {
            let (d, c) = s[k].overflowing_add(1);
            s[k] = d;
            carry = c;
            k += 1;
        }
    }
    debug_assert!(
        !carry || end + carry_span == s.len(),
        "carry escaped the permitted span"
    );
}

/// Writes `t * 2^(64 - bits)` into `out[..t.len() + 1]`, i.e. `t` shifted
/// right by `bits` with the shifted-out bits kept in a new bottom limb.
pub fn rshift_bits_into(out: &mut [Limb], t: &[Limb], bits: u32) {
    debug_assert!((1..LIMB_BITS).contains(&bits));
    let n = t.len();
    debug_assert!(out.len() > n);
    let up = LIMB_BITS - bits;
    out[0] = t[0] << up;
    for k in 1..n {
        out[k] = (t[k] << up) | (t[k - 1] >> bits);
    }
    out[n] = t[n - 1] >> bits;
}

/// Right shift by `bits` (1..=63) into a `t.len() + 1`-limb result; the value
/// is preserved exactly, `result * 2^bits == t * 2^64`.
pub fn rshift_bits(t: &[Limb], bits: u32) -> Vec<Limb> {
    let mut out = vec![0; t.len() + 1];
    rshift_bits_into(&mut out, t, bits);
    out
}

/// Two's complement negation: `s <- 2^(64 len) - s`.
pub fn neg_in_place(s: &mut [Limb]) {
    let mut borrow = true;
    for x in s.iter_mut() {
        let inv = !*x;
        let (v, c) = inv.overflowing_add(borrow as Limb);
        *x = v;
        borrow = c;
    }
}

/// The top `k` limbs of `a * b`, possibly one unit too small in the lowest
/// returned limb. Returns the limbs and the error bound in ulps (0 or 1).
///
/// Partial products that only influence limbs more than two positions below
/// the requested window are skipped. The dropped mass is below one unit of
/// the lowest returned limb, so the truncated short product is either exact
/// or one unit low.
pub fn mulhigh_approx(a: &[Limb], b: &[Limb], k: usize) -> (Vec<Limb>, u32) {
    let n = a.len() + b.len();
    assert!(k >= 1 && k <= n, "mulhigh_approx: k out of range");
    // Columns below `cut` are not computed at all.
    let cut = n.saturating_sub(k + 2);
    if cut == 0 {
        let full = mul_limbs(a, b);
        return (full[n - k..].to_vec(), 0);
    }
    let mut acc = vec![0 as Limb; n - cut + 1];
    for (i, &ai) in a.iter().enumerate() {
        // Column i + j lands in acc[i + j - cut] when it is >= cut.
        let j0 = cut.saturating_sub(i);
        if j0 >= b.len() || ai == 0 {
            continue;
        }
        let mut carry = 0;
        for j in j0..b.len() {
            let idx = i + j - cut;
            let (lo, hi) = mac(acc[idx], ai, b[j], carry);
            acc[idx] = lo;
            carry = hi;
        }
        let mut idx = i + b.len() - cut;
        while carry != 0 {
            let (v, c) = acc[idx].overflowing_add(carry);
            acc[idx] = v;
            carry = c as Limb;
            idx += 1;
        }
    }
    debug_assert_eq!(acc[n - cut], 0);
    (acc[n - cut - k..n - cut].to_vec(), 1)
}

/// Number of significant bits of a limb array (0 for zero).
pub fn bit_length(t: &[Limb]) -> u64 {
    match t.iter().rposition(|&x| x != 0) {
        Some(i) => 64 * i as u64 + (64 - t[i].leading_zeros()) as u64,
        None => 0,
    }
}

/// Compares two equal-length magnitudes.
pub(crate) fn cmp_same_len(a: &[Limb], b: &[Limb]) -> std::cmp::Ordering {
    debug_assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        if x != y {
            return x.cmp(y);
        }
    }
    std::cmp::Ordering::Equal
}

/// `a += b` over equal lengths; returns the carry out.
pub(crate) fn add_assign_n(a: &mut [Limb], b: &[Limb]) -> bool {
    let mut carry = false;
    for (x, &y) in a.iter_mut().zip(b) {
        let (d, c1) = x.overflowing_add(y);
        let (d, c2) = d.overflowing_add(carry as Limb);
        *x = d;
        carry = c1 | c2;
    }
    carry
}

/// `a -= b` over equal lengths; returns the borrow out.
pub(crate) fn sub_assign_n(a: &mut [Limb], b: &[Limb]) -> bool {
    let mut borrow = false;
    for (x, &y) in a.iter_mut().zip(b) {
        let (d, b1) = x.overflowing_sub(y);
        let (d, b2) = d.overflowing_sub(borrow as Limb);
        *x = d;
        borrow = b1 | b2;
    }
    borrow
}

/// ORs `src << bit_offset` into `dst`. Bits past the end of `dst` must be zero.
pub(crate) fn or_shifted(dst: &mut [Limb], src: &[Limb], bit_offset: u64) {
    let limb_off = (bit_offset / 64) as usize;
    let bits = (bit_offset % 64) as u32;
    if bits == 0 {
        for (k, &x) in src.iter().enumerate() {
            dst[limb_off + k] |= x;
        }
    } else {
        for (k, &x) in src.iter().enumerate() {
            dst[limb_off + k] |= x << bits;
            let hi = x >> (64 - bits);
            if hi != 0 {
                dst[limb_off + k + 1] |= hi;
            }
        }
    }
}

/// Multiplies `a` in place by a single word and returns the carry limb.
pub(crate) fn mul_1_in_place(a: &mut [Limb], m: Limb) -> Limb {
    let mut carry = 0;
    for x in a.iter_mut() {
        let (lo, hi) = mac(0, *x, m, carry);
        *x = lo;
        carry = hi;
    }
    carry
}

/// Divides `a` in place by `d` (most significant limb first) and returns the
/// remainder.
pub(crate) fn divrem_1_in_place(a: &mut [Limb], d: Limb) -> Limb {
    debug_assert!(d != 0);
    let mut rem: u128 = 0;
    for x in a.iter_mut().rev() {
        let cur = (rem << 64) | (*x as u128);
        *x = (cur / d as u128) as Limb;
        rem = cur % d as u128;
    }
    rem as Limb
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn big(t: &[Limb]) -> BigUint {
        let mut v = BigUint::default();
        for &x in t.iter().rev() {
            v = (v << 64u32) + BigUint::from(x);
        }
        v
    }

    fn rand_limbs(rng: &mut ChaCha8Rng, n: usize) -> Vec<Limb> {
        (0..n)
            .map(|_| match rng.gen_range(0..8) {
                0 => 0,
                1 => u64::MAX,
                _ => rng.gen(),
            })
            .collect()
    }

    #[test]
    fn mul_small_cases() {
        assert_eq!(mul_limbs(&[5], &[7]), vec![35, 0]);
        assert_eq!(
            mul_limbs(&[u64::MAX], &[u64::MAX]),
            vec![1, u64::MAX - 1]
        );
    }

    #[test]
    fn mul_matches_bigint() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..2000 {
            let na = rng.gen_range(1..6);
            let nb = rng.gen_range(1..6);
            let a = rand_limbs(&mut rng, na);
            let b = rand_limbs(&mut rng, nb);
            let p = mul_limbs(&a, &b);
            assert_eq!(p.len(), na + nb);
            assert_eq!(big(&p), big(&a) * big(&b));
        }
    }

    #[test]
    fn shifted_add_and_borrow_ripple() {
        let mut s = [0, 0, 0];
        add_signed_range(&mut s, &[1], 1, 1, false);
        assert_eq!(s, [0, 1, 0]);

        let mut s = [0, 0, 1];
        add_signed_range(&mut s, &[1], 0, 2, true);
        assert_eq!(s, [u64::MAX, u64::MAX, 0]);
    }

    #[test]
    fn add_then_subtract_restores() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10_000 {
            let n = rng.gen_range(1..7);
            let s0 = rand_limbs(&mut rng, n);
            let tl = rng.gen_range(1..=n);
            let t = rand_limbs(&mut rng, tl);
            let offset = rng.gen_range(0..=n - tl);
            let span = n - offset - tl;
            let mut s = s0.clone();
            let neg_first = rng.gen();
            add_signed_range(&mut s, &t, offset, span, neg_first);
            add_signed_range(&mut s, &t, offset, span, !neg_first);
            assert_eq!(s, s0);
        }
    }

    #[test]
    fn wraparound_at_top_is_twos_complement() {
        let mut s = [u64::MAX, u64::MAX];
        add_signed_range(&mut s, &[1], 0, 1, false);
        assert_eq!(s, [0, 0]);
    }

    #[test]
    fn rshift_examples() {
        assert_eq!(rshift_bits(&[1], 1), vec![1 << 63, 0]);
        assert_eq!(rshift_bits(&[0, 1], 4), vec![0, 1 << 60, 0]);
    }

    #[test]
    fn rshift_preserves_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let n = rng.gen_range(1..6);
            let t = rand_limbs(&mut rng, n);
            let bits = rng.gen_range(1..64);
            let r = rshift_bits(&t, bits);
            assert_eq!(big(&r) << bits, big(&t) << 64u32);
        }
    }

    #[test]
    fn negation() {
        let mut s = [1, 0];
        neg_in_place(&mut s);
        assert_eq!(s, [u64::MAX, u64::MAX]);
        let mut z = [0, 0];
        neg_in_place(&mut z);
        assert_eq!(z, [0, 0]);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10_000 {
            let n = rng.gen_range(1..6);
            let s0 = rand_limbs(&mut rng, n);
            let mut s = s0.clone();
            neg_in_place(&mut s);
            let modulus = BigUint::from(1u32) << (64 * n);
            assert_eq!((big(&s) + big(&s0)) % &modulus, BigUint::default());
            neg_in_place(&mut s);
            assert_eq!(s, s0);
        }
    }

    #[test]
    fn mulhigh_examples() {
        let a = [3, 9, 27];
        let b = [5, 25];
        let (p, e) = mulhigh_approx(&a, &b, 5);
        assert_eq!((p, e), (mul_limbs(&a, &b), 0));

        let (p, e) = mulhigh_approx(&[1 << 63], &[1 << 63], 1);
        assert_eq!(p, vec![1 << 62]);
        assert!(e <= 1);
    }

    #[test]
    fn mulhigh_error_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..10_000 {
            let (na, nb) = if trial < 200 {
                (8, 8)
            } else {
                (rng.gen_range(1..12), rng.gen_range(1..12))
            };
            let a = rand_limbs(&mut rng, na);
            let b = rand_limbs(&mut rng, nb);
            let k = if trial < 200 { 9 } else { rng.gen_range(1..=na + nb) };
            let (approx, err) = mulhigh_approx(&a, &b, k);
            assert_eq!(approx.len(), k);
            let exact = mul_limbs(&a, &b);
            let top = big(&exact[na + nb - k..]);
            let got = big(&approx);
            assert!(got <= top);
            assert!(&top - &got <= BigUint::from(err));
        }
    }

    #[test]
    fn divrem_and_mul1_roundtrip() {
        let mut a = vec![7, 11, 13];
        let orig = a.clone();
        let c = mul_1_in_place(&mut a, 1_000_003);
        assert_eq!(c, 0);
        assert_eq!(divrem_1_in_place(&mut a, 1_000_003), 0);
        assert_eq!(a, orig);
    }
}
