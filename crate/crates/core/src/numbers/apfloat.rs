use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use smallvec::SmallVec;

use super::mag::Mag;
use crate::error::{Error, Result};
use crate::limb::{self, Limb};

/// Mantissa storage; one- and two-limb values stay inline.
pub type Limbs = SmallVec<[Limb; 2]>;

type Scratch = SmallVec<[Limb; 8]>;

/// Largest supported exponent magnitude. Sums of two exponents never
/// overflow an `i64`.
pub const EXP_LIMIT: i64 = 1 << 61;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Class {
    Zero,
    Finite,
    PosInf,
    NegInf,
    NaN,
}

/// Arbitrary-precision binary floating-point number.
///
/// A finite value is `(-1)^negative * 2^exp * sum(mant[k] * 2^(64 (k - n)))`
/// with the top limb's high bit set and a nonzero bottom limb, so the limb
/// count is minimal and `2^(exp-1) <= |x| < 2^exp`. There is no negative zero.
///
/// Equality is structural: two NaNs compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApFloat {
    class: Class,
    negative: bool,
    exp: i64,
    mant: Limbs,
}

impl Default for ApFloat {
    fn default() -> Self {
        Self::zero()
    }
}

impl ApFloat {
    pub fn zero() -> Self {
        Self::special(Class::Zero)
    }

    pub fn nan() -> Self {
        Self::special(Class::NaN)
    }

    pub fn pos_inf() -> Self {
        Self::special(Class::PosInf)
    }

    pub fn neg_inf() -> Self {
        Self::special(Class::NegInf)
    }

    fn special(class: Class) -> Self {
        ApFloat {
            class,
            negative: class == Class::NegInf,
            exp: 0,
            mant: Limbs::new(),
        }
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    pub fn from_u64(v: u64) -> Self {
        Self::normalize_wide(false, 64, &[v]).expect("small exponent")
    }

    pub fn from_i64(v: i64) -> Self {
        let f = Self::from_u64(v.unsigned_abs());
        if v < 0 {
            f.neg()
        } else {
            f
        }
    }

    /// Exact conversion of a finite `f64`; infinities and NaN map to the
    /// corresponding specials.
    pub fn from_f64(v: f64) -> Self {
        if v.is_nan() {
            return Self::nan();
        }
        if v.is_infinite() {
            return if v > 0.0 { Self::pos_inf() } else { Self::neg_inf() };
        }
        if v == 0.0 {
            return Self::zero();
        }
        let bits = v.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1 << 52), raw_exp - 1075)
        };
        // m * 2^e = 2^(e + 64) * (m / 2^64)
        Self::normalize_wide(v < 0.0, e as i128 + 64, &[m]).expect("f64 range")
    }

    /// Exact conversion of an arbitrary integer.
    pub fn from_bigint(v: &BigInt) -> Self {
        Self::from_bigint_scaled(v, 0).expect("integer exponent in range")
    }

    /// Exact value `v * 2^shift`.
    pub fn from_bigint_scaled(v: &BigInt, shift: i64) -> Result<Self> {
        let digits: Scratch = v.magnitude().iter_u64_digits().collect();
        if digits.is_empty() {
            return Ok(Self::zero());
        }
        let e = 64 * digits.len() as i128 + shift as i128;
        Self::normalize_wide(v.sign() == Sign::Minus, e, &digits)
    }

    /// Canonical float from raw limbs, interpreted as
    /// `(-1)^negative * 2^exp * sum(raw[k] * 2^(64 (k - raw.len())))`.
    pub fn from_raw(negative: bool, exp: i64, raw: &[Limb]) -> Result<Self> {
        Self::normalize_wide(negative, exp as i128, raw)
    }

    pub(crate) fn normalize_wide(negative: bool, exp: i128, raw: &[Limb]) -> Result<Self> {
        let hi = match raw.iter().rposition(|&x| x != 0) {
            Some(i) => i,
            None => return Ok(Self::zero()),
        };
        let lo = raw.iter().position(|&x| x != 0).unwrap();
        let lz = raw[hi].leading_zeros();
        let e = exp - 64 * (raw.len() - 1 - hi) as i128 - lz as i128;
        let body = &raw[lo..=hi];
        let mut mant: Limbs = if lz == 0 {
            Limbs::from_slice(body)
        } else {
            let mut m = Limbs::with_capacity(body.len());
            m.push(body[0] << lz);
            for k in 1..body.len() {
                m.push((body[k] << lz) | (body[k - 1] >> (64 - lz)));
            }
            m
        };
        let strip = mant.iter().position(|&x| x != 0).unwrap();
        if strip > 0 {
            mant.drain(..strip);
        }
        if e > EXP_LIMIT as i128 || e < -(EXP_LIMIT as i128) {
            return Err(Error::ExponentOverflow);
        }
        Ok(ApFloat {
            class: Class::Finite,
            negative,
            exp: e as i64,
            mant,
        })
    }

    pub fn class(&self) -> Class {
        self.class
    }

    pub fn is_zero(&self) -> bool {
        self.class == Class::Zero
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.class, Class::Zero | Class::Finite)
    }

    /// Finite and nonzero.
    pub fn is_regular(&self) -> bool {
        self.class == Class::Finite
    }

    pub fn is_nan(&self) -> bool {
        self.class == Class::NaN
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// Exponent `e` with `2^(e-1) <= |x| < 2^e`; zero for specials.
    pub fn exponent(&self) -> i64 {
        self.exp
    }

    /// Mantissa limbs, least significant first; empty for specials.
    pub fn mantissa(&self) -> &[Limb] {
        &self.mant
    }

    pub fn limb_count(&self) -> usize {
        self.mant.len()
    }

    /// Exponent of the lowest set bit (the value is an integer multiple of
    /// `2^bottom`). Only meaningful for regular values.
    pub fn bottom_exponent(&self) -> i64 {
        debug_assert!(self.is_regular());
        self.exp - 64 * self.mant.len() as i64 + self.mant[0].trailing_zeros() as i64
    }

    /// Bits from the top set bit to the bottom set bit inclusive; 0 for
    /// zero and specials.
    pub fn precision_bits(&self) -> u64 {
        if !self.is_regular() {
            return 0;
        }
        64 * self.mant.len() as u64 - self.mant[0].trailing_zeros() as u64
    }

    pub fn neg(&self) -> Self {
        let mut r = self.clone();
        match r.class {
            Class::Finite => r.negative = !r.negative,
            Class::PosInf => r = Self::neg_inf(),
            Class::NegInf => r = Self::pos_inf(),
            _ => {}
        }
        r
    }

    pub fn abs(&self) -> Self {
        match self.class {
            Class::NegInf => Self::pos_inf(),
            _ => {
                let mut r = self.clone();
                r.negative = false;
                r
            }
        }
    }

    /// `x * 2^k`.
    pub fn mul_2exp(&self, k: i64) -> Result<Self> {
        if !self.is_regular() {
            return Ok(self.clone());
        }
        let e = self.exp as i128 + k as i128;
        if e.abs() > EXP_LIMIT as i128 {
            return Err(Error::ExponentOverflow);
        }
        let mut r = self.clone();
        r.exp = e as i64;
        Ok(r)
    }

    /// The integer `x * 2^shift`, or `None` when that is not an integer.
    pub fn to_bigint_scaled(&self, shift: i64) -> Option<BigInt> {
        match self.class {
            Class::Zero => return Some(BigInt::default()),
            Class::Finite => {}
            _ => return None,
        }
        let bottom = self.exp as i128 - 64 * self.mant.len() as i128 + shift as i128;
        let mag = BigUint::from_slice(&to_u32_digits(&self.mant));
        let mag = if bottom >= 0 {
            mag << (bottom as u64)
        } else {
            let drop = (-bottom) as u64;
            if mag.trailing_zeros().unwrap_or(0) < drop {
                return None;
            }
            mag >> drop
        };
        let sign = if self.negative { Sign::Minus } else { Sign::Plus };
        Some(BigInt::from_biguint(sign, mag))
    }

    /// Nearest-ish `f64` (truncated mantissa); for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        match self.class {
            Class::Zero => 0.0,
            Class::NaN => f64::NAN,
            Class::PosInf => f64::INFINITY,
            Class::NegInf => f64::NEG_INFINITY,
            Class::Finite => {
                let top = *self.mant.last().unwrap() as f64 / 18446744073709551616.0;
                let e = self.exp.clamp(-2000, 2000) as i32;
                let v = top * 2f64.powi(e / 2) * 2f64.powi(e - e / 2);
                if self.negative {
                    -v
                } else {
                    v
                }
            }
        }
    }

    /// Compares absolute values of two finite numbers.
    pub fn cmp_abs(&self, other: &Self) -> Ordering {
        match (self.is_regular(), other.is_regular()) {
            (false, false) => Ordering::Equal,
            (false, true) => Ordering::Less,
            (true, false) => Ordering::Greater,
            (true, true) => {
                if self.exp != other.exp {
                    return self.exp.cmp(&other.exp);
                }
                let (a, b) = (&self.mant, &other.mant);
                for k in 0..a.len().max(b.len()) {
                    let x = if k < a.len() { a[a.len() - 1 - k] } else { 0 };
                    let y = if k < b.len() { b[b.len() - 1 - k] } else { 0 };
                    if x != y {
                        return x.cmp(&y);
                    }
                }
                Ordering::Equal
            }
        }
    }

    /// Truncates toward zero to at most `p` significant bits. Returns the
    /// result and a tight upper bound on the discarded magnitude.
    pub fn round(&self, p: u64) -> (Self, Mag) {
        assert!(p >= 2, "precision must be at least 2 bits");
        if !self.is_regular() {
            return (self.clone(), Mag::zero());
        }
        let n = self.mant.len();
        if 64 * n as u64 <= p {
            return (self.clone(), Mag::zero());
        }
        let keep = p.div_ceil(64) as usize;
        let cut = n - keep;
        let spare = (64 * keep as u64 - p) as u32;
        let mask: Limb = if spare == 0 { 0 } else { (1 << spare) - 1 };
        let low_part = self.mant[cut] & mask;
        let discarded_nonzero = low_part != 0 || self.mant[..cut].iter().any(|&x| x != 0);
        if !discarded_nonzero {
            return (self.clone(), Mag::zero());
        }
        // Discarded bits as a raw array whose top limb is mant[cut].
        let mut lost: Scratch = Scratch::from_slice(&self.mant[..=cut]);
        lost[cut] = low_part;
        let err = Mag::upper_from_raw(&lost, self.exp as i128 - 64 * (keep as i128 - 1));

        let mut mant = Limbs::from_slice(&self.mant[cut..]);
        mant[0] &= !mask;
        let strip = mant.iter().position(|&x| x != 0).unwrap();
        if strip > 0 {
            mant.drain(..strip);
        }
        let r = ApFloat {
            class: Class::Finite,
            negative: self.negative,
            exp: self.exp,
            mant,
        };
        (r, err)
    }

    /// Exact product.
    pub fn mul_exact(&self, other: &Self) -> Result<Self> {
        match (self.class, other.class) {
            (Class::NaN, _) | (_, Class::NaN) => Ok(Self::nan()),
            (Class::Zero, Class::Finite | Class::Zero) | (Class::Finite, Class::Zero) => {
                Ok(Self::zero())
            }
            (Class::Finite, Class::Finite) => {
                let n = self.mant.len() + other.mant.len();
                let mut prod: Scratch = smallvec::smallvec![0; n];
                limb::mul_into(&mut prod, &self.mant, &other.mant);
                Self::normalize_wide(
                    self.negative != other.negative,
                    self.exp as i128 + other.exp as i128,
                    &prod,
                )
            }
            (Class::Zero, _) | (_, Class::Zero) => Ok(Self::nan()),
            _ => {
                if self.negative != other.negative {
                    Ok(Self::neg_inf())
                } else {
                    Ok(Self::pos_inf())
                }
            }
        }
    }

    /// Exact product with a word-size integer.
    pub fn mul_u64(&self, k: u64) -> Result<Self> {
        self.mul_exact(&Self::from_u64(k))
    }

    fn special_sum(&self, other: &Self) -> Option<Self> {
        match (self.class, other.class) {
            (Class::NaN, _) | (_, Class::NaN) => Some(Self::nan()),
            (Class::PosInf, Class::NegInf) | (Class::NegInf, Class::PosInf) => Some(Self::nan()),
            (Class::PosInf | Class::NegInf, _) => Some(self.clone()),
            (_, Class::PosInf | Class::NegInf) => Some(other.clone()),
            _ => None,
        }
    }

    /// Exact sum. The cost grows with the exponent gap between the operands;
    /// use [`ApFloat::add_round`] when the gap may be large.
    pub fn add_exact(&self, other: &Self) -> Result<Self> {
        if let Some(s) = self.special_sum(other) {
            return Ok(s);
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        add_finite(self, other)
    }

    /// `self + other` truncated to `p` bits, with an upper bound on the
    /// total error.
    pub fn add_round(&self, other: &Self, p: u64) -> Result<(Self, Mag)> {
        if let Some(s) = self.special_sum(other) {
            return Ok((s, Mag::zero()));
        }
        if self.is_zero() {
            return Ok(other.round(p));
        }
        if other.is_zero() {
            return Ok(self.round(p));
        }
        let (hi, lo) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        if lo.exp as i128 + 2 <= hi.exp as i128 - p as i128 {
            // `lo` lies entirely below the rounding position of `hi`.
            let (r, err) = hi.round(p);
            return Ok((r, err.add_up(&Mag::upper_bound(lo))));
        }
        Ok(add_finite(hi, lo)?.round(p))
    }

    /// `self / k` truncated to `p` bits with an error bound.
    pub fn div_u64_round(&self, k: u64, p: u64) -> Result<(Self, Mag)> {
        assert!(k != 0, "division by zero");
        if !self.is_regular() {
            return Ok((self.clone(), Mag::zero()));
        }
        let extra = p.div_ceil(64) as usize + 1;
        let n = self.mant.len();
        let mut q: Vec<Limb> = vec![0; n + extra];
        q[extra..].copy_from_slice(&self.mant);
        let rem = limb::divrem_1_in_place(&mut q, k);
        let x = Self::normalize_wide(self.negative, self.exp as i128, &q)?;
        let (r, mut err) = x.round(p);
        if rem != 0 {
            let unit = self.exp as i128 - 64 * (n + extra) as i128;
            err = err.add_up(&Mag::pow2(unit));
        }
        Ok((r, err))
    }
}

fn to_u32_digits(limbs: &[Limb]) -> Vec<u32> {
    limbs
        .iter()
        .flat_map(|&x| [x as u32, (x >> 32) as u32])
        .collect()
}

fn add_finite(a: &ApFloat, b: &ApFloat) -> Result<ApFloat> {
    let bottom_a = a.exp as i128 - 64 * a.mant.len() as i128;
    let bottom_b = b.exp as i128 - 64 * b.mant.len() as i128;
    let bottom = bottom_a.min(bottom_b);
    let top = a.exp.max(b.exp) as i128 + 1;
    let len = ((top - bottom) as usize).div_ceil(64);
    let mut x: Scratch = smallvec::smallvec![0; len];
    let mut y: Scratch = smallvec::smallvec![0; len];
    limb::or_shifted(&mut x, &a.mant, (bottom_a - bottom) as u64);
    limb::or_shifted(&mut y, &b.mant, (bottom_b - bottom) as u64);
    let negative = if a.negative == b.negative {
        let carry = limb::add_assign_n(&mut x, &y);
        debug_assert!(!carry);
        a.negative
    } else {
        match limb::cmp_same_len(&x, &y) {
            Ordering::Equal => return Ok(ApFloat::zero()),
            Ordering::Greater => {
                limb::sub_assign_n(&mut x, &y);
                a.negative
            }
            Ordering::Less => {
                limb::sub_assign_n(&mut y, &x);
                std::mem::swap(&mut x, &mut y);
                b.negative
            }
        }
    };
    ApFloat::normalize_wide(negative, bottom + 64 * len as i128, &x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::rational::ExactRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(x: &ApFloat) -> ExactRational {
        ExactRational::from_apfloat(x).unwrap()
    }

    fn rand_float(rng: &mut ChaCha8Rng, max_limbs: usize, exp_range: i64) -> ApFloat {
        let n = rng.gen_range(1..=max_limbs);
        let limbs: Vec<u64> = (0..n).map(|_| rng.gen()).collect();
        let e = rng.gen_range(-exp_range..=exp_range);
        ApFloat::from_raw(rng.gen(), e, &limbs).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let one = ApFloat::from_raw(false, 64, &[1]).unwrap();
        assert_eq!(one.exponent(), 1);
        assert_eq!(one.mantissa(), &[1 << 63]);
        assert_eq!(one, ApFloat::one());

        let three = ApFloat::from_u64(3);
        assert_eq!(three.exponent(), 2);
        assert_eq!(three.mantissa(), &[0xC000000000000000]);

        let half = ApFloat::from_raw(false, 0, &[1 << 63]).unwrap();
        assert_eq!(half.exponent(), 0);
        assert_eq!(half.mantissa(), &[1 << 63]);

        assert!(ApFloat::from_raw(true, 5, &[0, 0]).unwrap().is_zero());
        assert!(!ApFloat::from_raw(true, 5, &[0, 0]).unwrap().is_negative());
    }

    #[test]
    fn normalize_strips_both_ends() {
        let x = ApFloat::from_raw(false, 0, &[0, 1, 1, 0]).unwrap();
        assert_eq!(x.limb_count(), 2);
        assert_eq!(x.exponent(), -127);
        assert_eq!(x.mantissa()[1] >> 63, 1);
        assert_ne!(x.mantissa()[0], 0);
        let raw = ExactRational::from_dyadic(
            &((num_bigint::BigInt::from(1u8) << 128u32) | (num_bigint::BigInt::from(1u8) << 64u32)),
            -256,
        );
        assert_eq!(q(&x), raw);
    }

    #[test]
    fn exponent_overflow_is_reported() {
        assert_eq!(
            ApFloat::from_raw(false, EXP_LIMIT + 1, &[1, 0, 1 << 63]),
            Err(Error::ExponentOverflow)
        );
        assert_eq!(
            ApFloat::from_u64(1).mul_2exp(EXP_LIMIT),
            Err(Error::ExponentOverflow)
        );
    }

    #[test]
    fn decompose_normalize_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let x = rand_float(&mut rng, 5, 1000);
            let y = ApFloat::from_raw(x.is_negative(), x.exponent(), x.mantissa()).unwrap();
            assert_eq!(x, y);
        }
    }

    #[test]
    fn round_examples() {
        let x = ApFloat::from_u64(0xABCD);
        let (r, e) = x.round(16);
        assert_eq!(r, x);
        assert!(e.is_zero());

        // 2^64 + 1 at 8 bits
        let x = ApFloat::from_raw(false, 128, &[1, 1]).unwrap();
        let (r, e) = x.round(8);
        assert_eq!(r, ApFloat::from_raw(false, 128, &[0, 1]).unwrap());
        assert_eq!(e, Mag::pow2(0));
    }

    #[test]
    fn round_error_bound_and_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..2000 {
            let x = rand_float(&mut rng, 5, 200);
            let (r, err) = x.round(100);
            assert!(r.precision_bits() <= 100);
            let diff = (q(&x) - q(&r)).abs();
            assert!(diff <= ExactRational::from_mag(&err).unwrap());
            let ulp = ExactRational::from_dyadic(&1.into(), x.exponent() - 100);
            assert!(ExactRational::from_mag(&err).unwrap() <= ulp);
            // truncation toward zero
            assert!(r.cmp_abs(&x) != Ordering::Greater);

            let mut prev = Mag::inf();
            for p in [2, 7, 64, 65, 100, 128, 200, 320, 400] {
                let (_, e) = x.round(p);
                assert!(e <= prev);
                prev = e;
            }
        }
    }

    #[test]
    fn exact_arithmetic_matches_rationals() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..2000 {
            let a = rand_float(&mut rng, 3, 300);
            let b = rand_float(&mut rng, 3, 300);
            assert_eq!(q(&a.mul_exact(&b).unwrap()), q(&a) * q(&b));
            assert_eq!(q(&a.add_exact(&b).unwrap()), q(&a) + q(&b));
            assert_eq!(q(&a.add_exact(&a.neg()).unwrap()), ExactRational::zero());
        }
    }

    #[test]
    fn add_round_contains_exact_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..3000 {
            let a = rand_float(&mut rng, 3, 400);
            let b = rand_float(&mut rng, 3, 400);
            let p = [2, 10, 53, 64, 128, 200][rng.gen_range(0..6)];
            let (s, err) = a.add_round(&b, p).unwrap();
            assert!(s.precision_bits() <= p);
            let diff = (q(&s) - (q(&a) + q(&b))).abs();
            assert!(diff <= ExactRational::from_mag(&err).unwrap());
        }
    }

    #[test]
    fn division_by_word_is_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..2000 {
            let a = rand_float(&mut rng, 3, 100);
            let k = rng.gen_range(1..1000u64);
            let p = rng.gen_range(2..300);
            let (r, err) = a.div_u64_round(k, p).unwrap();
            let exact = q(&a) / ExactRational::from_integer(k.into());
            assert!((q(&r) - exact).abs() <= ExactRational::from_mag(&err).unwrap());
            assert!(r.precision_bits() <= p);
        }
    }

    #[test]
    fn specials() {
        let inf = ApFloat::pos_inf();
        assert!(inf.mul_exact(&ApFloat::zero()).unwrap().is_nan());
        assert_eq!(inf.add_exact(&ApFloat::one()).unwrap(), inf);
        assert!(inf.add_exact(&ApFloat::neg_inf()).unwrap().is_nan());
        assert_eq!(ApFloat::from_i64(-3).mul_exact(&inf).unwrap(), ApFloat::neg_inf());
        assert!(ApFloat::zero().neg() == ApFloat::zero());
    }

    #[test]
    fn f64_and_bigint_conversions() {
        for v in [1.0, -0.375, 1e300, 5e-324, 3.0] {
            let x = ApFloat::from_f64(v);
            assert_eq!(x.to_f64(), v);
        }
        let b: BigInt = BigInt::from(-12345) << 300u32;
        let x = ApFloat::from_bigint(&b);
        assert_eq!(x.to_bigint_scaled(0).unwrap(), b);
        assert_eq!(ApFloat::from_f64(0.75).to_bigint_scaled(1), None);
        assert_eq!(ApFloat::from_f64(0.75).to_bigint_scaled(2), Some(BigInt::from(3)));
    }
}
