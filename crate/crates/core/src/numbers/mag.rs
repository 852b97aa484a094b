use std::cmp::Ordering;

use super::apfloat::{ApFloat, EXP_LIMIT};
use crate::limb::Limb;

/// Radius mantissa precision in bits.
pub const MAG_BITS: u32 = 30;

const MAN_MIN: u64 = 1 << (MAG_BITS - 1);
const MAN_LIMIT: u64 = 1 << MAG_BITS;

/// Unsigned upper-bound magnitude `(man / 2^30) * 2^exp`, `2^29 <= man < 2^30`.
///
/// All arithmetic rounds up. Exponents above the supported range saturate to
/// infinity; values below it round up to the smallest representable magnitude.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mag {
    kind: MagKind,
    man: u64,
    exp: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MagKind {
    Zero,
    Finite,
    Inf,
}

impl Default for Mag {
    fn default() -> Self {
        Self::zero()
    }
}

impl Mag {
    pub const fn zero() -> Self {
        Mag {
            kind: MagKind::Zero,
            man: 0,
            exp: 0,
        }
    }

    pub const fn inf() -> Self {
        Mag {
            kind: MagKind::Inf,
            man: 0,
            exp: 0,
        }
    }

    /// Exactly `2^k`.
    pub fn pow2(k: i128) -> Self {
        Self::make(MAN_MIN, k + 1)
    }

    /// Builds a magnitude from a mantissa in `[2^29, 2^30]`; the weakly
    /// normalized value `2^30` is canonicalized.
    pub fn from_parts(man: u64, exp: i64) -> Self {
        assert!((MAN_MIN..=MAN_LIMIT).contains(&man), "mantissa out of range");
        Self::make(man, exp as i128)
    }

    fn make(man: u64, exp: i128) -> Self {
        let (man, exp) = if man == MAN_LIMIT {
            (MAN_MIN, exp + 1)
        } else {
            (man, exp)
        };
        debug_assert!((MAN_MIN..MAN_LIMIT).contains(&man));
        if exp > EXP_LIMIT as i128 {
            Self::inf()
        } else if exp < -(EXP_LIMIT as i128) {
            Mag {
                kind: MagKind::Finite,
                man: MAN_MIN,
                exp: -EXP_LIMIT,
            }
        } else {
            Mag {
                kind: MagKind::Finite,
                man,
                exp: exp as i64,
            }
        }
    }

    /// Upper bound for `v * 2^exp2`.
    pub fn from_scaled_int(v: u128, exp2: i128) -> Self {
        if v == 0 {
            return Self::zero();
        }
        let bits = 128 - v.leading_zeros();
        if bits > MAG_BITS {
            let drop = bits - MAG_BITS;
            let mut man = (v >> drop) as u64;
            if v & ((1u128 << drop) - 1) != 0 {
                man += 1;
            }
            Self::make(man, exp2 + drop as i128 + MAG_BITS as i128)
        } else {
            let man = (v as u64) << (MAG_BITS - bits);
            Self::make(man, exp2 + bits as i128)
        }
    }

    /// Tight upper bound for the magnitude of the raw limb value
    /// `2^exp * sum(raw[k] * 2^(64 (k - raw.len())))`.
    pub(crate) fn upper_from_raw(raw: &[Limb], exp: i128) -> Self {
        let hi = match raw.iter().rposition(|&x| x != 0) {
            Some(i) => i,
            None => return Self::zero(),
        };
        let lz = raw[hi].leading_zeros();
        let below = if hi > 0 { raw[hi - 1] } else { 0 };
        let top64 = if lz == 0 {
            raw[hi]
        } else {
            (raw[hi] << lz) | (below >> (64 - lz))
        };
        let mut sticky = top64 & ((1 << (64 - MAG_BITS)) - 1) != 0;
        if hi > 0 {
            sticky |= (below << lz) != 0 || raw[..hi - 1].iter().any(|&x| x != 0);
        }
        let mut man = top64 >> (64 - MAG_BITS);
        if sticky {
            man += 1;
        }
        let top_exp = exp - 64 * (raw.len() - 1 - hi) as i128 - lz as i128;
        Self::make(man, top_exp)
    }

    /// Tight upper bound for `|x|`: exact when the mantissa fits 30 bits.
    /// Infinities and NaN give infinity.
    pub fn upper_bound(x: &ApFloat) -> Self {
        if x.is_zero() {
            Self::zero()
        } else if !x.is_regular() {
            Self::inf()
        } else {
            Self::upper_from_raw(x.mantissa(), x.exponent() as i128)
        }
    }

    /// Fast upper bound for `|x|`: the top 30 bits of the top limb plus one,
    /// regardless of exactness.
    pub fn from_apfloat_fast(x: &ApFloat) -> Self {
        if x.is_zero() {
            return Self::zero();
        }
        if !x.is_regular() {
            return Self::inf();
        }
        let (man, exp) = weak_upper(x);
        Self::make(man, exp as i128)
    }

    /// Upper bound for a nonnegative `f64` (NaN and infinity give infinity).
    pub fn from_f64_upper(v: f64) -> Self {
        if v.is_nan() || v.is_infinite() {
            return Self::inf();
        }
        let v = v.abs();
        if v == 0.0 {
            return Self::zero();
        }
        let bits = v.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i128;
        let frac = bits & ((1 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1 << 52), raw_exp - 1075)
        };
        Self::from_scaled_int(m as u128, e)
    }

    pub fn kind(&self) -> MagKind {
        self.kind
    }

    pub fn is_zero(&self) -> bool {
        self.kind == MagKind::Zero
    }

    pub fn is_inf(&self) -> bool {
        self.kind == MagKind::Inf
    }

    pub fn is_finite(&self) -> bool {
        self.kind != MagKind::Inf
    }

    /// Mantissa `b` with `2^29 <= b < 2^30` (0 for zero and infinity).
    pub fn mantissa(&self) -> u64 {
        self.man
    }

    /// Exponent `f` with `2^(f-1) <= value < 2^f`.
    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn add_up(&self, other: &Self) -> Self {
        match (self.kind, other.kind) {
            (MagKind::Inf, _) | (_, MagKind::Inf) => Self::inf(),
            (MagKind::Zero, _) => *other,
            (_, MagKind::Zero) => *self,
            _ => {
                let (hi, lo) = if self.exp >= other.exp {
                    (self, other)
                } else {
                    (other, self)
                };
                let d = (hi.exp - lo.exp) as u64;
                if d >= MAG_BITS as u64 {
                    // lo < 2^(lo.exp) <= one ulp of hi
                    Self::from_scaled_int(hi.man as u128 + 1, hi.exp as i128 - MAG_BITS as i128)
                } else {
                    let v = ((hi.man as u128) << d) + lo.man as u128;
                    Self::from_scaled_int(v, lo.exp as i128 - MAG_BITS as i128)
                }
            }
        }
    }

    /// Upper bound for the product. Zero times anything (including infinity)
    /// is zero.
    pub fn mul_up(&self, other: &Self) -> Self {
        match (self.kind, other.kind) {
            (MagKind::Zero, _) | (_, MagKind::Zero) => Self::zero(),
            (MagKind::Inf, _) | (_, MagKind::Inf) => Self::inf(),
            _ => Self::from_scaled_int(
                self.man as u128 * other.man as u128,
                self.exp as i128 + other.exp as i128 - 2 * MAG_BITS as i128,
            ),
        }
    }

    /// Upper bound for `self * k`.
    pub fn mul_u64_up(&self, k: u64) -> Self {
        match self.kind {
            MagKind::Finite if k == 0 => Self::zero(),
            MagKind::Finite => Self::from_scaled_int(
                self.man as u128 * k as u128,
                self.exp as i128 - MAG_BITS as i128,
            ),
            _ => *self,
        }
    }

    /// Upper bound for `self / k`.
    pub fn div_u64_up(&self, k: u64) -> Self {
        assert!(k != 0, "division by zero");
        match self.kind {
            MagKind::Finite => {
                // (man * 2^64 / k) rounded up, scaled by 2^(exp - 30 - 64)
                let num = (self.man as u128) << 64;
                let q = num.div_ceil(k as u128);
                Self::from_scaled_int(q, self.exp as i128 - MAG_BITS as i128 - 64)
            }
            _ => *self,
        }
    }

    /// Exact `self * 2^k` (saturating at the exponent range).
    pub fn mul_2exp(&self, k: i64) -> Self {
        match self.kind {
            MagKind::Finite => Self::make(self.man, self.exp as i128 + k as i128),
            _ => *self,
        }
    }

    /// The value as `man * 2^exp2` for exact conversion elsewhere.
    pub fn to_scaled_int(&self) -> Option<(u64, i64)> {
        match self.kind {
            MagKind::Zero => Some((0, 0)),
            MagKind::Finite => Some((self.man, self.exp - MAG_BITS as i64)),
            MagKind::Inf => None,
        }
    }

    /// Exact value as an `ApFloat` (infinity maps to `+inf`).
    pub fn to_apfloat(&self) -> ApFloat {
        match self.kind {
            MagKind::Zero => ApFloat::zero(),
            MagKind::Inf => ApFloat::pos_inf(),
            MagKind::Finite => ApFloat::from_raw(false, self.exp, &[self.man << (64 - MAG_BITS)])
                .expect("mag exponent within range"),
        }
    }
}

/// Weakly normalized upper bound for `|x|` of a regular float:
/// mantissa in `[2^29 + 1, 2^30]` with the float's own exponent.
#[inline]
pub(crate) fn weak_upper(x: &ApFloat) -> (u64, i64) {
    let top = *x.mantissa().last().unwrap();
    ((top >> (64 - MAG_BITS)) + 1, x.exponent())
}

impl PartialOrd for Mag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mag {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.kind.cmp(&other.kind) {
            Ordering::Equal if self.kind == MagKind::Finite => {
                self.exp.cmp(&other.exp).then(self.man.cmp(&other.man))
            }
            o => o,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::rational::ExactRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(m: &Mag) -> ExactRational {
        ExactRational::from_mag(m).unwrap()
    }

    fn rand_mag(rng: &mut ChaCha8Rng) -> Mag {
        Mag::from_parts(rng.gen_range(MAN_MIN..MAN_LIMIT), rng.gen_range(-200..200))
    }

    #[test]
    fn fast_bound_of_one() {
        let m = Mag::from_apfloat_fast(&ApFloat::one());
        assert_eq!(m.mantissa(), (1 << 29) + 1);
        assert_eq!(m.exponent(), 1);
        assert!(Mag::from_apfloat_fast(&ApFloat::zero()).is_zero());
    }

    #[test]
    fn fast_bound_is_upper_and_tight() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..5000 {
            let n = rng.gen_range(1..4);
            let limbs: Vec<u64> = (0..n).map(|_| rng.gen()).collect();
            let x = ApFloat::from_raw(rng.gen(), rng.gen_range(-500..500), &limbs).unwrap();
            let ax = ExactRational::from_apfloat(&x).unwrap().abs();
            for m in [Mag::from_apfloat_fast(&x), Mag::upper_bound(&x)] {
                assert!(q(&m) >= ax);
                let slack = ExactRational::from_dyadic(&1.into(), -28);
                assert!(q(&m) <= &ax * (ExactRational::one() + slack));
            }
        }
    }

    #[test]
    fn upper_bound_is_exact_when_representable() {
        assert_eq!(Mag::upper_bound(&ApFloat::one()), Mag::pow2(0));
        assert_eq!(Mag::upper_bound(&ApFloat::from_i64(-3)).mantissa(), 3 << 28);
    }

    #[test]
    fn add_and_mul_bounds() {
        let one = Mag::from_apfloat_fast(&ApFloat::one());
        let two = q(&one.add_up(&one));
        assert!(two >= ExactRational::from_integer(2.into()));
        let limit = ExactRational::from_integer(2.into())
            * (ExactRational::one() + ExactRational::from_dyadic(&1.into(), -27));
        assert!(two <= limit);

        let a = rand_mag(&mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(Mag::zero().add_up(&a), a);
        assert!(Mag::zero().mul_up(&a).is_zero());
        assert!(a.add_up(&Mag::inf()).is_inf());
        assert!(Mag::zero().mul_up(&Mag::inf()).is_zero());

        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..5000 {
            let a = rand_mag(&mut rng);
            let b = rand_mag(&mut rng);
            let s = a.add_up(&b);
            let exact = q(&a) + q(&b);
            assert!(q(&s) >= exact);
            assert!(q(&s) <= &exact * (ExactRational::one() + ExactRational::from_dyadic(&1.into(), -28)));
            let p = a.mul_up(&b);
            let exact = q(&a) * q(&b);
            assert!(q(&p) >= exact);
            assert!(q(&p) <= &exact * (ExactRational::one() + ExactRational::from_dyadic(&1.into(), -28)));
            let k = rng.gen_range(1..1000u64);
            assert!(q(&a.mul_u64_up(k)) >= q(&a) * ExactRational::from_integer(k.into()));
            assert!(q(&a.div_u64_up(k)) >= q(&a) / ExactRational::from_integer(k.into()));
        }
    }

    #[test]
    fn saturation() {
        let big = Mag::pow2(EXP_LIMIT as i128 - 1);
        assert!(big.mul_up(&big).is_inf());
        let tiny = Mag::pow2(-(EXP_LIMIT as i128));
        let t2 = tiny.mul_up(&tiny);
        assert!(!t2.is_zero());
        assert!(t2 >= tiny.mul_up(&tiny));
    }

    #[test]
    fn from_f64_upper_bounds() {
        for v in [1.0, 0.1, 3.5e-310, 1e308, 123456789.123] {
            let m = Mag::from_f64_upper(v);
            assert!(q(&m) >= ExactRational::from_apfloat(&ApFloat::from_f64(v)).unwrap());
        }
    }

    #[test]
    fn ordering() {
        let a = Mag::pow2(3);
        let b = Mag::pow2(4);
        assert!(Mag::zero() < a && a < b && b < Mag::inf());
    }
}
