use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::numbers::{ApFloat, Ball, Class, Mag};

/// Exact rational number in canonical form (positive denominator, reduced).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(pub BigRational);

/// Exponents beyond this are refused; the value would not fit in memory.
const MAX_RATIONAL_EXP: i64 = 1 << 20;

impl ExactRational {
    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactRational(BigRational::one())
    }

    pub fn from_integer(v: BigInt) -> Self {
        ExactRational(BigRational::from_integer(v))
    }

    pub fn new(num: BigInt, den: BigInt) -> Self {
        ExactRational(BigRational::new(num, den))
    }

    /// `m * 2^e`.
    pub fn from_dyadic(m: &BigInt, e: i64) -> Self {
        assert!(e.abs() <= MAX_RATIONAL_EXP, "dyadic exponent too large for a rational");
        if e >= 0 {
            Self::from_integer(m << (e as u64))
        } else {
            Self::new(m.clone(), BigInt::one() << ((-e) as u64))
        }
    }

    /// Exact value of a finite float; `None` for specials or huge exponents.
    pub fn from_apfloat(x: &ApFloat) -> Option<Self> {
        match x.class() {
            Class::Zero => Some(Self::zero()),
            Class::Finite => {
                let (m, e) = dyadic_parts(x);
                if e.abs() > MAX_RATIONAL_EXP {
                    return None;
                }
                Some(Self::from_dyadic(&m, e))
            }
            _ => None,
        }
    }

    pub fn from_mag(m: &Mag) -> Option<Self> {
        let (man, e) = m.to_scaled_int()?;
        if e.abs() > MAX_RATIONAL_EXP {
            return None;
        }
        Some(Self::from_dyadic(&BigInt::from(man), e))
    }

    pub fn abs(&self) -> Self {
        ExactRational(self.0.abs())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
}

/// `x = m * 2^e` with `m` an integer; `x` must be regular.
pub(crate) fn dyadic_parts(x: &ApFloat) -> (BigInt, i64) {
    let digits: Vec<u32> = x
        .mantissa()
        .iter()
        .flat_map(|&l| [l as u32, (l >> 32) as u32])
        .collect();
    let sign = if x.is_negative() { Sign::Minus } else { Sign::Plus };
    let m = BigInt::from_biguint(sign, BigUint::new(digits));
    (m, x.exponent() - 64 * x.limb_count() as i64)
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: Self) -> Self {
                ExactRational(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational((&self.0).$m(&rhs.0))
            }
        }
        impl<'a> $tr<&'a ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational(self.0.$m(&rhs.0))
            }
        }
        impl<'a> $tr<ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: ExactRational) -> ExactRational {
                ExactRational((&self.0).$m(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> Self {
        ExactRational(-self.0)
    }
}

/// Closed interval with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalInterval {
    pub lo: ExactRational,
    pub hi: ExactRational,
}

impl RationalInterval {
    pub fn point(v: ExactRational) -> Self {
        RationalInterval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn new(lo: ExactRational, hi: ExactRational) -> Self {
        assert!(lo <= hi, "empty interval");
        RationalInterval { lo, hi }
    }

    /// `[mid - rad, mid + rad]` for a finite ball.
    pub fn from_ball(b: &Ball) -> Option<Self> {
        let m = ExactRational::from_apfloat(&b.mid)?;
        let r = ExactRational::from_mag(&b.rad)?;
        Some(RationalInterval {
            lo: &m - &r,
            hi: m + r,
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        RationalInterval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn neg(&self) -> Self {
        RationalInterval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RationalInterval { lo, hi }
    }

    pub fn contains(&self, v: &ExactRational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    /// Whether this interval lies inside the ball. Indeterminate balls and
    /// infinite radii contain everything.
    pub fn is_subset_of_ball(&self, b: &Ball) -> bool {
        if b.mid.is_nan() || b.rad.is_inf() {
            return true;
        }
        match RationalInterval::from_ball(b) {
            Some(r) => r.lo <= self.lo && self.hi <= r.hi,
            None => false,
        }
    }
}
