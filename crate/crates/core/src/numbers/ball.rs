use super::apfloat::ApFloat;
use super::mag::Mag;

/// Midpoint-radius interval `[mid +/- rad]`.
///
/// A NaN midpoint denotes the indeterminate ball (the whole real line); the
/// radius is then ignored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ball {
    pub mid: ApFloat,
    pub rad: Mag,
}

/// Rectangular complex ball `[a +/- r] + [b +/- s] i`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComplexBall {
    pub re: Ball,
    pub im: Ball,
}

impl Ball {
    pub fn new(mid: ApFloat, rad: Mag) -> Self {
        Ball { mid, rad }
    }

    pub fn exact(mid: ApFloat) -> Self {
        Ball {
            mid,
            rad: Mag::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::exact(ApFloat::zero())
    }

    pub fn one() -> Self {
        Self::exact(ApFloat::one())
    }

    pub fn from_i64(v: i64) -> Self {
        Self::exact(ApFloat::from_i64(v))
    }

    pub fn indeterminate() -> Self {
        Self::exact(ApFloat::nan())
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Exactly zero: zero midpoint and zero radius.
    pub fn is_zero(&self) -> bool {
        self.mid.is_zero() && self.rad.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.mid.is_finite() && self.rad.is_finite()
    }

    pub fn is_indeterminate(&self) -> bool {
        self.mid.is_nan()
    }

    pub fn neg(&self) -> Self {
        Ball::new(self.mid.neg(), self.rad)
    }

    /// Ball containing `self + other`, midpoint rounded to `p` bits.
    pub fn add(&self, other: &Self, p: u64) -> Self {
        if self.is_indeterminate() || other.is_indeterminate() {
            return Self::indeterminate();
        }
        match self.mid.add_round(&other.mid, p) {
            Ok((mid, err)) if !mid.is_nan() => {
                Ball::new(mid, self.rad.add_up(&other.rad).add_up(&err))
            }
            _ => Self::indeterminate(),
        }
    }

    pub fn sub(&self, other: &Self, p: u64) -> Self {
        self.add(&other.neg(), p)
    }

    /// Ball containing `self * other`.
    pub fn mul(&self, other: &Self, p: u64) -> Self {
        ball_fallback_addmul(&Ball::zero(), self, other, p)
    }

    /// Exact scaling of the midpoint by `k`, radius rounded up.
    pub fn mul_u64(&self, k: u64) -> Self {
        match self.mid.mul_u64(k) {
            Ok(mid) => Ball::new(mid, self.rad.mul_u64_up(k)),
            Err(_) => Self::indeterminate(),
        }
    }

    /// Ball containing `self / k`.
    pub fn div_u64(&self, k: u64, p: u64) -> Self {
        if self.is_indeterminate() {
            return Self::indeterminate();
        }
        match self.mid.div_u64_round(k, p) {
            Ok((mid, err)) => Ball::new(mid, self.rad.div_u64_up(k).add_up(&err)),
            Err(_) => Self::indeterminate(),
        }
    }

    pub fn mul_2exp(&self, k: i64) -> Self {
        match self.mid.mul_2exp(k) {
            Ok(mid) => Ball::new(mid, self.rad.mul_2exp(k)),
            Err(_) => Self::indeterminate(),
        }
    }
}

impl ComplexBall {
    pub fn new(re: Ball, im: Ball) -> Self {
        ComplexBall { re, im }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_real(re: Ball) -> Self {
        ComplexBall {
            re,
            im: Ball::zero(),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.re.is_exact() && self.im.is_exact()
    }

    pub fn neg(&self) -> Self {
        ComplexBall::new(self.re.neg(), self.im.neg())
    }
}

/// Ball containing `acc + x * y`, one term at a time: the midpoint product is
/// formed exactly, added to the accumulator and truncated to `p` bits. The
/// rounding error and the propagated radii `|mx| ry + |my| rx + rx ry` are
/// folded into the radius.
///
/// NaN or infinite midpoints, and any exponent leaving the supported range,
/// give the indeterminate ball.
pub fn ball_fallback_addmul(acc: &Ball, x: &Ball, y: &Ball, p: u64) -> Ball {
    if !(acc.mid.is_finite() && x.mid.is_finite() && y.mid.is_finite()) {
        return Ball::indeterminate();
    }
    let prod = match x.mid.mul_exact(&y.mid) {
        Ok(v) => v,
        Err(_) => return Ball::indeterminate(),
    };
    let (mid, err) = match acc.mid.add_round(&prod, p) {
        Ok(v) => v,
        Err(_) => return Ball::indeterminate(),
    };
    let mut rad = acc.rad.add_up(&err);
    if !(x.rad.is_zero() && y.rad.is_zero()) {
        let mx = Mag::upper_bound(&x.mid);
        let my = Mag::upper_bound(&y.mid);
        rad = rad
            .add_up(&mx.mul_up(&y.rad))
            .add_up(&my.mul_up(&x.rad))
            .add_up(&x.rad.mul_up(&y.rad));
    }
    Ball::new(mid, rad)
}
