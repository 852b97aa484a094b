//! Input data for benchmarks and verification runs.
//!
//! Transcendental inputs are dyadic approximations computed once and then
//! fed identically to every code path.

use std::fmt;
use std::str::FromStr;

use arbdot::matmul::BallMatrix;
use arbdot::{ApFloat, Ball, ComplexBall};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    Uniform,
    DecreasingMagnitude,
    Pascal,
    ComplexUniform,
}

impl Profile {
    pub const ALL: [Profile; 4] = [
        Profile::Uniform,
        Profile::DecreasingMagnitude,
        Profile::Pascal,
        Profile::ComplexUniform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Profile::Uniform => "uniform",
            Profile::DecreasingMagnitude => "decreasing_magnitude",
            Profile::Pascal => "pascal",
            Profile::ComplexUniform => "complex_uniform",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Profile::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown profile `{s}`"))
    }
}

/// Random exact float with a `p`-bit mantissa in `[1/2, 1)`, random sign.
pub fn uniform_float(rng: &mut ChaCha8Rng, p: u64) -> ApFloat {
    let limbs = p.div_ceil(64) as usize;
    let mut raw: Vec<u64> = (0..limbs).map(|_| rng.gen()).collect();
    let spare = 64 * limbs as u64 - p;
    if spare > 0 {
        raw[0] &= !((1u64 << spare) - 1);
    }
    raw[limbs - 1] |= 1 << 63;
    raw[0] |= 1 << spare;
    ApFloat::from_raw(rng.gen(), 0, &raw).expect("exponent in range")
}

pub fn uniform_ball(rng: &mut ChaCha8Rng, p: u64) -> Ball {
    Ball::exact(uniform_float(rng, p))
}

/// `pi` truncated to `bits` significant bits, from Machin's formula.
pub fn pi_approx(bits: u64) -> ApFloat {
    let w = bits + 32;
    let one = BigInt::one() << w;
    // atan(1/k) * 2^w by the alternating series
    let atan_inv = |k: u64| {
        let k2 = BigInt::from(k * k);
        let mut term = &one / BigInt::from(k);
        let mut sum = BigInt::zero();
        let mut n = 1u64;
        let mut add = true;
        while !term.is_zero() {
            let t = &term / BigInt::from(n);
            if add {
                sum += t;
            } else {
                sum -= t;
            }
            add = !add;
            term /= &k2;
            n += 2;
        }
        sum
    };
    let pi = atan_inv(5) * 16 - atan_inv(239) * 4;
    let pi = ApFloat::from_bigint_scaled(&pi, -(w as i64)).expect("small exponent");
    pi.round(bits).0
}

/// Dyadic approximations of `1/i!` for `i < n` at `p` bits.
pub fn inverse_factorials(n: usize, p: u64) -> Vec<ApFloat> {
    let w = p + 64;
    let mut out = Vec::with_capacity(n);
    let mut cur = ApFloat::one();
    for i in 0..n {
        if i > 0 {
            cur = cur.div_u64_round(i as u64, w).expect("exponent in range").0;
        }
        out.push(cur.round(p).0);
    }
    out
}

/// Dyadic approximations of `pi^(-i)` for `i < n` at `p` bits.
pub fn inverse_pi_powers(n: usize, p: u64) -> Vec<ApFloat> {
    let w = p + 64;
    let wide = w + 64;
    // floor(2^(2 wide) / floor(pi 2^wide)) ~ 2^wide / pi
    let pi_int = pi_approx(wide).to_bigint_scaled(wide as i64).expect("pi is dyadic");
    let inv = (BigInt::one() << (2 * wide)) / pi_int;
    let inv_pi = ApFloat::from_bigint_scaled(&inv, -(wide as i64)).expect("small").round(w).0;
    let mut out = Vec::with_capacity(n);
    let mut cur = ApFloat::one();
    for i in 0..n {
        if i > 0 {
            cur = cur.mul_exact(&inv_pi).expect("exponent in range").round(w).0;
        }
        out.push(cur.round(p).0);
    }
    out
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// Entry `(i, j)` of the matrix `pi * C(i + j, i)` at `p` bits.
pub fn pascal_entry(pi: &ApFloat, i: usize, j: usize, p: u64) -> ApFloat {
    let c = ApFloat::from_bigint(&binomial((i + j) as u64, i as u64));
    pi.mul_exact(&c).expect("exponent in range").round(p).0
}

/// Dot product operands of length `n`.
pub fn dot_vectors(profile: Profile, n: usize, p: u64, rng: &mut ChaCha8Rng) -> (Vec<Ball>, Vec<Ball>) {
    match profile {
        Profile::Uniform | Profile::ComplexUniform => (
            (0..n).map(|_| uniform_ball(rng, p)).collect(),
            (0..n).map(|_| uniform_ball(rng, p)).collect(),
        ),
        Profile::DecreasingMagnitude => (
            inverse_factorials(n, p).into_iter().map(Ball::exact).collect(),
            inverse_pi_powers(n, p).into_iter().map(Ball::exact).collect(),
        ),
        Profile::Pascal => {
            let pi = pi_approx(p + 64);
            let row = n / 2;
            (
                (0..n).map(|j| Ball::exact(pascal_entry(&pi, row, j, p))).collect(),
                (0..n).map(|i| Ball::exact(pascal_entry(&pi, i, row, p))).collect(),
            )
        }
    }
}

pub fn complex_vectors(n: usize, p: u64, rng: &mut ChaCha8Rng) -> (Vec<ComplexBall>, Vec<ComplexBall>) {
    let mut gen = || ComplexBall::new(uniform_ball(rng, p), uniform_ball(rng, p));
    let x = (0..n).map(|_| gen()).collect();
    let y = (0..n).map(|_| gen()).collect();
    (x, y)
}

/// A pair of `n x n` matrices.
pub fn matrices(profile: Profile, n: usize, p: u64, rng: &mut ChaCha8Rng) -> (BallMatrix, BallMatrix) {
    match profile {
        Profile::Uniform | Profile::ComplexUniform => (
            BallMatrix::from_fn(n, n, |_, _| uniform_ball(rng, p)),
            BallMatrix::from_fn(n, n, |_, _| uniform_ball(rng, p)),
        ),
        Profile::DecreasingMagnitude => {
            let f = inverse_factorials(2 * n, p);
            let q = inverse_pi_powers(2 * n, p);
            (
                BallMatrix::from_fn(n, n, |i, j| Ball::exact(f[i + j].clone())),
                BallMatrix::from_fn(n, n, |i, j| Ball::exact(q[i + j].clone())),
            )
        }
        Profile::Pascal => {
            let pi = pi_approx(p + 64);
            let a = BallMatrix::from_fn(n, n, |i, j| Ball::exact(pascal_entry(&pi, i, j, p)));
            (a.clone(), a)
        }
    }
}

/// Polynomial operands of length `n`; the second has a zero constant term
/// so it is also a valid exponential argument.
pub fn poly_operands(profile: Profile, n: usize, p: u64, rng: &mut ChaCha8Rng) -> (Vec<Ball>, Vec<Ball>) {
    let (a, mut b) = dot_vectors(profile, n, p, rng);
    if let Some(c) = b.first_mut() {
        *c = Ball::zero();
    }
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn pi_digits() {
        let pi = pi_approx(200);
        assert!((pi.to_f64() - std::f64::consts::PI).abs() < 1e-15);
        assert!(pi.precision_bits() <= 200);
    }

    #[test]
    fn uniform_has_requested_precision() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for p in [2, 53, 64, 65, 128, 1024] {
            let x = uniform_float(&mut rng, p);
            assert_eq!(x.precision_bits(), p);
            assert_eq!(x.exponent(), 0);
        }
    }

    #[test]
    fn decreasing_profile_values() {
        let f = inverse_factorials(6, 64);
        assert!((f[5].to_f64() - 1.0 / 120.0).abs() < 1e-17);
        let q = inverse_pi_powers(4, 64);
        assert!((q[3].to_f64() - std::f64::consts::PI.powi(-3)).abs() < 1e-17);
        assert!(q.iter().all(|x| x.precision_bits() <= 64));
    }

    #[test]
    fn pascal_entries() {
        let pi = pi_approx(120);
        let e = pascal_entry(&pi, 2, 3, 53);
        assert!((e.to_f64() - 10.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(e.precision_bits() <= 53);
    }

    #[test]
    fn profile_names_round_trip() {
        for p in Profile::ALL {
            assert_eq!(p.name().parse::<Profile>().unwrap(), p);
        }
        assert!("nope".parse::<Profile>().is_err());
    }
}
