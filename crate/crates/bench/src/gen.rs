//! Seeded random instances shared by the verification suites and the
//! acceptance tests.

use arbdot::dot::{bc, Strided};
use arbdot::matmul::{BallMatrix, IntMatrix, BASECASE_LEN};
use arbdot::{ApFloat, Ball, ComplexBall, Mag};
use num_bigint::{BigInt, BigUint, Sign};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const DOT_PRECISIONS: [u64; 5] = [8, 53, 128, 256, 1024];
pub const WIDE_EXPONENT: i64 = 1 << 40;

/// Random finite float with 1 to `max_limbs` limbs at exponent `e`.
pub fn float_at(rng: &mut ChaCha8Rng, e: i64, max_limbs: usize) -> ApFloat {
    let limbs: Vec<u64> = (0..rng.gen_range(1..=max_limbs)).map(|_| rng.gen()).collect();
    ApFloat::from_raw(rng.gen(), e, &limbs).expect("exponent in range")
}

/// Ball at exponent `e` with a zero, tiny, or sizable radius.
pub fn ball_at(rng: &mut ChaCha8Rng, e: i64) -> Ball {
    if rng.gen_bool(0.06) {
        return if rng.gen_bool(0.5) {
            Ball::zero()
        } else {
            Ball::new(ApFloat::zero(), Mag::from_parts(rng.gen_range(1 << 29..1 << 30), e))
        };
    }
    let mid = float_at(rng, e, 4);
    let rad = match rng.gen_range(0..3) {
        0 => Mag::zero(),
        1 => Mag::from_parts(rng.gen_range(1 << 29..1 << 30), e - rng.gen_range(60..400)),
        _ => Mag::from_parts(rng.gen_range(1 << 29..1 << 30), e - rng.gen_range(0..60)),
    };
    Ball::new(mid, rad)
}

/// Exponent generator: either every exponent independent over the whole
/// `+/-2^40` range, or clustered around a random center.
pub fn exponent_source(rng: &mut ChaCha8Rng) -> impl FnMut(&mut ChaCha8Rng) -> i64 {
    let wide = rng.gen_bool(0.3);
    let center = rng.gen_range(-WIDE_EXPONENT..=WIDE_EXPONENT);
    let offset = [4i64, 64, 400][rng.gen_range(0..3)];
    move |rng: &mut ChaCha8Rng| {
        if wide {
            rng.gen_range(-WIDE_EXPONENT..=WIDE_EXPONENT)
        } else {
            (center + rng.gen_range(-offset..=offset)).clamp(-WIDE_EXPONENT, WIDE_EXPONENT)
        }
    }
}

/// One dot product instance; `x` may be read with a negative stride.
#[derive(Clone, Debug)]
pub struct DotCase {
    pub p: u64,
    pub subtract: bool,
    pub initial: Option<Ball>,
    pub xbuf: Vec<Ball>,
    pub xstart: usize,
    pub xstride: isize,
    pub y: Vec<Ball>,
}

impl DotCase {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn x(&self) -> Strided<'_, Ball> {
        Strided::new(&self.xbuf, self.xstart, self.xstride, self.n()).expect("valid stride")
    }

    pub fn y(&self) -> Strided<'_, Ball> {
        Strided::contiguous(&self.y)
    }

    pub fn x_values(&self) -> Vec<Ball> {
        self.x().iter().cloned().collect()
    }

    /// Self-contained text form: parameters, then one ball per line.
    pub fn reproducer(&self) -> String {
        let mut s = format!(
            "p={} subtract={} n={} initial={}\n",
            self.p,
            self.subtract,
            self.n(),
            self.initial.as_ref().map_or("none".to_string(), |b| b.to_string())
        );
        for (a, b) in self.x().iter().zip(&self.y) {
            s.push_str(&format!("{a} * {b}\n"));
        }
        s
    }
}

/// Random containment instance: `N` in 1..=50, a precision from
/// [`DOT_PRECISIONS`], wide exponents, mixed radii and strides.
pub fn dot_case(rng: &mut ChaCha8Rng) -> DotCase {
    let n = rng.gen_range(1..=50);
    let p = DOT_PRECISIONS[rng.gen_range(0..DOT_PRECISIONS.len())];
    let mut exps = exponent_source(rng);
    let xstride: isize = [1, -1, 2, -3][rng.gen_range(0..4)];
    let span = (n - 1) * xstride.unsigned_abs() + 1;
    let xbuf: Vec<Ball> = (0..span)
        .map(|_| {
            let e = exps(rng);
            ball_at(rng, e)
        })
        .collect();
    let xstart = if xstride < 0 { span - 1 } else { 0 };
    let y = (0..n)
        .map(|_| {
            let e = exps(rng);
            ball_at(rng, e)
        })
        .collect();
    let initial = if rng.gen_bool(0.4) {
        let e = exps(rng);
        Some(ball_at(rng, e))
    } else {
        None
    };
    DotCase {
        p,
        subtract: rng.gen_bool(0.5),
        initial,
        xbuf,
        xstart,
        xstride,
        y,
    }
}

/// Exact small dyadic `m * 2^e` with `|m| < 2^bits`.
pub fn small_dyadic(rng: &mut ChaCha8Rng, bits: u32, e_range: i64) -> ApFloat {
    let m: i64 = rng.gen_range(-(1i64 << bits) + 1..(1i64 << bits));
    ApFloat::from_i64(m).mul_2exp(rng.gen_range(-e_range..=e_range)).expect("small exponent")
}

/// Bits needed to hold every product and the carries of their sum.
pub fn required_bits(x: &[Ball], y: &[Ball]) -> u64 {
    let mut top = i64::MIN;
    let mut bottom = i64::MAX;
    for (a, b) in x.iter().zip(y) {
        if a.mid.is_regular() && b.mid.is_regular() {
            top = top.max(a.mid.exponent() + b.mid.exponent());
            bottom = bottom.min(a.mid.bottom_exponent() + b.mid.bottom_exponent());
        }
    }
    if top == i64::MIN {
        return 2;
    }
    (top - bottom) as u64 + bc(x.len() as u64) as u64 + 2
}

/// Exact small-dyadic instance together with a sufficient precision.
pub fn exact_small_case(rng: &mut ChaCha8Rng) -> (Vec<Ball>, Vec<Ball>, u64) {
    let n = rng.gen_range(1..=50);
    let x: Vec<Ball> = (0..n).map(|_| Ball::exact(small_dyadic(rng, 24, 40))).collect();
    let y: Vec<Ball> = (0..n).map(|_| Ball::exact(small_dyadic(rng, 24, 40))).collect();
    let p = required_bits(&x, &y) + rng.gen_range(0..100);
    (x, y, p)
}

/// Radius-free instance for the accuracy bound.
pub fn exact_case(rng: &mut ChaCha8Rng) -> (Vec<Ball>, Vec<Ball>, u64) {
    let n = rng.gen_range(1..=50);
    let p = DOT_PRECISIONS[rng.gen_range(0..DOT_PRECISIONS.len())];
    let mut exps = exponent_source(rng);
    let mut gen = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.05) {
            Ball::zero()
        } else {
            let e = exps(rng);
            Ball::exact(float_at(rng, e, 4))
        }
    };
    let x = (0..n).map(|_| gen(rng)).collect();
    let y = (0..n).map(|_| gen(rng)).collect();
    (x, y, p)
}

/// Exact complex vectors whose parts all qualify for three-multiplication
/// (three limbs, real and imaginary exponents within 63 of each other),
/// with a precision at which every sum is exact.
pub fn exact_complex_case(rng: &mut ChaCha8Rng) -> (Vec<ComplexBall>, Vec<ComplexBall>, u64) {
    let n = rng.gen_range(1..=20);
    let gen = |rng: &mut ChaCha8Rng| {
        let e = rng.gen_range(-200..200);
        let re = ApFloat::from_raw(rng.gen(), e, &[rng.gen(), rng.gen::<u64>() | 1, rng.gen()]).unwrap();
        let im = ApFloat::from_raw(rng.gen(), e + rng.gen_range(-60..60), &[rng.gen::<u64>() | 1, rng.gen(), rng.gen()]).unwrap();
        ComplexBall::new(Ball::exact(re), Ball::exact(im))
    };
    let x: Vec<ComplexBall> = (0..n).map(|_| gen(rng)).collect();
    let y: Vec<ComplexBall> = (0..n).map(|_| gen(rng)).collect();
    // every pairing of parts, so that both imaginary-part formulas are exact
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (u, v) in x.iter().zip(&y) {
        for a in [&u.re, &u.im] {
            for b in [&v.re, &v.im] {
                xs.push(a.clone());
                ys.push(b.clone());
            }
        }
    }
    let p = required_bits(&xs, &ys) + 2 + rng.gen_range(0..64);
    (x, y, p)
}

/// Random signed integer of at most `bits` bits.
pub fn rand_bigint(rng: &mut ChaCha8Rng, bits: u64) -> BigInt {
    let b = rng.gen_range(0..=bits);
    let words = b.div_ceil(32) as usize;
    let mut digits: Vec<u32> = (0..words).map(|_| rng.gen()).collect();
    if b % 32 != 0 {
        if let Some(top) = digits.last_mut() {
            *top &= (1u32 << (b % 32)) - 1;
        }
    }
    let sign = if rng.gen_bool(0.5) { Sign::Minus } else { Sign::Plus };
    BigInt::from_biguint(sign, BigUint::new(digits))
}

pub fn rand_int_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bits: u64) -> IntMatrix {
    IntMatrix::new(rows, cols, (0..rows * cols).map(|_| rand_bigint(rng, bits)).collect())
}

/// Uniform-magnitude ball: `p`-bit midpoint in `[1/2, 1)` and, half the
/// time, a radius near the last midpoint bit.
pub fn uniform_matrix_ball(rng: &mut ChaCha8Rng, p: u64) -> Ball {
    let mid = crate::profiles::uniform_float(rng, p);
    let rad = if rng.gen_bool(0.5) {
        Mag::from_parts(rng.gen_range(1 << 29..1 << 30), -(p as i64) + rng.gen_range(-8..8))
    } else {
        Mag::zero()
    };
    Ball::new(mid, rad)
}

/// Random matrix pair with dimensions up to `max_dim`; half the time the
/// inner dimension is long enough for an integer block product.
pub fn uniform_matrices(rng: &mut ChaCha8Rng, max_dim: usize, p_entries: u64) -> (BallMatrix, BallMatrix) {
    let k_min = if rng.gen_bool(0.5) { BASECASE_LEN.min(max_dim) } else { 1 };
    let (m, k, n) = (
        rng.gen_range(1..=max_dim),
        rng.gen_range(k_min..=max_dim),
        rng.gen_range(1..=max_dim),
    );
    let a = BallMatrix::from_fn(m, k, |_, _| uniform_matrix_ball(rng, p_entries));
    let b = BallMatrix::from_fn(k, n, |_, _| uniform_matrix_ball(rng, p_entries));
    (a, b)
}

/// Matrix pair with scattered exponents, zeros and radii.
pub fn scattered_matrices(rng: &mut ChaCha8Rng, max_dim: usize) -> (BallMatrix, BallMatrix) {
    let (m, k, n) = (
        rng.gen_range(1..=max_dim),
        rng.gen_range(1..=4 * max_dim),
        rng.gen_range(1..=max_dim),
    );
    let spread = [8, 300, 3000][rng.gen_range(0..3)];
    let gen = |rng: &mut ChaCha8Rng| {
        let e = rng.gen_range(-spread..=spread);
        ball_at(rng, e)
    };
    let a = BallMatrix::from_fn(m, k, |_, _| gen(rng));
    let b = BallMatrix::from_fn(k, n, |_, _| gen(rng));
    (a, b)
}

/// Series with a zero constant term and exact small-dyadic coefficients.
pub fn exp_argument(rng: &mut ChaCha8Rng, len: usize) -> Vec<Ball> {
    let mut c: Vec<Ball> = (0..len)
        .map(|_| {
            if rng.gen_bool(0.1) {
                Ball::zero()
            } else {
                Ball::exact(small_dyadic(rng, 40, 8))
            }
        })
        .collect();
    if let Some(c0) = c.first_mut() {
        *c0 = Ball::zero();
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn dot_cases_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let c = dot_case(&mut rng);
            assert!((1..=50).contains(&c.n()));
            assert_eq!(c.x_values().len(), c.n());
            assert!(DOT_PRECISIONS.contains(&c.p));
            assert!(c.reproducer().lines().count() == c.n() + 1);
        }
    }

    #[test]
    fn complex_cases_qualify_for_three_mult() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (x, _, _) = exact_complex_case(&mut rng);
        for c in &x {
            assert!(c.re.mid.limb_count() >= 2 && c.im.mid.limb_count() >= 2);
            assert!((c.re.mid.exponent() - c.im.mid.exponent()).abs() < 64);
        }
    }

    #[test]
    fn required_bits_covers_span() {
        let x = vec![Ball::from_i64(1), Ball::exact(ApFloat::from_i64(3).mul_2exp(-10).unwrap())];
        let y = vec![Ball::one(), Ball::one()];
        // products lie below 2^2 and are multiples of 2^-10
        assert_eq!(required_bits(&x, &y), 12 + bc(2) as u64 + 2);
    }
}
