//! Polynomial and power series basecase routines on top of the dot product.

use crate::dot::{dot_ball, Strided};
use crate::error::{Error, Result};
use crate::numbers::Ball;

/// Polynomial with ball coefficients; `coeffs[k]` multiplies `x^k`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BallPoly {
    pub coeffs: Vec<Ball>,
}

impl BallPoly {
    pub fn new(coeffs: Vec<Ball>) -> Self {
        BallPoly { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        BallPoly::new(c.iter().map(|&v| Ball::from_i64(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient `k`, zero past the end.
    pub fn coeff(&self, k: usize) -> Ball {
        self.coeffs.get(k).cloned().unwrap_or_else(Ball::zero)
    }
}

/// `a * b mod x^len` by one dot product per coefficient; `b` is read
/// backwards through a negative stride.
pub fn poly_mullow_classical(a: &BallPoly, b: &BallPoly, len: usize, p: u64) -> BallPoly {
    let (na, nb) = (a.len(), b.len());
    if na == 0 || nb == 0 {
        return BallPoly::new(vec![Ball::zero(); len]);
    }
    let coeffs = (0..len)
        .map(|k| {
            // i ranges over max(0, k - nb + 1) ..= min(k, na - 1)
            if k > na + nb - 2 {
                return Ball::zero();
            }
            let lo = (k + 1).saturating_sub(nb);
            let hi = k.min(na - 1);
            let n = hi + 1 - lo;
            let x = Strided::contiguous(&a.coeffs[lo..=hi]);
            let y = Strided::new(&b.coeffs, k - lo, -1, n).expect("indices in range");
            dot_ball(None, false, x, y, p)
        })
        .collect();
    BallPoly::new(coeffs)
}

/// `exp(a) mod x^len` for a series with zero constant term, via
/// `b_k = sum_{j=1..k} j a_j b_{k-j} / k`.
pub fn series_exp_basecase(a: &BallPoly, len: usize, p: u64) -> Result<BallPoly> {
    if !a.coeff(0).is_zero() || !a.coeff(0).rad.is_zero() {
        return Err(Error::Domain("exponential needs a zero constant term".into()));
    }
    if len == 0 {
        return Ok(BallPoly::default());
    }
    // ja[j - 1] = j * a_j
    let ja: Vec<Ball> = (1..len).map(|j| a.coeff(j).mul_u64(j as u64)).collect();
    let mut b = Vec::with_capacity(len);
    b.push(Ball::one());
    for k in 1..len {
        let x = Strided::contiguous(&ja[..k]);
        let y = Strided::new(&b, k - 1, -1, k).expect("indices in range");
        let s = dot_ball(None, false, x, y, p);
        b.push(s.div_u64(k as u64, p));
    }
    Ok(BallPoly::new(b))
}
