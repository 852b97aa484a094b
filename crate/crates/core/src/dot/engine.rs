//! Setup pass, fixed-point accumulation and finalization.

use smallvec::SmallVec;

use crate::limb::{add_signed_range, mul_into, mulhigh_approx, neg_in_place, rshift_bits_into, Limb};
use crate::numbers::{ball_fallback_addmul, ApFloat, Ball, Mag, MAG_BITS};

use super::DotOptions;

/// Largest exponent magnitude handled without the fallback.
pub const DOT_EXP_LIMIT: i64 = 1 << 60;

const MIN: i64 = i64::MIN;
const MAX: i64 = i64::MAX;
const RAD_BITS: i64 = MAG_BITS as i64;

pub(crate) static ZERO_MAG: Mag = Mag::zero();

/// One product `x * y` as seen by the engine. `mid` and `rad` select which
/// parts of the product take part; `negate` flips its sign.
#[derive(Clone, Copy)]
pub(crate) struct Term<'a> {
    pub x: &'a ApFloat,
    pub y: &'a ApFloat,
    pub rx: &'a Mag,
    pub ry: &'a Mag,
    pub negate: bool,
    pub mid: bool,
    pub rad: bool,
}

impl<'a> Term<'a> {
    pub fn ball(x: &'a Ball, y: &'a Ball, negate: bool) -> Self {
        Term {
            x: &x.mid,
            y: &y.mid,
            rx: &x.rad,
            ry: &y.rad,
            negate,
            mid: true,
            rad: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DotStatus {
    Proceed,
    Fallback,
    ZeroResult,
}

/// Working precision and exponents chosen by the setup pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DotPlan {
    pub e_max: i64,
    pub e_min: i64,
    pub e_rad: i64,
    pub n_terms: usize,
    pub n_nonzero: usize,
    pub p_eff: u64,
    pub extend: u64,
    pub padding: u64,
    pub n_s: usize,
    pub e_s: i64,
    pub status: DotStatus,
}

/// Binary length of `v`.
pub fn bc(v: u64) -> u64 {
    (64 - v.leading_zeros()) as u64
}

#[inline]
fn exp_ok(e: i64) -> bool {
    (-DOT_EXP_LIMIT..=DOT_EXP_LIMIT).contains(&e)
}

#[inline]
fn float_ok(x: &ApFloat) -> bool {
    x.is_zero() || (x.is_regular() && exp_ok(x.exponent()))
}

#[inline]
fn mag_ok(r: &Mag) -> bool {
    r.is_zero() || (r.is_finite() && exp_ok(r.exponent()))
}

pub(crate) fn plan_terms<'a, F>(n: usize, term: &F, p: u64, opts: &DotOptions, with_radius: bool) -> DotPlan
where
    F: Fn(usize) -> Term<'a>,
{
    assert!(p >= 2, "precision must be at least 2 bits");
    let mut n_nonzero = 0usize;
    let mut e_max = MIN;
    let mut e_min = MAX;
    let mut e_rad = MIN;
    let track_min = p > 128;
    let mut status = DotStatus::Proceed;
    for i in 0..n {
        let t = term(i);
        if !(float_ok(t.x) && float_ok(t.y)) || (with_radius && !(mag_ok(t.rx) && mag_ok(t.ry))) {
            status = DotStatus::Fallback;
            break;
        }
        let (xr, yr) = (t.x.is_regular(), t.y.is_regular());
        if t.mid && xr && yr {
            n_nonzero += 1;
            let e = t.x.exponent() + t.y.exponent();
            e_max = e_max.max(e);
            if track_min {
                let bottom = e - 64 * (t.x.limb_count() + t.y.limb_count()) as i64;
                e_min = e_min.min(bottom);
            }
        }
        if with_radius && t.rad {
            let (rxz, ryz) = (t.rx.is_zero(), t.ry.is_zero());
            if xr && !ryz {
                e_rad = e_rad.max(t.x.exponent() + t.ry.exponent());
            }
            if yr && !rxz {
                e_rad = e_rad.max(t.y.exponent() + t.rx.exponent());
            }
            if !rxz && !ryz {
                e_rad = e_rad.max(t.rx.exponent() + t.ry.exponent());
            }
        }
    }
    let mut plan = DotPlan {
        e_max,
        e_min,
        e_rad,
        n_terms: n,
        n_nonzero,
        p_eff: p,
        extend: 0,
        padding: 0,
        n_s: 0,
        e_s: 0,
        status,
    };
    if status == DotStatus::Fallback {
        return plan;
    }
    if e_max == MIN && e_rad == MIN {
        plan.status = DotStatus::ZeroResult;
        return plan;
    }
    let mut p_eff = p as i64;
    if e_max == MIN {
        p_eff = 2;
    } else if opts.reduce_precision {
        if e_rad != MIN {
            p_eff = p_eff.min(e_max - e_rad + RAD_BITS);
        }
        if e_min != MAX {
            p_eff = p_eff.min(e_max - e_min + RAD_BITS);
        }
    }
    let p_eff = p_eff.max(2) as u64;
    let padding = 4 + bc(n as u64);
    let extend = bc(n_nonzero as u64) + 1;
    plan.p_eff = p_eff;
    plan.padding = padding;
    plan.extend = extend;
    plan.n_s = ((p_eff + extend + padding).div_ceil(64)).max(2) as usize;
    plan.e_s = if e_max == MIN { 0 } else { e_max + extend as i64 };
    plan
}

type Scratch = SmallVec<[Limb; 24]>;

/// Fixed-point midpoint accumulator plus the ulp and radius counters.
#[derive(Clone, Debug)]
pub struct DotAccumulator {
    /// Two's complement sum, scaled so that `s` represents
    /// `2^e_s * sum(s[k] * 2^(64 (k - n_s)))`.
    pub s: Scratch,
    /// Error bound in ulps of `s[0]`.
    pub err: u64,
    /// Radius sum in units of `2^(e_rad - 30)`.
    pub srad: u64,
    pub srad_overflow: bool,
    prod: Scratch,
    shifted: Scratch,
    inline_fast_path: bool,
}

impl DotAccumulator {
    pub fn new(plan: &DotPlan) -> Self {
        Self::with_options(plan, &DotOptions::default())
    }

    pub(crate) fn with_options(plan: &DotPlan, opts: &DotOptions) -> Self {
        let n_s = plan.n_s;
        let mut s = Scratch::new();
        s.resize(n_s, 0);
        let mut prod = Scratch::new();
        prod.resize(2 * n_s + 4, 0);
        let mut shifted = Scratch::new();
        shifted.resize(2 * n_s + 5, 0);
        DotAccumulator {
            s,
            err: 0,
            srad: 0,
            srad_overflow: false,
            prod,
            shifted,
            inline_fast_path: opts.inline_fast_path,
        }
    }

    #[inline]
    fn add_srad(&mut self, v: u64) {
        match self.srad.checked_add(v) {
            Some(s) => self.srad = s,
            None => self.srad_overflow = true,
        }
    }

    /// Adds an upper bound for `(a / 2^30)(b / 2^30) 2^e` to `srad`, where
    /// `a, b <= 2^30` and `e <= e_rad`.
    #[inline]
    pub(crate) fn add_radius_raw(&mut self, a: u64, b: u64, e: i64, e_rad: i64) {
        let d = e_rad - e;
        debug_assert!(d >= 0);
        if d < RAD_BITS {
            self.add_srad(((a * b) >> (RAD_BITS + d)) + 1);
        } else {
            self.add_srad(1);
        }
    }

    fn add_term_radius(&mut self, t: &Term, e_rad: i64) {
        let (rxz, ryz) = (t.rx.is_zero(), t.ry.is_zero());
        if rxz && ryz {
            return;
        }
        if !ryz && t.x.is_regular() {
            let (a, ea) = weak_bound(t.x);
            self.add_radius_raw(a, t.ry.mantissa(), ea + t.ry.exponent(), e_rad);
        }
        if !rxz && t.y.is_regular() {
            let (a, ea) = weak_bound(t.y);
            self.add_radius_raw(a, t.rx.mantissa(), ea + t.rx.exponent(), e_rad);
        }
        if !rxz && !ryz {
            self.add_radius_raw(t.rx.mantissa(), t.ry.mantissa(), t.rx.exponent() + t.ry.exponent(), e_rad);
        }
    }
}

/// Upper bound `(b / 2^30) 2^e` for `|x|` with `b <= 2^30`: the top 30 bits
/// plus one, or exactly the top bits when nothing below them is set.
#[inline]
fn weak_bound(x: &ApFloat) -> (u64, i64) {
    let m = x.mantissa();
    let top = m[m.len() - 1];
    let hi = top >> (64 - MAG_BITS);
    if m.len() == 1 && top << MAG_BITS == 0 {
        (hi, x.exponent())
    } else {
        (hi + 1, x.exponent())
    }
}

/// Adds `m * m2` (negated when `negate`) into the accumulator. Both inputs
/// must be regular and the plan must be `Proceed`.
pub fn dot_accumulate_term(plan: &DotPlan, acc: &mut DotAccumulator, m: &ApFloat, m2: &ApFloat, negate: bool) {
    debug_assert!(m.is_regular() && m2.is_regular());
    let n_s = plan.n_s;
    let total = 64 * n_s as i64;
    let shift = plan.e_s - (m.exponent() + m2.exponent());
    debug_assert!(shift > 0);
    if shift >= total {
        acc.err += 1;
        return;
    }
    let negate = negate ^ m.is_negative() ^ m2.is_negative();
    let shift_limbs = (shift / 64) as usize;
    let shift_bits = (shift % 64) as u32;
    let p_t = total - shift;
    let nn = (p_t as usize).div_ceil(64) + 1;
    let (a, b) = (m.mantissa(), m2.mantissa());
    let (n, n2) = (a.len(), b.len());
    if n > nn || n2 > nn {
        acc.err += 1;
    }
    let a = &a[n - n.min(nn)..];
    let b = &b[n2 - n2.min(nn)..];
    let nt = a.len() + b.len();

    let DotAccumulator {
        s,
        err,
        prod,
        shifted,
        inline_fast_path,
        ..
    } = acc;
    let high;
    let mut t: &[Limb] = if p_t >= 1600 && 10 * 64 * n.min(n2) as i64 > 9 * p_t {
        let (h, e) = mulhigh_approx(a, b, nn.min(nt));
        *err += e as u64;
        high = h;
        &high
    } else if *inline_fast_path && n_s <= 3 && a.len() <= 2 && b.len() <= 2 {
        mul_small(&mut prod[..nt], a, b);
        &prod[..nt]
    } else {
        mul_into(&mut prod[..nt], a, b);
        &prod[..nt]
    };
    if shift_bits != 0 {
        let k = t.len();
        rshift_bits_into(&mut shifted[..k + 1], t, shift_bits);
        t = &shifted[..k + 1];
    }
    let lo = t.iter().position(|&w| w != 0).unwrap_or(t.len() - 1);
    let t = &t[lo..];
    let nt = t.len();
    let (ds, dt, v) = if shift_limbs + nt <= n_s {
        (n_s - shift_limbs - nt, 0, nt)
    } else {
        *err += 1;
        (0, nt + shift_limbs - n_s, n_s - shift_limbs)
    };
    add_signed_range(s, &t[dt..dt + v], ds, shift_limbs, negate);
}

/// Product of at most two-by-two limbs with straight-line code.
#[inline(always)]
fn mul_small(out: &mut [Limb], a: &[Limb], b: &[Limb]) {
    match (a.len(), b.len()) {
        (1, 1) => {
            let p = a[0] as u128 * b[0] as u128;
            out[0] = p as Limb;
            out[1] = (p >> 64) as Limb;
        }
        (1, 2) | (2, 1) => {
            let (x, y) = if a.len() == 1 { (a[0], b) } else { (b[0], a) };
            let p0 = x as u128 * y[0] as u128;
            let p1 = x as u128 * y[1] as u128 + (p0 >> 64);
            out[0] = p0 as Limb;
            out[1] = p1 as Limb;
            out[2] = (p1 >> 64) as Limb;
        }
        _ => {
            let p00 = a[0] as u128 * b[0] as u128;
            let p01 = a[0] as u128 * b[1] as u128;
            let p10 = a[1] as u128 * b[0] as u128;
            let p11 = a[1] as u128 * b[1] as u128;
            out[0] = p00 as Limb;
            let mid = (p00 >> 64) + (p01 as Limb as u128) + (p10 as Limb as u128);
            out[1] = mid as Limb;
            let hi = (mid >> 64) + (p01 >> 64) + (p10 >> 64) + (p11 as Limb as u128);
            out[2] = hi as Limb;
            out[3] = ((hi >> 64) + (p11 >> 64)) as Limb;
        }
    }
}

/// Adds an upper bound for `a * b` to the radius accumulator. Zero factors
/// are skipped; the product exponent must not exceed `e_rad`.
pub fn dot_accumulate_radius(acc: &mut DotAccumulator, a: &Mag, b: &Mag, e_rad: i64) {
    if a.is_zero() || b.is_zero() {
        return;
    }
    acc.add_radius_raw(a.mantissa(), b.mantissa(), a.exponent() + b.exponent(), e_rad);
}

/// Converts the accumulator into a ball with a `p_eff`-bit midpoint.
pub fn dot_finalize(plan: &DotPlan, acc: &DotAccumulator) -> Ball {
    let (mid, rad) = finalize_parts(plan, acc, true);
    Ball::new(mid, rad)
}

fn finalize_parts(plan: &DotPlan, acc: &DotAccumulator, with_radius: bool) -> (ApFloat, Mag) {
    let mut s = acc.s.clone();
    let negative = s[plan.n_s - 1] >> 63 == 1;
    if negative {
        neg_in_place(&mut s);
    }
    let mid = match ApFloat::normalize_wide(negative, plan.e_s as i128, &s) {
        Ok(m) => m,
        Err(_) => return (ApFloat::nan(), Mag::zero()),
    };
    let (mid, eps) = mid.round(plan.p_eff);
    if !with_radius {
        return (mid, Mag::zero());
    }
    let mut rad = eps;
    if acc.err != 0 {
        let ulp = plan.e_s as i128 - 64 * plan.n_s as i128;
        rad = rad.add_up(&Mag::from_scaled_int(acc.err as u128, ulp));
    }
    if acc.srad_overflow {
        rad = Mag::inf();
    } else if acc.srad != 0 {
        rad = rad.add_up(&Mag::from_scaled_int(acc.srad as u128, plan.e_rad as i128 - RAD_BITS as i128));
    }
    (mid, rad)
}

/// Evaluates `sum(term(i))` for `i < n` as one fused dot product.
pub(crate) fn dot_terms<'a, F>(n: usize, term: F, p: u64, opts: &DotOptions, with_radius: bool) -> Ball
where
    F: Fn(usize) -> Term<'a>,
{
    let plan = plan_terms(n, &term, p, opts, with_radius);
    match plan.status {
        DotStatus::ZeroResult => Ball::zero(),
        DotStatus::Fallback => fallback(n, &term, p, with_radius),
        DotStatus::Proceed => {
            let mut acc = DotAccumulator::with_options(&plan, opts);
            for i in 0..n {
                let t = term(i);
                if t.mid && t.x.is_regular() && t.y.is_regular() {
                    dot_accumulate_term(&plan, &mut acc, t.x, t.y, t.negate);
                }
                if with_radius && t.rad {
                    acc.add_term_radius(&t, plan.e_rad);
                }
            }
            let (mid, rad) = finalize_parts(&plan, &acc, with_radius);
            if mid.is_nan() {
                Ball::indeterminate()
            } else {
                Ball::new(mid, rad)
            }
        }
    }
}

/// Term-by-term ball multiply-add used when the setup pass meets special
/// values or exponents outside the supported window.
fn fallback<'a, F>(n: usize, term: &F, p: u64, with_radius: bool) -> Ball
where
    F: Fn(usize) -> Term<'a>,
{
    let mut acc = Ball::zero();
    for i in 0..n {
        let t = term(i);
        let rad_of = |r: &Mag| if with_radius && t.rad { *r } else { Mag::zero() };
        if t.mid {
            let x = Ball::new(t.x.clone(), rad_of(t.rx));
            let y = if t.negate { t.y.neg() } else { t.y.clone() };
            let y = Ball::new(y, rad_of(t.ry));
            acc = ball_fallback_addmul(&acc, &x, &y, p);
        } else if with_radius && t.rad {
            let mx = Mag::upper_bound(t.x);
            let my = Mag::upper_bound(t.y);
            let extra = mx.mul_up(t.ry).add_up(&my.mul_up(t.rx)).add_up(&t.rx.mul_up(t.ry));
            acc = Ball::new(acc.mid, acc.rad.add_up(&extra));
        }
        if acc.is_indeterminate() {
            break;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan_for(balls: &[(Ball, Ball)], p: u64) -> DotPlan {
        let f = |i: usize| Term::ball(&balls[i].0, &balls[i].1, false);
        plan_terms(balls.len(), &f, p, &DotOptions::default(), true)
    }

    #[test]
    fn setup_sizes() {
        let terms: Vec<(Ball, Ball)> = (0..100).map(|i| (Ball::from_i64(i + 1), Ball::one())).collect();
        let plan = plan_for(&terms, 128);
        assert_eq!(plan.padding, 11);
        assert_eq!(plan.extend, 8);
        assert_eq!(plan.n_s, 3);
        assert_eq!(plan.status, DotStatus::Proceed);
    }

    #[test]
    fn setup_reduces_precision_for_wide_radius() {
        // |m m'| < 2^0 and radius terms below 2^-10
        let x = Ball::new(ApFloat::from_f64(0.75), Mag::pow2(-11));
        let y = Ball::new(ApFloat::one().mul_2exp(-1).unwrap(), Mag::zero());
        let plan = plan_for(&[(x, y)], 1000);
        assert_eq!(plan.e_max, 0);
        assert_eq!(plan.e_rad, -10);
        assert_eq!(plan.p_eff, 40);
    }

    #[test]
    fn setup_zero_and_fallback() {
        let z = vec![(Ball::zero(), Ball::one()); 3];
        assert_eq!(plan_for(&z, 53).status, DotStatus::ZeroResult);
        let inf = vec![(Ball::exact(ApFloat::pos_inf()), Ball::one())];
        assert_eq!(plan_for(&inf, 53).status, DotStatus::Fallback);
        let huge = vec![(Ball::exact(ApFloat::one().mul_2exp(1 << 60).unwrap()), Ball::one())];
        assert_eq!(plan_for(&huge, 53).status, DotStatus::Fallback);
    }

    #[test]
    fn radius_step_rules() {
        let plan = plan_for(&[(Ball::one(), Ball::one())], 53);
        let mut acc = DotAccumulator::new(&plan);
        dot_accumulate_radius(&mut acc, &Mag::zero(), &Mag::zero(), 0);
        assert_eq!(acc.srad, 0);
        let a = Mag::from_parts((1 << 29) + 1, 3);
        dot_accumulate_radius(&mut acc, &a, &a, 6);
        assert_eq!(acc.srad, (1 << 28) + 2);
        acc.srad = 0;
        dot_accumulate_radius(&mut acc, &a, &a, 46);
        assert_eq!(acc.srad, 1);
    }

    #[test]
    fn term_below_window_only_counts_error() {
        let plan = plan_for(&[(Ball::one(), Ball::one())], 53);
        let mut acc = DotAccumulator::new(&plan);
        let tiny = ApFloat::one().mul_2exp(-400).unwrap();
        dot_accumulate_term(&plan, &mut acc, &tiny, &tiny, false);
        assert_eq!(acc.err, 1);
        assert!(acc.s.iter().all(|&w| w == 0));
    }

    #[test]
    fn finalize_trivial_cases() {
        let plan = plan_for(&[(Ball::one(), Ball::one())], 53);
        let acc = DotAccumulator::new(&plan);
        assert_eq!(dot_finalize(&plan, &acc), Ball::zero());
        let mut acc = DotAccumulator::new(&plan);
        dot_accumulate_term(&plan, &mut acc, &ApFloat::from_i64(-1), &ApFloat::one(), false);
        assert_eq!(dot_finalize(&plan, &acc), Ball::from_i64(-1));
    }

    #[test]
    fn small_products_match_general_multiply() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let na = rng.gen_range(1..=2);
            let nb = rng.gen_range(1..=2);
            let a: Vec<Limb> = (0..na).map(|_| rng.gen()).collect();
            let b: Vec<Limb> = (0..nb).map(|_| rng.gen()).collect();
            let mut x = vec![0; na + nb];
            let mut y = vec![0; na + nb];
            mul_small(&mut x, &a, &b);
            mul_into(&mut y, &a, &b);
            assert_eq!(x, y);
        }
    }
}
