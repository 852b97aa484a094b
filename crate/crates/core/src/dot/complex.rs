use crate::numbers::{ApFloat, Ball, ComplexBall};

use super::engine::{dot_terms, Term, ZERO_MAG};
use super::{DotOptions, Strided};

/// `initial + (-1)^subtract * sum(x_i * y_i)` over rectangular complex balls.
///
/// The real and imaginary parts are separate length-2N fused real dot
/// products, so an exact or zero part stays exact or zero.
pub fn dot_complex_ball(
    initial: Option<&ComplexBall>,
    subtract: bool,
    x: Strided<ComplexBall>,
    y: Strided<ComplexBall>,
    p: u64,
) -> ComplexBall {
    dot_complex_ball_with(&DotOptions::default(), initial, subtract, x, y, p)
}

pub fn dot_complex_approx(
    initial: Option<&ComplexBall>,
    subtract: bool,
    x: Strided<ComplexBall>,
    y: Strided<ComplexBall>,
    p: u64,
) -> (ApFloat, ApFloat) {
    let r = complex_dot(&DotOptions::default(), initial, subtract, x, y, p, false);
    (r.re.mid, r.im.mid)
}

pub fn dot_complex_ball_with(
    opts: &DotOptions,
    initial: Option<&ComplexBall>,
    subtract: bool,
    x: Strided<ComplexBall>,
    y: Strided<ComplexBall>,
    p: u64,
) -> ComplexBall {
    complex_dot(opts, initial, subtract, x, y, p, true)
}

fn complex_dot(
    opts: &DotOptions,
    initial: Option<&ComplexBall>,
    subtract: bool,
    x: Strided<ComplexBall>,
    y: Strided<ComplexBall>,
    p: u64,
    with_radius: bool,
) -> ComplexBall {
    assert_eq!(x.len(), y.len(), "dot product operands differ in length");
    let n = x.len();
    let one = ApFloat::one();
    let zero = ComplexBall::zero();
    let init = initial.unwrap_or(&zero);
    let extra = initial.is_some() as usize;

    // re = sum(a c) - sum(b d)
    let re_init = initial.map(|_| unit_term(&init.re, &one));
    let re = dot_terms(
        2 * n + extra,
        |k| {
            if k < n {
                let (u, v) = (x.get(k), y.get(k));
                Term::ball(&u.re, &v.re, subtract)
            } else if k < 2 * n {
                let (u, v) = (x.get(k - n), y.get(k - n));
                Term::ball(&u.im, &v.im, !subtract)
            } else {
                re_init.unwrap()
            }
        },
        p,
        opts,
        with_radius,
    );

    let im_init = initial.map(|_| unit_term(&init.im, &one));
    let sums = three_mult_sums(opts, x, y);
    let im = match sums {
        None => dot_terms(
            2 * n + extra,
            |k| {
                if k < n {
                    let (u, v) = (x.get(k), y.get(k));
                    Term::ball(&u.re, &v.im, subtract)
                } else if k < 2 * n {
                    let (u, v) = (x.get(k - n), y.get(k - n));
                    Term::ball(&u.im, &v.re, subtract)
                } else {
                    im_init.unwrap()
                }
            },
            p,
            opts,
            with_radius,
        ),
        Some(sums) => {
            let mut terms = Vec::with_capacity(5 * n + extra);
            for (i, s) in sums.iter().enumerate() {
                let (u, v) = (x.get(i), y.get(i));
                match s {
                    Some((ab, cd)) => {
                        let (a, b, c, d) = (&u.re, &u.im, &v.re, &v.im);
                        terms.push(mid_only(ab, cd, subtract));
                        terms.push(mid_only(&a.mid, &c.mid, !subtract));
                        terms.push(mid_only(&b.mid, &d.mid, !subtract));
                        terms.push(Term {
                            mid: false,
                            ..Term::ball(a, d, subtract)
                        });
                        terms.push(Term {
                            mid: false,
                            ..Term::ball(b, c, subtract)
                        });
                    }
                    None => {
                        terms.push(Term::ball(&u.re, &v.im, subtract));
                        terms.push(Term::ball(&u.im, &v.re, subtract));
                    }
                }
            }
            if let Some(t) = im_init {
                terms.push(t);
            }
            dot_terms(terms.len(), |k| terms[k], p, opts, with_radius)
        }
    };
    ComplexBall::new(re, im)
}

fn unit_term<'a>(b: &'a Ball, one: &'a ApFloat) -> Term<'a> {
    Term {
        x: &b.mid,
        y: one,
        rx: &b.rad,
        ry: &ZERO_MAG,
        negate: false,
        mid: true,
        rad: true,
    }
}

fn mid_only<'a>(x: &'a ApFloat, y: &'a ApFloat, negate: bool) -> Term<'a> {
    Term {
        x,
        y,
        rx: &ZERO_MAG,
        ry: &ZERO_MAG,
        negate,
        mid: true,
        rad: false,
    }
}

/// Exact `(a + b, c + d)` for every term that qualifies for the
/// three-multiplication imaginary part, or `None` when no term does.
fn three_mult_sums(
    opts: &DotOptions,
    x: Strided<ComplexBall>,
    y: Strided<ComplexBall>,
) -> Option<Vec<Option<(ApFloat, ApFloat)>>> {
    let cutoff = opts.complex_three_mult_cutoff_limbs;
    let qualifies = |u: &ComplexBall, v: &ComplexBall| {
        let parts = [&u.re.mid, &u.im.mid, &v.re.mid, &v.im.mid];
        parts.iter().all(|m| m.is_regular() && m.limb_count() >= cutoff)
            && (u.re.mid.exponent() - u.im.mid.exponent()).abs() < 64
            && (v.re.mid.exponent() - v.im.mid.exponent()).abs() < 64
    };
    if !(0..x.len()).any(|i| qualifies(x.get(i), y.get(i))) {
        return None;
    }
    let sums = (0..x.len())
        .map(|i| {
            let (u, v) = (x.get(i), y.get(i));
            if !qualifies(u, v) {
                return None;
            }
            let ab = u.re.mid.add_exact(&u.im.mid).ok()?;
            let cd = v.re.mid.add_exact(&v.im.mid).ok()?;
            Some((ab, cd))
        })
        .collect();
    Some(sums)
}
