//! Exact textual form used by test vectors and verification reproducers.
//!
//! ```text
//! float  := "0" | "+inf" | "-inf" | "nan" | "(" sign ", " exp ", " limbs ")"
//! limbs  := 16-digit hex words, most significant first, separated by spaces
//! mag    := "0" | "inf" | "(" hex-mantissa ", " exp ")"
//! ball   := float " ± " mag          (" +/- " is accepted on input)
//! ```

use std::fmt;
use std::str::FromStr;

use super::apfloat::{ApFloat, Class};
use super::ball::{Ball, ComplexBall};
use super::mag::{Mag, MagKind};
use crate::error::Error;

impl fmt::Display for ApFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.class() {
            Class::Zero => f.write_str("0"),
            Class::PosInf => f.write_str("+inf"),
            Class::NegInf => f.write_str("-inf"),
            Class::NaN => f.write_str("nan"),
            Class::Finite => {
                let sign = if self.is_negative() { '-' } else { '+' };
                write!(f, "({sign}, {}, ", self.exponent())?;
                for (i, limb) in self.mantissa().iter().rev().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{limb:016x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn parse_err(s: &str) -> Error {
    Error::Parse(s.to_string())
}

fn tuple_parts(s: &str) -> Option<Vec<&str>> {
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.split(',').map(str::trim).collect())
}

impl FromStr for ApFloat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        match s {
            "0" => return Ok(ApFloat::zero()),
            "+inf" | "inf" => return Ok(ApFloat::pos_inf()),
            "-inf" => return Ok(ApFloat::neg_inf()),
            "nan" => return Ok(ApFloat::nan()),
            _ => {}
        }
        let parts = tuple_parts(s).ok_or_else(|| parse_err(s))?;
        let [sign, exp, limbs] = parts[..] else {
            return Err(parse_err(s));
        };
        let negative = match sign {
            "+" => false,
            "-" => true,
            _ => return Err(parse_err(s)),
        };
        let exp: i64 = exp.parse().map_err(|_| parse_err(s))?;
        let mut raw = limbs
            .split_whitespace()
            .map(|w| u64::from_str_radix(w, 16))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| parse_err(s))?;
        raw.reverse();
        let x = ApFloat::from_raw(negative, exp, &raw)?;
        // Only canonical encodings are accepted so that parsing is injective.
        if x.is_zero() || x.mantissa() != raw.as_slice() || x.exponent() != exp {
            return Err(parse_err(s));
        }
        Ok(x)
    }
}

impl fmt::Display for Mag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            MagKind::Zero => f.write_str("0"),
            MagKind::Inf => f.write_str("inf"),
            MagKind::Finite => write!(f, "({:x}, {})", self.mantissa(), self.exponent()),
        }
    }
}

impl FromStr for Mag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        match s {
            "0" => return Ok(Mag::zero()),
            "inf" => return Ok(Mag::inf()),
            _ => {}
        }
        let parts = tuple_parts(s).ok_or_else(|| parse_err(s))?;
        let [man, exp] = parts[..] else {
            return Err(parse_err(s));
        };
        let man = u64::from_str_radix(man, 16).map_err(|_| parse_err(s))?;
        let exp: i64 = exp.parse().map_err(|_| parse_err(s))?;
        if !((1 << 29)..(1 << 30)).contains(&man) {
            return Err(parse_err(s));
        }
        let m = Mag::from_parts(man, exp);
        if m.exponent() != exp {
            return Err(parse_err(s));
        }
        Ok(m)
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {}", self.mid, self.rad)
    }
}

impl FromStr for Ball {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let (mid, rad) = s
            .split_once('±')
            .or_else(|| s.split_once("+/-"))
            .ok_or_else(|| parse_err(s))?;
        Ok(Ball::new(mid.parse()?, rad.parse()?))
    }
}

impl fmt::Display for ComplexBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ; {}", self.re, self.im)
    }
}

impl FromStr for ComplexBall {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let (re, im) = s.split_once(';').ok_or_else(|| parse_err(s))?;
        Ok(ComplexBall::new(re.parse()?, im.parse()?))
    }
}
