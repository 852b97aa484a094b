use std::fmt;
use std::str::FromStr;

use crate::dot::Strided;
use crate::error::{Error, Result};
use crate::numbers::{Ball, Mag};

/// Dense row-major matrix of balls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Ball>,
}

impl BallMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Ball>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Domain(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(BallMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        BallMatrix {
            rows,
            cols,
            entries: vec![Ball::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Ball::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Ball) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        BallMatrix { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Ball] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Ball {
        &self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Ball {
        &mut self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Ball] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Column `j` as a strided view.
    pub fn col(&self, j: usize) -> Strided<'_, Ball> {
        Strided::new(&self.entries, j, self.cols as isize, self.rows).expect("column in range")
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(Ball::is_finite)
    }

    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(Ball::is_exact)
    }

    pub fn neg(&self) -> Self {
        BallMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(Ball::neg).collect(),
        }
    }

    /// Entrywise ball sum with `p`-bit midpoints.
    pub fn add(&self, other: &Self, p: u64) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b, p)).collect();
        Ok(BallMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn sub(&self, other: &Self, p: u64) -> Result<Self> {
        self.add(&other.neg(), p)
    }

    /// Upper bounds for the absolute values of the midpoints.
    pub fn abs_mid(&self) -> MagMatrix {
        MagMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|b| Mag::upper_bound(&b.mid)).collect(),
        }
    }

    pub fn radii(&self) -> MagMatrix {
        MagMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|b| b.rad).collect(),
        }
    }
}

/// Rectangular complex ball matrix stored as real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBallMatrix {
    pub re: BallMatrix,
    pub im: BallMatrix,
}

impl ComplexBallMatrix {
    pub fn new(re: BallMatrix, im: BallMatrix) -> Result<Self> {
        if (re.rows, re.cols) != (im.rows, im.cols) {
            return Err(Error::Domain("real and imaginary parts differ in shape".into()));
        }
        Ok(ComplexBallMatrix { re, im })
    }

    pub fn from_real(re: BallMatrix) -> Self {
        let im = BallMatrix::zeros(re.rows, re.cols);
        ComplexBallMatrix { re, im }
    }

    pub fn rows(&self) -> usize {
        self.re.rows
    }

    pub fn cols(&self) -> usize {
        self.re.cols
    }
}

/// Dense row-major matrix of nonnegative magnitudes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MagMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Mag>,
}

impl MagMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MagMatrix {
            rows,
            cols,
            entries: vec![Mag::zero(); rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Mag {
        &self.entries[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Mag::is_zero)
    }

    /// Entrywise sum, rounded up.
    pub fn add_up(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        MagMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.add_up(b)).collect(),
        }
    }
}

/// `rows cols` on the first line, then one ball per line in row-major order.
impl fmt::Display for BallMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for b in &self.entries {
            writeln!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for BallMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("missing header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|w| w.parse().map_err(|_| Error::Parse(header.to_string())))
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Parse(header.to_string()));
        };
        let entries = lines.map(str::parse).collect::<Result<Vec<Ball>>>()?;
        BallMatrix::new(rows, cols, entries).map_err(|_| Error::Parse("entry count does not match header".into()))
    }
}
