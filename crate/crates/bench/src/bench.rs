//! Median wall-clock timings against a naive per-term multiply-add loop.

use std::fmt;
use std::hint::black_box;
use std::str::FromStr;
use std::time::Instant;

use arbdot::dot::{dot_approx, dot_ball, dot_complex_ball, Strided};
use arbdot::matmul::{
    block_matmul_ball_counted, classical_matmul_ball, matmul_auto_traced, plan_blocks, BallMatrix, MatmulPath,
};
use arbdot::numbers::ball_fallback_addmul;
use arbdot::poly::{poly_mullow_classical, series_exp_basecase, BallPoly};
use arbdot::{Ball, ComplexBall};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::profiles::{self, Profile};

pub const CSV_HEADER: &str = "operation,N,p,profile,ns_per_term,ratio_vs_naive,blocks";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operation {
    DotBall,
    DotApprox,
    DotComplex,
    MatmulClassical,
    MatmulBlock,
    MatmulAuto,
    PolyMul,
    SeriesExp,
}

impl Operation {
    pub const ALL: [Operation; 8] = [
        Operation::DotBall,
        Operation::DotApprox,
        Operation::DotComplex,
        Operation::MatmulClassical,
        Operation::MatmulBlock,
        Operation::MatmulAuto,
        Operation::PolyMul,
        Operation::SeriesExp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Operation::DotBall => "dot_ball",
            Operation::DotApprox => "dot_approx",
            Operation::DotComplex => "dot_complex",
            Operation::MatmulClassical => "matmul_classical",
            Operation::MatmulBlock => "matmul_block",
            Operation::MatmulAuto => "matmul_auto",
            Operation::PolyMul => "poly_mul",
            Operation::SeriesExp => "series_exp",
        }
    }

    fn is_matmul(self) -> bool {
        matches!(
            self,
            Operation::MatmulClassical | Operation::MatmulBlock | Operation::MatmulAuto
        )
    }

    /// Number of scalar multiply-add terms at size `n`.
    pub fn terms(self, n: usize) -> u64 {
        let n = n as u64;
        match self {
            Operation::DotBall | Operation::DotApprox | Operation::DotComplex => n,
            Operation::MatmulClassical | Operation::MatmulBlock | Operation::MatmulAuto => n * n * n,
            Operation::PolyMul => n * n,
            Operation::SeriesExp => (n * n.saturating_sub(1) / 2).max(1),
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Operation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Operation::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| format!("unknown operation `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchSpec {
    pub op: Operation,
    pub n: usize,
    pub p: u64,
    pub profile: Profile,
    pub reps: usize,
    pub seed: u64,
}

impl BenchSpec {
    pub fn validate(&self) -> Result<(), String> {
        if self.n == 0 {
            return Err("size must be positive".into());
        }
        if self.p < 2 {
            return Err("precision must be at least 2 bits".into());
        }
        if self.reps == 0 {
            return Err("at least one repetition is required".into());
        }
        if self.op == Operation::DotComplex && self.profile != Profile::ComplexUniform {
            return Err("dot_complex needs the complex_uniform profile".into());
        }
        if self.op != Operation::DotComplex && self.profile == Profile::ComplexUniform {
            return Err("complex_uniform is only used by dot_complex".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchResult {
    pub spec: BenchSpec,
    pub median_ns: f64,
    pub naive_median_ns: f64,
    pub ns_per_term: f64,
    pub ratio_vs_naive: f64,
    pub blocks: Option<usize>,
}

impl BenchResult {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.3},{:.3},{}",
            self.spec.op,
            self.spec.n,
            self.spec.p,
            self.spec.profile,
            self.ns_per_term,
            self.ratio_vs_naive,
            self.blocks.map(|b| b.to_string()).unwrap_or_default()
        )
    }
}

pub fn median(v: &mut [f64]) -> f64 {
    assert!(!v.is_empty());
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn time_ns(f: &mut dyn FnMut()) -> f64 {
    let t = Instant::now();
    f();
    (t.elapsed().as_nanos() as f64).max(1.0)
}

/// Runs `fast` and `slow` alternately (after one warmup each) and returns
/// the two medians. `slow_reps` may be smaller than `reps` for expensive
/// baselines.
pub fn interleaved_medians(reps: usize, slow_reps: usize, fast: &mut dyn FnMut(), slow: &mut dyn FnMut()) -> (f64, f64) {
    fast();
    slow();
    let mut a = Vec::with_capacity(reps);
    let mut b = Vec::with_capacity(slow_reps);
    for r in 0..reps {
        a.push(time_ns(fast));
        if r < slow_reps {
            b.push(time_ns(slow));
        }
    }
    (median(&mut a), median(&mut b))
}

pub fn naive_dot(x: &[Ball], y: &[Ball], p: u64) -> Ball {
    x.iter().zip(y).fold(Ball::zero(), |acc, (a, b)| ball_fallback_addmul(&acc, a, b, p))
}

pub fn naive_complex_dot(x: &[ComplexBall], y: &[ComplexBall], p: u64) -> ComplexBall {
    let (mut re, mut im) = (Ball::zero(), Ball::zero());
    for (u, v) in x.iter().zip(y) {
        re = ball_fallback_addmul(&re, &u.re, &v.re, p);
        re = ball_fallback_addmul(&re, &u.im, &v.im.neg(), p);
        im = ball_fallback_addmul(&im, &u.re, &v.im, p);
        im = ball_fallback_addmul(&im, &u.im, &v.re, p);
    }
    ComplexBall::new(re, im)
}

pub fn naive_matmul(a: &BallMatrix, b: &BallMatrix, p: u64) -> BallMatrix {
    BallMatrix::from_fn(a.rows(), b.cols(), |i, j| {
        (0..a.cols()).fold(Ball::zero(), |acc, t| ball_fallback_addmul(&acc, a.get(i, t), b.get(t, j), p))
    })
}

pub fn naive_mullow(a: &[Ball], b: &[Ball], len: usize, p: u64) -> Vec<Ball> {
    (0..len)
        .map(|k| {
            let mut acc = Ball::zero();
            for i in 0..=k.min(a.len().saturating_sub(1)) {
                if k - i < b.len() {
                    acc = ball_fallback_addmul(&acc, &a[i], &b[k - i], p);
                }
            }
            acc
        })
        .collect()
}

pub fn naive_exp(a: &[Ball], len: usize, p: u64) -> Vec<Ball> {
    let ja: Vec<Ball> = (0..len).map(|j| a.get(j).cloned().unwrap_or_else(Ball::zero).mul_u64(j as u64)).collect();
    let mut b = vec![Ball::one()];
    for k in 1..len {
        let mut acc = Ball::zero();
        for j in 1..=k {
            acc = ball_fallback_addmul(&acc, &ja[j], &b[k - j], p);
        }
        b.push(acc.div_u64(k as u64, p));
    }
    b
}

/// Times one operation and its naive counterpart on the same inputs.
pub fn run_bench(spec: &BenchSpec) -> Result<BenchResult, String> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n, p, reps) = (spec.n, spec.p, spec.reps);
    let mut blocks = None;
    let (fast, slow) = match spec.op {
        Operation::DotBall | Operation::DotApprox => {
            let (x, y) = profiles::dot_vectors(spec.profile, n, p, &mut rng);
            let approx = spec.op == Operation::DotApprox;
            interleaved_medians(
                reps,
                reps,
                &mut || {
                    let (xs, ys) = (Strided::contiguous(&x), Strided::contiguous(&y));
                    if approx {
                        black_box(dot_approx(None, false, xs, ys, p));
                    } else {
                        black_box(dot_ball(None, false, xs, ys, p));
                    }
                },
                &mut || {
                    black_box(naive_dot(&x, &y, p));
                },
            )
        }
        Operation::DotComplex => {
            let (x, y) = profiles::complex_vectors(n, p, &mut rng);
            interleaved_medians(
                reps,
                reps,
                &mut || {
                    black_box(dot_complex_ball(None, false, Strided::contiguous(&x), Strided::contiguous(&y), p));
                },
                &mut || {
                    black_box(naive_complex_dot(&x, &y, p));
                },
            )
        }
        op if op.is_matmul() => {
            let (a, b) = profiles::matrices(spec.profile, n, p, &mut rng);
            blocks = match op {
                Operation::MatmulBlock => Some(plan_blocks(&a, &b, p).len()),
                Operation::MatmulAuto => match matmul_auto_traced(&a, &b, p).map_err(|e| e.to_string())?.1 {
                    MatmulPath::Block => Some(plan_blocks(&a, &b, p).len()),
                    MatmulPath::Classical => None,
                },
                _ => None,
            };
            interleaved_medians(
                reps,
                reps.min(3),
                &mut || match op {
                    Operation::MatmulClassical => {
                        black_box(classical_matmul_ball(&a, &b, p).unwrap());
                    }
                    Operation::MatmulBlock => {
                        black_box(block_matmul_ball_counted(&a, &b, p).unwrap());
                    }
                    _ => {
                        black_box(matmul_auto_traced(&a, &b, p).unwrap());
                    }
                },
                &mut || {
                    black_box(naive_matmul(&a, &b, p));
                },
            )
        }
        Operation::PolyMul => {
            let (a, b) = profiles::poly_operands(spec.profile, n, p, &mut rng);
            let (pa, pb) = (BallPoly::new(a.clone()), BallPoly::new(b.clone()));
            let len = 2 * n - 1;
            interleaved_medians(
                reps,
                reps,
                &mut || {
                    black_box(poly_mullow_classical(&pa, &pb, len, p));
                },
                &mut || {
                    black_box(naive_mullow(&a, &b, len, p));
                },
            )
        }
        Operation::SeriesExp => {
            let (_, a) = profiles::poly_operands(spec.profile, n, p, &mut rng);
            let pa = BallPoly::new(a.clone());
            interleaved_medians(
                reps,
                reps,
                &mut || {
                    black_box(series_exp_basecase(&pa, n, p).unwrap());
                },
                &mut || {
                    black_box(naive_exp(&a, n, p));
                },
            )
        }
        _ => unreachable!(),
    };
    let terms = spec.op.terms(n) as f64;
    Ok(BenchResult {
        spec: spec.clone(),
        median_ns: fast,
        naive_median_ns: slow,
        ns_per_term: fast / terms,
        ratio_vs_naive: slow / fast,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for op in Operation::ALL {
            assert_eq!(op.name().parse::<Operation>().unwrap(), op);
        }
        assert!("dot".parse::<Operation>().is_err());
    }

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let ok = BenchSpec {
            op: Operation::DotBall,
            n: 10,
            p: 64,
            profile: Profile::Uniform,
            reps: 3,
            seed: 1,
        };
        assert!(ok.validate().is_ok());
        assert!(BenchSpec { n: 0, ..ok.clone() }.validate().is_err());
        assert!(BenchSpec { p: 1, ..ok.clone() }.validate().is_err());
        assert!(BenchSpec { reps: 0, ..ok.clone() }.validate().is_err());
        assert!(BenchSpec { op: Operation::DotComplex, ..ok.clone() }.validate().is_err());
    }

    #[test]
    fn every_operation_runs() {
        for op in Operation::ALL {
            let profile = if op == Operation::DotComplex {
                Profile::ComplexUniform
            } else {
                Profile::Uniform
            };
            let spec = BenchSpec {
                op,
                n: 8,
                p: 64,
                profile,
                reps: 2,
                seed: 3,
            };
            let r = run_bench(&spec).unwrap();
            assert!(r.ns_per_term > 0.0 && r.ratio_vs_naive > 0.0);
            let row = r.csv_row();
            assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
            assert!(row.starts_with(op.name()));
        }
    }

    #[test]
    fn naive_baselines_contain_exact_values() {
        let x = vec![Ball::from_i64(2), Ball::from_i64(3)];
        let y = vec![Ball::from_i64(5), Ball::from_i64(7)];
        assert_eq!(naive_dot(&x, &y, 53), Ball::from_i64(31));
        assert_eq!(naive_mullow(&x, &y, 3, 53), vec![Ball::from_i64(10), Ball::from_i64(29), Ball::from_i64(21)]);
        let e = naive_exp(&[Ball::zero(), Ball::from_i64(2)], 3, 53);
        assert_eq!(e, vec![Ball::one(), Ball::from_i64(2), Ball::from_i64(2)]);
    }
}
