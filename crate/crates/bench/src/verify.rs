//! Oracle-backed verification suites with deterministic reports.

use std::fmt;
use std::str::FromStr;

use arbdot::dot::{dot_ball, dot_complex_ball_with, DotOptions, Strided};
use arbdot::matmul::{
    block_matmul_ball, classical_matmul_ball, int_matmul, radius_matmul_upper, BallMatrix, IntAlgo, MagMatrix,
};
use arbdot::oracle::dyadic::{abs_product_sum, ball_hull_dot, DyadicInterval, SparseDyadic};
use arbdot::oracle::{wide_dot_hull, ExactRational, RationalInterval};
use arbdot::poly::{poly_mullow_classical, series_exp_basecase, BallPoly};
use arbdot::{ApFloat, Ball, Mag};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gen;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Dot,
    Matmul,
    Poly,
    All,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dot" => Ok(Suite::Dot),
            "matmul" => Ok(Suite::Matmul),
            "poly" => Ok(Suite::Poly),
            "all" => Ok(Suite::All),
            _ => Err(format!("unknown suite `{s}`")),
        }
    }
}

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub name: &'static str,
    pub trials: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<CheckReport>,
}

impl VerifyReport {
    pub fn failure_count(&self) -> usize {
        self.checks.iter().map(|c| c.failures.len()).sum()
    }

    pub fn passed(&self) -> bool {
        self.failure_count() == 0
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {}", self.seed)?;
        for c in &self.checks {
            writeln!(f, "{:<28} trials {:>6}  failures {}", c.name, c.trials, c.failures.len())?;
        }
        for c in &self.checks {
            for (k, repro) in c.failures.iter().enumerate() {
                writeln!(f, "--- {} failure {}", c.name, k + 1)?;
                f.write_str(repro)?;
                if !repro.ends_with('\n') {
                    writeln!(f)?;
                }
            }
        }
        writeln!(f, "total failures {}", self.failure_count())
    }
}

/// Failures beyond this many per check are counted but not serialized.
const MAX_REPRODUCERS: usize = 5;

fn run_check(
    name: &'static str,
    trials: usize,
    seed: u64,
    mut trial: impl FnMut(&mut ChaCha8Rng) -> Option<String>,
) -> CheckReport {
    // each check has its own stream so suites can be run separately
    let salt = name.bytes().fold(0u64, |h, b| h.wrapping_mul(31).wrapping_add(b as u64));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt);
    let mut failures = Vec::new();
    let mut count = 0;
    for t in 0..trials {
        if let Some(repro) = trial(&mut rng) {
            count += 1;
            if failures.len() < MAX_REPRODUCERS {
                failures.push(format!("trial={t} seed={seed}\n{repro}"));
            }
        }
    }
    if count > failures.len() {
        failures.resize(count, "(reproducer omitted)\n".to_string());
    }
    CheckReport { name, trials, failures }
}

// ---------------------------------------------------------------------------
// Individual trials; each returns a reproducer on failure.

/// Containment of the exact interval hull in the dot product ball.
pub fn dot_containment_trial(rng: &mut ChaCha8Rng) -> Option<String> {
    let case = gen::dot_case(rng);
    let r = dot_ball(case.initial.as_ref(), case.subtract, case.x(), case.y(), case.p);
    let mut hull = wide_dot_hull(&case.x_values(), &case.y);
    if case.subtract {
        hull = hull.neg();
    }
    if let Some(init) = &case.initial {
        hull = hull.add(&DyadicInterval::from_ball(init));
    }
    if hull.is_subset_of_ball(&r) {
        None
    } else {
        Some(format!("{}result={r}\n", case.reproducer()))
    }
}

fn pairs_text(x: &[Ball], y: &[Ball]) -> String {
    x.iter().zip(y).map(|(a, b)| format!("{a} * {b}\n")).collect()
}

/// Exact inputs at sufficient precision give a zero radius.
pub fn exact_zero_radius_trial(rng: &mut ChaCha8Rng) -> Option<String> {
    let (x, y, p) = gen::exact_small_case(rng);
    let r = dot_ball(None, false, Strided::contiguous(&x), Strided::contiguous(&y), p);
    if r.rad.is_zero() {
        None
    } else {
        Some(format!("p={p}\n{}result={r}\n", pairs_text(&x, &y)))
    }
}

/// `r <= 2^(-p + bc(N) + 7) * sum |x_i y_i|` for exact inputs.
pub fn accuracy_trial(rng: &mut ChaCha8Rng) -> Option<String> {
    let (x, y, p) = gen::exact_case(rng);
    let r = dot_ball(None, false, Strided::contiguous(&x), Strided::contiguous(&y), p);
    let terms: Vec<(&ApFloat, &ApFloat)> = x.iter().zip(&y).map(|(a, b)| (&a.mid, &b.mid)).collect();
    let bound = abs_product_sum(&terms).mul_2exp(-(p as i64) + arbdot::dot::bc(x.len() as u64) as i64 + 7);
    let rad = if r.rad.is_zero() {
        SparseDyadic::zero()
    } else if r.rad.is_finite() {
        SparseDyadic::from_mag(&r.rad)
    } else {
        return Some(format!("p={p}\n{}infinite radius\n", pairs_text(&x, &y)));
    };
    if rad <= bound {
        None
    } else {
        Some(format!("p={p}\n{}result={r}\n", pairs_text(&x, &y)))
    }
}

/// Three- and four-multiplication complex paths agree bit for bit.
pub fn complex_identity_trial(rng: &mut ChaCha8Rng) -> Option<String> {
    let (x, y, p) = gen::exact_complex_case(rng);
    let three = DotOptions {
        complex_three_mult_cutoff_limbs: 1,
        ..DotOptions::default()
    };
    let four = DotOptions {
        complex_three_mult_cutoff_limbs: usize::MAX,
        ..DotOptions::default()
    };
    let (xs, ys) = (Strided::contiguous(&x), Strided::contiguous(&y));
    let a = dot_complex_ball_with(&three, None, false, xs, ys, p);
    let b = dot_complex_ball_with(&four, None, false, xs, ys, p);
    if a == b {
        None
    } else {
        let pairs: String = x.iter().zip(&y).map(|(u, v)| format!("{u} * {v}\n")).collect();
        Some(format!("p={p}\n{pairs}three={a}\nfour={b}\n"))
    }
}

fn matrices_text(a: &BallMatrix, b: &BallMatrix) -> String {
    format!("A:\n{a}B:\n{b}")
}

fn hull_inside(a: &BallMatrix, b: &BallMatrix, c: &BallMatrix) -> bool {
    (0..a.rows()).all(|i| {
        (0..b.cols()).all(|j| {
            let terms: Vec<(&Ball, &Ball)> = (0..a.cols()).map(|t| (a.get(i, t), b.get(t, j))).collect();
            ball_hull_dot(&terms).is_subset_of_ball(c.get(i, j))
        })
    })
}

/// Block and classical products both contain the exact product, and the
/// block radii stay within 16 times the classical radii.
pub fn block_matmul_trial(rng: &mut ChaCha8Rng, max_dim: usize) -> Option<String> {
    let p = [53, 64, 128, 200, 256][rng.gen_range(0..5)];
    let p_entries = rng.gen_range(2..=p);
    let (a, b) = gen::uniform_matrices(rng, max_dim, p_entries);
    let c = block_matmul_ball(&a, &b, p).expect("dimensions agree");
    let d = classical_matmul_ball(&a, &b, p).expect("dimensions agree");
    let mut problems = Vec::new();
    if !hull_inside(&a, &b, &c) {
        problems.push("block result misses the exact product".to_string());
    }
    if !hull_inside(&a, &b, &d) {
        problems.push("classical result misses the exact product".to_string());
    }
    for (k, (x, y)) in c.entries().iter().zip(d.entries()).enumerate() {
        if x.rad > y.rad.mul_u64_up(16) {
            problems.push(format!("entry {k}: block radius {} > 16 x classical radius {}", x.rad.to_apfloat(), y.rad.to_apfloat()));
            break;
        }
    }
    if problems.is_empty() {
        None
    } else {
        Some(format!("p={p}\n{}\n{}", problems.join("\n"), matrices_text(&a, &b)))
    }
}

/// Block product containment with scattered exponents and long inner
/// dimensions (several blocks).
pub fn scattered_matmul_trial(rng: &mut ChaCha8Rng) -> Option<String> {
    let p = [53, 128, 300][rng.gen_range(0..3)];
    let (a, b) = gen::scattered_matrices(rng, 6);
    let c = block_matmul_ball(&a, &b, p).expect("dimensions agree");
    if hull_inside(&a, &b, &c) {
        None
    } else {
        Some(format!("p={p}\n{}", matrices_text(&a, &b)))
    }
}

/// Multimodular integer product equals the classical one.
pub fn multimodular_trial(rng: &mut ChaCha8Rng, max_dim: usize) -> Option<String> {
    let (m, k, n) = (
        rng.gen_range(1..=max_dim),
        rng.gen_range(1..=max_dim),
        rng.gen_range(1..=max_dim),
    );
    let bits = rng.gen_range(1..=300);
    let a = gen::rand_int_matrix(rng, m, k, bits);
    let b = gen::rand_int_matrix(rng, k, n, bits);
    let x = int_matmul(&a, &b, IntAlgo::Multimodular).expect("dimensions agree");
    let y = int_matmul(&a, &b, IntAlgo::Classical).expect("dimensions agree");
    if x == y {
        None
    } else {
        let fmt = |m: &arbdot::matmul::IntMatrix| {
            let mut s = format!("{} {}\n", m.rows, m.cols);
            for v in &m.entries {
                s.push_str(&format!("{v}\n"));
            }
            s
        };
        Some(format!("A:\n{}B:\n{}", fmt(&a), fmt(&b)))
    }
}

/// Binary64 radius products bound the exact product from above.
pub fn radius_upper_trial(rng: &mut ChaCha8Rng) -> Option<String> {
    let (m, k, n) = (rng.gen_range(1..8), rng.gen_range(1..12), rng.gen_range(1..8));
    let spread = [10, 500, 3000][rng.gen_range(0..3)];
    let gen = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.15) {
            Mag::zero()
        } else {
            Mag::from_parts(rng.gen_range(1 << 29..1 << 30), rng.gen_range(-spread..=spread))
        }
    };
    let p = MagMatrix {
        rows: m,
        cols: k,
        entries: (0..m * k).map(|_| gen(rng)).collect(),
    };
    let q = MagMatrix {
        rows: k,
        cols: n,
        entries: (0..k * n).map(|_| gen(rng)).collect(),
    };
    let r = radius_matmul_upper(&p, &q);
    for i in 0..m {
        for j in 0..n {
            let mut exact = ExactRational::zero();
            for t in 0..k {
                exact = exact
                    + ExactRational::from_mag(p.get(i, t)).unwrap() * ExactRational::from_mag(q.get(t, j)).unwrap();
            }
            let got = ExactRational::from_mag(r.get(i, j)).unwrap();
            if got < exact {
                let pe: Vec<String> = p.entries.iter().map(|x| x.to_apfloat().to_string()).collect();
                let qe: Vec<String> = q.entries.iter().map(|x| x.to_apfloat().to_string()).collect();
                return Some(format!("{m}x{k} * {k}x{n}\nP={}\nQ={}\nentry ({i},{j})\n", pe.join(" "), qe.join(" ")));
            }
        }
    }
    None
}

/// Truncated products contain the exact convolution.
pub fn mullow_trial(rng: &mut ChaCha8Rng) -> Option<String> {
    let na = rng.gen_range(0..12);
    let nb = rng.gen_range(0..12);
    let gen = |rng: &mut ChaCha8Rng| {
        let e = rng.gen_range(-40..40);
        gen::ball_at(rng, e)
    };
    let a: Vec<Ball> = (0..na).map(|_| gen(rng)).collect();
    let b: Vec<Ball> = (0..nb).map(|_| gen(rng)).collect();
    let len = rng.gen_range(0..24);
    let p = [8, 53, 128, 256][rng.gen_range(0..4)];
    let r = poly_mullow_classical(&BallPoly::new(a.clone()), &BallPoly::new(b.clone()), len, p);
    for k in 0..len {
        let mut hull = DyadicInterval::zero();
        for i in 0..=k {
            if i < na && k - i < nb {
                hull = hull.add(&DyadicInterval::from_ball(&a[i]).mul(&DyadicInterval::from_ball(&b[k - i])));
            }
        }
        if !hull.is_subset_of_ball(&r.coeffs[k]) {
            let sa: Vec<String> = a.iter().map(Ball::to_string).collect();
            let sb: Vec<String> = b.iter().map(Ball::to_string).collect();
            return Some(format!("p={p} len={len} coefficient {k}\na={}\nb={}\n", sa.join(" | "), sb.join(" | ")));
        }
    }
    None
}

/// Exact rational value of the exponential recurrence.
pub fn exp_recurrence_exact(a: &[Ball], len: usize) -> Vec<ExactRational> {
    let av: Vec<ExactRational> = (0..len)
        .map(|j| a.get(j).map_or(ExactRational::zero(), |b| ExactRational::from_apfloat(&b.mid).expect("finite")))
        .collect();
    let mut b = vec![ExactRational::one()];
    for k in 1..len {
        let mut s = ExactRational::zero();
        for j in 1..=k {
            s = s + ExactRational::from_integer(j.into()) * &av[j] * &b[k - j];
        }
        b.push(s / ExactRational::from_integer(k.into()));
    }
    b.truncate(len);
    b
}

/// Series exponential coefficients contain the exact recurrence values.
pub fn series_exp_trial(rng: &mut ChaCha8Rng, len: usize, p: u64) -> Option<String> {
    let a = gen::exp_argument(rng, len);
    let r = series_exp_basecase(&BallPoly::new(a.clone()), len, p).expect("zero constant term");
    let exact = exp_recurrence_exact(&a, len);
    for (k, v) in exact.into_iter().enumerate() {
        if !RationalInterval::point(v).is_subset_of_ball(&r.coeffs[k]) {
            let sa: Vec<String> = a.iter().map(Ball::to_string).collect();
            return Some(format!("p={p} len={len} coefficient {k}\na={}\nresult={}\n", sa.join(" | "), r.coeffs[k]));
        }
    }
    None
}

// ---------------------------------------------------------------------------

/// Size cap from `ARBDOT_MAX_SIZE`, if set.
pub fn size_cap() -> Option<usize> {
    std::env::var("ARBDOT_MAX_SIZE").ok()?.parse().ok()
}

/// Runs the checks of `suite`, `trials` times each (the costlier matrix
/// checks run a tenth as often). Identical arguments give identical
/// reports.
pub fn run_verify(suite: Suite, trials: usize, seed: u64) -> VerifyReport {
    let cap = size_cap().unwrap_or(usize::MAX);
    let mut checks = Vec::new();
    let few = trials.div_ceil(10);
    if matches!(suite, Suite::Dot | Suite::All) {
        checks.push(run_check("dot_containment", trials, seed, dot_containment_trial));
        checks.push(run_check("dot_exact_zero_radius", trials, seed, exact_zero_radius_trial));
        checks.push(run_check("dot_accuracy_bound", trials, seed, accuracy_trial));
        checks.push(run_check("complex_three_mult_identity", trials, seed, complex_identity_trial));
    }
    if matches!(suite, Suite::Matmul | Suite::All) {
        let dim = 16.min(cap);
        checks.push(run_check("block_matmul_accuracy", few, seed, |r| block_matmul_trial(r, dim)));
        checks.push(run_check("block_matmul_scattered", few, seed, scattered_matmul_trial));
        checks.push(run_check("multimodular_eq_classical", few, seed, |r| {
            multimodular_trial(r, 40.min(cap))
        }));
        checks.push(run_check("radius_matmul_upper", few, seed, radius_upper_trial));
    }
    if matches!(suite, Suite::Poly | Suite::All) {
        checks.push(run_check("mullow_containment", trials, seed, mullow_trial));
        checks.push(run_check("series_exp_containment", few, seed, |r| series_exp_trial(r, 16.min(cap.max(1)), 128)));
    }
    VerifyReport { seed, checks }
}
