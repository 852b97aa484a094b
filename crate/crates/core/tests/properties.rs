use arbdot::dot::{dot_approx, dot_ball, Strided};
use arbdot::limb::mul_limbs;
use arbdot::matmul::{block_matmul_ball, int_matmul, BallMatrix, IntAlgo, IntMatrix};
use arbdot::oracle::{ball_hull_dot, interval_dot_hull, rational_dot_exact, ExactRational, RationalInterval};
use arbdot::poly::{poly_mullow_classical, BallPoly};
use arbdot::{ApFloat, Ball, Mag};
use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;

fn ball() -> impl Strategy<Value = Ball> {
    (any::<i64>(), -150i64..150, prop::option::of((1u64 << 29..1 << 30, -200i64..20))).prop_map(|(m, e, r)| {
        let mid = ApFloat::from_i64(m).mul_2exp(e).unwrap();
        let rad = r.map_or(Mag::zero(), |(man, re)| Mag::from_parts(man, re));
        Ball::new(mid, rad)
    })
}

fn exact_ball() -> impl Strategy<Value = Ball> {
    (any::<i32>(), -60i64..60).prop_map(|(m, e)| Ball::exact(ApFloat::from_i64(m as i64).mul_2exp(e).unwrap()))
}

fn precision() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 8, 53, 64, 128, 300])
}

fn ball_matrix(rows: usize, cols: usize) -> impl Strategy<Value = BallMatrix> {
    prop::collection::vec(ball(), rows * cols).prop_map(move |v| BallMatrix::new(rows, cols, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dot_contains_hull(
        pairs in prop::collection::vec((ball(), ball()), 0..16),
        init in prop::option::of(ball()),
        subtract in any::<bool>(),
        p in precision(),
    ) {
        let (x, y): (Vec<Ball>, Vec<Ball>) = pairs.into_iter().unzip();
        let r = dot_ball(init.as_ref(), subtract, Strided::contiguous(&x), Strided::contiguous(&y), p);
        let mut hull = interval_dot_hull(&x, &y);
        if subtract {
            hull = hull.neg();
        }
        if let Some(i) = &init {
            hull = hull.add(&RationalInterval::from_ball(i).unwrap());
        }
        prop_assert!(hull.is_subset_of_ball(&r), "{r}");
    }

    #[test]
    fn reversed_stride_matches_reversed_copy(
        pairs in prop::collection::vec((ball(), ball()), 1..16),
        p in precision(),
    ) {
        let (x, y): (Vec<Ball>, Vec<Ball>) = pairs.into_iter().unzip();
        let xr: Vec<Ball> = x.iter().rev().cloned().collect();
        let yr: Vec<Ball> = y.iter().rev().cloned().collect();
        let n = x.len();
        let a = dot_ball(None, false, Strided::new(&x, n - 1, -1, n).unwrap(), Strided::new(&y, n - 1, -1, n).unwrap(), p);
        let b = dot_ball(None, false, Strided::contiguous(&xr), Strided::contiguous(&yr), p);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn approx_is_close_to_exact(
        pairs in prop::collection::vec((exact_ball(), exact_ball()), 1..20),
        p in 16u64..200,
    ) {
        let (x, y): (Vec<Ball>, Vec<Ball>) = pairs.into_iter().unzip();
        let s = dot_approx(None, false, Strided::contiguous(&x), Strided::contiguous(&y), p);
        let exact = rational_dot_exact(
            &x.iter().map(|b| b.mid.clone()).collect::<Vec<_>>(),
            &y.iter().map(|b| b.mid.clone()).collect::<Vec<_>>(),
        );
        let got = ExactRational::from_apfloat(&s).unwrap();
        let sum_abs = x.iter().zip(&y).fold(ExactRational::zero(), |acc, (a, b)| {
            acc + ExactRational::from_apfloat(&a.mid.mul_exact(&b.mid).unwrap().abs()).unwrap()
        });
        // generous: a few ulps of the sum of magnitudes
        let tol = sum_abs * ExactRational::from_dyadic(&BigInt::from(1), -(p as i64) + 10);
        prop_assert!((got - exact).abs() <= tol);
    }

    #[test]
    fn limb_products_match_bigint(a in prop::collection::vec(any::<u64>(), 1..12), b in prop::collection::vec(any::<u64>(), 1..12)) {
        let big = |v: &[u64]| BigUint::from_slice(&v.iter().flat_map(|&w| [w as u32, (w >> 32) as u32]).collect::<Vec<_>>());
        let prod = mul_limbs(&a, &b);
        prop_assert_eq!(big(&prod), big(&a) * big(&b));
    }

    #[test]
    fn mullow_contains_exact(
        a in prop::collection::vec(ball(), 0..8),
        b in prop::collection::vec(ball(), 0..8),
        len in 0usize..16,
        p in precision(),
    ) {
        let r = poly_mullow_classical(&BallPoly::new(a.clone()), &BallPoly::new(b.clone()), len, p);
        prop_assert_eq!(r.len(), len);
        for k in 0..len {
            let terms: Vec<(&Ball, &Ball)> = (0..=k)
                .filter(|&i| i < a.len() && k - i < b.len())
                .map(|i| (&a[i], &b[k - i]))
                .collect();
            prop_assert!(ball_hull_dot(&terms).is_subset_of_ball(&r.coeffs[k]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn block_product_contains_hull(
        (a, b) in (1usize..6, 28usize..40, 1usize..6)
            .prop_flat_map(|(m, k, n)| (ball_matrix(m, k), ball_matrix(k, n))),
        p in precision(),
    ) {
        let c = block_matmul_ball(&a, &b, p).unwrap();
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let terms: Vec<(&Ball, &Ball)> = (0..a.cols()).map(|t| (a.get(i, t), b.get(t, j))).collect();
                prop_assert!(ball_hull_dot(&terms).is_subset_of_ball(c.get(i, j)), "entry ({}, {})", i, j);
            }
        }
    }

    #[test]
    fn multimodular_equals_classical(
        (m, k, n) in (1usize..8, 1usize..8, 1usize..8),
        seed in prop::collection::vec(any::<i128>(), 64),
        shift in 0u32..400,
    ) {
        let entry = |idx: usize| BigInt::from(seed[idx % seed.len()]) << (shift as usize * (idx % 3) / 2);
        let a = IntMatrix::new(m, k, (0..m * k).map(entry).collect());
        let b = IntMatrix::new(k, n, (0..k * n).map(|i| -entry(i + 7)).collect());
        prop_assert_eq!(
            int_matmul(&a, &b, IntAlgo::Multimodular).unwrap(),
            int_matmul(&a, &b, IntAlgo::Classical).unwrap()
        );
    }
}
