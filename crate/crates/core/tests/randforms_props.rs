use bhlab::{exact_real, lift, mixed_norm, sample_sign_tensor, ExponentTuple, KszSpec};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pure_function_of_spec(k in 1usize..=3, n in 1usize..=8, seed in any::<u64>()) {
        let spec = KszSpec::new(k, n, seed);
        prop_assert_eq!(sample_sign_tensor(&spec).unwrap(), sample_sign_tensor(&spec).unwrap());
    }

    #[test]
    fn lift_keeps_mixed_norm(n in 1usize..=5, seed in any::<u64>(), extra in 1usize..=2,
                             q in prop::collection::vec(0.5f64..6.0, 4)) {
        let t = sample_sign_tensor(&KszSpec::new(2, n, seed)).unwrap();
        let l = lift(&t, 2 + extra).unwrap();
        let base = mixed_norm(&t, &ExponentTuple::new(q[..2].to_vec()).unwrap()).unwrap();
        let lifted = mixed_norm(&l, &ExponentTuple::new(q[..2 + extra].to_vec()).unwrap()).unwrap();
        prop_assert!((base - lifted).abs() <= 1e-12 * base);
    }

    #[test]
    fn lift_keeps_norm(n in 1usize..=5, seed in any::<u64>()) {
        let t = sample_sign_tensor(&KszSpec::new(2, n, seed)).unwrap();
        let l = lift(&t, 3).unwrap();
        prop_assert_eq!(exact_real(&l).unwrap().lower, exact_real(&t).unwrap().lower);
    }
}

#[test]
fn ksz_growth_exponent() {
    let mut points = Vec::new();
    for n in [4usize, 8, 12, 16] {
        let logs: Vec<f64> = (0..20)
            .map(|s| {
                exact_real(&sample_sign_tensor(&KszSpec::new(2, n, s)).unwrap())
                    .unwrap()
                    .lower
                    .ln()
            })
            .collect();
        points.push(((n as f64).ln(), logs.iter().sum::<f64>() / 20.0));
    }
    let slope = bhlab::fit_slope(&points).unwrap().slope;
    assert!((slope - 1.5).abs() <= 0.15, "slope {slope}");
}
