use ebit::asymptotic::{concentrate_exact, concentrate_sample, TwoTermSource};
use ebit::RngSpec;

#[test]
fn sampled_yield_within_five_standard_errors() {
    let cases = [(0.25f64, 40u64), (0.5, 2), (0.1, 200), (0.4, 1000)];
    let mut inside = 0;
    let mut total = 0;
    for (p, k) in cases {
        let src = TwoTermSource::new(p).unwrap();
        let exact = concentrate_exact(&src, k).unwrap().per_copy;
        for seed in 0..50u64 {
            let est = concentrate_sample(&src, k, 4000, RngSpec::with_stream(seed, k)).unwrap();
            let se = est.stderr.unwrap();
            total += 1;
            if (est.per_copy - exact).abs() <= 5.0 * se {
                inside += 1;
            }
        }
    }
    assert!(inside as f64 >= 0.99 * total as f64, "{inside}/{total} within 5 stderr");
}

#[test]
fn two_copy_singlet_sample() {
    let src = TwoTermSource::new(0.5f64).unwrap();
    let est = concentrate_sample(&src, 2, 100_000, RngSpec::new(1)).unwrap();
    assert!((est.per_copy - 0.25).abs() <= 5.0 * est.stderr.unwrap());
}
