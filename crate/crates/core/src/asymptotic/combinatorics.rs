//! Log-space binomial coefficients.

use crate::scalar::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // reflection: Γ(x)Γ(1−x) = π / sin(πx)
        let pi = T::pi();
        return (pi / (pi * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += T::lit(c) / (x + T::lit(i as f64));
    }
    let t = x + T::lit(LANCZOS_G) + half;
    half * T::two_pi().ln() + (x + half) * t.ln() - t + acc.ln()
}

/// `ln C(n, k)`; symmetric in `k ↔ n − k` bit for bit.
pub fn ln_binomial<T: Real>(n: u64, k: u64) -> T {
    assert!(k <= n, "ln_binomial({n}, {k})");
    let k = k.min(n - k);
    if k == 0 {
        return T::zero();
    }
    if k == 1 {
        return T::lit(n as f64).ln();
    }
    ln_gamma(T::lit(n as f64 + 1.0)) - ln_gamma(T::lit(k as f64 + 1.0)) - ln_gamma(T::lit((n - k) as f64 + 1.0))
}

/// `log₂ C(n, k)`.
pub fn log2_binomial<T: Real>(n: u64, k: u64) -> T {
    ln_binomial::<T>(n, k) / T::ln_2()
}

/// `log₂(2^a + 2^b)` without overflow.
pub(crate) fn log2_add<T: Real>(a: T, b: T) -> T {
    if !a.is_finite() && a < T::zero() {
        return b;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (T::one() + T::lit(2.0).powf(lo - hi)).log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ln_factorial_exact(n: u64) -> f64 {
        (2..=n).map(|i| (i as f64).ln()).sum()
    }

    #[test]
    fn ln_gamma_matches_factorials() {
        for n in 0..60u64 {
            let exact = ln_factorial_exact(n);
            let got: f64 = ln_gamma(n as f64 + 1.0);
            assert!((got - exact).abs() <= 1e-12 * exact.max(1.0), "n={n}: {got} vs {exact}");
        }
    }

    #[test]
    fn ln_gamma_matches_statrs() {
        for &x in &[0.1, 0.5, 1.5, 2.25, 10.0, 123.456, 1e4, 1e6 + 1.0] {
            let ours: f64 = ln_gamma(x);
            let theirs = statrs::function::gamma::ln_gamma(x);
            assert_relative_eq!(ours, theirs, max_relative = 1e-13);
        }
    }

    #[test]
    fn small_binomials_are_exact_enough() {
        let mut row = vec![1u64];
        for n in 1..=30u64 {
            let mut next = vec![1u64; n as usize + 1];
            for k in 1..n as usize {
                next[k] = row[k - 1] + row[k];
            }
            row = next;
            for (k, &c) in row.iter().enumerate() {
                let got: f64 = log2_binomial(n, k as u64);
                assert!((got - (c as f64).log2()).abs() < 1e-10, "C({n},{k})");
            }
        }
    }

    #[test]
    fn symmetric_bitwise() {
        for n in [7u64, 100, 1001, 1_000_000] {
            for k in [0u64, 1, 3, n / 3, n / 2] {
                assert_eq!(ln_binomial::<f64>(n, k), ln_binomial::<f64>(n, n - k));
            }
        }
    }

    #[test]
    fn large_binomial_close_to_summed_logs() {
        let (n, k) = (1_000_000u64, 250_000u64);
        let direct: f64 = ((n - k + 1)..=n).map(|i| (i as f64).ln()).sum::<f64>()
            - (1..=k).map(|i| (i as f64).ln()).sum::<f64>();
        assert_relative_eq!(ln_binomial::<f64>(n, k), direct, max_relative = 1e-11);
    }

    #[test]
    fn log2_add_basic() {
        assert_relative_eq!(log2_add(3.0f64, 3.0), 4.0, max_relative = 1e-15);
        assert_relative_eq!(log2_add(f64::NEG_INFINITY, 2.0), 2.0);
        assert_relative_eq!(log2_add(0.0f64, 1.0), 3f64.log2(), max_relative = 1e-15);
    }
}
