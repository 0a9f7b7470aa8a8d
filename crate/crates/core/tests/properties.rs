use ebit::asymptotic::{concentrate_exact, dilution_curve, ln_binomial, TwoTermSource};
use ebit::locc::{haar_unitary, monotonicity_check, random_protocol, LocalOperation};
use ebit::locc::apply_unitary;
use ebit::schmidt::{entropy_of_entanglement, schmidt_decompose, vn_entropy};
use ebit::state::{partial_trace, random_state, tensor_product, BipartiteState};
use ebit::{RngSpec, Side};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn state(da: usize, db: usize, seed: u64) -> BipartiteState<f64> {
    random_state(da, db, RngSpec::new(seed)).unwrap()
}

fn padded_eigs(s: &BipartiteState<f64>, side: Side, len: usize) -> Vec<f64> {
    let mut e = partial_trace(s, side).eigenvalues().unwrap();
    e.resize(len, 0.0);
    e
}

fn arb_state() -> impl Strategy<Value = BipartiteState<f64>> {
    (1usize..=8, 1usize..=8).prop_flat_map(|(da, db)| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), da * db).prop_filter_map("zero vector", move |v| {
            let amps: Vec<_> = v.into_iter().map(|(r, i)| nalgebra::Complex::new(r, i)).collect();
            let m = DMatrix::from_row_slice(da, db, &amps);
            BipartiteState::normalized(m).ok()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn states_and_products_are_normalized(da in 1usize..=6, db in 1usize..=6, seed: u64, seed2: u64) {
        let a = state(da, db, seed);
        let b = state(db, da, seed2);
        prop_assert!((a.norm_sq() - 1.0).abs() <= 1e-12);
        prop_assert!((tensor_product(&a, &b).unwrap().norm_sq() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn marginal_spectra_agree(s in arb_state()) {
        let len = s.dim_a().max(s.dim_b());
        let ea = padded_eigs(&s, Side::A, len);
        let eb = padded_eigs(&s, Side::B, len);
        for (x, y) in ea.iter().zip(&eb) {
            prop_assert!((x - y).abs() <= 1e-10, "{ea:?} vs {eb:?}");
        }
        for side in [Side::A, Side::B] {
            let rho = partial_trace(&s, side);
            prop_assert!((rho.trace().re - 1.0).abs() <= 1e-12);
            prop_assert!(rho.eigenvalues().unwrap().iter().all(|&l| l >= -1e-10));
        }
    }

    #[test]
    fn entropy_paths_agree(s in arb_state()) {
        let svd = entropy_of_entanglement(&s).unwrap().ebits;
        let eig = vn_entropy(&partial_trace(&s, Side::A)).unwrap();
        prop_assert!((svd - eig).abs() <= 1e-10, "{svd} vs {eig}");
        let bound = (s.dim_a().min(s.dim_b()) as f64).log2();
        prop_assert!(svd >= 0.0 && svd <= bound + 1e-9);
    }

    #[test]
    fn schmidt_form_reconstructs(s in arb_state()) {
        let f = schmidt_decompose(&s).unwrap();
        prop_assert!(f.coeffs.windows(2).all(|w| w[0] >= w[1]));
        let diff = f.reconstruct() - s.amps();
        prop_assert!(diff.iter().all(|z| z.norm_sqr().sqrt() <= 1e-10));
    }

    #[test]
    fn local_unitaries_keep_coefficients(da in 1usize..=5, db in 1usize..=5, seed: u64) {
        let s = state(da, db, seed);
        let mut rng = RngSpec::with_stream(seed, 1).rng();
        let ua = LocalOperation::unitary(Side::A, haar_unitary(da, &mut rng)).unwrap();
        let ub = LocalOperation::unitary(Side::B, haar_unitary(db, &mut rng)).unwrap();
        let t = apply_unitary(&apply_unitary(&s, &ua).unwrap(), &ub).unwrap();
        let c0 = schmidt_decompose(&s).unwrap().coeffs;
        let c1 = schmidt_decompose(&t).unwrap().coeffs;
        for (x, y) in c0.iter().zip(&c1) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn entropy_is_additive(d1 in (1usize..=4, 1usize..=4), d2 in (1usize..=4, 1usize..=4), seed: u64) {
        let a = state(d1.0, d1.1, seed);
        let b = state(d2.0, d2.1, seed.wrapping_add(1));
        let joint = entropy_of_entanglement(&tensor_product(&a, &b).unwrap()).unwrap().ebits;
        let sum = entropy_of_entanglement(&a).unwrap().ebits + entropy_of_entanglement(&b).unwrap().ebits;
        prop_assert!((joint - sum).abs() <= 1e-9);
    }

    #[test]
    fn tensor_product_is_associative(seed: u64) {
        let a = state(2, 3, seed);
        let b = state(3, 1, seed ^ 1);
        let c = state(2, 2, seed ^ 2);
        let left = tensor_product(&tensor_product(&a, &b).unwrap(), &c).unwrap();
        let right = tensor_product(&a, &tensor_product(&b, &c).unwrap()).unwrap();
        let diff = left.amps() - right.amps();
        prop_assert!(diff.iter().all(|z| z.norm_sqr().sqrt() <= 1e-14));
    }

    #[test]
    fn random_protocols_never_raise_entropy(da in 1usize..=4, db in 1usize..=4, depth in 0usize..=4, seed: u64) {
        let s = state(da, db, seed);
        let p = random_protocol::<f64>((da, db), depth, RngSpec::with_stream(seed, 9)).unwrap();
        let r = monotonicity_check(&s, &p).unwrap();
        prop_assert!(r.satisfied, "{r:?}");
    }

    #[test]
    fn concentration_stays_below_entropy(p in 0.0f64..=1.0, k in 1u64..3000) {
        let src = TwoTermSource::new(p).unwrap();
        let y = concentrate_exact(&src, k).unwrap();
        prop_assert!(y.per_copy <= src.entropy() + 1e-9);
        prop_assert!(y.per_copy >= -1e-12);
    }

    #[test]
    fn dilution_fidelity_grows_with_rate(p in 0.0f64..=0.5, n in 1u64..300, r1 in 0.0f64..1.0, r2 in 0.0f64..1.0) {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let pts = dilution_curve(&TwoTermSource::new(p).unwrap(), n, &[lo, hi]).unwrap();
        prop_assert!(pts[1].fidelity >= pts[0].fidelity);
        prop_assert!(pts.iter().all(|x| (0.0..=1.0).contains(&x.fidelity)));
    }

    #[test]
    fn binomials_are_symmetric(n in 0u64..100_000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac) as u64;
        prop_assert_eq!(ln_binomial::<f64>(n, k), ln_binomial::<f64>(n, n - k));
    }

    #[test]
    fn single_precision_tracks_double(da in 1usize..=4, db in 1usize..=4, seed: u64) {
        let s64 = state(da, db, seed);
        let s32 = BipartiteState::<f32>::normalized(s64.amps().map(|z| nalgebra::Complex::new(z.re as f32, z.im as f32))).unwrap();
        let e64 = entropy_of_entanglement(&s64).unwrap().ebits;
        let e32 = entropy_of_entanglement(&s32).unwrap().ebits;
        prop_assert!((e64 - e32 as f64).abs() <= 1e-4);
    }
}
