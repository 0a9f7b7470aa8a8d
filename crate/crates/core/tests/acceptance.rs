//! End-to-end acceptance checks at their pinned tolerances. Each check prints
//! one `PASS`/`FAIL` line; the test fails if any check does.
//!
//! Run with `cargo test -p ebit --test acceptance -- --nocapture`.

use ebit::asymptotic::{
    concentrate_exact, dilution_curve, hamming_distribution, log2_binomial, oracle_concentrate, TwoTermSource,
};
use ebit::locc::{monotonicity_sweep, SweepConfig};
use ebit::measures::{axiom_suite, builtin_candidates, replay, uniqueness_report, Axiom, DEFAULT_SUITE_TRIALS};
use ebit::schmidt::{entropy_of_entanglement, vn_entropy};
use ebit::state::{partial_trace, random_state, tensor_product, BipartiteState};
use ebit::{RngSpec, Side};
use rand::Rng;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn h2(p: f64) -> f64 {
    if p == 0.0 || p == 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

fn unit_values() -> Outcome {
    let e1 = entropy_of_entanglement(&BipartiteState::<f64>::singlet()).unwrap().ebits;
    ensure((e1 - 1.0).abs() <= 1e-12, || format!("E(singlet) = {e1}"))?;
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let e0 = entropy_of_entanglement(&BipartiteState::<f64>::basis(2, 2, i, j).unwrap()).unwrap().ebits;
        ensure(e0.abs() <= 1e-12, || format!("E(|{i}{j}>) = {e0}"))?;
    }
    Ok(format!("E(singlet) = {e1:.15}"))
}

fn entropy_paths() -> Outcome {
    let mut rng = RngSpec::with_stream(2, 0).rng();
    let mut worst = 0.0f64;
    for t in 0..200u64 {
        let (da, db) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let s = random_state::<f64>(da, db, RngSpec::with_stream(2, t + 1)).unwrap();
        let svd = entropy_of_entanglement(&s).unwrap().ebits;
        let eig = vn_entropy(&partial_trace(&s, Side::A)).unwrap();
        worst = worst.max((svd - eig).abs());
        ensure((svd - eig).abs() <= 1e-10, || format!("trial {t} ({da}x{db}): {svd} vs {eig}"))?;
    }
    Ok(format!("200 states, worst |ΔE| = {worst:.2e}"))
}

fn convergence() -> Outcome {
    let mut worst_gap = 0.0f64;
    for p in [0.1, 0.25, 0.4, 0.5] {
        let src = TwoTermSource::new(p).unwrap();
        let h = h2(p);
        for k in (1..=1000u64).chain([2000, 10_000, 100_000]) {
            let y = concentrate_exact(&src, k).unwrap();
            ensure(y.per_copy <= h + 1e-9, || format!("p={p} k={k}: {} > H = {h}", y.per_copy))?;
        }
        let gaps: Vec<f64> = [10u64, 100, 1000]
            .iter()
            .map(|&k| h - concentrate_exact(&src, k).unwrap().per_copy)
            .collect();
        ensure(gaps[0] > gaps[1] && gaps[1] > gaps[2], || format!("p={p}: gaps {gaps:?} not decreasing"))?;
        ensure(gaps[2] < 0.02, || format!("p={p}: gap(1000) = {}", gaps[2]))?;
        worst_gap = worst_gap.max(gaps[2]);
    }
    Ok(format!("largest gap(1000) = {worst_gap:.6}"))
}

fn oracle_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    for p in [0.25, 0.5, 0.75] {
        let src = TwoTermSource::new(p).unwrap();
        let state = BipartiteState::<f64>::from_schmidt_probabilities(&[1.0 - p, p]).unwrap();
        for k in 1..=10u32 {
            let dist = hamming_distribution(&src, k as u64);
            let out = oracle_concentrate(&state, k).unwrap();
            let total: f64 = out.iter().map(|o| o.prob).sum();
            ensure((total - 1.0).abs() <= 1e-9, || format!("p={p} k={k}: mass {total}"))?;
            for o in &out {
                // the oracle counts copies in the lighter term; above p = 1/2 that is the `1 − p` term
                let m = if p > 0.5 { k as u64 - o.m } else { o.m };
                let dp = (o.prob - dist[m as usize].1).abs();
                let de = (o.block_entropy - log2_binomial::<f64>(k as u64, o.m)).abs();
                worst = worst.max(dp).max(de);
                ensure(dp <= 1e-9 && de <= 1e-9, || format!("p={p} k={k} m={}: Δp={dp:e} ΔE={de:e}", o.m))?;
            }
        }
    }
    Ok(format!("k ≤ 10, worst deviation {worst:.2e}"))
}

fn locc_monotonicity() -> Outcome {
    let cfg = SweepConfig {
        trials: 1000,
        dims: None,
        dim_choices: vec![2, 3, 4],
        max_depth: 4,
        seed: 1,
    };
    let s = monotonicity_sweep::<f64>(&cfg).unwrap();
    ensure(s.is_clean(), || format!("{} violations, first {:?}", s.violations.len(), s.violations.first()))?;
    ensure(s.satisfied == 1000 && s.product_probes == 1000, || format!("{s:?}"))?;
    Ok(format!("1000/1000 satisfied, worst excess {:.2e}", s.worst_excess))
}

fn additivity() -> Outcome {
    let mut rng = RngSpec::with_stream(6, 0).rng();
    let mut worst = 0.0f64;
    for t in 0..200u64 {
        let d: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=4)).collect();
        let a = random_state::<f64>(d[0], d[1], RngSpec::with_stream(6, 2 * t + 1)).unwrap();
        let b = random_state::<f64>(d[2], d[3], RngSpec::with_stream(6, 2 * t + 2)).unwrap();
        let joint = entropy_of_entanglement(&tensor_product(&a, &b).unwrap()).unwrap().ebits;
        let sum = entropy_of_entanglement(&a).unwrap().ebits + entropy_of_entanglement(&b).unwrap().ebits;
        worst = worst.max((joint - sum).abs());
        ensure((joint - sum).abs() <= 1e-9, || format!("pair {t}: {joint} vs {sum}"))?;
    }
    for name in ["entropy_squared", "exp_entropy"] {
        let c = builtin_candidates::<f64>().into_iter().find(|c| c.name == name).unwrap();
        let r = axiom_suite(&c, RngSpec::new(7), DEFAULT_SUITE_TRIALS).unwrap();
        let cx = r
            .counterexample(Axiom::Additivity)
            .ok_or_else(|| format!("{name} has no additivity counterexample"))?;
        ensure(replay(&c, cx).unwrap(), || format!("{name} counterexample does not replay"))?;
    }
    Ok(format!("200 pairs, worst {worst:.2e}; entropy_squared and exp_entropy refuted"))
}

fn uniqueness() -> Outcome {
    let a = uniqueness_report::<f64>(RngSpec::new(7), DEFAULT_SUITE_TRIALS, Vec::new()).map_err(|e| e.to_string())?;
    let b = uniqueness_report::<f64>(RngSpec::new(7), DEFAULT_SUITE_TRIALS, Vec::new()).map_err(|e| e.to_string())?;
    ensure(a.all_pass() == ["entropy"], || format!("all-pass set {:?}", a.all_pass()))?;
    let (ja, jb) = (a.to_json(), b.to_json());
    ensure(ja == jb, || "reports differ between runs".into())?;
    Ok(format!("unique: entropy ({} byte report, identical twice)", ja.len()))
}

fn dilution() -> Outcome {
    let src = TwoTermSource::new(0.25).unwrap();
    let h = h2(0.25);
    let at100 = dilution_curve(&src, 100, &[h - 0.1, h + 0.1]).unwrap();
    let at400 = dilution_curve(&src, 400, &[h + 0.1]).unwrap();
    let (lo, hi, hi400) = (at100[0].fidelity, at100[1].fidelity, at400[0].fidelity);
    ensure(hi >= 0.9, || format!("F(H+0.1) = {hi}"))?;
    ensure(hi > lo, || format!("F(H+0.1) = {hi} ≤ F(H−0.1) = {lo}"))?;
    ensure(hi400 > hi, || format!("n=400: {hi400} ≤ n=100: {hi}"))?;
    Ok(format!("n=100: F(H−0.1)={lo:.6} F(H+0.1)={hi:.6}; n=400: F(H+0.1)={hi400:.6}"))
}

#[test]
fn acceptance() {
    let checks: [(&str, fn() -> Outcome, u64); 8] = [
        ("1 unit values", unit_values, 1),
        ("2 entropy path equivalence", entropy_paths, 10),
        ("3 concentration convergence", convergence, 30),
        ("4 oracle equivalence", oracle_equivalence, 60),
        ("5 LOCC monotonicity", locc_monotonicity, 120),
        ("6 additivity", additivity, 30),
        ("7 uniqueness report", uniqueness, 300),
        ("8 dilution trade-off", dilution, 30),
    ];
    let mut failed = Vec::new();
    for (name, check, budget) in checks {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if took <= Duration::from_secs(budget) {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {took:.1?}, budget {budget} s"))
            }
        });
        match outcome {
            Ok(msg) => println!("PASS  {name}: {msg} [{took:.2?}]"),
            Err(msg) => {
                println!("FAIL  {name}: {msg} [{took:.2?}]");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
