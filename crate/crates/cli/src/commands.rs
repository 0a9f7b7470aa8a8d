use crate::config::{parse_rates, CommandName, Format, RunConfig};
use ebit::asymptotic::{
    concentrate_exact, concentrate_sample, dilution_curve, ratio_table, TwoTermSource, YieldEstimate,
};
use ebit::locc::{monotonicity_sweep, SweepConfig};
use ebit::measures::{uniqueness_report, DEFAULT_SUITE_TRIALS};
use ebit::schmidt::{entropy_of_entanglement, schmidt_decompose};
use ebit::{Error, RngSpec, State};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

pub enum Failure {
    Error(Error),
    /// A property check found counterexamples; the run itself completed.
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Error(Error::Io(e))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Failure::Error(Error::Io(io)),
            other => Failure::Error(Error::Computation(format!("csv: {other:?}"))),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Fixed-point with twelve decimals; never prints `-0`.
pub fn fmt12(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    let s = format!("{x:.12}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_owned()
    } else {
        s
    }
}

fn sink(cfg: &RunConfig) -> std::io::Result<Box<dyn Write>> {
    Ok(match &cfg.output_path {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Computation(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn write_table(out: Box<dyn Write>, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Outcome {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn load_state(path: &Path) -> Result<State, Error> {
    let text = std::fs::read_to_string(path)?;
    State::from_json(&text)
}

fn source(cfg: &RunConfig) -> Result<TwoTermSource<f64>, Error> {
    match (cfg.p, &cfg.state) {
        (Some(p), _) => TwoTermSource::new(p),
        (None, Some(path)) => TwoTermSource::from_state(&load_state(path)?),
        (None, None) => Err(Error::Validation("missing --p (or a 2x2 --state)".into())),
    }
}

pub fn run(cfg: &RunConfig) -> Outcome {
    match cfg.command.expect("resolved config has a command") {
        CommandName::Entropy => entropy(cfg),
        CommandName::Schmidt => schmidt(cfg),
        CommandName::Concentrate => concentrate(cfg),
        CommandName::Dilute => dilute(cfg),
        CommandName::Monotone => monotone(cfg),
        CommandName::Measures => measures(cfg),
        CommandName::Ratio => ratio(cfg),
    }
}

fn entropy(cfg: &RunConfig) -> Outcome {
    let s = load_state(cfg.require(&cfg.state, "state")?)?;
    let e = entropy_of_entanglement(&s)?.ebits;
    let mut out = sink(cfg)?;
    match cfg.format() {
        Format::Csv => writeln!(out, "{}", fmt12(e))?,
        Format::Json => write_json(&mut out, &serde_json::json!({ "ebits": e }))?,
    }
    Ok(())
}

fn schmidt(cfg: &RunConfig) -> Outcome {
    let s = load_state(cfg.require(&cfg.state, "state")?)?;
    let form = schmidt_decompose(&s)?;
    let probs = form.probabilities();
    let out = sink(cfg)?;
    match cfg.format() {
        Format::Csv => write_table(
            out,
            &["index", "coefficient", "probability"],
            form.coeffs
                .iter()
                .zip(&probs)
                .enumerate()
                .map(|(i, (c, p))| vec![i.to_string(), fmt12(*c), fmt12(*p)]),
        ),
        Format::Json => {
            let mut out = out;
            write_json(
                &mut out,
                &serde_json::json!({
                    "dim_a": s.dim_a(),
                    "dim_b": s.dim_b(),
                    "rank": form.rank,
                    "coeffs": form.coeffs,
                    "probabilities": probs,
                    "ebits": entropy_of_entanglement(&s)?.ebits,
                }),
            )
        }
    }
}

#[derive(Serialize)]
struct YieldRow {
    k: u64,
    expected_ebits: f64,
    per_copy_ebits: f64,
    gap_ebits: f64,
    whole_singlets: f64,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rng: Option<RngSpec>,
}

fn concentrate(cfg: &RunConfig) -> Outcome {
    let src = source(cfg)?;
    let ks = cfg.require(&cfg.k, "k")?;
    let seed = cfg.resolved_seed()?;
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let (y, rng): (YieldEstimate<f64>, _) = match cfg.trials {
            // each k gets its own stream, so the table does not depend on the order of k
            Some(trials) => {
                let rng = RngSpec::with_stream(seed, k);
                (concentrate_sample(&src, k, trials, rng)?, Some(rng))
            }
            None => (concentrate_exact(&src, k)?, None),
        };
        rows.push(YieldRow {
            k,
            expected_ebits: y.expected_ebits,
            per_copy_ebits: y.per_copy,
            gap_ebits: y.gap,
            whole_singlets: y.whole_singlets,
            method: y.method.as_str(),
            stderr: y.stderr,
            rng,
        });
    }
    let mut out = sink(cfg)?;
    match cfg.format() {
        Format::Csv => write_table(
            out,
            &["k", "expected_ebits", "per_copy_ebits", "gap_ebits", "whole_singlets", "method", "stderr"],
            rows.iter().map(|r| {
                vec![
                    r.k.to_string(),
                    fmt12(r.expected_ebits),
                    fmt12(r.per_copy_ebits),
                    fmt12(r.gap_ebits),
                    fmt12(r.whole_singlets),
                    r.method.to_owned(),
                    r.stderr.map(fmt12).unwrap_or_default(),
                ]
            }),
        ),
        Format::Json => write_json(&mut out, &rows),
    }
}

fn ratio(cfg: &RunConfig) -> Outcome {
    let src = source(cfg)?;
    let default_k = vec![1, 10, 100, 1000];
    let ks = cfg.k.as_ref().unwrap_or(&default_k);
    let table = ratio_table(&src, ks)?;
    let mut out = sink(cfg)?;
    match cfg.format() {
        Format::Csv => write_table(
            out,
            &["k", "per_copy_ebits", "gap_ebits"],
            table.iter().map(|r| vec![r.k.to_string(), fmt12(r.per_copy), fmt12(r.gap)]),
        ),
        Format::Json => {
            let rows: Vec<_> = table
                .iter()
                .map(|r| serde_json::json!({ "k": r.k, "per_copy_ebits": r.per_copy, "gap_ebits": r.gap }))
                .collect();
            write_json(&mut out, &rows)
        }
    }
}

fn dilute(cfg: &RunConfig) -> Outcome {
    let src = source(cfg)?;
    let n = *cfg.require(&cfg.n, "n")?;
    let rates = parse_rates(cfg.require(&cfg.rates, "rates")?)?;
    let curve = dilution_curve(&src, n, &rates)?;
    let mut out = sink(cfg)?;
    match cfg.format() {
        Format::Csv => write_table(
            out,
            &["n", "rate", "fidelity"],
            curve
                .iter()
                .map(|pt| vec![pt.copies_n.to_string(), fmt12(pt.rate), fmt12(pt.fidelity)]),
        ),
        Format::Json => {
            let rows: Vec<_> = curve
                .iter()
                .map(|pt| {
                    serde_json::json!({
                        "n": pt.copies_n,
                        "rate": pt.rate,
                        "retained_rate": pt.retained_rate,
                        "fidelity": pt.fidelity,
                    })
                })
                .collect();
            write_json(&mut out, &rows)
        }
    }
}

fn monotone(cfg: &RunConfig) -> Outcome {
    let trials = cfg.trials.unwrap_or(1000);
    let sweep = SweepConfig {
        trials: usize::try_from(trials).map_err(|_| Error::Validation("too many trials".into()))?,
        dims: cfg.dims()?,
        max_depth: cfg.depth.unwrap_or(4),
        seed: cfg.resolved_seed()?,
        ..SweepConfig::default()
    };
    let summary = monotonicity_sweep::<f64>(&sweep)?;
    let mut stdout = std::io::stdout().lock();
    match cfg.format() {
        Format::Csv => writeln!(stdout, "{}/{} satisfied", summary.satisfied, summary.trials)?,
        Format::Json => write_json(
            &mut stdout,
            &serde_json::json!({
                "trials": summary.trials,
                "satisfied": summary.satisfied,
                "product_probes": summary.product_probes,
                "worst_excess": summary.worst_excess,
                "violations": summary.violations.len(),
            }),
        )?,
    }
    if summary.is_clean() {
        return Ok(());
    }
    let mut dump = sink(cfg)?;
    write_json(&mut dump, &summary.violations)?;
    Err(Failure::Violation(format!(
        "{} counterexample(s) found",
        summary.violations.len()
    )))
}

fn measures(cfg: &RunConfig) -> Outcome {
    let trials = cfg.trials.map_or(Ok(DEFAULT_SUITE_TRIALS), |t| {
        usize::try_from(t).map_err(|_| Error::Validation("too many trials".into()))
    })?;
    let report = uniqueness_report::<f64>(RngSpec::new(cfg.resolved_seed()?), trials, Vec::new())?;
    let mut out = sink(cfg)?;
    write_json(&mut out, &report)?;
    out.flush()?;
    let winners = report.all_pass();
    println!("unique: {}", winners.join(","));
    Ok(())
}
