//! Acceptance suite. Runs every criterion in sequence, prints one PASS/FAIL
//! line per criterion and fails if any criterion fails.

mod common;
#[path = "../../core/tests/common/mod.rs"]
mod oracles;

use std::path::Path;
use std::time::{Duration, Instant};

use calvol_cli::container;
use calvol_cli::report::{read_csv, CorrelationRow, ReportRow};
use calvol_cli::CohortManifest;
use calvol_core::cohort::{kendall_tau, pareto_front, pearson_r, spearman_rho, Direction, ParetoPoint};
use calvol_core::metrics::{self, BinningScheme};
use calvol_core::rng::CounterRng;
use calvol_core::synthetic::{sample_scored_set, ReliabilityFn, ReliabilitySpec, ScoreDistribution};
use calvol_core::theory::{self, build_counterexample, convex_combine, PredictorTable};
use calvol_core::{DiscreteDataset, LabelVolume, ProbVolume};
use common::*;
use oracles::*;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

struct Line {
    passed: bool,
    text: String,
}

fn run(id: usize, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> Line {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let (passed, detail) = match outcome {
        Ok(_) if elapsed > budget => (false, format!("took {elapsed:.2?}, budget {budget:?}")),
        Ok(d) => (true, d),
        Err(e) => (false, e),
    };
    let text = format!(
        "{} [{id}] {name}: {detail} ({elapsed:.2?})",
        if passed { "PASS" } else { "FAIL" }
    );
    println!("{text}");
    Line { passed, text }
}

fn below(rng: &mut CounterRng, n: usize) -> usize {
    ((rng.next_f64() * n as f64) as usize).min(n - 1)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn counterexample_golden() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    calvol_ok(&["counterexample", "--out", p(dir.path())]);

    let labels = container::read_label(&dir.path().join("labels.json")).map_err(|e| e.to_string())?;
    let y = labels.labels();
    let scores = |name: &str| -> Result<Vec<f64>, String> {
        let v = container::read_prob(&dir.path().join(format!("{name}.json"))).map_err(|e| e.to_string())?;
        Ok(v.scores().to_vec())
    };
    let (f1, f2, f3) = (scores("f1")?, scores("f2")?, scores("f3")?);
    ensure!(y.len() == 300, "{} voxels", y.len());

    // Oracles: grouped-score scan, direct means and threshold counts.
    let bias = |s: &[f64]| s.iter().zip(y).map(|(&s, &y)| s - f64::from(u8::from(y))).sum::<f64>() / 300.0;
    let acc = |s: &[f64]| s.iter().zip(y).filter(|(&s, &y)| (s >= 0.5) == y).count() as f64 / 300.0;
    let (ce1, ce2, ce3) = (ce_by_scan(&f1, y), ce_by_scan(&f2, y), ce_by_scan(&f3, y));
    ensure!(close(ce3, 0.25, 1e-12) && close(acc(&f3), 1.0, 1e-12), "oracle: ce3={ce3} acc={}", acc(&f3));

    let summary: Vec<calvol_cli::commands::SummaryRow> =
        read_csv(&dir.path().join("summary.csv")).map_err(|e| e.to_string())?;
    let row = |id: &str| summary.iter().find(|r| r.predictor == id).ok_or(format!("no row {id}"));
    let (r1, r2, r3) = (row("f1")?, row("f2")?, row("f3")?);
    ensure!(close(r1.exact_ce, 0.0, 1e-12) && close(ce1, 0.0, 1e-12), "CE(f1)={}", r1.exact_ce);
    ensure!(close(r2.exact_ce, 0.0, 1e-12) && close(ce2, 0.0, 1e-12), "CE(f2)={}", r2.exact_ce);
    ensure!(close(r3.bias, 0.0, 1e-12) && close(bias(&f3), 0.0, 1e-12), "Bias(f3)={}", r3.bias);
    ensure!(close(r3.exact_ce, ce3, 1e-12), "CE(f3)={} oracle {ce3}", r3.exact_ce);
    ensure!(close(r3.accuracy, 1.0, 1e-12), "accuracy(f3)={}", r3.accuracy);
    Ok(format!(
        "CE(f1)={} CE(f2)={} Bias(f3)={} CE(f3)={} acc(f3)={}",
        r1.exact_ce, r2.exact_ce, r3.bias, r3.exact_ce, r3.accuracy
    ))
}

fn random_dataset(rng: &mut CounterRng, case: usize) -> DiscreteDataset {
    let n = match case % 10 {
        0 => 1,
        1 => 2,
        _ => (10f64.powf(4.0 * rng.next_f64()).round() as usize).clamp(1, 10_000),
    };
    let kind = case % 9;
    let q = rng.next_f64();
    let scores: Vec<f64> = (0..n)
        .map(|_| match kind {
            // scores in {0, 1}
            0 => f64::from(u8::from(rng.next_f64() < 0.5)),
            // constant
            1 => q,
            // a few distinct values
            2 => (rng.next_f64() * 8.0).floor() / 8.0,
            3 => (rng.next_f64() * 40.0).floor() / 40.0,
            _ => rng.next_f64(),
        })
        .collect();
    let labels: Vec<bool> = (0..n)
        .map(|i| match case % 7 {
            0 => true,
            1 => false,
            2 => rng.next_f64() < scores[i],
            _ => rng.next_f64() < q,
        })
        .collect();
    DiscreteDataset::new(scores, labels).expect("valid dataset")
}

fn bound_chain_suite() -> Outcome {
    let mut rng = CounterRng::new(0xB0);
    let mut cases = 0;
    let mut points = 0;
    let mut edge = [0usize; 4];
    for case in 0..1200 {
        let d = random_dataset(&mut rng, case);
        let bins = 1 + below(&mut rng, 50);
        let scheme = BinningScheme::new(bins).unwrap();
        let ce = metrics::exact_ce(&d).map_err(|e| e.to_string())?;
        let ece = metrics::binned_ece(&d, &scheme).map_err(|e| e.to_string())?;
        let bias = metrics::bias(&d).map_err(|e| e.to_string())?;
        ensure!(
            ce + 1e-12 >= ece && ece + 1e-12 >= bias.abs(),
            "case {case}: ce={ce} ece={ece} |bias|={}",
            bias.abs()
        );
        ensure!(theory::verify_bound(&d, &scheme).unwrap().chain_holds, "case {case}");
        let pos = d.positives();
        edge[0] += usize::from(pos == d.len());
        edge[1] += usize::from(pos == 0);
        edge[2] += usize::from(d.scores().iter().all(|&s| s == d.scores()[0]));
        edge[3] += usize::from(d.scores().iter().all(|&s| s == 0.0 || s == 1.0));
        cases += 1;
        points += d.len();
    }
    ensure!(edge.iter().all(|&c| c > 0), "edge cases not all covered: {edge:?}");

    // The same property through the CLI on generated cohorts.
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let specs = [
        "",
        r#", "distortion": {"kind": "temperature", "t": 2.0}, "label_mode": "bernoulli""#,
        r#", "distortion": {"kind": "affine_logit", "a": 0.6, "b": 0.8}, "size_bias_coupling": 0.7, "mask_margin": 2.0"#,
        r#", "distortion": {"kind": "constant", "c": 0.3}, "label_mode": "bernoulli", "boundary_softness": 0.0"#,
    ];
    for (i, extra) in specs.iter().enumerate() {
        let spec = dir.path().join(format!("spec{i}.json"));
        std::fs::write(&spec, phantom_spec(extra)).unwrap();
        let out_dir = dir.path().join(format!("c{i}"));
        calvol_ok(&["simulate", "--spec", p(&spec), "--out", p(&out_dir)]);
        let out = calvol(&["verify-bound", "--manifest", p(&out_dir.join("manifest.json"))]);
        ensure!(out.status.code() == Some(0), "verify-bound on cohort {i}: {:?}", out.status);
    }

    // A cohort of random datasets, edge cases included, as 1-D volumes.
    let raw = dir.path().join("raw");
    std::fs::create_dir_all(&raw).unwrap();
    let mut subjects = Vec::new();
    for case in 0..40 {
        let d = random_dataset(&mut rng, case);
        let dims = [d.len(), 1, 1];
        let id = format!("d{case:02}");
        let prob = ProbVolume::new(d.scores().to_vec(), dims, 1.0, None).unwrap();
        let label = LabelVolume::new(d.labels().to_vec(), dims, 1.0).unwrap();
        container::write_prob(&raw.join(format!("{id}_p.json")), &prob).unwrap();
        container::write_label(&raw.join(format!("{id}_l.json")), &label).unwrap();
        subjects.push(calvol_cli::SubjectEntry {
            prob_path: format!("{id}_p.json").into(),
            label_path: format!("{id}_l.json").into(),
            mask_path: None,
            tags: vec![],
            id,
        });
    }
    let manifest = CohortManifest {
        model_id: "random".into(),
        subjects,
    };
    std::fs::write(raw.join("manifest.json"), manifest.to_json()).unwrap();
    for bins in ["1", "7", "20"] {
        let out = calvol(&["verify-bound", "--manifest", p(&raw.join("manifest.json")), "--bins", bins]);
        ensure!(out.status.code() == Some(0), "verify-bound on random cohort, {bins} bins");
    }
    Ok(format!("{cases} datasets, {points} points, edge counts {edge:?}; 5 cohorts verified"))
}

fn ratio_demo() -> Outcome {
    let mut details = Vec::new();
    for gamma in [1e-3, 1.0, 1e6] {
        let demo = theory::ratio_unboundedness_demo(gamma).map_err(|e| e.to_string())?;
        let oracle = ce_by_scan(demo.dataset.scores(), demo.dataset.labels());
        ensure!(demo.violates_bound(gamma), "gamma={gamma}: ce={} |bias|={}", demo.ce, demo.abs_bias);
        ensure!(demo.ce > gamma * demo.abs_bias, "gamma={gamma}");
        ensure!(close(demo.ce, oracle, 1e-12) && close(demo.ce, 0.25, 1e-12), "ce={}", demo.ce);
        ensure!(demo.abs_bias <= 1e-12, "|bias|={}", demo.abs_bias);
        details.push(format!("gamma={gamma:e}"));
    }
    ensure!(theory::ratio_unboundedness_demo(f64::INFINITY).is_err(), "infinite gamma accepted");
    Ok(format!("{} violated with CE=0.25, Bias=0", details.join(", ")))
}

fn calibrated_at_scale() -> Outcome {
    let d = sample_scored_set(&ReliabilitySpec {
        score_distribution: ScoreDistribution::Uniform,
        reliability: ReliabilityFn::Identity,
        n: 1_000_000,
        seed: 20_240_601,
    })
    .map_err(|e| e.to_string())?;
    ensure!(d.len() == 1_000_000, "n={}", d.len());
    let ece = metrics::binned_ece(&d, &BinningScheme::new(20).unwrap()).map_err(|e| e.to_string())?;
    let bias = metrics::bias(&d).map_err(|e| e.to_string())?;
    ensure!(ece < 0.01, "ECE={ece}");
    ensure!(bias.abs() < ece, "|bias|={} ECE={ece}", bias.abs());
    Ok(format!("ECE(20)={ece:.3e} |bias|={:.3e}", bias.abs()))
}

fn mean_ece(report: &Path) -> Result<f64, String> {
    let rows: Vec<ReportRow> = read_csv(report).map_err(|e| e.to_string())?;
    rows.iter()
        .find(|r| r.subject_id == "#mean")
        .map(|r| r.ece)
        .ok_or_else(|| "no #mean row".into())
}

fn recalibration_efficacy() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spec = write_spec(
        dir.path(),
        r#"{
  "model_id": "tempered",
  "n_subjects": 20,
  "grid_dims": [24, 24, 24],
  "voxel_volume_ml": 0.001,
  "radius": { "law": "uniform", "min": 3.0, "max": 9.0 },
  "boundary_softness": 1.5,
  "distortion": { "kind": "temperature", "t": 2.0 },
  "label_mode": "bernoulli",
  "mask_margin": 3.0,
  "seed": 5
}"#,
    );
    let cohort = dir.path().join("cohort");
    let manifest = cohort.join("manifest.json");
    let cal = dir.path().join("cal");
    let (before, after) = (dir.path().join("before.csv"), dir.path().join("after.csv"));
    calvol_ok(&["simulate", "--spec", p(&spec), "--out", p(&cohort)]);
    calvol_ok(&["analyze", "--manifest", p(&manifest), "--out", p(&before)]);
    calvol_ok(&["calibrate", "--train", p(&manifest), "--apply", p(&manifest), "--out", p(&cal)]);
    calvol_ok(&["analyze", "--manifest", p(&cal.join("manifest.json")), "--out", p(&after)]);

    let (e0, e1) = (mean_ece(&before)?, mean_ece(&after)?);
    let params: serde_json::Value =
        serde_json::from_slice(&std::fs::read(cal.join("platt.json")).unwrap()).map_err(|e| e.to_string())?;
    let a = params["a"].as_f64().ok_or("no a")?;
    let b = params["b"].as_f64().ok_or("no b")?;
    ensure!(params["converged"].as_bool() == Some(true), "fit did not converge");

    // Independent fit on the same pooled masked voxels.
    let m = CohortManifest::load(&manifest).map_err(|e| e.to_string())?;
    let (mut z, mut y) = (Vec::new(), Vec::new());
    for s in &m.subjects {
        let prob = container::read_prob(&s.prob_path).unwrap();
        let label = container::read_label(&s.label_path).unwrap();
        let (mask, _) = container::read_mask(s.mask_path.as_ref().unwrap()).unwrap();
        for ((&q, &l), &keep) in prob.scores().iter().zip(label.labels()).zip(&mask) {
            if keep {
                assert!(q > 0.0 && q < 1.0);
                z.push(q.ln() - (1.0 - q).ln());
                y.push(l);
            }
        }
    }
    let (oa, ob) = logistic_fit_by_bisection(&z, &y);

    ensure!(e1 <= 0.5 * e0, "mean ECE {e0} -> {e1}");
    ensure!((1.8..=2.2).contains(&a), "a={a}");
    ensure!(close(a, oa, 1e-6) && close(b, ob, 1e-6), "a={a} b={b}, oracle a={oa} b={ob}");
    Ok(format!(
        "mean ECE {e0:.4} -> {e1:.4} ({:.0}% drop), a={a:.4} b={b:.4}, oracle a={oa:.4} b={ob:.4}",
        100.0 * (1.0 - e1 / e0)
    ))
}

fn correlation_machinery() -> Outcome {
    let mut rng = CounterRng::new(606);
    let mut checked = 0;
    for case in 0..200 {
        let n = 3 + below(&mut rng, 60);
        let tied = case % 2 == 0;
        let x = random_array(&mut rng, n, tied);
        let y: Vec<f64> = x
            .iter()
            .map(|v| if tied { (v + (rng.next_f64() * 3.0).floor()) % 5.0 } else { 0.4 * v + rng.next_f64() * 2.0 })
            .collect();
        if x.iter().all(|&a| a == x[0]) || y.iter().all(|&a| a == y[0]) {
            continue;
        }
        let pr = pearson_r(&x, &y).map_err(|e| e.to_string())?;
        let rho = spearman_rho(&x, &y).map_err(|e| e.to_string())?;
        let tau = kendall_tau(&x, &y).map_err(|e| e.to_string())?;
        ensure!(close(pr.r, pearson_direct(&x, &y), 1e-9), "case {case}: pearson");
        ensure!(
            close(rho, pearson_direct(&ranks_by_counting(&x), &ranks_by_counting(&y)), 1e-9),
            "case {case}: spearman"
        );
        ensure!(close(tau, kendall_pairs(&x, &y), 1e-9), "case {case}: kendall");
        checked += 1;
    }
    ensure!(checked >= 190, "only {checked} non-degenerate arrays");

    // Hand values: r = 8 / 10 for these deviations, SE = 0.36 / sqrt(5).
    let hand = pearson_r(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 1.0, 4.0, 3.0, 5.0]).unwrap();
    ensure!(close(hand.r, 0.8, 1e-12) && close(hand.se, 0.160_996_894_379_984_9, 1e-12), "hand: {hand:?}");
    let perfect = pearson_r(&[1.0, 2.0, 3.0, 4.0], &[3.0, 5.0, 7.0, 9.0]).unwrap();
    ensure!(close(perfect.r, 1.0, 1e-12) && close(perfect.se, 0.0, 1e-12), "perfect: {perfect:?}");

    // Size-dependent bias on a phantom cohort.
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spec = write_spec(
        dir.path(),
        r#"{
  "model_id": "coupled",
  "n_subjects": 20,
  "grid_dims": [28, 28, 28],
  "voxel_volume_ml": 0.001,
  "radius": { "law": "uniform", "min": 3.0, "max": 12.0 },
  "boundary_softness": 1.5,
  "size_bias_coupling": -0.4,
  "seed": 9
}"#,
    );
    let cohort = dir.path().join("cohort");
    let report = dir.path().join("report.csv");
    calvol_ok(&["simulate", "--spec", p(&spec), "--out", p(&cohort)]);
    calvol_ok(&["analyze", "--manifest", p(&cohort.join("manifest.json")), "--out", p(&report)]);
    let out = calvol_ok(&["correlate", "--report", p(&report), "--x", "true_volume_ml", "--y", "bias_ml"]);
    let table = dir.path().join("corr.csv");
    std::fs::write(&table, &out.stdout).unwrap();
    let rows: Vec<CorrelationRow> = read_csv(&table).map_err(|e| e.to_string())?;
    let r = rows[0].pearson_r.ok_or("no pearson_r")?;
    let subjects: Vec<ReportRow> = read_csv::<ReportRow>(&report)
        .unwrap()
        .into_iter()
        .filter(|r| !r.is_summary())
        .collect();
    let xs: Vec<f64> = subjects.iter().map(|s| s.true_volume_ml).collect();
    let ys: Vec<f64> = subjects.iter().map(|s| s.bias_ml).collect();
    ensure!(close(r, pearson_direct(&xs, &ys), 1e-9), "report r={r} vs oracle");
    ensure!(r < 0.0 && r.abs() >= 0.5, "size-bias r={r}");
    Ok(format!("{checked} arrays match oracles; hand SE ok; phantom bias-vs-size r={r:.3}"))
}

fn pareto_correctness() -> Outcome {
    let mut rng = CounterRng::new(7007);
    let mut front_sizes = 0;
    for case in 0..100 {
        let n = 1 + below(&mut rng, 50);
        let k = 2 + below(&mut rng, 2);
        let coarse = case % 4 == 0;
        let directions: Vec<Direction> = (0..k)
            .map(|_| if rng.next_f64() < 0.3 { Direction::Maximize } else { Direction::Minimize })
            .collect();
        let raw: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..k)
                    .map(|_| if coarse { (rng.next_f64() * 3.0).floor() } else { rng.next_f64() })
                    .collect()
            })
            .collect();
        let points: Vec<ParetoPoint> = raw
            .iter()
            .enumerate()
            .map(|(i, v)| ParetoPoint {
                id: format!("p{i}"),
                objectives: v.clone(),
            })
            .collect();
        let minimised: Vec<Vec<f64>> = raw
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&directions)
                    .map(|(&x, d)| if *d == Direction::Maximize { -x } else { x })
                    .collect()
            })
            .collect();
        let expected: Vec<String> = pareto_brute(&minimised).into_iter().map(|i| format!("p{i}")).collect();
        let got = pareto_front(&points, &directions).map_err(|e| e.to_string())?;
        ensure!(got == expected, "case {case}: {got:?} vs {expected:?}");
        front_sizes += got.len();
    }
    Ok(format!("100 sets, {front_sizes} front points in total"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spec = write_spec(
        dir.path(),
        &phantom_spec(r#", "distortion": {"kind": "temperature", "t": 1.5}, "label_mode": "bernoulli", "mask_margin": 2.5"#),
    );
    let mut cohorts = Vec::new();
    for (run, jobs) in [("a", "1"), ("b", "1"), ("c", "3"), ("d", "8")] {
        let out = dir.path().join(run);
        calvol_ok(&["simulate", "--spec", p(&spec), "--out", p(&out), "--jobs", jobs]);
        cohorts.push(dir_contents(&out));
    }
    ensure!(cohorts.windows(2).all(|w| w[0] == w[1]), "simulate output differs across runs or --jobs");

    let manifest = dir.path().join("a").join("manifest.json");
    let mut reports = Vec::new();
    for jobs in ["1", "1", "2", "8"] {
        let out = calvol_ok(&["analyze", "--manifest", p(&manifest), "--jobs", jobs]);
        reports.push(out.stdout);
    }
    ensure!(reports.windows(2).all(|w| w[0] == w[1]), "analyze output differs across runs or --jobs");

    // Containers round-trip bitwise.
    let copy = dir.path().join("copy");
    std::fs::create_dir_all(&copy).unwrap();
    let m = CohortManifest::load(&manifest).map_err(|e| e.to_string())?;
    let mut files = 0;
    for s in &m.subjects {
        let prob = container::read_prob(&s.prob_path).map_err(|e| e.to_string())?;
        let label = container::read_label(&s.label_path).map_err(|e| e.to_string())?;
        let mask_path = s.mask_path.as_ref().ok_or("no mask")?;
        let (mask, dims) = container::read_mask(mask_path).map_err(|e| e.to_string())?;
        let name = |p: &Path| p.file_name().unwrap().to_owned();
        container::write_prob(&copy.join(name(&s.prob_path)), &prob).unwrap();
        container::write_label(&copy.join(name(&s.label_path)), &label).unwrap();
        container::write_mask(&copy.join(name(mask_path)), &mask, dims, prob.voxel_volume_ml()).unwrap();
        files += 6;
    }
    let mut original = cohorts[0].clone();
    original.remove("manifest.json");
    ensure!(dir_contents(&copy) == original, "round-tripped containers differ");
    Ok(format!("simulate x4 and analyze x4 identical; {files} container files round-trip"))
}

fn convex_laws() -> Outcome {
    let mut rng = CounterRng::new(99);
    for case in 0..300 {
        let n = 1 + below(&mut rng, 500);
        let k = 2 + below(&mut rng, 4);
        let tables: Vec<PredictorTable> = (0..k)
            .map(|j| PredictorTable::new(format!("f{j}"), (0..n).map(|_| rng.next_f64()).collect()).unwrap())
            .collect();
        let raw: Vec<f64> = (0..k).map(|_| rng.next_f64() + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let labels: Vec<bool> = (0..n).map(|_| rng.next_f64() < 0.4).collect();

        let combined = convex_combine(&tables, &weights).map_err(|e| e.to_string())?;
        let lhs = metrics::bias(&combined.with_labels(&labels).unwrap()).unwrap();
        let rhs: f64 = tables
            .iter()
            .zip(&weights)
            .map(|(t, w)| w * metrics::bias(&t.with_labels(&labels).unwrap()).unwrap())
            .sum();
        ensure!(close(lhs, rhs, 1e-12), "case {case}: {lhs} vs {rhs}");
    }

    let cx = build_counterexample();
    for i in 0..cx.labels.len() {
        let avg = 0.5 * cx.f1.scores()[i] + 0.5 * cx.f2.scores()[i];
        ensure!(cx.f3.scores()[i] == avg, "f3[{i}]={} avg={avg}", cx.f3.scores()[i]);
        let expected = if i < 100 { 0.625 } else if i < 150 { 0.0 } else { 0.25 };
        ensure!(avg == expected, "avg[{i}]={avg}");
    }
    Ok("300 random tables linear within 1e-12; f3 = (f1 + f2) / 2 exactly".into())
}

#[test]
fn acceptance() {
    let s = Duration::from_secs;
    let lines = [
        run(1, "counterexample golden values", s(1), counterexample_golden),
        run(2, "bound chain on random datasets and cohorts", s(30), bound_chain_suite),
        run(3, "ratio bound fails for every gamma", s(1), ratio_demo),
        run(4, "calibrated scores are unbiased at N=1e6", s(10), calibrated_at_scale),
        run(5, "Platt recalibration of a T=2 cohort", s(60), recalibration_efficacy),
        run(6, "correlation statistics and size-bias sign", s(60), correlation_machinery),
        run(7, "Pareto front against brute force", s(10), pareto_correctness),
        run(8, "determinism and container round-trip", s(60), determinism),
        run(9, "convex-combination laws", s(10), convex_laws),
    ];
    let failed: Vec<&str> = lines.iter().filter(|l| !l.passed).map(|l| l.text.as_str()).collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
