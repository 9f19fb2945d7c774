//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use ratingprobit_core::compare::{compute_measures, fit_disagreement_models, pair, DeltaSign};
use ratingprobit_core::design::build_design_matrix;
use ratingprobit_core::eval::evaluate;
use ratingprobit_core::model_spec::preset;
use ratingprobit_core::oprobit::{fit, fit_binary_probit, FitOptions, OrderedProbitModel, OrdinalData};
use ratingprobit_core::scales::{
    crossmap_moodys_to_sp, decode, encode, encode_symbol, Agency, RatingGrade, ScaleKind, MOODYS_LADDER, SP_LADDER,
};
use ratingprobit_core::stats::{descriptive_stats, indicator_column, SUMMARY_INDICATORS};
use ratingprobit_core::synth::{
    generate_covariates, generate_dataset, generate_ratings, GeneratorConfig, CLASS_THRESHOLDS,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn phi(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Inverse normal cdf by bisection on `phi`.
fn phi_inv(p: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Ordered-probit log-likelihood at `(beta, c_1, ln gaps)`, written
/// independently of the library.
fn oracle_loglik(theta: &[f64], x: &[f64], y: &[u32], p: usize) -> f64 {
    let beta = &theta[..p];
    let mut cuts = vec![theta[p]];
    for t in &theta[p + 1..] {
        let last = *cuts.last().unwrap();
        cuts.push(last + t.exp());
    }
    let k = cuts.len() + 1;
    y.iter()
        .enumerate()
        .map(|(i, &yi)| {
            let eta: f64 = x[i * p..(i + 1) * p].iter().zip(beta).map(|(a, b)| a * b).sum();
            let j = yi as usize;
            let hi = if j == k { f64::INFINITY } else { cuts[j - 1] - eta };
            let lo = if j == 1 { f64::NEG_INFINITY } else { cuts[j - 2] - eta };
            // Differences of upper tails avoid cancellation near 1.
            let p = if lo > 0.0 { phi(-lo) - phi(-hi) } else { phi(hi) - phi(lo) };
            p.ln()
        })
        .sum()
}

fn normal(rng: &mut ChaCha20Rng) -> f64 {
    // Box-Muller keeps the oracle free of the library's sampler.
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn gradient_matches_finite_differences() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let (n, p, k) = (20, 5, 4);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let x: Vec<f64> = (0..n * p).map(|_| normal(&mut rng)).collect();
        let y: Vec<u32> = (0..n).map(|_| rng.random_range(1..=k as u32)).collect();
        let mut theta: Vec<f64> = (0..p).map(|_| 0.5 * normal(&mut rng)).collect();
        theta.push(normal(&mut rng));
        theta.extend((0..k - 2).map(|_| 0.5 * normal(&mut rng) - 0.2));
        let data = OrdinalData::new(x.clone(), p, y.clone(), k).unwrap();
        let model = OrderedProbitModel::from_unconstrained(p, &theta).unwrap();
        let analytic = model.gradient(&data).unwrap();
        let h = 1e-5;
        for j in 0..theta.len() {
            let mut up = theta.clone();
            let mut down = theta.clone();
            up[j] += h;
            down[j] -= h;
            let fd = (oracle_loglik(&up, &x, &y, p) - oracle_loglik(&down, &x, &y, p)) / (2.0 * h);
            worst = worst.max((analytic[j] - fd).abs() / fd.abs().max(1.0));
        }
    }
    let elapsed = start.elapsed();
    check(worst < 1e-6 && elapsed < Duration::from_secs(5), format!("max relative error {worst:.2e} in {elapsed:.2?}"))
}

fn probabilities_normalize() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let (mut worst_sum, mut min_p, mut bad) = (0.0f64, 1.0f64, 0);
    for _ in 0..1000 {
        let k: usize = rng.random_range(2..=18);
        let p: usize = rng.random_range(1..=8);
        let mut cuts = vec![rng.random_range(-4.0..0.0)];
        for _ in 1..k - 1 {
            let last = *cuts.last().unwrap();
            cuts.push(last + rng.random_range(0.05..8.0 / k as f64));
        }
        let beta: Vec<f64> = (0..p).map(|_| normal(&mut rng)).collect();
        let mut x: Vec<f64> = (0..p).map(|_| normal(&mut rng)).collect();
        // Rescale the row so x·beta is spread over (-30, 30).
        let eta: f64 = x.iter().zip(&beta).map(|(a, b)| a * b).sum();
        let target = rng.random_range(-29.999..29.999);
        if eta.abs() > 1e-9 {
            x.iter_mut().for_each(|v| *v *= target / eta);
        }
        let model = OrderedProbitModel::new(beta, cuts).unwrap();
        let probs = model.class_probabilities(&x).unwrap();
        let sum: f64 = probs.as_slice().iter().sum();
        worst_sum = worst_sum.max((sum - 1.0).abs());
        for &q in probs.as_slice() {
            min_p = min_p.min(q);
            if !(q > 0.0 && q <= 1.0) {
                bad += 1;
            }
        }
    }
    check(
        worst_sum < 1e-12 && bad == 0,
        format!("max |sum - 1| = {worst_sum:.1e}; smallest class probability {min_p:.1e}; {bad} outside (0, 1]"),
    )
}

/// Reference base S&P class-model coefficients:
/// capitalization, ROA, EBITDA/interest, LT debt/capital, debt/EBITDA,
/// liquidity, telecom, metal & mining, oil & gas, consumer, utilities,
/// inflation, GDP growth, developed.
const REFERENCE_BASE_SP: [f64; 14] =
    [-0.617, -0.063, -0.011, 0.015, -0.059, 0.242, -1.107, -1.514, -1.884, -1.504, -2.795, 0.463, -0.171, -0.714];

fn parameters_are_recovered() -> Outcome {
    let config = GeneratorConfig::default();
    if config.ratings.beta != REFERENCE_BASE_SP {
        return Err("generator beta differs from the reference base S&P coefficients".into());
    }
    let truth = config.ratings.classes8_model();
    let spec = preset("base_sp").unwrap();
    let (mut hits, mut total, mut slowest) = (0, 0, Duration::ZERO);
    let mut misses = BTreeMap::new();
    for seed in 0..20 {
        let data = generate_dataset(&GeneratorConfig { seed, ..config.clone() }).map_err(|e| e.to_string())?;
        let (design, _) =
            build_design_matrix(&data, &spec, ScaleKind::Classes8, Agency::SP).map_err(|e| e.to_string())?;
        let start = Instant::now();
        let (model, diag) = fit(&design.data, &FitOptions::default()).map_err(|e| format!("seed {seed}: {e}"))?;
        slowest = slowest.max(start.elapsed());
        for (j, b) in model.beta().iter().enumerate() {
            total += 1;
            if (b - truth.beta()[j]).abs() <= 3.0 * diag.se[j] {
                hits += 1;
            } else {
                *misses.entry(spec.regressors[j].to_string()).or_insert(0) += 1;
            }
        }
    }
    let share = hits as f64 / total as f64;
    check(
        share >= 0.95 && slowest < Duration::from_secs(10),
        format!(
            "{hits}/{total} coefficients within 3 SE ({:.1}%), slowest fit {slowest:.2?}, misses {misses:?}",
            100.0 * share
        ),
    )
}

fn null_model_identity() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let k = 6;
    let weights = [0.05, 0.15, 0.3, 0.25, 0.17, 0.08];
    let y: Vec<u32> = (0..1500)
        .map(|_| {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            weights
                .iter()
                .position(|w| {
                    acc += w;
                    u < acc
                })
                .unwrap_or(k - 1) as u32
                + 1
        })
        .collect();
    let data = OrdinalData::new(Vec::new(), 0, y.clone(), k).unwrap();
    let (model, diag) = fit(&data, &FitOptions::default()).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let mut cum = 0usize;
    for (j, c) in model.thresholds().iter().enumerate() {
        cum += y.iter().filter(|v| **v as usize == j + 1).count();
        worst = worst.max((c - phi_inv(cum as f64 / y.len() as f64)).abs());
    }
    check(
        diag.pseudo_r2_mcfadden.abs() < 1e-10 && worst < 1e-8,
        format!("pseudo-R2 {:.1e}, max threshold error {worst:.1e}", diag.pseudo_r2_mcfadden),
    )
}

fn location_and_scale_invariance() -> Outcome {
    let data =
        generate_dataset(&GeneratorConfig { n: 3000, seed: 5, ..Default::default() }).map_err(|e| e.to_string())?;
    let spec = preset("base_sp").unwrap();
    let (design, _) = build_design_matrix(&data, &spec, ScaleKind::Classes8, Agency::SP).map_err(|e| e.to_string())?;
    let d = &design.data;
    let p = d.n_cols();
    let opts = FitOptions::default();
    let (base, _) = fit(d, &opts).map_err(|e| e.to_string())?;
    let predict = |m: &OrderedProbitModel, x: &[f64]| -> Vec<u32> {
        (0..d.n_rows()).map(|i| m.predict_class(&x[i * p..(i + 1) * p]).unwrap()).collect()
    };
    let base_pred = predict(&base, d.regressors());
    let (mut shift_err, mut scale_err, mut flips) = (0.0f64, 0.0f64, 0usize);
    // Capitalization, ROA, EBITDA/interest, liquidity, inflation.
    for j in [0usize, 1, 2, 5, 11] {
        let mut x = d.regressors().to_vec();
        x.iter_mut().skip(j).step_by(p).for_each(|v| *v += 7.3);
        let shifted = OrdinalData::new(x.clone(), p, d.response().to_vec(), d.n_classes()).unwrap();
        let (m, _) = fit(&shifted, &opts).map_err(|e| e.to_string())?;
        for (a, b) in m.beta().iter().zip(base.beta()) {
            shift_err = shift_err.max((a - b).abs());
        }
        flips += predict(&m, &x).iter().zip(&base_pred).filter(|(a, b)| a != b).count();

        let mut x = d.regressors().to_vec();
        x.iter_mut().skip(j).step_by(p).for_each(|v| *v *= 100.0);
        let scaled = OrdinalData::new(x, p, d.response().to_vec(), d.n_classes()).unwrap();
        let (m, _) = fit(&scaled, &opts).map_err(|e| e.to_string())?;
        scale_err = scale_err.max((m.beta()[j] * 100.0 - base.beta()[j]).abs() / base.beta()[j].abs());
    }
    check(
        shift_err < 1e-6 && flips == 0 && scale_err < 1e-6,
        format!("shift: max beta change {shift_err:.1e}, {flips} changed predictions; scale: max relative error {scale_err:.1e}"),
    )
}

/// Reference descriptive statistics of industrial issuers, lower-triangle
/// correlations; columns ROA, EBITDA/interest, debt/EBITDA, cash flow/sales,
/// operating margin, liquidity, log capitalization, LT debt/capital.
const REFERENCE_MEAN: [f64; 8] = [8.14, 18.64, 2.03, 22.89, 19.10, 1.29, 4.16, 34.31];
const REFERENCE_SD: [f64; 8] = [6.39, 25.84, 1.67, 15.05, 12.40, 0.71, 0.55, 20.18];
#[rustfmt::skip]
const REFERENCE_CORR_LOWER: [&[f64]; 8] = [
    &[],
    &[0.422],
    &[-0.564, -0.426],
    &[0.311, 0.128, -0.253],
    &[0.564, 0.211, -0.357, 0.780],
    &[0.259, 0.183, -0.198, -0.174, 0.075],
    &[0.290, 0.176, -0.235, 0.016, 0.073, 0.015],
    &[-0.333, -0.445, 0.688, -0.052, -0.144, -0.212, -0.269],
];

fn generator_reproduces_moments() -> Outcome {
    let start = Instant::now();
    let data = generate_covariates(&GeneratorConfig { n: 100_000, seed: 6, ..Default::default() })
        .map_err(|e| e.to_string())?;
    let columns: Vec<_> = SUMMARY_INDICATORS.iter().map(|i| indicator_column(&data, *i)).collect();
    let stats = descriptive_stats(&columns).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let (mut mean_err, mut sd_err, mut corr_err) = (0.0f64, 0.0f64, 0.0f64);
    for (i, c) in stats.columns.iter().enumerate() {
        mean_err = mean_err.max((c.mean - REFERENCE_MEAN[i]).abs() / REFERENCE_MEAN[i].abs());
        sd_err = sd_err.max((c.sd - REFERENCE_SD[i]).abs() / REFERENCE_SD[i]);
        for (j, r) in REFERENCE_CORR_LOWER[i].iter().enumerate() {
            corr_err = corr_err.max((stats.corr(i, j) - r).abs());
        }
    }
    let debt = stats.corr(7, 2);
    check(
        mean_err < 0.01 && sd_err < 0.02 && corr_err <= 0.02 && elapsed < Duration::from_secs(30),
        format!(
            "max mean error {:.2}%, sd error {:.2}%, correlation error {corr_err:.4} (debt/EBITDA vs LT debt/capital {debt:.3}), {elapsed:.2?}",
            100.0 * mean_err,
            100.0 * sd_err
        ),
    )
}

fn scale_codecs() -> Outcome {
    let mut problems = Vec::new();
    for (kind, expected) in [(ScaleKind::Classes8, 8u32), (ScaleKind::Gradations18, 18), (ScaleKind::Mixed12, 12)] {
        for agency in [Agency::SP, Agency::Moodys] {
            let ladder: &[&str] = if agency == Agency::SP { &SP_LADDER } else { &MOODYS_LADDER };
            let codes: std::collections::BTreeSet<u32> =
                ladder.iter().map(|s| encode(RatingGrade::parse(agency, s).unwrap(), kind)).collect();
            if codes.len() != expected as usize || codes.first() != Some(&1) || codes.last() != Some(&expected) {
                problems.push(format!("{kind} {agency}: {} codes", codes.len()));
            }
        }
        for code in 1..=expected {
            let label = decode(code, kind).unwrap();
            if encode_symbol(Agency::SP, label, kind).ok() != Some(code) {
                problems.push(format!("{kind} code {code} does not survive decode/encode"));
            }
        }
    }
    let ba2 = crossmap_moodys_to_sp("Ba2").unwrap_or("?");
    if ba2 != "BB" {
        problems.push(format!("Ba2 maps to {ba2}"));
    }
    let ranks: Vec<usize> = MOODYS_LADDER
        .iter()
        .map(|m| SP_LADDER.iter().position(|s| *s == crossmap_moodys_to_sp(m).unwrap()).unwrap())
        .collect();
    let inversions = ranks.windows(2).filter(|w| w[1] <= w[0]).count();
    if inversions > 0 {
        problems.push(format!("{inversions} rank inversions"));
    }
    check(
        problems.is_empty(),
        if problems.is_empty() {
            "8/18/12 codes, Ba2 = BB, round trips exact, no rank inversions".into()
        } else {
            problems.join("; ")
        },
    )
}

fn evaluation_matches_recount() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let n: usize = rng.random_range(1..300);
        let top: u32 = rng.random_range(2..=18);
        let actual: Vec<u32> = (0..n).map(|_| rng.random_range(1..=top)).collect();
        let predicted: Vec<u32> = (0..n).map(|_| rng.random_range(1..=top)).collect();
        let report = evaluate(&actual, &predicted).unwrap();
        let mut hist = BTreeMap::new();
        let mut by_abs = [0usize; 3];
        let mut delta = Vec::new();
        for i in 0..n {
            let d = predicted[i] as i64 - actual[i] as i64;
            delta.push(d);
            *hist.entry(d).or_insert(0usize) += 1;
            if d.abs() <= 2 {
                by_abs[d.unsigned_abs() as usize] += 1;
            }
        }
        let share = |c: usize| c as f64 / n as f64;
        let same = report.n == n
            && report.delta == delta
            && report.histogram == hist
            && report.share_exact == share(by_abs[0])
            && report.share_abs1 == share(by_abs[1])
            && report.share_abs2 == share(by_abs[2])
            && report.share_within1 == share(by_abs[0] + by_abs[1])
            && report.share_within2 == share(by_abs[0] + by_abs[1] + by_abs[2]);
        let swapped = evaluate(&predicted, &actual).unwrap();
        let swap_ok = swapped.delta.iter().zip(&report.delta).all(|(a, b)| *a == -*b)
            && swapped.share_exact == report.share_exact
            && swapped.share_abs1 == report.share_abs1
            && swapped.share_abs2 == report.share_abs2
            && swapped.share_within1 == report.share_within1
            && swapped.share_within2 == report.share_within2;
        if !same || !swap_ok {
            mismatches += 1;
        }
    }
    check(mismatches == 0, format!("{mismatches} of 1000 reports differ from the recount or the swap"))
}

fn comparison_identities_and_split_recovery() -> Outcome {
    let mut violations = 0;
    let mut pairs_seen = 0;
    for seed in 0..5 {
        let data = generate_dataset(&GeneratorConfig { n: 2000, seed: 100 + seed, ..Default::default() })
            .map_err(|e| e.to_string())?;
        for kind in ScaleKind::ALL {
            for p in pair(&data, kind, &preset("split_1s").unwrap()) {
                for sign in [DeltaSign::SpMinusMoodys, DeltaSign::MoodysMinusSp] {
                    let m = compute_measures(&p, sign);
                    pairs_seen += 1;
                    if m.fds as i64 != m.delta.abs() || m.split != (m.delta != 0) as u8 {
                        violations += 1;
                    }
                }
            }
        }
    }

    // A binary probit with known coefficients.
    let truth = OrderedProbitModel::new(vec![0.8, -0.5, 0.3], vec![0.4]).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let n = 5000;
    let x: Vec<f64> = (0..n)
        .flat_map(|_| [normal(&mut rng), (rng.random::<f64>() < 0.4) as u8 as f64, 2.0 * normal(&mut rng) + 1.0])
        .collect();
    let y = generate_ratings(&x, 3, &truth, 9).map_err(|e| e.to_string())?;
    let data = OrdinalData::new(x, 3, y, 2).unwrap();
    let (m, diag) = fit_binary_probit(&data, &FitOptions::default()).map_err(|e| e.to_string())?;
    let est: Vec<f64> = m.beta().iter().chain(m.thresholds()).copied().collect();
    let tru: Vec<f64> = truth.beta().iter().chain(truth.thresholds()).copied().collect();
    let direct_ok = est.iter().zip(&tru).zip(&diag.se).all(|((e, t), s)| (e - t).abs() <= 3.0 * s);

    // The split model of the generated two-agency panel.
    let config = GeneratorConfig::default();
    let panel = generate_dataset(&config).map_err(|e| e.to_string())?;
    let pairs = pair(&panel, ScaleKind::Gradations18, &config.split.spec);
    let fits =
        fit_disagreement_models(&pairs, config.split.spec.len(), DeltaSign::SpMinusMoodys, &FitOptions::default());
    let (sm, sd) = fits.split.map_err(|e| e.to_string())?;
    let panel_est: Vec<f64> = sm.beta().iter().chain(sm.thresholds()).copied().collect();
    let panel_truth: Vec<f64> = config.split.beta.iter().copied().chain([config.split.threshold]).collect();
    let panel_ok = panel_est.iter().zip(&panel_truth).zip(&sd.se).all(|((e, t), s)| (e - t).abs() <= 3.0 * s);
    check(
        violations == 0 && direct_ok && panel_ok,
        format!(
            "{violations} identity violations in {pairs_seen} measures; binary probit {est:.3?} vs {tru:?}; panel split {panel_est:.3?} vs {panel_truth:?}"
        ),
    )
}

fn predictions_are_monotone() -> Outcome {
    let model = OrderedProbitModel::new(REFERENCE_BASE_SP.to_vec(), CLASS_THRESHOLDS.to_vec()).unwrap();
    // Ratios at their reference means; manufacturing issuer (all industry
    // dummies 0) in a developed country with inflation 2.5 and growth 2.3.
    let mut base = vec![4.16, 8.14, 18.64, 34.31, 2.03, 1.29, 0.0, 0.0, 0.0, 0.0, 0.0, 2.5, 2.3, 1.0];
    let sweep = |base: &mut Vec<f64>, j: usize, lo: f64, hi: f64| -> Vec<u32> {
        let keep = base[j];
        let out = (0..=1000)
            .map(|s| {
                base[j] = lo + (hi - lo) * s as f64 / 1000.0;
                model.predict_class(base).unwrap()
            })
            .collect();
        base[j] = keep;
        out
    };
    let cap = sweep(&mut base, 0, 2.33, 5.67);
    let roa = sweep(&mut base, 1, -12.82, 40.56);
    let ltd = sweep(&mut base, 3, 0.01, 149.16);
    let non_increasing = |v: &[u32]| v.windows(2).all(|w| w[1] <= w[0]);
    let range = |v: &[u32]| format!("{}..{}", v.first().unwrap(), v.last().unwrap());
    check(
        non_increasing(&cap) && non_increasing(&roa) && ltd.windows(2).all(|w| w[1] >= w[0]),
        format!("capitalization {}, ROA {}, LT debt/capital {}", range(&cap), range(&roa), range(&ltd)),
    )
}

fn pipeline(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let steps: [&[&str]; 4] = [
        &["synth", "--n", "5000", "--seed", "2024", "--out", "d.csv"],
        &["fit", "--data", "d.csv", "--spec", "base_sp", "--scale", "classes8", "--agency", "sp", "--out", "m.json"],
        &["predict", "--model", "m.json", "--data", "d.csv", "--out", "p.csv"],
        &["eval", "--model", "m.json", "--data", "d.csv", "--out", "e.json", "--histogram", "h.csv"],
    ];
    for args in steps {
        let o = Command::new(env!("CARGO_BIN_EXE_ratingprobit"))
            .current_dir(dir)
            .args(args)
            .output()
            .map_err(|e| e.to_string())?;
        if !o.status.success() {
            return Err(format!("{} failed: {}", args[0], String::from_utf8_lossy(&o.stderr)));
        }
    }
    ["d.csv", "d.json", "m.json", "p.csv", "e.json", "h.csv"]
        .iter()
        .map(|f| fs::read(dir.join(f)).map(|b| (f.to_string(), b)).map_err(|e| e.to_string()))
        .collect()
}

fn pipeline_is_deterministic() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let start = Instant::now();
    let first = pipeline(a.path())?;
    let once = start.elapsed();
    let second = pipeline(b.path())?;
    let differing: Vec<&str> =
        first.iter().zip(&second).filter(|(x, y)| x.1 != y.1).map(|(x, _)| x.0.as_str()).collect();
    check(
        differing.is_empty() && once < Duration::from_secs(60),
        format!("{} artifacts compared, differing {differing:?}; one run {once:.2?}", first.len()),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("gradient vs finite differences", gradient_matches_finite_differences),
        ("probability normalization", probabilities_normalize),
        ("parameter recovery", parameters_are_recovered),
        ("null model identity", null_model_identity),
        ("location and scale invariance", location_and_scale_invariance),
        ("summary moment reproduction", generator_reproduces_moments),
        ("scale codecs", scale_codecs),
        ("evaluation recount", evaluation_matches_recount),
        ("comparison identities", comparison_identities_and_split_recovery),
        ("monotone prediction", predictions_are_monotone),
        ("pipeline determinism", pipeline_is_deterministic),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag}: {name}: {detail}", i + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
