use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ratingprobit::artifact::{to_json, ModelArtifact};
use ratingprobit::dataset::write_dataset;
use ratingprobit_core::design::build_design_matrix;
use ratingprobit_core::model_spec::preset;
use ratingprobit_core::oprobit::{fit, FitOptions};
use ratingprobit_core::scales::{Agency, RatingGrade, ScaleKind};
use ratingprobit_core::synth::{generate_dataset, GeneratorConfig};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ratingprobit"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn synth_csv(dir: &Path, n: usize, seed: u64) -> PathBuf {
    let path = dir.join("d.csv");
    let o = run(dir, &["synth", "--n", &n.to_string(), "--seed", &seed.to_string(), "--out", "d.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    path
}

#[test]
fn help_exits_zero_without_touching_files() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["", "scales", "stats", "synth", "fit", "predict", "eval", "compare"] {
        let mut args: Vec<&str> = sub.split_whitespace().collect();
        args.push("--help");
        let o = run(dir.path(), &args);
        assert_eq!(o.status.code(), Some(0), "{sub} --help");
        assert!(String::from_utf8_lossy(&o.stdout).contains("Usage"), "{sub}");
    }
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["synth", "--out", "x.csv"]).status.code(), Some(2), "seed is required");
    assert_eq!(run(dir.path(), &["scales", "--scale", "classes9"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["fit", "--data", "missing.csv", "--spec", "base_sp"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["frobnicate"]).status.code(), Some(2));
}

#[test]
fn unknown_regressor_is_named() {
    let dir = tempfile::tempdir().unwrap();
    synth_csv(dir.path(), 200, 1);
    fs::write(dir.path().join("bad.spec"), "roa\n# comment\nleverage_squared\n").unwrap();
    let o = run(dir.path(), &["fit", "--data", "d.csv", "--spec", "bad.spec"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("leverage_squared"), "{}", stderr(&o));
}

#[test]
fn fit_writes_schema_and_eval_checks_scale() {
    let dir = tempfile::tempdir().unwrap();
    synth_csv(dir.path(), 3000, 2);
    fs::write(dir.path().join("base_sp.spec"), preset("base_sp").unwrap().to_text()).unwrap();
    let o = run(
        dir.path(),
        &[
            "fit",
            "--data",
            "d.csv",
            "--spec",
            "base_sp.spec",
            "--scale",
            "classes8",
            "--agency",
            "sp",
            "--out",
            "m.json",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let m: Value = serde_json::from_slice(&fs::read(dir.path().join("m.json")).unwrap()).unwrap();
    let keys: Vec<&str> = m.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["agency", "beta", "columns", "diagnostics", "scale_kind", "thresholds"]);
    assert_eq!(m["scale_kind"], "classes8");
    assert_eq!(m["agency"], "sp");
    assert_eq!(m["beta"].as_array().unwrap().len(), 14);
    assert_eq!(m["thresholds"].as_array().unwrap().len(), 7);
    assert_eq!(m["columns"][0]["name"], "mkt_cap");
    assert_eq!(m["columns"][0]["transform"], "log10");
    let d = &m["diagnostics"];
    for key in ["loglik", "loglik_null", "pseudo_r2_mcfadden", "se", "z", "stars", "n_obs", "iterations", "converged"] {
        assert!(!d[key].is_null(), "{key}");
    }
    assert_eq!(d["se"].as_array().unwrap().len(), 21);
    assert_eq!(d["n_obs"], 3000);
    assert_eq!(d["converged"], true);

    let o = run(dir.path(), &["eval", "--model", "m.json", "--data", "d.csv", "--scale", "gradations18"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("scale"));

    let o = run(
        dir.path(),
        &[
            "eval",
            "--model",
            "m.json",
            "--data",
            "d.csv",
            "--scale",
            "classes8",
            "--out",
            "e.json",
            "--histogram",
            "h.csv",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let e: Value = serde_json::from_slice(&fs::read(dir.path().join("e.json")).unwrap()).unwrap();
    assert_eq!(e["n"], 3000);
    let h = fs::read_to_string(dir.path().join("h.csv")).unwrap();
    assert!(h.starts_with("delta,count\n"));
    let total: usize = h.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, 3000);
    assert!(stderr(&o).contains('%'));
}

#[test]
fn saved_model_predicts_like_the_fitted_one() {
    let data = generate_dataset(&GeneratorConfig { n: 2000, seed: 5, ..Default::default() }).unwrap();
    let spec = preset("base_sp").unwrap();
    let (design, _) = build_design_matrix(&data, &spec, ScaleKind::Classes8, Agency::SP).unwrap();
    let (model, diag) = fit(&design.data, &FitOptions::default()).unwrap();
    let artifact = ModelArtifact::from_design(&design, &model, &diag);
    let bytes = to_json(&artifact).unwrap();
    let back: ModelArtifact = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(back, artifact);
    let loaded = back.into_model().unwrap();
    assert_eq!(loaded.model, model);
    assert_eq!(loaded.spec, spec);
    let in_memory: Vec<u32> =
        (0..design.data.n_rows()).map(|i| model.predict_class(design.data.row(i)).unwrap()).collect();

    let dir = tempfile::tempdir().unwrap();
    write_dataset(fs::File::create(dir.path().join("d.csv")).unwrap(), &data).unwrap();
    fs::write(dir.path().join("m.json"), &bytes).unwrap();
    let o = run(dir.path(), &["predict", "--model", "m.json", "--data", "d.csv", "--out", "p.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("p.csv")).unwrap();
    let from_cli: Vec<u32> = text.lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(from_cli, in_memory);
}

#[test]
fn separated_data_exits_three() {
    let mut data = generate_dataset(&GeneratorConfig { n: 400, seed: 3, ..Default::default() }).unwrap();
    let roa = |o: &ratingprobit_core::data::Observation| {
        let f = &o.financials;
        use ratingprobit_core::data::RawField::*;
        f.get(NetEarnings).unwrap() / f.get(AvgAssets).unwrap()
    };
    data.sort_by(|a, b| roa(b).total_cmp(&roa(a)));
    let letters = ["AAA", "AA", "A", "BBB", "BB", "B", "CCC", "CC"];
    let per = data.len() / letters.len();
    for (i, obs) in data.iter_mut().enumerate() {
        obs.sp_rating = Some(RatingGrade::parse(Agency::SP, letters[(i / per).min(7)]).unwrap());
    }
    let dir = tempfile::tempdir().unwrap();
    write_dataset(fs::File::create(dir.path().join("d.csv")).unwrap(), &data).unwrap();
    fs::write(dir.path().join("roa.spec"), "roa\n").unwrap();
    let o = run(dir.path(), &["fit", "--data", "d.csv", "--spec", "roa.spec"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn header_only_dataset() {
    let dir = tempfile::tempdir().unwrap();
    write_dataset(fs::File::create(dir.path().join("d.csv")).unwrap(), &[]).unwrap();
    let o = run(dir.path(), &["fit", "--data", "d.csv", "--spec", "base_sp", "--out", "m.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no data rows"), "{}", stderr(&o));
    assert!(!dir.path().join("m.json").exists());
}

#[test]
fn bad_rows_are_reported_and_capped() {
    let dir = tempfile::tempdir().unwrap();
    let path = synth_csv(dir.path(), 50, 4);
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    lines[3] = lines[3].replacen("2009-12-31", "2009-13-31", 1);
    lines[7] = lines[7].replacen("2009-12-31", "yesterday", 1);
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    let o = run(dir.path(), &["stats", "--data", "d.csv", "--out", "s.json"]);
    assert_eq!(o.status.code(), Some(0));
    let err = stderr(&o);
    assert!(err.contains("row 3") && err.contains("row 7"), "{err}");
    let s: Value = serde_json::from_slice(&fs::read(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(s["n_rows"], 48);
    let o = run(dir.path(), &["stats", "--data", "d.csv", "--max-row-errors", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compare_writes_all_outputs_and_honours_sign() {
    let dir = tempfile::tempdir().unwrap();
    synth_csv(dir.path(), 3000, 6);
    let o = run(dir.path(), &["compare", "--data", "d.csv", "--out", "a"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(dir.path(), &["compare", "--data", "d.csv", "--out", "b", "--delta-sign", "moodys-minus-sp"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["measures.csv", "summary.json", "histogram.csv", "model_delta.json", "model_fds.json", "model_split.json"]
    {
        assert!(dir.path().join("a").join(f).exists(), "{f}");
    }
    let read = |d: &str| -> Vec<(i64, u32, u8)> {
        fs::read_to_string(dir.path().join(d).join("measures.csv"))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| {
                let v: Vec<&str> = l.split(',').collect();
                (v[1].parse().unwrap(), v[2].parse().unwrap(), v[3].parse().unwrap())
            })
            .collect()
    };
    let (a, b) = (read("a"), read("b"));
    assert_eq!(a.len(), 3000);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.0, -y.0);
        assert_eq!((x.1, x.2), (y.1, y.2));
        assert_eq!(x.1 as i64, x.0.abs());
        assert_eq!(x.2, (x.0 != 0) as u8);
    }
    let s: Value = serde_json::from_slice(&fs::read(dir.path().join("a/summary.json")).unwrap()).unwrap();
    let mean = a.iter().map(|m| m.0).sum::<i64>() as f64 / a.len() as f64;
    assert!((s["mean_delta"].as_f64().unwrap() - mean).abs() < 1e-15);
    assert_eq!(s["mean_delta_rounded"], format!("{mean:.2}"));
    assert_eq!(s["models"]["split"]["status"], "ok");
}

#[test]
fn market_measures_from_return_files() {
    let mut data = generate_dataset(&GeneratorConfig { n: 30, seed: 8, ..Default::default() }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let returns = dir.path().join("returns");
    fs::create_dir(&returns).unwrap();
    // The first issuer's market measures come from its return file only.
    data[0].beta = None;
    data[0].volatility = None;
    let series: String = (0..24)
        .map(|t| {
            let rm = if t % 2 == 0 { 0.01 } else { -0.01 };
            format!("2008-{:02}-01,{},{}\n", t % 12 + 1, 2.0 * rm, rm)
        })
        .collect();
    fs::write(returns.join(format!("{}.csv", data[0].company_id)), format!("date,r_i,r_m\n{series}")).unwrap();
    write_dataset(fs::File::create(dir.path().join("d.csv")).unwrap(), &data).unwrap();

    let model = ModelArtifact {
        scale_kind: "classes8".into(),
        agency: "sp".into(),
        columns: vec![ratingprobit::artifact::ColumnEntry { name: "volatility".into(), transform: "identity".into() }],
        beta: vec![1.0],
        thresholds: vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0],
        diagnostics: ratingprobit::artifact::DiagnosticsEntry {
            loglik: 0.0,
            loglik_null: 0.0,
            pseudo_r2_mcfadden: 0.0,
            se: vec![],
            z: vec![],
            stars: vec![],
            n_obs: 0,
            iterations: 0,
            converged: true,
        },
        response: None,
    };
    fs::write(dir.path().join("m.json"), to_json(&model).unwrap()).unwrap();
    let rows = |extra: &[&str]| {
        let mut args = vec!["predict", "--model", "m.json", "--data", "d.csv"];
        args.extend_from_slice(extra);
        let o = run(dir.path(), &args);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        String::from_utf8(o.stdout).unwrap().lines().count() - 1
    };
    assert_eq!(rows(&[]), 29);
    assert_eq!(rows(&["--returns", "returns"]), 30);
}

#[test]
fn scales_lists_every_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["scales"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 8 + 18 + 12);
    assert!(text.contains("gradations18,12,BB,BB\n"));
}
