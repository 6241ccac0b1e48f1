use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn model(name: &str) -> String {
    root().join("models").join(name).display().to_string()
}

fn gga(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gga")).args(args).output().expect("gga runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("gga-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn analyze_matches_golden_reports() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut seen = 0;
    for e in std::fs::read_dir(root().join("models")).unwrap() {
        let path = e.unwrap().path();
        if path.extension().is_none_or(|x| x != "gga") {
            continue;
        }
        let stem = path.file_stem().unwrap().to_str().unwrap().to_string();
        let out = gga(&["analyze", path.to_str().unwrap()]);
        assert!(matches!(out.status.code(), Some(0 | 2)), "{stem}: {}", stderr(&out));
        let want = golden.join(format!("{stem}.json"));
        if update {
            std::fs::write(&want, stdout(&out)).unwrap();
        }
        let expected = std::fs::read_to_string(&want).unwrap_or_else(|_| panic!("missing golden {}", want.display()));
        assert_eq!(stdout(&out), expected, "{stem}");
        seen += 1;
    }
    assert!(seen >= 10);
}

#[test]
fn class_fields_keep_their_order() {
    let out = gga(&["analyze", &model("chi2.gga")]);
    assert!(stdout(&out).contains(r#""class":{"kind":"gengamma","nu":1.0,"sigma":0.5,"rho":1.0}"#));
}

#[test]
fn exit_codes() {
    assert_eq!(gga(&["analyze", &model("cauchy.gga")]).status.code(), Some(0));
    let sgd = gga(&["analyze", &model("sgd.gga")]);
    assert_eq!(sgd.status.code(), Some(2));
    assert!(stderr(&sgd).contains("warning: `b20`: dependence_assumed"));
    assert_eq!(gga(&["analyze", "/definitely/not/here.gga"]).status.code(), Some(1));
    assert_eq!(gga(&["repr", &model("cauchy.gga"), "--var", "nope"]).status.code(), Some(1));
    assert_eq!(gga(&["verify", &model("cauchy.gga"), "--seed", "1", "--tail-fraction", "0.7"]).status.code(), Some(1));
}

#[test]
fn diagnostics_point_at_the_source() {
    let bad = scratch("undefined.gga", "model m {\nx ~ Normal(0,1)\ny = x + zz\nquery y\n}\n");
    let out = gga(&["analyze", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.starts_with("error: undefined variable `zz`\n"), "{err}");
    assert!(err.contains(&format!("--> {bad}:3:9")), "{err}");
    assert!(err.contains("3 | y = x + zz\n  |         ^"), "{err}");
    assert!(stdout(&out).is_empty());

    let json = gga(&["analyze", &bad, "--error-json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(v["error"]["kind"], "lower");
    assert_eq!(v["error"]["line"], 3);
    assert_eq!(v["error"]["col"], 9);

    let syntax = scratch("syntax.gga", "model m {\nx ~ Normal(0,1\n}\n");
    let v: serde_json::Value = serde_json::from_str(&stdout(&gga(&["analyze", &syntax, "--error-json"]))).unwrap();
    assert_eq!(v["error"]["kind"], "parse");
    assert_eq!(v["error"]["line"], 3);
}

#[test]
fn representative_of_a_ratio_of_normals_is_cauchy() {
    let out = gga(&["repr", &model("cauchy.gga"), "--var", "t"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "{\"student_t\":{\"df\":1.0}}\n");
    let all: serde_json::Value = serde_json::from_str(&stdout(&gga(&["repr", &model("lognormal.gga")]))).unwrap();
    assert_eq!(all["nodes"].as_array().unwrap().len(), 3);
}

#[test]
fn posterior_of_the_noise_variance() {
    let out = gga(&["posterior", &model("blr.gga"), "--param", "s2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let c = &v["entry"]["class"];
    assert_eq!(c["kind"], "gengamma");
    assert_eq!(c["nu"], -6.0);
    assert_eq!(c["rho"], -1.0);
    assert_eq!(v["terms"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_cauchy_ratio() {
    let out = gga(&["verify", &model("cauchy.gga"), "--seed", "7", "--samples", "1000000"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["nodes"][0]["verdict"], "consistent");
    let a = v["nodes"][0]["estimate"]["alpha_hat"].as_f64().unwrap();
    assert!((a - 2.0).abs() < 0.3, "{a}");
}

#[test]
fn verify_accepts_a_saved_report() {
    let dir = std::env::temp_dir().join(format!("gga-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let saved = dir.join("studentt.json");
    assert_eq!(gga(&["analyze", &model("studentt.gga"), "--out", saved.to_str().unwrap()]).status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&saved).unwrap()).unwrap();
    let args = ["verify", &model("studentt.gga"), "--seed", "3", "--samples", "200000"];
    let direct: serde_json::Value = serde_json::from_str(&stdout(&gga(&args))).unwrap();
    let mut with_report = args.to_vec();
    with_report.extend(["--report", saved.to_str().unwrap()]);
    let via: serde_json::Value = serde_json::from_str(&stdout(&gga(&with_report))).unwrap();
    assert_eq!(direct, via);
    let t = &via["nodes"][0];
    let id = t["id"].as_u64().unwrap();
    let entry = report["nodes"].as_array().unwrap().iter().find(|n| n["id"].as_u64() == Some(id)).unwrap();
    assert_eq!(t["predicted"], entry["class"]);
}

#[test]
fn verify_csv_lists_tail_density() {
    let out = gga(&["verify", &model("cauchy.gga"), "--seed", "2", "--samples", "200000", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let s = stdout(&out);
    let mut lines = s.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("node,x,log_density"));
    let rows: Vec<_> = lines.collect();
    assert!(rows.len() >= 30);
    assert!(rows.iter().all(|r| r.starts_with("t,") && r.split(',').count() == 3));
}

#[test]
fn sampling_is_seeded() {
    let a = gga(&["sample", &model("ig.gga"), "--seed", "5", "--samples", "1000"]);
    let b = gga(&["sample", &model("ig.gga"), "--seed", "5", "--samples", "1000"]);
    let c = gga(&["sample", &model("ig.gga"), "--seed", "6", "--samples", "1000"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let s = stdout(&a);
    let values: Vec<f64> = s.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.parse().unwrap()).collect();
    assert_eq!(values.len(), 1000);
    assert!(values.iter().all(|&v| v > 0.0));
    assert_eq!(gga(&["sample", &model("lognormal.gga"), "--seed", "1"]).status.code(), Some(1));
}

#[test]
fn bundled_sgd_model_is_the_generated_program() {
    let text = std::fs::read_to_string(model("sgd.gga")).unwrap();
    assert_eq!(text, gga_verify::sgd_program(2.0, 0.5, 20));
}
