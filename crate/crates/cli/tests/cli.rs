use catchup_cli::config::Scenario;
use catchup_cli::plot::{render, series_from_csv, Style};
use catchup_cli::run::{run, verify, Status};
use catchup_cli::catalog;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_catchup"))
}

const HEADER: &str = r#"
schema_version = 1
name = "probe"
seed = 3
[problem]
r = 1.0
family = { kind = "fixed", set = { kind = "ball_complement", center = [0.0, 0.0], radius = 1.0, interior = { rho = 0.1, big_r = 3.0 } } }
"#;

fn scenario(extra: &str) -> Scenario {
    Scenario::parse(&format!("{HEADER}{extra}")).unwrap()
}

#[test]
fn verify_rejects_large_jumps() {
    let s = scenario(
        "x0 = [1.0, 0.0]\nu = { kind = \"steps\", times = [0.0, 0.5, 1.0], values = [[0.0, 0.0], [-0.5, 0.0], [-0.9, 0.0]] }\n",
    );
    let err = format!("{:#}", verify(&s).unwrap_err());
    assert!(err.contains("jump"), "{err}");

    let ok = scenario(
        "x0 = [1.0, 0.0]\nu = { kind = \"steps\", times = [0.0, 0.5, 1.0], values = [[0.0, 0.0], [-0.1, 0.0], [-0.2, 0.0]] }\n",
    );
    assert!(verify(&ok).is_ok());
}

#[test]
fn verify_rejects_initial_state_outside_the_set() {
    let s = scenario("x0 = [0.5, 0.0]\nu = { kind = \"constant\", value = [0.0, 0.0] }\n");
    assert!(verify(&s).is_err());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, format!("{HEADER}x0 = [0.5, 0.0]\nu = {{ kind = \"constant\", value = [0.0, 0.0] }}\n")).unwrap();
    let out = bin().args(["verify", path.to_str().unwrap()]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn empty_experiment_list_writes_only_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.toml");
    std::fs::write(&path, format!("{HEADER}x0 = [1.0, 0.0]\nu = {{ kind = \"linear\", from = [0.0, 0.0], to = [-0.5, 0.0] }}\n")).unwrap();
    let out_dir = dir.path().join("out");
    let out = bin().args(["run", path.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let names: Vec<String> = std::fs::read_dir(&out_dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert_eq!(names, vec!["report.json"]);
}

#[test]
fn cusp_is_a_passed_negative() {
    let dir = tempfile::tempdir().unwrap();
    let rec = run(&catalog::load("cusp_negative").unwrap(), dir.path()).unwrap();
    let neg = rec.experiments.iter().find(|e| e.kind == "negative_control").unwrap();
    assert_eq!(neg.status, Status::PassedNegative);
    assert!(rec.passed);
}

fn final_variation(csv: &Path) -> (Vec<(f64, f64)>, f64) {
    let series = series_from_csv(csv, "t", &["V"]).unwrap();
    let pts = series[0].points.clone();
    let last = pts.last().unwrap().1;
    (pts, last)
}

#[test]
fn overlay_of_interior_and_cusp_growth() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("osc"), dir.path().join("cusp"));
    let only_solve = |name: &str| {
        let mut s = catalog::load(name).unwrap();
        s.experiments.retain(|e| e.kind() == "solve");
        s.output.formats = vec!["csv".into()];
        s
    };
    run(&only_solve("ball_complement_oscillation"), &a).unwrap();
    run(&only_solve("cusp_negative"), &b).unwrap();
    let (pa, va) = final_variation(&a.join("solve.csv"));
    let (pb, vb) = final_variation(&b.join("solve.csv"));
    assert!(vb > 100.0 * va, "cusp variation {vb} against interior {va}");
    let svg = render(
        "output variation",
        "t",
        "Var xi",
        &[
            catchup_cli::plot::Series { label: "ball complement".into(), points: pa },
            catchup_cli::plot::Series { label: "cusp".into(), points: pb },
        ],
        Style::Line,
    );
    assert_eq!(svg.matches("stroke-width=\"1.2\"").count(), 2);
    std::fs::write(dir.path().join("overlay.svg"), &svg).unwrap();
}

#[test]
fn runs_are_reproducible_and_seed_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let run_cli = |sub: &str, seed: Option<&str>| {
        let out = dir.path().join(sub);
        let mut cmd = bin();
        cmd.args(["run", "two_balls_transfer", "--out-dir", out.to_str().unwrap(), "--format", "csv"]);
        if let Some(s) = seed {
            cmd.args(["--seed", s]);
        }
        let status = cmd.output().unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stdout));
        out
    };
    let (a, b, c) = (run_cli("a", None), run_cli("b", None), run_cli("c", Some("99")));
    let read = |d: &Path, f: &str| std::fs::read(d.join(f)).unwrap();
    for f in ["solve.csv", "refinement.csv", "lint.csv", "report.json"] {
        assert_eq!(read(&a, f), read(&b, f), "{f} differs between identical runs");
    }
    assert!(!a.join("solve_trajectory.svg").exists());
    let report: serde_json::Value = serde_json::from_slice(&read(&c, "report.json")).unwrap();
    assert_eq!(report["seed"], 99);
    assert_ne!(read(&a, "report.json"), read(&c, "report.json"));
}

#[test]
fn catalog_lists_every_scenario() {
    let out = bin().args(["catalog", "list"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for name in catalog::names() {
        assert!(text.contains(name), "{name} missing from\n{text}");
    }
}

#[test]
fn batch_runs_keep_input_order_and_reject_duplicate_names() {
    let dir = tempfile::tempdir().unwrap();
    let scenarios: Vec<Scenario> = ["play1d", "two_balls_transfer"].iter().map(|n| catalog::load(n).unwrap()).collect();
    let recs = catchup_cli::run::run_batch(&scenarios, dir.path()).unwrap();
    assert_eq!(recs.iter().map(|r| r.scenario.as_str()).collect::<Vec<_>>(), vec!["play1d", "two_balls_transfer"]);
    assert!(dir.path().join("play1d/report.json").exists());
    let twice = vec![scenarios[0].clone(), scenarios[0].clone()];
    assert!(catchup_cli::run::run_batch(&twice, dir.path()).is_err());
}
