use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hcl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcl"))
        .args(args)
        .env_remove("HCL_OUTPUT_DIR")
        .output()
        .expect("run hcl")
}

fn files(dir: &Path, ext: &str) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(ext))
        .collect();
    names.sort();
    names
}

#[test]
fn run_writes_one_trace_per_policy_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let res = hcl(&[
        "run",
        "--set",
        "horizon=100",
        "--set",
        "instances=1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    assert_eq!(files(&out, ".csv").len(), 7);
    assert_eq!(files(&out, ".json"), vec!["summary.json"]);
    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["horizon"], 100);
    assert_eq!(summary["runs"][0]["policies"].as_array().unwrap().len(), 7);
    let csv = fs::read_to_string(out.join("rho0.7_hcl_i000.csv")).unwrap();
    assert_eq!(csv.lines().count(), 101);
    assert!(
        csv.starts_with("t,phase,W_t,m_t,perf_sum,theta_sum,oracle_theta_sum,comm,assessments\n")
    );
    // no temporary files left behind
    assert!(files(&out, ".tmp").is_empty());
}

#[test]
fn spec_file_flags_and_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("exp.cfg");
    fs::write(&spec, "# small grid\nhorizon = 50\nworkers = 10\npolicies = hcl, random\nrhos = 0.3, 1.0\nseed = 9\n").unwrap();
    let from_env = dir.path().join("env_out");
    let res = Command::new(env!("CARGO_BIN_EXE_hcl"))
        .args(["run", spec.to_str().unwrap(), "--set", "instances=2"])
        .env("HCL_OUTPUT_DIR", &from_env)
        .output()
        .unwrap();
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    assert_eq!(files(&from_env, ".csv").len(), 2 * 2 * 2);

    let flagged = dir.path().join("flag_out");
    let res = hcl(&[
        "run",
        spec.to_str().unwrap(),
        "--set",
        "instances=2",
        "--out",
        flagged.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    for name in files(&from_env, "") {
        assert_eq!(
            fs::read(from_env.join(&name)).unwrap(),
            fs::read(flagged.join(&name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = hcl(&["run", "--set", "policies=hcl,greedy", "--out", out]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("greedy"));
    let res = hcl(&["run", "--set", "rho=1.5", "--out", out]);
    assert!(!res.status.success());
    let res = hcl(&[
        "run",
        "--set",
        "source=checkin",
        "--set",
        "checkin_path=/nonexistent/x.txt",
        "--out",
        out,
    ]);
    assert!(!res.status.success());
    let res = hcl(&["run", "--set", "horizon=10"]);
    assert!(!res.status.success(), "missing output directory must fail");
    let res = hcl(&["run", "/nonexistent/spec.cfg", "--out", out]);
    assert!(!res.status.success());
    let res = hcl(&["bounds", "--alpha", "2"]);
    assert!(!res.status.success());
}

#[test]
fn bounds_table() {
    let res = hcl(&["bounds", "--horizon", "1", "--workers", "1", "--dims", "3"]);
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split_whitespace().collect();
    assert_eq!(row[0], "1");
    assert_eq!(row[2].parse::<f64>().unwrap(), 8.0);
    assert_eq!(row[4].parse::<f64>().unwrap(), 16.0);

    let res = hcl(&["bounds", "--sweep", "--horizon", "1000000"]);
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 6);
    for col in 0..5 {
        assert!(
            rows.windows(2).all(|w| w[1][col] >= w[0][col]),
            "column {col}"
        );
        assert!(rows.iter().all(|r| r[col].is_finite() && r[col] > 0.0));
    }
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let spec = hcl_core::experiment::ExperimentSpec::load(&path).unwrap();
        assert!(spec.instances >= 1, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 4);
}
