use std::process::Command;

use nandwalk::harness::cli_main;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli_main(
        std::iter::once("nandwalk").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn body(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn run_reports_verdict_json() {
    let (code, out, _) = call(&["run", "--input", "0110", "--gamma", "16"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["decision"], 0);
    assert_eq!(v["config"]["packet_len"], 32);
    assert_eq!(v["config"]["half_len"], 96);
}

#[test]
fn scatter_rows_all_pass() {
    let (code, out, _) = call(&[
        "scatter", "--input", "11", "--emax", "auto", "--points", "64",
    ]);
    assert_eq!(code, 0);
    let rows = body(&out);
    assert_eq!(
        rows[0],
        "N,instance_id,E,nand,abs_y,abs_T,bound_y,bound_T,pass"
    );
    assert_eq!(rows.len(), 65);
    assert!(rows[1..].iter().all(|r| r.ends_with(",1")));
}

#[test]
fn scatter_outside_window_is_usage_error() {
    assert_eq!(call(&["scatter", "--input", "11", "--emax", "0.5"]).0, 2);
}

#[test]
fn output_files_carry_metadata() {
    let (_, out, _) = call(&["diagnose", "--l", "16", "--eps", "0.3", "--points", "32"]);
    let head: Vec<&str> = out.lines().take(4).collect();
    assert!(head[0].starts_with("# nandwalk "));
    assert!(
        head[1].starts_with("# config_hash: ") && head[1].len() == "# config_hash: ".len() + 64
    );
    assert!(head[2].starts_with("# config: {"));
    assert_eq!(head[3], "# columns: L,eps,quantity,value,bound,pass");
}

#[test]
fn flags_override_config_file() {
    let dir = std::env::temp_dir().join(format!("nandwalk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("config.json");
    std::fs::write(
        &path,
        r#"{"seed": 5, "instances": 2, "leaves": [4], "gammas": [8.0]}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let (code, out, _) = call(&["sweep", "--config", p, "--seed", "7"]);
    assert_eq!(code, 0);
    let config_line = out.lines().nth(2).unwrap();
    assert!(config_line.contains("\"seed\":7") && config_line.contains("\"instances\":2"));
    assert_eq!(body(&out).len(), 3);

    std::fs::write(&path, r#"{"gammas": []}"#).unwrap();
    assert_eq!(call(&["sweep", "--config", p]).0, 2);
    std::fs::write(&path, r#"{"gamma": [4.0]}"#).unwrap();
    assert_eq!(call(&["sweep", "--config", p]).0, 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn embed_parity_checks() {
    let (code, out, _) = call(&["embed-parity", "--k", "2,4"]);
    assert_eq!(code, 0);
    assert!(out.contains("k=4 leaves=16 assignments=16 mismatches=0"));
    let (code, out, _) = call(&["embed-parity", "--bits", "1011"]);
    assert_eq!(code, 0);
    assert!(out.contains("value 0 expected 0"));
    assert_eq!(call(&["embed-parity", "--bits", "101"]).0, 2);
}

#[test]
fn sweep_is_byte_identical_across_worker_counts() {
    let run = |workers: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_nandwalk"))
            .args([
                "sweep",
                "--n",
                "4,16",
                "--instances",
                "3",
                "--gamma",
                "4,8",
                "--seed",
                "42",
            ])
            .env("NANDWALK_WORKERS", workers)
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    assert_eq!(one, run("1"));
    assert_eq!(
        body(std::str::from_utf8(&one).unwrap()).len(),
        1 + 2 * 3 * 2
    );
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_nandwalk");
    let out = Command::new(bin)
        .args(["eval", "--input", "0110"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout, b"0\n");
    let out = Command::new(bin)
        .args(["eval", "--input", "01x0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn sweep_error_rate_does_not_grow_with_gamma() {
    let mut config = nandwalk::harness::ExperimentConfig::defaults("sweep");
    config.leaves = vec![16];
    config.instances = 16;
    config.gammas = vec![4.0, 16.0, 64.0];
    let outcome = nandwalk::harness::sweep(&config).unwrap();
    assert_eq!(outcome.rows.len(), 48);
    let rates: Vec<f64> = outcome
        .summary
        .per_gamma
        .iter()
        .map(|s| s.error_rate)
        .collect();
    assert!(rates.windows(2).all(|w| w[1] <= w[0]), "{rates:?}");
    let devs: Vec<f64> = outcome
        .summary
        .per_gamma
        .iter()
        .map(|s| s.mean_abs_dev)
        .collect();
    assert!(devs.windows(2).all(|w| w[1] < w[0]), "{devs:?}");
    assert!(outcome.summary.alpha.unwrap() > 0.0);
}
