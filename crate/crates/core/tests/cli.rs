use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_warped-forms"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_upper_passes_and_is_deterministic() {
    let args = [
        "verify-upper",
        "--m",
        "3",
        "--p",
        "1",
        "--k",
        "1",
        "--L",
        "5:80:2",
        "--grid",
        "256",
    ];
    let a = run(&args);
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stderr)
    );
    let b = run(&args);
    assert_eq!(stdout(&a), stdout(&b));
    let text = stdout(&a);
    assert!(text.starts_with("command,params,quantity,value,provenance\n"));
    assert_eq!(text.matches("normalized_upper").count(), 5);
    assert!(text.contains("numeric(N=256"));
}

#[test]
fn degree_outside_range_exits_2() {
    for cmd in ["verify-upper", "verify-lower", "spectrum"] {
        let o = run(&[
            cmd, "--m", "3", "--p", "3", "--q", "1", "--k", "1", "--L", "10",
        ]);
        assert_eq!(o.status.code(), Some(2), "{cmd}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    }
}

#[test]
fn malformed_input_exits_2() {
    assert_eq!(
        run(&[
            "verify-upper",
            "--m",
            "3",
            "--p",
            "1",
            "--k",
            "1",
            "--L",
            "5:1:2"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(&["glue", "--m", "3", "--eps", "0,0.1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["glue", "--m", "3", "--eps", "0.1", "--summands", "5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["verify-upper", "--m", "3", "--p", "1"]).status.code(),
        Some(2)
    );
    // Flag parsing errors come from clap with the same code.
    assert_eq!(
        run(&["verify-upper", "--m", "three"]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_lower_json_is_structured() {
    let o = run(&[
        "verify-lower",
        "--m",
        "3",
        "--p",
        "1",
        "--q",
        "1",
        "--L",
        "10,20,40,80",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["n_q"], 2);
    assert_eq!(v["fit"]["kind"], "decaying");
    assert_eq!(v["per_length"].as_array().unwrap().len(), 4);
}

#[test]
fn caps_file_overrides_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let caps = dir.path().join("caps.json");
    std::fs::write(
        &caps,
        r#"{"nu_u1": 50.0, "nu_u3": 50.0, "nu_u12": 50.0, "nu_u23": 50.0}"#,
    )
    .unwrap();
    let base = [
        "verify-lower",
        "--m",
        "8",
        "--p",
        "2",
        "--q",
        "4",
        "--L",
        "10,20",
        "--format",
        "json",
    ];
    let plain: serde_json::Value = serde_json::from_slice(&run(&base).stdout).unwrap();
    let mut args = base.to_vec();
    args.extend(["--caps-file", caps.to_str().unwrap()]);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    let over: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_ne!(plain["fit"]["c"], over["fit"]["c"]);
}

#[test]
fn out_file_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    let out = dir.path().join("glue.csv");
    std::fs::write(&config, r#"{"m": 2, "eps": [0.01, 0.0001], "eta": 0.2}"#).unwrap();
    let o = run(&[
        "glue",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.matches("cutoff_energy").count(), 2);
    assert!(text.contains("eta=0.2"));

    std::fs::write(&config, r#"{"m": 2, "epsilon": [0.01]}"#).unwrap();
    assert_eq!(
        run(&["glue", "--config", config.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn spectrum_and_profile_formats() {
    let o = run(&[
        "spectrum",
        "--m",
        "3",
        "--p",
        "1",
        "--kind",
        "sphere-hodge",
        "--count",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<_> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("3,"), "{}", lines[1]);

    let o = run(&[
        "spectrum", "--m", "3", "--p", "1", "--L", "6", "--count", "5", "--grid", "128",
        "--format", "json",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["entries"].as_array().unwrap().len(), 5);

    let o = run(&["profile", "--points", "11", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["profile"]["grid"].as_array().unwrap().len(), 11);
    assert!(v.get("metric").is_none());
}
