use std::path::PathBuf;
use std::process::{Command, Output};

fn tk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tk")).args(args).output().expect("spawn tk")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn artifact(o: &Output) -> serde_json::Value {
    let text = stdout(o);
    let start = text.find('{').expect("json artifact");
    serde_json::from_str(&text[start..]).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn op_build_records_formula() {
    let o = tk(&["op", "build", "--family", "conj-shift", "--beta", "0.5,0", "--dim", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dim"], 8);
    assert_eq!(v["provenance"]["formula"], "T_{1+βz}^{-1} T_{z̄} T_{1+βz}");
    assert_eq!(v["data"].as_array().unwrap().len(), 64);
}

#[test]
fn built_operator_loads_back() {
    let path = scratch("zero2.json");
    std::fs::write(&path, r#"{"dim":2,"data":[[0,0],[0,0],[0,0],[0,0]]}"#).unwrap();
    let o = tk(&["kreiss", "--matrix", path.to_str().unwrap(), "--grid", "20x32"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = artifact(&o);
    let k = v["result"]["kreiss"]["value"].as_f64().unwrap();
    assert!((k - 1.0).abs() < 1e-9, "{k}");
}

#[test]
fn invalid_inputs_exit_with_usage_code() {
    for (args, needle) in [
        (vec!["verify", "--theorem", "3.1", "--beta", "1.0,0", "--dim", "8"], "|beta| = 1"),
        (vec!["verify", "--theorem", "3.1", "--beta", "0,0", "--dim", "8"], "|beta| = 0"),
        (vec!["op", "build", "--family", "custom", "--g", "0:0,0;1:1,0", "--dim", "4"], "g(0)"),
    ] {
        let o = tk(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains(needle), "{args:?}");
    }
    assert_eq!(tk(&["sweep"]).status.code(), Some(2));
}

#[test]
fn verify_chain_prints_each_link() {
    let o = tk(&["verify", "--theorem", "3.2", "--beta", "0,0.8", "--dim", "48", "--n-max", "16", "--grid", "12x24"]);
    let text = stdout(&o);
    assert!(matches!(o.status.code(), Some(0 | 3)), "{text}");
    for label in ["P_sigma<=P_ends", "M<=e*P_ends^2", "e*P_ends^2<=2e*P_sigma^2"] {
        assert!(text.contains(label), "{text}");
    }
    assert!(text.lines().filter(|l| l.contains("PASS") || l.contains("ADVISORY") || l.contains("FAIL")).count() >= 3);
}

#[test]
fn stability_csv_has_envelope() {
    let o = tk(&["stability", "--family", "real-part", "--beta", "0.5,0", "--dim", "16", "--steps", "20", "--perturb", "1e-6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines().filter(|l| !l.is_empty());
    let header = lines.find(|l| l.starts_with("n,")).unwrap();
    assert_eq!(header, "n,u_norm,v_norm,envelope");
    assert_eq!(text.lines().filter(|l| l.split(',').count() == 4 && !l.starts_with('n')).count(), 21);
}

#[test]
fn sweep_reports_rows_and_slopes() {
    let o = tk(&["sweep", "--cor", "3.1", "--k-range", "2..6", "--n-max", "16", "--grid", "10x16", "--tail-target", "1e-2", "--max-dim", "512"]);
    let text = stdout(&o);
    assert!(text.contains("beta_re,beta_im,N,n_max,M_hat,M_lo,M_hi,P_hat,P_lo,P_hi,verdict"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("M slope=")), "{text}");
}

#[test]
fn no_timestamp_output_is_reproducible() {
    let args = ["--no-timestamp", "power-bound", "--family", "conj-shift", "--beta", "0.3,0.4", "--dim", "32", "--n-max", "64"];
    let a = tk(&args);
    let mut with_threads = vec!["--threads", "2"];
    with_threads.extend_from_slice(&args);
    let b = tk(&with_threads);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
