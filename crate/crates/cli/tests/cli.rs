use lawk::{run, EXIT_ASSERTION, EXIT_OK, EXIT_USAGE};
use serde_json::{json, Value};

fn go(args: &[&str]) -> (i32, String) {
    let mut v = vec!["lawk"];
    v.extend_from_slice(args);
    let out = run(v);
    (out.code, out.stdout)
}

fn json_of(args: &[&str]) -> (i32, Value) {
    let (code, out) = go(args);
    (code, serde_json::from_str(&out).expect("json output"))
}

#[test]
fn k0_cantor_value_at_top_level() {
    let (code, v) = json_of(&["k0", "--theory", "cantor:5"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["tool"], "lawk");
    assert_eq!(v["value"], json!({"free_rank": 0, "invariant_factors": [4]}));
    assert_eq!(v["config"]["command"], "k0");
    assert_eq!(v["config"]["theory"], "cantor:5");
}

#[test]
fn bad_theory_is_usage_error() {
    let (code, v) = json_of(&["validate", "--theory", "post:1"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(v["error"]["kind"].is_string());
    let (code, v) = json_of(&["k1", "--theory", "nonsense"]);
    assert_eq!(code, EXIT_USAGE);
    assert_eq!(v["error"]["kind"], "ParseError");
}

#[test]
fn clap_errors_exit_two() {
    assert_eq!(go(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(go(&["k0", "--max-rank", "x"]).0, EXIT_USAGE);
    assert_eq!(go(&["k1", "--theory", "sets", "--window", "0"]).0, EXIT_USAGE);
}

#[test]
fn validate_passes() {
    let (code, _) = go(&["validate", "--theory", "post:2", "--max-rank", "2"]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn k1_outputs() {
    let (code, v) = json_of(&["k1", "--theory", "post:3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["value"], json!({"free_rank": 0, "invariant_factors": [2]}));
    let (code, tsv) = go(&["k1", "--theory", "gsets:c3", "--max-rank", "5", "--emit", "tsv"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = tsv.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[0].contains("rank") && lines[0].contains('\t'));
    assert!(lines[6].contains("Z/6"), "{tsv}");
    let (code, text) = go(&["h1", "--theory", "sets", "--max-rank", "5", "--emit", "text"]);
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("Z/2"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["k1", "--theory", "mod:3", "--max-rank", "3"][..],
        &["audit", "--kind", "whitehead", "--theory", "post:2", "--seed", "7", "--samples", "20", "--pairs", "5"],
        &["fingerprint", "--theory", "post:2", "--max-rank", "2"],
    ] {
        let a = go(args);
        let b = go(args);
        assert_eq!(a.0, EXIT_OK, "{args:?}");
        assert_eq!(a.1, b.1, "{args:?}");
    }
}

#[test]
fn audits_run() {
    for kind in ["stabilization", "perfectness", "whitehead", "matrix"] {
        let (code, _) = go(&["audit", "--kind", kind, "--theory", "sets", "--max-rank", "8"]);
        assert_eq!(code, EXIT_OK, "{kind}");
    }
    let (code, _) = go(&["audit", "--kind", "matrix", "--theory", "sets", "--max-rank", "4"]);
    assert_eq!(code, EXIT_ASSERTION);
    let (code, _) = go(&["morava", "--p", "3"]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn out_writes_file() {
    let dir = std::env::temp_dir().join(format!("lawk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("k0.json");
    let p = path.to_str().unwrap();
    let (code, stdout) = go(&["k0", "--theory", "sets", "--out", p]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["value"], json!({"free_rank": 1, "invariant_factors": []}));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn demo_variants() {
    let (code, v) = json_of(&["demo"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["status"], "morita-failure-exhibited");

    let (code, v) = json_of(&["demo", "--compare", "post:4"]);
    assert_eq!(code, EXIT_ASSERTION);
    assert_eq!(v["status"], "stage-failed");

    let dir = std::env::temp_dir().join(format!("lawk-demo-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("id.json");
    std::fs::write(&path, r#"{"theory":"matrix:2(post:2)","src":1,"dst":1,"data":[0,1,2,3]}"#).unwrap();
    let (code, v) = json_of(&["demo", "--idempotent", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{v}");
    assert_eq!(v["status"], "no-discrepancy");
    std::fs::remove_dir_all(dir).ok();
}
