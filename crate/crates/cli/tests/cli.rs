use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn cdga(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdga")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut a = args.to_vec();
    a.push("--json");
    let o = cdga(&a);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn bound<'a>(v: &'a serde_json::Value, name: &str) -> &'a serde_json::Value {
    v["body"]["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .find(|b| b["name"] == name)
        .unwrap()
}

fn kinds(b: &serde_json::Value, field: &str) -> Vec<String> {
    b[field]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["kind"].as_str().unwrap().to_string())
        .collect()
}

#[test]
fn tc_of_s3_is_one() {
    let s3 = data("s3.cdga");
    let o = cdga(&["tc", &s3, "--n", "2", "--cap", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("HTC_2 = 1"), "{text}");
    assert!(text.contains("TC_2(X₀) = 1"), "{text}");
    assert!(text.contains("(cap 12)"));
    let v = json(&["tc", &s3, "--n", "2", "--cap", "12"]);
    let htc = bound(&v, "HTC_2");
    assert_eq!(htc["lower"], 1);
    assert_eq!(htc["upper"]["value"], 1);
    assert!(kinds(htc, "lower_certificates").contains(&"nil-witness".to_string()));
    assert!(kinds(htc, "upper_certificates").contains(&"kernel-power-vanishes".to_string()));
}

#[test]
fn cat_of_nonformal_is_three() {
    let v = json(&["cat", &data("nonformal.cdga"), "--cap", "14"]);
    let cat = bound(&v, "cat(X₀)");
    assert_eq!(cat["lower"], 3);
    assert_eq!(cat["upper"]["value"], 3);
    assert_eq!(cat["upper"]["scope"]["scope"], "all-degrees");
    assert!(kinds(cat, "upper_certificates").contains(&"odd-generated".to_string()));
}

#[test]
fn default_cap_is_printed() {
    let o = cdga(&["cat", &data("nonformal.cdga"), "--no-ganea"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("cat(N) (cap 12)"), "{}", stdout(&o));
}

#[test]
fn stanley_certificate_verifies() {
    let o = cdga(&["verify-cert", &data("stanley_retraction.cert"), "--against", &data("stanley.cdga")]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("VALID"));
}

#[test]
fn corrupted_certificate_exits_three() {
    let text = std::fs::read_to_string(data("stanley_retraction.cert")).unwrap();
    let bad = text.replace("\"a^4\"", "\"2*a^4\"");
    let dir = std::env::temp_dir().join(format!("cdga-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.cert");
    std::fs::write(&path, bad).unwrap();
    let o = cdga(&["verify-cert", path.to_str().unwrap(), "--against", &data("stanley.cdga")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("degree"));
}

#[test]
fn invalid_input_exits_two() {
    let dir = std::env::temp_dir().join(format!("cdga-cli-in-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let clash = dir.join("clash.cdga");
    std::fs::write(&clash, "cdga T {\n  gen a : 3;\n  gen x : 5;\n  d x = a;\n}\n").unwrap();
    let o = cdga(&["homology", clash.to_str().unwrap(), "--range", "0..6"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr).into_owned();
    assert!(err.contains("4:3"), "{err}");
    let syntax = dir.join("syntax.cdga");
    std::fs::write(&syntax, "cdga T { gen a 3; }").unwrap();
    let o = cdga(&["homology", syntax.to_str().unwrap(), "--range", "0..6"]);
    assert_eq!(o.status.code(), Some(2));
    let o = cdga(&["homology", &data("nope.cdga"), "--range", "0..6"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn minimal_model_of_s4() {
    let v = json(&["minimal-model", &data("s4.cdga"), "--cap", "10"]);
    let gens = v["body"]["generators"].as_array().unwrap();
    let degrees: Vec<u64> = gens.iter().map(|g| g["degree"].as_u64().unwrap()).collect();
    assert_eq!(degrees, vec![4, 7]);
    assert_eq!(gens[1]["d"], "a^2");
}

#[test]
fn homology_report() {
    let o = cdga(&["homology", &data("nonformal.cdga"), "--range", "0..11"]);
    let text = stdout(&o);
    assert!(text.contains("H^8: dim 2: [a*x], [b*x]"), "{text}");
    assert!(text.contains("H^11: dim 1: [a*b*x]"));
}

#[test]
fn secat_of_stanley_map() {
    let v = json(&["secat", &data("stanley.cdga")]);
    let ms = bound(&v, "msecat");
    assert_eq!(ms["upper"]["value"], 0);
    assert!(kinds(ms, "upper_certificates").contains(&"module-retraction".to_string()));
}

#[test]
fn reports_are_byte_deterministic() {
    let a = cdga(&["tc", &data("wedge.cdga"), "--n", "2", "--json"]);
    let b = cdga(&["tc", &data("wedge.cdga"), "--n", "2", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
