use std::process::Command;

fn polycensus(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_polycensus")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn prime_degree_row_is_zero() {
    let (code, out, _) = polycensus(&["count", "--degree", "5", "--monic", "--height-max", "100", "--variant", "total"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "d,monic,variant,m,n,H,count,method,workers,elapsed_seconds\n5,true,total,,,100,0,forward,1,\n"
    );
}

#[test]
fn both_methods_agree() {
    let (code, out, _) = polycensus(&["count", "--degree", "4", "--monic", "--height-max", "2", "--method", "both"]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows, ["4,true,total,,,2,65,forward,1,", "4,true,total,,,2,65,oracle,1,"]);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["count", "--degree", "6", "--non-monic", "--grid", "3,6,12", "--variant", "split:3,2", "--jobs", "4"];
    let (code, first, _) = polycensus(&args);
    assert_eq!(code, 0);
    assert_eq!(polycensus(&args).1, first);
    let (_, json, _) = polycensus(&[&args[..], &["--out", "json"]].concat());
    assert_eq!(json.lines().count(), 3);
    assert!(json.lines().all(|l| l.contains("\"count\":\"")));
}

#[test]
fn output_file_gets_a_manifest_and_fits() {
    let dir = tempdir();
    let csv = dir.join("d9.csv");
    let csv_s = csv.to_str().unwrap();
    let (code, out, err) = polycensus(&[
        "count", "--degree", "9", "--grid", "25,50,100,200", "--jobs", "4", "--timings", "--output", csv_s,
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.is_empty());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("d9.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["workers"], 4);
    assert_eq!(manifest["rows"].as_array().unwrap().len(), 4);
    assert_eq!(manifest["config"]["grid"], serde_json::json!([25, 50, 100, 200]));
    let (code, fit, _) = polycensus(&["fit", "--input", csv_s]);
    assert_eq!(code, 0);
    assert!(fit.contains("predicted asymp H^3"), "{fit}");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn refusals_exit_2_with_a_message() {
    for args in [
        &["decompose", "1,2,x"][..],
        &["decompose", "1,0,0,0,0,1", "--split", "2,2"],
        &["count", "--degree", "4", "--height-max", "50", "--method", "oracle", "--budget", "100"],
        &["count", "--degree", "4", "--grid", "geometric:3"],
        &["count", "--degree", "6", "--variant", "split:2,2", "--height-max", "5"],
        &["fit", "--input", "/nonexistent/rows.csv"],
    ] {
        let (code, _, err) = polycensus(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.trim().is_empty(), "{args:?}");
    }
}

#[test]
fn dedup_budget_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_polycensus"))
        .args(["count", "--degree", "4", "--height-max", "30", "--dedup", "set"])
        .env("POLYCENSUS_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dedup set"));
}

#[test]
fn decompose_and_mahler() {
    assert_eq!(polycensus(&["decompose", "5,2,3,2,1"]).1, "g = 5,2,1 ; h = 0,1,1\n");
    let (code, out, _) = polycensus(&["mahler", "-6,3"]);
    assert_eq!(code, 0);
    assert!(out.contains("M(f) = 6.000000000000"));
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("polycensus-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
