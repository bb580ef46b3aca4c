//! End-to-end tests of the binary: file formats, exit codes, and
//! deterministic output.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU64, Ordering};

static DIR_COUNTER: AtomicU64 = AtomicU64::new(0);

fn scratch_dir(tag: &str) -> PathBuf {
    let id = DIR_COUNTER.fetch_add(1, Ordering::SeqCst);
    let dir = std::env::temp_dir().join(format!(
        "stereoshape-cli-{tag}-{}-{id}",
        std::process::id()
    ));
    fs::create_dir_all(&dir).expect("create scratch dir");
    dir
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stereoshape"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, contents).expect("write fixture");
    path
}

/// A generic 4-point scene with unit fourth row and distinct depths.
const SCENE: &str = r#"{"rows":4,"cols":5,"data":[
    1.0, -0.5,  2.0, 0.5, -1.5,
    0.5,  1.5, -1.0, 2.0,  0.5,
    2.0,  1.0,  4.0, 0.5,  1.0,
    1.0,  1.0,  1.0, 1.0,  1.0]}"#;

#[test]
fn project_divides_by_the_third_row() {
    let dir = scratch_dir("project");
    let input = write(
        &dir,
        "X.json",
        r#"{"rows":4,"cols":4,"data":[2.0,4.0,6.0,8.0, 2.0,2.0,2.0,2.0, 2.0,2.0,2.0,2.0, 2.0,4.0,2.0,4.0]}"#,
    );
    let out = run(&["project", "--in", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    assert_eq!(json["rows"], 4);
    let data = json["data"].as_array().unwrap();
    // Third row is all ones after projection.
    for v in &data[8..12] {
        assert_eq!(*v, 1.0);
    }
    assert_eq!(data[0], 1.0);
    assert_eq!(data[1], 2.0);
}

#[test]
fn project_rejects_focal_plane_points_with_exit_3() {
    let dir = scratch_dir("focal");
    let input = write(
        &dir,
        "bad.json",
        r#"{"rows":4,"cols":4,"data":[1,1,1,1, 1,1,1,1, 1,0,1,1, 1,1,1,1]}"#,
    );
    let out = run(&["project", "--in", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn project_reads_csv_by_extension() {
    let dir = scratch_dir("csv");
    let input = write(&dir, "X.csv", "2,4,6,8\n2,2,2,2\n2,2,2,2\n2,4,2,4\n");
    let out = run(&["project", "--in", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    assert_eq!(json["cols"], 4);
}

#[test]
fn act_applies_transform_and_respects_restricted_flag() {
    let dir = scratch_dir("act");
    let input = write(&dir, "A.json", SCENE);
    // Scaling by 2 with compensating half diagonal leaves A unchanged.
    let transform = write(
        &dir,
        "T.json",
        r#"{"g":[2,0,0,0, 0,2,0,0, 0,0,2,0, 0,0,0,2], "d":[0.5,0.5,0.5,0.5,0.5]}"#,
    );
    let out = run(&[
        "act",
        "--in",
        input.to_str().unwrap(),
        "--transform",
        transform.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    let original: serde_json::Value = serde_json::from_str(SCENE).unwrap();
    assert_eq!(json["data"], original["data"]);

    // The same transform is not restricted: g[3][3] = 2.
    let out = run(&[
        "act",
        "--in",
        input.to_str().unwrap(),
        "--transform",
        transform.to_str().unwrap(),
        "--restricted",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

fn projected_scene(dir: &Path) -> PathBuf {
    let input = write(dir, "X.json", SCENE);
    let image = dir.join("P.json");
    let out = bin()
        .args([
            "project",
            "--in",
            input.to_str().unwrap(),
            "--out",
            image.to_str().unwrap(),
        ])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0));
    image
}

#[test]
fn equiv_of_an_image_with_itself_is_the_identity_orbit() {
    let dir = scratch_dir("equiv");
    let image = projected_scene(&dir);
    let out = run(&[
        "equiv",
        "--in",
        image.to_str().unwrap(),
        "--in",
        image.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    assert_eq!(json["status"], "Equivalent");

    let out = run(&[
        "recover",
        "--in",
        image.to_str().unwrap(),
        "--in",
        image.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    assert_eq!(json["status"], "Equivalent");
    let g = json["g"].as_array().unwrap();
    for (k, v) in g.iter().enumerate() {
        let expected = if k % 5 == 0 { 1.0 } else { 0.0 };
        assert!(
            (v.as_f64().unwrap() - expected).abs() < 1e-9,
            "g[{k}] = {v}"
        );
    }
    assert_eq!(json["ranks"].as_array().unwrap().len(), 3);
}

#[test]
fn equiv_detects_perturbation_with_exit_1() {
    let dir = scratch_dir("noteq");
    let image = projected_scene(&dir);
    let text = fs::read_to_string(&image).unwrap();
    let mut parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    let entry = parsed["data"][0].as_f64().unwrap();
    parsed["data"][0] = serde_json::json!(entry + 1e-3);
    let perturbed = write(&dir, "Q.json", &parsed.to_string());

    let out = run(&[
        "equiv",
        "--in",
        image.to_str().unwrap(),
        "--in",
        perturbed.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let json = stdout_json(&out);
    assert_eq!(json["status"], "NotEquivalent");
}

#[test]
fn degen_flags_rank_deficient_instances_with_exit_2_path() {
    let dir = scratch_dir("degen");
    // Image whose fourth row is proportional to the ones row: the
    // coefficient matrix drops to rank 3.
    let flat = write(
        &dir,
        "flat.json",
        r#"{"rows":4,"cols":5,"data":[
            0.5, -0.25, 0.5, 1.0, -1.5,
            0.25, 0.75, -0.25, 4.0, 0.5,
            1.0, 1.0, 1.0, 1.0, 1.0,
            0.5, 0.5, 0.5, 0.5, 0.5]}"#,
    );
    let out = run(&[
        "degen",
        "--in",
        flat.to_str().unwrap(),
        "--in",
        flat.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let json = stdout_json(&out);
    assert_eq!(json["rank4_ok"], false);
    assert_eq!(json["ranks"][0], 3);

    // recover on the same pair reports Degenerate (exit 2).
    let out = run(&[
        "recover",
        "--in",
        flat.to_str().unwrap(),
        "--in",
        flat.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    // A generic image pair is fine.
    let image = projected_scene(&dir);
    let out = run(&[
        "degen",
        "--in",
        image.to_str().unwrap(),
        "--in",
        image.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn demo_nonfree_confirms_the_scalar_stabilizer() {
    let out = run(&["demo-nonfree", "--lambda", "3.5", "--seed", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    assert_eq!(json["fixed"], true);

    let out = run(&["demo-nonfree", "--trials", "20", "--seed", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    assert_eq!(json["passed"], true);
}

#[test]
fn demo_nonproper_family_lies_in_the_witness_set() {
    let out = run(&["demo-nonproper", "--scales", "10,100,1000"]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    assert_eq!(json["in_witness_set"], true);
    let family = json["family"].as_array().unwrap();
    assert_eq!(family.len(), 3);
    assert_eq!(family[2]["operator_norm"], 1000.0);
    assert_eq!(family[2]["d_prime"][0], 0.001);
}

#[test]
fn demo_paper_example_matches_the_expansion() {
    let out = run(&[
        "demo-paper-example",
        "--alpha",
        "1",
        "--beta",
        "1",
        "--gamma",
        "1",
        "--delta",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["holds"], true);

    let out = run(&[
        "demo-paper-example",
        "--alpha",
        "2",
        "--beta",
        "1",
        "--gamma",
        "1",
        "--delta",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let json = stdout_json(&out);
    assert_eq!(json["holds"], false);
    assert_eq!(json["offending_columns"], serde_json::json!([5, 6]));
}

#[test]
fn consistency_reports_witness_and_theorem() {
    let dir = scratch_dir("consistency");
    let s = write(&dir, "S.json", r#"{"elements":["1","2","3","4","5"]}"#);
    let id = write(
        &dir,
        "id.json",
        r#"{"mapping":{"1":"1","2":"2","3":"3","4":"4","5":"5"}}"#,
    );
    let swap = write(
        &dir,
        "swap.json",
        r#"{"mapping":{"1":"2","2":"1","3":"3","4":"4","5":"5"}}"#,
    );
    let out = run(&[
        "consistency",
        "--in",
        s.to_str().unwrap(),
        "--rep",
        id.to_str().unwrap(),
        "--rep",
        swap.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let json = stdout_json(&out);
    assert_eq!(json["consistent"], false);
    assert_eq!(json["witness"]["s"], "1");
    assert_eq!(json["witness"]["t"], "2");

    // Theorem report on the directed 3-cycle: free, no involution,
    // consistent.
    let cycle = write(
        &dir,
        "C3.json",
        r#"{"elements":["a","b","c"],
            "relations":{"edge":{"arity":2,"tuples":[["a","b"],["b","c"],["c","a"]]}}}"#,
    );
    let out = run(&["consistency", "--in", cycle.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    assert_eq!(json["free"], true);
    assert_eq!(json["has_involution"], false);
    assert_eq!(json["all_pairs_consistent"], true);
    assert_eq!(json["theorem_respected"], true);
}

#[test]
fn suite_passes_and_is_byte_deterministic() {
    let a = run(&["suite", "--trials", "5", "--seed", "99"]);
    assert_eq!(a.status.code(), Some(0));
    let json = stdout_json(&a);
    assert_eq!(json["all_passed"], true);
    assert_eq!(json["criteria"].as_array().unwrap().len(), 10);

    let b = run(&["suite", "--trials", "5", "--seed", "99"]);
    assert_eq!(a.stdout, b.stdout);

    // One human-readable line per criterion on stderr.
    let stderr = String::from_utf8_lossy(&a.stderr);
    assert_eq!(stderr.lines().count(), 10);
    for line in stderr.lines() {
        assert!(line.starts_with("[PASS]"), "{line}");
    }
}

#[test]
fn seed_env_variable_is_the_default_seed() {
    let with_env = bin()
        .args(["suite", "--trials", "3"])
        .env("STEREOSHAPE_SEED", "424242")
        .output()
        .expect("binary runs");
    let with_flag = run(&["suite", "--trials", "3", "--seed", "424242"]);
    assert_eq!(with_env.stdout, with_flag.stdout);
    let flag_wins = bin()
        .args(["suite", "--trials", "3", "--seed", "7"])
        .env("STEREOSHAPE_SEED", "424242")
        .output()
        .expect("binary runs");
    let plain_seed_7 = run(&["suite", "--trials", "3", "--seed", "7"]);
    assert_eq!(flag_wins.stdout, plain_seed_7.stdout);
}

#[test]
fn bad_inputs_exit_3() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(3));

    let out = run(&["project", "--in", "/nonexistent/path.json"]);
    assert_eq!(out.status.code(), Some(3));

    let dir = scratch_dir("badjson");
    let bad = write(&dir, "bad.json", "{ not json");
    let out = run(&["project", "--in", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    // Wrong entry count.
    let short = write(&dir, "short.json", r#"{"rows":4,"cols":4,"data":[1,2,3]}"#);
    let out = run(&["project", "--in", short.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    // Image with a non-one third row is rejected by equiv.
    let not_image = write(
        &dir,
        "notimage.json",
        r#"{"rows":4,"cols":4,"data":[1,2,3,4, 5,6,7,8, 2,2,2,2, 1,1,1,1]}"#,
    );
    let out = run(&[
        "equiv",
        "--in",
        not_image.to_str().unwrap(),
        "--in",
        not_image.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("stereoshape"));
}

#[test]
fn out_flag_writes_file_instead_of_stdout() {
    let dir = scratch_dir("outflag");
    let input = write(&dir, "X.json", SCENE);
    let target = dir.join("result.json");
    let out = run(&[
        "project",
        "--in",
        input.to_str().unwrap(),
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = fs::read_to_string(&target).unwrap();
    let json: serde_json::Value = serde_json::from_str(&written).unwrap();
    assert_eq!(json["rows"], 4);
}
