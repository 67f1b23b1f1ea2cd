use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn catalog_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../catalog").join(name)
}

fn wkra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wkra")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json_of(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let o = wkra(&full);
    (o.status.code().unwrap(), serde_json::from_slice(&o.stdout).expect("json output"))
}

#[test]
fn check_s4_against_wkra3() {
    let f = catalog_file("S4.json");
    let o = wkra(&["check", f.to_str().unwrap(), "--profile", "wkra3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("all checks pass"));
}

#[test]
fn failing_check_names_the_witness() {
    let f = catalog_file("S3.json");
    let (code, v) = json_of(&["check", f.to_str().unwrap(), "--profile", "wkra2"]);
    assert_eq!(code, 1);
    let failed: Vec<&Value> = v["checks"].as_array().unwrap().iter().filter(|c| c["verdict"] == "fail").collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|c| c["witness"].is_object()));
}

#[test]
fn s3_loses_two_pebble_game() {
    let f = catalog_file("S3.json");
    let o = wkra(&["game", f.to_str().unwrap(), "--pebbles", "2", "--solve"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("∀ wins"));
}

#[test]
fn gamma_rounds_and_transcript_file() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    let f = catalog_file("wk2.json");
    let o = wkra(&["game", f.to_str().unwrap(), "--rounds", "2", "--transcript", t.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("∃ survives"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&t).unwrap()).unwrap();
    assert_eq!(v["outcome"], "exists");
}

#[test]
fn enumerate_size_six_wkra3_assoc() {
    let o = wkra(&["enumerate", "--size", "6", "--profile", "wkra3+assoc"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "total: 14"), "{}", stdout(&o));
}

#[test]
fn frame_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let fr = dir.path().join("f.json");
    let al = dir.path().join("a.json");
    let src = catalog_file("W6_2.json");
    assert_eq!(wkra(&["to-frame", src.to_str().unwrap(), "--emit", fr.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(wkra(&["to-algebra", fr.to_str().unwrap(), "--emit", al.to_str().unwrap()]).status.code(), Some(0));
    let a = wkra::io::load_algebra(&src).unwrap();
    let b = wkra::io::load_algebra(&al).unwrap();
    assert!(wkra::models::morphism::are_isomorphic(&a, &b));
}

#[test]
fn text_and_json_verdicts_agree() {
    for name in ["S3.json", "S4.json", "wk2.json", "W6_1.json"] {
        let f = catalog_file(name);
        let path = f.to_str().unwrap();
        for args in [
            vec!["check", path, "--profile", "all"],
            vec!["game", path, "--pebbles", "3", "--solve"],
            vec!["discriminator", path],
        ] {
            let text = wkra(&args);
            let (code, _) = json_of(&args);
            assert_eq!(text.status.code(), Some(code), "{args:?}");
        }
        let (_, v) = json_of(&["game", path, "--pebbles", "3", "--solve"]);
        let text = stdout(&wkra(&["game", path, "--pebbles", "3", "--solve"]));
        assert!(text.contains(v["verdict"].as_str().unwrap()));
    }
}

#[test]
fn usage_and_input_errors_have_distinct_codes() {
    assert_eq!(wkra(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(wkra(&["--help"]).status.code(), Some(0));
    assert_eq!(wkra(&["check", "/nonexistent/a.json"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"elements\": [\"a\", \"b\"], \"leq\": []}").unwrap();
    assert_eq!(wkra(&["check", bad.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn sigma_one_round_trips_and_three_is_refused() {
    let o = wkra(&["sigma", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let f = wkra::game::parse_formula(stdout(&o).trim()).unwrap();
    assert_eq!(f, wkra::game::sigma_formula(1, usize::MAX).unwrap());
    assert_eq!(wkra(&["sigma", "3"]).status.code(), Some(1));
}

#[test]
fn wk_and_representation_map() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    let a = dir.path().join("a.json");
    let m = dir.path().join("m.json");
    let chain = wkra::models::Poset::chain(2);
    wkra::io::save_poset(&p, &chain).unwrap();
    let o = wkra(&["wk", "--poset", p.to_str().unwrap(), "--emit", a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("6 elements"));
    let w = wkra::models::build_wk(&chain, wkra::models::WkBound::default()).unwrap();
    let map = wkra::models::representation::RepresentationMap { poset: w.poset.clone(), images: w.relations.clone() };
    wkra::io::save_rep_map(&m, Path::new("a.json"), Path::new("p.json"), &w.algebra, &map).unwrap();
    let o = wkra(&["verify-rep", "--map", m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    // swapping two images breaks the map
    let mut broken = map.clone();
    broken.images.swap(1, 2);
    wkra::io::save_rep_map(&m, Path::new("a.json"), Path::new("p.json"), &w.algebra, &broken).unwrap();
    assert_eq!(wkra(&["verify-rep", "--map", m.to_str().unwrap()]).status.code(), Some(1));
}
