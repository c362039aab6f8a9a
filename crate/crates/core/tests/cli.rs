//! The command line: exit codes, outputs, and reproducibility.

use std::fs;
use std::path::Path;

use roughgg::cli::run;

fn roughgg(args: &[&str]) -> i32 {
    run(std::iter::once("roughgg").chain(args.iter().copied()))
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn trace_reports_minus_two_on_the_slit() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "tr.json");
    assert_eq!(roughgg(&["trace", "--preset", "slit-square", "--grid", "32", "--out", &out]), 0);
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let on_slit: Vec<f64> = doc["facets"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|f| f["axis"] == 1 && f["center"][1].as_f64().unwrap() == 0.0)
        .map(|f| f["g"].as_f64().unwrap())
        .collect();
    assert_eq!(on_slit.len(), 64);
    assert!(on_slit.iter().all(|&g| g == -2.0));
}

#[test]
fn approx_on_the_cantor_cross_reports_growth() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "a.json");
    let png = path(dir.path(), "a.pgm");
    let code = roughgg(&["approx", "--preset", "cantor-cross", "--k", "2", "--delta", "0.1", "--out", &out, "--png", &png]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["growth"]["verdict"], "GROWING");
    assert!(doc["report"]["audit"]["density_ok"].as_bool().unwrap());
    assert!(fs::read(&png).unwrap().starts_with(b"P5\n"));
}

#[test]
fn incompatible_trace_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(dir.path(), "bad.csv");
    let g = roughgg::domain::Preset::Square.grid(16).unwrap();
    let s = roughgg::domain::Preset::Square.rasterize(&g).unwrap();
    let fs = s.inner_sides()[0];
    let side = if fs.side == roughgg::domain::Side::Lower { "lower" } else { "upper" };
    fs::write(&csv, format!("facet_id,side,g\n{},{side},1.0\n", g.global_facet_id(fs.facet))).unwrap();
    assert_eq!(roughgg(&["solve-div", "--preset", "square", "--grid", "16", "--trace", &csv]), 3);
}

#[test]
fn solve_div_writes_a_readable_field() {
    let dir = tempfile::tempdir().unwrap();
    let dmf = path(dir.path(), "f.dmf");
    let out = path(dir.path(), "s.json");
    let code = roughgg(&["solve-div", "--preset", "slit-square", "--grid", "16", "--mode", "decomposed", "--dmf", &dmf, "--out", &out]);
    assert_eq!(code, 0);
    let field = roughgg::dmfield::FluxField::from_bytes(&fs::read(&dmf).unwrap()).unwrap();
    assert_eq!(field.grid().spacing(), 1.0 / 16.0);
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(roughgg(&["classify"]), 2);
    assert_eq!(roughgg(&["classify", "--preset", "nowhere"]), 2);
    assert_eq!(roughgg(&["classify", "--preset", "disk", "--inline", "{}"]), 2);
    assert_eq!(roughgg(&["classify", "--inline", "{\"shape\": "]), 2);
    assert_eq!(roughgg(&["approx", "--preset", "disk", "--delta", "-1"]), 2);
    assert_eq!(roughgg(&["frobnicate"]), 2);
}

#[test]
fn inline_and_file_domains_agree() {
    let dir = tempfile::tempdir().unwrap();
    let doc = r#"{"shape": {"op": "box", "min": [-1, -1], "max": [1, 1]}, "cracks": [{"seg": [[-1, 0], [1, 0]]}]}"#;
    let file = path(dir.path(), "d.json");
    fs::write(&file, doc).unwrap();
    let (a, b) = (path(dir.path(), "a.json"), path(dir.path(), "b.json"));
    assert_eq!(roughgg(&["perimeter", "--inline", doc, "--grid", "16", "--out", &a]), 0);
    assert_eq!(roughgg(&["perimeter", "--domain", &file, "--grid", "16", "--out", &b]), 0);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (path(dir.path(), "a.json"), path(dir.path(), "b.json"));
    for out in [&a, &b] {
        assert_eq!(roughgg(&["gg-check", "--preset", "slit-disk", "--grid", "32", "--field", "random", "--seed", "7", "--out", out]), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn gallery_writes_six_presets_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "gallery");
    assert_eq!(roughgg(&["gallery", "--out", &out]), 0);
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(Path::new(&out).join("manifest.json")).unwrap()).unwrap();
    let presets = manifest["presets"].as_array().unwrap();
    assert_eq!(presets.len(), 6);
    let square = presets.iter().find(|p| p["file"] == "square.json").unwrap();
    assert_eq!(square["reference"]["perimeter"].as_f64().unwrap(), 8.0);
    for p in presets {
        let text = fs::read_to_string(Path::new(&out).join(p["file"].as_str().unwrap())).unwrap();
        roughgg::domain::DomainSpec::parse(&text).unwrap();
    }
    let stray = fs::read_dir(&out).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".tmp")).count();
    assert_eq!(stray, 0);
}

#[test]
fn classify_and_single_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let png = path(dir.path(), "c.pgm");
    assert_eq!(roughgg(&["classify", "--preset", "l-shape", "--grid", "16", "--tau", "0.1", "--png", &png]), 0);
    assert!(fs::metadata(&png).unwrap().len() > 0);
    assert_eq!(roughgg(&["accept", "--only", "1"]), 0);
    assert_eq!(roughgg(&["accept", "--only", "12"]), 2);
}
