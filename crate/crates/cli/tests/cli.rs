use std::path::PathBuf;

use bredon_cli::run;
use serde_json::Value;

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn bredon(args: &str) -> bredon_cli::RunOutput {
    run(std::iter::once("bredon").chain(args.split_whitespace()))
}

#[test]
fn golden_outputs() {
    let cases = [
        ("point --window -5:5", "point.txt"),
        ("point --window -5:5 --format svg", "point.svg"),
        ("pathloop 4 2 -r 2 --window 6 --solve", "pathloop_4_2_r2.txt"),
        ("pathloop 4 2 -r 2 --window 6 --solve --format json", "pathloop_4_2_r2.json"),
        (
            "serre --base sphere:4,2 --fiber loops:4,2 -r 4 --window 7 --solve --pins tau2:from-r2",
            "serre_r4_pinned.txt",
        ),
        ("identity --space sphere:4,2 -r 1 --les --window 6", "identity_les.txt"),
    ];
    for (args, file) in cases {
        let out = bredon(args);
        assert_eq!(out.code, 0, "{args}: {}", out.stderr);
        assert_eq!(out.stdout, golden(file), "{args}");
        assert_eq!(bredon(args), out, "{args} is not deterministic");
    }
}

#[test]
fn figure_cells_and_labels() {
    let out = bredon("pathloop 4 2 -r 2 --window 6");
    let row6 = out.stdout.lines().find(|l| l.trim_start().starts_with("6 |")).unwrap();
    assert!(row6.contains("??"));
    let point = bredon("point --window -5:5 --format ascii").stdout;
    for name in ["rho at (1,1)", "tau at (0,1)", "theta at (0,-2)", "theta/(rho) at (-1,-3)", "theta/(tau) at (0,-3)"] {
        assert!(point.contains(name), "{name}");
    }
}

#[test]
fn unique_assignment_json() {
    let out = bredon("pathloop 4 2 -r 2 --window 6 --solve --format json");
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["solver"]["outcome"], "unique");
    let arrows = v["solver"]["solutions"][0].as_array().unwrap();
    assert!(arrows.iter().any(|a| a["from"] == serde_json::json!([0, 3]) && a["rank"] == 1));
}

#[test]
fn page_json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("page.json");
    let out = bredon(&format!(
        "pathloop 4 2 -r 2 --window 6 --solve --format json --out {}",
        path.display()
    ));
    assert_eq!(out.code, 0);
    assert!(out.stdout.is_empty());
    let emitted: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let back = bredon(&format!("serre --page @{} --format json", path.display()));
    assert_eq!(back.code, 0, "{}", back.stderr);
    let reread: Value = serde_json::from_str(&back.stdout).unwrap();
    assert_eq!(reread, emitted["page"]);
    let text = bredon(&format!("serre --page @{}", path.display()));
    assert!(text.stdout.contains("E_infinity"));
}

#[test]
fn space_json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for designator in ["sphere:4,2", "projective:4,2", "loops:4,2", "point"] {
        let path = dir.path().join("space.json");
        let first = bredon(&format!("space {designator} --format json --cutoff 9"));
        assert_eq!(first.code, 0);
        std::fs::write(&path, &first.stdout).unwrap();
        let second = bredon(&format!("space @{} --format json", path.display()));
        assert_eq!(second.stdout, first.stdout, "{designator}");
    }
}

#[test]
fn mackey_functor_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    std::fs::write(&path, r#"{"fixed":1,"free":1,"invol":[[1]],"res":[[1]],"tr":[[1]]}"#).unwrap();
    let out = bredon(&format!("mackey --functor @{} --format json", path.display()));
    assert_eq!(out.code, 1);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["violated_axioms"], serde_json::json!([4]));
    assert_eq!(bredon("mackey --functor dual-constant").code, 0);
    let eval = bredon("mackey --space loops:4,2 -q 6 -r 2 --format json");
    let v: Value = serde_json::from_str(&eval.stdout).unwrap();
    assert_eq!(v["decomposition"], serde_json::json!(["dual-constant"]));
}

#[test]
fn exit_codes() {
    assert_eq!(bredon("verify").code, 0);
    assert_eq!(bredon("verify --paper --only weight").code, 0);
    assert_eq!(bredon("pathloop 4 2 -r -2 --window 6").code, 2);
    assert_eq!(bredon("identity --space sphere:1,1 -r 1").code, 2);
    assert_eq!(bredon("pathloop 4 2").code, 3);
    assert_eq!(bredon("point --window 5:-5").code, 3);
    assert_eq!(bredon("space torus:1,1").code, 3);
    assert_eq!(bredon("pathloop 4 2 -r 4 --solve --pins tau3:from-r2").code, 3);
    assert_eq!(bredon("serre --base sphere:4,2 --fiber loops:4,2 -r 2 --solve --abutment sphere:4,2").code, 1);
    assert_eq!(bredon("--help").code, 0);
}

#[test]
fn projective_bundle_report() {
    let out = bredon("projective-bundle --base sphere:4,2 --fiber 3,1 -r 1 --check-injection");
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("injection: pass"));
    assert!(out.stdout.contains("[1, 2, 1, 0, 0, 1, 1]"));
}

#[test]
fn les_negative_control_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    let text = bredon("space sphere:4,2 --format json").stdout;
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["fixed_betti"][0] = 0.into();
    v["fixed_connected"] = false.into();
    std::fs::write(&path, v.to_string()).unwrap();
    let out = bredon(&format!("identity --space @{} -r 1 --les", path.display()));
    assert_eq!(out.code, 1, "{}", out.stderr);
    assert!(out.stdout.contains("infeasible at H^{1,1}"));
}
