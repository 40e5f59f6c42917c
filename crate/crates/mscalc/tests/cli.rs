//! End-to-end behaviour of the binary: exit codes and documented examples.

use std::path::PathBuf;
use std::process::{Command, Output};

fn mscalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mscalc")).args(args).output().expect("binary runs")
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mscalc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn verify_cartan_example_exits_zero() {
    let out = mscalc(&["verify", "cartan", "--seed", "7", "--trials", "50", "--dim", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn verify_mainforms_on_volume_form_exits_zero() {
    let out = mscalc(&["verify", "mainforms", "--dim", "3", "--m", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn schouten_of_coordinate_fields_is_zero() {
    let a = scratch("a.mv", "d(1)");
    let b = scratch("b.mv", "d(2)");
    let out = mscalc(&["compute", "schouten", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0");
}

#[test]
fn malformed_input_exits_two() {
    let a = scratch("bad.mv", "d(1) + + x");
    assert_eq!(mscalc(&["compute", "schouten", a.to_str().unwrap(), a.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(mscalc(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(mscalc(&["verify", "mainforms", "--dim", "4", "--m", "2"]).status.code(), Some(2));
    assert_eq!(mscalc(&["--bogus"]).status.code(), Some(2));
}

#[test]
fn defect_exits_one_with_witness() {
    use mscalc::linfty::LInftyPresentation;
    use mscalc::moment::Action;
    use mscalc::msgeo::PreMS;
    use mscalc::multilinear::GradedSpaceFD;
    let src = LInftyPresentation::abelian(GradedSpaceFD::new(vec![("e".into(), 1)]).unwrap(), 4).unwrap();
    let dil = Action::strict("dilation", PreMS::volume(3), src, &[("e", "x1*d(1)")], false).unwrap();
    let action = dil.to_json().to_string();
    let action = action.as_str();
    let p = scratch("dil.json", action);
    let out = mscalc(&["compute", "check-action", p.to_str().unwrap()]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(1), "{text}{}", String::from_utf8_lossy(&out.stderr));
    assert!(text.contains("multisymplectic"));
}

#[test]
fn gallery_entries_export() {
    let out = mscalc(&["gallery"]);
    assert_eq!(out.status.code(), Some(0));
    let list: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for e in list.as_array().unwrap() {
        let name = e["name"].as_str().unwrap();
        let out = mscalc(&["gallery", name]);
        assert_eq!(out.status.code(), Some(0), "{name}");
    }
}
