use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const ID2: &str = "B\n\n2\n2\n\na\nb\nm\nn\nX.\n.X\n";
const M3: &str = r#"{"elements":["0","a","b","c","1"],"covers":[["0","a"],["0","b"],["0","c"],["a","1"],["b","1"],["c","1"]]}"#;
const CHAIN3: &str = r#"{"elements":["0","m","1"],"covers":[["0","m"],["m","1"]]}"#;

fn stablelat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stablelat")).args(args).output().expect("binary runs")
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn identity_context_gives_four_element_lattice() {
    let dir = TempDir::new().unwrap();
    let cxt = file(&dir, "id2.cxt", ID2);
    let out = dir.path().join("id2.json");
    let o = stablelat(&["stable-lattice", s(&cxt), "-o", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let l = stablelat::io::read_lattice(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(l.len(), 4);
    assert!(stderr(&o).contains("seed="));
}

#[test]
fn canext_reports_density_and_compactness() {
    let dir = TempDir::new().unwrap();
    let m3 = file(&dir, "m3.json", M3);
    let o = stablelat(&["canext", s(&m3)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("dense: yes, compact: yes, embedding surjective: yes"), "{}", stdout(&o));
}

#[test]
fn dot_of_a_chain_has_two_edges() {
    let dir = TempDir::new().unwrap();
    let c = file(&dir, "chain3.json", CHAIN3);
    let o = stablelat(&["dot", s(&c)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("digraph"));
    assert_eq!(text.matches("->").count(), 2);
}

#[test]
fn convert_round_trips() {
    let dir = TempDir::new().unwrap();
    let cxt = file(&dir, "id2.cxt", ID2);
    let json = dir.path().join("id2p.json");
    let back = dir.path().join("back.cxt");
    assert_eq!(stablelat(&["convert", s(&cxt), "--to", "json", "-o", s(&json)]).status.code(), Some(0));
    assert_eq!(stablelat(&["convert", s(&json), "--to", "cxt", "-o", s(&back)]).status.code(), Some(0));
    assert_eq!(fs::read(&back).unwrap(), ID2.as_bytes());
}

#[test]
fn malformed_row_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let bad = file(&dir, "bad.cxt", "B\n\n2\n2\n\na\nb\nm\nn\nX.\n.Q\n");
    let o = stablelat(&["stable-lattice", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 11"), "{}", stderr(&o));
}

#[test]
fn duplicate_names_are_rejected() {
    let dir = TempDir::new().unwrap();
    let dup = file(&dir, "dup.cxt", "B\n\n2\n2\n\na\na\nm\nn\nX.\n.X\n");
    let o = stablelat(&["stable-lattice", s(&dup)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("duplicate name `a`"), "{}", stderr(&o));
}

#[test]
fn failing_equation_exits_one_with_witness() {
    let dir = TempDir::new().unwrap();
    let m3 = file(&dir, "m3.json", M3);
    let o = stablelat(&["check-eq", s(&m3), "--equation", "x ^ (y v z) = (x ^ y) v (x ^ z)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("fails at"));
    let o = stablelat(&["check-eq", s(&m3), "--equation", "x ^ (x v y) = x"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn theta_on_a_family_verifies() {
    let dir = TempDir::new().unwrap();
    let fam = file(
        &dir,
        "fam.json",
        r#"{"members":[{"X":["a","b"],"Y":["m","n"],"R":[["a","m"],["b","n"]]},{"X":["c"],"Y":["p"],"R":[]}]}"#,
    );
    let o = stablelat(&["theta", s(&fam)]);
    assert_eq!(o.status.code(), Some(2), "an ultrafilter is required");
    let o = stablelat(&["theta", s(&fam), "--at", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("joins (formula): yes"));
}

#[test]
fn eval_prints_a_definable_set() {
    let dir = TempDir::new().unwrap();
    let cxt = file(&dir, "id2.cxt", ID2);
    let o = stablelat(&["eval", s(&cxt), "--formula", "R(v0,v1)", "--assign", "v1=m"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "{a}");
    let o = stablelat(&["eval", s(&cxt), "--formula", "R(v0,v1)", "--assign", "v0=a", "--assign", "v1=n"]);
    assert_eq!(stdout(&o).trim(), "false");
}

#[test]
fn verify_equations_suite() {
    let o = stablelat(&["verify", "equations"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("[PASS]"));
    assert_eq!(stablelat(&["verify", "no-such-suite"]).status.code(), Some(2));
}
