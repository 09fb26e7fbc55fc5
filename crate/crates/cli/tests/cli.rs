use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn polykey(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polykey"))
        .args(args)
        .env("POLYKEY_DATA", data())
        .env_remove("POLYKEY_PERSONAL")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn d(rel: &str) -> String {
    data().join(rel).display().to_string()
}

#[test]
fn validate_exit_codes() {
    let ok = polykey(&["layout", "validate", &d("layouts/hi.toml")]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("hi-inscript"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "format = 1\nlayout_id = 3\n").unwrap();
    assert_eq!(polykey(&["layout", "validate", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(polykey(&["layout", "validate", "/no/such/file.toml"]).status.code(), Some(2));
    assert_eq!(polykey(&["layout", "frobnicate"]).status.code(), Some(2));
    assert_eq!(polykey(&[]).status.code(), Some(2));
}

#[test]
fn coverage_reports_yakut_gap() {
    let gap = polykey(&["layout", "coverage", &d("layouts/ru.toml"), "--inventory", &d("profiles/sah.toml")]);
    assert_eq!(gap.status.code(), Some(1));
    let out = stdout(&gap);
    let missing: Vec<&str> = out
        .lines()
        .filter(|l| l.contains("MISSING"))
        .map(|l| l.split_whitespace().next().unwrap())
        .collect();
    assert_eq!(missing, ["Ҕ", "ҕ", "Ҥ", "ҥ", "Ү", "ү", "Һ", "һ", "Ө", "ө"]);
    let ok = polykey(&["layout", "coverage", &d("layouts/sah.toml"), "--inventory", &d("profiles/sah.toml")]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn render_shows_swiss_keys() {
    let out = stdout(&polykey(&["layout", "render", &d("layouts/de-CH.toml")]));
    for c in ["ü", "ö", "ä"] {
        assert!(out.contains(c), "{out}");
    }
}

#[test]
fn generate_reproduces_bundled_kanuri_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("kr.toml");
    let o = polykey(&[
        "layout",
        "generate",
        "--grid",
        "qwerty",
        "--inventory",
        &d("profiles/kr.toml"),
        "--corpus",
        &d("corpora/kr.txt"),
        "--threshold",
        "0.1",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(data().join("layouts/kr.toml")).unwrap());
}

#[test]
fn train_then_suggest() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("id.arpa");
    let o = polykey(&[
        "corpus",
        "train",
        &d("corpora/id.txt"),
        "--profile",
        &d("profiles/id.toml"),
        "--order",
        "3",
        "-o",
        model.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&model).unwrap().contains("\\data\\"));
    assert!(dir.path().join("id.words").exists());
    let o = polykey(&["suggest", "--lang", "id", "--model", model.to_str().unwrap(), "--context", "kita makan"]);
    assert!(stdout(&o).lines().any(|l| l.starts_with("makan-makan\t")), "{}", stdout(&o));
    let o = polykey(&["suggest", "--lang", "id", "--context", "makan2"]);
    assert!(stdout(&o).contains("makan-makan\t(shorthand)"));
}

#[test]
fn normalize_reports_rejections() {
    let o = polykey(&["corpus", "normalize", &d("corpora/en.txt"), "--profile", &d("profiles/en.toml")]);
    assert_eq!(o.status.code(), Some(0));
    let report = String::from_utf8_lossy(&o.stderr);
    assert!(report.contains("url"), "{report}");
    assert!(stdout(&o).lines().count() > 4000);
}

#[test]
fn spellcheck_suggests() {
    let o = stdout(&polykey(&["spellcheck", "--word", "teh"]));
    assert!(o.starts_with("teh: not found; suggestions: the"), "{o}");
    assert_eq!(stdout(&polykey(&["spellcheck", "--word", "The"])), "The: ok\n");
}

#[test]
fn mix_checks_scripts() {
    let ok = polykey(&["mix", "--models", &d("models/nl.arpa"), &d("models/fy.arpa"), "--weights", "0.5,0.5"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).starts_with("nl\t0.500000\nfy\t0.500000\n"));
    let bad = polykey(&["mix", "--models", &d("models/en.arpa"), &d("models/ru.arpa")]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("scripts differ"));
}

#[test]
fn personal_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let pd = dir.path().to_str().unwrap();
    let src = dir.path().join("in.txt");
    std::fs::write(&src, "[words]\nmakan\t3\t7\n[blocklist]\nteh\tthe\t1\n").unwrap();
    let o = polykey(&["personal", "import", src.to_str().unwrap(), "--user", "u1", "--personal-dir", pd]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&polykey(&["personal", "export", "--user", "u1", "--personal-dir", pd]));
    assert_eq!(out, "[words]\nmakan\t3\t7\n[blocklist]\nteh\tthe\t1\n");
    polykey(&["personal", "clear", "--user", "u1", "--personal-dir", pd]);
    let out = stdout(&polykey(&["personal", "export", "--user", "u1", "--personal-dir", pd]));
    assert_eq!(out, "[words]\n[blocklist]\n");
}

#[test]
fn registry_commands() {
    let o = stdout(&polykey(&["registry", "score"]));
    let tags: Vec<&str> = o.lines().map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(tags, ["sah", "sat", "fy", "kr", "ain"]);
    let o = stdout(&polykey(&["registry", "dashboard", "--subtask", "layout_designed"]));
    assert!(o.contains("| sah | 1 | 16.68 | in_progress | aisen | KB-112 |"), "{o}");
    assert!(!o.contains("## tested"));
    assert_eq!(polykey(&["registry", "score", "zz"]).status.code(), Some(1));
}

#[test]
fn simulate_autocorrects() {
    let dir = tempfile::tempdir().unwrap();
    let taps = dir.path().join("taps.txt");
    // t, e, h on the QWERTY grid in page-normalized coordinates, then space.
    std::fs::write(&taps, "0.45 0.125 tap\n0.25 0.125 tap\n0.6 0.375 tap\nspace\n").unwrap();
    let o = polykey(&["decode", "simulate", "--lang", "en", "--taps", taps.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("commit teh -> the"), "{out}");
    assert!(out.ends_with("committed: the \n"));
}

#[test]
fn serve_over_stdio() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_polykey"))
        .args(["serve", "--languages", "en,ru"])
        .env("POLYKEY_DATA", data())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    {
        let stdin = child.stdin.as_mut().unwrap();
        writeln!(stdin, r#"{{"op":"handshake","protocol":"v1"}}"#).unwrap();
        writeln!(stdin, r#"{{"op":"open_session","languages":["en","ru"]}}"#).unwrap();
    }
    drop(child.stdin.take());
    let out = child.wait_with_output().unwrap();
    let lines: Vec<String> = stdout(&out).lines().map(String::from).collect();
    assert_eq!(lines[0], r#"{"type":"handshake","protocol":"v1","languages":["en","ru"]}"#);
    assert!(lines[1].contains("CrossScriptMix"));
}

#[test]
fn serve_names_missing_asset() {
    let o = polykey(&["serve", "--languages", "xx"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("profiles/xx.toml"));
}
