//! Runs the `vkgpat` binary over fixtures written to disk.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use super::fixtures::Fixture;

pub const BIN: &str = env!("CARGO_BIN_EXE_vkgpat");

pub fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

/// Writes the fixture's schema, data and hints under `dir` and returns the
/// input flags for them.
pub fn write_fixture(f: &Fixture, dir: &Path) -> Vec<String> {
    let ext = if f.schema.trim_start().starts_with('{') { "json" } else { "sql" };
    let schema = dir.join(format!("schema.{ext}"));
    fs::write(&schema, f.schema).expect("write schema");
    let mut args = vec!["--schema".to_string(), schema.display().to_string()];
    if !f.data.is_empty() {
        let data = dir.join("data");
        fs::create_dir_all(&data).expect("data dir");
        for (t, csv) in f.data {
            fs::write(data.join(format!("{t}.csv")), csv).expect("write csv");
        }
        args.extend(["--data".to_string(), data.display().to_string()]);
    }
    if !f.hints.is_empty() {
        let hints = dir.join("hints.json");
        fs::write(&hints, f.hints).expect("write hints");
        args.extend(["--hints".to_string(), hints.display().to_string()]);
    }
    args
}

/// Every file under `dir`, by relative path.
pub fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).expect("read dir") {
            let p = e.expect("dir entry").path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).expect("under dir").to_path_buf(), fs::read(&p).expect("read file"));
            }
        }
    }
    out
}

fn checked(args: &[String]) -> Result<Vec<u8>, String> {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let o = run(&refs);
    if !o.status.success() {
        return Err(format!("{} failed: {}", args.join(" "), String::from_utf8_lossy(&o.stderr)));
    }
    Ok(o.stdout)
}

/// Runs bootstrap, profile, classify and every report format into `out`.
/// Stdout of each command is kept too.
fn all_commands(inputs: &[String], has_data: bool, out: &Path) -> Result<Vec<Vec<u8>>, String> {
    let s = |p: &Path| p.display().to_string();
    let with = |head: &[&str], tail: &[String]| -> Vec<String> {
        head.iter().map(|x| x.to_string()).chain(inputs.iter().cloned()).chain(tail.iter().cloned()).collect()
    };
    let boot = out.join("bootstrap");
    let mut stdout = vec![checked(&with(&["bootstrap"], &["--out".into(), s(&boot)]))?];
    if has_data {
        let schema = &inputs[1];
        let data = &inputs[inputs.iter().position(|a| a == "--data").expect("data flag") + 1];
        stdout.push(checked(&[
            "profile".into(),
            "--schema".into(),
            schema.clone(),
            "--data".into(),
            data.clone(),
            "--out".into(),
            s(&out.join("profile.json")),
        ])?);
    }
    let obda = fs::read_dir(&boot)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .find(|p| p.extension().is_some_and(|x| x == "obda"))
        .ok_or("bootstrap wrote no .obda file")?;
    let cls = out.join("classify");
    stdout.push(checked(&with(&["classify"], &["--mappings".into(), s(&obda), "--out".into(), s(&cls)]))?);
    let assignments = cls.join(format!("{}.assignments.json", obda.file_stem().unwrap_or_default().to_string_lossy()));
    for format in ["text", "csv", "json"] {
        stdout.push(checked(&["report".into(), "--assignments".into(), s(&assignments), "--format".into(), format.into()])?);
    }
    Ok(stdout)
}

/// Runs every command twice on the fixture and compares all outputs byte
/// for byte. Returns how many files were compared.
pub fn check_determinism(f: &Fixture) -> Result<usize, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let inputs = write_fixture(f, tmp.path());
    let has_data = !f.data.is_empty();
    let (a, b) = (tmp.path().join("run1"), tmp.path().join("run2"));
    let out_a = all_commands(&inputs, has_data, &a)?;
    let out_b = all_commands(&inputs, has_data, &b)?;
    if out_a != out_b {
        return Err("standard output differs between runs".into());
    }
    let (sa, sb) = (snapshot(&a), snapshot(&b));
    if sa.keys().ne(sb.keys()) {
        return Err(format!("runs wrote different files: {:?} vs {:?}", sa.keys(), sb.keys()));
    }
    if let Some(p) = sa.keys().find(|p| sa[*p] != sb[*p]) {
        return Err(format!("{} differs between runs", p.display()));
    }
    Ok(sa.len())
}
