use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn freediv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freediv")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn corpus(name: &str) -> String {
    format!("{}/corpus/{}.job", env!("CARGO_MANIFEST_DIR"), name)
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn success_exits_zero_with_schema() {
    let o = freediv(&["is-free", "--input", &corpus("xyz_is_free")]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["schema"], "freediv-result/1");
    assert_eq!(v["command"], "is-free");
}

#[test]
fn subcommand_supplies_missing_command() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "a.job", "ring x, y\nweights 1, 1\ndivisor \"x*y\"\n");
    let o = freediv(&["derlog", "--input", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["command"], "derlog");
}

#[test]
fn parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.job", "command is-free\nring x, y\ndivisor \"x*w\"\n");
    let o = freediv(&["run", "--input", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    let missing = freediv(&["run", "--input", dir.path().join("absent.job").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn precondition_failures_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "sq.job", "command is-free\nring x\ndivisor \"x^2\"\n");
    let o = freediv(&["run", "--input", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json(&o)["error"]["kind"], "precondition");
}

#[test]
fn non_stabilization_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "unstable.job",
        "command ae-codim\nring x, y\nweights 1, 1\ngerm \"x\", \"x*y^2\"\ngerm-target X, Z\ngerm-target-weights 1, 3\n",
    );
    let o = freediv(&["run", "--input", p.to_str().unwrap(), "--degree-bound", "6"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(json(&o)["error"]["code"], 4);
}

#[test]
fn global_flags_reach_the_job() {
    let o = freediv(&[
        "run",
        "--input",
        &corpus("four_planes_critical_ideal"),
        "--order",
        "lex",
        "--seed",
        "7",
        "--degree-bound",
        "9",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let input = v["input"].as_str().unwrap();
    assert!(input.contains("order lex") && input.contains("seed 7") && input.contains("degree-bound 9"));
    assert_eq!(v["result"]["groebner_basis"]["order"], "lex");
}

#[test]
fn text_output_and_timing() {
    let o = freediv(&["run", "--input", &corpus("xyz_is_free"), "--output", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("command: is-free"));
    let plain = json(&freediv(&["run", "--input", &corpus("xyz_is_free")]));
    assert!(plain.get("timing_ms").is_none());
    let timed = json(&freediv(&["run", "--input", &corpus("xyz_is_free"), "--timing"]));
    assert!(timed["timing_ms"].is_u64());
}

#[test]
fn batch_writes_one_record_per_job_and_reports_the_worst_code() {
    let dir = tempfile::tempdir().unwrap();
    let jobs = dir.path().join("jobs");
    std::fs::create_dir(&jobs).unwrap();
    write(
        &jobs,
        "a.job",
        "command is-free\nring x, y\nweights 1, 1\ndivisor \"x*y\"\n",
    );
    write(&jobs, "b.job", "command is-free\nring x\ndivisor \"x^2\"\n");
    write(&jobs, "ignored.txt", "not a job");
    let out = dir.path().join("out");
    let o = freediv(&["batch", jobs.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let mut names: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names, ["a.json", "b.json"]);
}
