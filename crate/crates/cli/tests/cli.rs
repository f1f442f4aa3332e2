use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use purify_core::engine::{replay, ReductionTrace};
use purify_core::frontend::{parse_entailments, parse_signature, parse_strategies};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(name)
}

fn slpurify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slpurify"))
        .args(args)
        .output()
        .unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn purify_list_example() {
    let (sig, stg, input) = (corpus("sll.sig"), corpus("sll.stg"), corpus("sll_concat.sle"));
    let out = slpurify(&[
        "purify",
        "--sig",
        p(&sig),
        "--strategies",
        p(&stg),
        "--input",
        p(&input),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    assert!(stdout.starts_with("// 1: Purified after 3 steps\n"), "{stdout}");
    assert!(text(&out.stderr).contains("purified 1/1"));
    // the output is itself an entailment file
    let sig_v = parse_signature(&std::fs::read_to_string(&sig).unwrap()).unwrap();
    let back = parse_entailments(&stdout, &sig_v).unwrap();
    assert_eq!(back.len(), 1);
    assert!(back[0].is_purified());
}

#[test]
fn stuck_entailment_exits_with_one() {
    let out = slpurify(&[
        "purify",
        "--sig",
        p(&corpus("sll.sig")),
        "--strategies",
        p(&corpus("sll.stg")),
        "--input",
        p(&corpus("sll_cycle.sle")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("purified 0/1"));
    assert!(text(&out.stdout).contains("// 1: Stuck after 0 steps"));
}

#[test]
fn empty_input_is_vacuously_fine() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("none.sle");
    std::fs::write(&input, "// nothing here\n").unwrap();
    let out = slpurify(&[
        "purify",
        "--sig",
        p(&corpus("sll.sig")),
        "--strategies",
        p(&corpus("sll.stg")),
        "--input",
        p(&input),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(text(&out.stderr).contains("purified 0/0"));
}

#[test]
fn frame_mode_prints_the_frame() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("frame.sle");
    let out = slpurify(&[
        "frame",
        "--sig",
        p(&corpus("array.sig")),
        "--strategies",
        p(&corpus("array.stg")),
        "--input",
        p(&corpus("array_frame.sle")),
        "-o",
        p(&output),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(text(&out.stderr).contains("framed 1/1"));
    let written = std::fs::read_to_string(&output).unwrap();
    assert!(written.contains("// 1: FrameInferred after 6 steps"));
    assert!(
        written.contains("store_array_hole(a, 0, n, i, la) * store_array_hole(b, 0, n, i, lb)"),
        "{written}"
    );
    assert!(out.stdout.is_empty());
}

#[test]
fn trace_file_replays() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.json");
    let (sig, stg, input) = (corpus("array.sig"), corpus("array.stg"), corpus("array_loop.sle"));
    let out = slpurify(&[
        "purify",
        "--sig",
        p(&sig),
        "--strategies",
        p(&stg),
        "--input",
        p(&input),
        "--trace",
        p(&trace),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));

    let json = std::fs::read_to_string(&trace).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(doc["version"], 1);
    assert_eq!(doc["runs"].as_array().unwrap().len(), 3);
    assert_eq!(doc["runs"][0]["verdict"], "Purified");
    assert_eq!(doc["runs"][0]["steps"][0]["strategy"], "S8");

    let sig_v = parse_signature(&std::fs::read_to_string(&sig).unwrap()).unwrap();
    let prog = parse_strategies(&std::fs::read_to_string(&stg).unwrap(), &sig_v).unwrap();
    for t in ReductionTrace::from_json(&json, &sig_v).unwrap() {
        replay(&prog, &t).unwrap();
    }
}

#[test]
fn max_steps_cuts_runs_short() {
    let out = slpurify(&[
        "purify",
        "--sig",
        p(&corpus("array.sig")),
        "--strategies",
        p(&corpus("array.stg")),
        "--input",
        p(&corpus("array_loop.sle")),
        "--max-steps",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stdout).contains("StepLimit after 2 steps"));
    let zero = slpurify(&[
        "purify",
        "--sig",
        "x",
        "--strategies",
        "y",
        "--input",
        "z",
        "--max-steps",
        "0",
    ]);
    assert_eq!(zero.status.code(), Some(2));
}

#[test]
fn soundness_conditions() {
    let out = slpurify(&[
        "soundness",
        "--sig",
        p(&corpus("array.sig")),
        "--strategies",
        p(&corpus("array.stg")),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = text(&out.stdout);
    assert!(stdout.starts_with("soundness S3 :\n"));
    assert!(stdout.contains("soundness S5 : instantiate — always sound\n"));
}

#[test]
fn instantiate_only_library_is_always_sound() {
    let dir = tempfile::tempdir().unwrap();
    let stg = dir.path().join("inst.stg");
    std::fs::write(
        &stg,
        "strategy A\nright : exists x, ?x == ?y\naction : instantiate(x -> y);\n\n\
         strategy B\nright : exists x, ?y == ?x\naction : instantiate(x -> y);\n",
    )
    .unwrap();
    let sig = dir.path().join("empty.sig");
    std::fs::write(&sig, "").unwrap();
    let out = slpurify(&["soundness", "--sig", p(&sig), "--strategies", p(&stg)]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert_eq!(
        text(&out.stdout),
        "soundness A : instantiate — always sound\n\nsoundness B : instantiate — always sound\n"
    );
}

#[test]
fn validate_accepts_the_corpus() {
    let out = slpurify(&[
        "validate",
        "--sig",
        p(&corpus("array.sig")),
        "--strategies",
        p(&corpus("array.stg")),
        "--input",
        p(&corpus("array_loop.sle")),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(text(&out.stderr).starts_with("ok: "));
}

#[test]
fn validate_reports_positions() {
    let dir = tempfile::tempdir().unwrap();
    let stg = dir.path().join("bad.stg");
    std::fs::write(
        &stg,
        "strategy Bad\nleft : lseg(?p, ?q)\naction : left_erase(lseg(p, q));\n\n\
         strategy Scope\nleft : listrep(?p, ?l)\naction : left_add(listrep(r, l));\n",
    )
    .unwrap();
    let out = slpurify(&["validate", "--sig", p(&corpus("sll.sig")), "--strategies", p(&stg)]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = text(&out.stderr);
    let lines: Vec<&str> = stderr.lines().collect();
    assert!(lines.len() >= 2, "{stderr}");
    let prefix = format!("{}:2:", stg.display());
    assert!(lines[0].starts_with(&prefix), "{stderr}");
    assert!(stderr.contains(&format!("{}:7:", stg.display())), "{stderr}");

    let sle = dir.path().join("open.sle");
    std::fs::write(&sle, "forall p, listrep(p, l) |-- emp\n").unwrap();
    let out = slpurify(&["validate", "--sig", p(&corpus("sll.sig")), "--input", p(&sle)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        text(&out.stderr).starts_with(&format!("{}:1:", sle.display())),
        "{}",
        text(&out.stderr)
    );
}

#[test]
fn missing_file_is_a_usage_failure() {
    let out = slpurify(&["soundness", "--sig", "/nonexistent.sig", "--strategies", "x.stg"]);
    assert_eq!(out.status.code(), Some(2));
}
