//! Exercises the installed binary end to end: file outputs parse back,
//! exit codes follow the documented contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sat2span"))
}

fn write_fixture(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn verify_exit_codes_and_report_lines() {
    let dir = std::env::temp_dir().join("sat2span-cli-verify");
    std::fs::create_dir_all(&dir).unwrap();
    let sat = write_fixture(&dir, "sat.cnf", "p cnf 3 2\n1 2 0\n-1 3 0\n");
    let unsat = write_fixture(&dir, "unsat.cnf", "p cnf 2 4\n1 2 0\n1 -2 0\n-1 2 0\n-1 -2 0\n");

    let output = bin().args(["verify", sat.to_str().unwrap(), "--width", "2"]).output().unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let text = stdout(&output);
    assert!(text.contains("satisfiability"));
    assert!(text.contains("YES (constructive)"), "{text}");
    assert!(text.contains("all evaluated stages agree"), "{text}");

    let output = bin().args(["verify", unsat.to_str().unwrap(), "--width", "2"]).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("skipped"), "unsat channel stage is skipped");

    let missing = dir.join("nope.cnf");
    let output = bin().args(["verify", missing.to_str().unwrap()]).output().unwrap();
    assert_eq!(output.status.code(), Some(2), "unreadable input is an input error");

    let bad = write_fixture(&dir, "bad.cnf", "p cnf 2 1\n1 0\n");
    let output = bin().args(["verify", bad.to_str().unwrap(), "--width", "2"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2), "wrong clause width is an input error");

    // a budget too small for the satisfiability oracle starves a mandatory stage
    let output = bin()
        .args(["verify", sat.to_str().unwrap(), "--width", "2", "--budget", "2"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3), "{output:?}");

    // the environment variable sets the default budget; the flag wins over it
    let output = bin()
        .env("SAT2SPAN_BUDGET", "2")
        .args(["verify", sat.to_str().unwrap(), "--width", "2"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3), "{output:?}");
    let output = bin()
        .env("SAT2SPAN_BUDGET", "2")
        .args(["verify", sat.to_str().unwrap(), "--width", "2", "--budget", "4194304"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
}

#[test]
fn reduce_outputs_parse_back_and_solve_runs() {
    let dir = std::env::temp_dir().join("sat2span-cli-reduce");
    std::fs::create_dir_all(&dir).unwrap();
    let tiny = write_fixture(&dir, "tiny.cnf", "p cnf 1 2\n1 0\n-1 0\n");
    let prefix = dir.join("tiny-out");

    for stage in ["family", "cmw", "ca"] {
        let output = bin()
            .args([
                "reduce",
                tiny.to_str().unwrap(),
                "--width",
                "1",
                "--to",
                stage,
                "--output",
                prefix.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(0), "{stage}: {output:?}");
    }

    let f = std::fs::read_to_string(prefix.with_extension("f.family")).unwrap();
    assert_eq!(sat2span::formats::read_family(&f).unwrap().rows(), 1);
    let g = std::fs::read_to_string(prefix.with_extension("g.family")).unwrap();
    assert_eq!(sat2span::formats::read_family(&g).unwrap().rows(), 2);
    let cmw = std::fs::read_to_string(prefix.with_extension("cmw")).unwrap();
    let (g1, g2) = sat2span::formats::read_cmw(&cmw).unwrap();
    assert_eq!((g1.side(), g2.side()), (2, 1));
    let ca = std::fs::read_to_string(prefix.with_extension("ca")).unwrap();
    let file = sat2span::formats::read_ca(&ca).unwrap();
    assert_eq!(file.instance.vertex_count(), 8 * 2 + 8 + 1);

    // the written instance is the unsatisfiable merge: the exact solver must
    // report that the span bound is infeasible
    let output = bin().args(["solve", prefix.with_extension("ca").to_str().unwrap()]).output().unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    assert!(stdout(&output).contains("exceeds cap"), "{}", stdout(&output));

    let output = bin()
        .args(["solve", prefix.with_extension("ca").to_str().unwrap(), "--budget", "10"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3), "node budget exhaustion is exit 3");
}

#[test]
fn solve_reports_span_and_witness_on_a_gadget_file() {
    let dir = std::env::temp_dir().join("sat2span-cli-solve");
    std::fs::create_dir_all(&dir).unwrap();
    let gadget = sat2span::gadget::matchings_to_ca(
        &sat2span::matching::WeightedBipartiteGraph::from_u64_rows(&[&[2]]).unwrap(),
    )
    .unwrap();
    let file = sat2span::formats::CaFile { instance: gadget.instance.clone(), handles: Default::default() };
    let path = write_fixture(&dir, "gadget.ca", &sat2span::formats::write_ca(&file));

    let output = bin().args(["solve", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    assert!(text.contains("minimal span 21"), "{text}");
    assert!(text.contains("ordering:"), "{text}");

    let output = bin().args(["solve", path.to_str().unwrap(), "--cap", "20"]).output().unwrap();
    assert!(stdout(&output).contains("exceeds cap 20"));
}

#[test]
fn stats_prints_the_size_identities() {
    let dir = std::env::temp_dir().join("sat2span-cli-stats");
    std::fs::create_dir_all(&dir).unwrap();
    let sat = write_fixture(&dir, "sat.cnf", "p cnf 3 2\n1 2 0\n-1 3 0\n");
    let output = bin().args(["stats", sat.to_str().unwrap(), "--width", "2"]).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    assert!(text.contains("4 vertices per side"), "{text}");
    assert!(text.contains("9 vertices per side"), "{text}");
    assert!(text.contains("105 vertices (expected 105)"), "{text}");
    assert!(text.contains("all hold"), "{text}");
}
