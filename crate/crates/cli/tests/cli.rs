use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use resplan::report::sections;
use tempfile::TempDir;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let ws = Workspace {
            dir: TempDir::new().unwrap(),
        };
        ws.write("junction.dom", resplan::fixtures::JUNCTION);
        ws.write("tables.dom", resplan::fixtures::TABLES);
        ws.write("ff_ff.plan", "A1: F F\nA2: F F\n");
        ws.write("skip_skip.plan", "A1: skip skip\nA2: skip skip\n");
        ws.write("a1_ff.plan", "A1: F F\n");
        ws
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_resplan"))
            .current_dir(self.dir.path())
            .args(args)
            .output()
            .unwrap()
    }
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn attribute_cpr_in_both_forward_plan() {
    let ws = Workspace::new();
    let o = ws.run(&[
        "attribute",
        "CPR",
        "junction.dom",
        "--plan",
        "ff_ff.plan",
        "--agent",
        "A1",
        "--outcome",
        "!(G !collision)",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("CPR agent=A1 holds=true\n"), "{out}");
    let secs = sections(&out);
    assert_eq!(secs[0].0, "counter-plan");
    assert!(secs[0].1.contains("A1: skip skip"));
}

#[test]
fn attribute_reports_false_verdicts_with_exit_zero() {
    let ws = Workspace::new();
    let o = ws.run(&[
        "attribute",
        "car",
        "junction.dom",
        "--plan",
        "ff_ff.plan",
        "--agent",
        "A1",
        "--outcome",
        "!(G !collision)",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "CAR agent=A1 holds=false\n");
}

#[test]
fn coordinate_picks_idle_plans() {
    let ws = Workspace::new();
    let o = ws.run(&[
        "coordinate",
        "junction.dom",
        "--outcome",
        "G !collision",
        "--horizon",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "choice A1: skip skip\nchoice A2: skip skip\n--- joint\nA1: skip skip\nA2: skip skip\nomega holds=true\n"
    );
}

#[test]
fn check_skip_history() {
    let ws = Workspace::new();
    let o = ws.run(&[
        "check",
        "junction.dom",
        "--plan",
        "skip_skip.plan",
        "--formula",
        "G !crossed1",
    ]);
    assert_eq!(stdout(&o), "true\n");
    let o = ws.run(&[
        "check",
        "junction.dom",
        "--plan",
        "ff_ff.plan",
        "--formula",
        "F crossed1",
    ]);
    assert_eq!(stdout(&o), "false\n");
    let o = ws.run(&[
        "check",
        "junction.dom",
        "--plan",
        "skip_skip.plan",
        "--formula",
        "crossed2",
        "--start",
        "{crossed2}",
    ]);
    assert_eq!(stdout(&o), "true\n");
}

#[test]
fn find_plan_prints_plan_or_none() {
    let ws = Workspace::new();
    let o = ws.run(&[
        "find-plan",
        "junction.dom",
        "--avoid",
        "CPR",
        "--agent",
        "A1",
        "--outcome",
        "F collision",
        "--horizon",
        "2",
    ]);
    assert_eq!(stdout(&o), "A1: skip skip\n");
    let o = ws.run(&[
        "find-plan",
        "junction.dom",
        "--avoid",
        "CPR",
        "--agent",
        "A1",
        "--outcome",
        "!collision",
        "--horizon",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    // with no steps there is nothing to deviate from, so the empty plan passes
    assert_eq!(stdout(&o), "A1:\n");
    let o = ws.run(&[
        "find-plan",
        "junction.dom",
        "--avoid",
        "CAR",
        "--agent",
        "A1",
        "--outcome",
        "true",
        "--horizon",
        "1",
    ]);
    assert_eq!(stdout(&o), "A1: skip\n");
}

/// Witnesses printed by `anticipate` replay through `attribute` and `check`.
#[test]
fn anticipation_witness_replays() {
    let ws = Workspace::new();
    let omega = "F collision";
    let o = ws.run(&[
        "anticipate",
        "CPR",
        "junction.dom",
        "--agent-plan",
        "a1_ff.plan",
        "--agent",
        "A1",
        "--outcome",
        omega,
    ]);
    let out = stdout(&o);
    assert!(out.starts_with("CPR agent=A1 holds=true\n"), "{out}");
    let secs = sections(&out);
    let field = |name: &str| secs.iter().find(|s| s.0 == name).unwrap().1.clone();
    let start = field("start");
    ws.write("witness.plan", &field("plan"));
    ws.write("counter.plan", &field("counter-plan"));

    let o = ws.run(&[
        "attribute",
        "CPR",
        "junction.dom",
        "--plan",
        "witness.plan",
        "--agent",
        "A1",
        "--outcome",
        omega,
        "--start",
        start.trim(),
    ]);
    assert!(stdout(&o).starts_with("CPR agent=A1 holds=true\n"));
    let o = ws.run(&[
        "check",
        "junction.dom",
        "--plan",
        "counter.plan",
        "--formula",
        omega,
        "--start",
        start.trim(),
    ]);
    assert_eq!(stdout(&o), "false\n");
}

#[test]
fn output_is_deterministic() {
    let ws = Workspace::new();
    let args = [
        "anticipate",
        "AAR",
        "junction.dom",
        "--agent-plan",
        "a1_ff.plan",
        "--agent",
        "A1",
        "--outcome",
        "F crossed1",
    ];
    assert_eq!(stdout(&ws.run(&args)), stdout(&ws.run(&args)));
    let verify = ["verify", "--seeds", "20", "--seed", "7"];
    assert_eq!(stdout(&ws.run(&verify)), stdout(&ws.run(&verify)));
}

#[test]
fn parse_errors_exit_one_with_position() {
    let ws = Workspace::new();
    ws.write(
        "bad.dom",
        "agents: A\nprops: p\ninit: {p}\neffect+ A jump p: true\n",
    );
    let o = ws.run(&["check", "bad.dom", "--plan", "ff_ff.plan", "--formula", "p"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.dom:4:"), "{}", stderr(&o));

    let o = ws.run(&[
        "attribute",
        "CPR",
        "junction.dom",
        "--plan",
        "ff_ff.plan",
        "--agent",
        "A1",
        "--outcome",
        "F (collision",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("column"));

    let o = ws.run(&[
        "check",
        "missing.dom",
        "--plan",
        "ff_ff.plan",
        "--formula",
        "p",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn warnings_go_to_stderr() {
    let ws = Workspace::new();
    ws.write("w.dom", "agents: A\nprops: p\ninit: {p}\nepistemic A: {}\n");
    ws.write("a.plan", "A: skip\n");
    let o = ws.run(&["check", "w.dom", "--plan", "a.plan", "--formula", "p"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "true\n");
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn export_pddl_writes_files_and_manifest() {
    let ws = Workspace::new();
    let out = ws.path("out");
    let o = ws.run(&[
        "export-pddl",
        "cpr-anticipation",
        "junction.dom",
        "--plan",
        "a1_ff.plan",
        "--agent",
        "A1",
        "--outcome",
        "F collision",
        "--out",
        out.to_str().unwrap(),
        "--name",
        "junction",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("rule any-of"));
    let problems = manifest
        .lines()
        .filter(|l| l.starts_with("problem "))
        .count();
    assert_eq!(problems, 2);
    assert!(Path::new(&out.join("junction-twin-domain.pddl")).exists());
}

#[test]
fn unsupported_requests_exit_two() {
    let ws = Workspace::new();
    let out = ws.path("out");
    let base = |kind: &'static str, outcome: &'static str| {
        vec![
            "export-pddl".to_string(),
            kind.into(),
            "junction.dom".into(),
            "--plan".into(),
            "ff_ff.plan".into(),
            "--agent".into(),
            "A1".into(),
            "--outcome".into(),
            outcome.into(),
            "--out".into(),
            out.to_str().unwrap().into(),
        ]
    };
    for (kind, outcome) in [
        ("CCR", "F collision"),
        ("CPR", "F G (collision & F crossed1)"),
    ] {
        let args = base(kind, outcome);
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = ws.run(&args);
        assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    }
}

#[test]
fn verify_prints_one_line_per_check_and_seed() {
    let ws = Workspace::new();
    let o = ws.run(&["verify", "--seeds", "5", "--check", "exclusion"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(
        out.lines()
            .filter(|l| l.starts_with("exclusion seed="))
            .count(),
        5
    );
    assert!(out.contains("summary exclusion: PASS"));
    let o = ws.run(&["verify", "--seeds", "0"]);
    assert_eq!(stdout(&o), "");
}

#[test]
fn fixtures_print() {
    let ws = Workspace::new();
    assert_eq!(
        stdout(&ws.run(&["fixture", "tables"])),
        resplan::fixtures::TABLES
    );
    assert_eq!(ws.run(&["fixture", "nope"]).status.code(), Some(1));
}
