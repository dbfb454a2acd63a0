use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pbcdcl::bench::{read_records_file, BenchStatus};

fn pbcdcl() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pbcdcl"));
    c.env_remove("PBCDCL_TIME_LIMIT");
    c
}

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../instances").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Pigeonhole with pairwise at-most-one clauses: hard for resolution.
fn clausal_php(pigeons: usize, holes: usize) -> String {
    let x = |p: usize, h: usize| p * holes + h + 1;
    let mut s = String::new();
    for p in 0..pigeons {
        let t: Vec<String> = (0..holes).map(|h| format!("+1 x{}", x(p, h))).collect();
        s += &format!("{} >= 1 ;\n", t.join(" "));
    }
    for h in 0..holes {
        for p in 0..pigeons {
            for q in p + 1..pigeons {
                s += &format!("+1 ~x{} +1 ~x{} >= 1 ;\n", x(p, h), x(q, h));
            }
        }
    }
    s
}

#[test]
fn exit_codes_follow_the_status() {
    for (file, code, line) in [
        ("php-4-3.opb", 20, "s UNSATISFIABLE"),
        ("cardinality.opb", 10, "s SATISFIABLE"),
        ("knapsack.opb", 30, "s OPTIMUM FOUND"),
    ] {
        let o = pbcdcl().args(["solve", "--preset", "sat4j-gr-best"]).arg(corpus(file)).output().unwrap();
        assert_eq!(o.status.code(), Some(code), "{file}");
        assert!(stdout(&o).lines().any(|l| l == line), "{file}: {}", stdout(&o));
    }
}

#[test]
fn knapsack_reports_improving_bounds() {
    let o = pbcdcl().args(["solve"]).arg(corpus("knapsack.opb")).output().unwrap();
    let out = stdout(&o);
    let bounds: Vec<i64> = out.lines().filter_map(|l| l.strip_prefix("o ")?.parse().ok()).collect();
    assert!(bounds.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(bounds.last(), Some(&10));
}

#[test]
fn unknown_preset_or_flag_is_a_usage_error() {
    let o = pbcdcl().args(["solve", "--preset", "fastest"]).arg(corpus("php-4-3.opb")).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = pbcdcl().args(["solve", "--frobnicate"]).arg(corpus("php-4-3.opb")).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = pbcdcl().args(["solve", "--bump", "bump-everything"]).arg(corpus("php-4-3.opb")).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = pbcdcl()
        .args(["solve", "--restart", "restart-degree", "--restart-k", "1.5"])
        .arg(corpus("php-4-3.opb"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_instance_is_an_error() {
    let o = pbcdcl().args(["solve", "/nonexistent/x.opb"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn explicit_flags_override_the_preset() {
    let o = pbcdcl()
        .args(["solve", "--preset", "sat4j-gr-best", "--bump", "bump-assigned"])
        .arg(corpus("php-4-3.opb"))
        .output()
        .unwrap();
    let out = stdout(&o);
    assert!(out.contains("c --bump overrides preset sat4j-gr-best: bump-effective -> bump-assigned"), "{out}");
}

#[test]
fn individual_flags_reproduce_the_best_generalized_resolution_preset() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("php.opb");
    std::fs::write(&file, clausal_php(6, 5)).unwrap();
    let run = |args: &[&str]| {
        let o = pbcdcl().arg("solve").arg(&file).args(args).arg("--stats").output().unwrap();
        stdout(&o).lines().filter(|l| !l.starts_with("c wall_time") && !l.starts_with("c mem_mb")).map(String::from).collect::<Vec<_>>()
    };
    let preset = run(&["--preset", "sat4j-gr-best"]);
    let flags = run(&[
        "--proof-system", "gr", "--bump", "bump-effective", "--delete", "delete-lbd-s", "--restart", "restart-degree",
    ]);
    assert_eq!(preset, flags);
}

#[test]
fn time_limit_falls_back_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("php.opb");
    std::fs::write(&file, clausal_php(12, 11)).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_pbcdcl"))
        .env("PBCDCL_TIME_LIMIT", "0.3")
        .args(["solve", "--preset", "sat4j-gr-default"])
        .arg(&file)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("s UNKNOWN"));
}

#[test]
fn hidden_oracle_subcommand() {
    let o = pbcdcl().arg("oracle").arg(corpus("knapsack.opb")).output().unwrap();
    assert_eq!(o.status.code(), Some(30));
    assert!(stdout(&o).starts_with("o 10\n"));
}

fn bench(dir: &Path, configs: &[&str], limit: &str, out: &Path) {
    let mut c = pbcdcl();
    c.arg("bench").arg(dir);
    for cfg in configs {
        c.args(["--config", cfg]);
    }
    let status = c.args(["--time-limit", limit, "--jobs", "2", "-o"]).arg(out).output().unwrap().status;
    assert!(status.success());
}

#[test]
fn suite_writes_one_row_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("in");
    std::fs::create_dir(&inst).unwrap();
    for f in ["php-4-3.opb", "knapsack.opb"] {
        std::fs::copy(corpus(f), inst.join(f)).unwrap();
    }
    std::fs::write(inst.join("broken.opb"), "+1 x1 >= ;\n").unwrap();
    std::fs::write(inst.join("notes.txt"), "ignored").unwrap();
    let out = dir.path().join("r.csv");
    bench(&inst, &["sat4j-gr-best", "roundingsat-default"], "10", &out);
    let rows = read_records_file(&out).unwrap();
    assert_eq!(rows.len(), 6);
    let errors = rows.iter().filter(|r| r.status == BenchStatus::Error).count();
    assert_eq!(errors, 2);
    assert!(rows.iter().filter(|r| r.instance.ends_with("knapsack.opb")).all(|r| r.objective.as_deref() == Some("10")));

    let again = dir.path().join("r2.csv");
    bench(&inst, &["sat4j-gr-best", "roundingsat-default"], "10", &again);
    let strip = |p: &Path| {
        read_records_file(p)
            .unwrap()
            .into_iter()
            .map(|r| (r.instance, r.config, r.status, r.objective, r.conflicts, r.decisions, r.restarts, r.reductions))
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&out), strip(&again));
}

#[test]
fn suite_timeouts_are_unknown_at_the_limit() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("hard.opb"), clausal_php(12, 11)).unwrap();
    let out = dir.path().join("r.csv");
    bench(dir.path(), &["sat4j-gr-default"], "0.3", &out);
    let rows = read_records_file(&out).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].status, BenchStatus::Unknown);
    assert_eq!(rows[0].time_s, 0.3);
}

#[test]
fn vbs_rejects_mismatched_instance_sets() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    std::fs::write(&a, "instance,config,status,objective,conflicts,decisions,restarts,reductions,time_s,mem_mb\ni1,A,SAT,,1,1,0,0,5.0,1.0\n").unwrap();
    std::fs::write(&b, "instance,config,status,objective,conflicts,decisions,restarts,reductions,time_s,mem_mb\ni2,B,SAT,,1,1,0,0,3.0,1.0\n").unwrap();
    let o = pbcdcl().arg("vbs").arg(&a).arg(&b).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("A lacks i2"));

    std::fs::write(&b, "instance,config,status,objective,conflicts,decisions,restarts,reductions,time_s,mem_mb\ni1,B,SAT,,1,1,0,0,3.0,1.0\n").unwrap();
    let cactus = dir.path().join("cactus.csv");
    let o = pbcdcl().arg("vbs").arg(&a).arg(&b).arg("--cactus").arg(&cactus).output().unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("i1,B,SAT"));
    let c = std::fs::read_to_string(&cactus).unwrap();
    assert!(c.starts_with("series,solved,time_s\n"));
    assert!(c.contains("VBS,1,3.0"));
}
