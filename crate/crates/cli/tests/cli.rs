use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_badcycle"));
    c.env_remove("BADCYCLE_BUDGET");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn gen(dir: &Path, file: &str, args: &[&str]) -> PathBuf {
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", file]);
    assert_eq!(code(&run(dir, &full)), 0, "gen {args:?}");
    dir.join(file)
}

#[test]
fn hasse_machine_is_good_on_a_path() {
    let d = TempDir::new().unwrap();
    gen(d.path(), "hasse.machine", &["hasse-machine"]);
    gen(d.path(), "p5.graph", &["path", "--n", "5"]);
    let out = run(
        d.path(),
        &["check-good", "-m", "hasse.machine", "-g", "p5.graph"],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "good");
}

#[test]
fn bad_graph_exits_one_and_writes_witness() {
    let d = TempDir::new().unwrap();
    gen(d.path(), "hasse.machine", &["hasse-machine"]);
    std::fs::write(
        d.path().join("tri.graph"),
        r#"{"k":2,"vertices":["a","b","c"],"edges":[["a","b"],["b","c"],["c","a"]]}"#,
    )
    .unwrap();
    let out = run(
        d.path(),
        &[
            "check-good",
            "-m",
            "hasse.machine",
            "-g",
            "tri.graph",
            "-o",
            "w.json",
        ],
    );
    assert_eq!(code(&out), 1);
    let w: Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("w.json")).unwrap()).unwrap();
    assert_eq!(w["vertices"].as_array().unwrap().len(), 4);
    let oracle = run(
        d.path(),
        &[
            "check-good",
            "-m",
            "hasse.machine",
            "-g",
            "tri.graph",
            "--oracle",
        ],
    );
    assert_eq!(code(&oracle), 1);
}

#[test]
fn example_machine_has_one_order_system() {
    let d = TempDir::new().unwrap();
    gen(d.path(), "ex.machine", &["example3-machine"]);
    let out = run(
        d.path(),
        &[
            "--format",
            "json",
            "find-order-system",
            "-m",
            "ex.machine",
            "--all",
            "-o",
            "sys.json",
        ],
    );
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["count"], 1);
    let systems: Vec<Value> =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("sys.json")).unwrap()).unwrap();
    std::fs::write(d.path().join("one.json"), systems[0].to_string()).unwrap();
    let check = run(
        d.path(),
        &["verify-order-system", "-m", "ex.machine", "-s", "one.json"],
    );
    assert_eq!(code(&check), 0);
}

#[test]
fn explicit_hasse_n3_has_chromatic_number_3() {
    let d = TempDir::new().unwrap();
    gen(d.path(), "h3.graph", &["explicit-hasse", "--n", "3"]);
    let out = run(d.path(), &["chromatic", "-g", "h3.graph", "--exact"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "3");
}

#[test]
fn order_round_trip_and_decide2() {
    let d = TempDir::new().unwrap();
    gen(d.path(), "c.machine", &["counter-machine", "--n", "3"]);
    assert_eq!(
        code(&run(
            d.path(),
            &["find-order", "-m", "c.machine", "-o", "c.order"]
        )),
        0
    );
    assert_eq!(
        code(&run(
            d.path(),
            &["verify-order", "-m", "c.machine", "-o", "c.order"]
        )),
        0
    );
    assert_eq!(code(&run(d.path(), &["decide2", "-m", "c.machine"])), 0);
    assert_eq!(code(&run(d.path(), &["paths-good", "-m", "c.machine"])), 0);
    // reversing copy 1 breaks the order
    let order: Vec<(String, usize)> =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("c.order")).unwrap()).unwrap();
    let mut firsts: Vec<(String, usize)> = order.iter().filter(|p| p.1 == 1).cloned().collect();
    firsts.reverse();
    let mut it = firsts.into_iter();
    let broken: Vec<(String, usize)> = order
        .iter()
        .map(|p| {
            if p.1 == 1 {
                it.next().unwrap()
            } else {
                p.clone()
            }
        })
        .collect();
    std::fs::write(
        d.path().join("bad.order"),
        serde_json::to_string(&broken).unwrap(),
    )
    .unwrap();
    assert_eq!(
        code(&run(
            d.path(),
            &["verify-order", "-m", "c.machine", "-o", "bad.order"]
        )),
        1
    );
}

#[test]
fn sat_reduction_decides() {
    let d = TempDir::new().unwrap();
    std::fs::write(d.path().join("s.cnf"), "p cnf 3 2\n1 -2 3 0\n-1 2 3 0\n").unwrap();
    let mut unsat = String::from("p cnf 3 8\n");
    for mask in 0..8 {
        let lits: Vec<String> = (0..3)
            .map(|v| {
                if mask >> v & 1 == 1 {
                    format!("{}", v + 1)
                } else {
                    format!("-{}", v + 1)
                }
            })
            .collect();
        unsat.push_str(&format!("{} 0\n", lits.join(" ")));
    }
    std::fs::write(d.path().join("u.cnf"), unsat).unwrap();
    assert_eq!(
        code(&run(
            d.path(),
            &["reduce-3sat", "-i", "s.cnf", "-o", "s.machine", "--decide"]
        )),
        0
    );
    assert!(d.path().join("s.machine").exists());
    assert_eq!(
        code(&run(d.path(), &["reduce-3sat", "-i", "u.cnf", "--decide"])),
        1
    );
}

#[test]
fn balance_commands() {
    let d = TempDir::new().unwrap();
    std::fs::write(
        d.path().join("t.graph"),
        r#"{"k":2,"vertices":["a","b","c"],"edges":[["a","b"],["b","c"],["a","c"]]}"#,
    )
    .unwrap();
    assert_eq!(
        code(&run(
            d.path(),
            &["balance-check", "-g", "t.graph", "--alpha", "2"]
        )),
        1
    );
    assert_eq!(
        code(&run(
            d.path(),
            &["balance-check", "-g", "t.graph", "--alpha", "5/2"]
        )),
        0
    );
    let out = run(
        d.path(),
        &[
            "--format",
            "json",
            "color-balanced",
            "-g",
            "t.graph",
            "--alpha",
            "3",
        ],
    );
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["num_colors"].as_u64().unwrap() <= 4);
    assert_eq!(
        code(&run(
            d.path(),
            &["color-balanced", "-g", "t.graph", "--alpha", "2"]
        )),
        1
    );
    assert_eq!(
        code(&run(
            d.path(),
            &["balance-check", "-g", "t.graph", "--alpha", "-1"]
        )),
        2
    );
}

#[test]
fn relation_commands() {
    let d = TempDir::new().unwrap();
    std::fs::write(
        d.path().join("r.json"),
        r#"{"n":3,"pairs":[[1,2],[1,3],[2,3],[3,1]]}"#,
    )
    .unwrap();
    let out = run(d.path(), &["rel", "reverse", "r.json"]);
    assert_eq!(stdout(&out).trim(), "{(1,3),(2,1),(3,1),(3,2)}");
    let out = run(d.path(), &["rel", "compose", "r.json", "r.json"]);
    assert_eq!(stdout(&out).trim(), "{(1,1),(1,3),(2,1),(3,2),(3,3)}");
    assert_eq!(
        code(&run(d.path(), &["rel", "pq-check", "--alternating"])),
        0
    );
    assert_eq!(code(&run(d.path(), &["rel", "closure", "r.json"])), 0);
    assert_eq!(code(&run(d.path(), &["rel", "loop-k", "r.json"])), 0);
    std::fs::write(
        d.path().join("swap.json"),
        r#"{"n":2,"pairs":[[1,2],[2,1]]}"#,
    )
    .unwrap();
    assert_eq!(code(&run(d.path(), &["rel", "loop-k", "swap.json"])), 2);
    std::fs::write(
        d.path().join("set.json"),
        r#"[{"n":3,"pairs":[[1,2],[1,3],[2,3],[3,1]]}]"#,
    )
    .unwrap();
    assert_eq!(code(&run(d.path(), &["rel", "pq-check", "set.json"])), 1);
}

#[test]
fn exit_codes_for_bad_input_and_budget() {
    let d = TempDir::new().unwrap();
    assert_eq!(
        code(&run(d.path(), &["decide2", "-m", "missing.machine"])),
        2
    );
    std::fs::write(d.path().join("junk.machine"), "{").unwrap();
    assert_eq!(code(&run(d.path(), &["decide2", "-m", "junk.machine"])), 2);
    gen(d.path(), "h3.graph", &["explicit-hasse", "--n", "3"]);
    let out = run(
        d.path(),
        &["--budget", "3", "chromatic", "-g", "h3.graph", "--exact"],
    );
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("bounds"));
    let out = bin()
        .current_dir(d.path())
        .env("BADCYCLE_BUDGET", "3")
        .args(["chromatic", "-g", "h3.graph", "--exact"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}

#[test]
fn outputs_are_deterministic() {
    let d = TempDir::new().unwrap();
    let args = [
        "--seed",
        "11",
        "--format",
        "json",
        "gen",
        "random-machine",
        "--states",
        "3",
        "--cycling",
    ];
    let a = run(d.path(), &args);
    let b = run(d.path(), &args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let args = [
        "--seed", "5", "--jobs", "2", "oracle", "goodness", "--count", "60",
    ];
    let a = run(d.path(), &args);
    let b = run(d.path(), &args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn oracle_modes_agree() {
    let d = TempDir::new().unwrap();
    for mode in ["decide2", "sat", "balance"] {
        let out = run(d.path(), &["oracle", mode, "--count", "40"]);
        assert_eq!(code(&out), 0, "{mode}: {}", stdout(&out));
    }
}
