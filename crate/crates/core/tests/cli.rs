use std::process::{Command, Output};

use serde_json::Value;

fn mveuler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mveuler")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn eval_prints_reduced_fractions() {
    for (f, at, want) in [("x1 + !x1", "1/3", "1"), ("x1 * x2", "3/4,1/2", "1/4"), ("2.x1", "1/3", "2/3")] {
        let o = mveuler(&["eval", f, "--at", at]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o).trim(), want);
    }
}

#[test]
fn eval_rejects_decimals_and_bad_formulas() {
    assert_eq!(mveuler(&["eval", "x1", "--at", "0.5"]).status.code(), Some(2));
    assert_eq!(mveuler(&["eval", "x1 +", "--at", "1/2"]).status.code(), Some(2));
    assert_eq!(mveuler(&["eval", "x2", "--at", "1/2"]).status.code(), Some(2));
}

#[test]
fn chi_examples() {
    let o = mveuler(&["chi", "x1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["E"], 1);

    let o = mveuler(&["chi", "(x1*x1)|!(x1+x1)", "--method", "both"]);
    let r = json(&o);
    assert_eq!((r["E"].as_i64(), r["method"].as_str()), (Some(2), Some("both")));

    let o = mveuler(&["chi", "x1", "--theory", "x1|!x1"]);
    assert_eq!(json(&o)["E"], 1);
    assert_eq!(json(&o)["theory"], "x1 | !x1");
}

#[test]
fn chi_report_has_every_field() {
    let r = json(&mveuler(&["chi", "((x1*x1)|!(x1+x1)) | ((x2*x2)|!(x2+x2))"]));
    for key in ["formula", "theory", "dim", "method", "E", "n_bound", "triangulation", "oneset_faces", "flags"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert_eq!(r["E"], 0);
    assert_eq!(r["dim"], 2);
    for key in ["vertices", "maximal_simplexes", "max_denominator"] {
        assert!(r["triangulation"].get(key).is_some(), "missing triangulation.{key}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(mveuler(&["chi", "(x1*x1)|!(x1+x1)", "--cap-blowups", "0"]).status.code(), Some(3));
    let o = mveuler(&["chi", "x1", "--method", "recursive", "--cap-reductions", "0"]);
    assert_eq!(o.status.code(), Some(0), "a single hat needs no reduction");
    let o = mveuler(&["chi", "((x1*x1)|!(x1+x1)) | ((x2*x2)|!(x2+x2))", "--method", "recursive", "--cap-reductions", "1"]);
    assert_eq!(o.status.code(), Some(3));

    let o = mveuler(&["chi", "x1", "--theory", "x1 * !x1"]);
    assert_eq!(o.status.code(), Some(4));
    let r = json(&o);
    assert_eq!(r["E"], 0);
    assert_eq!(r["flags"][0], "inconsistent_theory");

    assert_eq!(mveuler(&["check-axioms", "--trials", "0", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(mveuler(&["check-axioms", "--trials", "3"]).status.code(), Some(2));
    assert_eq!(mveuler(&["chi", "x1", "--method", "fast"]).status.code(), Some(2));
    assert_eq!(mveuler(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mveuler(&["--help"]).status.code(), Some(0));
}

#[test]
fn check_axioms_examples() {
    let o = mveuler(&["check-axioms", "--trials", "1", "--vars", "1", "--depth", "1", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let s = json(&o);
    assert_eq!(s["failed"], 0);
    assert!(s["first_counterexample"].is_null());

    let o = mveuler(&["check-axioms", "--trials", "200", "--vars", "2", "--depth", "6", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["passed"], 200);
}

#[test]
fn identical_runs_give_identical_bytes() {
    let runs: [&[&str]; 3] = [
        &["check-axioms", "--trials", "25", "--vars", "2", "--seed", "9"],
        &["chi", "x1 & !x2 | 2.(x2 - x1)", "--method", "both"],
        &["emit-triangulation", "x1 * x2", "!x1 + x2"],
    ];
    for args in runs {
        let a = mveuler(args);
        let b = mveuler(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn artifacts_are_written() {
    let dir = std::env::temp_dir().join(format!("mveuler-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let trace = dir.join("trace.json");
    let tri = dir.join("tri.json");
    let formula = dir.join("phi.txt");
    std::fs::write(&formula, "((x1*x1)|!(x1+x1)) | ((x2*x2)|!(x2+x2))\n").unwrap();
    let o = mveuler(&[
        "chi",
        &format!("@{}", formula.display()),
        "--method",
        "recursive",
        "--trace",
        trace.to_str().unwrap(),
        "--emit-triangulation",
        tri.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let traces: Value = serde_json::from_slice(&std::fs::read(&trace).unwrap()).unwrap();
    assert!(!traces.as_array().unwrap().is_empty());
    assert!(traces[0].get("c_hats").is_some());
    let t: Value = serde_json::from_slice(&std::fs::read(&tri).unwrap()).unwrap();
    assert_eq!(t["dim"], 2);
    assert_eq!(t["vertices"].as_array().unwrap().len() as i64, json(&o)["triangulation"]["vertices"].as_i64().unwrap());
    std::fs::remove_dir_all(&dir).ok();
}
