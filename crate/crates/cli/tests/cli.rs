use std::path::PathBuf;
use std::process::{Command, Output};

use qdp4_core::exactfield::Field;
use qdp4_core::pencil::{reconstruct, NormalForm, QuadricPencil};
use qdp4_core::sample;
use serde_json::{json, Value};

fn qdp4(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdp4"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(name: &str, v: &Value) -> String {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, serde_json::to_string(v).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

fn normal_pencil(field: &str, lambda: i64, mu: i64) -> QuadricPencil {
    let f = Field::parse(field).unwrap();
    reconstruct(&NormalForm::new(f.int(lambda), f.int(mu)).unwrap()).unwrap()
}

fn singular_pencil() -> Value {
    let diag = |d: [i64; 5]| {
        (0..5)
            .map(|i| (0..5).map(|j| if i == j { d[i].to_string() } else { "0".into() }).collect())
            .collect::<Vec<Vec<String>>>()
    };
    json!({ "field": {"kind": "rationals"}, "A": diag([1, 0, 1, 2, 2]), "B": diag([0, 1, 1, 1, 1]) })
}

#[test]
fn analyze_normal_pencil() {
    let path = write("p23.json", &normal_pencil("Q", 2, 3).to_json());
    let out = qdp4(&["analyze", &path]);
    assert_eq!(code(&out), 0);
    let r = stdout_json(&out);
    assert_eq!(r["normal_form"], json!(["2", "3"]));
    assert!(r["canonical_invariant"].as_array().unwrap().contains(&json!(["2", "3"])));
    assert_eq!(r["aut_p_order"], 2);
    assert_eq!(r["aut_x_order"], 32);
    assert_eq!(r["smooth"], true);
    // degenerate points infinity, 0, 1, 2, 3
    let pts: Vec<Value> = r["orbits"].as_array().unwrap().iter().map(|o| o["points"][0].clone()).collect();
    assert_eq!(
        pts,
        vec![json!(["1", "0"]), json!(["0", "1"]), json!(["1", "1"]), json!(["2", "1"]), json!(["3", "1"])]
    );
    let again = qdp4(&["analyze", &path]);
    assert_eq!(out.stdout, again.stdout);
    assert!(out.stderr.is_empty());
}

#[test]
fn singular_pencil_exits_3() {
    let path = write("singular.json", &singular_pencil());
    let out = qdp4(&["analyze", &path]);
    assert_eq!(code(&out), 3);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not smooth"));
}

#[test]
fn irreducible_quintic_over_f5() {
    let f = Field::prime(5).unwrap();
    for seed in 0..3 {
        let p = sample::pencil_with_shape(&f, &[5], seed).unwrap();
        let path = write(&format!("f5_irreducible_{seed}.json"), &p.to_json());
        let out = qdp4(&["analyze", &path]);
        assert_eq!(code(&out), 0);
        let r = stdout_json(&out);
        let sig = r["cycle_signature"].as_array().unwrap();
        assert_eq!(sig.len(), 1);
        assert_eq!(sig[0][0], 5);
        let minimal = sig[0][1] == -1;
        assert_eq!(r["minimal"], minimal);
        assert_eq!(r["ranks"]["picard"] == 1, minimal);
        let m = stdout_json(&qdp4(&["minimal", &path]));
        assert_eq!(m["minimal"], minimal);
    }
}

#[test]
fn iso_verdicts() {
    let f = Field::prime(11).unwrap();
    let mut rng = sample::rng(5);
    let p = sample::split_pencil(&f, &mut rng).unwrap();
    let a = write("iso_a.json", &p.to_json());
    let b = write("iso_b.json", &sample::disguise(&p, &mut rng).to_json());
    let out = qdp4(&["iso", &a, &b]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["isomorphic"], true);
    assert!(v["certificate"]["moebius"].is_array());

    let p23 = write("iso_23.json", &normal_pencil("Q", 2, 3).to_json());
    let p25 = write("iso_25.json", &normal_pencil("Q", 2, 5).to_json());
    let out = qdp4(&["iso", &p23, &p25]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["isomorphic"], false);

    let f7 = write("iso_f7.json", &normal_pencil("F_7", 2, 3).to_json());
    let f5 = write("iso_f5.json", &normal_pencil("F_5", 2, 3).to_json());
    assert_eq!(code(&qdp4(&["iso", &f7, &f5])), 4);
}

#[test]
fn parse_errors_exit_2() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = qdp4(&["analyze", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
    assert_eq!(code(&qdp4(&["analyze", "/nonexistent/pencil.json"])), 2);
    assert_eq!(code(&qdp4(&["frobnicate"])), 2);
    assert_eq!(code(&qdp4(&["reconstruct", "--lambda", "1", "--mu", "3"])), 2);
    assert_eq!(code(&qdp4(&["reconstruct", "--lambda", "2", "--mu", "3", "--field", "F_4"])), 2);
}

#[test]
fn count_points_and_guard() {
    let path = write("f3.json", &sample::smooth_pencil(&Field::prime(3).unwrap(), &mut sample::rng(2)).to_json());
    for k in ["1", "2"] {
        let out = qdp4(&["count-points", &path, "--ext", k]);
        assert_eq!(code(&out), 0);
        let v = stdout_json(&out);
        assert_eq!(v["agrees"], true);
        assert_eq!(v["count"], v["predicted"]);
    }
    let guarded = Command::new(env!("CARGO_BIN_EXE_qdp4"))
        .args(["count-points", &path, "--ext", "2"])
        .env("QDP4_POINTCOUNT_GUARD", "5")
        .output()
        .unwrap();
    assert_eq!(code(&guarded), 4);
    let q = write("q.json", &normal_pencil("Q", 2, 3).to_json());
    assert_eq!(code(&qdp4(&["count-points", &q])), 4);
}

#[test]
fn reconstruct_matches_library() {
    let out = qdp4(&["reconstruct", "--lambda", "-1", "--mu", "1/2"]);
    assert_eq!(code(&out), 0);
    let q = Field::rationals();
    let nf = NormalForm::new(q.int(-1), q.fraction(1, 2).unwrap()).unwrap();
    assert_eq!(stdout_json(&out), reconstruct(&nf).unwrap().to_json());
    let out = qdp4(&["reconstruct", "--lambda", "2", "--mu", "[0,1]", "--field", "F_3^2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["field"]["kind"], "extension");
}

#[test]
fn aut_lists_the_stabilizer() {
    let path = write("aut23.json", &normal_pencil("Q", 2, 3).to_json());
    let v = stdout_json(&qdp4(&["aut", &path]));
    assert_eq!(v["aut_p_order"], 2);
    assert_eq!(v["aut_x_order"], 32);
    assert_eq!(v["aut0"].as_array().unwrap().len(), 16);
    let perms: Vec<Value> = v["aut_p"].as_array().unwrap().iter().map(|e| e["permutation"].clone()).collect();
    // z -> 3 - z fixes infinity and swaps 0 <-> 3, 1 <-> 2
    assert_eq!(perms, vec![json!([1, 2, 3, 4, 5]), json!([1, 5, 4, 3, 2])]);
}

#[test]
fn kgroups_ranks() {
    let out = qdp4(&["kgroups", "ranks", "--signature", "[(5,-1)]", "--conic-bundle", "--relatively-minimal"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    for r in v["ranks"].as_array().unwrap() {
        assert_eq!(r["closed_form"], r["computed"], "{r}");
    }
    let rank = |space: &str| {
        v["ranks"].as_array().unwrap().iter().find(|r| r["space"] == space).unwrap()["computed"].clone()
    };
    assert_eq!((rank("picard"), rank("wpl(5)"), rank("torsion(5)")), (json!(1), json!(2), json!(1)));
    assert_eq!(v["conic_bundle"], json!({ "degenerate_fibres": 5, "k0x_rank": 4, "atom_rank": 2 }));

    let out = qdp4(&["kgroups", "ranks", "--signature", "[[2,1],[2,-1]]", "--conic-bundle", "--relatively-minimal"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn groupoid_verify() {
    let sample = qdp4(&["groupoid", "sample", "--seed", "17"]);
    assert_eq!(code(&sample), 0);
    let path = write("groupoid_ok.json", &stdout_json(&sample));
    let out = qdp4(&["groupoid", "verify", &path, "--emit-psi"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["heavily_separable"], true);
    assert_eq!(v["s2"]["ok"], true);
    assert!(v["psi"].is_array() || v["psi"].is_object());

    // two non-isomorphic objects sent to one
    let point = |names: &[&str]| {
        json!({
            "objects": names,
            "morphisms": (0..names.len()).map(|i| json!({"source": i, "target": i})).collect::<Vec<_>>(),
            "identities": (0..names.len()).collect::<Vec<_>>(),
            "composition": (0..names.len()).map(|i| [i, i, i]).collect::<Vec<_>>(),
        })
    };
    let bad = json!({
        "source": point(&["a", "b"]),
        "target": point(&["c"]),
        "functor": {"objects": [0, 0], "morphisms": [0, 0]},
    });
    let out = qdp4(&["groupoid", "verify", &write("groupoid_bad.json", &bad)]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["injective_on_iso_classes"]["ok"], false);
}

#[test]
fn selftest_suites() {
    let names = stdout_json(&qdp4(&["selftest", "--list"]));
    let names: Vec<&str> = names.as_array().unwrap().iter().map(|n| n.as_str().unwrap()).collect();
    assert!(names.contains(&"weyl-order-1920"));
    assert!(names.contains(&"lefschetz-consistency"));
    let out = qdp4(&["selftest"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"].as_array().unwrap().len(), names.len());
    assert_eq!(code(&qdp4(&["selftest", "--only", "no-such-suite"])), 2);
}
