use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn twvrp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twvrp")).args(args).env_remove("TWVRP_SCALE_GUARD").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TRIANGLE: &str = r#"{"n":3,"variant":"VRP","edges":[[0,1,1],[1,2,1],[0,2,1]],"depots":[0],"clients":[0,1,2],"k":1}"#;

fn doc(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn triangle_solves_and_verifies() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "tri.json", TRIANGLE);
    let out = dir.path().join("r.json");
    let o = twvrp(&["solve", "--instance", s(&inst), "--algorithm", "tw-dp", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let d = doc(&out);
    assert_eq!(d["weight"], 3);
    assert_eq!(d["algorithm"], "tw-dp");
    assert_eq!(code(&twvrp(&["verify", "--instance", s(&inst), "--routing", s(&out)])), 0);

    let o = twvrp(&["solve", "--instance", s(&inst), "--decide", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "no");
    let o = twvrp(&["solve", "--instance", s(&inst), "--decide", "3"]);
    assert_eq!(stdout(&o).trim(), "yes");
}

#[test]
fn matching_gadget_through_the_oracle() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("ntdm.json");
    let o = twvrp(&["gen", "--from", "ntdm", "--x", "1,2", "--y", "5,6", "--z", "7,9", "--b", "15", "--out", s(&inst)]);
    assert_eq!(code(&o), 0);
    assert_eq!(doc(&inst)["g"], 1962);
    let out = dir.path().join("r.json");
    assert_eq!(code(&twvrp(&["solve", "--instance", s(&inst), "--algorithm", "oracle", "--out", s(&out)])), 0);
    assert_eq!(doc(&out)["weight"], 3924);
    assert_eq!(code(&twvrp(&["verify", "--instance", s(&inst), "--routing", s(&out)])), 0);
    // numbers that do not sum to m * b
    assert_eq!(code(&twvrp(&["gen", "--from", "ntdm", "--x", "1,2", "--y", "5,6", "--z", "7,9", "--b", "16"])), 2);
}

#[test]
fn verify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "load.json",
        r#"{"n":3,"variant":"LoadCVRP","edges":[[0,1,1],[0,2,1]],"depots":[0],"clients":[1,2],"k":1,"ell":1,"demands":{"1":1,"2":1}}"#,
    );
    let over = write(&dir, "over.json", r#"{"walks":[[0,1,0,2,0]],"assignment":{"1":0,"2":0}}"#);
    let o = twvrp(&["verify", "--instance", s(&inst), "--routing", s(&over)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("load exceeded on walk 0"), "{}", stdout(&o));
    let truncated = write(&dir, "cut.json", r#"{"walks":[[0,1,0"#);
    assert_eq!(code(&twvrp(&["verify", "--instance", s(&inst), "--routing", s(&truncated)])), 2);
    let ok = write(&dir, "ok.json", r#"{"walks":[[0,1,0],[0,2,0]],"assignment":{"1":0,"2":1}}"#);
    assert_eq!(code(&twvrp(&["verify", "--instance", s(&inst), "--routing", s(&ok)])), 1, "two walks with k = 1");
}

#[test]
fn malformed_instances_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"n":2,"variant":"VRP","edges":[[0,1,1]],"depots":[0],"clients":[1],"k":1,"demands":{"1":1}}"#);
    let o = twvrp(&["solve", "--instance", s(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("field demands forbidden for VRP"));
    assert_eq!(code(&twvrp(&["solve", "--instance", s(&dir.path().join("missing.json"))])), 2);
    let evrp = write(&dir, "e.json", r#"{"n":2,"variant":"EVRP","edges":[[0,1,1]],"kappa":[1],"depots":[0],"clients":[1],"k":1}"#);
    assert_eq!(code(&twvrp(&["solve", "--instance", s(&evrp), "--algorithm", "clients"])), 2);
}

#[test]
fn scale_guard_refuses_with_exit_4() {
    let dir = TempDir::new().unwrap();
    // K10, every vertex a client: too wide for the DP, too many clients, too big for the oracle
    let mut edges = Vec::new();
    for u in 0..10 {
        for v in u + 1..10 {
            edges.push(format!("[{u},{v},1]"));
        }
    }
    let text = format!(r#"{{"n":10,"variant":"VRP","edges":[{}],"depots":[0],"clients":[0,1,2,3,4,5,6,7,8,9],"k":2}}"#, edges.join(","));
    let inst = write(&dir, "k10.json", &text);
    let o = twvrp(&["solve", "--instance", s(&inst)]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no applicable exact algorithm at this scale"));
    assert_eq!(code(&twvrp(&["solve", "--instance", s(&inst), "--algorithm", "clients"])), 4);
    assert_eq!(code(&twvrp(&["solve", "--instance", s(&inst), "--algorithm", "tw-dp"])), 4);
    // the volume bound still answers without any search
    let o = twvrp(&["solve", "--instance", s(&inst), "--decide", "5"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "no");
}

#[test]
fn generated_instances_solve_verify_and_repeat() {
    let dir = TempDir::new().unwrap();
    for variant in ["VRP", "EVRP", "LoadCVRP", "GasCVRP", "LoadGasCVRP"] {
        for seed in 0..6 {
            let seed = seed.to_string();
            let a = twvrp(&["gen", "--from", "random", "--seed", &seed, "--variant", variant, "--max-n", "6", "--tw2"]);
            let b = twvrp(&["gen", "--from", "random", "--seed", &seed, "--variant", variant, "--max-n", "6", "--tw2"]);
            assert_eq!(code(&a), 0);
            assert_eq!(a.stdout, b.stdout, "gen is deterministic");
            let inst = write(&dir, "inst.json", &stdout(&a));
            let mut docs = Vec::new();
            for run in 0..2 {
                let out = dir.path().join(format!("out{run}.json"));
                let o = twvrp(&["solve", "--instance", s(&inst), "--out", s(&out)]);
                assert_eq!(code(&o), 0, "{variant} {seed}: {}", String::from_utf8_lossy(&o.stderr));
                let mut d = doc(&out);
                if d["result"] == "optimal" {
                    let v = twvrp(&["verify", "--instance", s(&inst), "--routing", s(&out)]);
                    assert_eq!(code(&v), 0, "{variant} {seed}: {}", stdout(&v));
                }
                d.as_object_mut().unwrap().remove("wall_time_ms");
                docs.push(d);
            }
            assert_eq!(docs[0], docs[1], "solve is deterministic apart from wall time");
        }
    }
}

#[test]
fn decompose_a_tree() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "path.json", r#"{"n":4,"variant":"VRP","edges":[[0,1,1],[1,2,1],[1,3,1]],"depots":[0],"clients":[2],"k":1}"#);
    let o = twvrp(&["decompose", "--instance", s(&inst)]);
    assert_eq!(code(&o), 0);
    let header = stdout(&o).lines().next().unwrap().to_string();
    let fields: Vec<&str> = header.split_whitespace().collect();
    assert_eq!(&fields[..2], &["s", "td"]);
    assert_eq!(fields[3], "2", "width 1 means bags of size 2: {header}");
    let td = write(&dir, "path.td", &stdout(&o));
    let out = dir.path().join("r.json");
    assert_eq!(code(&twvrp(&["solve", "--instance", s(&inst), "--algorithm", "tw-dp", "--td", s(&td), "--out", s(&out)])), 0);
    assert_eq!(doc(&out)["weight"], 4);
}

#[test]
fn bin_packing_documents() {
    let dir = TempDir::new().unwrap();
    let bp = write(&dir, "bp.json", r#"{"items":[5,1,3],"B":5,"k":2}"#);
    let out = dir.path().join("r.json");
    assert_eq!(code(&twvrp(&["solve", "--instance", s(&bp), "--variant", "binpacking", "--out", s(&out)])), 0);
    let d = doc(&out);
    assert_eq!(d["result"], "feasible");
    assert_eq!(d["bins"].as_array().unwrap().len(), 2);
    let one = write(&dir, "bp1.json", r#"{"items":[5,1,3],"B":5,"k":1}"#);
    let o = twvrp(&["solve", "--instance", s(&one), "--variant", "binpacking"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("infeasible"));
    let zero = write(&dir, "bp0.json", r#"{"items":[0],"B":5,"k":1}"#);
    assert_eq!(code(&twvrp(&["solve", "--instance", s(&zero), "--variant", "binpacking"])), 2);

    let gen = dir.path().join("gadget.json");
    assert_eq!(code(&twvrp(&["gen", "--from", "binpacking", "--items", "5,1,3", "--capacity", "5", "--bins", "2", "--out", s(&gen)])), 0);
    let g = doc(&gen);
    assert_eq!(g["clients"].as_array().unwrap().len(), 9);
    assert_eq!(g["r"], 18);
}
