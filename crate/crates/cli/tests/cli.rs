use std::process::Command;

use proptest::prelude::*;
use quantclass_cli::{run, RelationFile, Structure};
use quantclass_core::{EquivalenceRelation, PartialInjection, Relation, Universe};
use serde_json::Value;

fn json(args: &[&str]) -> (i32, Value) {
    let mut argv = vec!["quantclass"];
    argv.extend_from_slice(args);
    let out = run(argv);
    let v = if out.stdout.is_empty() { Value::Null } else { serde_json::from_str(&out.stdout).unwrap() };
    (out.code, v)
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn structure() -> impl Strategy<Value = (u32, Vec<Structure>)> {
    (1u32..7).prop_flat_map(|n| {
        let u = Universe::new(n).unwrap();
        let rel = (1usize..4, prop::collection::vec(prop::collection::vec(0..n, 3), 0..12)).prop_map(move |(k, rows)| {
            Structure::Rel(Relation::new(u, k, rows.into_iter().map(|r| r[..k].to_vec())).unwrap())
        });
        let eq = prop::collection::vec(0..n + 1, n as usize).prop_map(move |labels| {
            let mut blocks: Vec<Vec<u32>> = vec![Vec::new(); n as usize + 1];
            for (x, &l) in labels.iter().enumerate() {
                blocks[l as usize].push(x as u32);
            }
            blocks.pop();
            Structure::Eq(EquivalenceRelation::new(u, blocks.into_iter().filter(|b| !b.is_empty()).collect()).unwrap())
        });
        let inj = (Just(()), prop::sample::subsequence((0..n).collect::<Vec<_>>(), 0..=n as usize))
            .prop_flat_map(move |(_, dom)| {
                let k = dom.len();
                (Just(dom), Just((0..n).collect::<Vec<_>>()).prop_shuffle()).prop_map(move |(dom, img)| {
                    Structure::Inj(PartialInjection::new(u, dom.into_iter().zip(img.into_iter().take(k)).collect()).unwrap())
                })
            });
        (Just(n), prop::collection::vec(prop_oneof![rel, eq, inj], 0..4))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn write_read_write_is_a_fixpoint((n, items) in structure()) {
        let mut f = RelationFile::new(Universe::new(n).unwrap());
        for (i, s) in items.into_iter().enumerate() {
            f.push(&format!("S{i}"), s).unwrap();
        }
        let text = f.format();
        let back = RelationFile::parse(&text).unwrap();
        prop_assert!(back.warnings.is_empty());
        prop_assert_eq!(&back.file, &f);
        prop_assert_eq!(back.file.format(), text);
    }
}

#[test]
fn invariants_of_a_unary_relation() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "u.rel", "universe 6\nrel R 1\n0\n1\nend\n");
    let (code, v) = json(&["invariants", &f, "--rel", "R"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["lambda0_prime"]["value"], 2);
    assert_eq!(v["results"]["lambda0"], 2);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "invariants");
}

#[test]
fn decompositions_report_their_checks() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "m.rel", "universe 12\nrel R 2\n0 1\n1 0\n0 0\nend\n");
    let (code, v) = json(&["decompose", &f, "--rel", "R", "--kind", "mon"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["reconstruction"]["agrees"], true);
    assert_eq!(v["results"]["r1_domain"]["within_bound"], true);
    let (code, v) = json(&["decompose", &f, "--rel", "R", "--kind", "inj"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["results"]["clauses"]["all"], true);
    assert_eq!(v["results"]["reconstruction"]["agrees"], true);
    let big = write(&dir, "big.rel", "universe 20\nrel R 2\n0 1\n1 0\n0 0\nend\n");
    let (code, v) = json(&["extract-mon", &big, "--rel", "R"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["reevaluated"], true);
    assert_eq!(v["results"]["size"], v["results"]["lambda0"]);
}

#[test]
fn encode_emits_a_readable_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "e.rel", "universe 8\nrel R 2\n0 1\n1 2\nend\n");
    let out = dir.path().join("enc.rel");
    let (code, v) = json(&["encode", &f, "--rel", "R", "--set", "0,1,2", "--emit", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["results"]["decoding"]["agrees"], true);
    let back = RelationFile::parse(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(back.file.get("F0").is_some() && back.file.get("F1").is_some());
}

#[test]
fn formulas_and_families() {
    let (code, v) = json(&["eval", "--universe", "4", "--formula", "(E y (and (= x y) (not (= x 0))))", "--vars", "x"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["relation"]["tuples"], serde_json::json!([[1], [2], [3]]));
    let (code, v) = json(&["eval", "--universe", "3", "--formula", "(E2K S (E x (S x)))", "--family", "K=mon:1"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["results"]["value"], true);
    let (code, v) = json(&["check-def", "--universe", "4", "--k", "mon:1", "--formula", "(E x (and (S x) (A y (-> (S y) (= x y)))))"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["results"]["definable"], true);
    let (code, v) = json(&["family", "inj:2", "--universe", "4", "--list"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["count"], 72);
    assert_eq!(v["results"]["members"].as_array().unwrap().len(), 72);
}

#[test]
fn interpretation_commands() {
    let dir = tempfile::tempdir().unwrap();
    let phi = write(&dir, "i.fml", "# meet of two sets\n(and (S0 x0) (S1 x0))\n");
    let (code, v) = json(&["check-interp", "--universe", "6", "--phi", &phi, "--k1", "mon:1", "--k2", "mon:2"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["certified"], true);
    assert_eq!(v["results"]["certificate"]["verified"], true);
    let (code, v) = json(&["check-exp", "--universe", "6", "--phi", &phi, "--k1", "mon:2", "--k2", "mon:1"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["certified"], false);
    let (code, v) = json(&[
        "compose", "--universe", "8", "--formula12", "(and (S0 x0) (S1 x0))", "--formula23", "(and (S0 x0) (S1 x0))",
        "--k1", "mon:1", "--k2", "mon:2", "--k3", "mon:4",
    ]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["results"]["composed"]["verified"], true);
    assert_eq!(v["results"]["composed"]["rel_vars"].as_array().unwrap().len(), 4);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.rel", "universe 3\nrel R 1\n5\nend\n");
    let out = run(["quantclass", "invariants", &bad, "--rel", "R"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 3"), "{}", out.stderr);
    let (code, v) = json(&["family", "mon:*", "--universe", "30", "--list", "--max-family", "100"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "budget");
    let (code, _) = json(&["check-interp", "--universe", "4", "--formula", "(S0", "--k1", "mon:1", "--k2", "mon:1"]);
    assert_eq!(code, 2);
    assert_eq!(run(["quantclass", "no-such-command"]).code, 2);
    assert_eq!(run(["quantclass", "--help"]).code, 0);
    let (code, _) = json(&["family", "mon:1"]);
    assert_eq!(code, 2);
}

#[test]
fn reports_are_reproducible_and_text_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "r.rel", "universe 7\nrel R 2\n0 1\n2 3\n4 4\nend\n");
    let args = ["quantclass", "invariants", &f, "--rel", "R", "--format", "text"];
    let a = run(args);
    assert_eq!(a, run(args));
    assert!(a.stdout.lines().all(|l| l.contains(" = ")));
    assert!(a.stdout.contains("results.lambda0_prime.value = "));
}

#[test]
fn binary_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "r.rel", "universe 5\nrel R 1\n0\nend\n");
    let ok = Command::new(env!("CARGO_BIN_EXE_quantclass")).args(["invariants", &f, "--rel", "R"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["results"]["lambda0_prime"]["value"], 1);
    let bad = Command::new(env!("CARGO_BIN_EXE_quantclass")).args(["invariants", &f, "--rel", "Q"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
