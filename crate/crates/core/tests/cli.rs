use serde_json::Value;
use tyiso::cli::{run, EXIT_INTERNAL, EXIT_NOINPUT, EXIT_PARSE, EXIT_USAGE};

fn json(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    (out.code, serde_json::from_str(&out.stdout).unwrap_or(Value::Null))
}

#[test]
fn normalize_text_and_trace() {
    assert_eq!(run(&["normalize", "(a | p -> p) & (p & q -> p)"]).stdout, "(a -> p) & (p -> p)\n");
    let (code, v) = json(&["normalize", "--trace", "a -> (b & c) | d"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    let steps = v["steps"].as_array().unwrap();
    assert_eq!(steps.first().unwrap()["before"], "a -> b & c | d");
    assert_eq!(steps.last().unwrap()["after"], v["normal"]);
    assert!(steps.iter().all(|s| s["position"].is_array() && s["rule"].is_string()));
}

#[test]
fn iso_exit_codes() {
    assert_eq!(run(&["iso", "a | b -> c", "(a -> c) & (b -> c)"]).code, 0);
    assert_eq!(run(&["iso", "a", "a & b"]).code, 1);
    assert_eq!(run(&["iso", "(s | t -> r) & p", "(t | s -> r) & p"]).code, 2);
    let (code, v) = json(&["--json", "iso", "a", "a & b"]);
    assert_eq!((code, v["verdict"].as_str()), (1, Some("NotIsomorphic")));
}

#[test]
fn witness_derivations_check() {
    let (code, v) = json(&["witness", "a -> b & c", "(a -> c) & (a -> b)"]);
    assert_eq!(code, 0);
    assert_eq!(v["forward_nf"], "\\x. x");
    let dir = std::env::temp_dir().join(format!("tyiso-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for side in ["forward", "backward"] {
        let file = dir.join(format!("{side}.json"));
        std::fs::write(&file, v["derivations"][side].to_string()).unwrap();
        let out = run(&["check-derivation", file.to_str().unwrap()]);
        assert_eq!(out.code, 0, "{}", out.stderr);
    }
    let mut broken = v["derivations"]["forward"].clone();
    broken["type"] = Value::from("a -> a");
    let file = dir.join("broken.json");
    std::fs::write(&file, broken.to_string()).unwrap();
    assert_eq!(run(&["check-derivation", file.to_str().unwrap()]).code, 1);
    std::fs::write(&file, "{ not json").unwrap();
    assert_eq!(run(&["check-derivation", file.to_str().unwrap()]).code, EXIT_PARSE);
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(run(&["check-derivation", "/nonexistent/d.json"]).code, EXIT_NOINPUT);
}

#[test]
fn leq_fhp_and_paths() {
    let (code, v) = json(&["leq", "a -> c", "a & b -> c | d", "--kind", "meet"]);
    assert_eq!((code, v["e"].as_str()), (0, Some("{L, R}")));
    assert_eq!(run(&["leq", "a", "b", "--kind", "join"]).code, 1);
    let swap = "\\x y1 y2. x y2 y1";
    assert_eq!(run(&["fhp", "recognize", swap]).stdout, "(2 1)\n");
    assert_eq!(run(&["fhp", "invert", swap]).stdout, "\\x y1 y2. x y2 y1\n");
    assert_eq!(run(&["fhp", "nf", swap, swap]).stdout, "\\x. x\n");
    assert_eq!(run(&["fhp", "recognize", "\\x. x x"]).code, 1);
    assert_eq!(run(&["paths", "agree", "(a -> b) -> c", "LR"]).stdout, "true\n");
    assert_eq!(run(&["paths", "context", "a -> [] -> b", "--kind", "d"]).stdout, "RL\n");
}

#[test]
fn errors_and_limits() {
    assert_eq!(run(&["normalize", "a -> ("]).code, EXIT_PARSE);
    assert_eq!(run(&["normalize"]).code, EXIT_USAGE);
    assert_eq!(run(&["--step-budget", "0", "normalize", "a"]).code, EXIT_USAGE);
    assert_eq!(run(&["--step-budget", "1", "normalize", "a -> (b & c) | d"]).code, EXIT_INTERNAL);
    let help = run(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("normalize"));
}

#[test]
fn deterministic() {
    let args = ["--strategy", "random", "--seed", "9", "witness", "(a | b -> c) & (d -> e)", "(d -> e) & (b -> c) & (a -> c)"];
    assert_eq!(run(&args), run(&args));
    assert_eq!(run(&args).code, 0);
}
