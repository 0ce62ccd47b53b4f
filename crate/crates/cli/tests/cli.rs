use std::path::Path;
use std::process::{Command, Output};

fn resnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resnet")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn list_names_every_experiment() {
    let out = resnet(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["resolvent-check", "gasket-scaling", "vsrw-clock", "fin", "tree-scaling", "crg", "ghp", "exit-bound"] {
        assert!(text.contains(name), "{name} missing from:\n{text}");
    }
}

#[test]
fn resistance_then_reconstruct_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("net.txt");
    let matrix = dir.path().join("r.csv");
    let back = dir.path().join("back.txt");
    std::fs::write(&net, "# triangle with a tail\na b 1\nb c 2\na c 0.5\nc d 4\n").unwrap();

    assert!(resnet(&["resistance", "--network", path(&net), "--out", path(&matrix)]).status.success());
    assert!(resnet(&["reconstruct", "--matrix", path(&matrix), "--out", path(&back)]).status.success());

    let text = std::fs::read_to_string(&back).unwrap();
    let mut edges: Vec<(String, String, f64)> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().collect::<Vec<_>>())
        .filter(|t| t.len() == 3)
        .map(|t| {
            let (a, b) = if t[0] < t[1] { (t[0], t[1]) } else { (t[1], t[0]) };
            (a.to_owned(), b.to_owned(), t[2].parse().unwrap())
        })
        .collect();
    edges.sort_by(|x, y| (&x.0, &x.1).cmp(&(&y.0, &y.1)));
    let expected = [("a", "b", 1.0), ("a", "c", 0.5), ("b", "c", 2.0), ("c", "d", 4.0)];
    assert_eq!(edges.len(), expected.len(), "{text}");
    for (got, want) in edges.iter().zip(expected) {
        assert_eq!((got.0.as_str(), got.1.as_str()), (want.0, want.1));
        assert!((got.2 - want.2).abs() <= 1e-9 * want.2, "{got:?}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["resolvent-check", "--cases", "3", "--samples", "200", "--seed", "5", "--format", "json"];
    let a = resnet(&args);
    let b = resnet(&args);
    assert!(a.status.success());
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    let c = resnet(&["resolvent-check", "--cases", "3", "--samples", "200", "--seed", "6", "--format", "json"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn simulate_writes_a_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("net.txt");
    std::fs::write(&net, "x y 1\ny z 1\n").unwrap();
    let out = resnet(&["simulate", "--network", path(&net), "--start", "x", "--horizon", "5", "--seed", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("time,vertex\n0,x\n"), "{text}");
}

#[test]
fn exit_codes_follow_error_kinds() {
    // validation
    assert_eq!(resnet(&["gasket-scaling", "--max-level", "9"]).status.code(), Some(2));
    assert_eq!(resnet(&["vsrw-clock", "--levels", "abc"]).status.code(), Some(2));
    // capacity: paths P_8 against P_16 exceed the correspondence search
    let out = resnet(&["ghp", "--max-level", "0", "--max-k", "8"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error:"));
    // missing input file
    assert_eq!(resnet(&["resistance", "--network", "/nonexistent/net.txt"]).status.code(), Some(1));
}

#[test]
fn rejected_metric_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("square.csv");
    let s = 2f64.sqrt();
    std::fs::write(
        &m,
        format!("a,b,c,d\n0,1,{s},1\n1,0,1,{s}\n{s},1,0,1\n1,{s},1,0\n"),
    )
    .unwrap();
    assert_eq!(resnet(&["reconstruct", "--matrix", path(&m)]).status.code(), Some(2));
}
