use std::fs;
use std::path::PathBuf;
use std::process::Command;

const FLOAT_TOL: f64 = 1e-12;

fn baseline_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/baselines")
}

fn tokens(text: &str) -> Vec<&str> {
    text.split(|c: char| c.is_whitespace() || matches!(c, ',' | ':' | '"' | '[' | ']' | '{' | '}' | ';' | '='))
        .filter(|t| !t.is_empty())
        .collect()
}

/// Equal up to last-bit differences in floating-point fields, which may come
/// from a different libm.
fn same(expected: &str, got: &str) -> bool {
    if expected == got {
        return true;
    }
    let (a, b) = (tokens(expected), tokens(got));
    a.len() == b.len()
        && a.iter().zip(&b).all(|(x, y)| {
            x == y
                || match (x.parse::<f64>(), y.parse::<f64>()) {
                    (Ok(u), Ok(v)) => (u - v).abs() <= FLOAT_TOL * u.abs().max(v.abs()),
                    _ => false,
                }
        })
}

#[test]
fn outputs_match_baselines() {
    let dir = baseline_dir();
    let listing = fs::read_to_string(dir.join("commands.txt")).unwrap();
    let mut checked = 0;
    for line in listing.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let (file, args) = line.split_once(':').unwrap();
        let out = Command::new(env!("CARGO_BIN_EXE_momentsq"))
            .args(args.split_whitespace())
            .output()
            .unwrap();
        assert!(out.status.success(), "{args}");
        let expected = fs::read_to_string(dir.join(file)).unwrap();
        let got = String::from_utf8(out.stdout).unwrap();
        assert!(same(&expected, &got), "{file} differs from `momentsq {}`", args.trim());
        checked += 1;
    }
    assert!(checked >= 10);
}
