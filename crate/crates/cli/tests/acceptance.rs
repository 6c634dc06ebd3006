//! Acceptance report: one line per criterion. Criteria 1 to 10 come from
//! `kfpq verify-all`; criterion 11 compares two runs with the same seed.

use std::process::{exit, Command};

const SEED: &str = "20240601";

fn verify_all() -> (Vec<u8>, bool) {
    let out = Command::new(env!("CARGO_BIN_EXE_kfpq"))
        .args(["verify-all", "--seed", SEED])
        .output()
        .expect("kfpq runs");
    (out.stdout, out.status.success())
}

fn main() {
    let (first, ok_first) = verify_all();
    let (second, _) = verify_all();
    let text = String::from_utf8_lossy(&first);
    let mut all = ok_first;
    let mut seen = 0;
    for line in text.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")) {
        println!("{line}");
        all &= line.starts_with("PASS");
        seen += 1;
    }
    if seen != 10 {
        println!("FAIL    criteria 1-10: expected 10 report lines, got {seen}");
        all = false;
    }
    let same = first == second;
    println!(
        "{} 11 reproducible verify-all: {} bytes, identical across two runs with seed {SEED}={}",
        if same { "PASS" } else { "FAIL" },
        first.len(),
        if same { "yes" } else { "no" }
    );
    if !(all && same) {
        exit(1);
    }
}
