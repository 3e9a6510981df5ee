//! One PASS/FAIL line per acceptance criterion. Criteria 1-11 run in
//! process; criterion 12 drives the built binary.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use qmacro_cli::verify::{run_criterion, Outcome, CRITERIA};

const SEED: u64 = 20160501;

fn qmacro() -> Command { Command::new(env!("CARGO_BIN_EXE_qmacro")) }

fn sweep_to(path: &Path) -> Result<Vec<u8>, String> {
    let status = qmacro()
        .args(["sweep-n", "--seed", &SEED.to_string(), "--out"])
        .arg(path)
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("sweep-n exited with {status}"));
    }
    std::fs::read(path).map_err(|e| e.to_string())
}

fn end_to_end() -> Result<String, String> {
    let ids: Vec<String> = (1..=11).map(|i| i.to_string()).collect();
    let out = qmacro().args(["verify", "--criteria", &ids.join(",")]).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("verify failed:\n{}", String::from_utf8_lossy(&out.stdout)));
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = sweep_to(&dir.path().join("a.csv"))?;
    let b = sweep_to(&dir.path().join("b.csv"))?;
    if a != b {
        return Err("two sweep-n runs wrote different bytes".into());
    }
    Ok(format!("verify exit 0; sweep-n twice, {} bytes identical", a.len()))
}

fn main() {
    let mut outcomes: Vec<Outcome> = Vec::new();
    for (id, _, _) in CRITERIA.iter().filter(|c| c.0 != 12) {
        let o = run_criterion(*id, SEED);
        println!("{}", o.line());
        outcomes.push(o);
    }
    let start = Instant::now();
    let (passed, detail) = match end_to_end() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    let o = Outcome { id: 12, name: CRITERIA[11].1, passed, detail, elapsed: start.elapsed() };
    println!("{}", o.line());
    outcomes.push(o);
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
