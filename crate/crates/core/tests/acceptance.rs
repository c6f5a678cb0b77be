//! Runs every criterion and prints one line each. Uses its own `main` so the
//! lines are shown by a plain `cargo test`.

use std::process::ExitCode;

use stablelat::suites::{run_all, SUITES};
use stablelat::Bounds;

fn main() -> ExitCode {
    let reports = run_all(&Bounds::default());
    assert_eq!(reports.len(), SUITES.len());
    for r in &reports {
        println!("{r}");
    }
    let failed: Vec<u8> = reports.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    if failed.is_empty() {
        println!("acceptance: {} of {} criteria pass", reports.len(), reports.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
