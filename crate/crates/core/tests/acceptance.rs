//! Acceptance gate. Runs every release criterion at its pinned tolerance and
//! prints one pass/fail line per criterion:
//!
//! ```text
//! cargo test -p bigv-core --test acceptance -- --nocapture
//! ```

use bigv_core::report::run_acceptance;

#[test]
fn acceptance_criteria() {
    let report = run_acceptance(None).expect("claim suite runs");
    for claim in &report.claims {
        let status = if claim.passed { "PASS" } else { "FAIL" };
        println!(
            "[{status}] {} — {} ({} checks)",
            claim.id,
            claim.title,
            claim.checks.len()
        );
        for check in &claim.checks {
            if !check.passed {
                println!(
                    "       failed: {} — measured {}, requirement {}",
                    check.name, check.measured, check.requirement
                );
            }
        }
    }
    assert!(
        report.all_passed,
        "failing criteria: {:?}",
        report
            .failing()
            .iter()
            .map(|c| c.id.as_str())
            .collect::<Vec<_>>()
    );
}
