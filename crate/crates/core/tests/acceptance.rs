//! The eight acceptance criteria, one line each.
//! `ACCEPTANCE_SEED` overrides the default seed.

use bsfiedler::suite::{run_criterion, CRITERIA};

fn seed() -> u64 {
    std::env::var("ACCEPTANCE_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(2024)
}

#[test]
fn acceptance() {
    let seed = seed();
    println!("acceptance seed {seed}");
    let results: Vec<_> = CRITERIA.iter().map(|c| run_criterion(c.0, seed)).collect();
    for r in &results {
        println!("{}", r.line());
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
