//! Runner for the acceptance suite in `tests/acceptance.rs`.
//!
//! Lives in its own package so that cargo, which stops at the first failing
//! test binary, has already run every other target by the time it gets here.

use std::time::{Duration, Instant};

/// Outcome of one criterion: the verdict and the measured values behind it.
#[derive(Debug, Clone)]
pub struct Check {
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Check {
            pass,
            detail: detail.into(),
        }
    }

    /// Combines sub-checks; passes only if all of them do.
    pub fn all(parts: Vec<Check>) -> Self {
        let pass = parts.iter().all(|c| c.pass);
        let detail = parts
            .iter()
            .map(|c| format!("{}{}", if c.pass { "" } else { "[x] " }, c.detail))
            .collect::<Vec<_>>()
            .join("; ");
        Check { pass, detail }
    }
}

pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub budget: Duration,
    pub run: fn() -> Check,
}

/// Runs each criterion in order, prints one line per criterion and returns
/// the number of failures. Going over the time budget counts as a failure.
pub fn run_all(criteria: &[Criterion], filter: Option<&str>) -> usize {
    let mut failures = 0;
    for c in criteria {
        if let Some(f) = filter {
            if !c.name.contains(f) && f != c.id.to_string() {
                continue;
            }
        }
        let start = Instant::now();
        let check = (c.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.budget;
        let pass = check.pass && in_time;
        failures += usize::from(!pass);
        println!(
            "{} criterion {:>2} {}: {} ({:.1} s of {} s{})",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            check.detail,
            elapsed.as_secs_f64(),
            c.budget.as_secs(),
            if in_time { "" } else { ", over budget" },
        );
    }
    failures
}
