//! Randomised exhaustive checking of the structural properties of
//! responsibility over small generated domains.

mod checks;
mod generate;

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::Result;

pub use checks::{check_item, render_counterexample, Check, CheckResult, Counterexample, Status};
pub use generate::{
    corpus, corpus_item, random_outcome, random_pl, random_ppd, CorpusItem, DomainBounds,
};

/// Results for a whole corpus, ordered by seed and then by check.
#[derive(Debug, Clone)]
pub struct Report {
    pub items: Vec<CorpusItem>,
    pub results: Vec<CheckResult>,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.results.iter().filter(|r| !r.passed())
    }

    pub fn count(&self, check: Check, status: Status) -> usize {
        self.results
            .iter()
            .filter(|r| r.check == check && r.status == status)
            .count()
    }

    pub fn all_passed(&self) -> bool {
        self.failures().next().is_none()
    }

    fn item(&self, seed: u64) -> Option<&CorpusItem> {
        self.items.iter().find(|i| i.seed == seed)
    }

    /// One line per (check, seed), a summary per check, then a replayable
    /// block for each failure.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let status = match r.status {
                Status::Pass => "PASS",
                Status::Vacuous => "PASS (vacuous)",
                Status::Fail => "FAIL",
            };
            writeln!(out, "{} seed={} {status}", r.check, r.seed).unwrap();
        }
        out += &self.summary();
        for r in self.failures() {
            if let (Some(cx), Some(item)) = (&r.counterexample, self.item(r.seed)) {
                writeln!(out, "=== counterexample {} seed={}", r.check, r.seed).unwrap();
                out += &render_counterexample(item, cx);
            }
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for check in Check::ALL {
            let fail = self.count(check, Status::Fail);
            let vacuous = self.count(check, Status::Vacuous);
            let pass = self.count(check, Status::Pass);
            if fail + vacuous + pass == 0 {
                continue;
            }
            writeln!(
                out,
                "summary {check}: {} {pass} checked, {vacuous} vacuous, {fail} failed",
                if fail == 0 { "PASS" } else { "FAIL" }
            )
            .unwrap();
        }
        out
    }
}

/// Generates seeds `first..first + count` and runs `checks` on each item in
/// parallel.
pub fn run_corpus(
    bounds: &DomainBounds,
    first: u64,
    count: u64,
    checks: &[Check],
) -> Result<Report> {
    let items = corpus(bounds, first, count)?;
    run_items(items, checks)
}

pub fn run_items(items: Vec<CorpusItem>, checks: &[Check]) -> Result<Report> {
    let per_item: Vec<Vec<CheckResult>> = items
        .par_iter()
        .map(|item| check_item(item, checks))
        .collect::<Result<_>>()?;
    let mut results: Vec<CheckResult> = per_item.into_iter().flatten().collect();
    results.sort_by_key(|r| (r.seed, r.check));
    Ok(Report { items, results })
}

/// Re-runs one check on one regenerated item.
pub fn replay(bounds: &DomainBounds, seed: u64, check: Check) -> Result<CheckResult> {
    let item = corpus_item(&bounds.with_seed(seed))?;
    Ok(check_item(&item, &[check])?.remove(0))
}
