//! Space generators and the theorem catalog: exhaustive or seeded-random
//! verification of the named results, counterexample searches under
//! weakened hypotheses, and mutation self-tests that keep the verifiers
//! honest.

pub mod catalog;
mod checks_core;
mod checks_maps;
mod checks_product;
pub mod generate;
pub mod mutations;
pub mod report;
pub mod weakenings;

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;

pub use catalog::{catalog, verify, TheoremEntry};
pub use generate::{enum_spaces, space_count, SpaceSlot};
pub use mutations::{mutate_and_expect_failure, mutations};
pub use report::{Bound, TheoremReport, Violation};
pub use weakenings::{search_counterexample, weakenings};

/// Environment variable overriding the default instance budget.
pub const BUDGET_ENV: &str = "CAPMEASURE_BUDGET";

/// Default ceiling on the number of innermost checks a single run may
/// perform before refusing with an estimate.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

pub fn budget_ceiling() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

pub(crate) fn ensure_budget(estimate: u128) -> Result<()> {
    let budget = budget_ceiling();
    if estimate > budget as u128 {
        return Err(Error::BudgetExceeded {
            estimate: estimate.to_string(),
            budget,
            env: BUDGET_ENV,
        });
    }
    Ok(())
}

/// How instances are drawn from the instance space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Random { seed: u64, count: u64 },
}

/// Bounds of a verification run: maximum carrier size per space slot, the
/// value grid matrices draw from, and the sampling mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceSpec {
    sizes: Vec<usize>,
    grid: Vec<ExtReal>,
    pub mode: Mode,
}

impl InstanceSpec {
    /// `sizes[i]` is the maximum carrier size of the i-th space slot; the
    /// grid must contain 0 (point filters must be able to converge) and is
    /// stored sorted and deduplicated.
    pub fn new(sizes: Vec<usize>, grid: Vec<ExtReal>, mode: Mode) -> Result<InstanceSpec> {
        if sizes.is_empty() {
            return Err(Error::InvalidSpec("no space slots".into()));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidSpec("carrier sizes must be >= 1".into()));
        }
        let mut grid = grid;
        grid.sort_unstable();
        grid.dedup();
        if !grid.contains(&ExtReal::ZERO) {
            return Err(Error::InvalidSpec("value grid must contain 0".into()));
        }
        Ok(InstanceSpec { sizes, grid, mode })
    }

    pub fn exhaustive(sizes: Vec<usize>, grid: Vec<ExtReal>) -> Result<InstanceSpec> {
        InstanceSpec::new(sizes, grid, Mode::Exhaustive)
    }

    /// The default desk-scale grid {0, 1, inf}.
    pub fn default_grid() -> Vec<ExtReal> {
        vec![ExtReal::ZERO, ExtReal::int(1), ExtReal::INFINITY]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, slot: usize) -> usize {
        *self
            .sizes
            .get(slot)
            .or_else(|| self.sizes.last())
            .expect("nonempty sizes")
    }

    pub fn grid(&self) -> &[ExtReal] {
        &self.grid
    }

    /// Canonical one-line rendering, used in reports.
    pub fn render(&self) -> String {
        let sizes: Vec<String> = self.sizes.iter().map(|n| n.to_string()).collect();
        let grid: Vec<String> = self.grid.iter().map(|v| v.to_string()).collect();
        let mode = match &self.mode {
            Mode::Exhaustive => "exhaustive".to_string(),
            Mode::Random { seed, count } => format!("random(seed={seed},count={count})"),
        };
        format!("sizes=[{}] grid=[{}] mode={}", sizes.join(","), grid.join(","), mode)
    }
}

/// Parses a CLI grid argument like `0,1,inf`.
pub fn parse_grid(s: &str) -> Result<Vec<ExtReal>> {
    s.split(',')
        .map(|tok| ExtReal::from_str(tok.trim()))
        .collect()
}
