//! Verification reports: instance counts, fully reproducible violation
//! witnesses, and deterministic renderings.
//!
//! The canonical text and the machine-readable summary exclude the wall
//! clock, so identical runs compare byte-for-byte; the CLI prints the
//! runtime separately.

use std::fmt::Write as _;
use std::time::Duration;

use serde_json::{json, Value};

use crate::extreal::ExtReal;
use crate::filter::{Filter, Map, Relation, Subset};
use crate::space::CapStructure;

use super::InstanceSpec;

/// One value bound in a violation witness. Witnesses carry the live
/// objects so a violation can be re-evaluated standalone.
#[derive(Clone, Debug)]
pub enum Bound {
    Space(CapStructure),
    Filter(Filter),
    Set(Subset),
    MapValue(Map),
    Rel(Relation),
    Class(String),
    Point(String),
    Value(ExtReal),
    Text(String),
}

impl Bound {
    fn render(&self) -> String {
        match self {
            Bound::Space(s) => {
                // inline space rendering: carrier, then rows separated by ';'
                let rows: Vec<String> = s
                    .rows()
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|v| v.to_string())
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .collect();
                format!("carrier[{}] matrix[{}]", s.carrier(), rows.join("; "))
            }
            Bound::Filter(f) => f.to_string(),
            Bound::Set(s) => s.to_string(),
            Bound::MapValue(m) => m.to_string(),
            Bound::Rel(r) => r.to_string(),
            Bound::Class(c) => c.clone(),
            Bound::Point(p) => p.clone(),
            Bound::Value(v) => v.to_string(),
            Bound::Text(t) => t.clone(),
        }
    }
}

/// A reproducible counterexample: the bound inputs plus both sides' exact
/// values as rendered strings.
#[derive(Clone, Debug)]
pub struct Violation {
    /// Deterministic position (outer instance index, inner counter); used
    /// for ordering, not rendered.
    pub order: (u64, u64),
    pub bindings: Vec<(&'static str, Bound)>,
    pub lhs: String,
    pub rhs: String,
}

impl Violation {
    pub fn binding(&self, name: &str) -> Option<&Bound> {
        self.bindings
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, b)| b)
    }

    pub fn space(&self, name: &str) -> Option<&CapStructure> {
        match self.binding(name) {
            Some(Bound::Space(s)) => Some(s),
            _ => None,
        }
    }

    pub fn filter(&self, name: &str) -> Option<&Filter> {
        match self.binding(name) {
            Some(Bound::Filter(f)) => Some(f),
            _ => None,
        }
    }

    pub fn set(&self, name: &str) -> Option<&Subset> {
        match self.binding(name) {
            Some(Bound::Set(s)) => Some(s),
            _ => None,
        }
    }

    pub fn map(&self, name: &str) -> Option<&Map> {
        match self.binding(name) {
            Some(Bound::MapValue(m)) => Some(m),
            _ => None,
        }
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        match self.binding(name) {
            Some(Bound::Rel(r)) => Some(r),
            _ => None,
        }
    }

    pub fn text(&self, name: &str) -> Option<&str> {
        match self.binding(name) {
            Some(Bound::Class(c)) => Some(c),
            Some(Bound::Point(p)) => Some(p),
            Some(Bound::Text(t)) => Some(t),
            _ => None,
        }
    }

    fn render(&self, out: &mut String) {
        out.push_str("violation:\n");
        for (name, bound) in &self.bindings {
            let _ = writeln!(out, "  {name}: {}", bound.render());
        }
        let _ = writeln!(out, "  lhs: {}", self.lhs);
        let _ = writeln!(out, "  rhs: {}", self.rhs);
    }

    fn summary(&self) -> Value {
        json!({
            "bindings": self
                .bindings
                .iter()
                .map(|(n, b)| json!([n, b.render()]))
                .collect::<Vec<_>>(),
            "lhs": self.lhs,
            "rhs": self.rhs,
        })
    }
}

/// Outcome of one catalog, weakening or mutation run.
#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub id: String,
    pub title: String,
    pub spec: InstanceSpec,
    pub instances: u64,
    pub violations: Vec<Violation>,
    pub runtime: Duration,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Deterministic multi-line rendering; excludes the runtime.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "theorem: {}", self.id);
        let _ = writeln!(out, "title: {}", self.title);
        let _ = writeln!(out, "spec: {}", self.spec.render());
        let _ = writeln!(out, "instances: {}", self.instances);
        let _ = writeln!(out, "violations: {}", self.violations.len());
        for v in &self.violations {
            v.render(&mut out);
        }
        out
    }

    /// Machine-readable summary; excludes the runtime.
    pub fn summary_json(&self) -> Value {
        json!({
            "theorem": self.id,
            "title": self.title,
            "spec": self.spec.render(),
            "instances": self.instances,
            "violations": self
                .violations
                .iter()
                .map(Violation::summary)
                .collect::<Vec<_>>(),
        })
    }
}

/// Sorts violations into deterministic order and caps how many are kept.
pub(crate) fn finish_violations(mut violations: Vec<Violation>) -> Vec<Violation> {
    violations.sort_by_key(|v| v.order);
    violations
}

/// Runs `work` over the outer index range, serially or on a rayon pool,
/// merging (instance count, violations) deterministically.
pub(crate) fn scan_outer<F>(total: u64, jobs: usize, work: F) -> (u64, Vec<Violation>)
where
    F: Fn(u64) -> (u64, Vec<Violation>) + Send + Sync,
{
    if jobs <= 1 || total <= 1 {
        let mut instances = 0u64;
        let mut violations = Vec::new();
        for i in 0..total {
            let (n, mut v) = work(i);
            instances += n;
            violations.append(&mut v);
        }
        (instances, finish_violations(violations))
    } else {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        let results: Vec<(u64, Vec<Violation>)> =
            pool.install(|| (0..total).into_par_iter().map(&work).collect());
        let mut instances = 0u64;
        let mut violations = Vec::new();
        for (n, mut v) in results {
            instances += n;
            violations.append(&mut v);
        }
        (instances, finish_violations(violations))
    }
}
