//! The theorem catalog: every named result with its default sweep, its
//! checker, and a standalone re-evaluator for recorded witnesses.

use std::time::Instant;

use crate::error::{Error, Result};

use super::report::{TheoremReport, Violation};
use super::{checks_core, checks_maps, checks_product, InstanceSpec};

type RunFn = fn(&InstanceSpec, usize) -> Result<(u64, Vec<Violation>)>;
type ReevalFn = fn(&Violation) -> Result<(String, String)>;

pub struct TheoremEntry {
    pub id: &'static str,
    pub title: &'static str,
    default_sizes: &'static [usize],
    run_fn: RunFn,
    reeval_fn: Option<ReevalFn>,
}

impl TheoremEntry {
    pub fn default_spec(&self) -> InstanceSpec {
        InstanceSpec::exhaustive(self.default_sizes.to_vec(), InstanceSpec::default_grid())
            .expect("static default spec")
    }

    pub fn run(&self, spec: &InstanceSpec, jobs: usize) -> Result<TheoremReport> {
        let start = Instant::now();
        let (instances, violations) = (self.run_fn)(spec, jobs)?;
        Ok(TheoremReport {
            id: self.id.to_string(),
            title: self.title.to_string(),
            spec: spec.clone(),
            instances,
            violations,
            runtime: start.elapsed(),
        })
    }

    /// Re-evaluates a recorded witness standalone, returning both sides.
    pub fn reevaluate(&self, violation: &Violation) -> Option<Result<(String, String)>> {
        self.reeval_fn.map(|f| f(violation))
    }
}

pub fn catalog() -> &'static [TheoremEntry] {
    &[
        TheoremEntry {
            id: "ADH-TWO-FORMS",
            title: "the ultrafilter and mesh forms of adherence agree",
            default_sizes: &[3],
            run_fn: checks_core::run_adh_two_forms,
            reeval_fn: Some(checks_core::reeval_adh_two_forms),
        },
        TheoremEntry {
            id: "THM1-ADH-MEASURE",
            title: "the class reflection at a point is the singleton measure",
            default_sizes: &[3],
            run_fn: checks_core::run_thm1_adh_measure,
            reeval_fn: Some(checks_core::reeval_thm1),
        },
        TheoremEntry {
            id: "LEM1-CLASS-DECREASE",
            title: "compact relations stay compact for smaller composable classes",
            default_sizes: &[2, 2],
            run_fn: checks_core::run_lem1_class_decrease,
            reeval_fn: None,
        },
        TheoremEntry {
            id: "LEM2-POINTWISE",
            title: "definitional relation compactness equals the pointwise criterion",
            default_sizes: &[2, 2],
            run_fn: checks_core::run_lem2_pointwise,
            reeval_fn: Some(checks_core::reeval_lem2),
        },
        TheoremEntry {
            id: "COR-CONTRACTION",
            title: "into reflection-fixed codomains: contraction = compact relation",
            default_sizes: &[2, 2],
            run_fn: checks_core::run_cor_contraction,
            reeval_fn: None,
        },
        TheoremEntry {
            id: "COR-POINTWISE",
            title: "compactness via singleton measures at every point",
            default_sizes: &[2, 2],
            run_fn: checks_core::run_cor_pointwise,
            reeval_fn: None,
        },
        TheoremEntry {
            id: "THM4-APPROACH-CODOMAIN",
            title: "principal-compact with compact images implies class-compact (approach codomain)",
            default_sizes: &[2, 2],
            run_fn: checks_core::run_thm4,
            reeval_fn: None,
        },
        TheoremEntry {
            id: "COR-CHAR",
            title: "class-compact iff principal-compact with compact images (approach codomain)",
            default_sizes: &[2, 2],
            run_fn: checks_core::run_cor_char,
            reeval_fn: None,
        },
        TheoremEntry {
            id: "PROP-CLOSED-F0",
            title: "closed maps are exactly the principal-perfect maps",
            default_sizes: &[3, 2],
            run_fn: checks_maps::run_prop_closed_f0,
            reeval_fn: Some(checks_maps::reeval_prop_closed_f0),
        },
        TheoremEntry {
            id: "THM6-PERFECT",
            title: "over approach domains: perfect = closed with compact fibers",
            default_sizes: &[3, 2],
            run_fn: checks_maps::run_thm6_perfect,
            reeval_fn: None,
        },
        TheoremEntry {
            id: "LEM-ADH-FINAL",
            title: "final-structure adherence equals the fiber meet of preimage adherence",
            default_sizes: &[3, 2],
            run_fn: checks_maps::run_lem_adh_final,
            reeval_fn: Some(checks_maps::reeval_lem_adh_final),
        },
        TheoremEntry {
            id: "THM8-QUOTIENT",
            title: "quotient iff compact as a relation from initial to final structure",
            default_sizes: &[3, 2],
            run_fn: checks_maps::run_thm8_quotient,
            reeval_fn: Some(checks_maps::reeval_thm8),
        },
        TheoremEntry {
            id: "PROP-PERFECT-QUOTIENT",
            title: "perfect surjective maps are quotient",
            default_sizes: &[3, 2],
            run_fn: checks_maps::run_prop_perfect_quotient,
            reeval_fn: None,
        },
        TheoremEntry {
            id: "FINAL-AXIOMS",
            title: "final structures satisfy the axioms at this sweep's sizes",
            default_sizes: &[3, 2],
            run_fn: checks_maps::run_final_structure_axioms,
            reeval_fn: None,
        },
        TheoremEntry {
            id: "MAIN-PRODUCT-12",
            title: "product measure bounded by the join of factor measures",
            default_sizes: &[2, 2],
            run_fn: checks_product::run_main_product_12,
            reeval_fn: Some(checks_product::reeval_main_product_12),
        },
        TheoremEntry {
            id: "MAIN-PRODUCT-23",
            title: "atomic-space instances of the product inequality",
            default_sizes: &[2],
            run_fn: checks_product::run_main_product_23,
            reeval_fn: None,
        },
        TheoremEntry {
            id: "MAIN-PRODUCT-31",
            title: "atomic witnesses certify every measure level",
            default_sizes: &[2],
            run_fn: checks_product::run_main_product_31,
            reeval_fn: None,
        },
        TheoremEntry {
            id: "MAPS-PRODUCT",
            title: "compactness of relations is preserved and reflected by identity products",
            default_sizes: &[2, 2],
            run_fn: checks_product::run_maps_product,
            reeval_fn: None,
        },
        TheoremEntry {
            id: "TYCHONOFF-FINITE",
            title: "finite product measures split as joins of projection measures",
            default_sizes: &[2, 2],
            run_fn: checks_product::run_tychonoff,
            reeval_fn: Some(checks_product::reeval_tychonoff),
        },
        TheoremEntry {
            id: "COR-PRODUCT-MEASURE",
            title: "whole-space product measure bound",
            default_sizes: &[2, 2],
            run_fn: checks_product::run_cor_product_measure,
            reeval_fn: Some(checks_product::reeval_cor_product_measure),
        },
        TheoremEntry {
            id: "COR-KM",
            title: "compact iff projections are perfect iff closed over atomic spaces",
            default_sizes: &[2, 2],
            run_fn: checks_product::run_cor_km,
            reeval_fn: None,
        },
        TheoremEntry {
            id: "COR-REFLECTOR",
            title: "reflection domination iff reflected products stay bounded",
            default_sizes: &[2, 2],
            run_fn: checks_product::run_cor_reflector,
            reeval_fn: None,
        },
        TheoremEntry {
            id: "META-COLLAPSE",
            title: "finite-carrier collapses: axioms, compactness, class coincidence",
            default_sizes: &[3, 2],
            run_fn: checks_core::run_meta_collapse,
            reeval_fn: None,
        },
    ]
}

pub fn find(id: &str) -> Result<&'static TheoremEntry> {
    catalog()
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownTheorem(id.to_string()))
}

/// Runs one catalog entry; `spec = None` uses the entry's default sweep.
pub fn verify(id: &str, spec: Option<InstanceSpec>, jobs: usize) -> Result<TheoremReport> {
    let entry = find(id)?;
    let spec = spec.unwrap_or_else(|| entry.default_spec());
    entry.run(&spec, jobs)
}
