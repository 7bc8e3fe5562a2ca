//! Counterexample searches under weakened hypotheses. A search reports
//! the violations it finds (fully reproducible witnesses) or that the
//! searched range is exhausted without one; it never claims necessity
//! beyond that range.

use std::time::Instant;

use crate::compactness::{relation_compact, relation_compact_pointwise};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::filter::FilterClass;
use crate::kernel::EvalKernel;
use crate::space::product_space;

use super::checks_core::outer_pair;
use super::checks_product::prod_mask;
use super::generate::{relation_by_index, relation_count};
use super::report::{scan_outer, Bound, TheoremReport, Violation};
use super::{ensure_budget, InstanceSpec, Mode};

type RunFn = fn(&InstanceSpec, usize) -> Result<(u64, Vec<Violation>)>;

pub struct WeakeningEntry {
    pub id: &'static str,
    pub target: &'static str,
    pub title: &'static str,
    default_spec_fn: fn() -> InstanceSpec,
    run_fn: RunFn,
}

impl WeakeningEntry {
    pub fn default_spec(&self) -> InstanceSpec {
        (self.default_spec_fn)()
    }

    pub fn run(&self, spec: &InstanceSpec, jobs: usize) -> Result<TheoremReport> {
        let start = Instant::now();
        let (instances, violations) = (self.run_fn)(spec, jobs)?;
        Ok(TheoremReport {
            id: self.id.to_string(),
            title: format!("weakening of {}: {}", self.target, self.title),
            spec: spec.clone(),
            instances,
            violations,
            runtime: start.elapsed(),
        })
    }

    pub fn reevaluate(&self, violation: &Violation) -> Option<Result<(String, String)>> {
        match self.id {
            "WEAK-MAIN-PRODUCT-STRICT" => Some(reeval_strict(violation)),
            _ => None,
        }
    }
}

/// The product inequality sharpened to a strict one: equality cases are
/// counterexamples (and are expected to exist).
fn run_main_product_strict(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    let (left, right, pairs) = outer_pair(spec)?;
    ensure_budget(pairs.len() as u128 * 100)?;
    Ok(scan_outer(pairs.len() as u64, jobs, |oi| {
        let (li, ri) = pairs[oi as usize];
        let x = left.get(li);
        let y = right.get(ri);
        let (pc, prod) = product_space(&x, &y).expect("product");
        let class = FilterClass::all();
        let kx = EvalKernel::new(&x);
        let ky = EvalKernel::new(&y);
        let kp = EvalKernel::new(&prod);
        let cores_x = class.member_cores(x.carrier());
        let cores_y = class.member_cores(y.carrier());
        let cores_p = class.member_cores(pc.carrier());
        let mut violations = Vec::new();
        let mut instances = 0u64;
        let mut inner = 0u64;
        'space: for am in 1..=x.carrier().full_mask() {
            for bm in 1..=y.carrier().full_mask() {
                for fm in 1..=x.carrier().full_mask() {
                    for gm in 1..=y.carrier().full_mask() {
                        instances += 1;
                        inner += 1;
                        let ab = prod_mask(&pc, am, bm);
                        let fg = prod_mask(&pc, fm, gm);
                        let lhs = kp.value(kp.measure_at_set(&cores_p, ab, fg));
                        let rhs = kx
                            .value(kx.measure_at_set(&cores_x, am, fm))
                            .max(ky.value(ky.measure_at_set(&cores_y, bm, gm)));
                        if lhs >= rhs {
                            violations.push(Violation {
                                order: (oi, inner),
                                bindings: vec![
                                    ("space_x", Bound::Space(x.clone())),
                                    ("space_y", Bound::Space(y.clone())),
                                    ("set_a", Bound::Set(x.carrier().subset_from_mask(am))),
                                    ("set_b", Bound::Set(y.carrier().subset_from_mask(bm))),
                                    (
                                        "filter_f",
                                        Bound::Filter(crate::filter::Filter::from_mask(
                                            x.carrier(),
                                            fm,
                                        )),
                                    ),
                                    (
                                        "filter_g",
                                        Bound::Filter(crate::filter::Filter::from_mask(
                                            y.carrier(),
                                            gm,
                                        )),
                                    ),
                                ],
                                lhs: lhs.to_string(),
                                rhs: format!("expected strictly below {rhs}"),
                            });
                            // one witness per space pair keeps the report small
                            break 'space;
                        }
                    }
                }
            }
        }
        (instances, violations)
    }))
}

fn reeval_strict(v: &Violation) -> Result<(String, String)> {
    let (lhs, rhs) = super::checks_product::reeval_main_product_12(v)?;
    Ok((lhs, format!("expected strictly below {rhs}")))
}

/// The compactness characterization with the approach-space hypothesis on
/// the codomain dropped: searches for a principal-compact relation with
/// compact images that is not class-compact.
fn run_thm4_nonap(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    let (left, right, pairs) = outer_pair(spec)?;
    ensure_budget(pairs.len() as u128 * 16 * 60)?;
    Ok(scan_outer(pairs.len() as u64, jobs, |oi| {
        let (li, ri) = pairs[oi as usize];
        let x = left.get(li);
        let y = right.get(ri);
        let class = FilterClass::all();
        let mut violations = Vec::new();
        let mut instances = 0u64;
        for rel_idx in 0..relation_count(x.carrier(), y.carrier()) {
            let r = relation_by_index(x.carrier(), y.carrier(), rel_idx);
            instances += 1;
            let f0 = relation_compact(&FilterClass::principal(), &r, &x, &y)
                .expect("carriers agree")
                .compact;
            if !f0 {
                continue;
            }
            let imgs = x.carrier().labels().iter().all(|xl| {
                let img = r.image_of_point(xl).expect("domain point");
                crate::compactness::set_compactness(
                    &y,
                    &class,
                    &img,
                    crate::compactness::Within::Itself,
                )
                .expect("carrier")
            });
            if !imgs {
                continue;
            }
            let compact = relation_compact(&class, &r, &x, &y)
                .expect("carriers agree")
                .compact;
            if !compact {
                violations.push(Violation {
                    order: (oi, rel_idx as u64),
                    bindings: vec![
                        ("space_x", Bound::Space(x.clone())),
                        ("space_y", Bound::Space(y.clone())),
                        ("relation", Bound::Rel(r.clone())),
                    ],
                    lhs: "principal-compact with compact images".into(),
                    rhs: "not class-compact without the approach hypothesis".into(),
                });
            }
        }
        (instances, violations)
    }))
}

/// The pointwise criterion used with the point-filter class, which is not
/// principal-composable: searches for a divergence from definitional
/// compactness.
fn run_lem2_pointclass(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    let (left, right, pairs) = outer_pair(spec)?;
    ensure_budget(pairs.len() as u128 * 16 * 30)?;
    Ok(scan_outer(pairs.len() as u64, jobs, |oi| {
        let (li, ri) = pairs[oi as usize];
        let x = left.get(li);
        let y = right.get(ri);
        let class = FilterClass::point_filters();
        let mut violations = Vec::new();
        let mut instances = 0u64;
        for rel_idx in 0..relation_count(x.carrier(), y.carrier()) {
            let r = relation_by_index(x.carrier(), y.carrier(), rel_idx);
            instances += 1;
            let definitional = relation_compact(&class, &r, &x, &y)
                .expect("carriers agree")
                .compact;
            let pointwise = relation_compact_pointwise(&class, &r, &x, &y)
                .expect("carriers agree")
                .holds;
            if definitional != pointwise {
                violations.push(Violation {
                    order: (oi, rel_idx as u64),
                    bindings: vec![
                        ("space_x", Bound::Space(x.clone())),
                        ("space_y", Bound::Space(y.clone())),
                        ("relation", Bound::Rel(r.clone())),
                    ],
                    lhs: format!("definitional: {definitional}"),
                    rhs: format!("pointwise: {pointwise}"),
                });
            }
        }
        (instances, violations)
    }))
}

fn grid_0_1_2_inf() -> Vec<ExtReal> {
    vec![
        ExtReal::ZERO,
        ExtReal::int(1),
        ExtReal::int(2),
        ExtReal::INFINITY,
    ]
}

pub fn weakenings() -> &'static [WeakeningEntry] {
    &[
        WeakeningEntry {
            id: "WEAK-MAIN-PRODUCT-STRICT",
            target: "MAIN-PRODUCT-12",
            title: "product bound sharpened to a strict inequality",
            default_spec_fn: || {
                InstanceSpec::exhaustive(vec![2, 2], InstanceSpec::default_grid())
                    .expect("static spec")
            },
            run_fn: run_main_product_strict,
        },
        WeakeningEntry {
            id: "WEAK-THM4-NONAP",
            target: "THM4-APPROACH-CODOMAIN",
            title: "approach hypothesis on the codomain dropped",
            default_spec_fn: || {
                InstanceSpec::exhaustive(vec![2, 2], grid_0_1_2_inf()).expect("static spec")
            },
            run_fn: run_thm4_nonap,
        },
        WeakeningEntry {
            id: "WEAK-LEM2-POINTCLASS",
            target: "LEM2-POINTWISE",
            title: "pointwise criterion with the non-composable point-filter class",
            default_spec_fn: || {
                InstanceSpec::new(
                    vec![3, 2],
                    grid_0_1_2_inf(),
                    Mode::Random {
                        seed: 7,
                        count: 400,
                    },
                )
                .expect("static spec")
            },
            run_fn: run_lem2_pointclass,
        },
    ]
}

pub fn find_weakening(id: &str) -> Result<&'static WeakeningEntry> {
    weakenings()
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownWeakening(id.to_string()))
}

/// Runs a registered weakening search; the report's violations are the
/// counterexamples found within the searched range.
pub fn search_counterexample(
    id: &str,
    spec: Option<InstanceSpec>,
    jobs: usize,
) -> Result<TheoremReport> {
    let entry = find_weakening(id)?;
    let spec = spec.unwrap_or_else(|| entry.default_spec());
    entry.run(&spec, jobs)
}
