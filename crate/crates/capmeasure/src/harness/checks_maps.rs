//! Catalog checkers for map classification: closedness as
//! principal-perfectness, the perfect-map characterization over approach
//! domains, the final-structure adherence identity, and the quotient
//! theorems.

use crate::compactness::{relation_compact, set_compactness, Within};
use crate::error::Result;
use crate::filter::{enumerate_filters, FilterClass, Map};
use crate::maps::{adh_final_check, is_closed, is_perfect, is_quotient};
use crate::space::{final_structure, initial_structure, CapStructure};

use super::checks_core::{is_ap, outer_pair};
use super::generate::{map_by_index, map_count};
use super::report::{scan_outer, Bound, Violation};
use super::{ensure_budget, InstanceSpec};

fn for_each_map<F>(
    spec: &InstanceSpec,
    jobs: usize,
    only_onto: bool,
    inner_estimate: u128,
    check: F,
) -> Result<(u64, Vec<Violation>)>
where
    F: Fn(u64, &CapStructure, &CapStructure, &Map, &mut Vec<Violation>) -> u64 + Send + Sync,
{
    let (left, right, pairs) = outer_pair(spec)?;
    ensure_budget(pairs.len() as u128 * 8 * inner_estimate)?;
    Ok(scan_outer(pairs.len() as u64, jobs, |oi| {
        let (li, ri) = pairs[oi as usize];
        let x = left.get(li);
        let y = right.get(ri);
        let mut violations = Vec::new();
        let mut instances = 0u64;
        for mi in 0..map_count(x.carrier(), y.carrier()) {
            let f = map_by_index(x.carrier(), y.carrier(), mi);
            if only_onto && !f.is_surjective() {
                continue;
            }
            instances += check(oi, &x, &y, &f, &mut violations);
        }
        (instances, violations)
    }))
}

/// A map is closed iff it is perfect for the class of principal filters.
pub(super) fn run_prop_closed_f0(
    spec: &InstanceSpec,
    jobs: usize,
) -> Result<(u64, Vec<Violation>)> {
    for_each_map(spec, jobs, false, 40, |oi, x, y, f, violations| {
        let closed = is_closed(f, x, y).expect("carriers agree").holds;
        let perfect = is_perfect(f, x, y, &FilterClass::principal())
            .expect("carriers agree")
            .compact;
        if closed != perfect {
            violations.push(Violation {
                order: (oi, 0),
                bindings: vec![
                    ("space_x", Bound::Space(x.clone())),
                    ("space_y", Bound::Space(y.clone())),
                    ("map", Bound::MapValue(f.clone())),
                ],
                lhs: format!("closed: {closed}"),
                rhs: format!("principal-perfect: {perfect}"),
            });
        }
        1
    })
}

pub(super) fn reeval_prop_closed_f0(v: &Violation) -> Result<(String, String)> {
    let x = v.space("space_x").expect("space_x");
    let y = v.space("space_y").expect("space_y");
    let f = v.map("map").expect("map");
    Ok((
        format!("closed: {}", is_closed(f, x, y)?.holds),
        format!(
            "principal-perfect: {}",
            is_perfect(f, x, y, &FilterClass::principal())?.compact
        ),
    ))
}

/// Over approach domains, a map is perfect for the class iff it is closed
/// and every fiber is a compact subset for the class.
pub(super) fn run_thm6_perfect(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    let (left, right, pairs) = outer_pair(spec)?;
    ensure_budget(pairs.len() as u128 * 8 * 80)?;
    // the approach check depends only on the domain structure
    let ap_cache: Vec<bool> = (0..left.len()).map(|li| is_ap(&left.get(li))).collect();
    Ok(scan_outer(pairs.len() as u64, jobs, move |oi| {
        let (li, ri) = pairs[oi as usize];
        if !ap_cache[li as usize] {
            return (0, Vec::new());
        }
        let x = left.get(li);
        let y = right.get(ri);
        let class = FilterClass::all();
        let mut violations = Vec::new();
        let mut instances = 0u64;
        for mi in 0..map_count(x.carrier(), y.carrier()) {
            let f = map_by_index(x.carrier(), y.carrier(), mi);
            instances += 1;
            let perfect = is_perfect(&f, &x, &y, &class)
                .expect("carriers agree")
                .compact;
            let closed = is_closed(&f, &x, &y).expect("carriers agree").holds;
            let fibers = y.carrier().labels().iter().all(|yl| {
                let fiber = f.fiber(yl).expect("codomain point");
                set_compactness(&x, &class, &fiber, Within::Itself).expect("carrier")
            });
            if perfect != (closed && fibers) {
                violations.push(Violation {
                    order: (oi, mi as u64),
                    bindings: vec![
                        ("space_x", Bound::Space(x.clone())),
                        ("space_y", Bound::Space(y.clone())),
                        ("map", Bound::MapValue(f.clone())),
                    ],
                    lhs: format!("perfect: {perfect}"),
                    rhs: format!("closed: {closed}, fibers compact: {fibers}"),
                });
            }
        }
        (instances, violations)
    }))
}

/// For onto maps, the adherence of a codomain filter in the final
/// structure equals the fiber infimum of the adherence of its preimage.
pub(super) fn run_lem_adh_final(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    for_each_map(spec, jobs, true, 40, |oi, x, y, f, violations| {
        let mut instances = 0u64;
        let mut inner = 0u64;
        for d in enumerate_filters(y.carrier(), false) {
            for yl in y.carrier().labels() {
                instances += 1;
                inner += 1;
                let (lhs, rhs) = adh_final_check(f, x, &d, yl).expect("onto map");
                if lhs != rhs {
                    violations.push(Violation {
                        order: (oi, inner),
                        bindings: vec![
                            ("space_x", Bound::Space(x.clone())),
                            ("space_y", Bound::Space(y.clone())),
                            ("map", Bound::MapValue(f.clone())),
                            ("filter", Bound::Filter(d.clone())),
                            ("point", Bound::Point(yl.clone())),
                        ],
                        lhs: lhs.to_string(),
                        rhs: rhs.to_string(),
                    });
                }
            }
        }
        instances
    })
}

pub(super) fn reeval_lem_adh_final(v: &Violation) -> Result<(String, String)> {
    let x = v.space("space_x").expect("space_x");
    let f = v.map("map").expect("map");
    let d = v.filter("filter").expect("filter");
    let yl = v.text("point").expect("point");
    let (lhs, rhs) = adh_final_check(f, x, d, yl)?;
    Ok((lhs.to_string(), rhs.to_string()))
}

/// An onto map is a quotient for the class iff, as a relation from the
/// initial structure of the codomain to the final structure of the domain,
/// it is compact for the class.
pub(super) fn run_thm8_quotient(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    for_each_map(spec, jobs, true, 120, |oi, x, y, f, violations| {
        let class = FilterClass::all();
        let quotient = is_quotient(f, x, y, &class).expect("onto map").holds;
        let initial = initial_structure(f, y).expect("carriers agree");
        let final_table = final_structure(f, x).expect("carriers agree");
        let compact = relation_compact(&class, &f.graph(), &initial, &final_table)
            .expect("carriers agree")
            .compact;
        if quotient != compact {
            violations.push(Violation {
                order: (oi, 0),
                bindings: vec![
                    ("space_x", Bound::Space(x.clone())),
                    ("space_y", Bound::Space(y.clone())),
                    ("map", Bound::MapValue(f.clone())),
                ],
                lhs: format!("quotient: {quotient}"),
                rhs: format!("compact between initial and final: {compact}"),
            });
        }
        1
    })
}

pub(super) fn reeval_thm8(v: &Violation) -> Result<(String, String)> {
    let x = v.space("space_x").expect("space_x");
    let y = v.space("space_y").expect("space_y");
    let f = v.map("map").expect("map");
    let class = FilterClass::all();
    let quotient = is_quotient(f, x, y, &class)?.holds;
    let compact = relation_compact(
        &class,
        &f.graph(),
        &initial_structure(f, y)?,
        &final_structure(f, x)?,
    )?
    .compact;
    Ok((
        format!("quotient: {quotient}"),
        format!("compact between initial and final: {compact}"),
    ))
}

/// A perfect surjective map is a quotient, per class.
pub(super) fn run_prop_perfect_quotient(
    spec: &InstanceSpec,
    jobs: usize,
) -> Result<(u64, Vec<Violation>)> {
    for_each_map(spec, jobs, true, 80, |oi, x, y, f, violations| {
        let mut instances = 0u64;
        for (ci, class) in [FilterClass::all(), FilterClass::principal()]
            .iter()
            .enumerate()
        {
            instances += 1;
            let perfect = is_perfect(f, x, y, class).expect("carriers agree").compact;
            if perfect {
                let quotient = is_quotient(f, x, y, class).expect("onto map").holds;
                if !quotient {
                    violations.push(Violation {
                        order: (oi, ci as u64),
                        bindings: vec![
                            ("space_x", Bound::Space(x.clone())),
                            ("space_y", Bound::Space(y.clone())),
                            ("map", Bound::MapValue(f.clone())),
                            ("class", Bound::Class(class.name().to_string())),
                        ],
                        lhs: "perfect and surjective".into(),
                        rhs: "not quotient".into(),
                    });
                }
            }
        }
        instances
    })
}

/// Scoped validity of the final-structure formula: within this sweep the
/// output always satisfies the structure axioms.
pub(super) fn run_final_structure_axioms(
    spec: &InstanceSpec,
    jobs: usize,
) -> Result<(u64, Vec<Violation>)> {
    for_each_map(spec, jobs, false, 30, |oi, x, y, f, violations| {
        let table = final_structure(f, x).expect("carriers agree");
        let report = table.validate_axioms();
        if !report.ok() {
            violations.push(Violation {
                order: (oi, 0),
                bindings: vec![
                    ("space_x", Bound::Space(x.clone())),
                    ("space_y", Bound::Space(y.clone())),
                    ("map", Bound::MapValue(f.clone())),
                ],
                lhs: "final structure".into(),
                rhs: format!("axiom violation: {}", report.to_string().replace('\n', "; ")),
            });
        }
        1
    })
}
