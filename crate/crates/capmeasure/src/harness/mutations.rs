//! Mutation self-tests: deliberately broken variants of the catalog
//! checks. Each registered mutation must produce at least one violation on
//! its default sweep, guarding the verifiers against passing vacuously.

use std::time::Instant;

use crate::compactness::{measure_at_set, relation_compact};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::filter::{enumerate_filters, Filter, FilterClass};
use crate::kernel::EvalKernel;
use crate::maps::is_perfect;
use crate::space::{adh_reflect, adherence_mesh_oracle, product_space, CapStructure, LambdaSource};

use super::checks_core::{outer_pair, outer_single, render_vec};
use super::generate::{map_by_index, map_count};
use super::report::{scan_outer, Bound, TheoremReport, Violation};
use super::{ensure_budget, InstanceSpec};

type RunFn = fn(&InstanceSpec, usize) -> Result<(u64, Vec<Violation>)>;

pub struct MutationEntry {
    pub id: &'static str,
    /// The catalog check this mutation sabotages.
    pub target: &'static str,
    pub title: &'static str,
    default_sizes: &'static [usize],
    run_fn: RunFn,
}

impl MutationEntry {
    pub fn default_spec(&self) -> InstanceSpec {
        InstanceSpec::exhaustive(self.default_sizes.to_vec(), InstanceSpec::default_grid())
            .expect("static default spec")
    }

    pub fn run(&self, spec: &InstanceSpec, jobs: usize) -> Result<TheoremReport> {
        let start = Instant::now();
        let (instances, violations) = (self.run_fn)(spec, jobs)?;
        Ok(TheoremReport {
            id: self.id.to_string(),
            title: format!("mutation of {}: {}", self.target, self.title),
            spec: spec.clone(),
            instances,
            violations,
            runtime: start.elapsed(),
        })
    }
}

/// Adherence computed with a join instead of a meet, against the mesh
/// oracle.
fn run_adh_join(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    let (slot, indices) = outer_single(spec)?;
    ensure_budget(indices.len() as u128 * 16)?;
    Ok(scan_outer(indices.len() as u64, jobs, |oi| {
        let s = slot.get(indices[oi as usize]);
        let carrier = s.carrier().clone();
        let n = carrier.len();
        let mut violations = Vec::new();
        let mut instances = 0u64;
        for (fi, f) in enumerate_filters(&carrier, false).iter().enumerate() {
            instances += 1;
            // mutated: join over ultrafilter costs
            let mutated: Vec<ExtReal> = (0..n)
                .map(|x| {
                    ExtReal::join_all(
                        f.core().indices().map(|z| s.lambda_mask(1 << z, x)),
                    )
                })
                .collect();
            let oracle = adherence_mesh_oracle(&s, f).expect("carrier");
            if mutated != oracle {
                violations.push(Violation {
                    order: (oi, fi as u64),
                    bindings: vec![
                        ("space", Bound::Space(s.clone())),
                        ("filter", Bound::Filter(f.clone())),
                    ],
                    lhs: render_vec(&mutated),
                    rhs: render_vec(&oracle),
                });
            }
        }
        (instances, violations)
    }))
}

/// The singleton-measure identity with the mesh guard dropped: the join
/// runs over every proper class member, meshing or not.
fn run_thm1_drop_mesh(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    let (slot, indices) = outer_single(spec)?;
    ensure_budget(indices.len() as u128 * 64)?;
    Ok(scan_outer(indices.len() as u64, jobs, |oi| {
        let s = slot.get(indices[oi as usize]);
        let carrier = s.carrier().clone();
        let class = FilterClass::all();
        let reflected = adh_reflect(&s, &class);
        let kernel = EvalKernel::new(&s);
        let mut violations = Vec::new();
        let mut instances = 0u64;
        let mut inner = 0u64;
        for f in enumerate_filters(&carrier, false) {
            for (xi, x) in carrier.labels().iter().enumerate() {
                instances += 1;
                inner += 1;
                // mutated: no `d # f` test
                let mutated = kernel.value(
                    (1..=carrier.full_mask())
                        .map(|dm| kernel.adh_rank(dm, xi))
                        .fold(kernel.zero, |acc, v| acc.max(v)),
                );
                let honest = reflected.get(&f, x).expect("covered");
                if mutated != honest {
                    violations.push(Violation {
                        order: (oi, inner),
                        bindings: vec![
                            ("space", Bound::Space(s.clone())),
                            ("filter", Bound::Filter(f.clone())),
                            ("point", Bound::Point(x.clone())),
                        ],
                        lhs: mutated.to_string(),
                        rhs: honest.to_string(),
                    });
                }
            }
        }
        (instances, violations)
    }))
}

/// The pointwise criterion with its inequality flipped, against
/// definitional compactness.
fn run_lem2_flip(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    let (left, right, pairs) = outer_pair(spec)?;
    ensure_budget(pairs.len() as u128 * 16 * 20)?;
    Ok(scan_outer(pairs.len() as u64, jobs, |oi| {
        let (li, ri) = pairs[oi as usize];
        let x = left.get(li);
        let y = right.get(ri);
        let class = FilterClass::all();
        let ky = EvalKernel::new(&y);
        let cores_y = class.member_cores(y.carrier());
        let mut violations = Vec::new();
        let mut instances = 0u64;
        for rel_idx in 0..super::generate::relation_count(x.carrier(), y.carrier()) {
            let r = super::generate::relation_by_index(x.carrier(), y.carrier(), rel_idx);
            instances += 1;
            let definitional = relation_compact(&class, &r, &x, &y)
                .expect("carriers agree")
                .compact;
            // mutated criterion: lambda <= measure at every point
            let mut flipped = true;
            'outer: for fm in 1..=x.carrier().full_mask() {
                let rf = r.image_mask(fm);
                for xi in 0..x.carrier().len() {
                    let lhs = x.lambda_mask(fm, xi);
                    let rhs = ky.value(ky.measure_at_set(&cores_y, r.image_mask(1 << xi), rf));
                    if lhs > rhs {
                        flipped = false;
                        break 'outer;
                    }
                }
            }
            if flipped != definitional {
                violations.push(Violation {
                    order: (oi, rel_idx as u64),
                    bindings: vec![
                        ("space_x", Bound::Space(x.clone())),
                        ("space_y", Bound::Space(y.clone())),
                        ("relation", Bound::Rel(r.clone())),
                    ],
                    lhs: format!("flipped criterion: {flipped}"),
                    rhs: format!("definitional: {definitional}"),
                });
            }
        }
        (instances, violations)
    }))
}

/// Closedness tested with the reversed inequality, against
/// principal-perfectness.
fn run_closed_flip(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    let (left, right, pairs) = outer_pair(spec)?;
    ensure_budget(pairs.len() as u128 * 8 * 20)?;
    Ok(scan_outer(pairs.len() as u64, jobs, |oi| {
        let (li, ri) = pairs[oi as usize];
        let x = left.get(li);
        let y = right.get(ri);
        let kx = EvalKernel::new(&x);
        let ky = EvalKernel::new(&y);
        let mut violations = Vec::new();
        let mut instances = 0u64;
        for mi in 0..map_count(x.carrier(), y.carrier()) {
            let f = map_by_index(x.carrier(), y.carrier(), mi);
            instances += 1;
            // mutated: fiber adherence must dominate image adherence
            let mut flipped = true;
            'outer: for am in 1..=x.carrier().full_mask() {
                let image = f.image_point_mask(am);
                for yi in 0..y.carrier().len() {
                    let lhs = kx.value(kx.adh_meet(am, f.fiber_mask(yi)));
                    let rhs = ky.value(ky.adh_rank(image, yi));
                    if lhs < rhs {
                        flipped = false;
                        break 'outer;
                    }
                }
            }
            let perfect = is_perfect(&f, &x, &y, &FilterClass::principal())
                .expect("carriers agree")
                .compact;
            if flipped != perfect {
                violations.push(Violation {
                    order: (oi, mi as u64),
                    bindings: vec![
                        ("space_x", Bound::Space(x.clone())),
                        ("space_y", Bound::Space(y.clone())),
                        ("map", Bound::MapValue(f.clone())),
                    ],
                    lhs: format!("flipped closedness: {flipped}"),
                    rhs: format!("principal-perfect: {perfect}"),
                });
            }
        }
        (instances, violations)
    }))
}

fn space_measure(s: &CapStructure, class: &FilterClass) -> ExtReal {
    measure_at_set(s, class, &s.carrier().full(), &Filter::trivial(s.carrier()))
        .expect("carrier")
        .value
}

/// The whole-space product bound demanded strictly.
fn run_product_measure_strict(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    let (left, right, pairs) = outer_pair(spec)?;
    ensure_budget(pairs.len() as u128 * 10)?;
    Ok(scan_outer(pairs.len() as u64, jobs, |oi| {
        let (li, ri) = pairs[oi as usize];
        let x = left.get(li);
        let y = right.get(ri);
        let (_, prod) = product_space(&x, &y).expect("product");
        let class = FilterClass::all();
        let lhs = space_measure(&prod, &class);
        let rhs = space_measure(&x, &class).max(space_measure(&y, &class));
        let mut violations = Vec::new();
        // mutated: strict inequality
        if lhs >= rhs {
            violations.push(Violation {
                order: (oi, 0),
                bindings: vec![
                    ("space_x", Bound::Space(x.clone())),
                    ("space_y", Bound::Space(y.clone())),
                ],
                lhs: lhs.to_string(),
                rhs: format!("expected strictly below {rhs}"),
            });
        }
        (1, violations)
    }))
}

/// The product inequality with the join replaced by a meet on the bound.
fn run_main_product_meet(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
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
        for am in 1..=x.carrier().full_mask() {
            for bm in 1..=y.carrier().full_mask() {
                for fm in 1..=x.carrier().full_mask() {
                    for gm in 1..=y.carrier().full_mask() {
                        instances += 1;
                        inner += 1;
                        let ab = super::checks_product::prod_mask(&pc, am, bm);
                        let fg = super::checks_product::prod_mask(&pc, fm, gm);
                        let lhs = kp.value(kp.measure_at_set(&cores_p, ab, fg));
                        // mutated bound: meet instead of join
                        let rhs = kx
                            .value(kx.measure_at_set(&cores_x, am, fm))
                            .min(ky.value(ky.measure_at_set(&cores_y, bm, gm)));
                        if lhs > rhs {
                            violations.push(Violation {
                                order: (oi, inner),
                                bindings: vec![
                                    ("space_x", Bound::Space(x.clone())),
                                    ("space_y", Bound::Space(y.clone())),
                                ],
                                lhs: lhs.to_string(),
                                rhs: rhs.to_string(),
                            });
                        }
                    }
                }
            }
        }
        (instances, violations)
    }))
}

/// The finite Tychonoff identity with the join replaced by a sum.
fn run_tychonoff_sum(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    let (left, right, pairs) = outer_pair(spec)?;
    ensure_budget(pairs.len() as u128 * 150)?;
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
        for hm in 1..=pc.carrier().full_mask() {
            let pxm = pc.project_left_mask(hm);
            let pym = pc.project_right_mask(hm);
            for am in 1..=x.carrier().full_mask() {
                for bm in 1..=y.carrier().full_mask() {
                    instances += 1;
                    inner += 1;
                    let ab = super::checks_product::prod_mask(&pc, am, bm);
                    let lhs = kp.value(kp.measure_at_set(&cores_p, ab, hm));
                    // mutated: sum of factor measures
                    let rhs = kx.value(kx.measure_at_set(&cores_x, am, pxm))
                        + ky.value(ky.measure_at_set(&cores_y, bm, pym));
                    if lhs != rhs {
                        violations.push(Violation {
                            order: (oi, inner),
                            bindings: vec![
                                ("space_x", Bound::Space(x.clone())),
                                ("space_y", Bound::Space(y.clone())),
                            ],
                            lhs: lhs.to_string(),
                            rhs: rhs.to_string(),
                        });
                    }
                }
            }
        }
        (instances, violations)
    }))
}

pub fn mutations() -> &'static [MutationEntry] {
    &[
        MutationEntry {
            id: "MUT-ADH-JOIN",
            target: "ADH-TWO-FORMS",
            title: "adherence with the meet replaced by a join",
            default_sizes: &[2],
            run_fn: run_adh_join,
        },
        MutationEntry {
            id: "MUT-THM1-DROP-MESH",
            target: "THM1-ADH-MEASURE",
            title: "singleton measure without the meshing guard",
            default_sizes: &[2],
            run_fn: run_thm1_drop_mesh,
        },
        MutationEntry {
            id: "MUT-LEM2-FLIP",
            target: "LEM2-POINTWISE",
            title: "pointwise criterion with the inequality reversed",
            default_sizes: &[2, 2],
            run_fn: run_lem2_flip,
        },
        MutationEntry {
            id: "MUT-CLOSED-FLIP",
            target: "PROP-CLOSED-F0",
            title: "closedness with the inequality reversed",
            default_sizes: &[2, 2],
            run_fn: run_closed_flip,
        },
        MutationEntry {
            id: "MUT-COR-PRODUCT-MEASURE-STRICT",
            target: "COR-PRODUCT-MEASURE",
            title: "whole-space product bound demanded strictly",
            default_sizes: &[2, 2],
            run_fn: run_product_measure_strict,
        },
        MutationEntry {
            id: "MUT-MAIN-PRODUCT-12-MEET",
            target: "MAIN-PRODUCT-12",
            title: "product bound with the join replaced by a meet",
            default_sizes: &[2, 2],
            run_fn: run_main_product_meet,
        },
        MutationEntry {
            id: "MUT-TYCH-SUM",
            target: "TYCHONOFF-FINITE",
            title: "projection split with the join replaced by a sum",
            default_sizes: &[2, 2],
            run_fn: run_tychonoff_sum,
        },
    ]
}

pub fn find_mutation(id: &str) -> Result<&'static MutationEntry> {
    mutations()
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownMutation(id.to_string()))
}

/// Runs a registered mutation on its default sweep; `true` means the
/// sabotage produced at least one violation, i.e. the verifier is not
/// vacuous.
pub fn mutate_and_expect_failure(id: &str) -> Result<bool> {
    let entry = find_mutation(id)?;
    let report = entry.run(&entry.default_spec(), 1)?;
    Ok(!report.violations.is_empty())
}
