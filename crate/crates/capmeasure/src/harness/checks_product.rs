//! Catalog checkers for the product results: the main product inequality
//! and its atomic-space witness route, products of relations with
//! identities, the finite Tychonoff identity, the product measure bound,
//! the compactness product characterization, and the reflector product
//! characterization.

use crate::compactness::{measure_at_set, relation_compact, relation_compact_pointwise};
use crate::error::Result;
use crate::extreal::ExtReal;
use crate::filter::{Carrier, Filter, FilterClass, ProductCarrier, Subset};
use crate::kernel::EvalKernel;
use crate::maps::{is_closed, is_perfect};
use crate::space::{adh_reflect, atomic_space, product_space, CapStructure, LambdaSource};

use super::checks_core::{outer_pair, outer_single};
use super::generate::{default_carrier, relation_by_index, relation_count, SpaceSlot};
use super::report::{scan_outer, Bound, Violation};
use super::{ensure_budget, InstanceSpec};

pub(super) fn prod_mask(pc: &ProductCarrier, am: u64, bm: u64) -> u64 {
    let mut m = 0u64;
    for xi in 0..pc.left().len() {
        if am & (1 << xi) == 0 {
            continue;
        }
        for yi in 0..pc.right().len() {
            if bm & (1 << yi) != 0 {
                m |= 1 << pc.pair_index(xi, yi);
            }
        }
    }
    m
}

fn all_cores(carrier: &Carrier) -> Vec<u64> {
    FilterClass::all().member_cores(carrier)
}

fn subset_of(carrier: &Carrier, mask: u64) -> Subset {
    carrier.subset_from_mask(mask)
}

/// The product inequality: the measure of a product filter at a product
/// set is bounded by the join of the factor measures (the second factor
/// taken over all filters).
pub(super) fn run_main_product_12(
    spec: &InstanceSpec,
    jobs: usize,
) -> Result<(u64, Vec<Violation>)> {
    let (left, right, pairs) = outer_pair(spec)?;
    ensure_budget(pairs.len() as u128 * 100)?;
    Ok(scan_outer(pairs.len() as u64, jobs, |oi| {
        let (li, ri) = pairs[oi as usize];
        let x = left.get(li);
        let y = right.get(ri);
        let (pc, prod) = product_space(&x, &y).expect("product");
        let kx = EvalKernel::new(&x);
        let ky = EvalKernel::new(&y);
        let kp = EvalKernel::new(&prod);
        let cores_x = all_cores(x.carrier());
        let cores_y = all_cores(y.carrier());
        let cores_p = all_cores(pc.carrier());

        let mut violations = Vec::new();
        let mut instances = 0u64;
        let mut inner = 0u64;
        for am in 1..=x.carrier().full_mask() {
            for bm in 1..=y.carrier().full_mask() {
                let ab = prod_mask(&pc, am, bm);
                for fm in 1..=x.carrier().full_mask() {
                    let alpha = kx.value(kx.measure_at_set(&cores_x, am, fm));
                    for gm in 1..=y.carrier().full_mask() {
                        instances += 1;
                        inner += 1;
                        let fg = prod_mask(&pc, fm, gm);
                        let lhs = kp.value(kp.measure_at_set(&cores_p, ab, fg));
                        let beta = ky.value(ky.measure_at_set(&cores_y, bm, gm));
                        let rhs = alpha.max(beta);
                        if lhs > rhs {
                            violations.push(Violation {
                                order: (oi, inner),
                                bindings: vec![
                                    ("space_x", Bound::Space(x.clone())),
                                    ("space_y", Bound::Space(y.clone())),
                                    ("set_a", Bound::Set(subset_of(x.carrier(), am))),
                                    ("set_b", Bound::Set(subset_of(y.carrier(), bm))),
                                    ("filter_f", Bound::Filter(Filter::from_mask(x.carrier(), fm))),
                                    ("filter_g", Bound::Filter(Filter::from_mask(y.carrier(), gm))),
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

pub(super) fn reeval_main_product_12(v: &Violation) -> Result<(String, String)> {
    let x = v.space("space_x").expect("space_x");
    let y = v.space("space_y").expect("space_y");
    let a = v.set("set_a").expect("set_a");
    let b = v.set("set_b").expect("set_b");
    let f = v.filter("filter_f").expect("filter_f");
    let g = v.filter("filter_g").expect("filter_g");
    let (pc, prod) = product_space(x, y)?;
    let class = FilterClass::all();
    let ab = pc.subset_product(a, b)?;
    let fg = pc.prod_filter(f, g)?;
    let lhs = measure_at_set(&prod, &class, &ab, &fg)?.value;
    let rhs = measure_at_set(x, &class, a, f)?
        .value
        .max(measure_at_set(y, &class, b, g)?.value);
    Ok((lhs.to_string(), rhs.to_string()))
}

/// Instantiating the product inequality at every atomic space built from a
/// proper filter on the carrier: the principal-class measure at
/// `A x {atom}` of `F x N(atom)` never exceeds the measure of `F` at `A`.
pub(super) fn run_main_product_23(
    spec: &InstanceSpec,
    jobs: usize,
) -> Result<(u64, Vec<Violation>)> {
    let (slot, indices) = outer_single(spec)?;
    ensure_budget(indices.len() as u128 * 600)?;
    Ok(scan_outer(indices.len() as u64, jobs, |oi| {
        let x = slot.get(indices[oi as usize]);
        let carrier = x.carrier().clone();
        let kx = EvalKernel::new(&x);
        let cores_x = all_cores(&carrier);
        let mut violations = Vec::new();
        let mut instances = 0u64;
        let mut inner = 0u64;
        for dm in 1..=carrier.full_mask() {
            let d = Filter::from_mask(&carrier, dm);
            let at = atomic_space(&carrier, &d).expect("proper filter");
            let (pc, prod) = product_space(&x, &at.space).expect("product");
            let kp = EvalKernel::new(&prod);
            let cores_p = FilterClass::principal().member_cores(pc.carrier());
            let atom_mask = 1u64 << at.space.carrier().index_of(&at.atom).unwrap();
            let nb = at.nbhd.core_mask();
            for am in 1..=carrier.full_mask() {
                let a_atom = prod_mask(&pc, am, atom_mask);
                for fm in 1..=carrier.full_mask() {
                    instances += 1;
                    inner += 1;
                    let fn_mask = prod_mask(&pc, fm, nb);
                    let lhs = kp.value(kp.measure_at_set(&cores_p, a_atom, fn_mask));
                    let rhs = kx.value(kx.measure_at_set(&cores_x, am, fm));
                    if lhs > rhs {
                        violations.push(Violation {
                            order: (oi, inner),
                            bindings: vec![
                                ("space", Bound::Space(x.clone())),
                                ("witness_filter", Bound::Filter(d.clone())),
                                ("set", Bound::Set(subset_of(&carrier, am))),
                                ("filter", Bound::Filter(Filter::from_mask(&carrier, fm))),
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

/// The witness route: whenever the measure of `F` at `A` exceeds a finite
/// grid level, the atomic space built from the attaining class filter
/// certifies it through the principal-class product measure.
pub(super) fn run_main_product_31(
    spec: &InstanceSpec,
    jobs: usize,
) -> Result<(u64, Vec<Violation>)> {
    let grid: Vec<ExtReal> = spec.grid().iter().copied().filter(ExtReal::is_finite).collect();
    let (slot, indices) = outer_single(spec)?;
    ensure_budget(indices.len() as u128 * 300)?;
    Ok(scan_outer(indices.len() as u64, jobs, move |oi| {
        let x = slot.get(indices[oi as usize]);
        let carrier = x.carrier().clone();
        let kx = EvalKernel::new(&x);
        let cores_x = all_cores(&carrier);
        let mut violations = Vec::new();
        let mut instances = 0u64;
        let mut inner = 0u64;
        for am in 1..=carrier.full_mask() {
            for fm in 1..=carrier.full_mask() {
                instances += 1;
                let (mrank, witness) = kx.measure_at_set_witness(&cores_x, am, fm);
                let m = kx.value(mrank);
                let Some(dm) = witness else { continue };
                let d = Filter::from_mask(&carrier, dm);
                let at = atomic_space(&carrier, &d).expect("proper witness");
                let (pc, prod) = product_space(&x, &at.space).expect("product");
                let kp = EvalKernel::new(&prod);
                let cores_p = FilterClass::principal().member_cores(pc.carrier());
                let atom_mask = 1u64 << at.space.carrier().index_of(&at.atom).unwrap();
                let a_atom = prod_mask(&pc, am, atom_mask);
                let fn_mask = prod_mask(&pc, fm, at.nbhd.core_mask());
                let certified = kp.value(kp.measure_at_set(&cores_p, a_atom, fn_mask));
                for &alpha in grid.iter().filter(|&&alpha| alpha < m) {
                    instances += 1;
                    inner += 1;
                    if certified <= alpha {
                        violations.push(Violation {
                            order: (oi, inner),
                            bindings: vec![
                                ("space", Bound::Space(x.clone())),
                                ("set", Bound::Set(subset_of(&carrier, am))),
                                ("filter", Bound::Filter(Filter::from_mask(&carrier, fm))),
                                ("witness_filter", Bound::Filter(d.clone())),
                                ("alpha", Bound::Value(alpha)),
                            ],
                            lhs: certified.to_string(),
                            rhs: format!("> {alpha}"),
                        });
                    }
                }
            }
        }
        (instances, violations)
    }))
}

fn fixed_z_spaces() -> Vec<CapStructure> {
    let c = default_carrier(2, 2);
    let mut asym = vec![ExtReal::ZERO; 4];
    asym[1] = ExtReal::int(1);
    asym[2] = ExtReal::INFINITY;
    vec![
        CapStructure::indiscrete(&c),
        CapStructure::from_flat(&c, asym),
    ]
}

/// Products of a relation with identities: a compact relation stays
/// compact against every swept third space, and a non-compact relation is
/// exposed by the atomic space built from its pointwise witness.
pub(super) fn run_maps_product(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    let (left, right, pairs) = outer_pair(spec)?;
    ensure_budget(pairs.len() as u128 * 16 * 50)?;
    Ok(scan_outer(pairs.len() as u64, jobs, |oi| {
        let (li, ri) = pairs[oi as usize];
        let x = left.get(li);
        let y = right.get(ri);
        let class = FilterClass::all();
        let mut violations = Vec::new();
        let mut instances = 0u64;
        let mut inner = 0u64;

        let mut z_spaces = fixed_z_spaces();
        for dm in 1..=y.carrier().full_mask() {
            let d = Filter::from_mask(y.carrier(), dm);
            z_spaces.push(atomic_space(y.carrier(), &d).expect("proper filter").space);
        }

        for rel_idx in 0..relation_count(x.carrier(), y.carrier()) {
            let r = relation_by_index(x.carrier(), y.carrier(), rel_idx);
            let compact = relation_compact(&class, &r, &x, &y)
                .expect("carriers agree")
                .compact;
            if compact {
                // compact relations stay compact in product with identities
                for z in &z_spaces {
                    instances += 1;
                    inner += 1;
                    let (pcx, prod_x) = product_space(&x, z).expect("product");
                    let (pcy, prod_y) = product_space(&y, z).expect("product");
                    let rz = r
                        .product_with_identity(z.carrier(), &pcx, &pcy)
                        .expect("carriers agree");
                    let still = relation_compact(&class, &rz, &prod_x, &prod_y)
                        .expect("carriers agree");
                    if !still.compact {
                        violations.push(Violation {
                            order: (oi, inner),
                            bindings: vec![
                                ("space_x", Bound::Space(x.clone())),
                                ("space_y", Bound::Space(y.clone())),
                                ("space_z", Bound::Space(z.clone())),
                                ("relation", Bound::Rel(r.clone())),
                            ],
                            lhs: "compact".into(),
                            rhs: "product with identity not compact".into(),
                        });
                    }
                }
            } else {
                // the atomic space over the pointwise witness must expose it
                instances += 1;
                inner += 1;
                let pw = relation_compact_pointwise(&class, &r, &x, &y)
                    .expect("carriers agree");
                let Some(w) = pw.witness else {
                    violations.push(Violation {
                        order: (oi, inner),
                        bindings: vec![
                            ("space_x", Bound::Space(x.clone())),
                            ("space_y", Bound::Space(y.clone())),
                            ("relation", Bound::Rel(r.clone())),
                        ],
                        lhs: "not compact".into(),
                        rhs: "pointwise criterion found no witness".into(),
                    });
                    continue;
                };
                let fm = w.filter.core_mask();
                let xi = x.carrier().index_of(&w.point).unwrap();
                let rf = r.image_mask(fm);
                let rx = r.image_mask(1 << xi);
                let ky = EvalKernel::new(&y);
                let (_, dwit) =
                    ky.measure_at_set_witness(&all_cores(y.carrier()), rx, rf);
                let Some(dm) = dwit else {
                    violations.push(Violation {
                        order: (oi, inner),
                        bindings: vec![
                            ("space_x", Bound::Space(x.clone())),
                            ("space_y", Bound::Space(y.clone())),
                            ("relation", Bound::Rel(r.clone())),
                        ],
                        lhs: "pointwise witness without measure witness".into(),
                        rhs: "expected an attaining class filter".into(),
                    });
                    continue;
                };
                let d = Filter::from_mask(y.carrier(), dm);
                let at = atomic_space(y.carrier(), &d).expect("proper filter");
                let z = &at.space;
                let (pcx, prod_x) = product_space(&x, z).expect("product");
                let (pcy, prod_y) = product_space(&y, z).expect("product");
                let rz = r
                    .product_with_identity(z.carrier(), &pcx, &pcy)
                    .expect("carriers agree");
                let atom_mask = 1u64 << z.carrier().index_of(&at.atom).unwrap();
                // the single exposing instance: A' = {(x, atom)}, F' = F x N(atom)
                let a_mask = prod_mask(&pcx, 1 << xi, atom_mask);
                let f_mask = prod_mask(&pcx, fm, at.nbhd.core_mask());
                let kpx = EvalKernel::new(&prod_x);
                let kpy = EvalKernel::new(&prod_y);
                let cores_f0x = FilterClass::principal().member_cores(pcx.carrier());
                let cores_f0y = FilterClass::principal().member_cores(pcy.carrier());
                let lhs = kpy.value(kpy.measure_at_set(
                    &cores_f0y,
                    rz.image_mask(a_mask),
                    rz.image_mask(f_mask),
                ));
                let rhs = kpx.value(kpx.measure_at_set(&cores_f0x, a_mask, f_mask));
                if lhs <= rhs {
                    violations.push(Violation {
                        order: (oi, inner),
                        bindings: vec![
                            ("space_x", Bound::Space(x.clone())),
                            ("space_y", Bound::Space(y.clone())),
                            ("relation", Bound::Rel(r.clone())),
                            ("witness_filter", Bound::Filter(d.clone())),
                        ],
                        lhs: lhs.to_string(),
                        rhs: format!("expected > {rhs}"),
                    });
                }
            }
        }
        (instances, violations)
    }))
}

/// The finite Tychonoff identity on two factors, with a fixed three-factor
/// spot sweep: the measure of any filter on the product at a box equals
/// the join of the factor measures of its projections.
pub(super) fn run_tychonoff(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    let (left, right, pairs) = outer_pair(spec)?;
    ensure_budget(pairs.len() as u128 * 150 + 6 * 255 * 27)?;
    let (mut instances, mut violations) = scan_outer(pairs.len() as u64, jobs, |oi| {
        let (li, ri) = pairs[oi as usize];
        let x = left.get(li);
        let y = right.get(ri);
        let (pc, prod) = product_space(&x, &y).expect("product");
        let kx = EvalKernel::new(&x);
        let ky = EvalKernel::new(&y);
        let kp = EvalKernel::new(&prod);
        let cores_x = all_cores(x.carrier());
        let cores_y = all_cores(y.carrier());
        let cores_p = all_cores(pc.carrier());
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
                    let ab = prod_mask(&pc, am, bm);
                    let lhs = kp.value(kp.measure_at_set(&cores_p, ab, hm));
                    let rhs = kx
                        .value(kx.measure_at_set(&cores_x, am, pxm))
                        .max(ky.value(ky.measure_at_set(&cores_y, bm, pym)));
                    if lhs != rhs {
                        violations.push(Violation {
                            order: (oi, inner),
                            bindings: vec![
                                ("space_x", Bound::Space(x.clone())),
                                ("space_y", Bound::Space(y.clone())),
                                ("filter", Bound::Filter(Filter::from_mask(pc.carrier(), hm))),
                                ("set_a", Bound::Set(subset_of(x.carrier(), am))),
                                ("set_b", Bound::Set(subset_of(y.carrier(), bm))),
                            ],
                            lhs: lhs.to_string(),
                            rhs: rhs.to_string(),
                        });
                    }
                }
            }
        }
        (instances, violations)
    });

    // fixed three-factor spot sweep on two-point factors
    let palette: Vec<CapStructure> = {
        let cs: Vec<Carrier> = (0..3).map(|s| default_carrier(s, 2)).collect();
        let mats: [(u64, u64); 4] = [(0, 0), (1, 1), (2, 0), (0, 2)];
        let grid = [ExtReal::ZERO, ExtReal::int(1), ExtReal::INFINITY];
        let mut out = Vec::new();
        for (slot, c) in cs.iter().enumerate() {
            for &(i, j) in &mats {
                let mut m = vec![ExtReal::ZERO; 4];
                m[1] = grid[i as usize];
                m[2] = grid[j as usize];
                let _ = slot;
                out.push(CapStructure::from_flat(c, m));
            }
        }
        out
    };
    let triples: [(usize, usize, usize); 6] =
        [(0, 6, 11), (2, 7, 5), (1, 4, 10), (3, 7, 11), (0, 4, 8), (2, 5, 3)];
    for (ti, &(i1, i2, i3)) in triples.iter().enumerate() {
        let x1 = &palette[i1];
        let x2 = &palette[i2];
        let x3 = &palette[i3];
        let (pc12, prod12) = product_space(x1, x2).expect("product");
        let (pc, prod) = product_space(&prod12, x3).expect("product");
        let k1 = EvalKernel::new(x1);
        let k2 = EvalKernel::new(x2);
        let k3 = EvalKernel::new(x3);
        let kp = EvalKernel::new(&prod);
        let cores_1 = all_cores(x1.carrier());
        let cores_2 = all_cores(x2.carrier());
        let cores_3 = all_cores(x3.carrier());
        let cores_p = all_cores(pc.carrier());
        for hm in 1..=pc.carrier().full_mask() {
            let m12 = pc.project_left_mask(hm);
            let p1m = pc12.project_left_mask(m12);
            let p2m = pc12.project_right_mask(m12);
            let p3m = pc.project_right_mask(hm);
            for a1 in 1..=3u64 {
                for a2 in 1..=3u64 {
                    for a3 in 1..=3u64 {
                        instances += 1;
                        let box12 = prod_mask(&pc12, a1, a2);
                        let boxall = prod_mask(&pc, box12, a3);
                        let lhs = kp.value(kp.measure_at_set(&cores_p, boxall, hm));
                        let rhs = k1
                            .value(k1.measure_at_set(&cores_1, a1, p1m))
                            .max(k2.value(k2.measure_at_set(&cores_2, a2, p2m)))
                            .max(k3.value(k3.measure_at_set(&cores_3, a3, p3m)));
                        if lhs != rhs {
                            violations.push(Violation {
                                order: (u64::MAX, (ti as u64) << 32 | hm << 8 | a1 << 4 | a2 << 2 | a3),
                                bindings: vec![
                                    ("space_x1", Bound::Space(x1.clone())),
                                    ("space_x2", Bound::Space(x2.clone())),
                                    ("space_x3", Bound::Space(x3.clone())),
                                    (
                                        "filter",
                                        Bound::Filter(Filter::from_mask(pc.carrier(), hm)),
                                    ),
                                    ("set_a1", Bound::Set(subset_of(x1.carrier(), a1))),
                                    ("set_a2", Bound::Set(subset_of(x2.carrier(), a2))),
                                    ("set_a3", Bound::Set(subset_of(x3.carrier(), a3))),
                                ],
                                lhs: lhs.to_string(),
                                rhs: rhs.to_string(),
                            });
                        }
                    }
                }
            }
        }
    }

    Ok((instances, super::report::finish_violations(violations)))
}

pub(super) fn reeval_tychonoff(v: &Violation) -> Result<(String, String)> {
    // two-factor violations carry both factor spaces
    let x = v.space("space_x").expect("space_x");
    let y = v.space("space_y").expect("space_y");
    let h = v.filter("filter").expect("filter");
    let a = v.set("set_a").expect("set_a");
    let b = v.set("set_b").expect("set_b");
    let (pc, prod) = product_space(x, y)?;
    let class = FilterClass::all();
    let lhs = measure_at_set(&prod, &class, &pc.subset_product(a, b)?, h)?.value;
    let rhs = measure_at_set(x, &class, a, &pc.proj_left_filter(h)?)?
        .value
        .max(measure_at_set(y, &class, b, &pc.proj_right_filter(h)?)?.value);
    Ok((lhs.to_string(), rhs.to_string()))
}

/// The product measure bound: the whole-space measure of a binary product
/// is at most the join of the factors' whole-space measures.
pub(super) fn run_cor_product_measure(
    spec: &InstanceSpec,
    jobs: usize,
) -> Result<(u64, Vec<Violation>)> {
    let (left, right, pairs) = outer_pair(spec)?;
    ensure_budget(pairs.len() as u128 * 10)?;
    Ok(scan_outer(pairs.len() as u64, jobs, |oi| {
        let (li, ri) = pairs[oi as usize];
        let x = left.get(li);
        let y = right.get(ri);
        let (_, prod) = product_space(&x, &y).expect("product");
        let mut violations = Vec::new();
        let mut instances = 0u64;
        for (ci, class) in [FilterClass::all(), FilterClass::principal()]
            .iter()
            .enumerate()
        {
            instances += 1;
            let space_measure = |s: &CapStructure, cl: &FilterClass| -> ExtReal {
                measure_at_set(s, cl, &s.carrier().full(), &Filter::trivial(s.carrier()))
                    .expect("carrier")
                    .value
            };
            let lhs = space_measure(&prod, class);
            let rhs = space_measure(&x, class).max(space_measure(&y, &FilterClass::all()));
            if lhs > rhs {
                violations.push(Violation {
                    order: (oi, ci as u64),
                    bindings: vec![
                        ("space_x", Bound::Space(x.clone())),
                        ("space_y", Bound::Space(y.clone())),
                        ("class", Bound::Class(class.name().to_string())),
                    ],
                    lhs: lhs.to_string(),
                    rhs: rhs.to_string(),
                });
            }
        }
        (instances, violations)
    }))
}

pub(super) fn reeval_cor_product_measure(v: &Violation) -> Result<(String, String)> {
    let x = v.space("space_x").expect("space_x");
    let y = v.space("space_y").expect("space_y");
    let class = FilterClass::parse(v.text("class").expect("class"))?;
    let (_, prod) = product_space(x, y)?;
    let m = |s: &CapStructure, cl: &FilterClass| -> Result<ExtReal> {
        Ok(measure_at_set(s, cl, &s.carrier().full(), &Filter::trivial(s.carrier()))?.value)
    };
    let lhs = m(&prod, &class)?;
    let rhs = m(x, &class)?.max(m(y, &FilterClass::all())?);
    Ok((lhs.to_string(), rhs.to_string()))
}

/// The compactness product characterization: a space is compact for the
/// class iff the projection away from it is perfect against every swept
/// space, iff that projection is closed against every swept atomic space.
pub(super) fn run_cor_km(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    let (slot, indices) = outer_single(spec)?;
    let others = SpaceSlot::new(1, spec.size(1), spec.grid())?;
    ensure_budget(indices.len() as u128 * (others.len() + 4) * 40)?;
    Ok(scan_outer(indices.len() as u64, jobs, |oi| {
        let x = slot.get(indices[oi as usize]);
        let class = FilterClass::all();
        let mut violations = Vec::new();

        let compact = measure_at_set(
            &x,
            &class,
            &x.carrier().full(),
            &Filter::trivial(x.carrier()),
        )
        .expect("carrier")
        .value
        .is_zero();

        let mut perfect_all = true;
        for yi in 0..others.len() {
            let y = others.get(yi);
            let (pc, prod) = product_space(&x, &y).expect("product");
            let proj = pc.proj_right_map();
            if !is_perfect(&proj, &prod, &y, &class)
                .expect("carriers agree")
                .compact
            {
                perfect_all = false;
                break;
            }
        }

        let mut closed_atomic = true;
        for dm in 1..=x.carrier().full_mask() {
            let d = Filter::from_mask(x.carrier(), dm);
            let at = atomic_space(x.carrier(), &d).expect("proper filter");
            let (pc, prod) = product_space(&x, &at.space).expect("product");
            let proj = pc.proj_right_map();
            if !is_closed(&proj, &prod, &at.space).expect("carriers agree").holds {
                closed_atomic = false;
                break;
            }
        }

        if compact != perfect_all || perfect_all != closed_atomic {
            violations.push(Violation {
                order: (oi, 0),
                bindings: vec![("space", Bound::Space(x.clone()))],
                lhs: format!("compact: {compact}"),
                rhs: format!(
                    "projections perfect: {perfect_all}, closed over atomics: {closed_atomic}"
                ),
            });
        }
        (1, violations)
    }))
}

/// The reflector product characterization: a second structure dominates
/// the class reflection iff the reflected product is bounded by its
/// product with every swept (reflected) space, with the atomic witness
/// route exposing failures.
pub(super) fn run_cor_reflector(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    let grid = spec.grid().to_vec();
    let max_n = spec.size(0);
    let others = SpaceSlot::new(1, spec.size(1), spec.grid())?;
    // pairs of structures on the same carrier
    let mut base: Vec<(CapStructure, CapStructure)> = Vec::new();
    for n in 1..=max_n {
        let carrier = default_carrier(0, n);
        let spaces = super::generate::enum_spaces(&carrier, &grid)?;
        for s1 in &spaces {
            for s2 in &spaces {
                base.push((s1.clone(), s2.clone()));
            }
        }
    }
    ensure_budget(base.len() as u128 * (others.len() + 4) * 60)?;
    Ok(scan_outer(base.len() as u64, jobs, move |oi| {
        let (x, lambda2) = base[oi as usize].clone();
        let carrier = x.carrier().clone();
        let class = FilterClass::all();
        let mut violations = Vec::new();

        // side 1: lambda2 dominates the class reflection of x
        let reflected = adh_reflect(&x, &class);
        let mut dominates = true;
        let mut wit: Option<(u64, usize)> = None;
        'side1: for fm in 1..=carrier.full_mask() {
            for xi in 0..carrier.len() {
                if lambda2.lambda_mask(fm, xi) < reflected.lambda_mask(fm, xi) {
                    dominates = false;
                    wit = Some((fm, xi));
                    break 'side1;
                }
            }
        }

        if dominates {
            // side 2 over generated spaces, side 3 over atomic spaces
            for yi in 0..others.len() {
                let y = others.get(yi);
                let refl_y = adh_reflect(&y, &class)
                    .point_structure()
                    .expect("reflection of a canonical structure is canonical");
                let (_, prod) = product_space(&x, &y).expect("product");
                let refl_prod = adh_reflect(&prod, &class);
                let (_, bound) = product_space(&lambda2, &refl_y).expect("product");
                for hm in 1..=prod.carrier().full_mask() {
                    for k in 0..prod.carrier().len() {
                        if refl_prod.lambda_mask(hm, k) > bound.lambda_mask(hm, k) {
                            violations.push(Violation {
                                order: (oi, hm),
                                bindings: vec![
                                    ("space", Bound::Space(x.clone())),
                                    ("second_structure", Bound::Space(lambda2.clone())),
                                    ("space_y", Bound::Space(y.clone())),
                                ],
                                lhs: "reflection dominated".into(),
                                rhs: "product bound fails".into(),
                            });
                            return (1, violations);
                        }
                    }
                }
            }
            for dm in 1..=carrier.full_mask() {
                let d = Filter::from_mask(&carrier, dm);
                let at = atomic_space(&carrier, &d).expect("proper filter");
                let (_, prod) = product_space(&x, &at.space).expect("product");
                let refl_prod = adh_reflect(&prod, &FilterClass::principal());
                let (_, bound) = product_space(&lambda2, &at.space).expect("product");
                for hm in 1..=prod.carrier().full_mask() {
                    for k in 0..prod.carrier().len() {
                        if refl_prod.lambda_mask(hm, k) > bound.lambda_mask(hm, k) {
                            violations.push(Violation {
                                order: (oi, hm),
                                bindings: vec![
                                    ("space", Bound::Space(x.clone())),
                                    ("second_structure", Bound::Space(lambda2.clone())),
                                    ("atomic_from", Bound::Filter(d.clone())),
                                ],
                                lhs: "reflection dominated".into(),
                                rhs: "atomic product bound fails".into(),
                            });
                            return (1, violations);
                        }
                    }
                }
            }
        } else {
            // witness route: the atomic space from the attaining filter
            // must break the atomic product bound
            let (fm, xi) = wit.unwrap();
            let kx = EvalKernel::new(&x);
            let (_, dwit) =
                kx.measure_at_set_witness(&all_cores(&carrier), 1 << xi, fm);
            let Some(dm) = dwit else {
                violations.push(Violation {
                    order: (oi, 0),
                    bindings: vec![
                        ("space", Bound::Space(x.clone())),
                        ("second_structure", Bound::Space(lambda2.clone())),
                    ],
                    lhs: "domination fails".into(),
                    rhs: "no attaining class filter".into(),
                });
                return (1, violations);
            };
            let d = Filter::from_mask(&carrier, dm);
            let at = atomic_space(&carrier, &d).expect("proper filter");
            let (pc, prod) = product_space(&x, &at.space).expect("product");
            let refl_prod = adh_reflect(&prod, &FilterClass::principal());
            let (_, bound) = product_space(&lambda2, &at.space).expect("product");
            let atom_mask = 1u64 << at.space.carrier().index_of(&at.atom).unwrap();
            let hm = prod_mask(&pc, fm, at.nbhd.core_mask());
            let k = pc.pair_index(xi, at.space.carrier().index_of(&at.atom).unwrap());
            let broken = refl_prod.lambda_mask(hm, k) > bound.lambda_mask(hm, k);
            let _ = atom_mask;
            if !broken {
                violations.push(Violation {
                    order: (oi, 0),
                    bindings: vec![
                        ("space", Bound::Space(x.clone())),
                        ("second_structure", Bound::Space(lambda2.clone())),
                        ("witness_filter", Bound::Filter(d.clone())),
                        ("filter", Bound::Filter(Filter::from_mask(&carrier, fm))),
                        ("point", Bound::Point(carrier.label(xi).to_string())),
                    ],
                    lhs: "domination fails".into(),
                    rhs: "atomic witness does not expose it".into(),
                });
            }
        }
        (1, violations)
    }))
}
