//! Catalog checkers: adherence forms, adherence-as-measure, class
//! monotonicity of compact relations, the pointwise criterion and its
//! corollaries, compactness characterization over approach codomains, and
//! the finite-carrier collapse meta-facts.

use crate::compactness::{measure_at_set, relation_compact, relation_compact_pointwise, Within};
use crate::error::Result;
use crate::extreal::ExtReal;
use crate::filter::{enumerate_filters, Filter, FilterClass, Relation};
use crate::space::{
    adh_reflect, adherence, adherence_mesh_oracle, check_subcategory, CapStructure, LambdaSource,
};

use super::generate::{relation_by_index, relation_count, SpaceSlot};
use super::report::{scan_outer, Bound, Violation};
use super::{ensure_budget, InstanceSpec, Mode};

pub(super) fn render_vec(v: &[ExtReal]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Resolves the outer index list for a single-slot sweep under the spec's
/// mode.
pub(super) fn outer_single(spec: &InstanceSpec) -> Result<(SpaceSlot, Vec<u128>)> {
    let slot = SpaceSlot::new(0, spec.size(0), spec.grid())?;
    let indices = match &spec.mode {
        Mode::Exhaustive => {
            ensure_budget(slot.len())?;
            (0..slot.len()).collect()
        }
        Mode::Random { seed, count } => {
            let mut rng = super::generate::seeded_rng(*seed);
            slot.sample_indices(&mut rng, *count)
        }
    };
    Ok((slot, indices))
}

pub(super) type PairSweep = (SpaceSlot, SpaceSlot, Vec<(u128, u128)>);

/// Resolves outer (left, right) index pairs for a two-slot sweep.
pub(super) fn outer_pair(spec: &InstanceSpec) -> Result<PairSweep> {
    let left = SpaceSlot::new(0, spec.size(0), spec.grid())?;
    let right = SpaceSlot::new(1, spec.size(1), spec.grid())?;
    let pairs = match &spec.mode {
        Mode::Exhaustive => {
            ensure_budget(left.len() * right.len())?;
            let mut v = Vec::with_capacity((left.len() * right.len()) as usize);
            for i in 0..left.len() {
                for j in 0..right.len() {
                    v.push((i, j));
                }
            }
            v
        }
        Mode::Random { seed, count } => {
            let mut rng = super::generate::seeded_rng(*seed);
            let li = left.sample_indices(&mut rng, *count);
            let ri = right.sample_indices(&mut rng, *count);
            li.into_iter().zip(ri).collect()
        }
    };
    Ok((left, right, pairs))
}

/// The two defining forms of the adherence of a filter agree: the meet of
/// costs over ultrafilters refining it equals the meet over all proper
/// filters meshing it.
pub(super) fn run_adh_two_forms(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    let (slot, indices) = outer_single(spec)?;
    ensure_budget(indices.len() as u128 * 16)?;
    Ok(scan_outer(indices.len() as u64, jobs, |oi| {
        let s = slot.get(indices[oi as usize]);
        let carrier = s.carrier().clone();
        let mut violations = Vec::new();
        let mut instances = 0u64;
        for (fi, f) in enumerate_filters(&carrier, false).iter().enumerate() {
            instances += 1;
            let ultra_form = adherence(&s, f).expect("same carrier");
            let mesh_form = adherence_mesh_oracle(&s, f).expect("same carrier");
            if ultra_form != mesh_form {
                violations.push(Violation {
                    order: (oi, fi as u64),
                    bindings: vec![
                        ("space", Bound::Space(s.clone())),
                        ("filter", Bound::Filter(f.clone())),
                    ],
                    lhs: render_vec(&ultra_form),
                    rhs: render_vec(&mesh_form),
                });
            }
        }
        (instances, violations)
    }))
}

pub(super) fn reeval_adh_two_forms(v: &Violation) -> Result<(String, String)> {
    let s = v.space("space").expect("space binding");
    let f = v.filter("filter").expect("filter binding");
    Ok((
        render_vec(&adherence(s, f)?),
        render_vec(&adherence_mesh_oracle(s, f)?),
    ))
}

fn thm1_classes() -> Vec<FilterClass> {
    vec![
        FilterClass::all(),
        FilterClass::principal(),
        FilterClass::point_filters(),
    ]
}

/// The class reflection of a structure, evaluated at a filter and a point,
/// is the measure of compactness of the filter at that point's singleton.
pub(super) fn run_thm1_adh_measure(
    spec: &InstanceSpec,
    jobs: usize,
) -> Result<(u64, Vec<Violation>)> {
    let (slot, indices) = outer_single(spec)?;
    ensure_budget(indices.len() as u128 * 3 * 16 * 4)?;
    Ok(scan_outer(indices.len() as u64, jobs, |oi| {
        let s = slot.get(indices[oi as usize]);
        let carrier = s.carrier().clone();
        let mut violations = Vec::new();
        let mut instances = 0u64;
        let mut inner = 0u64;
        for class in thm1_classes() {
            let reflected = adh_reflect(&s, &class);
            for f in enumerate_filters(&carrier, false) {
                for x in carrier.labels() {
                    instances += 1;
                    inner += 1;
                    let lhs = reflected.get(&f, x).expect("table covers filter");
                    let singleton = carrier.singleton(x).expect("carrier point");
                    let rhs = measure_at_set(&s, &class, &singleton, &f)
                        .expect("same carrier")
                        .value;
                    if lhs != rhs {
                        violations.push(Violation {
                            order: (oi, inner),
                            bindings: vec![
                                ("space", Bound::Space(s.clone())),
                                ("class", Bound::Class(class.name().to_string())),
                                ("filter", Bound::Filter(f.clone())),
                                ("point", Bound::Point(x.clone())),
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

pub(super) fn reeval_thm1(v: &Violation) -> Result<(String, String)> {
    let s = v.space("space").expect("space binding");
    let class = FilterClass::parse(v.text("class").expect("class binding"))?;
    let f = v.filter("filter").expect("filter binding");
    let x = v.text("point").expect("point binding");
    let lhs = adh_reflect(s, &class).get(f, x)?;
    let rhs = measure_at_set(s, &class, &s.carrier().singleton(x)?, f)?.value;
    Ok((lhs.to_string(), rhs.to_string()))
}

/// Iterates all relations between the two slot spaces of a pair sweep.
fn for_each_relation<F>(
    spec: &InstanceSpec,
    jobs: usize,
    inner_estimate: u128,
    mut_check: F,
) -> Result<(u64, Vec<Violation>)>
where
    F: Fn(u64, &CapStructure, &CapStructure, &Relation, &mut Vec<Violation>) -> u64 + Send + Sync,
{
    let (left, right, pairs) = outer_pair(spec)?;
    ensure_budget(pairs.len() as u128 * 16 * inner_estimate)?;
    Ok(scan_outer(pairs.len() as u64, jobs, |oi| {
        let (li, ri) = pairs[oi as usize];
        let x = left.get(li);
        let y = right.get(ri);
        let mut violations = Vec::new();
        let mut instances = 0u64;
        for rel_idx in 0..relation_count(x.carrier(), y.carrier()) {
            let r = relation_by_index(x.carrier(), y.carrier(), rel_idx);
            instances += mut_check(oi, &x, &y, &r, &mut violations);
        }
        (instances, violations)
    }))
}

/// A relation compact for a larger class stays compact for any smaller
/// principal-composable class.
pub(super) fn run_lem1_class_decrease(
    spec: &InstanceSpec,
    jobs: usize,
) -> Result<(u64, Vec<Violation>)> {
    let subclasses = [
        FilterClass::principal(),
        FilterClass::countably_based(),
        FilterClass::countably_deep(),
    ];
    for_each_relation(spec, jobs, 40, move |oi, x, y, r, violations| {
        let mut instances = 0u64;
        let big = relation_compact(&FilterClass::all(), r, x, y).expect("carriers agree");
        for (ci, small) in subclasses.iter().enumerate() {
            instances += 1;
            if big.compact {
                let little = relation_compact(small, r, x, y).expect("carriers agree");
                if !little.compact {
                    violations.push(Violation {
                        order: (oi, ci as u64),
                        bindings: vec![
                            ("space_x", Bound::Space(x.clone())),
                            ("space_y", Bound::Space(y.clone())),
                            ("relation", Bound::Rel(r.clone())),
                            ("class", Bound::Class(small.name().to_string())),
                        ],
                        lhs: "compact for class `all`".into(),
                        rhs: format!("not compact for class `{}`", small.name()),
                    });
                }
            }
        }
        instances
    })
}

/// Definitional relation compactness coincides with the pointwise
/// criterion for a principal-composable class.
pub(super) fn run_lem2_pointwise(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    for_each_relation(spec, jobs, 30, |oi, x, y, r, violations| {
        let class = FilterClass::all();
        let definitional = relation_compact(&class, r, x, y).expect("carriers agree");
        let kx = crate::kernel::EvalKernel::new(x);
        let ky = crate::kernel::EvalKernel::new(y);
        let class_y = class.member_cores(y.carrier());
        let pointwise_holds =
            crate::compactness::pointwise_witness(&kx, &ky, &class_y, r, x.carrier()).is_none();
        if definitional.compact != pointwise_holds {
            violations.push(Violation {
                order: (oi, 0),
                bindings: vec![
                    ("space_x", Bound::Space(x.clone())),
                    ("space_y", Bound::Space(y.clone())),
                    ("relation", Bound::Rel(r.clone())),
                ],
                lhs: format!("definitional: {}", definitional.compact),
                rhs: format!("pointwise: {pointwise_holds}"),
            });
        }
        1
    })
}

pub(super) fn reeval_lem2(v: &Violation) -> Result<(String, String)> {
    let x = v.space("space_x").expect("space_x binding");
    let y = v.space("space_y").expect("space_y binding");
    let r = v.relation("relation").expect("relation binding");
    let class = FilterClass::all();
    Ok((
        format!(
            "definitional: {}",
            relation_compact(&class, r, x, y)?.compact
        ),
        format!(
            "pointwise: {}",
            relation_compact_pointwise(&class, r, x, y)?.holds
        ),
    ))
}

/// The pointwise-measure corollary: a relation is compact iff the measure
/// at each singleton dominates the image measure at the point's image.
pub(super) fn run_cor_pointwise(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    for_each_relation(spec, jobs, 30, |oi, x, y, r, violations| {
        let class = FilterClass::all();
        let definitional = relation_compact(&class, r, x, y).expect("carriers agree");
        let mut measure_side = true;
        'outer: for f in enumerate_filters(x.carrier(), false) {
            let rf = r.rel_image(&f).expect("domain");
            for xi in x.carrier().labels() {
                let sing = x.carrier().singleton(xi).expect("point");
                let lhs = measure_at_set(x, &class, &sing, &f).expect("carrier").value;
                let rx = r.image_of(&sing).expect("domain");
                let rhs = measure_at_set(y, &class, &rx, &rf).expect("carrier").value;
                if lhs < rhs {
                    measure_side = false;
                    break 'outer;
                }
            }
        }
        if definitional.compact != measure_side {
            violations.push(Violation {
                order: (oi, 0),
                bindings: vec![
                    ("space_x", Bound::Space(x.clone())),
                    ("space_y", Bound::Space(y.clone())),
                    ("relation", Bound::Rel(r.clone())),
                ],
                lhs: format!("definitional: {}", definitional.compact),
                rhs: format!("singleton-measure criterion: {measure_side}"),
            });
        }
        1
    })
}

/// For maps into structures fixed under the class reflection, contraction,
/// compactness of the graph, and class-compactness of the graph coincide.
pub(super) fn run_cor_contraction(
    spec: &InstanceSpec,
    jobs: usize,
) -> Result<(u64, Vec<Violation>)> {
    let (left, right, pairs) = outer_pair(spec)?;
    ensure_budget(pairs.len() as u128 * 8 * 30)?;
    Ok(scan_outer(pairs.len() as u64, jobs, |oi| {
        let (li, ri) = pairs[oi as usize];
        let x = left.get(li);
        let y = right.get(ri);
        let mut violations = Vec::new();
        let mut instances = 0u64;
        let mut inner = 0u64;
        for class in [FilterClass::all(), FilterClass::principal()] {
            // hypothesis: the codomain is fixed by the class reflection
            let reflected = adh_reflect(&y, &class);
            let fixed = (1..=y.carrier().full_mask()).all(|gm| {
                (0..y.carrier().len())
                    .all(|yi| reflected.lambda_mask(gm, yi) == y.lambda_mask(gm, yi))
            });
            if !fixed {
                continue;
            }
            for mi in 0..super::generate::map_count(x.carrier(), y.carrier()) {
                let f = super::generate::map_by_index(x.carrier(), y.carrier(), mi);
                instances += 1;
                inner += 1;
                let contraction = crate::maps::is_contraction(&f, &x, &y)
                    .expect("carriers agree")
                    .holds;
                let graph = f.graph();
                let compact_all = relation_compact(&FilterClass::all(), &graph, &x, &y)
                    .expect("carriers agree")
                    .compact;
                let compact_class = relation_compact(&class, &graph, &x, &y)
                    .expect("carriers agree")
                    .compact;
                if contraction != compact_all || compact_all != compact_class {
                    violations.push(Violation {
                        order: (oi, inner),
                        bindings: vec![
                            ("space_x", Bound::Space(x.clone())),
                            ("space_y", Bound::Space(y.clone())),
                            ("map", Bound::MapValue(f.clone())),
                            ("class", Bound::Class(class.name().to_string())),
                        ],
                        lhs: format!("contraction: {contraction}, compact: {compact_all}"),
                        rhs: format!("{}-compact: {compact_class}", class.name()),
                    });
                }
            }
        }
        (instances, violations)
    }))
}

/// Whether every image set of the relation is a compact subset of the
/// codomain for the class.
fn images_compact(
    class: &FilterClass,
    r: &Relation,
    y: &impl LambdaSource,
) -> bool {
    r.domain().labels().iter().all(|xl| {
        let img = r.image_of_point(xl).expect("domain point");
        crate::compactness::set_compactness(y, class, &img, Within::Itself).expect("carrier")
    })
}

/// Over approach codomains: a principal-compact relation with classwise
/// compact images is compact for the class (one direction).
pub(super) fn run_thm4(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    thm4_char(spec, jobs, false)
}

/// Over approach codomains: compact for the class iff principal-compact
/// with classwise compact images (both directions).
pub(super) fn run_cor_char(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    thm4_char(spec, jobs, true)
}

fn thm4_char(spec: &InstanceSpec, jobs: usize, iff: bool) -> Result<(u64, Vec<Violation>)> {
    for_each_relation(spec, jobs, 60, move |oi, x, y, r, violations| {
        // hypothesis: the codomain is an approach space
        if !check_subcategory(y).map(|r| r.is_ap()).unwrap_or(false) {
            return 0;
        }
        let class = FilterClass::all();
        let f0_compact = relation_compact(&FilterClass::principal(), r, x, y)
            .expect("carriers agree")
            .compact;
        let imgs = images_compact(&class, r, y);
        let class_compact = relation_compact(&class, r, x, y)
            .expect("carriers agree")
            .compact;
        let hypothesis = f0_compact && imgs;
        let broken = if iff {
            hypothesis != class_compact
        } else {
            hypothesis && !class_compact
        };
        if broken {
            violations.push(Violation {
                order: (oi, 0),
                bindings: vec![
                    ("space_x", Bound::Space(x.clone())),
                    ("space_y", Bound::Space(y.clone())),
                    ("relation", Bound::Rel(r.clone())),
                ],
                lhs: format!("principal-compact and images compact: {hypothesis}"),
                rhs: format!("all-compact: {class_compact}"),
            });
        }
        1
    })
}

/// Finite-carrier collapse facts: every canonical structure is a valid
/// pseudo- and pre-approach structure, every finite space is compact, the
/// four large built-in classes coincide (n <= 4), and closed coincides
/// with perfect over the slot-1 map sweep.
pub(super) fn run_meta_collapse(spec: &InstanceSpec, jobs: usize) -> Result<(u64, Vec<Violation>)> {
    let (slot, indices) = outer_single(spec)?;
    ensure_budget(indices.len() as u128 * 400)?;
    let (mut instances, mut violations) = scan_outer(indices.len() as u64, jobs, |oi| {
        let s = slot.get(indices[oi as usize]);
        let mut violations = Vec::new();
        let mut instances = 0u64;

        instances += 1;
        if !s.to_table().validate_axioms().ok() {
            violations.push(Violation {
                order: (oi, 0),
                bindings: vec![("space", Bound::Space(s.clone()))],
                lhs: "canonical extension".into(),
                rhs: "axiom violation".into(),
            });
        }

        instances += 1;
        match check_subcategory(&s) {
            Ok(sub) if sub.is_psap() && sub.is_prap() => {}
            _ => violations.push(Violation {
                order: (oi, 1),
                bindings: vec![("space", Bound::Space(s.clone()))],
                lhs: "canonical structure".into(),
                rhs: "not pseudo/pre-approach".into(),
            }),
        }

        // every finite space is compact: the whole-space measure of the
        // trivial filter vanishes
        instances += 1;
        let trivial = Filter::trivial(s.carrier());
        let m = measure_at_set(&s, &FilterClass::all(), &s.carrier().full(), &trivial)
            .expect("carrier")
            .value;
        if !m.is_zero() {
            violations.push(Violation {
                order: (oi, 2),
                bindings: vec![("space", Bound::Space(s.clone()))],
                lhs: m.to_string(),
                rhs: "0".into(),
            });
        }
        (instances, violations)
    });

    // the four large classes coincide element-wise on carriers up to 4
    let builtins = FilterClass::builtins();
    for n in 1..=4usize {
        let carrier = super::generate::default_carrier(0, n);
        let base = builtins[0].members(&carrier);
        for class in &builtins[1..] {
            instances += 1;
            if class.members(&carrier) != base {
                violations.push(Violation {
                    order: (u64::MAX, n as u64),
                    bindings: vec![("class", Bound::Class(class.name().to_string()))],
                    lhs: format!("members on {n} points differ from `all`"),
                    rhs: "expected coincidence".into(),
                });
            }
        }
        for f in enumerate_filters(&carrier, true) {
            instances += 1;
            if !builtins.iter().all(|c| c.contains(&f)) {
                violations.push(Violation {
                    order: (u64::MAX, 100 + n as u64),
                    bindings: vec![("filter", Bound::Filter(f.clone()))],
                    lhs: "membership differs across the large classes".into(),
                    rhs: "expected coincidence".into(),
                });
            }
        }
    }

    // closed coincides with perfect on finite instances (slot-1 sized maps)
    let msize = spec.size(1).min(spec.size(0));
    let mleft = SpaceSlot::new(0, msize, spec.grid())?;
    let mright = SpaceSlot::new(1, spec.size(1), spec.grid())?;
    for li in 0..mleft.len() {
        let x = mleft.get(li);
        for ri in 0..mright.len() {
            let y = mright.get(ri);
            for mi in 0..super::generate::map_count(x.carrier(), y.carrier()) {
                let f = super::generate::map_by_index(x.carrier(), y.carrier(), mi);
                instances += 1;
                let closed = crate::maps::is_closed(&f, &x, &y).expect("carriers").holds;
                let perfect = crate::maps::is_perfect(&f, &x, &y, &FilterClass::all())
                    .expect("carriers")
                    .compact;
                if closed != perfect {
                    violations.push(Violation {
                        order: (u64::MAX - 1, li as u64 * 1000 + ri as u64 * 10 + mi as u64),
                        bindings: vec![
                            ("space_x", Bound::Space(x.clone())),
                            ("space_y", Bound::Space(y.clone())),
                            ("map", Bound::MapValue(f.clone())),
                        ],
                        lhs: format!("closed: {closed}"),
                        rhs: format!("perfect: {perfect}"),
                    });
                }
            }
        }
    }

    Ok((instances, super::report::finish_violations(violations)))
}

/// Shared helper for checks needing "is this structure an approach space".
pub(super) fn is_ap(s: &CapStructure) -> bool {
    check_subcategory(s).map(|r| r.is_ap()).unwrap_or(false)
}
