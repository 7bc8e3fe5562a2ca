//! Classification of maps between finite convergence-approach spaces:
//! contractions, closed maps, perfect and quotient maps relative to a
//! filter class, and the named instances those classes induce.

use std::fmt;

use crate::compactness::{relation_compact, CompactnessReport};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::filter::{Filter, FilterClass, Map};
use crate::kernel::EvalKernel;
use crate::space::{adh_reflect, final_structure, CapStructure, LambdaSource};

#[derive(Clone, Debug)]
pub struct ContractionWitness {
    pub filter: Filter,
    pub point: String,
    pub image_cost: ExtReal,
    pub source_cost: ExtReal,
}

#[derive(Clone, Debug)]
pub struct ContractionReport {
    pub holds: bool,
    pub witness: Option<ContractionWitness>,
}

/// A map is a contraction when image filters never cost more at image
/// points: `lambda_Y(f[F])(f(x)) <= lambda_X(F)(x)` for every proper `F`
/// and every `x`.
pub fn is_contraction(f: &Map, x: &CapStructure, y: &CapStructure) -> Result<ContractionReport> {
    x.carrier().check_same(f.domain())?;
    y.carrier().check_same(f.codomain())?;
    let n = x.carrier().len();
    for fm in 1..=x.carrier().full_mask() {
        let im = f.image_point_mask(fm);
        for xi in 0..n {
            let source = x.lambda_mask(fm, xi);
            let image = y.lambda_mask(im, f.apply_index(xi));
            if image > source {
                return Ok(ContractionReport {
                    holds: false,
                    witness: Some(ContractionWitness {
                        filter: Filter::from_mask(x.carrier(), fm),
                        point: x.carrier().label(xi).to_string(),
                        image_cost: image,
                        source_cost: source,
                    }),
                });
            }
        }
    }
    Ok(ContractionReport {
        holds: true,
        witness: None,
    })
}

#[derive(Clone, Debug)]
pub struct ClosedWitness {
    pub set: crate::filter::Subset,
    pub point: String,
    pub fiber_adherence: ExtReal,
    pub image_adherence: ExtReal,
}

#[derive(Clone, Debug)]
pub struct ClosedReport {
    pub holds: bool,
    pub witness: Option<ClosedWitness>,
    /// Codomain points with empty fibers make the fiber meet empty (`inf`),
    /// so the inequality there can only hold with an `inf` right side.
    pub empty_fiber_note: Option<String>,
}

/// A map is closed when, for every codomain point and nonempty domain set,
/// the infimum of the set's adherence over the fiber is dominated by the
/// adherence of the image set at the point.
pub fn is_closed(f: &Map, x: &CapStructure, y: &CapStructure) -> Result<ClosedReport> {
    x.carrier().check_same(f.domain())?;
    y.carrier().check_same(f.codomain())?;
    let kx = EvalKernel::new(x);
    let ky = EvalKernel::new(y);
    let ny = y.carrier().len();

    let empty_fiber_note = f.missed_point().map(|yi| {
        format!(
            "`{}` has an empty fiber: the fiber-side meet there is inf",
            y.carrier().label(yi)
        )
    });

    for am in 1..=x.carrier().full_mask() {
        let image = f.image_point_mask(am);
        for yi in 0..ny {
            let fiber = f.fiber_mask(yi);
            let lhs = kx.adh_meet(am, fiber); // empty fiber: inf
            let rhs = ky.adh_rank(image, yi);
            if kx.value(lhs) > ky.value(rhs) {
                return Ok(ClosedReport {
                    holds: false,
                    witness: Some(ClosedWitness {
                        set: x.carrier().subset_from_mask(am),
                        point: y.carrier().label(yi).to_string(),
                        fiber_adherence: kx.value(lhs),
                        image_adherence: ky.value(rhs),
                    }),
                    empty_fiber_note,
                });
            }
        }
    }
    Ok(ClosedReport {
        holds: true,
        witness: None,
        empty_fiber_note,
    })
}

/// A map is perfect for a class when its inverse relation is a compact
/// relation for that class.
pub fn is_perfect(
    f: &Map,
    x: &CapStructure,
    y: &CapStructure,
    class: &FilterClass,
) -> Result<CompactnessReport> {
    x.carrier().check_same(f.domain())?;
    y.carrier().check_same(f.codomain())?;
    relation_compact(class, &f.inverse_relation(), y, x)
}

#[derive(Clone, Debug)]
pub struct QuotientWitness {
    pub filter: Filter,
    pub point: String,
    pub codomain_cost: ExtReal,
    pub reflected_cost: ExtReal,
}

#[derive(Clone, Debug)]
pub struct QuotientReport {
    pub holds: bool,
    pub witness: Option<QuotientWitness>,
}

/// A surjective map is a quotient for a class when the codomain structure
/// dominates the class reflection of the final structure, pointwise over
/// every proper filter. Errors on non-surjective maps.
pub fn is_quotient(
    f: &Map,
    x: &CapStructure,
    y: &CapStructure,
    class: &FilterClass,
) -> Result<QuotientReport> {
    x.carrier().check_same(f.domain())?;
    y.carrier().check_same(f.codomain())?;
    if let Some(yi) = f.missed_point() {
        return Err(Error::NotSurjective(y.carrier().label(yi).to_string()));
    }
    let final_table = final_structure(f, x)?;
    let reflected = adh_reflect(&final_table, class);
    let ny = y.carrier().len();
    for gm in 1..=y.carrier().full_mask() {
        for yi in 0..ny {
            let lhs = y.lambda_mask(gm, yi);
            let rhs = reflected.lambda_mask(gm, yi);
            if lhs < rhs {
                return Ok(QuotientReport {
                    holds: false,
                    witness: Some(QuotientWitness {
                        filter: Filter::from_mask(y.carrier(), gm),
                        point: y.carrier().label(yi).to_string(),
                        codomain_cost: lhs,
                        reflected_cost: rhs,
                    }),
                });
            }
        }
    }
    Ok(QuotientReport {
        holds: true,
        witness: None,
    })
}

/// Computes both sides of the final-structure adherence identity for an
/// onto map: the adherence of `d` at `y` in the final structure, and the
/// infimum over the fiber of `y` of the adherence of the preimage filter.
pub fn adh_final_check(
    f: &Map,
    x: &CapStructure,
    d: &Filter,
    y_point: &str,
) -> Result<(ExtReal, ExtReal)> {
    x.carrier().check_same(f.domain())?;
    f.codomain().check_same(d.carrier())?;
    if let Some(yi) = f.missed_point() {
        return Err(Error::NotSurjective(f.codomain().label(yi).to_string()));
    }
    let yi = f.codomain().require(y_point)?;

    let final_table = final_structure(f, x)?;
    let lhs = ExtReal::meet_all(
        d.core()
            .indices()
            .map(|w| final_table.lambda_mask(1 << (w as u64), yi)),
    );

    let pulled = f.pull(d)?;
    let kx = EvalKernel::new(x);
    let rhs = kx.value(kx.adh_meet(pulled.core_mask(), f.fiber_mask(yi)));
    Ok((lhs, rhs))
}

/// Outcome of one classification row.
#[derive(Clone, Debug)]
pub enum RowOutcome {
    Holds,
    Fails(String),
    NotApplicable(String),
}

impl RowOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, RowOutcome::Holds)
    }
}

impl fmt::Display for RowOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowOutcome::Holds => write!(f, "yes"),
            RowOutcome::Fails(w) => write!(f, "no ({w})"),
            RowOutcome::NotApplicable(r) => write!(f, "n/a ({r})"),
        }
    }
}

/// The named map classes, each parameterized by its filter class.
#[derive(Clone, Debug)]
pub struct MapClassification {
    pub contraction: RowOutcome,
    pub closed: RowOutcome,
    /// (row name, class name, outcome) for the perfect-type rows:
    /// perfect, countably perfect, inversely Lindelof, and closed via
    /// principal filters.
    pub perfect_rows: Vec<(String, String, RowOutcome)>,
    /// (row name, class name, outcome) for the quotient-type rows:
    /// biquotient, countably biquotient, weakly biquotient, hereditarily
    /// quotient.
    pub quotient_rows: Vec<(String, String, RowOutcome)>,
    /// On finite carriers the large classes coincide, so the perfect-type
    /// rows must agree with each other, the quotient-type rows with each
    /// other, and closedness with principal-perfectness. Verified per
    /// instance, not assumed.
    pub perfect_rows_agree: bool,
    pub quotient_rows_agree: bool,
    pub closed_matches_principal_perfect: bool,
}

fn perfect_row_classes() -> Vec<(&'static str, FilterClass)> {
    vec![
        ("perfect", FilterClass::all()),
        ("countably perfect", FilterClass::countably_based()),
        ("inversely Lindelof", FilterClass::countably_deep()),
        ("closed (principal-perfect)", FilterClass::principal()),
    ]
}

fn quotient_row_classes() -> Vec<(&'static str, FilterClass)> {
    vec![
        ("biquotient", FilterClass::all()),
        ("countably biquotient", FilterClass::countably_based()),
        ("weakly biquotient", FilterClass::countably_deep()),
        ("hereditarily quotient", FilterClass::principal()),
    ]
}

/// Evaluates every named row of the map-class table for `f`, including the
/// per-instance coincidence report across classes.
pub fn classify(f: &Map, x: &CapStructure, y: &CapStructure) -> Result<MapClassification> {
    let contraction = match is_contraction(f, x, y)? {
        r if r.holds => RowOutcome::Holds,
        r => {
            let w = r.witness.unwrap();
            RowOutcome::Fails(format!(
                "at ({}, {}): {} > {}",
                w.filter, w.point, w.image_cost, w.source_cost
            ))
        }
    };

    let closed_report = is_closed(f, x, y)?;
    let closed = if closed_report.holds {
        RowOutcome::Holds
    } else {
        let w = closed_report.witness.unwrap();
        RowOutcome::Fails(format!(
            "at (A={}, y={}): fiber adherence {} > image adherence {}",
            w.set, w.point, w.fiber_adherence, w.image_adherence
        ))
    };

    let mut perfect_rows = Vec::new();
    for (name, class) in perfect_row_classes() {
        let rep = is_perfect(f, x, y, &class)?;
        let outcome = if rep.compact {
            RowOutcome::Holds
        } else {
            let w = rep.witness.unwrap();
            RowOutcome::Fails(format!(
                "inverse relation not {} -compact at (G={}, B={}): {} > {}",
                class.name(),
                w.filter,
                w.set,
                w.lhs,
                w.rhs
            ))
        };
        perfect_rows.push((name.to_string(), class.name().to_string(), outcome));
    }

    let surjective = f.is_surjective();
    let mut quotient_rows = Vec::new();
    for (name, class) in quotient_row_classes() {
        let outcome = if !surjective {
            RowOutcome::NotApplicable("map is not surjective".to_string())
        } else {
            let rep = is_quotient(f, x, y, &class)?;
            if rep.holds {
                RowOutcome::Holds
            } else {
                let w = rep.witness.unwrap();
                RowOutcome::Fails(format!(
                    "at ({}, {}): codomain cost {} < reflected final cost {}",
                    w.filter, w.point, w.codomain_cost, w.reflected_cost
                ))
            }
        };
        quotient_rows.push((name.to_string(), class.name().to_string(), outcome));
    }

    let perfect_rows_agree = perfect_rows
        .windows(2)
        .all(|w| w[0].2.holds() == w[1].2.holds());
    let quotient_rows_agree = quotient_rows
        .windows(2)
        .all(|w| w[0].2.holds() == w[1].2.holds());
    let closed_matches_principal_perfect = closed.holds()
        == perfect_rows
            .iter()
            .find(|(name, _, _)| name.starts_with("closed"))
            .map(|(_, _, o)| o.holds())
            .unwrap_or(false);

    Ok(MapClassification {
        contraction,
        closed,
        perfect_rows,
        quotient_rows,
        perfect_rows_agree,
        quotient_rows_agree,
        closed_matches_principal_perfect,
    })
}

impl fmt::Display for MapClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "contraction: {}", self.contraction)?;
        writeln!(f, "closed: {}", self.closed)?;
        for (name, class, outcome) in &self.perfect_rows {
            writeln!(f, "{name} [{class}]: {outcome}")?;
        }
        for (name, class, outcome) in &self.quotient_rows {
            writeln!(f, "{name} [{class}]: {outcome}")?;
        }
        writeln!(
            f,
            "coincidence: perfect rows agree: {}; quotient rows agree: {}; closed == principal-perfect: {}",
            self.perfect_rows_agree, self.quotient_rows_agree, self.closed_matches_principal_perfect
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::Carrier;

    fn ext(s: &str) -> ExtReal {
        s.parse().unwrap()
    }

    fn s2() -> CapStructure {
        let c = Carrier::new(["a", "b"]).unwrap();
        CapStructure::from_matrix(
            &c,
            &[vec![ext("0"), ext("2")], vec![ext("3"), ext("0")]],
        )
        .unwrap()
    }

    #[test]
    fn contraction_examples() {
        let s = s2();
        let c = s.carrier().clone();
        let id = Map::identity(&c);
        assert!(is_contraction(&id, &s, &s).unwrap().holds);

        let ind = CapStructure::indiscrete(&c);
        assert!(is_contraction(&id, &s, &ind).unwrap().holds);

        let rep = is_contraction(&id, &ind, &s).unwrap();
        assert!(!rep.holds);
        let w = rep.witness.unwrap();
        // the witness re-evaluates: image cost strictly exceeds source cost
        assert!(w.image_cost > w.source_cost);
        assert_eq!(w.source_cost, ExtReal::ZERO);
    }

    #[test]
    fn closed_examples() {
        let s = s2();
        let c = s.carrier().clone();
        let one = CapStructure::one_point("p");
        let konst = Map::constant(&c, one.carrier(), "p").unwrap();
        assert!(is_closed(&konst, &s, &one).unwrap().holds);

        let id = Map::identity(&c);
        assert!(is_closed(&id, &s, &s).unwrap().holds);

        // counterexample search on 2-point instances: collapsing adherence
        // into an indiscrete codomain keeps the inequality, but the reverse
        // direction (domain adherence 2 at b, codomain adherence 0) fails
        let ind = CapStructure::indiscrete(&c);
        assert!(is_closed(&id, &ind, &s).unwrap().holds);
        let rep = is_closed(&id, &s, &ind).unwrap();
        assert!(!rep.holds);
        let w = rep.witness.unwrap();
        assert!(w.fiber_adherence > w.image_adherence);
        assert_eq!(w.image_adherence, ExtReal::ZERO);
    }

    #[test]
    fn closed_empty_fiber_note() {
        let x = Carrier::new(["a"]).unwrap();
        let y = Carrier::new(["p", "q"]).unwrap();
        let sx = CapStructure::indiscrete(&x);
        let sy = CapStructure::discrete(&y);
        let f = Map::new(&x, &y, [("a", "p")]).unwrap();
        let rep = is_closed(&f, &sx, &sy).unwrap();
        assert!(rep.empty_fiber_note.is_some());
        // with a discrete codomain the inclusion is closed
        assert!(rep.holds);
    }

    #[test]
    fn perfect_examples() {
        let s = s2();
        let c = s.carrier().clone();
        let one = CapStructure::one_point("p");
        let konst = Map::constant(&c, one.carrier(), "p").unwrap();
        assert!(is_perfect(&konst, &s, &one, &FilterClass::all())
            .unwrap()
            .compact);

        let id = Map::identity(&c);
        for class in FilterClass::builtins() {
            assert!(is_perfect(&id, &s, &s, &class).unwrap().compact);
        }
    }

    #[test]
    fn quotient_examples() {
        let s = s2();
        let c = s.carrier().clone();
        let id = Map::identity(&c);
        assert!(is_quotient(&id, &s, &s, &FilterClass::all()).unwrap().holds);

        let one = CapStructure::one_point("p");
        let konst = Map::constant(&c, one.carrier(), "p").unwrap();
        assert!(is_quotient(&konst, &s, &one, &FilterClass::all())
            .unwrap()
            .holds);

        // non-surjective maps are rejected
        let y = Carrier::new(["p", "q"]).unwrap();
        let sy = CapStructure::indiscrete(&y);
        let inj = Map::new(&c, &y, [("a", "p"), ("b", "p")]).unwrap();
        assert!(matches!(
            is_quotient(&inj, &s, &sy, &FilterClass::all()),
            Err(Error::NotSurjective(_))
        ));

        // a codomain whose cost drops below the reflected final structure
        // fails the quotient inequality with a pointwise witness
        let ind = CapStructure::indiscrete(&c);
        let rep = is_quotient(&id, &s, &ind, &FilterClass::all()).unwrap();
        assert!(!rep.holds);
        let w = rep.witness.unwrap();
        assert_eq!(w.codomain_cost, ExtReal::ZERO);
        assert!(w.codomain_cost < w.reflected_cost);

        // a codomain dominating the reflected final structure passes
        let heavy = CapStructure::discrete(&c);
        let swap = Map::new(&c, &c, [("a", "b"), ("b", "a")]).unwrap();
        assert!(is_quotient(&swap, &s, &heavy, &FilterClass::all())
            .unwrap()
            .holds);
    }

    #[test]
    fn adh_final_examples() {
        let s = s2();
        let c = s.carrier().clone();
        let id = Map::identity(&c);
        for d in crate::filter::enumerate_filters(&c, false) {
            for y in ["a", "b"] {
                let (lhs, rhs) = adh_final_check(&id, &s, &d, y).unwrap();
                assert_eq!(lhs, rhs, "d={d} y={y}");
            }
        }

        let one = Carrier::new(["p"]).unwrap();
        let konst = Map::constant(&c, &one, "p").unwrap();
        let dp = Filter::point(&one, "p").unwrap();
        let (lhs, rhs) = adh_final_check(&konst, &s, &dp, "p").unwrap();
        assert_eq!(lhs, ExtReal::ZERO);
        assert_eq!(rhs, ExtReal::ZERO);
    }

    #[test]
    fn classify_identity_all_rows_hold() {
        let s = s2();
        let id = Map::identity(s.carrier());
        let cls = classify(&id, &s, &s).unwrap();
        assert!(cls.contraction.holds());
        assert!(cls.closed.holds());
        assert!(cls.perfect_rows.iter().all(|(_, _, o)| o.holds()));
        assert!(cls.quotient_rows.iter().all(|(_, _, o)| o.holds()));
        assert!(cls.perfect_rows_agree && cls.quotient_rows_agree);
        assert!(cls.closed_matches_principal_perfect);
    }

    #[test]
    fn classify_collapse_to_point() {
        let s = s2();
        let one = CapStructure::one_point("p");
        let konst = Map::constant(s.carrier(), one.carrier(), "p").unwrap();
        let cls = classify(&konst, &s, &one).unwrap();
        assert!(cls.closed.holds());
        assert!(cls.perfect_rows.iter().all(|(_, _, o)| o.holds()));
        assert!(cls.quotient_rows.iter().all(|(_, _, o)| o.holds()));
    }

    #[test]
    fn classify_non_surjective_quotient_rows() {
        let x = Carrier::new(["a"]).unwrap();
        let y = Carrier::new(["p", "q"]).unwrap();
        let f = Map::new(&x, &y, [("a", "p")]).unwrap();
        let cls = classify(&f, &CapStructure::indiscrete(&x), &CapStructure::discrete(&y))
            .unwrap();
        assert!(cls
            .quotient_rows
            .iter()
            .all(|(_, _, o)| matches!(o, RowOutcome::NotApplicable(_))));
    }
}
