//! Measures of compactness of filters relative to a class of filters, and
//! compact relations.
//!
//! The measure of a filter `F` at a family `A` of cost vectors is the join,
//! over class members `D` meshing `F` and members `phi` of `A`, of the
//! infimum over the carrier of `adh D + phi`. Identifying a subset with its
//! indicator vector (0 on the set, inf off it) specializes the inner
//! infimum to the infimum of the adherence over the set; value 0 means `F`
//! is compact at the set. A relation is compact for a class when its images
//! never increase the measure.
//!
//! Empty sets and empty images are not excluded: an empty inner meet is
//! `inf` and an empty outer join is 0, exactly as the lattice conventions
//! dictate, and the reports surface those cases instead of forbidding them.

use std::fmt;

use crate::error::Result;
use crate::extreal::ExtReal;
use crate::filter::{check_composable, Carrier, Filter, FilterClass, Relation, Subset};
use crate::kernel::EvalKernel;
use crate::space::{adherence, LambdaSource};

/// A finite family of cost vectors in `[0, inf]^X`.
#[derive(Clone, Debug)]
pub struct FnFamily {
    carrier: Carrier,
    members: Vec<Vec<ExtReal>>,
}

impl FnFamily {
    pub fn new(carrier: &Carrier, members: Vec<Vec<ExtReal>>) -> Result<FnFamily> {
        for m in &members {
            if m.len() != carrier.len() {
                return Err(crate::error::Error::MatrixShape(format!(
                    "family member has {} entries, expected {}",
                    m.len(),
                    carrier.len()
                )));
            }
        }
        Ok(FnFamily {
            carrier: carrier.clone(),
            members,
        })
    }

    /// The singleton family of the indicator of `a`: 0 on `a`, inf off it.
    pub fn indicator(a: &Subset) -> FnFamily {
        let n = a.carrier().len();
        let mut v = vec![ExtReal::INFINITY; n];
        for i in a.indices() {
            v[i] = ExtReal::ZERO;
        }
        FnFamily {
            carrier: a.carrier().clone(),
            members: vec![v],
        }
    }

    pub fn members(&self) -> &[Vec<ExtReal>] {
        &self.members
    }
}

/// A computed measure with the arguments attaining it.
#[derive(Clone, Debug)]
pub struct MeasureReport {
    pub value: ExtReal,
    /// First class filter (enumeration order) attaining the outer join,
    /// `None` when no class member meshes the filter (empty join).
    pub witness_filter: Option<Filter>,
    /// Index into the family of the member attaining the join, for
    /// family-form measures.
    pub witness_member: Option<usize>,
}

impl fmt::Display for MeasureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)?;
        if let Some(w) = &self.witness_filter {
            write!(f, " (witness {w}")?;
            if let Some(i) = self.witness_member {
                write!(f, ", member {i}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// The measure of compactness of `f` at a family of cost vectors.
pub fn measure_at_family<L: LambdaSource>(
    src: &L,
    class: &FilterClass,
    family: &FnFamily,
    f: &Filter,
) -> Result<MeasureReport> {
    src.carrier().check_same(&family.carrier)?;
    src.carrier().check_same(f.carrier())?;
    let n = src.carrier().len();
    let fm = f.core_mask();

    let mut best = ExtReal::ZERO;
    let mut witness: Option<(u64, usize)> = None;
    for dm in class.member_cores(src.carrier()) {
        if dm == 0 || dm & fm == 0 {
            continue;
        }
        let adh: Vec<ExtReal> = {
            let filt = Filter::from_mask(src.carrier(), dm);
            adherence(src, &filt)?
        };
        for (pi, phi) in family.members.iter().enumerate() {
            let v = ExtReal::meet_all((0..n).map(|x| adh[x] + phi[x]));
            if witness.is_none() || v > best {
                best = v;
                witness = Some((dm, pi));
            }
        }
    }
    // an empty family (or no meshing member) leaves the join empty
    if family.members.is_empty() {
        witness = None;
        best = ExtReal::ZERO;
    }
    Ok(MeasureReport {
        value: best,
        witness_filter: witness.map(|(dm, _)| Filter::from_mask(src.carrier(), dm)),
        witness_member: witness.map(|(_, pi)| pi),
    })
}

/// The measure of compactness of `f` at a subset: the join over meshing
/// class members of the infimum of their adherence over the set.
///
/// Equals [`measure_at_family`] at the indicator singleton; the two are
/// computed independently and the identification is tested, not assumed.
/// An empty set makes the inner meet empty (`inf` for every meshing
/// member).
pub fn measure_at_set<L: LambdaSource>(
    src: &L,
    class: &FilterClass,
    a: &Subset,
    f: &Filter,
) -> Result<MeasureReport> {
    src.carrier().check_same(a.carrier())?;
    src.carrier().check_same(f.carrier())?;
    let kernel = EvalKernel::new(src);
    let cores = class.member_cores(src.carrier());
    let (rank, witness) = kernel.measure_at_set_witness(&cores, a.mask(), f.core_mask());
    Ok(MeasureReport {
        value: kernel.value(rank),
        witness_filter: witness.map(|dm| Filter::from_mask(src.carrier(), dm)),
        witness_member: None,
    })
}

/// Scope of a set-compactness question.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Within {
    /// `A` is compact: the measure of `A^` at `A` itself is 0.
    Itself,
    /// `A` is relatively compact: the measure of `A^` at the whole space is 0.
    WholeSpace,
}

pub fn set_compactness<L: LambdaSource>(
    src: &L,
    class: &FilterClass,
    a: &Subset,
    within: Within,
) -> Result<bool> {
    let f = Filter::principal(a);
    let at = match within {
        Within::Itself => a.clone(),
        Within::WholeSpace => src.carrier().full(),
    };
    Ok(measure_at_set(src, class, &at, &f)?.value.is_zero())
}

/// Witness that a relation fails to be compact: a filter and a set whose
/// image measure exceeds the source measure.
#[derive(Clone, Debug)]
pub struct RelationWitness {
    pub filter: Filter,
    pub set: Subset,
    pub image_filter: Filter,
    pub image_set: Subset,
    pub lhs: ExtReal,
    pub rhs: ExtReal,
}

#[derive(Clone, Debug)]
pub struct CompactnessReport {
    pub compact: bool,
    pub witness: Option<RelationWitness>,
}

/// Decides by exhaustion over proper filters and nonempty subsets of the
/// domain whether `r` is a compact relation for the class: the measure of
/// `R[F]` at `R[A]` never exceeds the measure of `F` at `A`.
///
/// When `R[A]` is empty the left side follows the empty-meet convention
/// (`inf` for any meshing class member), so such pairs fail unless the
/// right side is `inf` too; the witness surfaces them.
pub fn relation_compact<LX, LY>(
    class: &FilterClass,
    r: &Relation,
    x: &LX,
    y: &LY,
) -> Result<CompactnessReport>
where
    LX: LambdaSource,
    LY: LambdaSource,
{
    x.carrier().check_same(r.domain())?;
    y.carrier().check_same(r.codomain())?;
    let kx = EvalKernel::new(x);
    let ky = EvalKernel::new(y);
    let class_x = class.member_cores(x.carrier());
    let class_y = class.member_cores(y.carrier());
    let full = x.carrier().full_mask();

    for fm in 1..=full {
        let rf = r.image_mask(fm);
        for am in 1..=full {
            let ra = r.image_mask(am);
            let lhs = ky.measure_at_set(&class_y, ra, rf);
            let rhs = kx.measure_at_set(&class_x, am, fm);
            if ky.value(lhs) > kx.value(rhs) {
                return Ok(CompactnessReport {
                    compact: false,
                    witness: Some(RelationWitness {
                        filter: Filter::from_mask(x.carrier(), fm),
                        set: x.carrier().subset_from_mask(am),
                        image_filter: Filter::from_mask(y.carrier(), rf),
                        image_set: y.carrier().subset_from_mask(ra),
                        lhs: ky.value(lhs),
                        rhs: kx.value(rhs),
                    }),
                });
            }
        }
    }
    Ok(CompactnessReport {
        compact: true,
        witness: None,
    })
}

/// Witness that the pointwise criterion fails: the cost of a filter at a
/// point is below the image measure at the point's image set.
#[derive(Clone, Debug)]
pub struct PointwiseWitness {
    pub filter: Filter,
    pub point: String,
    pub lhs: ExtReal,
    pub rhs: ExtReal,
}

#[derive(Clone, Debug)]
pub struct PointwiseReport {
    pub holds: bool,
    pub witness: Option<PointwiseWitness>,
    /// Set when the class fails principal-composability on these carriers,
    /// in which case equivalence with [`relation_compact`] is not
    /// guaranteed.
    pub composability_warning: Option<String>,
}

/// The pointwise compactness criterion: for every proper filter `F` and
/// point `x`, the cost of `F` at `x` dominates the measure of `R[F]` at
/// `R(x)`. Equivalent to definitional compactness for classes that are
/// principal-composable; the report warns when the class fails that
/// precondition on the given carriers.
pub fn relation_compact_pointwise<LX, LY>(
    class: &FilterClass,
    r: &Relation,
    x: &LX,
    y: &LY,
) -> Result<PointwiseReport>
where
    LX: LambdaSource,
    LY: LambdaSource,
{
    x.carrier().check_same(r.domain())?;
    y.carrier().check_same(r.codomain())?;
    let kx = EvalKernel::new(x);
    let ky = EvalKernel::new(y);
    let class_y = class.member_cores(y.carrier());

    let composability_warning = {
        let fwd = check_composable(class, &FilterClass::principal(), x.carrier(), y.carrier())?;
        let bwd = check_composable(class, &FilterClass::principal(), y.carrier(), x.carrier())?;
        if fwd.holds && bwd.holds {
            None
        } else {
            Some(format!(
                "class `{}` is not principal-composable on these carriers; \
                 the pointwise criterion may diverge from definitional compactness",
                class.name()
            ))
        }
    };

    let witness = pointwise_witness(&kx, &ky, &class_y, r, x.carrier());
    Ok(PointwiseReport {
        holds: witness.is_none(),
        witness,
        composability_warning,
    })
}

/// The bare criterion scan, shared with the verification harness (which
/// establishes composability once per sweep rather than per relation).
pub(crate) fn pointwise_witness(
    kx: &EvalKernel,
    ky: &EvalKernel,
    class_y: &[u64],
    r: &Relation,
    x_carrier: &Carrier,
) -> Option<PointwiseWitness> {
    let n = x_carrier.len();
    for fm in 1..=x_carrier.full_mask() {
        let rf = r.image_mask(fm);
        for xi in 0..n {
            let rx = r.image_mask(1 << xi);
            let lhs = kx.value(kx.lambda_rank(fm, xi));
            let rhs = ky.value(ky.measure_at_set(class_y, rx, rf));
            if lhs < rhs {
                return Some(PointwiseWitness {
                    filter: Filter::from_mask(x_carrier, fm),
                    point: x_carrier.label(xi).to_string(),
                    lhs,
                    rhs,
                });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::{enumerate_filters, Carrier};
    use crate::space::CapStructure;

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
    fn measure_at_set_examples() {
        let s = s2();
        let c = s.carrier().clone();
        let fa = Filter::point(&c, "a").unwrap();
        let all = FilterClass::all();

        let r = measure_at_set(&s, &all, &c.subset(["b"]).unwrap(), &fa).unwrap();
        assert_eq!(r.value, ext("2"));
        assert_eq!(r.witness_filter.unwrap(), fa);

        // the whole space at the trivial filter: every finite space is compact
        let r = measure_at_set(&s, &all, &c.full(), &Filter::trivial(&c)).unwrap();
        assert_eq!(r.value, ExtReal::ZERO);

        let r = measure_at_set(
            &s,
            &FilterClass::point_filters(),
            &c.subset(["b"]).unwrap(),
            &fa,
        )
        .unwrap();
        assert_eq!(r.value, ext("2"));
    }

    #[test]
    fn measure_at_family_examples() {
        let s = s2();
        let c = s.carrier().clone();
        let all = FilterClass::all();
        let fa = Filter::point(&c, "a").unwrap();

        // indicator family reduces to the set measure
        let theta_b = FnFamily::indicator(&c.subset(["b"]).unwrap());
        let r = measure_at_family(&s, &all, &theta_b, &fa).unwrap();
        assert_eq!(r.value, ext("2"));

        // zero-vector family at the trivial filter
        let zero = FnFamily::new(&c, vec![vec![ExtReal::ZERO, ExtReal::ZERO]]).unwrap();
        let r = measure_at_family(&s, &all, &zero, &Filter::trivial(&c)).unwrap();
        assert_eq!(r.value, ExtReal::ZERO);

        // empty family: empty join
        let empty = FnFamily::new(&c, vec![]).unwrap();
        let r = measure_at_family(&s, &all, &empty, &fa).unwrap();
        assert_eq!(r.value, ExtReal::ZERO);
        assert!(r.witness_filter.is_none());
    }

    #[test]
    fn identification_exhaustive_small() {
        // set measure == family measure at the indicator, for every
        // structure over {0,1,inf} on two points, every set and filter
        let c = Carrier::new(["a", "b"]).unwrap();
        let grid = [ext("0"), ext("1"), ExtReal::INFINITY];
        let all = FilterClass::all();
        for &v01 in &grid {
            for &v10 in &grid {
                let s = CapStructure::from_matrix(
                    &c,
                    &[vec![ext("0"), v01], vec![v10, ext("0")]],
                )
                .unwrap();
                for f in enumerate_filters(&c, true) {
                    for a in c.subsets() {
                        let direct = measure_at_set(&s, &all, &a, &f).unwrap().value;
                        let via_family =
                            measure_at_family(&s, &all, &FnFamily::indicator(&a), &f)
                                .unwrap()
                                .value;
                        assert_eq!(direct, via_family, "a={a} f={f}");
                    }
                }
            }
        }
    }

    #[test]
    fn empty_set_measure_is_inf_when_meshed() {
        let s = s2();
        let c = s.carrier().clone();
        let fa = Filter::point(&c, "a").unwrap();
        let r = measure_at_set(&s, &FilterClass::all(), &c.empty(), &fa).unwrap();
        assert_eq!(r.value, ExtReal::INFINITY);
        // nothing meshes the degenerate filter: empty join
        let r = measure_at_set(&s, &FilterClass::all(), &c.empty(), &Filter::degenerate(&c))
            .unwrap();
        assert_eq!(r.value, ExtReal::ZERO);
    }

    #[test]
    fn set_compactness_examples() {
        let s = s2();
        let c = s.carrier().clone();
        let all = FilterClass::all();
        assert!(set_compactness(&s, &all, &c.full(), Within::Itself).unwrap());
        assert!(set_compactness(&s, &all, &c.full(), Within::WholeSpace).unwrap());
        assert!(set_compactness(&s, &all, &c.subset(["b"]).unwrap(), Within::Itself).unwrap());
        assert!(set_compactness(&s, &all, &c.subset(["a"]).unwrap(), Within::Itself).unwrap());
    }

    #[test]
    fn relation_compact_examples() {
        let s = s2();
        let c = s.carrier().clone();
        let all = FilterClass::all();

        let id = Relation::diagonal(&c);
        assert!(relation_compact(&all, &id, &s, &s).unwrap().compact);

        // graph of the constant map into a one-point space
        let one = CapStructure::one_point("p");
        let konst = crate::filter::Map::constant(&c, one.carrier(), "p")
            .unwrap()
            .graph();
        assert!(relation_compact(&all, &konst, &s, &one).unwrap().compact);

        // a concrete failing witness on a 2x2 instance: the identity from
        // the indiscrete structure into s2 is not compact
        let ind = CapStructure::indiscrete(&c);
        let rep = relation_compact(&all, &id, &ind, &s).unwrap();
        assert!(!rep.compact);
        let w = rep.witness.unwrap();
        assert!(w.lhs > w.rhs);
        // replay the witness values through the public measure
        let lhs = measure_at_set(&s, &all, &w.image_set, &w.image_filter)
            .unwrap()
            .value;
        let rhs = measure_at_set(&ind, &all, &w.set, &w.filter).unwrap().value;
        assert_eq!(lhs, w.lhs);
        assert_eq!(rhs, w.rhs);
    }

    #[test]
    fn pointwise_examples() {
        let s = s2();
        let c = s.carrier().clone();
        let all = FilterClass::all();
        let id = Relation::diagonal(&c);

        let rep = relation_compact_pointwise(&all, &id, &s, &s).unwrap();
        assert!(rep.holds);
        assert!(rep.composability_warning.is_none());

        let ind = CapStructure::indiscrete(&c);
        let rep = relation_compact_pointwise(&all, &id, &ind, &s).unwrap();
        assert!(!rep.holds);

        // point filters are not principal-composable: warned
        let rep =
            relation_compact_pointwise(&FilterClass::point_filters(), &id, &s, &s).unwrap();
        assert!(rep.composability_warning.is_some());
    }

    #[test]
    fn class_monotone_in_measures() {
        // a smaller class never increases the measure
        let s = s2();
        let c = s.carrier().clone();
        let all = FilterClass::all();
        let points = FilterClass::point_filters();
        for f in enumerate_filters(&c, true) {
            for a in c.subsets() {
                let small = measure_at_set(&s, &points, &a, &f).unwrap().value;
                let large = measure_at_set(&s, &all, &a, &f).unwrap().value;
                assert!(small <= large, "a={a} f={f}");
            }
        }
    }
}
