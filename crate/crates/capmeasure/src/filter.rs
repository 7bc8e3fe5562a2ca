//! Finite carriers, the filter lattice on them, relations between carriers,
//! filter classes, and the relational calculus connecting them.
//!
//! On a finite carrier every filter is principal: it contains the
//! intersection of its finitely many members, so it is the family of
//! supersets of that intersection (its *core*). Filters are therefore
//! stored by core alone, with the empty core marking the degenerate filter
//! (the whole powerset). Cores are kept as bitmasks over the carrier's
//! label order, which makes equality, meets and meshes O(1).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Carriers are capped so subsets fit in a `u64` mask.
pub const MAX_CARRIER: usize = 48;

#[derive(Debug)]
struct CarrierInner {
    labels: Vec<String>,
    index: BTreeMap<String, usize>,
}

/// An ordered finite set of distinct atom labels. Cheap to clone.
#[derive(Clone, Debug)]
pub struct Carrier(Arc<CarrierInner>);

impl PartialEq for Carrier {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.labels == other.0.labels
    }
}
impl Eq for Carrier {}

impl Carrier {
    pub fn new<I>(labels: I) -> Result<Carrier>
    where
        I: IntoIterator,
        I::Item: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyCarrier);
        }
        if labels.len() > MAX_CARRIER {
            return Err(Error::CarrierTooLarge {
                got: labels.len(),
                max: MAX_CARRIER,
            });
        }
        let mut index = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Carrier(Arc::new(CarrierInner { labels, index })))
    }

    pub fn len(&self) -> usize {
        self.0.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false // constructor enforces n >= 1
    }

    pub fn labels(&self) -> &[String] {
        &self.0.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.0.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.0.index.get(label).copied()
    }

    pub(crate) fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label).ok_or_else(|| Error::InvalidElement {
            label: label.to_string(),
            carrier: self.to_string(),
        })
    }

    pub(crate) fn full_mask(&self) -> u64 {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    pub fn subset<I>(&self, labels: I) -> Result<Subset>
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
    {
        let mut mask = 0u64;
        for l in labels {
            mask |= 1 << self.require(l.as_ref())?;
        }
        Ok(Subset {
            carrier: self.clone(),
            mask,
        })
    }

    pub fn singleton(&self, label: &str) -> Result<Subset> {
        self.subset([label])
    }

    pub fn full(&self) -> Subset {
        Subset {
            carrier: self.clone(),
            mask: self.full_mask(),
        }
    }

    pub fn empty(&self) -> Subset {
        Subset {
            carrier: self.clone(),
            mask: 0,
        }
    }

    pub(crate) fn subset_from_mask(&self, mask: u64) -> Subset {
        debug_assert_eq!(mask & !self.full_mask(), 0);
        Subset {
            carrier: self.clone(),
            mask,
        }
    }

    /// All `2^n` subsets in ascending mask order.
    pub fn subsets(&self) -> impl Iterator<Item = Subset> + '_ {
        (0..=self.full_mask()).map(move |m| self.subset_from_mask(m))
    }

    /// Product carrier with labels `(x,y)`, y varying fastest.
    pub fn product(&self, other: &Carrier) -> Result<Carrier> {
        let mut labels = Vec::with_capacity(self.len() * other.len());
        for x in self.labels() {
            for y in other.labels() {
                labels.push(format!("({x},{y})"));
            }
        }
        Carrier::new(labels)
    }

    pub(crate) fn check_same(&self, other: &Carrier) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::CarrierMismatch {
                expected: self.to_string(),
                got: other.to_string(),
            })
        }
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.labels().join(" "))
    }
}

/// A subset of a carrier, stored as a bitmask over the carrier order.
#[derive(Clone, PartialEq, Eq)]
pub struct Subset {
    carrier: Carrier,
    mask: u64,
}

impl Subset {
    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub(crate) fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, label: &str) -> bool {
        match self.carrier.index_of(label) {
            Some(i) => self.mask & (1 << i) != 0,
            None => false,
        }
    }

    pub fn labels(&self) -> Vec<&str> {
        self.indices().map(|i| self.carrier.label(i)).collect()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        let mask = self.mask;
        (0..self.carrier.len()).filter(move |i| mask & (1 << i) != 0)
    }

    pub fn complement(&self) -> Subset {
        self.carrier
            .subset_from_mask(!self.mask & self.carrier.full_mask())
    }

    pub fn union(&self, other: &Subset) -> Result<Subset> {
        self.carrier.check_same(&other.carrier)?;
        Ok(self.carrier.subset_from_mask(self.mask | other.mask))
    }

    pub fn intersection(&self, other: &Subset) -> Result<Subset> {
        self.carrier.check_same(&other.carrier)?;
        Ok(self.carrier.subset_from_mask(self.mask & other.mask))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels().join(","))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A filter on a finite carrier, stored as the core of its principal form.
///
/// `core = {}` is the degenerate filter (the whole powerset). The degenerate
/// filter contains the empty set, so it meshes nothing.
#[derive(Clone, PartialEq, Eq)]
pub struct Filter {
    carrier: Carrier,
    core: u64,
}

impl Filter {
    /// The principal filter `core^ = {B : core ⊆ B}`.
    pub fn principal(core: &Subset) -> Filter {
        Filter {
            carrier: core.carrier().clone(),
            core: core.mask(),
        }
    }

    pub fn degenerate(carrier: &Carrier) -> Filter {
        Filter {
            carrier: carrier.clone(),
            core: 0,
        }
    }

    pub fn point(carrier: &Carrier, label: &str) -> Result<Filter> {
        Ok(Filter::principal(&carrier.singleton(label)?))
    }

    pub fn trivial(carrier: &Carrier) -> Filter {
        Filter::principal(&carrier.full())
    }

    /// Converts a user-supplied base (a nonempty list of sets) to the filter
    /// it generates: the principal filter at the intersection of the base.
    /// A base with empty intersection generates the degenerate filter.
    pub fn from_base(base: &[Subset]) -> Result<Filter> {
        let first = base.first().ok_or(Error::EmptyBase)?;
        let carrier = first.carrier().clone();
        let mut core = carrier.full_mask();
        for s in base {
            carrier.check_same(s.carrier())?;
            core &= s.mask();
        }
        Ok(Filter { carrier, core })
    }

    pub(crate) fn from_mask(carrier: &Carrier, core: u64) -> Filter {
        debug_assert_eq!(core & !carrier.full_mask(), 0);
        Filter {
            carrier: carrier.clone(),
            core,
        }
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn core(&self) -> Subset {
        self.carrier.subset_from_mask(self.core)
    }

    pub(crate) fn core_mask(&self) -> u64 {
        self.core
    }

    pub fn is_degenerate(&self) -> bool {
        self.core == 0
    }

    pub fn is_proper(&self) -> bool {
        self.core != 0
    }

    pub fn is_point(&self) -> bool {
        self.core.count_ones() == 1
    }

    /// The infimum of two filters: the coarsest filter below both,
    /// with core the union of the cores.
    pub fn meet(&self, other: &Filter) -> Result<Filter> {
        self.carrier.check_same(&other.carrier)?;
        Ok(Filter {
            carrier: self.carrier.clone(),
            core: self.core | other.core,
        })
    }

    /// `self >= other` in the refinement order: `self` contains every member
    /// of `other`, i.e. the core of `self` is contained in the core of `other`.
    pub fn refines(&self, other: &Filter) -> bool {
        self.carrier == other.carrier && self.core & !other.core == 0
    }

    pub fn meshes(&self, other: &Filter) -> Result<bool> {
        mesh(self, other)
    }

    /// The ultrafilters finer than this filter: the point filters at core
    /// points. Empty for the degenerate filter.
    pub fn ultra(&self) -> Vec<Filter> {
        self.core()
            .indices()
            .map(|i| Filter::from_mask(&self.carrier, 1 << i))
            .collect()
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_degenerate() {
            write!(f, "degenerate")
        } else {
            write!(f, "{}^", self.core())
        }
    }
}

impl fmt::Debug for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// All proper filters (one per nonempty core, ascending mask order),
/// preceded by the degenerate filter when requested.
pub fn enumerate_filters(carrier: &Carrier, include_degenerate: bool) -> Vec<Filter> {
    let start = if include_degenerate { 0 } else { 1 };
    (start..=carrier.full_mask())
        .map(|m| Filter::from_mask(carrier, m))
        .collect()
}

/// A finite family of subsets, for grills and general mesh tests.
/// Members are kept sorted and deduplicated.
#[derive(Clone, PartialEq, Eq)]
pub struct SetFamily {
    carrier: Carrier,
    members: Vec<u64>,
}

impl SetFamily {
    pub fn new<I: IntoIterator<Item = Subset>>(carrier: &Carrier, members: I) -> Result<SetFamily> {
        let mut masks = Vec::new();
        for s in members {
            carrier.check_same(s.carrier())?;
            masks.push(s.mask());
        }
        masks.sort_unstable();
        masks.dedup();
        Ok(SetFamily {
            carrier: carrier.clone(),
            members: masks,
        })
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn members(&self) -> Vec<Subset> {
        self.members
            .iter()
            .map(|&m| self.carrier.subset_from_mask(m))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members().iter().map(|s| s.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

enum MeshRep<'a> {
    FilterCore(u64),
    Family(&'a [u64]),
}

/// Either side of a mesh test: a filter or a set family.
pub trait Meshy {
    fn mesh_carrier(&self) -> &Carrier;
    #[doc(hidden)]
    fn mesh_rep(&self) -> MeshRepHolder<'_>;
}

#[doc(hidden)]
pub struct MeshRepHolder<'a>(MeshRep<'a>);

impl Meshy for Filter {
    fn mesh_carrier(&self) -> &Carrier {
        &self.carrier
    }
    fn mesh_rep(&self) -> MeshRepHolder<'_> {
        MeshRepHolder(MeshRep::FilterCore(self.core))
    }
}

impl Meshy for SetFamily {
    fn mesh_carrier(&self) -> &Carrier {
        &self.carrier
    }
    fn mesh_rep(&self) -> MeshRepHolder<'_> {
        MeshRepHolder(MeshRep::Family(&self.members))
    }
}

/// `A # B`: every member of `A` intersects every member of `B`.
///
/// A filter stands for the family of supersets of its core, so a proper
/// filter meshes a family iff the core meets every member, two proper
/// filters mesh iff their cores intersect, and the degenerate filter
/// (which contains the empty set) meshes only the empty family.
pub fn mesh<A: Meshy + ?Sized, B: Meshy + ?Sized>(a: &A, b: &B) -> Result<bool> {
    a.mesh_carrier().check_same(b.mesh_carrier())?;
    let res = match (a.mesh_rep().0, b.mesh_rep().0) {
        (MeshRep::FilterCore(f), MeshRep::FilterCore(g)) => f != 0 && g != 0 && f & g != 0,
        (MeshRep::FilterCore(f), MeshRep::Family(ms)) | (MeshRep::Family(ms), MeshRep::FilterCore(f)) => {
            if f == 0 {
                ms.is_empty()
            } else {
                ms.iter().all(|&m| m & f != 0)
            }
        }
        (MeshRep::Family(a), MeshRep::Family(b)) => {
            a.iter().all(|&x| b.iter().all(|&y| x & y != 0))
        }
    };
    Ok(res)
}

/// The grill of a family: all subsets meshing it.
pub fn grill(a: &SetFamily) -> SetFamily {
    let members: Vec<u64> = (0..=a.carrier.full_mask())
        .filter(|&h| a.members.iter().all(|&m| m & h != 0))
        .collect();
    SetFamily {
        carrier: a.carrier.clone(),
        members,
    }
}

/// A relation between two carriers, stored as per-point image masks.
#[derive(Clone, PartialEq, Eq)]
pub struct Relation {
    domain: Carrier,
    codomain: Carrier,
    img: Vec<u64>,
}

impl Relation {
    pub fn new<I, S, T>(domain: &Carrier, codomain: &Carrier, pairs: I) -> Result<Relation>
    where
        I: IntoIterator<Item = (S, T)>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let mut img = vec![0u64; domain.len()];
        for (x, y) in pairs {
            let xi = domain.require(x.as_ref())?;
            let yi = codomain.require(y.as_ref())?;
            img[xi] |= 1 << yi;
        }
        Ok(Relation {
            domain: domain.clone(),
            codomain: codomain.clone(),
            img,
        })
    }

    pub(crate) fn from_images(domain: &Carrier, codomain: &Carrier, img: Vec<u64>) -> Relation {
        debug_assert_eq!(img.len(), domain.len());
        Relation {
            domain: domain.clone(),
            codomain: codomain.clone(),
            img,
        }
    }

    pub fn empty(domain: &Carrier, codomain: &Carrier) -> Relation {
        Relation::from_images(domain, codomain, vec![0; domain.len()])
    }

    pub fn diagonal(carrier: &Carrier) -> Relation {
        let img = (0..carrier.len()).map(|i| 1u64 << i).collect();
        Relation::from_images(carrier, carrier, img)
    }

    pub fn domain(&self) -> &Carrier {
        &self.domain
    }

    pub fn codomain(&self) -> &Carrier {
        &self.codomain
    }

    pub fn pairs(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (xi, &m) in self.img.iter().enumerate() {
            for yi in 0..self.codomain.len() {
                if m & (1 << yi) != 0 {
                    out.push((
                        self.domain.label(xi).to_string(),
                        self.codomain.label(yi).to_string(),
                    ));
                }
            }
        }
        out
    }

    pub(crate) fn image_mask(&self, of: u64) -> u64 {
        let mut m = 0;
        for (xi, &im) in self.img.iter().enumerate() {
            if of & (1 << xi) != 0 {
                m |= im;
            }
        }
        m
    }

    pub fn image_of(&self, s: &Subset) -> Result<Subset> {
        self.domain.check_same(s.carrier())?;
        Ok(self.codomain.subset_from_mask(self.image_mask(s.mask())))
    }

    pub fn image_of_point(&self, label: &str) -> Result<Subset> {
        let i = self.domain.require(label)?;
        Ok(self.codomain.subset_from_mask(self.img[i]))
    }

    pub fn inverse(&self) -> Relation {
        let mut img = vec![0u64; self.codomain.len()];
        for (xi, &m) in self.img.iter().enumerate() {
            for (yi, slot) in img.iter_mut().enumerate() {
                if m & (1 << yi) != 0 {
                    *slot |= 1 << xi;
                }
            }
        }
        Relation {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            img,
        }
    }

    /// `R[F]`: the (possibly degenerate) filter generated by the images of
    /// the members of `F`; its core is the image of the core of `F`.
    pub fn rel_image(&self, f: &Filter) -> Result<Filter> {
        self.domain.check_same(f.carrier())?;
        Ok(Filter::from_mask(
            &self.codomain,
            self.image_mask(f.core_mask()),
        ))
    }

    /// The image of `G` under the inverse relation.
    pub fn rel_preimage(&self, g: &Filter) -> Result<Filter> {
        self.codomain.check_same(g.carrier())?;
        let mut m = 0u64;
        for (xi, &im) in self.img.iter().enumerate() {
            if im & g.core_mask() != 0 {
                m |= 1 << xi;
            }
        }
        Ok(Filter::from_mask(&self.domain, m))
    }

    /// `R x Id_Z : X x Z => Y x Z`.
    pub fn product_with_identity(
        &self,
        z: &Carrier,
        dom: &ProductCarrier,
        cod: &ProductCarrier,
    ) -> Result<Relation> {
        dom.left().check_same(&self.domain)?;
        dom.right().check_same(z)?;
        cod.left().check_same(&self.codomain)?;
        cod.right().check_same(z)?;
        let mut img = vec![0u64; dom.carrier().len()];
        for xi in 0..self.domain.len() {
            for zi in 0..z.len() {
                let mut m = 0u64;
                for yi in 0..self.codomain.len() {
                    if self.img[xi] & (1 << yi) != 0 {
                        m |= 1 << cod.pair_index(yi, zi);
                    }
                }
                img[dom.pair_index(xi, zi)] = m;
            }
        }
        Ok(Relation::from_images(dom.carrier(), cod.carrier(), img))
    }

    pub fn is_map(&self) -> bool {
        self.img.iter().all(|m| m.count_ones() == 1)
    }

    pub fn to_map(&self) -> Result<Map> {
        let mut images = Vec::with_capacity(self.domain.len());
        for (xi, &m) in self.img.iter().enumerate() {
            match m.count_ones() {
                0 => return Err(Error::NotTotal(self.domain.label(xi).to_string())),
                1 => images.push(m.trailing_zeros() as usize),
                _ => return Err(Error::NotSingleValued(self.domain.label(xi).to_string())),
            }
        }
        Ok(Map {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            images,
        })
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pairs()
            .iter()
            .map(|(x, y)| format!("({x},{y})"))
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A total single-valued map between carriers.
#[derive(Clone, PartialEq, Eq)]
pub struct Map {
    domain: Carrier,
    codomain: Carrier,
    images: Vec<usize>,
}

impl Map {
    pub fn new<I, S, T>(domain: &Carrier, codomain: &Carrier, pairs: I) -> Result<Map>
    where
        I: IntoIterator<Item = (S, T)>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        Relation::new(domain, codomain, pairs)?.to_map()
    }

    pub(crate) fn from_images(domain: &Carrier, codomain: &Carrier, images: Vec<usize>) -> Map {
        debug_assert_eq!(images.len(), domain.len());
        Map {
            domain: domain.clone(),
            codomain: codomain.clone(),
            images,
        }
    }

    pub fn identity(carrier: &Carrier) -> Map {
        Map::from_images(carrier, carrier, (0..carrier.len()).collect())
    }

    pub fn constant(domain: &Carrier, codomain: &Carrier, to: &str) -> Result<Map> {
        let yi = codomain.require(to)?;
        Ok(Map::from_images(
            domain,
            codomain,
            vec![yi; domain.len()],
        ))
    }

    pub fn domain(&self) -> &Carrier {
        &self.domain
    }

    pub fn codomain(&self) -> &Carrier {
        &self.codomain
    }

    pub fn apply_index(&self, xi: usize) -> usize {
        self.images[xi]
    }

    pub fn apply(&self, label: &str) -> Result<&str> {
        Ok(self.codomain.label(self.images[self.domain.require(label)?]))
    }

    pub(crate) fn image_point_mask(&self, of: u64) -> u64 {
        let mut m = 0u64;
        for (xi, &yi) in self.images.iter().enumerate() {
            if of & (1 << xi) != 0 {
                m |= 1 << yi;
            }
        }
        m
    }

    pub(crate) fn fiber_mask(&self, yi: usize) -> u64 {
        let mut m = 0u64;
        for (xi, &im) in self.images.iter().enumerate() {
            if im == yi {
                m |= 1 << xi;
            }
        }
        m
    }

    pub fn fiber(&self, label: &str) -> Result<Subset> {
        let yi = self.codomain.require(label)?;
        Ok(self.domain.subset_from_mask(self.fiber_mask(yi)))
    }

    pub fn is_surjective(&self) -> bool {
        (0..self.codomain.len()).all(|yi| self.fiber_mask(yi) != 0)
    }

    /// First codomain point with an empty fiber, if any.
    pub(crate) fn missed_point(&self) -> Option<usize> {
        (0..self.codomain.len()).find(|&yi| self.fiber_mask(yi) == 0)
    }

    /// `f[F]`: image filter, with core the image of the core.
    pub fn push(&self, f: &Filter) -> Result<Filter> {
        self.domain.check_same(f.carrier())?;
        Ok(Filter::from_mask(
            &self.codomain,
            self.image_point_mask(f.core_mask()),
        ))
    }

    /// `f^-[G]`: preimage filter, with core the preimage of the core.
    pub fn pull(&self, g: &Filter) -> Result<Filter> {
        self.codomain.check_same(g.carrier())?;
        let mut m = 0u64;
        for (xi, &yi) in self.images.iter().enumerate() {
            if g.core_mask() & (1 << yi) != 0 {
                m |= 1 << xi;
            }
        }
        Ok(Filter::from_mask(&self.domain, m))
    }

    pub fn graph(&self) -> Relation {
        let img = self.images.iter().map(|&yi| 1u64 << yi).collect();
        Relation::from_images(&self.domain, &self.codomain, img)
    }

    pub fn inverse_relation(&self) -> Relation {
        self.graph().inverse()
    }
}

impl fmt::Display for Map {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .images
            .iter()
            .enumerate()
            .map(|(xi, &yi)| format!("{}->{}", self.domain.label(xi), self.codomain.label(yi)))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl fmt::Debug for Map {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A product carrier together with its factors and index arithmetic.
#[derive(Clone, PartialEq, Eq)]
pub struct ProductCarrier {
    left: Carrier,
    right: Carrier,
    prod: Carrier,
}

impl ProductCarrier {
    pub fn new(left: &Carrier, right: &Carrier) -> Result<ProductCarrier> {
        Ok(ProductCarrier {
            left: left.clone(),
            right: right.clone(),
            prod: left.product(right)?,
        })
    }

    pub fn left(&self) -> &Carrier {
        &self.left
    }

    pub fn right(&self) -> &Carrier {
        &self.right
    }

    pub fn carrier(&self) -> &Carrier {
        &self.prod
    }

    pub fn pair_index(&self, xi: usize, yi: usize) -> usize {
        xi * self.right.len() + yi
    }

    pub fn unpair(&self, k: usize) -> (usize, usize) {
        (k / self.right.len(), k % self.right.len())
    }

    pub fn pair_label(&self, x: &str, y: &str) -> Result<String> {
        let xi = self.left.require(x)?;
        let yi = self.right.require(y)?;
        Ok(self.prod.label(self.pair_index(xi, yi)).to_string())
    }

    pub fn subset_product(&self, a: &Subset, b: &Subset) -> Result<Subset> {
        self.left.check_same(a.carrier())?;
        self.right.check_same(b.carrier())?;
        let mut m = 0u64;
        for xi in a.indices() {
            for yi in b.indices() {
                m |= 1 << self.pair_index(xi, yi);
            }
        }
        Ok(self.prod.subset_from_mask(m))
    }

    /// `F x G`: the filter on the product with core the product of cores.
    pub fn prod_filter(&self, f: &Filter, g: &Filter) -> Result<Filter> {
        let core = self.subset_product(&f.core(), &g.core())?;
        Ok(Filter::principal(&core))
    }

    pub(crate) fn project_left_mask(&self, m: u64) -> u64 {
        let mut out = 0u64;
        for k in 0..self.prod.len() {
            if m & (1 << k) != 0 {
                out |= 1 << self.unpair(k).0;
            }
        }
        out
    }

    pub(crate) fn project_right_mask(&self, m: u64) -> u64 {
        let mut out = 0u64;
        for k in 0..self.prod.len() {
            if m & (1 << k) != 0 {
                out |= 1 << self.unpair(k).1;
            }
        }
        out
    }

    pub fn proj_left_filter(&self, h: &Filter) -> Result<Filter> {
        self.prod.check_same(h.carrier())?;
        Ok(Filter::from_mask(
            &self.left,
            self.project_left_mask(h.core_mask()),
        ))
    }

    pub fn proj_right_filter(&self, h: &Filter) -> Result<Filter> {
        self.prod.check_same(h.carrier())?;
        Ok(Filter::from_mask(
            &self.right,
            self.project_right_mask(h.core_mask()),
        ))
    }

    pub fn proj_left_map(&self) -> Map {
        let images = (0..self.prod.len()).map(|k| self.unpair(k).0).collect();
        Map::from_images(&self.prod, &self.left, images)
    }

    pub fn proj_right_map(&self) -> Map {
        let images = (0..self.prod.len()).map(|k| self.unpair(k).1).collect();
        Map::from_images(&self.prod, &self.right, images)
    }

    /// Reads the core of a filter on the product as a relation left => right.
    pub fn core_as_relation(&self, j: &Filter) -> Result<Relation> {
        self.prod.check_same(j.carrier())?;
        let mut img = vec![0u64; self.left.len()];
        for k in 0..self.prod.len() {
            if j.core_mask() & (1 << k) != 0 {
                let (xi, yi) = self.unpair(k);
                img[xi] |= 1 << yi;
            }
        }
        Ok(Relation::from_images(&self.left, &self.right, img))
    }

    /// `J[F]`: for principal filters, the relation read off the core of `J`
    /// applied to the core of `F`.
    pub fn jrel_image(&self, j: &Filter, f: &Filter) -> Result<Filter> {
        self.left.check_same(f.carrier())?;
        self.core_as_relation(j)?.rel_image(f)
    }

    /// `J^-[G]`, the inverse-relation image.
    pub fn jrel_preimage(&self, j: &Filter, g: &Filter) -> Result<Filter> {
        self.right.check_same(g.carrier())?;
        self.core_as_relation(j)?.rel_preimage(g)
    }
}

type MemberFn = Arc<dyn Fn(&Filter) -> bool + Send + Sync>;
type EnumFn = Arc<dyn Fn(&Carrier) -> Vec<Filter> + Send + Sync>;

#[derive(Clone)]
enum ClassKind {
    All,
    Principal,
    CountablyBased,
    CountablyDeep,
    PointFilters,
    Custom { member: MemberFn, enumerate: EnumFn },
}

/// A named, carrier-parametric family of filters with a membership
/// predicate and an enumerator.
///
/// Every class contains the degenerate filter of every carrier; the
/// constructors enforce this convention even for custom predicates.
#[derive(Clone)]
pub struct FilterClass {
    name: String,
    kind: ClassKind,
}

impl FilterClass {
    pub fn all() -> FilterClass {
        FilterClass {
            name: "all".into(),
            kind: ClassKind::All,
        }
    }

    pub fn principal() -> FilterClass {
        FilterClass {
            name: "principal".into(),
            kind: ClassKind::Principal,
        }
    }

    pub fn countably_based() -> FilterClass {
        FilterClass {
            name: "countably-based".into(),
            kind: ClassKind::CountablyBased,
        }
    }

    pub fn countably_deep() -> FilterClass {
        FilterClass {
            name: "countably-deep".into(),
            kind: ClassKind::CountablyDeep,
        }
    }

    pub fn point_filters() -> FilterClass {
        FilterClass {
            name: "points".into(),
            kind: ClassKind::PointFilters,
        }
    }

    /// The four large built-in classes; they coincide on finite carriers,
    /// which the verification harness checks rather than assumes.
    pub fn builtins() -> Vec<FilterClass> {
        vec![
            FilterClass::all(),
            FilterClass::principal(),
            FilterClass::countably_based(),
            FilterClass::countably_deep(),
        ]
    }

    pub fn custom<M, E>(name: &str, member: M, enumerate: E) -> FilterClass
    where
        M: Fn(&Filter) -> bool + Send + Sync + 'static,
        E: Fn(&Carrier) -> Vec<Filter> + Send + Sync + 'static,
    {
        FilterClass {
            name: name.to_string(),
            kind: ClassKind::Custom {
                member: Arc::new(member),
                enumerate: Arc::new(enumerate),
            },
        }
    }

    pub fn parse(name: &str) -> Result<FilterClass> {
        match name {
            "all" => Ok(FilterClass::all()),
            "principal" => Ok(FilterClass::principal()),
            "countably-based" | "cb" => Ok(FilterClass::countably_based()),
            "countably-deep" | "cd" => Ok(FilterClass::countably_deep()),
            "points" | "point" => Ok(FilterClass::point_filters()),
            other => Err(Error::UnknownClass(other.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn contains(&self, f: &Filter) -> bool {
        if f.is_degenerate() {
            return true; // every class contains the degenerate filter
        }
        match &self.kind {
            ClassKind::All => true,
            // every filter on a finite carrier has a least member (its core)
            ClassKind::Principal => true,
            // {core} is a finite, hence countable, base
            ClassKind::CountablyBased => true,
            // a principal filter is closed under arbitrary intersections of
            // members, countable ones in particular
            ClassKind::CountablyDeep => true,
            ClassKind::PointFilters => f.is_point(),
            ClassKind::Custom { member, .. } => member(f),
        }
    }

    /// All members on a carrier, degenerate filter first, then ascending
    /// core order.
    pub fn members(&self, carrier: &Carrier) -> Vec<Filter> {
        match &self.kind {
            ClassKind::Custom { enumerate, .. } => {
                let mut out = vec![Filter::degenerate(carrier)];
                for f in enumerate(carrier) {
                    if f.is_proper() && !out.contains(&f) {
                        out.push(f);
                    }
                }
                out[1..].sort_by_key(|f| f.core_mask());
                out
            }
            _ => self
                .member_cores(carrier)
                .into_iter()
                .map(|m| Filter::from_mask(carrier, m))
                .collect(),
        }
    }

    /// Core masks of all members, ascending; the degenerate core 0 first.
    pub(crate) fn member_cores(&self, carrier: &Carrier) -> Vec<u64> {
        match &self.kind {
            ClassKind::All
            | ClassKind::Principal
            | ClassKind::CountablyBased
            | ClassKind::CountablyDeep => (0..=carrier.full_mask()).collect(),
            ClassKind::PointFilters => {
                let mut v = vec![0u64];
                v.extend((0..carrier.len()).map(|i| 1u64 << i));
                v
            }
            ClassKind::Custom { .. } => {
                self.members(carrier).iter().map(Filter::core_mask).collect()
            }
        }
    }

}

impl fmt::Debug for FilterClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FilterClass({})", self.name)
    }
}

impl fmt::Display for FilterClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// Witness that a class is not composable: `image = J[D]` escapes the class.
#[derive(Clone, Debug)]
pub struct ComposabilityWitness {
    pub class_filter: Filter,
    pub product_filter: Filter,
    pub image: Filter,
}

#[derive(Clone, Debug)]
pub struct ComposabilityReport {
    pub holds: bool,
    pub witness: Option<ComposabilityWitness>,
}

/// Checks on the given carriers whether `D` is `J`-composable: for every
/// `D`-filter on `X` and every `J`-filter on `X x Y`, the image lands in
/// `D(Y)`. Returns the first witness pair (in enumeration order) on failure.
pub fn check_composable(
    d: &FilterClass,
    j: &FilterClass,
    x: &Carrier,
    y: &Carrier,
) -> Result<ComposabilityReport> {
    let pc = ProductCarrier::new(x, y)?;
    for dm in d.member_cores(x) {
        let df = Filter::from_mask(x, dm);
        for jm in j.member_cores(pc.carrier()) {
            let jf = Filter::from_mask(pc.carrier(), jm);
            let image = pc.jrel_image(&jf, &df)?;
            if !d.contains(&image) {
                return Ok(ComposabilityReport {
                    holds: false,
                    witness: Some(ComposabilityWitness {
                        class_filter: df,
                        product_filter: jf,
                        image,
                    }),
                });
            }
        }
    }
    Ok(ComposabilityReport {
        holds: true,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> Carrier {
        Carrier::new(["a", "b", "c"]).unwrap()
    }

    fn ab() -> Carrier {
        Carrier::new(["a", "b"]).unwrap()
    }

    #[test]
    fn carrier_validation() {
        assert!(matches!(
            Carrier::new(Vec::<String>::new()),
            Err(Error::EmptyCarrier)
        ));
        assert!(matches!(
            Carrier::new(["a", "a"]),
            Err(Error::DuplicateLabel(_))
        ));
        let c = abc();
        assert!(matches!(
            c.subset(["z"]),
            Err(Error::InvalidElement { .. })
        ));
    }

    #[test]
    fn principal_examples() {
        let c = abc();
        let f = Filter::principal(&c.subset(["a"]).unwrap());
        assert!(f.is_point() && f.is_proper());
        let t = Filter::trivial(&c);
        assert_eq!(t.core().len(), 3);
        let d = Filter::principal(&c.empty());
        assert!(d.is_degenerate());
    }

    #[test]
    fn filter_base_helper() {
        let c = abc();
        let base = [c.subset(["a", "b"]).unwrap(), c.subset(["b", "c"]).unwrap()];
        let f = Filter::from_base(&base).unwrap();
        assert_eq!(f.core().labels(), vec!["b"]);
        assert!(matches!(Filter::from_base(&[]), Err(Error::EmptyBase)));
        let disjoint = [c.subset(["a"]).unwrap(), c.subset(["b"]).unwrap()];
        assert!(Filter::from_base(&disjoint).unwrap().is_degenerate());
    }

    #[test]
    fn meet_examples() {
        let c = abc();
        let fa = Filter::point(&c, "a").unwrap();
        let fb = Filter::point(&c, "b").unwrap();
        assert_eq!(
            fa.meet(&fb).unwrap(),
            Filter::principal(&c.subset(["a", "b"]).unwrap())
        );
        assert_eq!(fa.meet(&fa).unwrap(), fa);
        let d = Filter::degenerate(&c);
        assert_eq!(fa.meet(&d).unwrap(), fa);
        let other = ab();
        assert!(matches!(
            fa.meet(&Filter::point(&other, "a").unwrap()),
            Err(Error::CarrierMismatch { .. })
        ));
    }

    #[test]
    fn mesh_examples() {
        let c = abc();
        let fab = Filter::principal(&c.subset(["a", "b"]).unwrap());
        let fbc = Filter::principal(&c.subset(["b", "c"]).unwrap());
        let fa = Filter::point(&c, "a").unwrap();
        let fb = Filter::point(&c, "b").unwrap();
        let d = Filter::degenerate(&c);
        assert!(mesh(&fab, &fbc).unwrap());
        assert!(!mesh(&fa, &fb).unwrap());
        assert!(!mesh(&d, &fa).unwrap());
        assert!(!mesh(&d, &d).unwrap());
    }

    #[test]
    fn grill_examples() {
        let c = ab();
        let fam = SetFamily::new(&c, [c.subset(["a"]).unwrap()]).unwrap();
        let g = grill(&fam);
        assert_eq!(
            g.members(),
            vec![c.subset(["a"]).unwrap(), c.subset(["a", "b"]).unwrap()]
        );

        let empty_set = SetFamily::new(&c, [c.empty()]).unwrap();
        assert!(grill(&empty_set).is_empty());

        let split = SetFamily::new(&c, [c.subset(["a"]).unwrap(), c.subset(["b"]).unwrap()])
            .unwrap();
        assert_eq!(grill(&split).members(), vec![c.subset(["a", "b"]).unwrap()]);
    }

    #[test]
    fn grill_duality_small() {
        // H is a member of core^ iff H meshes every member of the grill of {core}.
        for n in 1..=3usize {
            let c = Carrier::new((0..n).map(|i| format!("x{i}"))).unwrap();
            for core in 1..=c.full_mask() {
                let fam = SetFamily::new(&c, [c.subset_from_mask(core)]).unwrap();
                let g = grill(&fam);
                for h in 0..=c.full_mask() {
                    let in_filter = core & !h == 0;
                    let hf = SetFamily::new(&c, [c.subset_from_mask(h)]).unwrap();
                    let meshes_grill = mesh(&hf, &g).unwrap();
                    assert_eq!(in_filter, meshes_grill, "core={core:b} h={h:b}");
                }
            }
        }
    }

    #[test]
    fn ultra_examples() {
        let c = abc();
        let fab = Filter::principal(&c.subset(["a", "b"]).unwrap());
        let us = fab.ultra();
        assert_eq!(us.len(), 2);
        assert!(us.iter().all(Filter::is_point));
        assert_eq!(Filter::point(&c, "a").unwrap().ultra().len(), 1);
        assert!(Filter::degenerate(&c).ultra().is_empty());
    }

    #[test]
    fn relation_images() {
        let x = ab();
        let y = Carrier::new(["1", "2"]).unwrap();
        let r = Relation::new(&x, &y, [("a", "1"), ("b", "1"), ("b", "2")]).unwrap();

        let fab = Filter::principal(&x.subset(["a", "b"]).unwrap());
        assert_eq!(
            r.rel_image(&fab).unwrap(),
            Filter::principal(&y.subset(["1", "2"]).unwrap())
        );
        assert!(r.rel_image(&Filter::degenerate(&x)).unwrap().is_degenerate());
        let empty = Relation::empty(&x, &y);
        assert!(empty
            .rel_image(&Filter::point(&x, "a").unwrap())
            .unwrap()
            .is_degenerate());

        assert_eq!(
            r.rel_preimage(&Filter::point(&y, "2").unwrap()).unwrap(),
            Filter::point(&x, "b").unwrap()
        );
        assert_eq!(
            r.rel_preimage(&Filter::point(&y, "1").unwrap()).unwrap(),
            fab
        );
        assert!(r
            .rel_preimage(&Filter::degenerate(&y))
            .unwrap()
            .is_degenerate());
    }

    #[test]
    fn product_filters() {
        let x = ab();
        let y = Carrier::new(["1", "2"]).unwrap();
        let pc = ProductCarrier::new(&x, &y).unwrap();

        let fa = Filter::point(&x, "a").unwrap();
        let g12 = Filter::principal(&y.subset(["1", "2"]).unwrap());
        let p = pc.prod_filter(&fa, &g12).unwrap();
        assert_eq!(p.core().labels(), vec!["(a,1)", "(a,2)"]);

        assert!(pc
            .prod_filter(&fa, &Filter::degenerate(&y))
            .unwrap()
            .is_degenerate());

        let fab = Filter::principal(&x.subset(["a", "b"]).unwrap());
        let g1 = Filter::point(&y, "1").unwrap();
        let p2 = pc.prod_filter(&fab, &g1).unwrap();
        assert_eq!(p2.core().labels(), vec!["(a,1)", "(b,1)"]);
    }

    #[test]
    fn jrel_examples() {
        let x = ab();
        let pc = ProductCarrier::new(&x, &x).unwrap();
        let diag = pc
            .prod
            .subset(["(a,a)", "(b,b)"])
            .map(|s| Filter::principal(&s))
            .unwrap();
        let fa = Filter::point(&x, "a").unwrap();
        assert_eq!(pc.jrel_image(&diag, &fa).unwrap(), fa);

        let y = Carrier::new(["1", "2"]).unwrap();
        let pxy = ProductCarrier::new(&x, &y).unwrap();
        let j1 = Filter::principal(&pxy.carrier().subset(["(a,1)"]).unwrap());
        let fb = Filter::point(&x, "b").unwrap();
        assert!(pxy.jrel_image(&j1, &fb).unwrap().is_degenerate());

        let j2 = Filter::principal(&pxy.carrier().subset(["(a,1)", "(a,2)"]).unwrap());
        assert_eq!(
            pxy.jrel_image(&j2, &fa).unwrap(),
            Filter::principal(&y.subset(["1", "2"]).unwrap())
        );
    }

    #[test]
    fn filter_enumeration_counts() {
        let c = abc();
        assert_eq!(enumerate_filters(&c, false).len(), 7);
        let one = Carrier::new(["a"]).unwrap();
        assert_eq!(enumerate_filters(&one, false).len(), 1);
        let two = ab();
        let with_deg = enumerate_filters(&two, true);
        assert_eq!(with_deg.len(), 4);
        assert!(with_deg[0].is_degenerate());
    }

    #[test]
    fn class_membership_examples() {
        let c = abc();
        let fab = Filter::principal(&c.subset(["a", "b"]).unwrap());
        assert!(FilterClass::countably_based().contains(&fab));
        assert!(!FilterClass::point_filters().contains(&fab));
        assert!(FilterClass::all().contains(&Filter::degenerate(&c)));
        assert!(FilterClass::point_filters().contains(&Filter::degenerate(&c)));

        let pf = FilterClass::point_filters().members(&ab());
        assert_eq!(pf.len(), 3); // degenerate + two points
    }

    #[test]
    fn custom_class() {
        // cores of at most two points
        let small = FilterClass::custom(
            "small-core",
            |f| f.core().len() <= 2,
            |c| {
                enumerate_filters(c, false)
                    .into_iter()
                    .filter(|f| f.core().len() <= 2)
                    .collect()
            },
        );
        let c = abc();
        assert_eq!(small.name(), "small-core");
        assert!(small.contains(&Filter::point(&c, "a").unwrap()));
        assert!(!small.contains(&Filter::trivial(&c)));
        // the degenerate filter belongs to every class by convention,
        // even when the custom enumerator omits it
        assert!(small.contains(&Filter::degenerate(&c)));
        let members = small.members(&c);
        assert!(members[0].is_degenerate());
        assert_eq!(members.len(), 1 + 3 + 3);
    }

    #[test]
    fn composability_examples() {
        let x = ab();
        let y = Carrier::new(["1", "2"]).unwrap();

        let r = check_composable(&FilterClass::principal(), &FilterClass::principal(), &x, &y)
            .unwrap();
        assert!(r.holds);

        let r = check_composable(&FilterClass::all(), &FilterClass::all(), &x, &y).unwrap();
        assert!(r.holds);

        let r = check_composable(
            &FilterClass::point_filters(),
            &FilterClass::principal(),
            &x,
            &y,
        )
        .unwrap();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        assert_eq!(w.class_filter, Filter::point(&x, "a").unwrap());
        assert_eq!(w.product_filter.core().labels(), vec!["(a,1)", "(a,2)"]);
        assert_eq!(w.image.core().labels(), vec!["1", "2"]);
    }

    #[test]
    fn mesh_adjunction_relations() {
        // (F x G) # R  <=>  R[F] # G  <=>  F # R^-[G], exhaustively on 2x2.
        let x = ab();
        let y = Carrier::new(["1", "2"]).unwrap();
        let pc = ProductCarrier::new(&x, &y).unwrap();
        for rmask in 0..16u64 {
            let img = vec![rmask & 3, (rmask >> 2) & 3];
            let r = Relation::from_images(&x, &y, img);
            let rel_as_family =
                SetFamily::new(pc.carrier(), [graph_subset(&pc, &r)]).unwrap();
            for fm in 0..=x.full_mask() {
                for gm in 0..=y.full_mask() {
                    let f = Filter::from_mask(&x, fm);
                    let g = Filter::from_mask(&y, gm);
                    let prod = pc.prod_filter(&f, &g).unwrap();
                    let lhs = mesh(&prod, &rel_as_family).unwrap();
                    let mid = mesh(&r.rel_image(&f).unwrap(), &g).unwrap();
                    let rhs = mesh(&f, &r.rel_preimage(&g).unwrap()).unwrap();
                    assert_eq!(lhs, mid, "R={r} F={f} G={g}");
                    assert_eq!(mid, rhs, "R={r} F={f} G={g}");
                }
            }
        }
    }

    #[test]
    fn mesh_adjunction_general() {
        // (F x G) # J  <=>  J[F] # G  <=>  F # J^-[G] with J a filter on the product.
        let x = ab();
        let y = Carrier::new(["1", "2"]).unwrap();
        let pc = ProductCarrier::new(&x, &y).unwrap();
        for jm in 0..=pc.carrier().full_mask() {
            let j = Filter::from_mask(pc.carrier(), jm);
            for fm in 0..=x.full_mask() {
                for gm in 0..=y.full_mask() {
                    let f = Filter::from_mask(&x, fm);
                    let g = Filter::from_mask(&y, gm);
                    let prod = pc.prod_filter(&f, &g).unwrap();
                    let lhs = mesh(&prod, &j).unwrap();
                    let mid = mesh(&pc.jrel_image(&j, &f).unwrap(), &g).unwrap();
                    let rhs = mesh(&f, &pc.jrel_preimage(&j, &g).unwrap()).unwrap();
                    assert_eq!(lhs, mid, "J={j} F={f} G={g}");
                    assert_eq!(mid, rhs, "J={j} F={f} G={g}");
                }
            }
        }
    }

    fn graph_subset(pc: &ProductCarrier, r: &Relation) -> Subset {
        let mut m = 0u64;
        for (x, y) in r.pairs() {
            let xi = pc.left().index_of(&x).unwrap();
            let yi = pc.right().index_of(&y).unwrap();
            m |= 1 << pc.pair_index(xi, yi);
        }
        pc.carrier().subset_from_mask(m)
    }

    #[test]
    fn principal_mesh_matches_family_mesh() {
        let c = abc();
        for fm in 0..=c.full_mask() {
            for gm in 0..=c.full_mask() {
                let f = Filter::from_mask(&c, fm);
                let g = Filter::from_mask(&c, gm);
                // family-level: every superset of fm meets every superset of gm
                let mut family_level = true;
                'outer: for s in 0..=c.full_mask() {
                    if fm & !s != 0 {
                        continue;
                    }
                    for t in 0..=c.full_mask() {
                        if gm & !t != 0 {
                            continue;
                        }
                        if s & t == 0 {
                            family_level = false;
                            break 'outer;
                        }
                    }
                }
                // the empty set is a member exactly when the core is empty,
                // and it kills every intersection including with itself
                assert_eq!(mesh(&f, &g).unwrap(), family_level && fm != 0 && gm != 0);
            }
        }
    }
}
