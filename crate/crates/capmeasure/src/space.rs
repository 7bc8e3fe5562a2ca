//! Convergence-approach structures on finite carriers.
//!
//! A structure assigns to every filter a cost vector in `[0, inf]^X`; the
//! value 0 at a point means the filter fully converges there, `inf` means
//! not at all. The axioms are: point filters converge at their point (CAL1),
//! finer filters have pointwise smaller cost (CAL2), and the cost of a meet
//! of two filters is the pointwise join of the costs (CAL3).
//!
//! On a finite carrier CAL3 forces the cost of any principal filter to be
//! the join over its core of the point-filter costs, so an `n x n` matrix
//! `L[z][x] = lambda({z}^)(x)` is a complete encoding. [`CapStructure`] is
//! that canonical form. [`RawLambdaTable`] stores an explicit value for
//! every proper filter; it exists to validate user tables against the
//! axioms and to hold reflector and final-structure outputs, which need not
//! be canonical. The cost of the degenerate filter is 0 everywhere by
//! convention (the empty-family instance of the pre-approach axiom), while
//! its adherence is `inf` everywhere (an empty meet); both conventions are
//! used side by side below.

use std::fmt;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::filter::{Carrier, Filter, FilterClass, Map, ProductCarrier, Subset};

/// Anything that assigns an exact cost vector to every filter on a carrier.
///
/// `lambda_mask(core, x)` is the cost at point index `x` of the principal
/// filter with the given core mask; core 0 (the degenerate filter) must
/// return 0 by convention.
pub trait LambdaSource {
    fn carrier(&self) -> &Carrier;
    fn lambda_mask(&self, core: u64, x: usize) -> ExtReal;

    fn lambda(&self, f: &Filter, point: &str) -> Result<ExtReal> {
        self.carrier().check_same(f.carrier())?;
        let x = self.carrier().require(point)?;
        Ok(self.lambda_mask(f.core_mask(), x))
    }

    fn lambda_vec(&self, f: &Filter) -> Result<Vec<ExtReal>> {
        self.carrier().check_same(f.carrier())?;
        let core = f.core_mask();
        Ok((0..self.carrier().len())
            .map(|x| self.lambda_mask(core, x))
            .collect())
    }
}

/// The canonical matrix form of a convergence-approach structure:
/// `matrix[z][x] = lambda({z}^)(x)`, extended to all filters by joins.
#[derive(Clone, PartialEq, Eq)]
pub struct CapStructure {
    carrier: Carrier,
    matrix: Vec<ExtReal>, // row-major, matrix[z * n + x]
}

impl CapStructure {
    /// Builds a structure from its point-filter matrix. The diagonal must be
    /// zero (CAL1); the canonical extension then satisfies CAL2 and CAL3.
    pub fn from_matrix(carrier: &Carrier, rows: &[Vec<ExtReal>]) -> Result<CapStructure> {
        let n = carrier.len();
        if rows.len() != n {
            return Err(Error::MatrixShape(format!(
                "expected {n} rows, got {}",
                rows.len()
            )));
        }
        let mut matrix = Vec::with_capacity(n * n);
        for (z, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::MatrixShape(format!(
                    "row {z} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if !row[z].is_zero() {
                return Err(Error::Cal1Violation {
                    point: carrier.label(z).to_string(),
                    value: row[z].to_string(),
                });
            }
            matrix.extend_from_slice(row);
        }
        Ok(CapStructure {
            carrier: carrier.clone(),
            matrix,
        })
    }

    pub(crate) fn from_flat(carrier: &Carrier, matrix: Vec<ExtReal>) -> CapStructure {
        debug_assert_eq!(matrix.len(), carrier.len() * carrier.len());
        CapStructure {
            carrier: carrier.clone(),
            matrix,
        }
    }

    /// The structure with cost identically 0: every filter converges everywhere.
    pub fn indiscrete(carrier: &Carrier) -> CapStructure {
        let n = carrier.len();
        CapStructure::from_flat(carrier, vec![ExtReal::ZERO; n * n])
    }

    /// The 0/inf structure of the discrete topology.
    pub fn discrete(carrier: &Carrier) -> CapStructure {
        let n = carrier.len();
        let mut matrix = vec![ExtReal::INFINITY; n * n];
        for z in 0..n {
            matrix[z * n + z] = ExtReal::ZERO;
        }
        CapStructure::from_flat(carrier, matrix)
    }

    pub fn one_point(label: &str) -> CapStructure {
        let c = Carrier::new([label]).expect("one label");
        CapStructure::from_flat(&c, vec![ExtReal::ZERO])
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn entry(&self, z: usize, x: usize) -> ExtReal {
        self.matrix[z * self.carrier.len() + x]
    }

    pub fn entry_by_label(&self, from: &str, at: &str) -> Result<ExtReal> {
        Ok(self.entry(self.carrier.require(from)?, self.carrier.require(at)?))
    }

    pub fn rows(&self) -> Vec<Vec<ExtReal>> {
        let n = self.carrier.len();
        (0..n)
            .map(|z| self.matrix[z * n..(z + 1) * n].to_vec())
            .collect()
    }

    /// Materializes the canonical extension as an explicit table.
    pub fn to_table(&self) -> RawLambdaTable {
        RawLambdaTable::from_fn(&self.carrier, |core, x| self.lambda_mask(core, x))
    }

    /// Renders in the plain-text space file format.
    pub fn render_space_file(&self) -> String {
        let mut out = format!("carrier {}\nmatrix\n", self.carrier);
        for row in self.rows() {
            let toks: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&toks.join(" "));
            out.push('\n');
        }
        out
    }
}

impl LambdaSource for CapStructure {
    fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    fn lambda_mask(&self, core: u64, x: usize) -> ExtReal {
        let n = self.carrier.len();
        let mut acc = ExtReal::ZERO; // empty join: degenerate filter costs 0
        let mut m = core;
        while m != 0 {
            let z = m.trailing_zeros() as usize;
            acc = acc.max(self.matrix[z * n + x]);
            m &= m - 1;
        }
        acc
    }
}

impl fmt::Debug for CapStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CapStructure[{}; ", self.carrier)?;
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| {
                let toks: Vec<String> = r.iter().map(|v| v.to_string()).collect();
                format!("[{}]", toks.join(" "))
            })
            .collect();
        write!(f, "{}]", rows.join(" "))
    }
}

/// An explicit cost table over every proper filter on a carrier.
///
/// No axioms are assumed; tables exist to be validated, and to hold
/// outputs (coreflections, final structures) that may not be canonical.
#[derive(Clone, PartialEq, Eq)]
pub struct RawLambdaTable {
    carrier: Carrier,
    rows: Vec<ExtReal>, // rows[(core - 1) * n + x]
}

impl RawLambdaTable {
    pub fn from_fn(carrier: &Carrier, mut f: impl FnMut(u64, usize) -> ExtReal) -> RawLambdaTable {
        let n = carrier.len();
        let count = carrier.full_mask() as usize;
        let mut rows = Vec::with_capacity(count * n);
        for core in 1..=carrier.full_mask() {
            for x in 0..n {
                rows.push(f(core, x));
            }
        }
        RawLambdaTable {
            carrier: carrier.clone(),
            rows,
        }
    }

    /// Builds a table from explicit per-filter entries; every proper filter
    /// must be covered exactly once.
    pub fn from_entries(carrier: &Carrier, entries: &[(Subset, Vec<ExtReal>)]) -> Result<RawLambdaTable> {
        let n = carrier.len();
        let count = carrier.full_mask() as usize;
        let mut rows = vec![None; count * n];
        for (core, values) in entries {
            carrier.check_same(core.carrier())?;
            if core.is_empty() {
                return Err(Error::DegenerateFilter(
                    "tables cover proper filters only; the degenerate filter costs 0 by convention",
                ));
            }
            if values.len() != n {
                return Err(Error::MatrixShape(format!(
                    "entry for {core} has {} values, expected {n}",
                    values.len()
                )));
            }
            let base = (core.mask() as usize - 1) * n;
            for (x, v) in values.iter().enumerate() {
                rows[base + x] = Some(*v);
            }
        }
        let mut out = Vec::with_capacity(count * n);
        for (i, slot) in rows.into_iter().enumerate() {
            match slot {
                Some(v) => out.push(v),
                None => {
                    let core = (i / n) as u64 + 1;
                    return Err(Error::IncompleteTable(
                        Filter::principal(&carrier.subset_from_mask(core)).to_string(),
                    ));
                }
            }
        }
        Ok(RawLambdaTable {
            carrier: carrier.clone(),
            rows: out,
        })
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn get(&self, f: &Filter, point: &str) -> Result<ExtReal> {
        self.lambda(f, point)
    }

    #[cfg(test)]
    pub(crate) fn set_mask(&mut self, core: u64, x: usize, v: ExtReal) {
        debug_assert!(core >= 1);
        let n = self.carrier.len();
        self.rows[(core as usize - 1) * n + x] = v;
    }

    /// The structure read off the point-filter rows. This matches the whole
    /// table iff the table is canonical (which CAL1-CAL3 force).
    pub fn point_structure(&self) -> Result<CapStructure> {
        let n = self.carrier.len();
        let rows: Vec<Vec<ExtReal>> = (0..n)
            .map(|z| {
                (0..n)
                    .map(|x| self.lambda_mask(1 << z, x))
                    .collect()
            })
            .collect();
        CapStructure::from_matrix(&self.carrier, &rows)
    }

    /// Checks the table against CAL1 (zero at the diagonal of point
    /// filters), CAL2 (finer filters have pointwise smaller cost) and CAL3
    /// (cost of a meet is the pointwise join of costs), reporting the first
    /// witness per failing axiom.
    pub fn validate_axioms(&self) -> AxiomReport {
        let n = self.carrier.len();
        let full = self.carrier.full_mask();

        let mut cal1 = None;
        for x in 0..n {
            let v = self.lambda_mask(1 << x, x);
            if !v.is_zero() {
                cal1 = Some(Cal1Witness {
                    point: self.carrier.label(x).to_string(),
                    value: v,
                });
                break;
            }
        }

        // CAL2: coarser (larger core) must be pointwise >= finer (smaller core).
        let mut cal2 = None;
        'cal2: for coarse in 1..=full {
            for fine in 1..=full {
                if fine & !coarse != 0 {
                    continue; // not a refinement
                }
                for x in 0..n {
                    let vc = self.lambda_mask(coarse, x);
                    let vf = self.lambda_mask(fine, x);
                    if vc < vf {
                        cal2 = Some(Cal2Witness {
                            coarser: Filter::from_mask(&self.carrier, coarse),
                            finer: Filter::from_mask(&self.carrier, fine),
                            point: self.carrier.label(x).to_string(),
                            coarser_value: vc,
                            finer_value: vf,
                        });
                        break 'cal2;
                    }
                }
            }
        }

        let mut cal3 = None;
        'cal3: for fm in 1..=full {
            for gm in 1..=full {
                let meet = fm | gm;
                for x in 0..n {
                    let lhs = self.lambda_mask(meet, x);
                    let rhs = self.lambda_mask(fm, x).max(self.lambda_mask(gm, x));
                    if lhs != rhs {
                        cal3 = Some(Cal3Witness {
                            f: Filter::from_mask(&self.carrier, fm),
                            g: Filter::from_mask(&self.carrier, gm),
                            point: self.carrier.label(x).to_string(),
                            meet_value: lhs,
                            join_value: rhs,
                        });
                        break 'cal3;
                    }
                }
            }
        }

        AxiomReport { cal1, cal2, cal3 }
    }
}

impl LambdaSource for RawLambdaTable {
    fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    fn lambda_mask(&self, core: u64, x: usize) -> ExtReal {
        if core == 0 {
            return ExtReal::ZERO; // degenerate filter costs 0 by convention
        }
        self.rows[(core as usize - 1) * self.carrier.len() + x]
    }
}

impl fmt::Debug for RawLambdaTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RawLambdaTable[{}]", self.carrier)
    }
}

#[derive(Clone, Debug)]
pub struct Cal1Witness {
    pub point: String,
    pub value: ExtReal,
}

#[derive(Clone, Debug)]
pub struct Cal2Witness {
    pub coarser: Filter,
    pub finer: Filter,
    pub point: String,
    pub coarser_value: ExtReal,
    pub finer_value: ExtReal,
}

#[derive(Clone, Debug)]
pub struct Cal3Witness {
    pub f: Filter,
    pub g: Filter,
    pub point: String,
    pub meet_value: ExtReal,
    pub join_value: ExtReal,
}

/// Axiom check outcome; `None` per axiom means it holds.
#[derive(Clone, Debug, Default)]
pub struct AxiomReport {
    pub cal1: Option<Cal1Witness>,
    pub cal2: Option<Cal2Witness>,
    pub cal3: Option<Cal3Witness>,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.cal1.is_none() && self.cal2.is_none() && self.cal3.is_none()
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.cal1 {
            None => writeln!(f, "CAL1 ok")?,
            Some(w) => writeln!(
                f,
                "CAL1 violated: lambda({{{p}}}^)({p}) = {v}",
                p = w.point,
                v = w.value
            )?,
        }
        match &self.cal2 {
            None => writeln!(f, "CAL2 ok")?,
            Some(w) => writeln!(
                f,
                "CAL2 violated: {finer} refines {coarser} but lambda({coarser})({p}) = {cv} < {fv} = lambda({finer})({p})",
                finer = w.finer,
                coarser = w.coarser,
                p = w.point,
                cv = w.coarser_value,
                fv = w.finer_value
            )?,
        }
        match &self.cal3 {
            None => writeln!(f, "CAL3 ok")?,
            Some(w) => writeln!(
                f,
                "CAL3 violated at ({f}, {g}, {p}): lambda(meet) = {m} but join of costs = {j}",
                f = w.f,
                g = w.g,
                p = w.point,
                m = w.meet_value,
                j = w.join_value
            )?,
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct PsapWitness {
    pub filter: Filter,
    pub point: String,
    pub lhs: ExtReal,
    pub rhs: ExtReal,
}

#[derive(Clone, Debug)]
pub struct PrapWitness {
    pub family: Vec<Filter>,
    pub point: String,
    pub meet_value: ExtReal,
    pub join_value: ExtReal,
}

#[derive(Clone, Debug)]
pub struct ApWitness {
    pub filter: Filter,
    pub selection: Vec<Filter>,
    pub contour: Filter,
    pub point: String,
    pub lhs: ExtReal,
    pub rhs: ExtReal,
}

/// Subcategory membership flags with first witnesses on failure.
#[derive(Clone, Debug)]
pub struct SubcategoryReport {
    pub psap: Option<PsapWitness>,
    pub prap: Option<PrapWitness>,
    pub ap: Option<ApWitness>,
}

impl SubcategoryReport {
    pub fn is_psap(&self) -> bool {
        self.psap.is_none()
    }
    pub fn is_prap(&self) -> bool {
        self.prap.is_none()
    }
    pub fn is_ap(&self) -> bool {
        self.ap.is_none()
    }
}

impl fmt::Display for SubcategoryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PSAP {}", if self.is_psap() { "yes" } else { "no" })?;
        writeln!(f, "PRAP {}", if self.is_prap() { "yes" } else { "no" })?;
        writeln!(f, "AP {}", if self.is_ap() { "yes" } else { "no" })
    }
}

/// How many pre-approach families / approach selections a subcategory check
/// may enumerate before refusing.
const SUBCATEGORY_BUDGET: u128 = 50_000_000;

/// Exhaustively decides pseudo-approach, pre-approach and approach
/// membership for a valid CAL1-CAL3 source.
///
/// The pre-approach axiom is checked over every family of proper filters
/// when there are few enough, and by its pairwise reduction (exact on
/// finite carriers, by induction from the two-filter case plus the
/// degenerate convention) otherwise. The approach axiom enumerates every
/// selection of proper filters, refusing beyond an internal budget.
pub fn check_subcategory<L: LambdaSource>(src: &L) -> Result<SubcategoryReport> {
    let carrier = src.carrier().clone();
    let n = carrier.len();
    let full = carrier.full_mask();
    let proper = full as u128;

    // PSAP: lambda(F) equals the join of lambda over ultrafilters finer than F.
    let mut psap = None;
    'psap: for fm in 1..=full {
        for x in 0..n {
            let lhs = src.lambda_mask(fm, x);
            let rhs = ExtReal::join_all(
                (0..n)
                    .filter(|z| fm & (1 << z) != 0)
                    .map(|z| src.lambda_mask(1 << z, x)),
            );
            if lhs != rhs {
                psap = Some(PsapWitness {
                    filter: Filter::from_mask(&carrier, fm),
                    point: carrier.label(x).to_string(),
                    lhs,
                    rhs,
                });
                break 'psap;
            }
        }
    }

    // PRAP: lambda of the meet of any family of proper filters equals the
    // join of the lambdas. The empty family is the degenerate convention.
    let mut prap = None;
    if proper <= 22 {
        let fam_count: u128 = 1u128 << proper;
        'prap: for fam in 0..fam_count {
            let mut meet_core = 0u64;
            let mut members = Vec::new();
            for i in 0..proper as u32 {
                if fam & (1 << i) != 0 {
                    let core = i as u64 + 1;
                    meet_core |= core;
                    members.push(core);
                }
            }
            for x in 0..n {
                let lhs = if members.is_empty() {
                    src.lambda_mask(0, x) // degenerate by convention
                } else {
                    src.lambda_mask(meet_core, x)
                };
                let rhs =
                    ExtReal::join_all(members.iter().map(|&core| src.lambda_mask(core, x)));
                if lhs != rhs {
                    prap = Some(PrapWitness {
                        family: members
                            .iter()
                            .map(|&core| Filter::from_mask(&carrier, core))
                            .collect(),
                        point: carrier.label(x).to_string(),
                        meet_value: lhs,
                        join_value: rhs,
                    });
                    break 'prap;
                }
            }
        }
    } else {
        'pairs: for fm in 1..=full {
            for gm in 1..=full {
                for x in 0..n {
                    let lhs = src.lambda_mask(fm | gm, x);
                    let rhs = src.lambda_mask(fm, x).max(src.lambda_mask(gm, x));
                    if lhs != rhs {
                        prap = Some(PrapWitness {
                            family: vec![
                                Filter::from_mask(&carrier, fm),
                                Filter::from_mask(&carrier, gm),
                            ],
                            point: carrier.label(x).to_string(),
                            meet_value: lhs,
                            join_value: rhs,
                        });
                        break 'pairs;
                    }
                }
            }
        }
        // degenerate convention: empty family forces lambda(degenerate) = 0
        if prap.is_none() {
            for x in 0..n {
                let v = src.lambda_mask(0, x);
                if !v.is_zero() {
                    prap = Some(PrapWitness {
                        family: vec![],
                        point: carrier.label(x).to_string(),
                        meet_value: v,
                        join_value: ExtReal::ZERO,
                    });
                    break;
                }
            }
        }
    }

    // AP: lambda(contour(F, G)) <= lambda(F) + sup_x lambda(G(x))(x) for
    // every proper F and every selection G of proper filters.
    let selections = proper.checked_pow(n as u32).unwrap_or(u128::MAX);
    let estimate = selections.saturating_mul(proper).saturating_mul(n as u128);
    if estimate > SUBCATEGORY_BUDGET {
        return Err(Error::BudgetExceeded {
            estimate: estimate.to_string(),
            budget: SUBCATEGORY_BUDGET as u64,
            env: "the approach-axiom scan has a fixed internal ceiling",
        });
    }
    let mut ap = None;
    let mut sel_cores = vec![1u64; n]; // selection as core per point
    'ap: loop {
        let sel_cost = ExtReal::join_all(
            sel_cores
                .iter()
                .enumerate()
                .map(|(x, &core)| src.lambda_mask(core, x)),
        );
        for fm in 1..=full {
            // contour core: union over core points of the selected cores
            let mut contour_core = 0u64;
            for (x, &core) in sel_cores.iter().enumerate() {
                if fm & (1 << x) != 0 {
                    contour_core |= core;
                }
            }
            for y in 0..n {
                let lhs = src.lambda_mask(contour_core, y);
                let rhs = src.lambda_mask(fm, y) + sel_cost;
                if lhs > rhs {
                    ap = Some(ApWitness {
                        filter: Filter::from_mask(&carrier, fm),
                        selection: sel_cores
                            .iter()
                            .map(|&c| Filter::from_mask(&carrier, c))
                            .collect(),
                        contour: Filter::from_mask(&carrier, contour_core),
                        point: carrier.label(y).to_string(),
                        lhs,
                        rhs,
                    });
                    break 'ap;
                }
            }
        }
        // next selection in mixed-radix order
        let mut i = 0;
        loop {
            if i == n {
                break 'ap;
            }
            if sel_cores[i] < full {
                sel_cores[i] += 1;
                break;
            }
            sel_cores[i] = 1;
            i += 1;
        }
    }

    Ok(SubcategoryReport { psap, prap, ap })
}

/// The contour of a selection along a filter.
///
/// For principal filters on a finite carrier this is the filter whose core
/// is the union, over the core of `f`, of the selected cores; the family at
/// the smallest member of `f` dominates.
pub fn contour(f: &Filter, selection: &[Filter]) -> Result<Filter> {
    let carrier = f.carrier();
    if selection.len() != carrier.len() {
        return Err(Error::BadSelection);
    }
    for g in selection {
        carrier.check_same(g.carrier())?;
    }
    let mut core = 0u64;
    for x in f.core().indices() {
        core |= selection[x].core_mask();
    }
    Ok(Filter::from_mask(carrier, core))
}

/// The adherence vector of a filter: the pointwise meet of the costs of the
/// ultrafilters finer than it. `inf` everywhere for the degenerate filter.
pub fn adherence<L: LambdaSource>(src: &L, h: &Filter) -> Result<Vec<ExtReal>> {
    src.carrier().check_same(h.carrier())?;
    let n = src.carrier().len();
    let hm = h.core_mask();
    Ok((0..n)
        .map(|x| {
            ExtReal::meet_all(
                (0..n)
                    .filter(|z| hm & (1 << z) != 0)
                    .map(|z| src.lambda_mask(1 << z, x)),
            )
        })
        .collect())
}

/// The mesh form of adherence: the pointwise meet of the costs of every
/// proper filter meshing `h`. An independent route to [`adherence`]; the
/// two agree on every convergence-approach structure.
pub fn adherence_mesh_oracle<L: LambdaSource>(src: &L, h: &Filter) -> Result<Vec<ExtReal>> {
    src.carrier().check_same(h.carrier())?;
    let n = src.carrier().len();
    let full = src.carrier().full_mask();
    let hm = h.core_mask();
    Ok((0..n)
        .map(|x| {
            ExtReal::meet_all(
                (1..=full)
                    .filter(|g| hm != 0 && g & hm != 0)
                    .map(|g| src.lambda_mask(g, x)),
            )
        })
        .collect())
}

/// The adherence-based modification of a structure through a filter class:
/// the cost of `F` at `x` becomes the join, over class members meshing `F`,
/// of their adherence at `x`. Returned raw: the result need not be
/// canonical when the class omits some principal filters.
pub fn adh_reflect<L: LambdaSource>(src: &L, class: &FilterClass) -> RawLambdaTable {
    let carrier = src.carrier().clone();
    let n = carrier.len();
    // adherence rows for every class member, via the point-filter matrix
    let point: Vec<ExtReal> = (0..n)
        .flat_map(|z| (0..n).map(move |x| src.lambda_mask(1 << z, x)))
        .collect();
    let adh_at = |core: u64, x: usize| -> ExtReal {
        ExtReal::meet_all(
            (0..n)
                .filter(|z| core & (1 << z) != 0)
                .map(|z| point[z * n + x]),
        )
    };
    let members = class.member_cores(&carrier);
    RawLambdaTable::from_fn(&carrier, |fm, x| {
        ExtReal::join_all(
            members
                .iter()
                .filter(|&&dm| dm != 0 && dm & fm != 0)
                .map(|&dm| adh_at(dm, x)),
        )
    })
}

/// The base-restriction modification of a structure through a filter class:
/// the cost of `F` becomes the meet of the costs of class members coarser
/// than `F` (empty meet: `inf`).
pub fn base_coreflect<L: LambdaSource>(src: &L, class: &FilterClass) -> RawLambdaTable {
    let carrier = src.carrier().clone();
    let members = class.member_cores(&carrier);
    RawLambdaTable::from_fn(&carrier, |fm, x| {
        ExtReal::meet_all(
            members
                .iter()
                .filter(|&&gm| gm != 0 && fm & !gm == 0) // gm coarser: core gm contains core fm
                .map(|&gm| src.lambda_mask(gm, x)),
        )
    })
}

/// A convergence relation: the limit set of every proper filter.
#[derive(Clone, PartialEq, Eq)]
pub struct ConvergenceRelation {
    carrier: Carrier,
    limits: Vec<u64>, // limits[core - 1]
}

impl ConvergenceRelation {
    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn limits_of(&self, f: &Filter) -> Result<Subset> {
        self.carrier.check_same(f.carrier())?;
        if f.is_degenerate() {
            // degenerate filter converges everywhere (cost 0 by convention)
            return Ok(self.carrier.full());
        }
        Ok(self
            .carrier
            .subset_from_mask(self.limits[f.core_mask() as usize - 1]))
    }
}

impl fmt::Debug for ConvergenceRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConvergenceRelation[{}]", self.carrier)
    }
}

/// The convergence-space coreflection (limit iff cost 0) and reflection
/// (limit iff cost finite) of a structure.
pub fn conv_parts(s: &CapStructure) -> (ConvergenceRelation, ConvergenceRelation) {
    let carrier = s.carrier().clone();
    let n = carrier.len();
    let full = carrier.full_mask();
    let mut zero = Vec::with_capacity(full as usize);
    let mut finite = Vec::with_capacity(full as usize);
    for core in 1..=full {
        let mut zm = 0u64;
        let mut fm = 0u64;
        for x in 0..n {
            let v = s.lambda_mask(core, x);
            if v.is_zero() {
                zm |= 1 << x;
            }
            if v.is_finite() {
                fm |= 1 << x;
            }
        }
        zero.push(zm);
        finite.push(fm);
    }
    (
        ConvergenceRelation {
            carrier: carrier.clone(),
            limits: zero,
        },
        ConvergenceRelation {
            carrier,
            limits: finite,
        },
    )
}

/// The product structure: the cost of a filter on the product is the join
/// of the costs of its two projections, which in matrix form is the
/// componentwise join of the factor matrices.
pub fn product_space(x: &CapStructure, y: &CapStructure) -> Result<(ProductCarrier, CapStructure)> {
    let pc = ProductCarrier::new(x.carrier(), y.carrier())?;
    let np = pc.carrier().len();
    let mut matrix = vec![ExtReal::ZERO; np * np];
    for from in 0..np {
        let (u, v) = pc.unpair(from);
        for to in 0..np {
            let (a, b) = pc.unpair(to);
            matrix[from * np + to] = x.entry(u, a).max(y.entry(v, b));
        }
    }
    let s = CapStructure::from_flat(pc.carrier(), matrix);
    Ok((pc, s))
}

/// The coarsest structure on the domain making `f` a contraction:
/// `lambda(F)(x) = lambda_Y(f[F])(f(x))`.
pub fn initial_structure(f: &Map, y: &CapStructure) -> Result<CapStructure> {
    y.carrier().check_same(f.codomain())?;
    let n = f.domain().len();
    let mut matrix = vec![ExtReal::ZERO; n * n];
    for z in 0..n {
        for x in 0..n {
            matrix[z * n + x] = y.entry(f.apply_index(z), f.apply_index(x));
        }
    }
    Ok(CapStructure::from_flat(f.domain(), matrix))
}

/// The finest structure on the codomain making `f` a contraction, as an
/// explicit table: a point filter costs 0 at its own point; otherwise the
/// cost at `y` is the meet, over the fiber of `y` and over the proper
/// filters pushing into `G`, of the domain costs. Empty fibers make the
/// outer meet empty, hence `inf`.
pub fn final_structure(f: &Map, x: &CapStructure) -> Result<RawLambdaTable> {
    x.carrier().check_same(f.domain())?;
    let nx = f.domain().len();
    let full_x = f.domain().full_mask();
    // image core of every proper filter on the domain
    let image: Vec<u64> = (1..=full_x).map(|fm| f.image_point_mask(fm)).collect();
    Ok(RawLambdaTable::from_fn(f.codomain(), |gm, y| {
        if gm == 1 << y {
            return ExtReal::ZERO;
        }
        let fiber = f.fiber_mask(y);
        ExtReal::meet_all((0..nx).filter(|xi| fiber & (1 << xi) != 0).flat_map(|xi| {
            image
                .iter()
                .enumerate()
                .filter(move |(_, &im)| gm & !im == 0) // f[F] <= G: image core contains core of G
                .map(move |(i, _)| x.lambda_mask(i as u64 + 1, xi))
        }))
    }))
}

/// An atomic topological approach space: every point of the base carrier is
/// isolated, and one added point `atom` has the prescribed neighborhood
/// filter `nbhd = d meet {atom}^`.
#[derive(Clone, Debug)]
pub struct AtomicSpace {
    pub space: CapStructure,
    pub atom: String,
    pub nbhd: Filter,
}

/// Builds the atomic space over `x` determined by a proper filter `d`.
///
/// The added point's neighborhood filter is read as `d meet {atom}^`: a
/// filter converges at the atom (cost 0) iff it refines that meet, and
/// costs `inf` there otherwise; isolated points admit only their own point
/// filter.
pub fn atomic_space(x: &Carrier, d: &Filter) -> Result<AtomicSpace> {
    x.check_same(d.carrier())?;
    if d.is_degenerate() {
        return Err(Error::DegenerateFilter(
            "an atomic space needs a proper neighborhood-generating filter",
        ));
    }
    let mut atom = "inf".to_string();
    while x.index_of(&atom).is_some() {
        atom.push('\'');
    }
    let mut labels: Vec<String> = x.labels().to_vec();
    labels.push(atom.clone());
    let carrier = Carrier::new(labels)?;
    let n = carrier.len();
    let nx = x.len();
    let dm = d.core_mask();

    let mut matrix = vec![ExtReal::INFINITY; n * n];
    for z in 0..n {
        matrix[z * n + z] = ExtReal::ZERO;
    }
    // column of the atom: 0 from core points of d (and from the atom itself)
    for z in 0..nx {
        if dm & (1 << z) != 0 {
            matrix[z * n + (n - 1)] = ExtReal::ZERO;
        }
    }
    let space = CapStructure::from_flat(&carrier, matrix);
    let nbhd_core = carrier.subset_from_mask(dm | (1 << (n - 1)));
    Ok(AtomicSpace {
        space,
        atom,
        nbhd: Filter::principal(&nbhd_core),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn ext(s: &str) -> ExtReal {
        s.parse().unwrap()
    }

    pub(crate) fn s2() -> CapStructure {
        let c = Carrier::new(["a", "b"]).unwrap();
        CapStructure::from_matrix(
            &c,
            &[vec![ext("0"), ext("2")], vec![ext("3"), ext("0")]],
        )
        .unwrap()
    }

    fn s3() -> CapStructure {
        let c = Carrier::new(["a", "b", "c"]).unwrap();
        CapStructure::from_matrix(
            &c,
            &[
                vec![ext("0"), ext("1"), ext("inf")],
                vec![ext("inf"), ext("0"), ext("1")],
                vec![ext("1"), ext("inf"), ext("0")],
            ],
        )
        .unwrap()
    }

    #[test]
    fn from_matrix_examples() {
        let one = CapStructure::one_point("x");
        assert_eq!(one.carrier().len(), 1);

        let c = Carrier::new(["a", "b"]).unwrap();
        let ind = CapStructure::indiscrete(&c);
        assert_eq!(ind.entry(0, 1), ExtReal::ZERO);

        assert!(s2().entry_by_label("b", "a").unwrap() == ext("3"));

        let bad = CapStructure::from_matrix(
            &c,
            &[vec![ext("1"), ext("0")], vec![ext("0"), ext("0")]],
        );
        assert!(matches!(bad, Err(Error::Cal1Violation { .. })));
    }

    #[test]
    fn lambda_eval_examples() {
        let s = s2();
        let c = s.carrier().clone();
        let fab = Filter::principal(&c.subset(["a", "b"]).unwrap());
        assert_eq!(s.lambda(&fab, "a").unwrap(), ext("3"));
        let fa = Filter::point(&c, "a").unwrap();
        assert_eq!(s.lambda(&fa, "b").unwrap(), ext("2"));
        assert_eq!(
            s.lambda(&Filter::degenerate(&c), "a").unwrap(),
            ExtReal::ZERO
        );
    }

    #[test]
    fn validate_canonical_table() {
        let t = s2().to_table();
        assert!(t.validate_axioms().ok());

        // edit lambda({a,b}^)(a) to 0: CAL3 (and CAL2) must fail
        let mut t = s2().to_table();
        t.set_mask(0b11, 0, ExtReal::ZERO);
        let report = t.validate_axioms();
        assert!(report.cal1.is_none());
        assert!(report.cal2.is_some());
        let w = report.cal3.expect("cal3 witness");
        let c = s2().carrier().clone();
        assert_eq!(w.point, "a");
        assert_eq!(w.meet_value, ExtReal::ZERO);
        assert_eq!(w.join_value, ext("3"));
        // the first witness pair in enumeration order is ({a}^, {b}^)
        assert_eq!(w.f, Filter::point(&c, "a").unwrap());
        assert_eq!(w.g, Filter::point(&c, "b").unwrap());

        let one = CapStructure::one_point("x").to_table();
        assert!(one.validate_axioms().ok());
    }

    #[test]
    fn table_from_entries_coverage() {
        let c = Carrier::new(["a", "b"]).unwrap();
        let entries = vec![(c.subset(["a"]).unwrap(), vec![ext("0"), ext("2")])];
        assert!(matches!(
            RawLambdaTable::from_entries(&c, &entries),
            Err(Error::IncompleteTable(_))
        ));
    }

    #[test]
    fn subcategory_examples() {
        let r = check_subcategory(&s2()).unwrap();
        assert!(r.is_psap() && r.is_prap() && r.is_ap());

        let r3 = check_subcategory(&s3()).unwrap();
        assert!(r3.is_psap() && r3.is_prap());
        let w = r3.ap.expect("ap witness");
        // re-evaluate the witness: the contour cost must exceed the bound
        let s = s3();
        let contour_cost = s
            .lambda(&w.contour, &w.point)
            .unwrap();
        let bound = s.lambda(&w.filter, &w.point).unwrap()
            + ExtReal::join_all(w.selection.iter().enumerate().map(|(x, g)| {
                s.lambda(g, s.carrier().label(x)).unwrap()
            }));
        assert_eq!(contour_cost, w.lhs);
        assert_eq!(bound, w.rhs);
        assert!(w.lhs > w.rhs);
    }

    #[test]
    fn contour_examples() {
        let c = Carrier::new(["a", "b", "c"]).unwrap();
        let fa = Filter::point(&c, "a").unwrap();
        let fb = Filter::point(&c, "b").unwrap();
        let fc = Filter::point(&c, "c").unwrap();

        // F = {a}^, G(a) = {b}^ -> {b}^
        let sel = vec![fb.clone(), fb.clone(), fb.clone()];
        assert_eq!(contour(&fa, &sel).unwrap(), fb);

        // identity selection reproduces F
        let idsel = vec![fa.clone(), fb.clone(), fc.clone()];
        let fab = Filter::principal(&c.subset(["a", "b"]).unwrap());
        assert_eq!(contour(&fab, &idsel).unwrap(), fab);

        // F = {a,b}^, G(a) = {c}^, G(b) = {a}^ -> {a,c}^
        let sel2 = vec![fc.clone(), fa.clone(), fc.clone()];
        assert_eq!(
            contour(&fab, &sel2).unwrap(),
            Filter::principal(&c.subset(["a", "c"]).unwrap())
        );
    }

    #[test]
    fn adherence_examples() {
        let s = s2();
        let c = s.carrier().clone();
        let fab = Filter::principal(&c.subset(["a", "b"]).unwrap());
        assert_eq!(adherence(&s, &fab).unwrap(), vec![ext("0"), ext("0")]);
        let fa = Filter::point(&c, "a").unwrap();
        assert_eq!(adherence(&s, &fa).unwrap(), vec![ext("0"), ext("2")]);
        assert_eq!(
            adherence(&s, &Filter::degenerate(&c)).unwrap(),
            vec![ExtReal::INFINITY, ExtReal::INFINITY]
        );
    }

    #[test]
    fn adherence_oracle_agrees_on_s2() {
        let s = s2();
        let c = s.carrier().clone();
        for f in crate::filter::enumerate_filters(&c, true) {
            assert_eq!(
                adherence(&s, &f).unwrap(),
                adherence_mesh_oracle(&s, &f).unwrap(),
                "filter {f}"
            );
        }
    }

    #[test]
    fn adh_reflect_examples() {
        let s = s2();
        let c = s.carrier().clone();

        // with the class of all filters, finite structures are fixed
        let t = adh_reflect(&s, &FilterClass::all());
        for core in 1..=c.full_mask() {
            for x in 0..2 {
                assert_eq!(t.lambda_mask(core, x), s.lambda_mask(core, x));
            }
        }

        // point-filter class at F = {a}^: only {a}^ meshes among points
        let t = adh_reflect(&s, &FilterClass::point_filters());
        let fa = Filter::point(&c, "a").unwrap();
        assert_eq!(t.get(&fa, "b").unwrap(), ext("2"));
    }

    #[test]
    fn base_coreflect_examples() {
        let s = s2();
        let c = s.carrier().clone();

        let t = base_coreflect(&s, &FilterClass::all());
        for core in 1..=c.full_mask() {
            for x in 0..2 {
                assert_eq!(t.lambda_mask(core, x), s.lambda_mask(core, x));
            }
        }

        let t = base_coreflect(&s, &FilterClass::point_filters());
        let fab = Filter::principal(&c.subset(["a", "b"]).unwrap());
        assert_eq!(t.get(&fab, "a").unwrap(), ExtReal::INFINITY);
        assert_eq!(t.get(&fab, "b").unwrap(), ExtReal::INFINITY);
        let fa = Filter::point(&c, "a").unwrap();
        assert_eq!(t.get(&fa, "b").unwrap(), s.lambda(&fa, "b").unwrap());
    }

    #[test]
    fn conv_parts_examples() {
        let s = s2();
        let c = s.carrier().clone();
        let (coref, refl) = conv_parts(&s);

        let fa = Filter::point(&c, "a").unwrap();
        let fb = Filter::point(&c, "b").unwrap();
        let fab = Filter::principal(&c.subset(["a", "b"]).unwrap());

        assert_eq!(coref.limits_of(&fa).unwrap().labels(), vec!["a"]);
        assert_eq!(coref.limits_of(&fb).unwrap().labels(), vec!["b"]);
        assert!(coref.limits_of(&fab).unwrap().is_empty());

        // reflection thresholds at infinity: {a}^ converges to both points
        assert_eq!(refl.limits_of(&fa).unwrap().labels(), vec!["a", "b"]);

        let ind = CapStructure::indiscrete(&c);
        let (ci, ri) = conv_parts(&ind);
        for f in crate::filter::enumerate_filters(&c, false) {
            assert_eq!(ci.limits_of(&f).unwrap().len(), 2);
            assert_eq!(ri.limits_of(&f).unwrap().len(), 2);
        }
    }

    #[test]
    fn product_space_examples() {
        let s = s2();
        let one = CapStructure::one_point("p");
        let (_, prod) = product_space(&one, &s).unwrap();
        // one-point factor: a copy of s2 up to labels
        assert_eq!(prod.entry(0, 1), s.entry(0, 1));
        assert_eq!(prod.entry(1, 0), s.entry(1, 0));

        let (pc, p22) = product_space(&s, &s).unwrap();
        let ba = pc.carrier().index_of("(b,a)").unwrap();
        let ab = pc.carrier().index_of("(a,b)").unwrap();
        assert_eq!(p22.entry(ba, ab), ext("3")); // 3 join 2

        let c = s.carrier().clone();
        let ind = CapStructure::indiscrete(&c);
        let (_, pii) = product_space(&ind, &ind).unwrap();
        assert!(pii.rows().iter().flatten().all(ExtReal::is_zero));
    }

    #[test]
    fn initial_structure_examples() {
        let s = s2();
        let c = s.carrier().clone();
        let id = Map::identity(&c);
        assert_eq!(initial_structure(&id, &s).unwrap(), s);

        let one = CapStructure::one_point("p");
        let konst = Map::constant(&c, one.carrier(), "p").unwrap();
        let init = initial_structure(&konst, &one).unwrap();
        assert!(init.rows().iter().flatten().all(ExtReal::is_zero));

        let collapse = Map::new(&c, &c, [("a", "a"), ("b", "a")]).unwrap();
        let init = initial_structure(&collapse, &s).unwrap();
        assert!(init.rows().iter().flatten().all(ExtReal::is_zero));
    }

    #[test]
    fn final_structure_examples() {
        let s = s2();
        let c = s.carrier().clone();
        let one = Carrier::new(["p"]).unwrap();
        let collapse = Map::constant(&c, &one, "p").unwrap();
        let t = final_structure(&collapse, &s).unwrap();
        let fp = Filter::point(&one, "p").unwrap();
        assert_eq!(t.get(&fp, "p").unwrap(), ExtReal::ZERO);

        // injective non-surjective: outside the range, non-point filters cost inf
        let y = Carrier::new(["p", "q", "r"]).unwrap();
        let inj = Map::new(&c, &y, [("a", "p"), ("b", "q")]).unwrap();
        let t = final_structure(&inj, &s).unwrap();
        let fpq = Filter::principal(&y.subset(["p", "q"]).unwrap());
        assert_eq!(t.get(&fpq, "r").unwrap(), ExtReal::INFINITY);
        // and the point filter at the missed point still costs 0 there
        let fr = Filter::point(&y, "r").unwrap();
        assert_eq!(t.get(&fr, "r").unwrap(), ExtReal::ZERO);

        // a bijection transports the structure
        let swap = Map::new(&c, &c, [("a", "b"), ("b", "a")]).unwrap();
        let t = final_structure(&swap, &s).unwrap();
        let fb = Filter::point(&c, "b").unwrap();
        assert_eq!(t.get(&fb, "a").unwrap(), s.entry_by_label("a", "b").unwrap());
    }

    #[test]
    fn final_structure_is_cap_at_small_sizes() {
        // finality preserves the axioms at the sweep sizes used here
        let s = s2();
        let c = s.carrier().clone();
        let y = Carrier::new(["p", "q"]).unwrap();
        for images in [[0usize, 0], [0, 1], [1, 0], [1, 1]] {
            let f = Map::from_images(&c, &y, images.to_vec());
            let t = final_structure(&f, &s).unwrap();
            assert!(t.validate_axioms().ok(), "map {f}");
        }
    }

    #[test]
    fn atomic_space_examples() {
        let c = Carrier::new(["a", "b"]).unwrap();
        let d = Filter::point(&c, "a").unwrap();
        let at = atomic_space(&c, &d).unwrap();
        assert_eq!(at.atom, "inf");
        assert_eq!(at.nbhd.core().labels(), vec!["a", "inf"]);

        // topological approach structure: all three subcategory flags hold
        let r = check_subcategory(&at.space).unwrap();
        assert!(r.is_psap() && r.is_prap() && r.is_ap());

        // adherence of the neighborhood filter at the atom is 0
        let adh = adherence(&at.space, &at.nbhd).unwrap();
        let ai = at.space.carrier().index_of("inf").unwrap();
        assert_eq!(adh[ai], ExtReal::ZERO);

        assert!(atomic_space(&c, &Filter::degenerate(&c)).is_err());
    }

    #[test]
    fn atomic_space_avoids_label_collision() {
        let c = Carrier::new(["inf", "b"]).unwrap();
        let d = Filter::point(&c, "b").unwrap();
        let at = atomic_space(&c, &d).unwrap();
        assert_eq!(at.atom, "inf'");
    }
}
