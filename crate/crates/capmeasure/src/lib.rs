//! Exact computation and exhaustive verification of compactness measures
//! on finite convergence-approach spaces.
//!
//! A convergence-approach structure assigns to every filter on a finite
//! carrier an exact cost vector in `[0, inf]^X` (0 = full convergence,
//! `inf` = none). This crate provides:
//!
//! - [`extreal`]: the exact value lattice `[0, inf]` over rationals;
//! - [`filter`]: carriers, the (principal) filter lattice, relations,
//!   filter classes, and the relational calculus;
//! - [`space`]: structures in canonical matrix form, axiom validation,
//!   adherence, class reflections and coreflections, initial/final/
//!   product/atomic constructions;
//! - [`compactness`]: measures of compactness of filters at sets and at
//!   families of cost vectors, compact sets, and compact relations;
//! - [`maps`]: contraction/closed/perfect/quotient classification;
//! - [`harness`]: the theorem catalog with exhaustive verification,
//!   counterexample searches under weakened hypotheses, and mutation
//!   self-tests;
//! - [`io`] and [`cli`]: file formats and the command-line front door.
//!
//! The `examples/` directory demonstrates each capability end to end.

pub mod cli;
pub mod compactness;
pub mod error;
pub mod extreal;
pub mod filter;
pub mod harness;
pub mod io;
mod kernel;
pub mod maps;
pub mod space;

pub use compactness::{
    measure_at_family, measure_at_set, relation_compact, relation_compact_pointwise, FnFamily,
    MeasureReport, Within,
};
pub use error::{Error, Result};
pub use extreal::ExtReal;
pub use filter::{
    check_composable, enumerate_filters, grill, mesh, Carrier, Filter, FilterClass, Map,
    ProductCarrier, Relation, SetFamily, Subset,
};
pub use maps::{classify, is_closed, is_contraction, is_perfect, is_quotient, MapClassification};
pub use space::{
    adh_reflect, adherence, adherence_mesh_oracle, atomic_space, base_coreflect,
    check_subcategory, contour, conv_parts, final_structure, initial_structure, product_space,
    AtomicSpace, CapStructure, LambdaSource, RawLambdaTable,
};
