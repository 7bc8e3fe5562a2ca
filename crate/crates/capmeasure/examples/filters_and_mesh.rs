//! Filters on finite carriers and the relational calculus.
//!
//! ```bash
//! cargo run -p capmeasure --example filters_and_mesh
//! ```

use capmeasure::{
    check_composable, enumerate_filters, grill, mesh, Carrier, Filter, FilterClass,
    ProductCarrier, Relation, SetFamily,
};

fn main() -> capmeasure::Result<()> {
    let x = Carrier::new(["a", "b", "c"])?;

    // every filter on a finite carrier is principal: stored by its core
    let fa = Filter::point(&x, "a")?;
    let fab = Filter::principal(&x.subset(["a", "b"])?);
    let degenerate = Filter::degenerate(&x);
    println!("filters on [{x}]: {}", enumerate_filters(&x, false).len());
    println!("{fa} refines {fab}: {}", fa.refines(&fab));
    println!("{fa} meet {} = {}", Filter::point(&x, "b")?, fa.meet(&Filter::point(&x, "b")?)?);

    // meshing: cores intersect; the degenerate filter meshes nothing
    println!("{fab} # {}: {}", Filter::principal(&x.subset(["b", "c"])?), mesh(&fab, &Filter::principal(&x.subset(["b", "c"])?))?);
    println!("degenerate # {fa}: {}", mesh(&degenerate, &fa)?);

    // grills of set families
    let family = SetFamily::new(&x, [x.subset(["a"])?, x.subset(["b"])?])?;
    println!("grill of {family} = {}", grill(&family));

    // relations act on filters through images of cores
    let y = Carrier::new(["1", "2"])?;
    let r = Relation::new(&x, &y, [("a", "1"), ("b", "1"), ("b", "2")])?;
    println!("R = {r}");
    println!("R[{fab}] = {}", r.rel_image(&fab)?);
    println!("R^-[{}] = {}", Filter::point(&y, "2")?, r.rel_preimage(&Filter::point(&y, "2")?)?);

    // filters on a product act as multivalued maps
    let pc = ProductCarrier::new(&x, &y)?;
    let j = pc.prod_filter(&fab, &Filter::point(&y, "1")?)?;
    println!("J = {j} acting on {fa}: {}", pc.jrel_image(&j, &fa)?);

    // composability of classes, with a witness when it fails
    let report = check_composable(&FilterClass::point_filters(), &FilterClass::principal(), &x, &y)?;
    println!(
        "point filters principal-composable on ([{x}], [{y}])? {}",
        report.holds
    );
    if let Some(w) = report.witness {
        println!(
            "  witness: J = {}, D = {}, image {} escapes the class",
            w.product_filter, w.class_filter, w.image
        );
    }
    Ok(())
}
