//! Classifying maps between structures: contraction, closed, the perfect
//! family, and the quotient family.
//!
//! ```bash
//! cargo run -p capmeasure --example classify_maps
//! ```

use capmeasure::{classify, CapStructure, Carrier, ExtReal, Map};

fn ext(s: &str) -> ExtReal {
    s.parse().unwrap()
}

fn show(title: &str, f: &Map, x: &CapStructure, y: &CapStructure) -> capmeasure::Result<()> {
    println!("== {title}: {f}");
    print!("{}", classify(f, x, y)?);
    println!();
    Ok(())
}

fn main() -> capmeasure::Result<()> {
    let c = Carrier::new(["a", "b"])?;
    let s2 = CapStructure::from_matrix(
        &c,
        &[vec![ext("0"), ext("2")], vec![ext("3"), ext("0")]],
    )?;
    let indiscrete = CapStructure::indiscrete(&c);
    let one = CapStructure::one_point("p");

    show("identity on the same structure", &Map::identity(&c), &s2, &s2)?;

    show(
        "collapse onto a point",
        &Map::constant(&c, one.carrier(), "p")?,
        &s2,
        &one,
    )?;

    // coarsening the codomain to indiscrete keeps the map a contraction
    // but destroys the quotient inequality
    show(
        "identity into the indiscrete coarsening",
        &Map::identity(&c),
        &s2,
        &indiscrete,
    )?;

    // the reverse direction is not even a contraction
    show(
        "identity out of the indiscrete coarsening",
        &Map::identity(&c),
        &indiscrete,
        &s2,
    )?;

    Ok(())
}
