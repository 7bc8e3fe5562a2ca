//! Product structures, the finite Tychonoff identity, and the atomic-space
//! witness construction behind the product theorems.
//!
//! ```bash
//! cargo run -p capmeasure --example products_and_atoms
//! ```

use capmeasure::{
    atomic_space, measure_at_set, product_space, CapStructure, Carrier, ExtReal, Filter,
    FilterClass,
};

fn ext(s: &str) -> ExtReal {
    s.parse().unwrap()
}

fn main() -> capmeasure::Result<()> {
    let cx = Carrier::new(["a", "b"])?;
    let x = CapStructure::from_matrix(
        &cx,
        &[vec![ext("0"), ext("2")], vec![ext("3"), ext("0")]],
    )?;
    let cy = Carrier::new(["p", "q"])?;
    let y = CapStructure::from_matrix(
        &cy,
        &[vec![ext("0"), ext("1")], vec![ext("inf"), ext("0")]],
    )?;

    // the product structure joins factor costs componentwise
    let (pc, xy) = product_space(&x, &y)?;
    println!("product carrier: {}", pc.carrier());
    println!(
        "cost from (b,p) at (a,q): {}",
        xy.entry_by_label("(b,p)", "(a,q)")?
    );

    // Tychonoff at finite scale: the product measure of any filter at a
    // box splits as the join of the projection measures
    let all = FilterClass::all();
    let diag = Filter::principal(&pc.carrier().subset(["(a,p)", "(b,q)"])?);
    let box_ab = pc.subset_product(&cx.subset(["b"])?, &cy.subset(["q"])?)?;
    let lhs = measure_at_set(&xy, &all, &box_ab, &diag)?;
    let rhs_x = measure_at_set(&x, &all, &cx.subset(["b"])?, &pc.proj_left_filter(&diag)?)?;
    let rhs_y = measure_at_set(&y, &all, &cy.subset(["q"])?, &pc.proj_right_filter(&diag)?)?;
    println!(
        "measure at the box {} of {}: {} = {} join {}",
        box_ab, diag, lhs.value, rhs_x.value, rhs_y.value
    );
    assert_eq!(lhs.value, rhs_x.value.max(rhs_y.value));

    // the atomic space over a filter: one non-isolated point whose
    // neighborhood filter is prescribed; the certified product measure
    // reproduces the original one
    let f = Filter::point(&cx, "a")?;
    let a = cx.subset(["b"])?;
    let m = measure_at_set(&x, &all, &a, &f)?;
    println!("\nc^{{b}}({f}) = {} with witness {:?}", m.value, m.witness_filter);

    let d = m.witness_filter.expect("attained");
    let atomic = atomic_space(&cx, &d)?;
    println!("atomic space over {d}:");
    print!("{}", atomic.space.render_space_file());
    println!("neighborhood filter of `{}`: {}", atomic.atom, atomic.nbhd);

    let (pca, xa) = product_space(&x, &atomic.space)?;
    let a_atom = pca.subset_product(&a, &atomic.space.carrier().singleton(&atomic.atom)?)?;
    let f_nbhd = pca.prod_filter(&f, &atomic.nbhd)?;
    let certified = measure_at_set(&xa, &FilterClass::principal(), &a_atom, &f_nbhd)?;
    println!(
        "certified through the atomic product: c^{a_atom}({f_nbhd}) = {}",
        certified.value
    );
    assert_eq!(certified.value, m.value);
    Ok(())
}
