//! Adherence and the measure of compactness of filters.
//!
//! ```bash
//! cargo run -p capmeasure --example adherence_and_measures
//! ```

use capmeasure::compactness::{set_compactness, Within};
use capmeasure::{
    adherence, adherence_mesh_oracle, enumerate_filters, measure_at_family, measure_at_set,
    CapStructure, Carrier, ExtReal, Filter, FilterClass, FnFamily,
};

fn ext(s: &str) -> ExtReal {
    s.parse().unwrap()
}

fn main() -> capmeasure::Result<()> {
    let carrier = Carrier::new(["a", "b"])?;
    let s2 = CapStructure::from_matrix(
        &carrier,
        &[vec![ext("0"), ext("2")], vec![ext("3"), ext("0")]],
    )?;

    // adherence has two defining forms; they agree on every structure
    for f in enumerate_filters(&carrier, true) {
        let ultra = adherence(&s2, &f)?;
        let mesh = adherence_mesh_oracle(&s2, &f)?;
        assert_eq!(ultra, mesh);
        let rendered: Vec<String> = ultra.iter().map(|v| v.to_string()).collect();
        println!("adh {f:<10} = ({})", rendered.join(", "));
    }

    // the measure of compactness of a filter at a set, with its witness
    let all = FilterClass::all();
    let fa = Filter::point(&carrier, "a")?;
    let at_b = carrier.subset(["b"])?;
    let report = measure_at_set(&s2, &all, &at_b, &fa)?;
    println!("c^{{b}}({fa}) = {report}");

    // the general form at a family of cost vectors subsumes the set form
    let family = FnFamily::indicator(&at_b);
    let general = measure_at_family(&s2, &all, &family, &fa)?;
    assert_eq!(general.value, report.value);

    // restricted classes can only lower the measure
    let points = FilterClass::point_filters();
    println!(
        "with point filters only: {}",
        measure_at_set(&s2, &points, &at_b, &fa)?.value
    );

    // every finite space is compact: the trivial filter measures 0 at the
    // whole carrier
    let whole = carrier.full();
    let trivial = Filter::trivial(&carrier);
    println!(
        "c^X(X^) = {}",
        measure_at_set(&s2, &all, &whole, &trivial)?.value
    );
    println!(
        "{{b}} compact in itself: {}",
        set_compactness(&s2, &all, &at_b, Within::Itself)?
    );
    println!(
        "{{b}} relatively compact: {}",
        set_compactness(&s2, &all, &at_b, Within::WholeSpace)?
    );
    Ok(())
}
