//! Class reflections and coreflections of a structure, and its
//! convergence-space parts.
//!
//! ```bash
//! cargo run -p capmeasure --example reflectors_and_coreflectors
//! ```

use capmeasure::{
    adh_reflect, base_coreflect, conv_parts, enumerate_filters, CapStructure, Carrier, ExtReal,
    FilterClass, LambdaSource,
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

    // finite canonical structures are fixed points of the adherence
    // reflection for every large class
    for class in FilterClass::builtins() {
        let reflected = adh_reflect(&s2, &class);
        let fixed = enumerate_filters(&carrier, false).iter().all(|f| {
            carrier
                .labels()
                .iter()
                .all(|x| reflected.get(f, x).unwrap() == s2.lambda(f, x).unwrap())
        });
        println!("Adh[{}] fixes the structure: {fixed}", class.name());
    }

    // the base coreflection through point filters forgets non-point
    // filters entirely (their cost meets over an empty index set)
    let points = FilterClass::point_filters();
    let based = base_coreflect(&s2, &points);
    for f in enumerate_filters(&carrier, false) {
        let costs: Vec<String> = carrier
            .labels()
            .iter()
            .map(|x| based.get(&f, x).unwrap().to_string())
            .collect();
        println!("Base[points] at {f:<10} = ({})", costs.join(", "));
    }

    // convergence parts: cost 0 (coreflection) vs finite cost (reflection)
    let (zero_part, finite_part) = conv_parts(&s2);
    for f in enumerate_filters(&carrier, false) {
        println!(
            "{f:<10} limits: cost-zero {} | finite-cost {}",
            zero_part.limits_of(&f)?,
            finite_part.limits_of(&f)?
        );
    }
    Ok(())
}
