//! The exact value lattice `[0, inf]`.
//!
//! ```bash
//! cargo run -p capmeasure --example extended_values
//! ```

use capmeasure::ExtReal;

fn main() {
    let half: ExtReal = "1/2".parse().unwrap();
    let third: ExtReal = "1/3".parse().unwrap();
    let inf = ExtReal::INFINITY;

    println!("exact addition:  1/2 + 1/3 = {}", half + third);
    println!("absorbing top:   3 + inf   = {}", ExtReal::int(3) + inf);

    // joins and meets over collections, with the empty-collection
    // conventions every formula in the crate relies on
    let values = [half, ExtReal::int(2), inf];
    println!("join {{1/2, 2, inf}} = {}", ExtReal::join_all(values));
    println!("meet {{1/2, 2}}      = {}", ExtReal::meet_all([half, ExtReal::int(2)]));
    println!("empty join = {}   (bottom)", ExtReal::join_all([]));
    println!("empty meet = {} (top)", ExtReal::meet_all([]));

    // total order with inf on top
    let mut sorted = [inf, ExtReal::ZERO, ExtReal::int(2), half];
    sorted.sort();
    let rendered: Vec<String> = sorted.iter().map(|v| v.to_string()).collect();
    println!("sorted: {}", rendered.join(" < "));

    // shifting a collection with zero infimum by a finite amount shifts
    // the infimum exactly (used inside the compactness proofs)
    let alpha: ExtReal = "5/7".parse().unwrap();
    let with_zero_meet = [ExtReal::ZERO, ExtReal::int(4), inf];
    let shifted = ExtReal::meet_all(with_zero_meet.iter().map(|v| *v + alpha));
    println!("meet of zero-meet collection shifted by 5/7 = {shifted}");
}
