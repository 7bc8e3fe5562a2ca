//! Counterexample searches under weakened hypotheses, and mutation
//! self-tests of the verifiers.
//!
//! A weakening drops or sharpens a hypothesis and hunts for violations:
//! finding some shows the original hypothesis did real work, finding none
//! only reports an exhausted range. A mutation deliberately breaks a
//! checker and must be caught, so a green catalog cannot be vacuous.
//!
//! ```bash
//! cargo run -p capmeasure --example counterexample_hunt
//! ```

use capmeasure::harness::{mutate_and_expect_failure, mutations, weakenings};

fn main() {
    println!("-- weakened-hypothesis searches --");
    for entry in weakenings() {
        match entry.run(&entry.default_spec(), 1) {
            Ok(report) => {
                println!(
                    "{:<26} searched {:<7} found {} counterexample(s)",
                    entry.id,
                    report.instances,
                    report.violations.len()
                );
                if let Some(v) = report.violations.first() {
                    println!("  first witness:");
                    for (name, bound) in &v.bindings {
                        println!("    {name}: {bound:?}");
                    }
                    println!("    lhs {} | rhs {}", v.lhs, v.rhs);
                }
            }
            Err(e) => println!("{:<26} error: {e}", entry.id),
        }
    }

    println!("\n-- mutation self-tests --");
    let mut all_caught = true;
    for m in mutations() {
        let caught = mutate_and_expect_failure(m.id).unwrap_or(false);
        all_caught &= caught;
        println!(
            "{:<32} sabotages {:<22} {}",
            m.id,
            m.target,
            if caught { "caught" } else { "NOT CAUGHT" }
        );
    }
    std::process::exit(if all_caught { 0 } else { 1 });
}
