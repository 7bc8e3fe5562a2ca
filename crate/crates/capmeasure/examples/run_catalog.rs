//! Run the whole theorem catalog on its default sweeps and print one line
//! per entry.
//!
//! ```bash
//! cargo run --release -p capmeasure --example run_catalog
//! ```

use capmeasure::harness::catalog;

fn main() {
    let mut all_green = true;
    for entry in catalog() {
        match entry.run(&entry.default_spec(), 1) {
            Ok(report) => {
                let status = if report.passed() { "ok" } else { "VIOLATED" };
                all_green &= report.passed();
                println!(
                    "{:<26} {:<9} instances={:<8} spec: {}  ({:?})",
                    entry.id,
                    status,
                    report.instances,
                    report.spec.render(),
                    report.runtime
                );
                for v in report.violations.iter().take(3) {
                    println!("    lhs {} | rhs {}", v.lhs, v.rhs);
                }
            }
            Err(e) => {
                all_green = false;
                println!("{:<26} error: {e}", entry.id);
            }
        }
    }
    println!(
        "\ncatalog: {}",
        if all_green { "all entries verified" } else { "violations found" }
    );
    std::process::exit(if all_green { 0 } else { 1 });
}
