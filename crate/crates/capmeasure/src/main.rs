use std::io::{stderr, stdout};

fn main() {
    let code = capmeasure::cli::run(std::env::args().skip(1), &mut stdout(), &mut stderr());
    std::process::exit(code);
}
