//! Command-line entry point.

fn main() {
    std::process::exit(limit_qre::cli::run(std::env::args_os()));
}
