fn main() { std::process::exit(isoq::cli::run(std::env::args().collect())); }
