fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(udw_core::cli::run(&args));
}
