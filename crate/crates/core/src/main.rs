fn main() {
    std::process::exit(control_neighbors::cli::run(std::env::args_os().collect()));
}
