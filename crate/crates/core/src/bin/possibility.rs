fn main() {
    std::process::exit(possibility::cli::main());
}
