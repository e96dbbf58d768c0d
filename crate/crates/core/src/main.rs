fn main() {
    std::process::exit(ci_toolkit::cli::main());
}
