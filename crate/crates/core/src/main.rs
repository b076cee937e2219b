fn main() {
    std::process::exit(holdtrack::cli::main());
}
