fn main() {
    std::process::exit(supertask::cli::main());
}
