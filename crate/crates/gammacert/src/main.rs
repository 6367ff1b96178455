fn main() {
    std::process::exit(gammacert::cli::run());
}
