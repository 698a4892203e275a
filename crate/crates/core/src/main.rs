fn main() {
    std::process::exit(filmorbit::cli::run(std::env::args_os()));
}
