fn main() {
    std::process::exit(affthermo_cli::run(std::env::args_os()));
}
