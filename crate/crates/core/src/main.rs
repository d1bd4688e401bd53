fn main() {
    std::process::exit(torsion_forge::cli::main_with_args(std::env::args_os()));
}
