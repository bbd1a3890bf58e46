fn main() {
    std::process::exit(photon_ur_cli::main_with(std::env::args_os().collect()));
}
