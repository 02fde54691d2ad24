fn main() {
    std::process::exit(grasp_synergy::cli::run(std::env::args_os()));
}
