fn main() {
    std::process::exit(ssa_lab::cli::run_args(std::env::args_os()));
}
