fn main() {
    std::process::exit(solenoid_dynamics::cli::main_with_args(std::env::args_os()));
}
