fn main() {
    std::process::exit(planck_noise::cli::main());
}
