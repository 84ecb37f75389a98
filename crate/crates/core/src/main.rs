fn main() {
    std::process::exit(calibration_lab::cli::main());
}
