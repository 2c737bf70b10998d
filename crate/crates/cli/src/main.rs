fn main() {
    std::process::exit(dilute_fermi_cli::run(std::env::args_os()));
}
