fn main() {
    std::process::exit(ssfrac_cli::run(std::env::args_os()));
}
