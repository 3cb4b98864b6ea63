fn main() {
    std::process::exit(sjperc_cli::run(std::env::args_os()));
}
