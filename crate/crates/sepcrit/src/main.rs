use std::process::exit;

fn main() {
    exit(sepcrit::cli::run(std::env::args_os()));
}
