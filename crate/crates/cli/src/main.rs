fn main() {
    std::process::exit(cavity_duet::run_main(std::env::args_os()));
}
