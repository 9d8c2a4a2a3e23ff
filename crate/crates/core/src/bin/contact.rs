fn main() {
    std::process::exit(contact_core::cli::main_with_args(std::env::args_os()));
}
