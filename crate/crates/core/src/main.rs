fn main() {
    std::process::exit(gcw::dsl::cli_main(std::env::args_os()));
}
