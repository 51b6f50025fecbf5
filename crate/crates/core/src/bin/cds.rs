fn main() {
    std::process::exit(cds_coreset::cli::main_from_env());
}
