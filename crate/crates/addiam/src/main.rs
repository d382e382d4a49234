fn main() {
    std::process::exit(addiam::cli::main_entry());
}
