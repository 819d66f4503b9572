use tfimmse::cli;

fn main() {
    std::process::exit(cli::run());
}
