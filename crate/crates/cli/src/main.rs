fn main() {
    let mut stdout = std::io::stdout();
    let code = amoeba_cli::run(std::env::args_os(), &mut stdout);
    std::process::exit(code);
}
