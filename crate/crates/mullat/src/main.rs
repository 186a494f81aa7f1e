fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(mullat::cli::cli_run(
        &args,
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    ));
}
