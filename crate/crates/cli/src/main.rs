fn main() {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = kbm_cli::app::main_with(
        std::env::args_os(),
        &|k| std::env::var(k).ok(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    );
    std::process::exit(code);
}
