fn main() -> std::process::ExitCode {
    fractal_wave_lab::cli::main_with(std::env::args_os())
}
