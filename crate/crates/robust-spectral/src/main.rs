//! Thin binary entry point; all command handling lives in [`cli`].

mod cli;

fn main() -> std::process::ExitCode {
    cli::main()
}
