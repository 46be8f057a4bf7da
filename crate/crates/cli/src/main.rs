use std::process::ExitCode;

use bandgen_cli::Cli;
use bandgen_core::Category;
use clap::error::ErrorKind;
use clap::Parser;

fn exit_code(c: Category) -> u8 {
    match c {
        Category::Input => 2,
        Category::Format => 3,
        Category::Capability => 4,
        Category::Numeric => 5,
        Category::Io => 6,
    }
}

/// One line, so scripts can split on the first `]: `.
fn report(category: Category, detail: &str) -> ExitCode {
    let detail = detail.split_whitespace().collect::<Vec<_>>().join(" ");
    eprintln!("error[{category}]: {detail}");
    ExitCode::from(exit_code(category))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            return report(Category::Input, first.trim_start_matches("error: "));
        }
    };
    match bandgen_cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(e.category(), &e.to_string()),
    }
}
