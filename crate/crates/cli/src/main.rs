#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod record;
mod render;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command};
use render::CsvView;

fn run(cli: &Cli) -> anyhow::Result<i32> {
    let start = Instant::now();
    let (mut records, view) = match &cli.command {
        Command::Verify(a) => (commands::verify(a)?, CsvView::Margins),
        Command::Constant(a) => (commands::constant(a)?, CsvView::Results),
        Command::Moment(a) => (commands::moment(a)?, CsvView::Results),
        Command::Table1(a) => (commands::table1(a)?, CsvView::Results),
        Command::Sweep(a) => (commands::sweep(a)?, CsvView::Results),
        Command::Entropy(a) => (commands::entropy(a)?, CsvView::Results),
    };
    let total = start.elapsed().as_millis() as u64;
    for r in &mut records {
        if !cli.out.timing {
            r.runtime_ms = None;
        } else if r.runtime_ms.is_none() {
            r.runtime_ms = Some(total);
        }
    }
    let text = render::render(&records, cli.out.format, view)?;
    match &cli.out.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(record::exit_code(&records))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
