//! `bieberbach` command-line tool.
//!
//! Exit status: 0 on success, 1 for invalid input or configuration, 2 when a
//! numerical stage fails.

mod args;
mod cache;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use cache::Cache;
use commands::Context;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .init();

    let cache = if cli.no_cache {
        Cache::disabled()
    } else {
        Cache::new(Some(
            cli.cache
                .clone()
                .unwrap_or_else(|| cli.out.join(".gram-cache")),
        ))
    };
    let ctx = Context {
        out: cli.out.clone(),
        cache,
    };
    match commands::run(&ctx, &cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
