#![no_main]

use biharmonic_cli::{Cli, Job};
use clap::Parser;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let args = std::iter::once("biharmonic").chain(text.split('\n'));
    let Ok(cli) = Cli::try_parse_from(args) else {
        return;
    };
    if cli.config.is_some() {
        return;
    }
    if let Ok(config) = cli.into_config() {
        let _ = Job::plan(&config.command);
    }
});
