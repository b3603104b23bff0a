#![no_main]

use biharmonic_cli::{parse_run_config, Job, Sidecar};
use libfuzzer_sys::fuzz_target;
use serde_json::Value;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(config) = parse_run_config(text) {
        let sidecar = Sidecar::new(config.clone(), Value::Null, Value::Null);
        assert_eq!(parse_run_config(&sidecar.to_json()).as_ref(), Ok(&config));
        let _ = Job::plan(&config.command.resolved());
    }
});
