#![no_main]

use biharmonic_cli::parse_grid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = parse_grid(text) {
        let grid = spec.to_grid().expect("accepted grids build");
        assert_eq!(grid.len(), spec.count);
        assert_eq!(grid.first(), spec.start);
        assert_eq!(grid.last(), spec.stop);
        assert_eq!(parse_grid(&spec.to_string()), Ok(spec));
    }
});
