#![no_main]

use libfuzzer_sys::fuzz_target;
use qmacro_cli::parse::{parse_count_grid, parse_grid, MAX_GRID};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let grid = parse_grid(text);
    if let Ok(values) = &grid {
        assert!(!values.is_empty() && values.len() <= MAX_GRID);
        assert!(values.iter().all(|x| x.is_finite()));
    }
    if let Ok(counts) = parse_count_grid(text) {
        let values = grid.expect("count grid implies grid");
        assert_eq!(counts.len(), values.len());
        assert!(counts.iter().all(|&n| n >= 1));
    }
});
