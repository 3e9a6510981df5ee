#![no_main]

use libfuzzer_sys::fuzz_target;
use qmacro_cli::parse::parse_sites;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(sites) = parse_sites(text) {
        assert_eq!(sites.len(), text.trim().split(';').count());
        assert!(sites.iter().all(|(t, p)| t.is_finite() && p.is_finite()));
    }
});
