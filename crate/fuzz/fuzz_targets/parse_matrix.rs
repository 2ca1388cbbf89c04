#![no_main]

use birkhoff::format::{parse_matrix, write_matrix};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_matrix(text) {
        // Whatever parses must survive a write/parse round trip.
        let again = parse_matrix(&write_matrix(&m)).expect("written matrix parses");
        assert_eq!(again, m);
    }
});
