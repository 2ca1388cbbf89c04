#![no_main]

use birkhoff::format::{parse_records, write_records};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(records) = parse_records(text) {
        let text = write_records(records.iter().map(|r| &r.matrix));
        let again = parse_records(&text).expect("written records parse");
        assert_eq!(again.len(), records.len());
    }
});
