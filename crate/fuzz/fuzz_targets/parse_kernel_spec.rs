#![no_main]

use birkhoff::format::parse_kernel_spec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_kernel_spec(text);
    }
});
