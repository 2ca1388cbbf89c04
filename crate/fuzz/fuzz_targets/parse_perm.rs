#![no_main]

use birkhoff::format::parse_perm;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_perm(text) {
        assert_eq!(parse_perm(&p.to_string()).unwrap(), p);
        assert!(p.then(&p.inverse()).is_identity());
    }
});
