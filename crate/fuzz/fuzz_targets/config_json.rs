#![no_main]

use libfuzzer_sys::fuzz_target;
use vpure_cli::config::{from_value, parse_document};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(value) = parse_document(text) {
            if let Ok(config) = from_value(value) {
                let _ = config.validate();
            }
        }
    }
});
