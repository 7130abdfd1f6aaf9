#![no_main]

use libfuzzer_sys::fuzz_target;
use vpure::PauliString;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(p) = text.parse::<PauliString>() {
            // Whatever parses must print back to something that parses to the same string.
            let again: PauliString = p.to_string().parse().expect("display output reparses");
            assert_eq!(again, p);
        }
    }
});
