//! Case file parser on arbitrary bytes. The driver caps inside parse_case
//! bound every accepted case, so construction stays small no matter what
//! the input claims.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = modp_foliations::case::parse_case(text);
    }
});
