//! One-line permutation decoder: first byte is the block size, the rest the
//! image. Accepted inputs must round-trip and invert cleanly.

#![no_main]

use libfuzzer_sys::fuzz_target;
use modp_foliations::eo::Shuffle;

fuzz_target!(|data: &[u8]| {
    if data.is_empty() || data.len() > 33 {
        return;
    }
    let e = data[0] as usize;
    let image: Vec<usize> = data[1..].iter().map(|&b| b as usize).collect();
    if let Ok(w) = Shuffle::from_one_line(e, image.clone()) {
        assert_eq!(w.one_line(), image.as_slice());
        let d = image.len();
        for j in 1..=d {
            assert_eq!(w.apply_inverse(w.apply(j)), j);
        }
    }
});
