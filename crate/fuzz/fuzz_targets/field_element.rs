//! Field and element construction from arbitrary bytes: characteristic from
//! the first byte, extension degree from the second, coefficients from the
//! rest. Accepted elements must satisfy the basic ring laws.

#![no_main]

use libfuzzer_sys::fuzz_target;
use modp_foliations::gfpn::FiniteField;

fuzz_target!(|data: &[u8]| {
    if data.len() < 2 {
        return;
    }
    let p = data[0] as u64 + 2;
    let n = data[1] as usize % 8 + 1;
    let Ok(field) = FiniteField::new(p, n) else {
        return;
    };
    let coeffs: Vec<u64> = data[2..].iter().take(n + 2).map(|&b| b as u64).collect();
    if let Ok(a) = field.element(coeffs) {
        assert!((&a - &a).is_zero());
        let square = &a * &a;
        assert_eq!(square, a.frobenius(0) * &a);
    }
});
