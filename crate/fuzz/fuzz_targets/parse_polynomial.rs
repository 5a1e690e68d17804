#![no_main]

use libfuzzer_sys::fuzz_target;
use periodlab::periods::Differential;
use periodlab::{parse_polynomial, Complex64, Constants};

// Polynomial text, optionally followed by a newline and a denominator for a differential.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let constants = Constants::default();
    let (num, den) = text.split_once('\n').unwrap_or((text, "1"));
    if let Ok(f) = parse_polynomial(num, &constants) {
        let _ = f.canonical_string();
        let _ = f.eval(Complex64::new(0.3, -0.7), Complex64::new(1.1, 0.2));
        let _ = f.derivative_y();
    }
    let _ = Differential::parse(num, den, ("x", "y"), &constants);
});
