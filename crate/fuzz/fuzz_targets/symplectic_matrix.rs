#![no_main]

use libfuzzer_sys::fuzz_target;
use periodlab::linalg::{is_symplectic, SymplecticMatrix};

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = serde_json::from_slice::<SymplecticMatrix>(data) {
        assert!(is_symplectic(m.entries()));
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<SymplecticMatrix>(&text).unwrap(), m);
    }
});
