#![no_main]

use libfuzzer_sys::fuzz_target;
use periodlab::CycleFile;

// Anything accepted must survive a save and reload unchanged.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = CycleFile::from_json(text) {
        let again = CycleFile::from_json(&file.to_json_pretty()).expect("saved file reloads");
        assert_eq!(again, file);
        let _ = file.basis();
    }
});
