#![no_main]

use libfuzzer_sys::fuzz_target;
use metafib::SeededRecurrence;

fuzz_target!(|data: &[u8]| {
    let Ok(seeded) = serde_json::from_slice::<SeededRecurrence>(data) else {
        return;
    };
    let text = serde_json::to_string(&seeded).unwrap();
    let back: SeededRecurrence = serde_json::from_str(&text).unwrap();
    assert_eq!(back, seeded);
    let _ = seeded.eval(64);
});
