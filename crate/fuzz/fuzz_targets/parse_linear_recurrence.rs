#![no_main]

use libfuzzer_sys::fuzz_target;
use metafib::linrec::{LinearRecurrence, Recurrence};

fuzz_target!(|data: &[u8]| {
    let Ok(rec) = serde_json::from_slice::<LinearRecurrence>(data) else {
        return;
    };
    let text = serde_json::to_string(&rec).unwrap();
    let back: LinearRecurrence = serde_json::from_str(&text).unwrap();
    assert_eq!(back, rec);
    if rec.order() <= 8 {
        for rot in rec.rotations() {
            let _ = rot.prefix(32);
        }
    }
});
