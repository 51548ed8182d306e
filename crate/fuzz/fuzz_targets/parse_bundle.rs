#![no_main]

use libfuzzer_sys::fuzz_target;
use metafib::{Bundle, Construction};

fuzz_target!(|data: &[u8]| {
    let Ok(bundle) = serde_json::from_slice::<Bundle>(data) else {
        return;
    };
    if let Ok(c) = Construction::try_from(bundle) {
        assert_eq!(Construction::try_from(c.to_bundle()).unwrap(), c);
    }
});
