#![no_main]

use libfuzzer_sys::fuzz_target;
use metafib::format::{parse_csv, write_as, SequenceFormat};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(seq) = parse_csv(text) else {
        return;
    };
    for format in [SequenceFormat::Bfile, SequenceFormat::Csv, SequenceFormat::Json] {
        let written = write_as(format, &seq);
        let back = metafib::format::parse_as(format, &written).unwrap();
        if !seq.values.is_empty() {
            assert_eq!(back, seq);
        }
    }
});
