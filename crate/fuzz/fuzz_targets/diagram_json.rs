#![no_main]
use bnc_engine::lr::LrDiagram;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(d) = LrDiagram::from_json_str(s) {
            let back = LrDiagram::from_json_str(&d.to_json().to_string()).unwrap();
            assert_eq!(back, d);
            let _ = d.to_partition();
        }
    }
});
