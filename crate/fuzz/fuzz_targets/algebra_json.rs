#![no_main]
use bnc_engine::StructuredAlgebra;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(a) = StructuredAlgebra::from_json_str(s) {
            let _ = a.associativity_violation();
            let _ = a.unit_violation();
        }
    }
});
