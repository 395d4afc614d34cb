#![no_main]
use bnc_engine::ChiMap;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(chi) = s.parse::<ChiMap>() {
            // display must round-trip
            assert_eq!(chi.to_string().parse::<ChiMap>().unwrap(), chi);
        }
    }
});
