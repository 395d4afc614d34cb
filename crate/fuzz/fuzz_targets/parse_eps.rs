#![no_main]
use bnc_engine::EpsilonMap;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(e) = s.parse::<EpsilonMap>() {
            assert_eq!(e.to_string().parse::<EpsilonMap>().unwrap(), e);
        }
    }
});
