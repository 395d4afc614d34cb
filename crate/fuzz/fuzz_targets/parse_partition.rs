#![no_main]
use bnc_engine::SetPartition;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(p) = SetPartition::parse(s) {
            assert_eq!(SetPartition::parse(&p.to_rgs_string()).unwrap(), p);
            if p.n() > 0 {
                assert_eq!(SetPartition::parse(&p.to_block_string()).unwrap(), p);
            }
        }
    }
});
