#![no_main]
use bnc_engine::BBProbSpace;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(space) = BBProbSpace::from_json_str(s) {
            if space.algebra().dim() <= 8 {
                let _ = space.check_bb_axioms();
            }
        }
    }
});
