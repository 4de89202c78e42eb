#![no_main]

use libfuzzer_sys::fuzz_target;

// The NBT decoder must return Ok or a typed error on any input, raw or
// gzip-wrapped; never panic, hang, or over-allocate.
fuzz_target!(|data: &[u8]| {
    let _ = settlegen::nbt::parse_nbt(data);
});
