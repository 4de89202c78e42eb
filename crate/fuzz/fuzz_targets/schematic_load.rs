#![no_main]

use libfuzzer_sys::fuzz_target;

// Full schematic decode: NBT layer plus schema and size validation.
fuzz_target!(|data: &[u8]| {
    let _ = settlegen::nbt::load_schematic(data);
});
