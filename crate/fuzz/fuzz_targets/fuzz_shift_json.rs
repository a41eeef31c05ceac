//! Shift sequence files carry exact rationals; the parser must surface every
//! malformed input (zero denominators, overflow, junk) as an error, never a
//! panic.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = opnormal::files::parse_sequence(data);
});
