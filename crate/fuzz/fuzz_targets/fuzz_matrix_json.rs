//! The dense matrix parser must reject arbitrary bytes gracefully: any panic
//! or non-error crash here is a bug, since this is the surface user files hit.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = opnormal::files::parse_matrix(data);
});
