//! Suite config parsing includes cross-field validation (tolerance ordering,
//! dimension bounds, row ids); none of it may panic on hostile input.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = opnormal::files::parse_suite_config(data);
});
