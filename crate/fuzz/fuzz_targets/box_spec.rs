//! Fuzz the LO:HI window parser.

#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(window) = rectgraph::geometry::BoxSpec::parse_cube(text, 2, 1) {
        assert!(window.lo[0] <= window.hi[0]);
    }
});
