//! Fuzz the exact-rational text parser (`p`, `p/q`, decimals).

#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if text.len() > 4096 {
        return; // keep huge-integer parsing out of the hot loop
    }
    if let Ok(x) = rectgraph::scalar::parse_scalar(text) {
        let rendered = rectgraph::scalar::format_scalar(&x);
        let again = rectgraph::scalar::parse_scalar(&rendered).expect("rendered form parses");
        assert_eq!(x, again);
    }
});
