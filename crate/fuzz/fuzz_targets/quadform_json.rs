//! Fuzz the sparse quadratic-form decoder ({"i,j": "p/q"} documents).

#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(q) = rectgraph::QuadForm::from_json_str(text, None) {
        let out = serde_json::to_string(&q).expect("serialize accepted form");
        let again = rectgraph::QuadForm::from_json_str(&out, None)
            .expect("round trip must reparse");
        assert_eq!(q, again);
    }
});
