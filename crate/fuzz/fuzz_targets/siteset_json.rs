//! Fuzz the site-set JSON decoder: arbitrary bytes must never panic, and any
//! accepted document must survive a serialize/reparse round trip.

#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(sites) = serde_json::from_str::<rectgraph::SiteSet>(text) {
        let out = serde_json::to_string(&sites).expect("serialize accepted sites");
        let again: rectgraph::SiteSet =
            serde_json::from_str(&out).expect("round trip must reparse");
        assert_eq!(sites, again, "round trip must be stable");
    }
});
