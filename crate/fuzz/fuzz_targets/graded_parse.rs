#![no_main]
use libfuzzer_sys::fuzz_target;
use prequant::{Patch, PolyForm, PolyMultivector};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let patch = Patch::standard(4);
    if let Ok(a) = PolyForm::parse(&patch, text) {
        let back = PolyForm::parse_with_degree(&patch, &a.to_string(), a.degree()).expect("printed forms parse");
        assert_eq!(back, a);
    }
    if let Ok(u) = PolyMultivector::parse(&patch, text) {
        let back = PolyMultivector::parse_with_degree(&patch, &u.to_string(), u.degree()).expect("printed multivectors parse");
        assert_eq!(back, u);
    }
});
