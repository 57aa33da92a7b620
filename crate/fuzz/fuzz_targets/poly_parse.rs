#![no_main]
use libfuzzer_sys::fuzz_target;
use prequant::poly::make_vars;
use prequant::Poly;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let vars = make_vars(&["x", "y", "z", "w"]);
    if let Ok(p) = Poly::parse(text, &vars) {
        let back = Poly::parse(&p.to_string(), &vars).expect("printed polynomials parse");
        assert_eq!(back, p);
    }
});
