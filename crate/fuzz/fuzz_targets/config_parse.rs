#![no_main]
use libfuzzer_sys::fuzz_target;
use prequant::config::{SuiteConfig, Zoo};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = SuiteConfig::from_toml(text);
    let _ = Zoo::parse(text);
});
