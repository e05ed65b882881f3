#![no_main]

use dilaton_cli::config::parse_override;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok((key, value)) = parse_override(text) {
        assert!(!key.is_empty());
        assert_eq!(key.trim(), key);
        let reparsed = parse_override(&format!("{key}={value:e}")).expect("round trip");
        assert_eq!(reparsed.0, key);
        assert!(reparsed.1.to_bits() == value.to_bits() || (value.is_nan() && reparsed.1.is_nan()));
    }
});
