#![no_main]

use dilaton_interferometry::phase_engine::PerturbationTerm;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(term) = text.parse::<PerturbationTerm>() {
        assert_eq!(term.name(), text.trim());
        assert_eq!(term.to_string().parse::<PerturbationTerm>().unwrap(), term);
    }
});
