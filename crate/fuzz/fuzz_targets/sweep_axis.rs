#![no_main]

use dilaton_cli::sweep::SweepAxis;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(axis) = text.parse::<SweepAxis>() {
        assert!(axis.steps >= 1);
        assert_eq!(axis.value(0), axis.min);
        assert_eq!(
            axis.value(axis.steps - 1),
            if axis.steps == 1 { axis.min } else { axis.max }
        );
        let mid = axis.value(axis.steps / 2);
        assert!(mid.is_finite() || !(axis.min.is_finite() && axis.max.is_finite()));
    }
});
