#![no_main]

use dilaton_cli::config::{parse_config, Overrides, RunConfig};
use dilaton_cli::params::Scenario;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(file) = parse_config(text) else {
        return;
    };
    for scenario in Scenario::ALL {
        if let Ok(run) = RunConfig::resolve(scenario, file.clone(), Overrides::default()) {
            // every sweep point must be constructible
            let n = run.sweep.len().min(64);
            for i in 0..n {
                let p = run.sweep.point(&run.params, i);
                assert_eq!(p.names(), run.params.names());
            }
        }
    }
});
