#![no_main]

use libfuzzer_sys::fuzz_target;
use parasitech::io::parse_sim_config;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(config) = parse_sim_config(text) {
            // a validated config always yields a usable grid
            let grid = config.grid();
            assert_eq!(grid.len(), config.n_points);
            assert!(grid.windows(2).all(|w| w[0] <= w[1]));
        }
    }
});
