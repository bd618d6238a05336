#![no_main]

use libfuzzer_sys::fuzz_target;
use parasitech::io::{parse_series_str, write_series_csv, Aggregator};
use parasitech::Role;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for aggregator in [Aggregator::Mean, Aggregator::Median, Aggregator::Max] {
        let Ok(file) = parse_series_str(text, "fuzz.csv", "fuzz", Role::Host, "", aggregator) else {
            continue;
        };
        // whatever parses must survive a write/parse round trip
        let mut out = Vec::new();
        write_series_csv(&file.parsed, &mut out).expect("write to memory");
        let again = std::str::from_utf8(&out).expect("writer emits UTF-8");
        let reparsed =
            parse_series_str(again, "fuzz.csv", "fuzz", Role::Host, "", aggregator).expect("written series parses");
        assert_eq!(reparsed.parsed.len(), file.parsed.len());
    }
});
