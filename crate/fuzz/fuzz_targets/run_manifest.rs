#![no_main]

use libfuzzer_sys::fuzz_target;
use lipschitz_h1b::io::parse_manifest;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(m) = parse_manifest(&text) {
        assert!(m.eps.is_finite());
        if let Some(g) = m.grid {
            assert!(g.spacing.is_finite() && g.count > 0);
        }
    }
});
