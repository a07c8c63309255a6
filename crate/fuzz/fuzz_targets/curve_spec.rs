#![no_main]

use libfuzzer_sys::fuzz_target;
use lipschitz_h1b::io::parse_curve_spec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(curve) = parse_curve_spec(text) {
        let l = curve.lipschitz_constant();
        assert!(l.is_finite());
        assert_eq!(curve.slopes().len(), curve.breakpoints().len() + 1);
        assert!(curve.breakpoints().windows(2).all(|w| w[0] < w[1]));
        for x in [-1e3, -1.0, 0.0, 0.5, 1e3] {
            assert!(curve.eval(x).is_finite() || l > 1e300);
        }
    }
});
