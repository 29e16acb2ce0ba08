//! Point strings come from the command line; exercise the parser over a menu
//! of fields with the remaining bytes as the point text.

#![no_main]

use cubicspan::gf::Field;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&pick, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let (p, k) = [(2u64, 3usize), (2, 4), (3, 2), (5, 1), (17, 1)][pick as usize % 5];
    let f = Field::new(p, k, None).expect("menu fields are valid");
    if let Ok(point) = cubicspan::io::parse_point(&f, text) {
        // Survivors are canonical: printing and reparsing is the identity.
        let shown: Vec<String> =
            point.coords().iter().map(|c| c.index().to_string()).collect();
        let again = cubicspan::io::parse_point(&f, &shown.join(":")).expect("reparses");
        assert_eq!(point, again);
    }
});
