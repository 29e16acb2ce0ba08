//! Corpus records arrive from files; arbitrary bytes must produce either a
//! parsed record or a clean error, and the parsed record must construct its
//! field and form without panicking.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(record) = cubicspan::io::parse_corpus_line(text) else { return };
    if let Ok((f, form)) = record.build() {
        // Survivors must round-trip.
        let again = cubicspan::io::CorpusRecord::from_surface(&f, &form);
        let line = cubicspan::io::write_corpus_line(&again);
        let (f2, form2) = cubicspan::io::parse_corpus_line(&line)
            .expect("round-trip parses")
            .build()
            .expect("round-trip builds");
        assert_eq!(f.order(), f2.order());
        assert_eq!(form.coeffs(), form2.coeffs());
    }
});
