#![no_main]
use libfuzzer_sys::fuzz_target;
use theta_opers::parse::parse_matrix;
use theta_opers::theta::RiemannMatrix;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(rows) = parse_matrix(text) else { return };
    if let Some(first) = rows.first() {
        assert!(rows.iter().all(|r| r.len() == first.len()));
    }
    if rows.len() <= 4 {
        let _ = RiemannMatrix::from_rows(&rows);
    }
});
