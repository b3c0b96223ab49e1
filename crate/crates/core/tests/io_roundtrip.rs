mod common;

use common::*;
use proptest::prelude::*;
use stabrad::io::{format_matrix_market, parse_matrix_market, write_matrix_market, read_matrix_market, MmField};
use stabrad::ComplexMatrix;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn write_then_read_is_exact(n in 1usize..8, complex in any::<bool>(), seed in any::<u64>(), exp in -300i32..300) {
        let mut g = rng(seed);
        let scale = 10f64.powi(exp / 10);
        let m = random_matrix(&mut g, n, complex).scale_real(scale);
        let text = format_matrix_market(&m, Some("round trip"));
        let d = parse_matrix_market(text.as_bytes()).unwrap();
        prop_assert_eq!(d.matrix, m.clone());
        prop_assert_eq!(d.header.field, if complex { MmField::Complex } else { MmField::Real });
        prop_assert_eq!(d.pattern.len(), n * n);
    }

    #[test]
    fn malformed_input_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
        let mut text = b"%%MatrixMarket matrix coordinate real general\n".to_vec();
        text.extend(bytes);
        let _ = parse_matrix_market(text.as_slice());
    }

    #[test]
    fn mutated_files_never_panic(seed in any::<u64>(), cut in 0usize..200) {
        let m = random_matrix(&mut rng(seed), 3, true);
        let text = format_matrix_market(&m, None);
        let cut = cut.min(text.len());
        let _ = parse_matrix_market(&text.as_bytes()[..cut]);
    }
}

#[test]
fn file_round_trip_and_sparse_pattern() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.mtx");
    let a = stabrad::io::grcar(10, 1.0).unwrap();
    write_matrix_market(&p, &a, None).unwrap();
    let d = read_matrix_market(&p).unwrap();
    assert_eq!(d.matrix, a);
    assert_eq!(d.pattern.len(), 43);
    assert_eq!(d.square_pattern().unwrap().len(), 43);
}

#[test]
fn explicit_zero_values_survive_as_pattern() {
    let text = "%%MatrixMarket matrix coordinate real general\n3 3 3\n1 1 -1\n2 3 0\n3 3 -2\n";
    let d = parse_matrix_market(text.as_bytes()).unwrap();
    assert_eq!(d.matrix, ComplexMatrix::from_real_rows(&[&[-1.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, -2.0]]));
    let p = d.square_pattern().unwrap();
    assert!(p.contains(1, 2));
    assert_eq!(p.len(), 3);
}

/// Catalog metadata for the files used in the large experiments, checked when
/// `STABRAD_MM_DIR` points at a directory holding them.
#[test]
fn catalog_files_when_available() {
    let Ok(dir) = std::env::var("STABRAD_MM_DIR") else {
        eprintln!("SKIP: STABRAD_MM_DIR not set");
        return;
    };
    for (file, n, nnz) in [("tols340.mtx", 340, 2196), ("tub1000.mtx", 1000, 3996), ("tols4000.mtx", 4000, 8784)] {
        let p = std::path::Path::new(&dir).join(file);
        if !p.exists() {
            eprintln!("SKIP: {file} not found");
            continue;
        }
        let d = read_matrix_market(&p).unwrap();
        assert_eq!((d.rows, d.cols), (n, n), "{file}");
        assert_eq!(d.stored_entries, nnz, "{file}");
    }
}
