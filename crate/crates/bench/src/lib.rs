//! Fixtures shared by the benchmarks under `benches/`.

use affthermo::{AffineIfs, AffineMap, Mat2};

/// Positive invertible pair plus a positive rank-one letter.
pub fn dominated() -> AffineIfs {
    AffineIfs::new(vec![
        AffineMap::new(Mat2::new(0.4, 0.1, 0.1, 0.3), [0.0, 0.0]),
        AffineMap::new(Mat2::new(0.3, 0.1, 0.2, 0.4), [0.6, 0.0]),
        AffineMap::new(Mat2::new(0.2, 0.2, 0.2, 0.2), [0.0, 0.6]),
    ])
    .expect("valid tuple")
}

pub fn gasket() -> AffineIfs {
    let h = 0.75f64.sqrt();
    AffineIfs::new(vec![
        AffineMap::new(Mat2::diag(0.5, 0.5), [0.0, 0.0]),
        AffineMap::new(Mat2::diag(0.5, 0.5), [0.5, 0.0]),
        AffineMap::new(Mat2::diag(0.5, 0.5), [0.25, h / 2.0]),
    ])
    .expect("valid tuple")
}
