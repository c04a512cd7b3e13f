#![allow(dead_code)]

use affthermo::{AffineIfs, AffineMap, Mat2};
use proptest::prelude::*;

pub const CASES: u32 = 10_000;

/// Entries on a coarse grid so that exact zeros, exact rank drops and
/// exactly vanishing products show up often.
pub fn grid_entry() -> impl Strategy<Value = f64> {
    (-4i32..=4).prop_map(|k| k as f64 / 8.0)
}

pub fn grid_matrix() -> impl Strategy<Value = Mat2> {
    (grid_entry(), grid_entry(), grid_entry(), grid_entry()).prop_map(|(a, b, c, d)| Mat2::new(a, b, c, d))
}

/// Letters of every rank: generic, rank one, nilpotent, zero.
pub fn any_letter() -> impl Strategy<Value = Mat2> {
    prop_oneof![
        4 => (-0.6..0.6f64, -0.6..0.6f64, -0.6..0.6f64, -0.6..0.6f64).prop_map(|(a, b, c, d)| Mat2::new(a, b, c, d)),
        2 => grid_matrix(),
        1 => (-0.6..0.6f64, -0.6..0.6f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_map(|(x, y, u, v)| Mat2::outer([x, y], [u, v])),
        1 => (0.05..0.6f64).prop_map(|c| Mat2::new(0.0, c, 0.0, 0.0)),
        1 => (0.05..0.6f64).prop_map(|c| Mat2::diag(c, 0.0)),
        1 => Just(Mat2::ZERO),
    ]
}

pub fn invertible_letter() -> impl Strategy<Value = Mat2> {
    (-0.6..0.6f64, -0.6..0.6f64, -0.6..0.6f64, -0.6..0.6f64)
        .prop_map(|(a, b, c, d)| Mat2::new(a, b, c, d))
        .prop_filter("invertible", |m| m.det().abs() > 1e-3)
}

/// Scale so the largest norm is at most `cap`.
pub fn contract(m: Mat2, cap: f64) -> Mat2 {
    let n = m.norm();
    if n > cap {
        m.scale(cap / n)
    } else {
        m
    }
}

pub fn tuple(letters: impl Strategy<Value = Mat2>, len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Mat2>> {
    prop::collection::vec(letters, len)
}

/// A contractive tuple of `2..=max` letters, at least one invertible.
pub fn mixed_tuple(max: usize) -> impl Strategy<Value = Vec<Mat2>> {
    (invertible_letter(), tuple(any_letter(), 1..=max - 1), any::<prop::sample::Index>()).prop_map(
        |(inv, mut rest, at)| {
            let k = at.index(rest.len() + 1);
            rest.insert(k, inv);
            rest.into_iter().map(|m| contract(m, 0.9)).collect()
        },
    )
}

pub fn contractive_tuple(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Mat2>> {
    tuple(any_letter(), len).prop_map(|v| v.into_iter().map(|m| contract(m, 0.9)).collect())
}

pub fn ifs(mats: &[Mat2]) -> AffineIfs {
    AffineIfs::from_matrices(mats).unwrap()
}

pub fn ifs_with(mats: &[Mat2], translations: &[[f64; 2]]) -> AffineIfs {
    AffineIfs::new(mats.iter().zip(translations).map(|(m, t)| AffineMap::new(*m, *t)).collect()).unwrap()
}

/// `A_{i_1} ⋯ A_{i_n}` multiplied out left to right.
pub fn direct_product(mats: &[Mat2], word: &[u8]) -> Mat2 {
    word.iter().fold(Mat2::diag(1.0, 1.0), |acc, &i| acc * mats[i as usize])
}
