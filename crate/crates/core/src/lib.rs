//! Thermodynamic formalism and dimension estimates for planar affine
//! iterated function systems whose linear parts may be singular.

pub mod classify;
pub mod error;
pub mod geometry;
pub mod ifs;
pub mod mat2;
pub mod pressure;
pub mod symbolic;

pub use error::{Error, Result};
pub use ifs::{AffineIfs, AffineMap};
pub use mat2::{Direction, Mat2, RankOneForm, RankTolerance};
pub use symbolic::{SubshiftKind, Word};

/// Format with 12 significant digits in the style of C's `%.12g`.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
