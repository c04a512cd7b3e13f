//! Real 2×2 matrices: singular values, rank decisions, the singular value
//! function, rank-one factorizations and projective directions.
//!
//! Everything here is closed form. Matrices are small `Copy` values and all
//! operations are pure.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances used for rank decisions.
///
/// A matrix is rank zero when every entry is at most `absolute` in modulus,
/// and rank one when `α2 <= relative · α1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankTolerance {
    pub relative: f64,
    pub absolute: f64,
}

impl Default for RankTolerance {
    fn default() -> Self {
        Self {
            relative: 1e-10,
            absolute: 1e-14,
        }
    }
}

/// A real 2×2 matrix stored row-major as `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2::new(0.0, 0.0, 0.0, 0.0);
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub const fn from_rows(rows: [[f64; 2]; 2]) -> Self {
        Self::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    }

    pub const fn diag(x: f64, y: f64) -> Self {
        Self::new(x, 0.0, 0.0, y)
    }

    /// Counter-clockwise rotation by `theta` radians.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, -s, s, c)
    }

    /// `u vᵀ`.
    pub fn outer(u: [f64; 2], v: [f64; 2]) -> Self {
        Self::new(u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1])
    }

    pub fn rows(&self) -> [[f64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a, self.c, self.b, self.d)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(k * self.a, k * self.b, k * self.c, k * self.d)
    }

    pub fn sub(&self, o: &Mat2) -> Self {
        Self::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }

    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        [self.a * x[0] + self.b * x[1], self.c * x[0] + self.d * x[1]]
    }

    pub fn max_abs(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    pub fn frobenius(&self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    /// Singular values `(α1, α2)` with `α1 >= α2 >= 0`.
    ///
    /// Uses the eigenvalues of `AᵀA` written through its trace and
    /// determinant; the square root of the discriminant is taken as a
    /// `hypot` so it never goes negative, and `α2` is recovered from
    /// `|det A| / α1` to avoid cancellation.
    pub fn singular_values(&self) -> (f64, f64) {
        let p = self.a * self.a + self.c * self.c;
        let r = self.b * self.b + self.d * self.d;
        let q = self.a * self.b + self.c * self.d;
        let half_gap = (0.5 * (p - r)).hypot(q);
        let s1 = (0.5 * (p + r) + half_gap).sqrt();
        if s1 == 0.0 {
            return (0.0, 0.0);
        }
        let s2 = (self.det().abs() / s1).min(s1);
        (s1, s2)
    }

    /// Operator norm, `α1`.
    pub fn norm(&self) -> f64 {
        self.singular_values().0
    }

    pub fn rank(&self, tol: &RankTolerance) -> u8 {
        if self.max_abs() <= tol.absolute {
            return 0;
        }
        let (s1, s2) = self.singular_values();
        if s1 == 0.0 {
            0
        } else if s2 <= tol.relative * s1 {
            1
        } else {
            2
        }
    }

    /// The singular value function `φ^s`.
    pub fn svf(&self, s: f64) -> f64 {
        let (s1, s2) = self.singular_values();
        svf_from_singular(s1, s2, s)
    }

    /// `φ^s` with `α2` set to zero when the matrix has numerical rank one.
    pub fn svf_tol(&self, s: f64, tol: &RankTolerance) -> f64 {
        match self.rank(tol) {
            0 => svf_from_singular(0.0, 0.0, s),
            1 => svf_from_singular(self.norm(), 0.0, s),
            _ => self.svf(s),
        }
    }

    /// Moduli of the eigenvalues, largest first.
    pub fn eigen_moduli(&self) -> (f64, f64) {
        let tr = self.trace();
        let det = self.det();
        let disc = tr * tr - 4.0 * det;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            let l1 = 0.5 * (tr + tr.signum() * sq);
            let l1 = if tr == 0.0 { 0.5 * sq } else { l1 };
            let l2 = if l1 != 0.0 { det / l1 } else { 0.0 };
            let (x, y) = (l1.abs(), l2.abs());
            if x >= y {
                (x, y)
            } else {
                (y, x)
            }
        } else {
            let m = det.abs().sqrt();
            (m, m)
        }
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigen_moduli().0
    }

    /// True when the matrix fixes every line through the origin, i.e. it is
    /// a scalar multiple of the identity (the zero matrix included).
    pub fn is_scalar(&self, tol: &RankTolerance) -> bool {
        let scale = self.norm();
        let eps = tol.relative * scale + tol.absolute;
        self.b.abs() <= eps && self.c.abs() <= eps && (self.a - self.d).abs() <= eps
    }

    /// True when the matrix is a scalar multiple of an orthogonal matrix
    /// (zero included), so that `α1 = α2`.
    pub fn is_conformal(&self, tol: &RankTolerance) -> bool {
        let (s1, s2) = self.singular_values();
        s1 - s2 <= 1e2 * f64::EPSILON * s1 + tol.absolute
    }

    /// Lines `V` with `AV ⊂ V` coming from real eigenvectors.
    ///
    /// Returns an empty list when the eigenvalues are not real. Scalar
    /// matrices fix every line; callers should test [`Mat2::is_scalar`] first.
    pub fn real_eigenlines(&self, tol: &RankTolerance) -> Vec<Direction> {
        let tr = self.trace();
        let det = self.det();
        let scale = self.norm().max(tol.absolute);
        let disc = tr * tr - 4.0 * det;
        let disc_tol = 1e-14 * scale * scale;
        let lambdas: Vec<f64> = if disc < -disc_tol {
            return Vec::new();
        } else if disc <= disc_tol {
            vec![0.5 * tr]
        } else {
            let sq = disc.sqrt();
            vec![0.5 * (tr + sq), 0.5 * (tr - sq)]
        };
        let mut lines: Vec<Direction> = Vec::new();
        for l in lambdas {
            let r1 = [self.a - l, self.b];
            let r2 = [self.c, self.d - l];
            let n1 = r1[0].hypot(r1[1]);
            let n2 = r2[0].hypot(r2[1]);
            let row = if n1 >= n2 { r1 } else { r2 };
            if row[0] == 0.0 && row[1] == 0.0 {
                continue;
            }
            let dir = Direction::from_vector([-row[1], row[0]]);
            if !lines.iter().any(|d| d.distance(&dir) < 1e-12) {
                lines.push(dir);
            }
        }
        lines
    }

    /// Norm of the restriction to the line `v`, i.e. `|A u|` for the unit
    /// vector `u` spanning it.
    pub fn restricted_norm(&self, v: &Direction) -> f64 {
        let y = self.apply(v.unit());
        y[0].hypot(y[1])
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Mul<&Mat2> for &Mat2 {
    type Output = Mat2;
    fn mul(self, o: &Mat2) -> Mat2 {
        *self * *o
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// `φ^s` evaluated from singular values, with `0^0 = 1`.
pub fn svf_from_singular(s1: f64, s2: f64, s: f64) -> f64 {
    if s <= 1.0 {
        s1.powf(s)
    } else if s <= 2.0 {
        s1 * s2.powf(s - 1.0)
    } else {
        (s1 * s2).powf(0.5 * s)
    }
}

/// `log φ^s` from singular values; `-inf` where `φ^s` vanishes.
pub fn log_svf_from_singular(s1: f64, s2: f64, s: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    if s <= 1.0 {
        s * s1.ln()
    } else if s <= 2.0 {
        s1.ln() + (s - 1.0) * s2.ln()
    } else {
        0.5 * s * (s1.ln() + s2.ln())
    }
}

/// A line through the origin, stored as an angle in `[0, π)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Direction {
    angle: f64,
}

impl Direction {
    pub fn new(angle: f64) -> Self {
        let mut a = angle.rem_euclid(PI);
        if a >= PI {
            a = 0.0;
        }
        Self { angle: a }
    }

    pub fn from_vector(v: [f64; 2]) -> Self {
        Self::new(v[1].atan2(v[0]))
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn unit(&self) -> [f64; 2] {
        let (s, c) = self.angle.sin_cos();
        [c, s]
    }

    pub fn perpendicular(&self) -> Self {
        Self::new(self.angle + 0.5 * PI)
    }

    /// Angular distance in `[0, π/2]`.
    pub fn distance(&self, other: &Direction) -> f64 {
        let d = (self.angle - other.angle).rem_euclid(PI);
        d.min(PI - d)
    }

    /// Image of the line under `m`, or `None` when `m` kills it.
    pub fn image(&self, m: &Mat2, tol: &RankTolerance) -> Option<Direction> {
        let y = m.apply(self.unit());
        let n = y[0].hypot(y[1]);
        if n <= tol.relative * m.norm() + tol.absolute {
            None
        } else {
            Some(Direction::from_vector(y))
        }
    }

    /// Orthogonal projection onto this line.
    pub fn projection(&self) -> Mat2 {
        let u = self.unit();
        Mat2::outer(u, u)
    }
}

impl PartialEq for Direction {
    fn eq(&self, other: &Self) -> bool {
        self.distance(other) <= 1e-12
    }
}

/// Factorization `A = v wᵀ` of a rank-one matrix.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RankOneForm {
    pub v: [f64; 2],
    pub w: [f64; 2],
    pub nilpotent: bool,
    /// `⟨v, w⟩` when not nilpotent, `|v||w|` when nilpotent.
    pub scale: f64,
    pub kernel_line: Direction,
    pub image_line: Direction,
    /// Signed angle of the rotation `R` with `R(w/|w|) = v/|v|`; only set
    /// in the nilpotent case.
    pub rotation: Option<f64>,
}

impl RankOneForm {
    pub fn reconstruct(&self) -> Mat2 {
        Mat2::outer(self.v, self.w)
    }

    /// The projection form: `⟨v,w⟩·proj_im^ker` or `|v||w|·R·proj_{ker⊥}`.
    pub fn projection_form(&self) -> Mat2 {
        match self.rotation {
            Some(phi) => {
                let p = self.kernel_line.perpendicular().projection();
                (Mat2::rotation(phi) * p).scale(self.scale)
            }
            None => {
                // proj_im^ker(x) = ⟨x,w⟩/⟨v,w⟩ v
                let ip = dot(self.v, self.w);
                Mat2::outer(self.v, self.w).scale(self.scale / ip)
            }
        }
    }
}

pub(crate) fn dot(x: [f64; 2], y: [f64; 2]) -> f64 {
    x[0] * y[0] + x[1] * y[1]
}

pub(crate) fn norm2(x: [f64; 2]) -> f64 {
    x[0].hypot(x[1])
}

/// Factor a rank-one matrix as `v wᵀ`.
///
/// `v` points along the column of larger norm (ties go to the first column)
/// and `|v| = |w| = α1^{1/2}`.
pub fn rank_one_factor(m: &Mat2, tol: &RankTolerance) -> Result<RankOneForm> {
    let rank = m.rank(tol);
    if rank != 1 {
        return Err(Error::Rank {
            module: "mat2",
            detail: format!("rank_one_factor needs a rank-one matrix, got rank {rank}"),
        });
    }
    let col1 = [m.a, m.c];
    let col2 = [m.b, m.d];
    let u = if norm2(col1) >= norm2(col2) { col1 } else { col2 };
    let uu = dot(u, u);
    let coeff = [dot(col1, u) / uu, dot(col2, u) / uu];
    let s1 = m.norm();
    let un = uu.sqrt();
    let root = s1.sqrt();
    let v = [u[0] / un * root, u[1] / un * root];
    let w = [coeff[0] * un / root, coeff[1] * un / root];
    let ip = dot(v, w);
    let nilpotent = ip.abs() <= tol.relative * s1;
    let rotation = if nilpotent {
        let phi = v[1].atan2(v[0]) - w[1].atan2(w[0]);
        Some((phi + PI).rem_euclid(2.0 * PI) - PI)
    } else {
        None
    };
    Ok(RankOneForm {
        v,
        w,
        nilpotent,
        scale: if nilpotent { norm2(v) * norm2(w) } else { ip },
        kernel_line: Direction::from_vector(w).perpendicular(),
        image_line: Direction::from_vector(v),
        rotation,
    })
}

/// Proximality: two real eigenvalues of different modulus.
pub fn is_proximal(m: &Mat2, tol: &RankTolerance) -> Result<bool> {
    if m.rank(tol) != 2 {
        return Err(Error::Rank {
            module: "mat2",
            detail: "proximality is defined for invertible matrices only".into(),
        });
    }
    let s1 = m.norm();
    let tr = m.trace();
    let disc = tr * tr - 4.0 * m.det();
    Ok(disc > tol.relative * s1 * s1 && tr.abs() > tol.relative * s1)
}
