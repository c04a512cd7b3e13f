//! Common invariant lines.
//!
//! Only the first letter that does not fix every line matters: any common
//! invariant line must be one of its (at most two) invariant lines. With
//! rational entries those lines live over `Q(√D)`, `D` the discriminant of
//! that letter, and the test `det[x, A x] = 0` is decided exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::ifs::AffineIfs;
use crate::mat2::{Direction, Mat2};

/// Angular tolerance of the floating-point path.
pub const ANGLE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "answer", rename_all = "lowercase", rename_all_fields = "camelCase")]
pub enum Irreducibility {
    Yes,
    No { common_line: Direction },
}

impl Irreducibility {
    pub fn is_irreducible(&self) -> bool {
        matches!(self, Irreducibility::Yes)
    }
}

/// Decide whether the letters share an invariant line.
///
/// Exact arithmetic is used when the tuple carries rational linear parts.
pub fn is_irreducible(ifs: &AffineIfs) -> Irreducibility {
    match ifs.exact() {
        Some(ex) => exact::is_irreducible(ex),
        None => float_irreducible(&ifs.matrices(), ifs),
    }
}

fn fixes_line(m: &Mat2, line: &Direction, ifs: &AffineIfs) -> bool {
    let u = line.unit();
    let y = m.apply(u);
    let n = y[0].hypot(y[1]);
    let tol = ifs.tolerance();
    if n <= tol.relative * m.norm() + tol.absolute {
        return true;
    }
    (u[0] * y[1] - u[1] * y[0]).abs() <= ANGLE_TOLERANCE * n
}

fn float_irreducible(mats: &[Mat2], ifs: &AffineIfs) -> Irreducibility {
    let tol = ifs.tolerance();
    let Some(first) = mats.iter().find(|m| !m.is_scalar(tol)) else {
        return Irreducibility::No {
            common_line: Direction::new(0.0),
        };
    };
    for line in first.real_eigenlines(tol) {
        if mats.iter().all(|m| fixes_line(m, &line, ifs)) {
            return Irreducibility::No { common_line: line };
        }
    }
    Irreducibility::Yes
}

/// `min_{|x|=1} max_i |A_i x|` over an angle grid; positive for irreducible
/// tuples.
pub fn delta_lower_bound(mats: &[Mat2], grid: usize) -> f64 {
    (0..grid)
        .map(|k| {
            let u = Direction::new(std::f64::consts::PI * k as f64 / grid as f64).unit();
            mats.iter()
                .map(|m| {
                    let y = m.apply(u);
                    y[0].hypot(y[1])
                })
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

mod exact {
    use super::*;

    type Q = BigRational;

    /// `p + q√d`.
    #[derive(Clone, Debug)]
    struct Surd {
        p: Q,
        q: Q,
    }

    impl Surd {
        fn rational(p: Q) -> Self {
            Surd { p, q: Q::zero() }
        }
        fn add(&self, o: &Surd) -> Surd {
            Surd {
                p: &self.p + &o.p,
                q: &self.q + &o.q,
            }
        }
        fn sub(&self, o: &Surd) -> Surd {
            Surd {
                p: &self.p - &o.p,
                q: &self.q - &o.q,
            }
        }
        fn mul(&self, o: &Surd, d: &Q) -> Surd {
            Surd {
                p: &self.p * &o.p + &self.q * &o.q * d,
                q: &self.p * &o.q + &self.q * &o.p,
            }
        }
        fn scale(&self, k: &Q) -> Surd {
            Surd {
                p: &self.p * k,
                q: &self.q * k,
            }
        }
        fn is_zero(&self) -> bool {
            self.p.is_zero() && self.q.is_zero()
        }
        fn to_f64(&self, d: &Q) -> f64 {
            self.p.to_f64().unwrap_or(0.0) + self.q.to_f64().unwrap_or(0.0) * d.to_f64().unwrap_or(0.0).sqrt()
        }
    }

    fn exact_sqrt(x: &Q) -> Option<Q> {
        if x.is_negative() {
            return None;
        }
        let n: &BigInt = x.numer();
        let m: &BigInt = x.denom();
        let rn = n.sqrt();
        let rm = m.sqrt();
        (&rn * &rn == *n && &rm * &rm == *m).then(|| Q::new(rn, rm))
    }

    fn is_scalar(m: &[Q; 4]) -> bool {
        m[1].is_zero() && m[2].is_zero() && m[0] == m[3]
    }

    /// Invariant lines of a non-scalar matrix as vectors over `Q(√d)`.
    fn eigenvectors(m: &[Q; 4]) -> (Q, Vec<[Surd; 2]>) {
        let [a, b, c, dd] = m;
        let tr = a + dd;
        let det = a * dd - b * c;
        let disc = &tr * &tr - Q::from_integer(4.into()) * &det;
        if disc.is_negative() {
            return (Q::zero(), Vec::new());
        }
        let half = Q::new(1.into(), 2.into());
        let (d, lambdas): (Q, Vec<Surd>) = match exact_sqrt(&disc) {
            Some(r) => {
                let mut ls = vec![Surd::rational((&tr + &r) * &half)];
                if !r.is_zero() {
                    ls.push(Surd::rational((&tr - &r) * &half));
                }
                (Q::zero(), ls)
            }
            None => (
                disc,
                vec![
                    Surd {
                        p: &tr * &half,
                        q: half.clone(),
                    },
                    Surd {
                        p: &tr * &half,
                        q: -half.clone(),
                    },
                ],
            ),
        };
        let mut out = Vec::new();
        for l in lambdas {
            let v = if !b.is_zero() {
                [Surd::rational(b.clone()), l.sub(&Surd::rational(a.clone()))]
            } else if !c.is_zero() {
                [l.sub(&Surd::rational(dd.clone())), Surd::rational(c.clone())]
            } else if l.q.is_zero() && l.p == *a {
                [Surd::rational(Q::from_integer(1.into())), Surd::rational(Q::zero())]
            } else {
                [Surd::rational(Q::zero()), Surd::rational(Q::from_integer(1.into()))]
            };
            out.push(v);
        }
        (d, out)
    }

    /// `det[x, A x]`.
    fn fixes(m: &[Q; 4], x: &[Surd; 2], d: &Q) -> bool {
        let ax0 = x[0].scale(&m[0]).add(&x[1].scale(&m[1]));
        let ax1 = x[0].scale(&m[2]).add(&x[1].scale(&m[3]));
        x[0].mul(&ax1, d).sub(&x[1].mul(&ax0, d)).is_zero()
    }

    pub(super) fn is_irreducible(mats: &[[Q; 4]]) -> Irreducibility {
        let Some(first) = mats.iter().find(|m| !is_scalar(m)) else {
            return Irreducibility::No {
                common_line: Direction::new(0.0),
            };
        };
        let (d, vectors) = eigenvectors(first);
        for x in vectors {
            if mats.iter().all(|m| fixes(m, &x, &d)) {
                let v = [x[0].to_f64(&d), x[1].to_f64(&d)];
                return Irreducibility::No {
                    common_line: Direction::from_vector(v),
                };
            }
        }
        Irreducibility::Yes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn exact_ifs(rows: Vec<[BigRational; 4]>) -> AffineIfs {
        let mats: Vec<Mat2> = rows
            .iter()
            .map(|r| {
                let f: Vec<f64> = r.iter().map(|x| x.to_f64().unwrap()).collect();
                Mat2::new(f[0], f[1], f[2], f[3])
            })
            .collect();
        AffineIfs::from_matrices(&mats).unwrap().with_exact_linear(rows).unwrap()
    }

    #[test]
    fn upper_triangular_pair_shares_x_axis() {
        let ifs = AffineIfs::from_matrices(&[Mat2::new(0.5, 0.2, 0.0, 0.3), Mat2::new(0.4, -0.1, 0.0, 0.2)]).unwrap();
        match is_irreducible(&ifs) {
            Irreducibility::No { common_line } => assert!(common_line.distance(&Direction::new(0.0)) < 1e-12),
            Irreducibility::Yes => panic!("expected reducible"),
        }
    }

    #[test]
    fn rotation_and_diagonal_are_irreducible() {
        let mats = [Mat2::rotation(1.0).scale(0.5), Mat2::diag(0.5, 0.2)];
        let ifs = AffineIfs::from_matrices(&mats).unwrap();
        assert_eq!(is_irreducible(&ifs), Irreducibility::Yes);
        // grid oracle: no line is within 1e-6 of invariant under both
        for k in 0..10_000 {
            let line = Direction::new(std::f64::consts::PI * k as f64 / 1e4);
            let worst = mats
                .iter()
                .map(|m| line.distance(&line.image(m, ifs.tolerance()).unwrap()))
                .fold(0.0, f64::max);
            assert!(worst > 1e-6);
        }
        assert!(delta_lower_bound(&mats, 1000) > 0.0);
    }

    #[test]
    fn diagonal_tuple_is_reducible() {
        let ifs = AffineIfs::from_matrices(&[Mat2::diag(0.4, 0.4), Mat2::diag(0.4, 0.0)]).unwrap();
        assert!(!is_irreducible(&ifs).is_irreducible());
    }

    #[test]
    fn exact_path_on_irrational_eigenlines() {
        // [[1,1],[1,0]] has eigenlines over Q(√5); a second letter sharing
        // one of them is only detectable exactly or approximately.
        let a = [q(1, 2), q(1, 2), q(1, 2), q(0, 1)];
        // a² shares both eigenlines with a
        let a2 = [q(1, 2), q(1, 4), q(1, 4), q(1, 4)];
        let ifs = exact_ifs(vec![a.clone(), a2]);
        match is_irreducible(&ifs) {
            Irreducibility::No { common_line } => {
                let golden = (1.0 + 5f64.sqrt()) / 2.0;
                let expected = Direction::from_vector([golden, 1.0]);
                let other = Direction::from_vector([1.0 - golden, 1.0]);
                assert!(common_line.distance(&expected) < 1e-12 || common_line.distance(&other) < 1e-12);
            }
            Irreducibility::Yes => panic!("powers share eigenlines"),
        }
        let b = [q(1, 3), q(0, 1), q(0, 1), q(1, 5)];
        assert_eq!(is_irreducible(&exact_ifs(vec![a, b])), Irreducibility::Yes);
    }

    #[test]
    fn exact_path_rank_one_and_scalar() {
        let r = [q(1, 5), q(1, 5), q(1, 5), q(1, 5)];
        let s = [q(1, 3), q(0, 1), q(0, 1), q(1, 3)];
        match is_irreducible(&exact_ifs(vec![s.clone(), r.clone()])) {
            Irreducibility::No { .. } => {}
            Irreducibility::Yes => panic!("scalar + rank-one is reducible"),
        }
        let p = [q(2, 5), q(1, 10), q(1, 10), q(3, 10)];
        let ifs = exact_ifs(vec![s, r, p]);
        // p and r are both symmetric with the diagonal as an eigenline of r
        // but not of p
        assert_eq!(is_irreducible(&ifs), Irreducibility::Yes);
    }
}
