//! Covering clouds of attractors, built from the word tree.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::AffineIfs;
use crate::symbolic::{Product, SubshiftKind, TreeWalk, Visit, Word, DEFAULT_BUDGET};

/// Which set a cloud approximates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "set", rename_all = "camelCase")]
pub enum CloudSource {
    X,
    Xprime,
    XdoublePrime,
    Condensation,
    Projection { angle: f64 },
    /// Read from a file or built by hand.
    Imported,
}

impl CloudSource {
    pub fn of_kind(kind: SubshiftKind) -> Self {
        match kind {
            SubshiftKind::Full => CloudSource::Xprime,
            SubshiftKind::Sigma => CloudSource::XdoublePrime,
            SubshiftKind::Invertible => CloudSource::X,
        }
    }
}

impl fmt::Display for CloudSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CloudSource::X => f.write_str("X"),
            CloudSource::Xprime => f.write_str("Xprime"),
            CloudSource::XdoublePrime => f.write_str("XdoublePrime"),
            CloudSource::Condensation => f.write_str("Condensation"),
            CloudSource::Projection { angle } => write!(f, "Projection({})", crate::fmt_g(*angle)),
            CloudSource::Imported => f.write_str("Imported"),
        }
    }
}

impl FromStr for CloudSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "X" => CloudSource::X,
            "Xprime" => CloudSource::Xprime,
            "XdoublePrime" => CloudSource::XdoublePrime,
            "Condensation" => CloudSource::Condensation,
            "Imported" => CloudSource::Imported,
            _ => {
                let angle = s
                    .strip_prefix("Projection(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|a| a.parse().ok())
                    .ok_or_else(|| Error::invalid("geometry", format!("unknown cloud source {s:?}")))?;
                CloudSource::Projection { angle }
            }
        })
    }
}

/// Finite points within `resolution` of a target set in the Hausdorff sense.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointCloud {
    pub points: Vec<[f64; 2]>,
    pub resolution: f64,
    pub source: CloudSource,
}

impl PointCloud {
    pub fn new(points: Vec<[f64; 2]>, resolution: f64, source: CloudSource) -> Self {
        Self {
            points,
            resolution,
            source,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The image of every point under map `i`.
    pub fn mapped(&self, ifs: &AffineIfs, i: usize) -> Vec<[f64; 2]> {
        let f = &ifs.maps()[i];
        self.points.iter().map(|&p| f.apply(p)).collect()
    }
}

/// Leaf test, with slack for products accumulated through logarithms.
fn small_enough(norm: f64, r: f64, eps: f64) -> bool {
    2.0 * norm * r <= eps * (1.0 + 1e-9)
}

fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("geometry", format!("resolution must be positive, got {eps}")))
    }
}

/// Depth at which every product is small enough: `ρ^n · 2R ≤ ε`.
fn covering_depth(ifs: &AffineIfs, eps: f64) -> usize {
    let r = ifs.radius_bound();
    let rho = ifs.max_norm();
    if r == 0.0 || rho == 0.0 || 2.0 * r <= eps {
        return 1;
    }
    ((eps / (2.0 * r)).ln() / rho.ln()).ceil() as usize + 2
}

pub fn attractor_cloud(ifs: &AffineIfs, kind: SubshiftKind, eps: f64) -> Result<PointCloud> {
    attractor_cloud_with_budget(ifs, kind, eps, DEFAULT_BUDGET)
}

/// Expand the word tree of `kind` until `diam f_𝚒(B) ≤ ε`, where `B` is the
/// ball of radius [`AffineIfs::radius_bound`] about the origin, and emit the
/// centre `f_𝚒(0)` of each leaf. Every point of the attractor lies within
/// `ε/2` of the cloud and every cloud point within `ε/2` of the attractor.
pub fn attractor_cloud_with_budget(ifs: &AffineIfs, kind: SubshiftKind, eps: f64, budget: u64) -> Result<PointCloud> {
    ifs.require_contractive("geometry")?;
    check_epsilon(eps)?;
    let r = ifs.radius_bound();
    let max_depth = covering_depth(ifs, eps);
    let walk = TreeWalk::new(ifs, kind, max_depth, budget, "geometry");
    let shards = walk.run(Vec::new, |pts: &mut Vec<[f64; 2]>, node| {
        if small_enough(node.product.norm(), r, eps) || node.word.len() >= max_depth {
            pts.push(node.offset);
            Visit::Prune
        } else {
            Visit::Descend
        }
    })?;
    Ok(PointCloud::new(shards.concat(), eps, CloudSource::of_kind(kind)))
}

/// `f_𝚒(0)`. For an infinite word this converges to its canonical
/// projection, with error at most `‖A_𝚒‖ R`.
///
/// Summed forwards as `Σ_k A_{𝚒|k-1} v_{i_k}` and cut at the first vanishing
/// prefix product, so the value freezes exactly there.
pub fn canonical_point(ifs: &AffineIfs, word: &Word) -> [f64; 2] {
    let tol = ifs.tolerance();
    let mut p = Product::identity();
    let mut out = [0.0, 0.0];
    for &l in word.letters() {
        let i = l as usize;
        let y = p.apply(ifs.maps()[i].translation);
        out = [out[0] + y[0], out[1] + y[1]];
        p = p.extend(ifs.linear(i), ifs.rank(i), ifs.norm(i), tol);
        if p.rank() == 0 {
            break;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condensation {
    /// The invertible attractor `X`.
    pub x: PointCloud,
    /// `C = ⋃_{i ∉ I} f_i(X′)`.
    pub c: PointCloud,
    /// `X ∪ ⋃_{𝚒 ∈ I*} f_𝚒(C)`, an approximation of `X′`.
    pub reconstructed: PointCloud,
}

/// Rebuild `X′` as the inhomogeneous attractor of the invertible letters
/// with condensation set `C`.
///
/// Words of `I*` are expanded until `diam f_𝚒(B) ≤ ε`; each internal node
/// contributes `f_𝚒(C)` and each leaf its centre, which covers both the
/// tail of `X` and the images of `C` below it.
pub fn condensation_decomposition(ifs: &AffineIfs, eps: f64) -> Result<Condensation> {
    condensation_decomposition_with_budget(ifs, eps, DEFAULT_BUDGET)
}

pub fn condensation_decomposition_with_budget(ifs: &AffineIfs, eps: f64, budget: u64) -> Result<Condensation> {
    let inv = ifs.invertible_indices();
    let sing = ifs.non_invertible_indices();
    if inv.is_empty() {
        return Err(Error::NotNonInvertible {
            detail: "no invertible letter".into(),
        });
    }
    if sing.is_empty() {
        return Err(Error::NotNonInvertible {
            detail: "every letter is invertible".into(),
        });
    }
    ifs.require_contractive("geometry")?;
    check_epsilon(eps)?;

    let full = attractor_cloud_with_budget(ifs, SubshiftKind::Full, eps, budget)?;
    let c_points: Vec<[f64; 2]> = sing.iter().flat_map(|&i| full.mapped(ifs, i)).collect();
    let c = PointCloud::new(c_points, eps, CloudSource::Condensation);
    let x = attractor_cloud_with_budget(ifs, SubshiftKind::Invertible, eps, budget)?;

    let r = ifs.radius_bound();
    let max_depth = covering_depth(ifs, eps);
    let walk = TreeWalk::new(ifs, SubshiftKind::Invertible, max_depth, budget, "geometry");
    let shards = walk.run(Vec::new, |pts: &mut Vec<[f64; 2]>, node| {
        if small_enough(node.product.norm(), r, eps) || node.word.len() >= max_depth {
            pts.push(node.offset);
            return Visit::Prune;
        }
        for &p in &c.points {
            let y = node.product.apply(p);
            pts.push([y[0] + node.offset[0], y[1] + node.offset[1]]);
        }
        Visit::Descend
    })?;
    let mut points = c.points.clone();
    points.extend(shards.concat());
    Ok(Condensation {
        x,
        reconstructed: PointCloud::new(points, eps, CloudSource::Xprime),
        c,
    })
}
