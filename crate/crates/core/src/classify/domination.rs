//! Strictly invariant multicones and the cone constant κ.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::AffineIfs;
use crate::mat2::{Direction, Mat2};
use crate::symbolic::{SubshiftKind, TreeWalk, Visit, DEFAULT_BUDGET};

/// Closed projective interval `{θ : lo ≤ θ ≤ lo + len}` taken mod π.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AngleInterval {
    pub lo: f64,
    pub len: f64,
}

impl AngleInterval {
    pub fn new(lo: f64, len: f64) -> Self {
        Self {
            lo: lo.rem_euclid(PI),
            len,
        }
    }

    pub fn hi(&self) -> f64 {
        self.lo + self.len
    }

    /// Offset of `theta` from `lo`, in `[0, π)`.
    fn offset(&self, theta: f64) -> f64 {
        (theta - self.lo).rem_euclid(PI)
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.offset(theta) <= self.len
    }

    /// `[a, a + l]` lies inside with at least `margin` to spare on both sides.
    fn strictly_contains(&self, a: f64, l: f64, margin: f64) -> bool {
        let t = self.offset(a);
        t >= margin && t + l <= self.len - margin
    }

    /// Distance from `theta` to the interval, 0 inside.
    fn distance(&self, theta: f64) -> f64 {
        if self.contains(theta) {
            return 0.0;
        }
        let t = self.offset(theta);
        (t - self.len).min(PI - t)
    }
}

/// A finite union of disjoint closed projective intervals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Multicone {
    pub intervals: Vec<AngleInterval>,
}

impl Multicone {
    pub fn contains(&self, theta: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(theta))
    }

    /// Evenly spread sample directions, interval endpoints included.
    pub fn sample(&self, count: usize) -> Vec<f64> {
        let total: f64 = self.intervals.iter().map(|i| i.len).sum();
        let mut out = Vec::with_capacity(count + 2 * self.intervals.len());
        for iv in &self.intervals {
            let k = ((count as f64) * iv.len / total.max(f64::MIN_POSITIVE)).ceil().max(1.0) as usize;
            for j in 0..=k {
                out.push(iv.lo + iv.len * j as f64 / k as f64);
            }
        }
        out
    }

    fn is_disjoint(&self) -> bool {
        for (i, a) in self.intervals.iter().enumerate() {
            if !(a.len > 0.0 && a.len < PI) {
                return false;
            }
            for b in &self.intervals[i + 1..] {
                if a.contains(b.lo) || b.contains(a.lo) {
                    return false;
                }
            }
        }
        true
    }

    /// Every letter maps the multicone into its interior.
    pub fn is_strictly_invariant(&self, mats: &[Mat2], ranks: &[u8], margin: f64) -> bool {
        if self.intervals.is_empty() || !self.is_disjoint() {
            return false;
        }
        mats.iter().zip(ranks).all(|(m, &r)| match r {
            0 => false,
            1 => {
                let Some(kernel) = rank_one_kernel(m) else {
                    return false;
                };
                let image = rank_one_image(m);
                self.intervals.iter().all(|iv| iv.distance(kernel.angle()) > margin)
                    && self.intervals.iter().any(|iv| iv.strictly_contains(image.angle(), 0.0, margin))
            }
            _ => self.intervals.iter().all(|iv| {
                let (start, len) = image_arc(m, iv);
                self.intervals.iter().any(|j| j.strictly_contains(start, len, margin))
            }),
        })
    }
}

/// Kernel line of a rank-one matrix: orthogonal to its dominant row.
fn rank_one_kernel(m: &Mat2) -> Option<Direction> {
    let r = if m.a.hypot(m.b) >= m.c.hypot(m.d) { [m.a, m.b] } else { [m.c, m.d] };
    (r != [0.0, 0.0]).then(|| Direction::from_vector([-r[1], r[0]]))
}

fn rank_one_image(m: &Mat2) -> Direction {
    let c = if m.a.hypot(m.c) >= m.b.hypot(m.d) { [m.a, m.c] } else { [m.b, m.d] };
    Direction::from_vector(c)
}

/// Image of an interval under an invertible matrix, as `(start, length)`.
/// Orientation-reversing matrices swap the endpoints.
fn image_arc(m: &Mat2, iv: &AngleInterval) -> (f64, f64) {
    let a = Direction::from_vector(m.apply(Direction::new(iv.lo).unit())).angle();
    let b = Direction::from_vector(m.apply(Direction::new(iv.hi()).unit())).angle();
    let (start, end) = if m.det() > 0.0 { (a, b) } else { (b, a) };
    (start, (end - start).rem_euclid(PI))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DominationCertificate {
    pub multicone: Multicone,
    pub kappa: f64,
    pub verified_depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase", rename_all_fields = "camelCase")]
pub enum Domination {
    Certified(DominationCertificate),
    Inconclusive { reason: String },
}

impl Domination {
    pub fn certificate(&self) -> Option<&DominationCertificate> {
        match self {
            Domination::Certified(c) => Some(c),
            Domination::Inconclusive { .. } => None,
        }
    }
}

/// Knobs of the multicone search.
#[derive(Clone, Debug)]
pub struct DominationSearch {
    pub max_intervals: usize,
    /// Deepest word length checked exactly for κ.
    pub kappa_depth: usize,
    /// Cap on words used for κ; the depth is lowered to respect it.
    pub kappa_words: usize,
    pub margin: f64,
    /// Try every candidate and keep the largest κ instead of the first hit.
    pub best_kappa: bool,
}

impl Default for DominationSearch {
    fn default() -> Self {
        Self {
            max_intervals: 8,
            kappa_depth: 16,
            kappa_words: 20_000,
            margin: 1e-9,
            best_kappa: false,
        }
    }
}

/// Search for a strictly invariant multicone and extract κ.
///
/// κ holds for words of every length, not only the enumerated ones: words up
/// to the search depth are checked exactly, and a longer word `w = w′v` is
/// handled by the cone geometry. `A_v` sends the cone into a narrower image
/// cone, and any product that preserves the cone cannot shrink vectors of
/// that image cone much below its norm (see [`image_margin`]).
pub fn find_domination_certificate(ifs: &AffineIfs, params: &DominationSearch) -> Result<Domination> {
    if let Some(i) = ifs.ranks().iter().position(|&r| r == 0) {
        return Err(Error::RankZeroLetter { index: i });
    }
    let mats = ifs.matrices();
    let depth = kappa_depth(ifs.len(), params);
    let mut best: Option<DominationCertificate> = None;
    for cone in candidates(ifs, params) {
        if !cone.is_strictly_invariant(&mats, ifs.ranks(), params.margin) {
            continue;
        }
        let levels = level_scan(ifs, &cone, depth)?;
        let enumerated = levels.iter().map(|l| l.ratio).fold(f64::INFINITY, f64::min);
        let widest = cone.intervals.iter().map(|iv| iv.len).fold(0.0, f64::max);
        let beyond = levels
            .iter()
            .map(|l| (0.5 * widest).cos() * l.margin * l.ratio)
            .fold(0.0, f64::max);
        let kappa = 0.99 * enumerated.min(beyond);
        if !(kappa > 0.0) {
            continue;
        }
        let cert = DominationCertificate {
            multicone: cone,
            kappa: kappa.min(1.0),
            verified_depth: depth,
        };
        if !params.best_kappa {
            return Ok(Domination::Certified(cert));
        }
        if best.as_ref().is_none_or(|b| cert.kappa > b.kappa) {
            best = Some(cert);
        }
    }
    Ok(match best {
        Some(c) => Domination::Certified(c),
        None => Domination::Inconclusive {
            reason: "no strictly invariant multicone among the candidates".into(),
        },
    })
}

fn kappa_depth(letters: usize, params: &DominationSearch) -> usize {
    let mut depth = 1;
    let mut words = letters;
    while depth < params.kappa_depth && words.saturating_mul(letters) <= params.kappa_words {
        words *= letters;
        depth += 1;
    }
    depth
}

/// Exact `min ‖m u_θ‖` over `θ` in the interval. `‖m u_θ‖²` is a sinusoid in
/// `2θ`, so the minimum sits at the bottom right singular direction when the
/// interval contains it and at an endpoint otherwise.
fn interval_min_gain(m: &Mat2, iv: &AngleInterval) -> f64 {
    let g11 = m.a * m.a + m.c * m.c;
    let g22 = m.b * m.b + m.d * m.d;
    let g12 = m.a * m.b + m.c * m.d;
    let mean = 0.5 * (g11 + g22);
    let ca = 0.5 * (g11 - g22);
    let q = |t: f64| mean + ca * (2.0 * t).cos() + g12 * (2.0 * t).sin();
    let bottom = 0.5 * (-g12).atan2(-ca);
    let sq = if iv.contains(bottom) {
        mean - ca.hypot(g12)
    } else {
        q(iv.lo).min(q(iv.hi()))
    };
    sq.max(0.0).sqrt()
}

/// Per-length minima over the words of one length.
#[derive(Clone, Copy, Debug)]
struct Level {
    /// `min ‖A_𝚒|V‖ / ‖A_𝚒‖` over lines `V` of the cone.
    ratio: f64,
    /// Smallest [`image_margin`] of the words.
    margin: f64,
}

/// How deep inside the cone `A_v` puts the cone, as the constant `c` in
/// `‖N y‖ ≥ c·cos(L_max/2)·‖N‖` for every unit `y` of the image and every
/// product `N` that preserves the cone.
///
/// If `y` lies in an interval `I` of length `L` at angular distance at least
/// `d` from both ends, write `y = a x₁ + b x₂` over the unit end vectors, so
/// `min(a, b) ≥ sin d / sin L`. `N` maps the sector over `I` into a sector of
/// angle at most `L_max < π`, hence `‖N y‖ ≥ cos(L_max/2)·min(a, b)·M` with
/// `M = max(‖N x₁‖, ‖N x₂‖)`, while `‖N‖ ≤ M / min(cos(L/2), sin(L/2))`.
fn image_margin(m: &Mat2, rank: u8, cone: &Multicone) -> f64 {
    let mut worst = f64::INFINITY;
    for iv in &cone.intervals {
        let (start, len) = if rank == 1 {
            (rank_one_image(m).angle(), 0.0)
        } else {
            image_arc(m, iv)
        };
        let host = cone.intervals.iter().find_map(|j| {
            let t = j.offset(start);
            (t + len <= j.len).then(|| (t.min(j.len - t - len), j.len))
        });
        let c = match host {
            Some((d, l)) => d.sin() / l.sin() * (0.5 * l).cos().min((0.5 * l).sin()),
            None => 0.0,
        };
        worst = worst.min(c);
    }
    worst.max(0.0)
}

fn level_scan(ifs: &AffineIfs, cone: &Multicone, depth: usize) -> Result<Vec<Level>> {
    let fresh = Level {
        ratio: f64::INFINITY,
        margin: f64::INFINITY,
    };
    let walk = TreeWalk::new(ifs, SubshiftKind::Full, depth, DEFAULT_BUDGET, "classify");
    let shards = walk.run(
        || vec![fresh; depth],
        |best: &mut Vec<Level>, node| {
            let k = node.word.len() - 1;
            if node.product.rank() == 0 {
                for b in &mut best[k..] {
                    *b = Level { ratio: 0.0, margin: 0.0 };
                }
                return Visit::Prune;
            }
            let m = node.product.normalized();
            let level = &mut best[k];
            for iv in &cone.intervals {
                level.ratio = level.ratio.min(interval_min_gain(m, iv));
            }
            level.margin = level.margin.min(image_margin(m, node.product.rank(), cone));
            Visit::Descend
        },
    )?;
    let mut out = vec![fresh; depth];
    for s in shards {
        for (o, x) in out.iter_mut().zip(s) {
            o.ratio = o.ratio.min(x.ratio);
            o.margin = o.margin.min(x.margin);
        }
    }
    Ok(out)
}

/// `min ‖A_𝚒|V‖ / ‖A_𝚒‖` over every line `V` of the cone and all words up
/// to `depth`.
pub fn cone_ratio(ifs: &AffineIfs, cone: &Multicone, depth: usize) -> Result<f64> {
    Ok(level_scan(ifs, cone, depth)?.iter().map(|l| l.ratio).fold(f64::INFINITY, f64::min))
}

/// Re-check a certificate: strict invariance, and κ against words up to
/// `depth`.
pub fn verify_certificate(ifs: &AffineIfs, cert: &DominationCertificate, depth: usize) -> Result<bool> {
    let mats = ifs.matrices();
    if !(cert.kappa > 0.0 && cert.kappa <= 1.0) {
        return Ok(false);
    }
    if !cert.multicone.is_strictly_invariant(&mats, ifs.ranks(), 0.0) {
        return Ok(false);
    }
    Ok(cone_ratio(ifs, &cert.multicone, depth)? >= cert.kappa)
}

/// Candidate multicones in a fixed order: the two coordinate quadrants,
/// then covers of the image directions of short products.
fn candidates(ifs: &AffineIfs, params: &DominationSearch) -> Vec<Multicone> {
    let mut out = vec![
        Multicone {
            intervals: vec![AngleInterval::new(0.0, 0.5 * PI)],
        },
        Multicone {
            intervals: vec![AngleInterval::new(0.5 * PI, 0.5 * PI)],
        },
    ];
    let mut angles = image_directions(ifs, 4);
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if angles.is_empty() {
        return out;
    }
    // gaps[k] is the gap after angles[k], wrapping around π
    let n = angles.len();
    let gaps: Vec<f64> = (0..n)
        .map(|k| {
            if k + 1 < n {
                angles[k + 1] - angles[k]
            } else {
                angles[0] + PI - angles[k]
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| gaps[y].total_cmp(&gaps[x]).then(x.cmp(&y)));
    for pieces in 1..=params.max_intervals.min(n) {
        let mut cuts: Vec<usize> = order[..pieces].to_vec();
        cuts.sort_unstable();
        for &fatten in &[0.05, 0.15, 0.3, 0.45] {
            let mut intervals = Vec::with_capacity(pieces);
            for (p, &cut) in cuts.iter().enumerate() {
                // an interval runs from the angle after this cut to the next cut
                let next_cut = cuts[(p + 1) % pieces];
                let start = (cut + 1) % n;
                let lo = angles[start];
                let len = (angles[next_cut] - lo).rem_euclid(PI);
                let pad_before = fatten * gaps[cut];
                let pad_after = fatten * gaps[next_cut];
                intervals.push(AngleInterval::new(lo - pad_before, len + pad_before + pad_after));
            }
            intervals.sort_by(|a, b| a.lo.total_cmp(&b.lo));
            out.push(Multicone { intervals });
        }
    }
    out
}

/// Image lines of the products of length `1..=depth`, as angles.
fn image_directions(ifs: &AffineIfs, depth: usize) -> Vec<f64> {
    let walk = TreeWalk::new(ifs, SubshiftKind::Full, depth, DEFAULT_BUDGET, "classify");
    let mut out = Vec::new();
    let _ = walk.run_serial(&mut out, |acc: &mut Vec<f64>, node| {
        if node.product.rank() == 0 {
            return Visit::Prune;
        }
        if node.word.len() >= depth.saturating_sub(1).max(1) {
            acc.push(top_left_singular(node.product.normalized()).angle());
        }
        Visit::Descend
    });
    out
}

/// Direction of the largest left singular vector, i.e. the most expanded
/// image direction.
fn top_left_singular(m: &Mat2) -> Direction {
    // eigenvector of m mᵀ for its largest eigenvalue
    let p = m.a * m.a + m.b * m.b;
    let r = m.c * m.c + m.d * m.d;
    let q = m.a * m.c + m.b * m.d;
    Direction::new(0.5 * (2.0 * q).atan2(p - r))
}
