//! Depth-`n` cylinder measures, entropy and energy.

use serde::Serialize;

use super::estimate::level_scan;
use crate::error::{Error, Result};
use crate::ifs::AffineIfs;
use crate::mat2::{log_svf_from_singular, Mat2};
use crate::symbolic::{enumerate_level, Product, SubshiftKind, TreeWalk, Visit, Word, DEFAULT_BUDGET};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "camelCase")]
pub enum Provenance {
    GibbsPhi { s: f64 },
    Bernoulli { p: Vec<f64> },
    Uniform,
    Custom,
}

/// A probability vector on words of one length.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CylinderMeasure {
    pub kind: SubshiftKind,
    pub depth: usize,
    pub words: Vec<Word>,
    pub weights: Vec<f64>,
    pub provenance: Provenance,
}

impl CylinderMeasure {
    /// Normalizes `weights`, which must be non-negative with a positive sum.
    pub fn custom(kind: SubshiftKind, depth: usize, words: Vec<Word>, weights: Vec<f64>) -> Result<Self> {
        if words.len() != weights.len() || words.is_empty() {
            return Err(Error::invalid("pressure", "a measure needs one weight per word"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid("pressure", "weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::invalid("pressure", "weights must not all vanish"));
        }
        Ok(Self {
            kind,
            depth,
            words,
            weights: weights.iter().map(|w| w / total).collect(),
            provenance: Provenance::Custom,
        })
    }

    /// Uniform weights on `J^n`.
    pub fn uniform(letters: usize, depth: usize) -> Result<Self> {
        let p = vec![1.0 / letters as f64; letters];
        let mut m = Self::bernoulli(&p, depth)?;
        m.provenance = Provenance::Uniform;
        Ok(m)
    }

    /// Product weights `p_{i1} ⋯ p_{in}` on `J^n`.
    pub fn bernoulli(p: &[f64], depth: usize) -> Result<Self> {
        if p.is_empty() || p.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::invalid("pressure", "Bernoulli weights must be non-negative"));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("pressure", format!("Bernoulli weights sum to {total}, not 1")));
        }
        let count = (p.len() as f64).powi(depth as i32);
        if count > 5e6 {
            return Err(Error::invalid("pressure", "Bernoulli measure has too many cylinders"));
        }
        let mut words = vec![Vec::<u8>::new()];
        let mut weights = vec![1.0];
        for _ in 0..depth {
            let mut nw = Vec::with_capacity(words.len() * p.len());
            let mut nx = Vec::with_capacity(words.len() * p.len());
            for (w, x) in words.iter().zip(&weights) {
                for (i, pi) in p.iter().enumerate() {
                    let mut v = w.clone();
                    v.push(i as u8);
                    nw.push(v);
                    nx.push(x * pi);
                }
            }
            words = nw;
            weights = nx;
        }
        Ok(Self {
            kind: SubshiftKind::Full,
            depth,
            words: words.into_iter().map(Word::from_letters).collect(),
            weights,
            provenance: Provenance::Bernoulli { p: p.to_vec() },
        })
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Weights proportional to `φ^s(A_𝚒)` over the nonzero words of `Γ_n`.
pub fn phi_weights(ifs: &AffineIfs, kind: SubshiftKind, s: f64, n: usize) -> Result<CylinderMeasure> {
    let level = enumerate_level(ifs, kind, n, DEFAULT_BUDGET)?;
    if s == 0.0 && level.implicit_zero > 0 {
        return Err(Error::invalid("pressure", "weights at s = 0 need every product to be nonzero"));
    }
    let logs: Vec<f64> = level.entries.iter().map(|e| log_phi(&e.product, e.rank, s)).collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Err(Error::EmptySigma { depth: n });
    }
    let raw: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = raw.iter().sum();
    Ok(CylinderMeasure {
        kind,
        depth: n,
        words: level.entries.into_iter().map(|e| e.word).collect(),
        weights: raw.iter().map(|r| r / total).collect(),
        provenance: Provenance::GibbsPhi { s },
    })
}

/// `log φ^s` of a product whose rank is known structurally, so rounding
/// noise in a rank-one product cannot revive `α2`.
fn log_phi(m: &Mat2, rank: u8, s: f64) -> f64 {
    let (a1, a2) = match rank {
        0 => (0.0, 0.0),
        1 => (m.norm(), 0.0),
        _ => m.singular_values(),
    };
    log_svf_from_singular(a1, a2, s)
}

fn word_product(ifs: &AffineIfs, w: &Word) -> Product {
    let tol = ifs.tolerance();
    w.letters().iter().fold(Product::identity(), |p, &l| {
        let i = l as usize;
        p.extend(ifs.linear(i), ifs.rank(i), ifs.norm(i), tol)
    })
}

/// The depth-`n` surrogate of the Gibbs-type measure: weights proportional
/// to `‖A_𝚒‖^s` on `Σ_n`, for `s ∈ (0, 1]`.
pub fn gibbs_weights(ifs: &AffineIfs, s: f64, n: usize) -> Result<CylinderMeasure> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::invalid("pressure", format!("Gibbs weights need s in (0, 1], got {s}")));
    }
    if n == 0 {
        return Err(Error::invalid("pressure", "depth must be at least 1"));
    }
    phi_weights(ifs, SubshiftKind::Sigma, s, n)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MeasureDiagnostics {
    pub depth: usize,
    pub entropy_rate: f64,
    pub energy_rate: f64,
    pub pressure_upper: f64,
}

impl MeasureDiagnostics {
    /// `h_n + Λ_n ≤ (1/n) log Σ φ^s` up to `slack`.
    pub fn jensen_holds(&self, slack: f64) -> bool {
        let lhs = self.entropy_rate + self.energy_rate;
        lhs == f64::NEG_INFINITY || lhs <= self.pressure_upper + slack
    }
}

/// Entropy and energy rates of `mu` against the level sum of its own
/// subshift at the same depth.
pub fn measure_diagnostics(ifs: &AffineIfs, mu: &CylinderMeasure, s: f64) -> Result<MeasureDiagnostics> {
    let n = mu.depth;
    if n == 0 {
        return Err(Error::invalid("pressure", "depth must be at least 1"));
    }
    if let Some(w) = mu.words.iter().find(|w| w.len() != n) {
        return Err(Error::DepthMismatch {
            expected: n,
            found: w.len(),
        });
    }
    if mu.words.len() != mu.weights.len() {
        return Err(Error::invalid("pressure", "a measure needs one weight per word"));
    }
    if let Some(&l) = mu.words.iter().flat_map(|w| w.letters()).find(|&&l| l as usize >= ifs.len()) {
        return Err(Error::invalid("pressure", format!("letter {l} is outside the alphabet")));
    }
    let mut entropy = 0.0;
    let mut energy = 0.0;
    for (w, &p) in mu.words.iter().zip(&mu.weights) {
        if p <= 0.0 {
            continue;
        }
        entropy -= p * p.ln();
        energy += p * word_product(ifs, w).log_svf(s);
    }
    let scan = level_scan(ifs, mu.kind, s, n, DEFAULT_BUDGET)?;
    Ok(MeasureDiagnostics {
        depth: n,
        entropy_rate: entropy / n as f64,
        energy_rate: energy / n as f64,
        pressure_upper: scan.log_sums[n - 1] / n as f64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuasiRow {
    pub depth: usize,
    pub min: f64,
    pub max: f64,
}

/// Observed constants in `‖A_𝚒𝚓‖^s ≍ ‖A_𝚒‖^s ‖A_𝚓‖^s` over nonzero pairs of
/// `Σ_k`, for `k = 1..=n`. At most `max_pairs` pairs per level are checked,
/// taken with a fixed stride.
pub fn quasi_multiplicativity(ifs: &AffineIfs, s: f64, n: usize, max_pairs: usize) -> Result<Vec<QuasiRow>> {
    let mut rows = Vec::with_capacity(n);
    for k in 1..=n {
        let level = enumerate_level(ifs, SubshiftKind::Sigma, k, DEFAULT_BUDGET)?;
        let e = &level.entries;
        let total = e.len() * e.len();
        let stride = (total / max_pairs.max(1)).max(1);
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        let mut idx = 0;
        while idx < total {
            let (a, b) = (&e[idx / e.len()], &e[idx % e.len()]);
            let joint = (a.product * b.product).norm();
            if joint > 0.0 {
                let r = (joint / (a.product.norm() * b.product.norm())).powf(s);
                lo = lo.min(r);
                hi = hi.max(r);
            }
            idx += stride;
        }
        rows.push(QuasiRow { depth: k, min: lo, max: hi });
    }
    Ok(rows)
}

/// Number of nonzero words of `Γ_n`, counted without materializing them.
pub fn level_count(ifs: &AffineIfs, kind: SubshiftKind, n: usize) -> Result<u64> {
    let walk = TreeWalk::new(ifs, kind, n, DEFAULT_BUDGET, "pressure");
    let parts = walk.run(
        || 0u64,
        |c: &mut u64, node| {
            if node.product.rank() == 0 {
                return Visit::Prune;
            }
            if node.word.len() == n {
                *c += 1;
            }
            Visit::Descend
        },
    )?;
    Ok(parts.into_iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat2::Mat2;

    #[test]
    fn equal_similarities_give_uniform_weights() {
        let ifs = AffineIfs::from_matrices(&[Mat2::diag(0.5, 0.5), Mat2::rotation(1.0).scale(0.5)]).unwrap();
        let mu = gibbs_weights(&ifs, 0.7, 5).unwrap();
        assert_eq!(mu.weights.len(), 32);
        assert!(mu.weights.iter().all(|w| (w - 1.0 / 32.0).abs() < 1e-14));
    }

    #[test]
    fn sigma_example_weights() {
        let ifs = AffineIfs::from_matrices(&[Mat2::new(0.0, 1.0, 0.0, 0.0), Mat2::diag(0.0, 1.0)]).unwrap();
        let mu = gibbs_weights(&ifs, 1.0, 4).unwrap();
        let words: Vec<String> = mu.words.iter().map(|w| w.to_string()).collect();
        assert_eq!(words, ["0111", "1111"]);
        assert_eq!(mu.weights, vec![0.5, 0.5]);
    }

    #[test]
    fn empty_sigma_is_reported() {
        let ifs = AffineIfs::from_matrices(&[Mat2::new(0.0, 1.0, 0.0, 0.0)]).unwrap();
        assert_eq!(gibbs_weights(&ifs, 1.0, 3), Err(Error::EmptySigma { depth: 3 }));
    }

    #[test]
    fn uniform_entropy_and_point_mass() {
        let ifs = AffineIfs::from_matrices(&[Mat2::diag(0.5, 0.2), Mat2::diag(0.3, 0.4)]).unwrap();
        let mu = CylinderMeasure::uniform(2, 1).unwrap();
        let d = measure_diagnostics(&ifs, &mu, 1.0).unwrap();
        assert!((d.entropy_rate - 2f64.ln()).abs() < 1e-15);

        let w: Word = "0110".parse().unwrap();
        let point = CylinderMeasure::custom(SubshiftKind::Full, 4, vec![w.clone()], vec![1.0]).unwrap();
        let d = measure_diagnostics(&ifs, &point, 1.5).unwrap();
        assert_eq!(d.entropy_rate, 0.0);
        assert!((d.energy_rate - w.product(&ifs).svf(1.5).ln() / 4.0).abs() < 1e-14);
        assert!(d.jensen_holds(1e-9));
    }

    #[test]
    fn phi_weights_attain_jensen_equality() {
        let ifs = AffineIfs::from_matrices(&[Mat2::new(0.4, 0.1, 0.1, 0.3), Mat2::new(0.3, 0.1, 0.2, 0.4)]).unwrap();
        for s in [0.5, 1.3, 2.4] {
            let mu = phi_weights(&ifs, SubshiftKind::Full, s, 6).unwrap();
            let d = measure_diagnostics(&ifs, &mu, s).unwrap();
            let gap = d.pressure_upper - d.entropy_rate - d.energy_rate;
            assert!(gap.abs() < 1e-9, "s = {s}: {d:?}");
        }
    }

    #[test]
    fn depth_mismatch() {
        let ifs = AffineIfs::from_matrices(&[Mat2::diag(0.5, 0.2)]).unwrap();
        let mu = CylinderMeasure::custom(SubshiftKind::Full, 3, vec![Word::from_letters(vec![0, 0])], vec![1.0]).unwrap();
        assert_eq!(
            measure_diagnostics(&ifs, &mu, 1.0),
            Err(Error::DepthMismatch { expected: 3, found: 2 })
        );
    }

    #[test]
    fn quasi_constants_stay_bounded_for_positive_pair() {
        let ifs = AffineIfs::from_matrices(&[Mat2::new(0.4, 0.1, 0.1, 0.3), Mat2::new(0.3, 0.1, 0.2, 0.4)]).unwrap();
        let rows = quasi_multiplicativity(&ifs, 1.0, 6, 4096).unwrap();
        for r in rows {
            assert!(r.min > 0.3 && r.max <= 1.0 + 1e-12, "{r:?}");
        }
    }
}
