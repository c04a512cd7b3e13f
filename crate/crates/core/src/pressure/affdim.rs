//! Affinity dimension by certified bisection, and the pressure gap between
//! the full tuple and its invertible letters.

use serde::Serialize;

use super::estimate::{pressure_estimate_with_budget, Certificate, PressureEstimate};
use crate::classify::{find_domination_certificate, Domination, DominationCertificate, DominationSearch};
use crate::error::{Error, Result};
use crate::ifs::AffineIfs;
use crate::symbolic::{SubshiftKind, DEFAULT_BUDGET};

#[derive(Clone, Debug)]
pub struct AffdimConfig {
    pub tol: f64,
    pub budget: u64,
    pub start_depth: usize,
    /// Deepest level tried; `None` derives it from the budget.
    pub max_depth: Option<usize>,
}

impl Default for AffdimConfig {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            budget: DEFAULT_BUDGET,
            start_depth: 4,
            max_depth: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AffinityBracket {
    pub lo: f64,
    pub hi: f64,
    pub depth: usize,
    pub certificate: Certificate,
}

impl AffinityBracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Largest depth whose tree fits the budget, `#letters^n ≤ budget / 2`.
pub(crate) fn depth_for_budget(letters: usize, budget: u64, cap: usize) -> usize {
    if letters <= 1 {
        return cap;
    }
    let n = ((budget as f64 / 2.0).ln() / (letters as f64).ln()).floor() as usize;
    n.clamp(1, cap)
}

/// A domination certificate for the tuple, searched for the largest κ;
/// `None` when the tuple has a zero letter or none is found.
pub(crate) fn auto_certificate(ifs: &AffineIfs) -> Option<DominationCertificate> {
    let search = DominationSearch {
        best_kappa: true,
        ..Default::default()
    };
    match find_domination_certificate(ifs, &search) {
        Ok(Domination::Certified(c)) => Some(c),
        _ => None,
    }
}

/// Bracket `[lo, hi]` around `inf{s ≥ 0 : P(Γ, A, s) ≤ 0}`.
///
/// `lo` is 0 or carries a certified `P(lo) > 0`, `hi` a certified
/// `P(hi) ≤ 0`;
/// since the pressure of a contraction is strictly decreasing this pins the
/// dimension. Depth doubles while the bounds at the midpoint straddle 0.
pub fn affinity_dimension(ifs: &AffineIfs, kind: SubshiftKind, cfg: &AffdimConfig) -> Result<AffinityBracket> {
    ifs.require_contractive("pressure")?;
    if !(cfg.tol > 0.0) {
        return Err(Error::invalid("pressure", "bisection tolerance must be positive"));
    }
    let letters = match kind {
        SubshiftKind::Full => ifs.len(),
        SubshiftKind::Sigma => ifs.len() - ifs.ranks().iter().filter(|&&r| r == 0).count(),
        SubshiftKind::Invertible => ifs.invertible_indices().len(),
    };
    let max_depth = cfg
        .max_depth
        .unwrap_or_else(|| depth_for_budget(letters, cfg.budget, 30))
        .max(1);
    let cert = auto_certificate(ifs);
    let eval = |s: f64, depth: usize| -> Result<PressureEstimate> {
        pressure_estimate_with_budget(ifs, kind, s, depth, cert.as_ref(), cfg.budget)
    };

    let mut depth = cfg.start_depth.clamp(1, max_depth);
    let p0 = eval(0.0, depth)?;
    if p0.upper <= 0.0 {
        return Ok(AffinityBracket {
            lo: 0.0,
            hi: 0.0,
            depth,
            certificate: p0.certificate,
        });
    }

    // an upper end with certified non-positive pressure
    let mut hi = 4.0;
    loop {
        let p = eval(hi, depth)?;
        if p.upper <= 0.0 {
            break;
        }
        if hi >= 64.0 {
            return Err(Error::InconclusiveBracket { lo: 0.0, hi, depth });
        }
        hi *= 2.0;
    }

    // dimaff ≥ 0 always, so 0 is a valid left end without certification
    let mut lo = 0.0;
    let mut lo_cert = p0.certificate;

    while hi - lo > cfg.tol {
        let mid = 0.5 * (lo + hi);
        let mut p = eval(mid, depth)?;
        while p.lower <= 0.0 && p.upper > 0.0 && depth < max_depth {
            depth = (depth * 2).min(max_depth);
            p = eval(mid, depth)?;
        }
        if p.lower > 0.0 {
            lo = mid;
            lo_cert = p.certificate;
        } else if p.upper <= 0.0 {
            hi = mid;
        } else {
            // undecided at the deepest level: tighten each side separately
            let (l, lc) = frontier(&eval, lo, mid, depth, cfg.tol / 8.0, true)?;
            let (h, _) = frontier(&eval, mid, hi, depth, cfg.tol / 8.0, false)?;
            if let Some(c) = lc {
                lo_cert = c;
            }
            lo = l;
            hi = h;
            if hi - lo > cfg.tol {
                return Err(Error::InconclusiveBracket { lo, hi, depth });
            }
            break;
        }
    }
    Ok(AffinityBracket {
        lo,
        hi,
        depth,
        certificate: lo_cert,
    })
}

/// Move the certified end of `[a, b]` as far towards the other end as the
/// bounds allow. `positive` searches the largest `s` with `lower > 0`
/// starting from `a`; otherwise the smallest `s` with `upper ≤ 0` from `b`.
fn frontier<F>(eval: &F, a: f64, b: f64, depth: usize, step: f64, positive: bool) -> Result<(f64, Option<Certificate>)>
where
    F: Fn(f64, usize) -> Result<PressureEstimate>,
{
    let (mut good, mut bad) = if positive { (a, b) } else { (b, a) };
    let mut cert = None;
    while (bad - good).abs() > step {
        let mid = 0.5 * (good + bad);
        let p = eval(mid, depth)?;
        let ok = if positive { p.lower > 0.0 } else { p.upper <= 0.0 };
        if ok {
            good = mid;
            cert = Some(p.certificate);
        } else {
            bad = mid;
        }
    }
    Ok((good, cert))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "camelCase")]
pub enum GapResult {
    #[serde(rename_all = "camelCase")]
    CertifiedGap {
        lower_full: f64,
        upper_inv: f64,
        depth: usize,
        certificate: Certificate,
    },
    #[serde(rename_all = "camelCase")]
    Inconclusive {
        lower_full: f64,
        upper_inv: f64,
        depth: usize,
    },
}

impl GapResult {
    pub fn is_certified(&self) -> bool {
        matches!(self, GapResult::CertifiedGap { .. })
    }
}

#[derive(Clone, Debug)]
pub struct GapConfig {
    pub budget: u64,
    pub max_depth: Option<usize>,
}

impl Default for GapConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            max_depth: None,
        }
    }
}

/// Certify `P(I^ℕ, A, s) < P(A, s)` for `s ∈ [0, 1]` by separating a
/// certified lower bound for the full tuple from an upper bound for the
/// invertible letters, at depths 2, 4, 6, … up to the budget.
pub fn pressure_gap(ifs: &AffineIfs, s: f64, cfg: &GapConfig) -> Result<GapResult> {
    if ifs.rank_one_indices().is_empty() {
        return Err(Error::MissingRankOne);
    }
    if ifs.invertible_indices().is_empty() {
        return Err(Error::MissingInvertible);
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::invalid("pressure", format!("gap exponent must lie in [0, 1], got {s}")));
    }
    if s == 0.0 {
        let lower_full = (ifs.len() as f64).ln();
        let upper_inv = (ifs.invertible_indices().len() as f64).ln();
        return Ok(GapResult::CertifiedGap {
            lower_full,
            upper_inv,
            depth: 1,
            certificate: Certificate::Exact,
        });
    }
    let max_depth = cfg
        .max_depth
        .unwrap_or_else(|| depth_for_budget(ifs.len(), cfg.budget, 24));
    let cert = auto_certificate(ifs);
    let inv = ifs.restrict(&ifs.invertible_indices())?;
    let inv_depth = depth_for_budget(inv.len(), cfg.budget, 40);
    let upper_inv = pressure_estimate_with_budget(&inv, SubshiftKind::Full, s, inv_depth, None, cfg.budget)?.upper;

    let mut depth = 2.min(max_depth);
    loop {
        let full = pressure_estimate_with_budget(ifs, SubshiftKind::Full, s, depth, cert.as_ref(), cfg.budget)?;
        if full.lower > upper_inv {
            return Ok(GapResult::CertifiedGap {
                lower_full: full.lower,
                upper_inv,
                depth,
                certificate: full.certificate,
            });
        }
        if depth >= max_depth {
            return Ok(GapResult::Inconclusive {
                lower_full: full.lower,
                upper_inv,
                depth,
            });
        }
        depth = (depth + 2).min(max_depth);
    }
}
