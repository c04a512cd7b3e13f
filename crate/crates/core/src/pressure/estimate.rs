//! Certified bounds for `P(Γ, A, s)` at a finite depth.

use std::fmt;

use serde::Serialize;

use super::logsum::LogSum;
use crate::classify::{cone_ratio, is_irreducible, DominationCertificate, Irreducibility};
use crate::error::{Error, Result};
use crate::ifs::AffineIfs;
use crate::mat2::Direction;
use crate::symbolic::{SubshiftKind, TreeWalk, Visit, Word, DEFAULT_BUDGET};

/// Where the lower bound of an estimate comes from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "camelCase")]
pub enum Certificate {
    None,
    /// `φ^s(AB) ≥ κ² φ^s(A) φ^s(B)` from a dominating multicone.
    Domination { kappa: f64 },
    /// Every letter is a similarity, so `φ^s` is multiplicative.
    Conformal,
    /// Growth along the periodic word `𝚒^∞`.
    PeriodicOrbit { word: Word },
    /// A common invariant line makes the diagonal characters multiplicative.
    InvariantLine { angle: f64 },
    /// Closed form: counting at `s = 0`, determinants for `s ≥ 2`.
    Exact,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::None => f.write_str("none"),
            Certificate::Domination { kappa } => write!(f, "domination({})", crate::fmt_g(*kappa)),
            Certificate::Conformal => f.write_str("conformal"),
            Certificate::PeriodicOrbit { word } => write!(f, "periodic({word})"),
            Certificate::InvariantLine { .. } => f.write_str("invariant-line"),
            Certificate::Exact => f.write_str("exact"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PressureEstimate {
    pub s: f64,
    pub kind: SubshiftKind,
    pub depth: usize,
    pub upper: f64,
    pub lower: f64,
    pub certificate: Certificate,
    /// `log Σ_{Γ_k} φ^s(A_𝚒)` for `k = 1..=depth`.
    pub log_sums: Vec<f64>,
}

impl PressureEstimate {
    pub fn width(&self) -> f64 {
        if self.upper == self.lower {
            0.0
        } else {
            self.upper - self.lower
        }
    }
}

fn check_args(s: f64, n: usize) -> Result<()> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::invalid("pressure", format!("s must be a finite number ≥ 0, got {s}")));
    }
    if n == 0 {
        return Err(Error::invalid("pressure", "depth must be at least 1"));
    }
    Ok(())
}

fn kind_letters(ifs: &AffineIfs, kind: SubshiftKind) -> Vec<usize> {
    (0..ifs.len())
        .filter(|&i| match kind {
            SubshiftKind::Full => true,
            SubshiftKind::Sigma => ifs.rank(i) > 0,
            SubshiftKind::Invertible => ifs.rank(i) == 2,
        })
        .collect()
}

/// Bounds on `P(Γ, A, s)` from the words of length at most `n`, with the
/// default node budget.
pub fn pressure_estimate(
    ifs: &AffineIfs,
    kind: SubshiftKind,
    s: f64,
    n: usize,
    cert: Option<&DominationCertificate>,
) -> Result<PressureEstimate> {
    pressure_estimate_with_budget(ifs, kind, s, n, cert, DEFAULT_BUDGET)
}

pub fn pressure_estimate_with_budget(
    ifs: &AffineIfs,
    kind: SubshiftKind,
    s: f64,
    n: usize,
    cert: Option<&DominationCertificate>,
    budget: u64,
) -> Result<PressureEstimate> {
    check_args(s, n)?;
    if let Some(c) = cert {
        spot_check(ifs, c)?;
    }
    if let Some(v) = closed_form(ifs, kind, s) {
        return Ok(PressureEstimate {
            s,
            kind,
            depth: n,
            upper: v,
            lower: v,
            certificate: Certificate::Exact,
            log_sums: (1..=n).map(|k| if v == f64::NEG_INFINITY { v } else { k as f64 * v }).collect(),
        });
    }

    let scan = level_scan(ifs, kind, s, n, budget)?;
    let upper = scan
        .log_sums
        .iter()
        .enumerate()
        .map(|(k, &z)| z / (k + 1) as f64)
        .fold(f64::INFINITY, f64::min);
    if upper == f64::NEG_INFINITY {
        return Ok(PressureEstimate {
            s,
            kind,
            depth: n,
            upper,
            lower: upper,
            certificate: Certificate::None,
            log_sums: scan.log_sums,
        });
    }

    let mut lower = f64::NEG_INFINITY;
    let mut certificate = Certificate::None;
    let mut offer = |value: f64, c: Certificate| {
        // nothing beats an exact bound; rounding must not steal its label
        let value = value.min(upper);
        if value > lower {
            lower = value;
            certificate = c;
        }
    };

    let letters = kind_letters(ifs, kind);
    if letters.iter().all(|&i| ifs.linear(i).is_conformal(ifs.tolerance())) {
        offer(upper, Certificate::Conformal);
    }
    if let Some(c) = cert {
        let two_log_kappa = 2.0 * c.kappa.ln();
        let best = scan
            .log_sums
            .iter()
            .enumerate()
            .map(|(k, &z)| (z + two_log_kappa) / (k + 1) as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        offer(best, Certificate::Domination { kappa: c.kappa });
    }
    if !(kind == SubshiftKind::Sigma && s == 0.0) {
        if let Irreducibility::No { common_line } = is_irreducible(ifs) {
            let pool = match kind {
                SubshiftKind::Invertible => letters.clone(),
                _ => (0..ifs.len()).collect(),
            };
            offer(
                invariant_line_bound(ifs, &pool, s, &common_line),
                Certificate::InvariantLine {
                    angle: common_line.angle(),
                },
            );
        }
    }
    if let Some(word) = scan.periodic_word {
        offer(
            scan.periodic,
            Certificate::PeriodicOrbit {
                word: Word::from_letters(word),
            },
        );
    }

    Ok(PressureEstimate {
        s,
        kind,
        depth: n,
        upper,
        lower: lower.min(upper),
        certificate,
        log_sums: scan.log_sums,
    })
}

/// Route by exponent: counting at `s = 0`, the nonzero-product shift on
/// `(0, 1]`, the invertible letters beyond 1.
pub fn pressure_dispatch(ifs: &AffineIfs, s: f64, n: usize) -> Result<PressureEstimate> {
    pressure_dispatch_with(ifs, s, n, None, DEFAULT_BUDGET)
}

pub fn pressure_dispatch_with(
    ifs: &AffineIfs,
    s: f64,
    n: usize,
    cert: Option<&DominationCertificate>,
    budget: u64,
) -> Result<PressureEstimate> {
    check_args(s, n)?;
    pressure_estimate_with_budget(ifs, dispatch_kind(s), s, n, cert, budget)
}

pub fn dispatch_kind(s: f64) -> SubshiftKind {
    if s == 0.0 {
        SubshiftKind::Full
    } else if s <= 1.0 {
        SubshiftKind::Sigma
    } else {
        SubshiftKind::Invertible
    }
}

/// `log #letters` at `s = 0` (not for Σ, whose entropy has no closed
/// form), and `log Σ_{i∈I} |det A_i|^{s/2}` for `s ≥ 2`, where `φ^s` is
/// multiplicative and non-invertible products vanish.
fn closed_form(ifs: &AffineIfs, kind: SubshiftKind, s: f64) -> Option<f64> {
    if s == 0.0 && kind != SubshiftKind::Sigma {
        let count = kind_letters(ifs, kind).len();
        return Some(if count == 0 { f64::NEG_INFINITY } else { (count as f64).ln() });
    }
    if s >= 2.0 {
        let mut acc = LogSum::new();
        for i in ifs.invertible_indices() {
            acc.add(0.5 * s * ifs.linear(i).det().abs().ln());
        }
        return Some(acc.value());
    }
    None
}

/// The characters `χ1 = ⟨A u, u⟩` on the invariant line and `χ2 = ⟨A w, w⟩`
/// on the quotient are multiplicative along words and bound `α1` from
/// below.
fn invariant_line_bound(ifs: &AffineIfs, letters: &[usize], s: f64, line: &Direction) -> f64 {
    let u = line.unit();
    let w = line.perpendicular().unit();
    let mut best = f64::NEG_INFINITY;
    for basis in [u, w] {
        let mut acc = LogSum::new();
        for &i in letters {
            let m = ifs.linear(i);
            let y = m.apply(basis);
            let chi = (y[0] * basis[0] + y[1] * basis[1]).abs();
            // the unit vectors carry rounding, so a vanishing character can
            // come out as ~1e-17·‖A‖
            let chi = if chi <= ifs.tolerance().relative * ifs.norm(i) { 0.0 } else { chi };
            let term = if s <= 1.0 {
                if s == 0.0 {
                    0.0
                } else {
                    s * chi.ln()
                }
            } else {
                (2.0 - s) * chi.ln() + (s - 1.0) * m.det().abs().ln()
            };
            acc.add(term);
        }
        best = best.max(acc.value());
    }
    best
}

fn spot_check(ifs: &AffineIfs, c: &DominationCertificate) -> Result<()> {
    if !(c.kappa > 0.0 && c.kappa <= 1.0) {
        return Err(Error::InvalidCertificate(format!("kappa {} is not in (0, 1]", c.kappa)));
    }
    if ifs.ranks().contains(&0) {
        return Err(Error::InvalidCertificate("the tuple has a zero letter".into()));
    }
    if !c.multicone.is_strictly_invariant(&ifs.matrices(), ifs.ranks(), 0.0) {
        return Err(Error::InvalidCertificate("multicone is not strictly invariant".into()));
    }
    let ratio = cone_ratio(ifs, &c.multicone, 2)?;
    if ratio < c.kappa {
        return Err(Error::InvalidCertificate(format!(
            "cone ratio {ratio} falls below kappa {}",
            c.kappa
        )));
    }
    Ok(())
}

pub(crate) struct LevelScan {
    pub log_sums: Vec<f64>,
    pub periodic: f64,
    pub periodic_word: Option<Vec<u8>>,
}

struct Shard {
    sums: Vec<LogSum>,
    periodic: f64,
    word: Option<Vec<u8>>,
}

/// One walk over `Γ_1, …, Γ_n` collecting the level sums and the best
/// periodic-orbit rate.
pub(crate) fn level_scan(ifs: &AffineIfs, kind: SubshiftKind, s: f64, n: usize, budget: u64) -> Result<LevelScan> {
    let tol = *ifs.tolerance();
    let ln_letters = (ifs.len() as f64).ln();
    let walk = TreeWalk::new(ifs, kind, n, budget, "pressure");
    let shards = walk.run(
        || Shard {
            sums: vec![LogSum::new(); n],
            periodic: f64::NEG_INFINITY,
            word: None,
        },
        |st: &mut Shard, node| {
            let d = node.word.len();
            if node.product.rank() == 0 {
                // at s = 0 every extension of a dead prefix still counts once
                if s == 0.0 {
                    for k in d..=n {
                        st.sums[k - 1].add((k - d) as f64 * ln_letters);
                    }
                }
                return Visit::Prune;
            }
            st.sums[d - 1].add(node.product.log_svf(s));
            let p = node.product.log_periodic_svf(s, &tol) / d as f64;
            if p > st.periodic {
                st.periodic = p;
                st.word = Some(node.word.to_vec());
            }
            Visit::Descend
        },
    )?;
    let mut sums = vec![LogSum::new(); n];
    let mut periodic = f64::NEG_INFINITY;
    let mut periodic_word = None;
    for sh in shards {
        for (acc, part) in sums.iter_mut().zip(&sh.sums) {
            acc.merge(part);
        }
        if sh.periodic > periodic {
            periodic = sh.periodic;
            periodic_word = sh.word;
        }
    }
    Ok(LevelScan {
        log_sums: sums.iter().map(LogSum::value).collect(),
        periodic,
        periodic_word,
    })
}
