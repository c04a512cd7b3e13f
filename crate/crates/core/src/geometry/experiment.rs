//! Desk-scale numerical experiments around the dimension of `X′`.
//!
//! Nothing here is a proof. The report lists which hypotheses of each
//! scenario were certified by the other modules, which were assumed and
//! which could not be decided.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::boxdim::{box_dimension_seeded, BoxDimEstimate, ScaleRange};
use super::cloud::attractor_cloud_with_budget;
use super::projection::project_cloud;
use crate::classify::{classify, Domination, StrictAffinity, StrongIrreducibility};
use crate::error::{Error, Result};
use crate::ifs::AffineIfs;
use crate::mat2::{rank_one_factor, Direction};
use crate::pressure::{
    affinity_dimension, pressure_gap, AffdimConfig, AffinityBracket, Certificate, GapConfig, GapResult,
};
use crate::symbolic::{SubshiftKind, DEFAULT_BUDGET};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Scenario {
    PartOne,
    PartTwo,
    PartThree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum HypothesisStatus {
    Certified,
    Assumed,
    Unknown,
    Violated,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub status: HypothesisStatus,
    pub detail: String,
}

fn hypothesis(name: &str, status: HypothesisStatus, detail: impl Into<String>) -> Hypothesis {
    Hypothesis {
        name: name.into(),
        status,
        detail: detail.into(),
    }
}

fn certified_if(name: &str, ok: bool, detail: impl Into<String>) -> Hypothesis {
    let status = if ok {
        HypothesisStatus::Certified
    } else {
        HypothesisStatus::Violated
    };
    hypothesis(name, status, detail)
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub epsilon: f64,
    pub scales: ScaleRange,
    pub angles: usize,
    pub affdim_tol: f64,
    /// Node budget of each pressure evaluation inside the bisection.
    pub affdim_budget: u64,
    pub budget: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            // boxes coarser than 2^-5 see only a handful of pieces and
            // bend the fit
            epsilon: 1.0 / 8192.0,
            scales: ScaleRange { coarse: 5, fine: 11 },
            angles: 32,
            affdim_tol: 1e-2,
            affdim_budget: 4_000_000,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionRow {
    pub label: String,
    pub points: usize,
    pub slope: f64,
    pub stderr: f64,
}

impl DimensionRow {
    fn new(label: impl Into<String>, points: usize, est: &BoxDimEstimate) -> Self {
        Self {
            label: label.into(),
            points,
            slope: est.slope,
            stderr: est.stderr,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectionRow {
    pub angle: f64,
    /// The rank-one letter whose kernel complement this is, if any.
    pub letter: Option<usize>,
    pub slope: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "scenario", rename_all = "camelCase")]
pub enum Outcome {
    #[serde(rename_all = "camelCase")]
    PartOne {
        x_prime: DimensionRow,
        x: DimensionRow,
        bracket_invertible: AffinityBracket,
        projections: Vec<ProjectionRow>,
    },
    #[serde(rename_all = "camelCase")]
    PartTwo {
        translations: Vec<[f64; 2]>,
        x_prime: DimensionRow,
        x: DimensionRow,
        bracket_full: AffinityBracket,
        bracket_invertible: AffinityBracket,
        gap_exponent: f64,
        gap: GapResult,
    },
    #[serde(rename_all = "camelCase")]
    PartThree {
        x_prime: DimensionRow,
        bracket_invertible: AffinityBracket,
        projections: Vec<ProjectionRow>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub scenario: Scenario,
    pub seed: u64,
    pub epsilon: f64,
    pub hypotheses: Vec<Hypothesis>,
    pub outcome: Outcome,
}

/// Translations drawn uniformly from `[-1, 1]²`, one per map.
pub fn random_translations(letters: usize, seed: u64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..letters)
        .map(|_| [rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)])
        .collect()
}

pub fn theorem_experiment(ifs: &AffineIfs, scenario: Scenario, seed: u64) -> Result<ExperimentReport> {
    theorem_experiment_with(ifs, scenario, seed, &ExperimentConfig::default())
}

pub fn theorem_experiment_with(
    ifs: &AffineIfs,
    scenario: Scenario,
    seed: u64,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    ifs.require_contractive("geometry")?;
    let inv_letters = ifs.invertible_indices();
    if inv_letters.is_empty() {
        return Err(Error::MissingInvertible);
    }
    let ifs = match scenario {
        Scenario::PartTwo => ifs.with_translations(&random_translations(ifs.len(), seed))?,
        _ => ifs.clone(),
    };
    let affdim = AffdimConfig {
        tol: cfg.affdim_tol,
        budget: cfg.affdim_budget,
        ..Default::default()
    };
    let bracket_inv = certified_bracket(&ifs, SubshiftKind::Invertible, &affdim)?;
    let box_dim = |kind: SubshiftKind, label: &str| -> Result<DimensionRow> {
        let cloud = attractor_cloud_with_budget(&ifs, kind, cfg.epsilon, cfg.budget)?;
        let est = box_dimension_seeded(&cloud, cfg.scales, seed)?;
        Ok(DimensionRow::new(label, cloud.len(), &est))
    };

    let mut hyps = invertible_hypotheses(&ifs, &inv_letters)?;
    let outcome = match scenario {
        Scenario::PartOne => {
            hyps.push(bracket_hypothesis("dimaff(I) >= 1", &bracket_inv, true));
            let x_prime_cloud = attractor_cloud_with_budget(&ifs, SubshiftKind::Full, cfg.epsilon, cfg.budget)?;
            let est = box_dimension_seeded(&x_prime_cloud, cfg.scales, seed)?;
            let x_prime = DimensionRow::new("Xprime", x_prime_cloud.len(), &est);
            let projections = (0..cfg.angles)
                .map(|k| {
                    let dir = Direction::new(PI * k as f64 / cfg.angles as f64);
                    projection_row(&x_prime_cloud, dir, None, cfg.scales, seed)
                })
                .collect::<Result<Vec<_>>>()?;
            Outcome::PartOne {
                x_prime,
                x: box_dim(SubshiftKind::Invertible, "X")?,
                bracket_invertible: bracket_inv,
                projections,
            }
        }
        Scenario::PartTwo => {
            let max_norm = ifs.max_norm();
            hyps.push(certified_if(
                "max norm < 1/2",
                max_norm < 0.5,
                format!("largest norm {}", crate::fmt_g(max_norm)),
            ));
            hyps.push(rank_one_hypothesis(&ifs));
            hyps.push(dominated_or_irreducible(&ifs)?);
            hyps.push(bracket_hypothesis("dimaff(I) < 1", &bracket_inv, false));
            hyps.push(hypothesis(
                "generic translations",
                HypothesisStatus::Assumed,
                format!("drawn uniformly from [-1, 1]^2 with seed {seed}"),
            ));
            let bracket_full = certified_bracket(&ifs, SubshiftKind::Full, &affdim)?;
            let gap_exponent = bracket_inv.hi.min(1.0);
            let gap = if ifs.rank_one_indices().is_empty() {
                GapResult::Inconclusive {
                    lower_full: f64::NAN,
                    upper_inv: f64::NAN,
                    depth: 0,
                }
            } else {
                pressure_gap(
                    &ifs,
                    gap_exponent,
                    &GapConfig {
                        budget: cfg.budget,
                        max_depth: None,
                    },
                )?
            };
            Outcome::PartTwo {
                translations: ifs.maps().iter().map(|m| m.translation).collect(),
                x_prime: box_dim(SubshiftKind::Full, "Xprime")?,
                x: box_dim(SubshiftKind::Invertible, "X")?,
                bracket_full,
                bracket_invertible: bracket_inv,
                gap_exponent,
                gap,
            }
        }
        Scenario::PartThree => {
            hyps.push(rank_one_hypothesis(&ifs));
            hyps.push(bracket_hypothesis("dimaff(I) < 1", &bracket_inv, false));
            let cloud = attractor_cloud_with_budget(&ifs, SubshiftKind::Full, cfg.epsilon, cfg.budget)?;
            let est = box_dimension_seeded(&cloud, cfg.scales, seed)?;
            let projections = ifs
                .rank_one_indices()
                .into_iter()
                .map(|i| {
                    let form = rank_one_factor(ifs.linear(i), ifs.tolerance())?;
                    projection_row(&cloud, Direction::from_vector(form.w), Some(i), cfg.scales, seed)
                })
                .collect::<Result<Vec<_>>>()?;
            Outcome::PartThree {
                x_prime: DimensionRow::new("Xprime", cloud.len(), &est),
                bracket_invertible: bracket_inv,
                projections,
            }
        }
    };
    Ok(ExperimentReport {
        scenario,
        seed,
        epsilon: cfg.epsilon,
        hypotheses: hyps,
        outcome,
    })
}

/// The bisection bracket; when it stalls above the tolerance the certified
/// ends reached so far are still a valid, wider bracket.
fn certified_bracket(ifs: &AffineIfs, kind: SubshiftKind, cfg: &AffdimConfig) -> Result<AffinityBracket> {
    match affinity_dimension(ifs, kind, cfg) {
        Err(Error::InconclusiveBracket { lo, hi, depth }) => Ok(AffinityBracket {
            lo,
            hi,
            depth,
            certificate: Certificate::None,
        }),
        other => other,
    }
}

fn projection_row(
    cloud: &super::PointCloud,
    dir: Direction,
    letter: Option<usize>,
    scales: ScaleRange,
    seed: u64,
) -> Result<ProjectionRow> {
    let est = box_dimension_seeded(&project_cloud(cloud, dir).to_cloud(), scales, seed)?;
    Ok(ProjectionRow {
        angle: dir.angle(),
        letter,
        slope: est.slope,
        stderr: est.stderr,
    })
}

fn invertible_hypotheses(ifs: &AffineIfs, inv_letters: &[usize]) -> Result<Vec<Hypothesis>> {
    let inv = classify(&ifs.restrict(inv_letters)?)?;
    let strict = match &inv.strictly_affine {
        StrictAffinity::Witness { word } => {
            hypothesis("I strictly affine", HypothesisStatus::Certified, format!("proximal product {word}"))
        }
        StrictAffinity::Inconclusive { depth } => hypothesis(
            "I strictly affine",
            HypothesisStatus::Unknown,
            format!("no proximal product up to length {depth}"),
        ),
    };
    let strong = match (&inv.strongly_irreducible, inv.irreducible.is_irreducible()) {
        (StrongIrreducibility::Yes, _) => hypothesis("I strongly irreducible", HypothesisStatus::Certified, ""),
        (_, false) => hypothesis("I strongly irreducible", HypothesisStatus::Violated, "a common invariant line"),
        _ => hypothesis("I strongly irreducible", HypothesisStatus::Unknown, ""),
    };
    Ok(vec![
        strict,
        strong,
        hypothesis(
            "strong open set condition",
            HypothesisStatus::Unknown,
            "not checkable by this tool",
        ),
    ])
}

fn rank_one_hypothesis(ifs: &AffineIfs) -> Hypothesis {
    let r = ifs.rank_one_indices();
    certified_if("contains a rank-one letter", !r.is_empty(), format!("letters {r:?}"))
}

fn dominated_or_irreducible(ifs: &AffineIfs) -> Result<Hypothesis> {
    let c = classify(ifs)?;
    let name = "dominated or irreducible";
    Ok(match (&c.dominated, c.irreducible.is_irreducible()) {
        (Domination::Certified(cert), _) => hypothesis(
            name,
            HypothesisStatus::Certified,
            format!("dominated with kappa {}", crate::fmt_g(cert.kappa)),
        ),
        (_, true) => hypothesis(name, HypothesisStatus::Certified, "irreducible"),
        _ => hypothesis(name, HypothesisStatus::Unknown, "reducible, no multicone found"),
    })
}

/// `at_least`: the bracket must lie in `[1, ∞)`; otherwise in `[0, 1)`.
fn bracket_hypothesis(name: &str, b: &AffinityBracket, at_least: bool) -> Hypothesis {
    let detail = format!("bracket [{}, {}]", crate::fmt_g(b.lo), crate::fmt_g(b.hi));
    let (holds, fails) = if at_least {
        (b.lo >= 1.0, b.hi < 1.0)
    } else {
        (b.hi < 1.0, b.lo >= 1.0)
    };
    let status = if holds {
        HypothesisStatus::Certified
    } else if fails {
        HypothesisStatus::Violated
    } else {
        HypothesisStatus::Unknown
    };
    hypothesis(name, status, detail)
}
