//! Structural classification of a matrix tuple.

mod domination;
mod irreducible;
mod jsr;

pub use domination::{
    cone_ratio, find_domination_certificate, verify_certificate, AngleInterval, Domination, DominationCertificate,
    DominationSearch, Multicone,
};
pub use irreducible::{delta_lower_bound, is_irreducible, Irreducibility, ANGLE_TOLERANCE};
pub use jsr::{is_strictly_affine, jsr_bounds, JsrBounds, StrictAffinity};

use serde::Serialize;

use crate::error::Result;
use crate::ifs::AffineIfs;
use crate::symbolic::{find_zero_product, has_infinite_nonzero_word, NonzeroWordVerdict, ZeroProductSearch, DEFAULT_BUDGET};

/// A predicted boolean property, `None` when no prediction is available.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub value: Option<bool>,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StrongIrreducibility {
    Yes,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TupleClassification {
    pub rank_profile: Vec<u8>,
    pub contains_rank_one: bool,
    pub contains_invertible: bool,
    pub conformal: bool,
    pub irreducible: Irreducibility,
    pub dominated: Domination,
    pub strongly_irreducible: StrongIrreducibility,
    pub strictly_affine: StrictAffinity,
    pub nonzero_word: NonzeroWordVerdict,
    pub zero_product: ZeroProductSearch,
    pub jsr: JsrBounds,
    pub continuity_at_zero: Prediction,
    pub continuity_at_one: Prediction,
}

#[derive(Clone, Debug)]
pub struct ClassifyConfig {
    pub domination: DominationSearch,
    pub proximal_depth: usize,
    pub jsr_depth: usize,
    pub nonzero_depth: usize,
    pub zero_search_states: usize,
    pub budget: u64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            domination: DominationSearch::default(),
            proximal_depth: 8,
            jsr_depth: 8,
            nonzero_depth: 64,
            zero_search_states: 4096,
            budget: DEFAULT_BUDGET,
        }
    }
}

pub fn classify(ifs: &AffineIfs) -> Result<TupleClassification> {
    classify_with(ifs, &ClassifyConfig::default())
}

pub fn classify_with(ifs: &AffineIfs, cfg: &ClassifyConfig) -> Result<TupleClassification> {
    let tol = ifs.tolerance();
    let ranks = ifs.ranks().to_vec();
    let contains_rank_one = ranks.contains(&1);
    let contains_invertible = ranks.contains(&2);
    let conformal = ifs.matrices().iter().all(|m| m.is_conformal(tol));

    let irreducible = is_irreducible(ifs);
    let dominated = match find_domination_certificate(ifs, &cfg.domination) {
        Ok(d) => d,
        Err(e) if e.is_budget() => return Err(e),
        Err(e) => Domination::Inconclusive { reason: e.to_string() },
    };
    let all_invertible = ranks.iter().all(|&r| r == 2);
    let strongly_irreducible = if dominated.certificate().is_some() && irreducible.is_irreducible() && all_invertible {
        StrongIrreducibility::Yes
    } else {
        StrongIrreducibility::Inconclusive
    };
    let strictly_affine = if contains_invertible {
        let inv = ifs.restrict(&ifs.invertible_indices())?;
        is_strictly_affine(&inv, cfg.proximal_depth, cfg.budget)?
    } else {
        StrictAffinity::Inconclusive { depth: 0 }
    };
    let strictly_affine = remap_witness(strictly_affine, &ifs.invertible_indices());
    let nonzero_word = has_infinite_nonzero_word(ifs, cfg.nonzero_depth);
    let zero_product = find_zero_product(ifs, cfg.zero_search_states);
    let jsr = jsr_bounds(ifs, cfg.jsr_depth, cfg.budget)?;

    let continuity_at_zero = match &zero_product {
        // products of dominated letters map the cone into itself and never vanish
        ZeroProductSearch::Inconclusive { .. } if dominated.certificate().is_some() => Prediction {
            value: Some(true),
            reason: "dominated, so no finite product is zero".into(),
        },
        ZeroProductSearch::Found { word: w } => Prediction {
            value: Some(false),
            reason: format!("the product of {w} is zero"),
        },
        ZeroProductSearch::NoneExists => Prediction {
            value: Some(true),
            reason: "no finite product is zero".into(),
        },
        ZeroProductSearch::Inconclusive { states } => Prediction {
            value: None,
            reason: format!("zero-product search stopped after {states} line states"),
        },
    };
    let continuity_at_one = if dominated.certificate().is_some() || irreducible.is_irreducible() {
        let why = if dominated.certificate().is_some() { "dominated" } else { "irreducible" };
        Prediction {
            value: Some(!contains_rank_one),
            reason: if contains_rank_one {
                format!("{why} with a rank-one letter")
            } else {
                format!("{why} without rank-one letters")
            },
        }
    } else {
        Prediction {
            value: None,
            reason: "prediction unavailable: neither domination nor irreducibility established".into(),
        }
    };

    Ok(TupleClassification {
        rank_profile: ranks,
        contains_rank_one,
        contains_invertible,
        conformal,
        irreducible,
        dominated,
        strongly_irreducible,
        strictly_affine,
        nonzero_word,
        zero_product,
        jsr,
        continuity_at_zero,
        continuity_at_one,
    })
}

/// Witness words of the restricted tuple use its own letters; map them back.
fn remap_witness(s: StrictAffinity, letters: &[usize]) -> StrictAffinity {
    match s {
        StrictAffinity::Witness { word } => StrictAffinity::Witness {
            word: word.letters().iter().map(|&l| letters[l as usize] as u8).collect::<Vec<u8>>().into(),
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat2::Mat2;

    #[test]
    fn positive_pair_with_rank_one_letter() {
        let ifs = AffineIfs::from_matrices(&[
            Mat2::new(0.4, 0.1, 0.1, 0.3),
            Mat2::new(0.3, 0.1, 0.2, 0.4),
            Mat2::new(0.2, 0.2, 0.2, 0.2),
        ])
        .unwrap();
        let c = classify(&ifs).unwrap();
        assert!(c.contains_rank_one);
        assert!(c.dominated.certificate().is_some());
        assert_eq!(c.continuity_at_one.value, Some(false));
        assert_eq!(c.continuity_at_zero.value, Some(true));
        assert_eq!(c.strongly_irreducible, StrongIrreducibility::Inconclusive);
    }

    #[test]
    fn invertible_irreducible_is_continuous_at_one() {
        let ifs = AffineIfs::from_matrices(&[Mat2::rotation(1.0).scale(0.5), Mat2::diag(0.5, 0.2)]).unwrap();
        let c = classify(&ifs).unwrap();
        assert_eq!(c.continuity_at_one.value, Some(true));
        assert_eq!(c.continuity_at_zero.value, Some(true));
    }

    #[test]
    fn nilpotent_is_discontinuous_at_zero() {
        let ifs = AffineIfs::from_matrices(&[Mat2::new(0.0, 1.0, 0.0, 0.0)]).unwrap();
        let c = classify(&ifs).unwrap();
        assert_eq!(c.continuity_at_zero.value, Some(false));
        assert_eq!(c.nonzero_word, NonzeroWordVerdict::No { depth: 2 });
    }

    #[test]
    fn zero_letter_is_discontinuous_at_zero() {
        let ifs = AffineIfs::from_matrices(&[Mat2::ZERO, Mat2::diag(0.5, 0.3)]).unwrap();
        let c = classify(&ifs).unwrap();
        assert_eq!(c.continuity_at_zero.value, Some(false));
        assert!(c.dominated.certificate().is_none());
        match c.strictly_affine {
            StrictAffinity::Witness { word } => assert_eq!(word.letters(), &[1]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dominated_irreducible_invertible_is_strongly_irreducible() {
        let ifs = AffineIfs::from_matrices(&[Mat2::new(0.4, 0.1, 0.1, 0.3), Mat2::new(0.3, 0.1, 0.2, 0.4)]).unwrap();
        let c = classify(&ifs).unwrap();
        assert!(c.irreducible.is_irreducible());
        assert_eq!(c.strongly_irreducible, StrongIrreducibility::Yes);
    }
}
