//! Joint spectral radius brackets and the search for proximal products.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::AffineIfs;
use crate::mat2::is_proximal;
use crate::symbolic::{SubshiftKind, TreeWalk, Visit, Word};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JsrBounds {
    pub lower: f64,
    pub upper: f64,
    pub depth: usize,
}

/// `lower ≤ ϱ ≤ upper` from all products of length at most `n`.
///
/// Per level `k` the walk keeps the largest log-norm and log-spectral
/// radius; `upper = min_k (max ‖A_𝚒‖)^{1/k}` and
/// `lower = max_k (max ρ(A_𝚒))^{1/k}`.
pub fn jsr_bounds(ifs: &AffineIfs, n: usize, budget: u64) -> Result<JsrBounds> {
    if n == 0 {
        return Err(Error::invalid("classify", "jsr depth must be at least 1"));
    }
    let tol = *ifs.tolerance();
    let walk = TreeWalk::new(ifs, SubshiftKind::Full, n, budget, "classify");
    let shards = walk.run(
        || (vec![f64::NEG_INFINITY; n], vec![f64::NEG_INFINITY; n]),
        |(norms, radii): &mut (Vec<f64>, Vec<f64>), node| {
            let k = node.word.len() - 1;
            if node.product.rank() == 0 {
                return Visit::Prune;
            }
            norms[k] = norms[k].max(node.product.log_norm());
            radii[k] = radii[k].max(node.product.log_eigen_moduli(&tol).0);
            Visit::Descend
        },
    )?;
    let mut norms = vec![f64::NEG_INFINITY; n];
    let mut radii = vec![f64::NEG_INFINITY; n];
    for (sn, sr) in shards {
        for k in 0..n {
            norms[k] = norms[k].max(sn[k]);
            radii[k] = radii[k].max(sr[k]);
        }
    }
    let upper = (0..n)
        .map(|k| (norms[k] / (k + 1) as f64).exp())
        .fold(f64::INFINITY, f64::min);
    let lower = (0..n).map(|k| (radii[k] / (k + 1) as f64).exp()).fold(0.0, f64::max);
    // no clamp: both ends stay monotone in n, and ρ ≤ ‖·‖ holds up to rounding
    Ok(JsrBounds {
        lower,
        upper,
        depth: n,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase", rename_all_fields = "camelCase")]
pub enum StrictAffinity {
    Witness { word: Word },
    Inconclusive { depth: usize },
}

/// Shortest (then lexicographically first) product of invertible letters
/// that is proximal, searching lengths `1..=max_depth`.
pub fn is_strictly_affine(ifs: &AffineIfs, max_depth: usize, budget: u64) -> Result<StrictAffinity> {
    if ifs.invertible_indices().is_empty() {
        return Err(Error::NoInvertibleLetters { module: "classify" });
    }
    let tol = *ifs.tolerance();
    for depth in 1..=max_depth {
        let walk = TreeWalk::new(ifs, SubshiftKind::Invertible, depth, budget, "classify");
        let mut found: Option<Vec<u8>> = None;
        walk.run_serial(&mut found, |found: &mut Option<Vec<u8>>, node| {
            if found.is_some() {
                return Visit::Prune;
            }
            if node.word.len() == depth && is_proximal(node.product.normalized(), &tol).unwrap_or(false) {
                *found = Some(node.word.to_vec());
            }
            Visit::Descend
        })?;
        if let Some(w) = found {
            return Ok(StrictAffinity::Witness {
                word: Word::from_letters(w),
            });
        }
    }
    Ok(StrictAffinity::Inconclusive { depth: max_depth })
}
