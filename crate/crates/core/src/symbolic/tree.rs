//! Depth-first walk over the prefix tree of finite words.
//!
//! Each node carries the product `A_𝚒` in a normalized form (unit-norm matrix
//! plus log-norm) so deep products neither underflow nor lose the rank
//! information needed by the singular value function, together with the
//! translation part `f_𝚒(0)`.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use super::automaton::SigmaLiveness;
use super::SubshiftKind;
use crate::error::{Error, Result};
use crate::ifs::AffineIfs;
use crate::mat2::{Mat2, RankTolerance};

/// A matrix product `A_𝚒 = e^{log_norm} · m` with `‖m‖ = 1`.
///
/// `log|det A_𝚒|` is accumulated letter by letter, which keeps the second
/// singular value accurate even when `m` is nearly singular.
#[derive(Clone, Copy, Debug)]
pub struct Product {
    m: Mat2,
    log_norm: f64,
    log_det: f64,
    rank: u8,
}

impl Product {
    pub fn identity() -> Self {
        Self {
            m: Mat2::IDENTITY,
            log_norm: 0.0,
            log_det: 0.0,
            rank: 2,
        }
    }

    pub fn zero() -> Self {
        Self {
            m: Mat2::ZERO,
            log_norm: f64::NEG_INFINITY,
            log_det: f64::NEG_INFINITY,
            rank: 0,
        }
    }

    /// `self · letter`.
    ///
    /// The product rank follows from the letter ranks: two invertible factors
    /// give an invertible product, anything else is rank one unless the new
    /// product norm collapses below `τ·‖letter‖` (then it is zero).
    pub fn extend(&self, letter: &Mat2, letter_rank: u8, letter_norm: f64, tol: &RankTolerance) -> Self {
        if self.rank == 0 || letter_rank == 0 {
            return Self::zero();
        }
        let p = self.m * *letter;
        let s1 = p.norm();
        let rank = if self.rank == 2 && letter_rank == 2 {
            2
        } else if s1 <= tol.relative * letter_norm || s1 == 0.0 {
            0
        } else {
            1
        };
        if rank == 0 {
            return Self::zero();
        }
        Self {
            m: p.scale(1.0 / s1),
            log_norm: self.log_norm + s1.ln(),
            log_det: if rank == 2 {
                self.log_det + letter.det().abs().ln()
            } else {
                f64::NEG_INFINITY
            },
            rank,
        }
    }

    pub fn rank(&self) -> u8 {
        self.rank
    }

    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    /// `log|det A_𝚒|`, `-inf` unless invertible.
    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    pub fn norm(&self) -> f64 {
        self.log_norm.exp()
    }

    /// `log α2(A_𝚒)`.
    pub fn log_second_singular(&self) -> f64 {
        (self.log_det - self.log_norm).min(self.log_norm)
    }

    /// Unit-norm representative (zero for the zero product).
    pub fn normalized(&self) -> &Mat2 {
        &self.m
    }

    pub fn matrix(&self) -> Mat2 {
        if self.rank == 0 {
            Mat2::ZERO
        } else {
            self.m.scale(self.log_norm.exp())
        }
    }

    /// `A_𝚒 x`.
    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        if self.rank == 0 {
            return [0.0, 0.0];
        }
        let k = self.log_norm.exp();
        let y = self.m.apply(x);
        [k * y[0], k * y[1]]
    }

    /// `log φ^s(A_𝚒)`, `-inf` where it vanishes.
    pub fn log_svf(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        if self.rank == 0 {
            return f64::NEG_INFINITY;
        }
        if s <= 1.0 {
            s * self.log_norm
        } else if s <= 2.0 {
            self.log_norm + (s - 1.0) * self.log_second_singular()
        } else {
            0.5 * s * self.log_det
        }
    }

    /// Logs of the eigenvalue moduli, largest first.
    pub fn log_eigen_moduli(&self, tol: &RankTolerance) -> (f64, f64) {
        match self.rank {
            0 => (f64::NEG_INFINITY, f64::NEG_INFINITY),
            1 => {
                let t = self.m.trace().abs();
                let t = if t <= tol.relative { 0.0 } else { t.min(1.0) };
                (self.log_norm + t.ln(), f64::NEG_INFINITY)
            }
            _ => {
                // ρ ≤ ‖·‖ = 1; near-repeated eigenvalues overshoot by √ulp
                let l1 = self.log_norm + self.m.eigen_moduli().0.min(1.0).ln();
                (l1, (self.log_det - l1).min(l1))
            }
        }
    }

    /// `lim (1/k) log φ^s(A_𝚒^k)`: the singular value function applied to
    /// eigenvalue moduli. `-inf` when `A_𝚒` is nilpotent, since then the
    /// periodic word dies.
    pub fn log_periodic_svf(&self, s: f64, tol: &RankTolerance) -> f64 {
        let (l1, l2) = self.log_eigen_moduli(tol);
        if l1 == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        if s == 0.0 {
            0.0
        } else if s <= 1.0 {
            s * l1
        } else if s <= 2.0 {
            l1 + (s - 1.0) * l2
        } else {
            0.5 * s * (l1 + l2)
        }
    }
}

/// What a node visitor wants next.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Visit {
    Descend,
    Prune,
}

/// The data handed to a visitor at each node.
pub struct NodeView<'a> {
    pub word: &'a [u8],
    pub product: &'a Product,
    /// `f_𝚒(0) = Σ_k A_{𝚒|k-1} v_{i_k}`.
    pub offset: [f64; 2],
}

/// Configuration of a walk over the words of a subshift.
pub struct TreeWalk<'a> {
    pub ifs: &'a AffineIfs,
    pub kind: SubshiftKind,
    pub max_depth: usize,
    pub budget: u64,
    pub module: &'static str,
}

const FLUSH: u64 = 1024;

impl<'a> TreeWalk<'a> {
    pub fn new(ifs: &'a AffineIfs, kind: SubshiftKind, max_depth: usize, budget: u64, module: &'static str) -> Self {
        Self {
            ifs,
            kind,
            max_depth,
            budget,
            module,
        }
    }

    fn letters(&self) -> Vec<u8> {
        (0..self.ifs.len())
            .filter(|&i| match self.kind {
                SubshiftKind::Full => true,
                SubshiftKind::Sigma => self.ifs.rank(i) > 0,
                SubshiftKind::Invertible => self.ifs.rank(i) == 2,
            })
            .map(|i| i as u8)
            .collect()
    }

    /// Walk the tree, one shard per first letter, in parallel.
    ///
    /// Zero products are reported (never expanded) only for the full shift.
    /// Returns one visitor state per shard, in letter order.
    pub fn run<S, M, V>(&self, make: M, visit: V) -> Result<Vec<S>>
    where
        S: Send,
        M: Fn() -> S + Sync,
        V: Fn(&mut S, &NodeView<'_>) -> Visit + Sync,
    {
        let letters = self.letters();
        let liveness = match self.kind {
            SubshiftKind::Sigma => Some(SigmaLiveness::new(self.ifs)),
            _ => None,
        };
        let used = AtomicU64::new(0);
        let ctx = Ctx {
            walk: self,
            letters: &letters,
            liveness: liveness.as_ref(),
            used: &used,
        };
        letters
            .par_iter()
            .map(|&j| {
                let mut state = make();
                let mut word = Vec::with_capacity(self.max_depth);
                let mut local = 0u64;
                if self.max_depth > 0 {
                    ctx.step(&mut word, &Product::identity(), [0.0, 0.0], j, &mut state, &visit, &mut local)?;
                }
                ctx.flush(&mut local)?;
                Ok(state)
            })
            .collect()
    }

    /// Single-threaded variant for callers that need one shared state.
    pub fn run_serial<S, V>(&self, state: &mut S, visit: V) -> Result<()>
    where
        V: Fn(&mut S, &NodeView<'_>) -> Visit,
    {
        let letters = self.letters();
        let liveness = match self.kind {
            SubshiftKind::Sigma => Some(SigmaLiveness::new(self.ifs)),
            _ => None,
        };
        let used = AtomicU64::new(0);
        let ctx = Ctx {
            walk: self,
            letters: &letters,
            liveness: liveness.as_ref(),
            used: &used,
        };
        let mut word = Vec::with_capacity(self.max_depth);
        let mut local = 0;
        if self.max_depth > 0 {
            for &j in &letters {
                ctx.step(&mut word, &Product::identity(), [0.0, 0.0], j, state, &visit, &mut local)?;
            }
        }
        ctx.flush(&mut local)
    }
}

struct Ctx<'w, 'a> {
    walk: &'w TreeWalk<'a>,
    letters: &'w [u8],
    liveness: Option<&'w SigmaLiveness>,
    used: &'w AtomicU64,
}

impl Ctx<'_, '_> {
    fn flush(&self, local: &mut u64) -> Result<()> {
        let total = self.used.fetch_add(*local, Ordering::Relaxed) + *local;
        *local = 0;
        if total > self.walk.budget {
            Err(Error::BudgetExceeded {
                module: self.walk.module,
                budget: self.walk.budget,
            })
        } else {
            Ok(())
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn step<S, V>(
        &self,
        word: &mut Vec<u8>,
        parent: &Product,
        parent_offset: [f64; 2],
        j: u8,
        state: &mut S,
        visit: &V,
        local: &mut u64,
    ) -> Result<()>
    where
        V: Fn(&mut S, &NodeView<'_>) -> Visit,
    {
        let ifs = self.walk.ifs;
        let idx = j as usize;
        let child = parent.extend(ifs.linear(idx), ifs.rank(idx), ifs.norm(idx), ifs.tolerance());
        if child.rank() == 0 && self.walk.kind != SubshiftKind::Full {
            return Ok(());
        }
        if let Some(live) = self.liveness {
            if !live.is_live(idx) {
                return Ok(());
            }
        }
        *local += 1;
        if *local >= FLUSH {
            self.flush(local)?;
        }
        let v = parent.apply(ifs.maps()[idx].translation);
        let offset = [parent_offset[0] + v[0], parent_offset[1] + v[1]];
        word.push(j);
        let next = visit(
            state,
            &NodeView {
                word,
                product: &child,
                offset,
            },
        );
        if next == Visit::Descend && child.rank() != 0 && word.len() < self.walk.max_depth {
            for &k in self.letters {
                self.step(word, &child, offset, k, state, visit, local)?;
            }
        }
        word.pop();
        Ok(())
    }
}
