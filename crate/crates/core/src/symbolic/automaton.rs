//! Finite certificates about which products vanish.
//!
//! For a tuple with no invertible letter every letter has rank at most one,
//! and for rank-one matrices `A_k A_j ≠ 0` depends only on the pair `(k, j)`:
//! a product is nonzero iff every consecutive pair is. The set of infinite
//! nonzero words is then the set of infinite walks in a graph on letters.
//!
//! Once an invertible letter is present every nonzero product extends
//! forever, but the semigroup can still contain zero. Finding one is a search
//! over the coimage lines of rank-one products, which evolve under the
//! transposed invertible letters.

use std::collections::VecDeque;

use serde::Serialize;

use super::Word;
use crate::ifs::AffineIfs;
use crate::mat2::{Direction, Mat2};

/// Adjacency `k → j` iff `A_k A_j ≠ 0`, for the nonzero letters.
fn letter_graph(ifs: &AffineIfs) -> Vec<Vec<usize>> {
    let tol = ifs.tolerance();
    let n = ifs.len();
    (0..n)
        .map(|k| {
            if ifs.rank(k) == 0 {
                return Vec::new();
            }
            (0..n)
                .filter(|&j| {
                    if ifs.rank(j) == 0 {
                        return false;
                    }
                    let p = *ifs.linear(k) * *ifs.linear(j);
                    p.norm() > tol.relative * ifs.norm(k) * ifs.norm(j)
                })
                .collect()
        })
        .collect()
}

/// Which last letters leave a nonzero prefix extendable to an infinite
/// nonzero word.
#[derive(Clone, Debug)]
pub struct SigmaLiveness {
    all_live: bool,
    live: Vec<bool>,
}

impl SigmaLiveness {
    pub fn new(ifs: &AffineIfs) -> Self {
        if ifs.ranks().contains(&2) {
            return Self {
                all_live: true,
                live: vec![true; ifs.len()],
            };
        }
        let graph = letter_graph(ifs);
        Self {
            all_live: false,
            live: live_letters(&graph),
        }
    }

    /// Only meaningful for nonzero prefixes ending in `last`.
    pub fn is_live(&self, last: usize) -> bool {
        self.all_live || self.live[last]
    }
}

/// Letters from which an infinite walk starts: repeatedly drop letters with
/// no remaining successor.
fn live_letters(graph: &[Vec<usize>]) -> Vec<bool> {
    let n = graph.len();
    let mut alive: Vec<bool> = graph.iter().map(|e| !e.is_empty()).collect();
    loop {
        let mut changed = false;
        for k in 0..n {
            if alive[k] && !graph[k].iter().any(|&j| alive[j]) {
                alive[k] = false;
                changed = true;
            }
        }
        if !changed {
            return alive;
        }
    }
}

/// Outcome of the search for an infinite word with nonzero prefixes.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "answer", rename_all = "lowercase")]
pub enum NonzeroWordVerdict {
    /// `prefix · cycle^∞` has nonzero products on every prefix.
    Yes { prefix: Word, cycle: Word },
    /// Every word of length `depth` has zero product.
    No { depth: usize },
    Inconclusive { depth: usize },
}

impl NonzeroWordVerdict {
    /// The first `n` letters of the witness word.
    pub fn witness_prefix(&self, n: usize) -> Option<Word> {
        match self {
            NonzeroWordVerdict::Yes { prefix, cycle } => {
                let letters = prefix
                    .letters()
                    .iter()
                    .chain(cycle.letters().iter().cycle())
                    .take(n)
                    .copied()
                    .collect();
                Some(Word::from_letters(letters))
            }
            _ => None,
        }
    }
}

/// Decide whether some infinite word has all prefix products nonzero.
pub fn has_infinite_nonzero_word(ifs: &AffineIfs, max_depth: usize) -> NonzeroWordVerdict {
    if let Some(i) = ifs.ranks().iter().position(|&r| r == 2) {
        return NonzeroWordVerdict::Yes {
            prefix: Word::empty(),
            cycle: Word::from_letters(vec![i as u8]),
        };
    }
    let graph = letter_graph(ifs);
    let live = live_letters(&graph);
    // prefer a letter lying on a cycle, so the prefix is empty
    for start in (0..graph.len()).filter(|&k| live[k]) {
        if let Some(cycle) = shortest_cycle(&graph, start) {
            return NonzeroWordVerdict::Yes {
                prefix: Word::empty(),
                cycle: Word::from_letters(cycle.into_iter().map(|x| x as u8).collect()),
            };
        }
    }
    // acyclic: the longest walk bounds the length of nonzero words
    let nonzero: Vec<bool> = ifs.ranks().iter().map(|&r| r > 0).collect();
    let longest = longest_walk(&graph, &nonzero);
    let depth = longest + 1;
    if depth <= max_depth {
        NonzeroWordVerdict::No { depth }
    } else {
        NonzeroWordVerdict::Inconclusive { depth: max_depth }
    }
}

fn shortest_cycle(graph: &[Vec<usize>], start: usize) -> Option<Vec<usize>> {
    let n = graph.len();
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &j in &graph[start] {
        if j == start {
            return Some(vec![start]);
        }
        if !seen[j] {
            seen[j] = true;
            parent[j] = start;
            queue.push_back(j);
        }
    }
    while let Some(k) = queue.pop_front() {
        for &j in &graph[k] {
            if j == start {
                let mut path = vec![k];
                let mut cur = k;
                while parent[cur] != start {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.push(start);
                path.reverse();
                return Some(path);
            }
            if !seen[j] {
                seen[j] = true;
                parent[j] = k;
                queue.push_back(j);
            }
        }
    }
    None
}

/// Number of letters in the longest walk of an acyclic graph (0 when every
/// letter is zero).
fn longest_walk(graph: &[Vec<usize>], nonzero: &[bool]) -> usize {
    fn go(k: usize, graph: &[Vec<usize>], memo: &mut [Option<usize>]) -> usize {
        if let Some(v) = memo[k] {
            return v;
        }
        let best = graph[k].iter().map(|&j| go(j, graph, memo)).max().unwrap_or(0) + 1;
        memo[k] = Some(best);
        best
    }
    let mut memo = vec![None; graph.len()];
    (0..graph.len())
        .filter(|&k| nonzero[k])
        .map(|k| go(k, graph, &mut memo))
        .max()
        .unwrap_or(0)
}

/// Outcome of the search for a zero product in the semigroup.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "camelCase")]
pub enum ZeroProductSearch {
    Found { word: Word },
    NoneExists,
    Inconclusive { states: usize },
}

/// Search the semigroup `{A_𝚒}` for the zero matrix.
///
/// The first vanishing product has the form `P·A_j` with `P` rank one and
/// `A_j` rank one, and whether it vanishes depends only on the coimage line
/// of `P`. Coimage lines start at those of the rank-one letters and move by
/// `Aᵢᵀ` for invertible letters; the explored set is capped at `max_states`.
pub fn find_zero_product(ifs: &AffineIfs, max_states: usize) -> ZeroProductSearch {
    let tol = ifs.tolerance();
    if let Some(k) = ifs.ranks().iter().position(|&r| r == 0) {
        return ZeroProductSearch::Found { word: Word::from_letters(vec![k as u8]) };
    }
    let rank_one = ifs.rank_one_indices();
    let invertible = ifs.invertible_indices();
    if rank_one.is_empty() {
        return ZeroProductSearch::NoneExists;
    }
    let lines = |m: &Mat2| -> (Direction, Direction) {
        // coimage = row space, image = column space
        let rows = m.rows();
        let r = if rows[0][0].hypot(rows[0][1]) >= rows[1][0].hypot(rows[1][1]) {
            rows[0]
        } else {
            rows[1]
        };
        let c = if m.a.hypot(m.c) >= m.b.hypot(m.d) {
            [m.a, m.c]
        } else {
            [m.b, m.d]
        };
        (Direction::from_vector(r), Direction::from_vector(c))
    };
    let images: Vec<(usize, Direction)> = rank_one.iter().map(|&j| (j, lines(ifs.linear(j)).1)).collect();

    let mut states: Vec<Direction> = Vec::new();
    let mut queue: VecDeque<(Direction, Vec<u8>)> = VecDeque::new();
    for &k in &rank_one {
        let co = lines(ifs.linear(k)).0;
        if !states.iter().any(|s| s.distance(&co) <= 1e-12) {
            states.push(co);
            queue.push_back((co, vec![k as u8]));
        }
    }
    while let Some((line, word)) = queue.pop_front() {
        let u = line.unit();
        for &(j, im) in &images {
            let v = im.unit();
            if (u[0] * v[0] + u[1] * v[1]).abs() <= tol.relative {
                let mut w = word.clone();
                w.push(j as u8);
                return ZeroProductSearch::Found { word: Word::from_letters(w) };
            }
        }
        for &i in &invertible {
            let next = Direction::from_vector(ifs.linear(i).transpose().apply(u));
            if states.iter().any(|s| s.distance(&next) <= 1e-12) {
                continue;
            }
            if states.len() >= max_states {
                return ZeroProductSearch::Inconclusive {
                    states: states.len(),
                };
            }
            states.push(next);
            let mut w = word.clone();
            w.push(i as u8);
            queue.push_back((next, w));
        }
    }
    ZeroProductSearch::NoneExists
}
