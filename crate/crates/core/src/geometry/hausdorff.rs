//! Hausdorff distance between finite point sets, via a uniform grid.

use std::collections::HashMap;

use rayon::prelude::*;

struct Grid<'a> {
    cell: f64,
    points: &'a [[f64; 2]],
    cells: HashMap<(i64, i64), Vec<u32>>,
    lo: (i64, i64),
    hi: (i64, i64),
}

impl<'a> Grid<'a> {
    fn new(points: &'a [[f64; 2]]) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        let cell = if extent > 0.0 {
            extent / (points.len() as f64).sqrt().max(1.0)
        } else {
            1.0
        };
        let mut cells: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(key(p, cell)).or_default().push(i as u32);
        }
        let lo = key(&lo, cell);
        let hi = key(&hi, cell);
        Self {
            cell,
            points,
            cells,
            lo,
            hi,
        }
    }

    fn nearest(&self, q: &[f64; 2]) -> f64 {
        let (cx, cy) = key(q, self.cell);
        // the ring that contains every occupied cell
        let limit = [cx - self.lo.0, self.hi.0 - cx, cy - self.lo.1, self.hi.1 - cy]
            .into_iter()
            .map(i64::abs)
            .max()
            .unwrap_or(0);
        let mut best = f64::INFINITY;
        let mut ring = 0i64;
        while ring <= limit {
            // every point in ring r is at least (r - 1) cells away
            if ring > 0 && (ring - 1) as f64 * self.cell > best {
                break;
            }
            let mut visit = |x: i64, y: i64| {
                if let Some(ids) = self.cells.get(&(x, y)) {
                    for &i in ids {
                        let p = self.points[i as usize];
                        best = best.min((p[0] - q[0]).hypot(p[1] - q[1]));
                    }
                }
            };
            if ring == 0 {
                visit(cx, cy);
            } else {
                for d in -ring..=ring {
                    visit(cx + d, cy - ring);
                    visit(cx + d, cy + ring);
                }
                for d in (-ring + 1)..ring {
                    visit(cx - ring, cy + d);
                    visit(cx + ring, cy + d);
                }
            }
            ring += 1;
        }
        best
    }
}

fn key(p: &[f64; 2], cell: f64) -> (i64, i64) {
    ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64)
}

/// `max_{a ∈ A} min_{b ∈ B} |a − b|`; `0` for empty `A`, `inf` for empty `B`.
pub fn directed_distance(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    if b.is_empty() {
        return f64::INFINITY;
    }
    let grid = Grid::new(b);
    a.par_iter().map(|q| grid.nearest(q)).reduce(|| 0.0, f64::max)
}

pub fn hausdorff_distance(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    directed_distance(a, b).max(directed_distance(b, a))
}
