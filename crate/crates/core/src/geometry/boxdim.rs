//! Box-counting dimension on nested dyadic grids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::cloud::PointCloud;
use crate::error::{Error, Result};

/// Box sizes `2^-coarse, …, 2^-fine`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScaleRange {
    pub coarse: i32,
    pub fine: i32,
}

impl ScaleRange {
    pub fn dyadic(coarse: i32, fine: i32) -> Result<Self> {
        if fine < coarse + 2 {
            return Err(Error::invalid(
                "geometry",
                format!("a slope fit needs at least three scales, got 2^-{coarse}..2^-{fine}"),
            ));
        }
        Ok(Self { coarse, fine })
    }

    pub fn sizes(&self) -> Vec<f64> {
        (self.coarse..=self.fine).map(|k| 2f64.powi(-k)).collect()
    }

    pub fn finest(&self) -> f64 {
        2f64.powi(-self.fine)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoxCountRow {
    pub scale: f64,
    pub count: u64,
    pub offset_id: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxDimEstimate {
    /// Box sizes, coarsest first.
    pub scales: Vec<f64>,
    /// Occupied boxes at each size, the fewest over the grid offsets.
    pub counts: Vec<f64>,
    pub rows: Vec<BoxCountRow>,
    pub slope: f64,
    pub stderr: f64,
}

/// Number of grids counted: the anchored one and shifted copies.
pub const GRID_OFFSETS: usize = 5;

pub fn box_dimension(cloud: &PointCloud, range: ScaleRange) -> Result<BoxDimEstimate> {
    box_dimension_seeded(cloud, range, 0)
}

/// Least-squares slope of `log N(δ)` against `log 1/δ`.
///
/// `N(δ)` is the fewest occupied boxes over the anchored grid and four
/// seeded shifts of it. Each shift is drawn once in units of the coarsest
/// box, so the grids of one shift are nested and the counts are monotone in
/// the box size.
pub fn box_dimension_seeded(cloud: &PointCloud, range: ScaleRange, seed: u64) -> Result<BoxDimEstimate> {
    let range = ScaleRange::dyadic(range.coarse, range.fine)?;
    if cloud.resolution > range.finest() / 4.0 {
        return Err(Error::ScaleBelowResolution {
            scale: range.finest(),
            resolution: cloud.resolution,
        });
    }
    if cloud.is_empty() {
        return Err(Error::invalid("geometry", "cannot count boxes of an empty cloud"));
    }
    let scales = range.sizes();
    let coarse = scales[0];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offsets: Vec<[f64; 2]> = (0..GRID_OFFSETS)
        .map(|k| {
            if k == 0 {
                [0.0, 0.0]
            } else {
                [rng.gen::<f64>() * coarse, rng.gen::<f64>() * coarse]
            }
        })
        .collect();

    let jobs: Vec<(usize, usize)> = (0..offsets.len())
        .flat_map(|o| (0..scales.len()).map(move |s| (o, s)))
        .collect();
    let rows: Vec<BoxCountRow> = jobs
        .par_iter()
        .map(|&(o, s)| BoxCountRow {
            scale: scales[s],
            count: occupied(&cloud.points, scales[s], offsets[o]),
            offset_id: o,
        })
        .collect();

    let counts: Vec<f64> = (0..scales.len())
        .map(|s| {
            rows.iter()
                .filter(|r| r.scale == scales[s])
                .map(|r| r.count)
                .min()
                .expect("one row per offset") as f64
        })
        .collect();
    let xs: Vec<f64> = scales.iter().map(|h| -h.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|c| c.ln()).collect();
    let (slope, stderr) = least_squares(&xs, &ys);
    Ok(BoxDimEstimate {
        scales,
        counts,
        rows,
        slope,
        stderr,
    })
}

fn occupied(points: &[[f64; 2]], h: f64, offset: [f64; 2]) -> u64 {
    let mut keys: Vec<(i64, i64)> = points
        .iter()
        .map(|p| (((p[0] - offset[0]) / h).floor() as i64, ((p[1] - offset[1]) / h).floor() as i64))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len() as u64
}

/// Slope of the ordinary least-squares line and its standard error.
pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    let stderr = if xs.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, stderr)
}
