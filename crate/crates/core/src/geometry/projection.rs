//! Orthogonal projections onto lines through the origin.

use rayon::prelude::*;
use serde::Serialize;

use super::cloud::{CloudSource, PointCloud};
use crate::mat2::Direction;

/// Coordinates along a line, sorted, with values closer than `1e-12` of
/// the largest magnitude merged.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Projection {
    pub angle: f64,
    pub values: Vec<f64>,
    pub resolution: f64,
}

impl Projection {
    /// The projected set placed on the horizontal axis, for box counting.
    pub fn to_cloud(&self) -> PointCloud {
        PointCloud::new(
            self.values.iter().map(|&t| [t, 0.0]).collect(),
            self.resolution,
            CloudSource::Projection { angle: self.angle },
        )
    }
}

/// `⟨p, u⟩` for every point, where `u` spans the line. Projection is
/// 1-Lipschitz, so the resolution carries over.
pub fn project_cloud(cloud: &PointCloud, direction: Direction) -> Projection {
    let u = direction.unit();
    let mut values: Vec<f64> = cloud.points.par_iter().map(|p| p[0] * u[0] + p[1] * u[1]).collect();
    values.par_sort_unstable_by(f64::total_cmp);
    let tol = 1e-12 * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    values.dedup_by(|b, a| *b - *a <= tol);
    Projection {
        angle: direction.angle(),
        values,
        resolution: cloud.resolution,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_corners_onto_the_axis() {
        let cloud = PointCloud::new(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
            0.0,
            CloudSource::Imported,
        );
        let p = project_cloud(&cloud, Direction::new(0.0));
        assert_eq!(p.values, vec![0.0, 1.0]);
        let q = project_cloud(&cloud, Direction::new(std::f64::consts::FRAC_PI_2));
        assert_eq!(q.values.len(), 2);
    }

    #[test]
    fn opposite_angles_agree_up_to_sign() {
        let cloud = PointCloud::new(
            (0..50).map(|i| [(i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()]).collect(),
            0.0,
            CloudSource::Imported,
        );
        let theta = 0.4;
        let a = project_cloud(&cloud, Direction::new(theta));
        let b = project_cloud(&cloud, Direction::new(theta + std::f64::consts::PI));
        let mut b_abs: Vec<f64> = b.values.iter().map(|v| v.abs()).collect();
        let mut a_abs: Vec<f64> = a.values.iter().map(|v| v.abs()).collect();
        a_abs.sort_by(f64::total_cmp);
        b_abs.sort_by(f64::total_cmp);
        for (x, y) in a_abs.iter().zip(&b_abs) {
            assert!((x - y).abs() < 1e-14);
        }
    }
}
