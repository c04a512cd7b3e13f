//! Affine iterated function systems on the plane.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::{Mat2, RankTolerance};

/// The affine map `x ↦ linear·x + translation`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub linear: Mat2,
    pub translation: [f64; 2],
}

impl AffineMap {
    pub fn new(linear: Mat2, translation: [f64; 2]) -> Self {
        Self {
            linear,
            translation,
        }
    }

    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        let y = self.linear.apply(x);
        [y[0] + self.translation[0], y[1] + self.translation[1]]
    }

    /// Unique fixed point of a contraction, solving `(I - A)x = v`.
    pub fn fixed_point(&self) -> Option<[f64; 2]> {
        let m = Mat2::IDENTITY.sub(&self.linear);
        let det = m.det();
        if det.abs() < 1e-300 {
            return None;
        }
        let [v0, v1] = self.translation;
        Some([(m.d * v0 - m.b * v1) / det, (-m.c * v0 + m.a * v1) / det])
    }
}

/// An ordered tuple of affine maps; letter `i` of the alphabet is map `i`.
#[derive(Clone, Debug)]
pub struct AffineIfs {
    name: String,
    maps: Vec<AffineMap>,
    ranks: Vec<u8>,
    norms: Vec<f64>,
    exact: Option<Vec<[BigRational; 4]>>,
    tolerance: RankTolerance,
}

impl AffineIfs {
    pub const MAX_MAPS: usize = 255;

    pub fn new(maps: Vec<AffineMap>) -> Result<Self> {
        Self::with_tolerance(maps, RankTolerance::default())
    }

    pub fn with_tolerance(maps: Vec<AffineMap>, tolerance: RankTolerance) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::invalid("geometry", "an IFS needs at least one map"));
        }
        if maps.len() > Self::MAX_MAPS {
            return Err(Error::invalid(
                "geometry",
                format!("at most {} maps are supported", Self::MAX_MAPS),
            ));
        }
        for (i, m) in maps.iter().enumerate() {
            if !m.linear.is_finite() || !m.translation.iter().all(|x| x.is_finite()) {
                return Err(Error::invalid("geometry", format!("map {i} has non-finite entries")));
            }
        }
        let ranks = maps.iter().map(|m| m.linear.rank(&tolerance)).collect();
        let norms = maps.iter().map(|m| m.linear.norm()).collect();
        Ok(Self {
            name: String::new(),
            maps,
            ranks,
            norms,
            exact: None,
            tolerance,
        })
    }

    /// Matrix tuple with zero translations, for purely thermodynamic use.
    pub fn from_matrices(mats: &[Mat2]) -> Result<Self> {
        Self::new(mats.iter().map(|m| AffineMap::new(*m, [0.0, 0.0])).collect())
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Attach exact rational linear parts, row-major, one per map.
    pub fn with_exact_linear(mut self, exact: Vec<[BigRational; 4]>) -> Result<Self> {
        if exact.len() != self.maps.len() {
            return Err(Error::invalid(
                "geometry",
                "exact linear parts must match the number of maps",
            ));
        }
        self.exact = Some(exact);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn linear(&self, i: usize) -> &Mat2 {
        &self.maps[i].linear
    }

    pub fn matrices(&self) -> Vec<Mat2> {
        self.maps.iter().map(|m| m.linear).collect()
    }

    pub fn exact(&self) -> Option<&[[BigRational; 4]]> {
        self.exact.as_deref()
    }

    pub fn tolerance(&self) -> &RankTolerance {
        &self.tolerance
    }

    pub fn rank(&self, i: usize) -> u8 {
        self.ranks[i]
    }

    pub fn ranks(&self) -> &[u8] {
        &self.ranks
    }

    pub fn norm(&self, i: usize) -> f64 {
        self.norms[i]
    }

    /// The index set `I` of invertible letters.
    pub fn invertible_indices(&self) -> Vec<usize> {
        self.indices_with(|r| r == 2)
    }

    pub fn non_invertible_indices(&self) -> Vec<usize> {
        self.indices_with(|r| r < 2)
    }

    pub fn rank_one_indices(&self) -> Vec<usize> {
        self.indices_with(|r| r == 1)
    }

    fn indices_with(&self, f: impl Fn(u8) -> bool) -> Vec<usize> {
        (0..self.len()).filter(|&i| f(self.ranks[i])).collect()
    }

    pub fn max_norm(&self) -> f64 {
        self.norms.iter().cloned().fold(0.0, f64::max)
    }

    pub fn is_contractive(&self) -> bool {
        self.max_norm() < 1.0
    }

    pub(crate) fn require_contractive(&self, module: &'static str) -> Result<()> {
        if self.is_contractive() {
            Ok(())
        } else {
            Err(Error::NotContractive {
                module,
                max_norm: self.max_norm(),
            })
        }
    }

    /// Radius of a ball centred at the origin that contains the attractor:
    /// `max|v_i| / (1 - max‖A_i‖)`.
    pub fn radius_bound(&self) -> f64 {
        let vmax = self
            .maps
            .iter()
            .map(|m| m.translation[0].hypot(m.translation[1]))
            .fold(0.0, f64::max);
        vmax / (1.0 - self.max_norm())
    }

    /// The shared fixed point of all maps, if there is one.
    pub fn common_fixed_point(&self) -> Option<[f64; 2]> {
        let first = self.maps[0].fixed_point()?;
        let scale = 1.0 + self.radius_bound();
        for m in &self.maps[1..] {
            let p = m.fixed_point()?;
            if (p[0] - first[0]).hypot(p[1] - first[1]) > 1e-12 * scale {
                return None;
            }
        }
        Some(first)
    }

    /// Same translations, linear parts multiplied by `factor`.
    pub fn scaled_linear(&self, factor: f64) -> Result<Self> {
        let maps = self
            .maps
            .iter()
            .map(|m| AffineMap::new(m.linear.scale(factor), m.translation))
            .collect();
        let out = Self::with_tolerance(maps, self.tolerance)?.with_name(self.name.clone());
        // exact parts no longer describe the scaled tuple
        Ok(out)
    }

    pub fn with_translations(&self, translations: &[[f64; 2]]) -> Result<Self> {
        if translations.len() != self.len() {
            return Err(Error::invalid("geometry", "one translation per map is required"));
        }
        let maps = self
            .maps
            .iter()
            .zip(translations)
            .map(|(m, t)| AffineMap::new(m.linear, *t))
            .collect();
        let mut out = Self::with_tolerance(maps, self.tolerance)?.with_name(self.name.clone());
        out.exact = self.exact.clone();
        Ok(out)
    }

    /// The sub-system of the given letters, in the given order.
    pub fn restrict(&self, letters: &[usize]) -> Result<Self> {
        let maps = letters.iter().map(|&i| self.maps[i]).collect();
        let mut out = Self::with_tolerance(maps, self.tolerance)?.with_name(self.name.clone());
        if let Some(ex) = &self.exact {
            out.exact = Some(letters.iter().map(|&i| ex[i].clone()).collect());
        }
        Ok(out)
    }
}
