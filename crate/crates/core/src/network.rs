//! Bed-adjacency trust network: patients are connected to the occupants of
//! the beds next to them and the beds next to those (distance <= 2 on a
//! linear row). Trust diffuses hourly toward the occupied-neighbour mean and
//! edges are classified green/yellow/red by absolute trust difference.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("a ward needs at least one bed")]
    NoBeds,
    #[error("edge-colour thresholds must satisfy 0 < green_max < yellow_max <= 2, got {green_max}/{yellow_max}")]
    BadThresholds { green_max: f64, yellow_max: f64 },
    #[error("diffusion rate must lie in (0, 1), got {0}")]
    BadAlpha(f64),
}

/// Absolute-difference cut points for edge colours.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub green_max: f64,
    pub yellow_max: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { green_max: 0.1, yellow_max: 0.3 }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<(), NetworkError> {
        if !(0.0 < self.green_max && self.green_max < self.yellow_max && self.yellow_max <= 2.0) {
            return Err(NetworkError::BadThresholds {
                green_max: self.green_max,
                yellow_max: self.yellow_max,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeColor {
    Green,
    Yellow,
    Red,
}

impl EdgeColor {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Green => "green",
            Self::Yellow => "yellow",
            Self::Red => "red",
        }
    }
}

/// Totally classifies an absolute trust difference:
/// `|d| < green_max` green, `|d| < yellow_max` yellow, otherwise red.
pub fn classify_edge(ti: f64, tj: f64, thresholds: &Thresholds) -> EdgeColor {
    let gap = (ti - tj).abs();
    if gap < thresholds.green_max {
        EdgeColor::Green
    } else if gap < thresholds.yellow_max {
        EdgeColor::Yellow
    } else {
        EdgeColor::Red
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EdgeCounts {
    pub green: u32,
    pub yellow: u32,
    pub red: u32,
}

impl EdgeCounts {
    pub fn total(&self) -> u32 {
        self.green + self.yellow + self.red
    }

    pub fn red_fraction(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            self.red as f64 / total as f64
        }
    }
}

/// Linear-row bed network with distance-<=2 adjacency.
#[derive(Debug, Clone)]
pub struct TrustNetwork {
    n_beds: usize,
    thresholds: Thresholds,
    alpha_per_hour: f64,
}

impl TrustNetwork {
    pub fn build_network(
        n_beds: usize,
        thresholds: Thresholds,
        alpha_per_hour: f64,
    ) -> Result<Self, NetworkError> {
        if n_beds == 0 {
            return Err(NetworkError::NoBeds);
        }
        thresholds.validate()?;
        if !(alpha_per_hour > 0.0 && alpha_per_hour < 1.0) {
            return Err(NetworkError::BadAlpha(alpha_per_hour));
        }
        Ok(Self { n_beds, thresholds, alpha_per_hour })
    }

    pub fn n_beds(&self) -> usize {
        self.n_beds
    }

    pub fn thresholds(&self) -> &Thresholds {
        &self.thresholds
    }

    pub fn alpha_per_hour(&self) -> f64 {
        self.alpha_per_hour
    }

    /// Bed indices j with 1 <= |i - j| <= 2, in increasing order.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let lo = i.saturating_sub(2);
        let hi = (i + 2).min(self.n_beds.saturating_sub(1));
        (lo..=hi).filter(move |&j| j != i)
    }

    /// All edges as (i, j) pairs with i < j.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_beds).flat_map(move |i| {
            ((i + 1)..self.n_beds.min(i + 3)).map(move |j| (i, j))
        })
    }

    /// One synchronous diffusion step over the occupied beds
    /// (`trust[i] = None` marks an unoccupied bed).
    ///
    /// Each occupied bed moves toward the mean trust of its neighbourhood,
    /// itself included: `t += alpha * (mean - t)`, clamped to [0, 1]. The
    /// mean starts from the bed's own value and adds occupied neighbours in
    /// increasing bed order; a bed with no occupied neighbour is its own
    /// mean, hence unchanged. All reads use the pre-step snapshot.
    pub fn diffuse_trust(&self, trust: &[Option<f64>]) -> Vec<Option<f64>> {
        assert_eq!(trust.len(), self.n_beds, "trust vector must cover every bed");
        let mut updated = trust.to_vec();
        for (i, slot) in updated.iter_mut().enumerate() {
            let Some(t) = trust[i] else { continue };
            let mut sum = t;
            let mut count = 1u32;
            for j in self.neighbors(i) {
                if let Some(tj) = trust[j] {
                    sum += tj;
                    count += 1;
                }
            }
            if count == 1 {
                continue;
            }
            let mean = sum / count as f64;
            *slot = Some((t + self.alpha_per_hour * (mean - t)).clamp(0.0, 1.0));
        }
        updated
    }

    /// Edge-colour counts over occupied-occupied edges.
    pub fn network_summary(&self, trust: &[Option<f64>]) -> EdgeCounts {
        assert_eq!(trust.len(), self.n_beds, "trust vector must cover every bed");
        let mut counts = EdgeCounts::default();
        for (i, j) in self.edges() {
            let (Some(ti), Some(tj)) = (trust[i], trust[j]) else { continue };
            match classify_edge(ti, tj, &self.thresholds) {
                EdgeColor::Green => counts.green += 1,
                EdgeColor::Yellow => counts.yellow += 1,
                EdgeColor::Red => counts.red += 1,
            }
        }
        counts
    }
}
