//! Formal disks and their containment order.
//!
//! A formal disk is a center plus a signed radius. Disk `a` contains disk `b`
//! iff the protrusion `d(center_a, center_b) - r_a + r_b` is non-positive; the
//! boundary case counts as contained.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{ManifoldPoint, QuasiMetricSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormalDisk {
    pub center: ManifoldPoint,
    pub radius: f64,
}

impl FormalDisk {
    pub fn new(center: ManifoldPoint, radius: f64) -> Self {
        FormalDisk { center, radius }
    }

    /// Same center, radius shifted by `delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        FormalDisk {
            center: self.center.clone(),
            radius: self.radius + delta,
        }
    }

    /// Same center, radius negated (the reversed disk).
    pub fn negated(&self) -> Self {
        FormalDisk {
            center: self.center.clone(),
            radius: -self.radius,
        }
    }
}

/// `l(a; b) = d(center_a, center_b) - r_a + r_b`.
pub fn protrusion(space: &QuasiMetricSpace, a: &FormalDisk, b: &FormalDisk) -> Result<f64> {
    Ok(space.distance(&a.center, &b.center)? - a.radius + b.radius)
}

/// `a ⊒ b`, i.e. `protrusion(a, b) <= 0`.
pub fn contains(space: &QuasiMetricSpace, a: &FormalDisk, b: &FormalDisk) -> Result<bool> {
    Ok(protrusion(space, a, b)? <= 0.0)
}
