use crate::disks::FormalDisk;
use crate::error::{invalid, Error, Result};
use crate::geometry::{ManifoldPoint, QuasiMetricSpace};

fn check_orthant(x: &[f64]) -> Result<()> {
    if x.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
        return Err(Error::Domain("point is not in the open positive orthant".into()));
    }
    Ok(())
}

fn check_same(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(invalid(format!("dimension mismatch: {} vs {}", x.len(), y.len())));
    }
    Ok(())
}

/// `x ⪯ y` iff `x_k <= y_k` for every coordinate.
pub fn order_relation(x: &[f64], y: &[f64]) -> Result<bool> {
    check_same(x, y)?;
    check_orthant(x)?;
    check_orthant(y)?;
    Ok(x.iter().zip(y).all(|(a, b)| a <= b))
}

/// `‖max(0, x - y)‖²`.
pub fn energy_order(x: &[f64], y: &[f64]) -> Result<f64> {
    check_same(x, y)?;
    check_orthant(x)?;
    check_orthant(y)?;
    Ok(x.iter().zip(y).map(|(a, b)| (a - b).max(0.0).powi(2)).sum())
}

/// `x ↦ (P x, a - mean(x))` with `P = I - 11ᵀ/n`, into the polyhedral space
/// generated by `{P e_k}` on the zero-sum hyperplane.
#[derive(Debug, Clone)]
pub struct OrderEmbeddingMap {
    n: usize,
    a: f64,
    space: QuasiMetricSpace,
}

impl OrderEmbeddingMap {
    pub fn new(n: usize, a: f64) -> Result<Self> {
        if n < 2 {
            return Err(invalid("order embedding map needs n >= 2"));
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(invalid("offset a must be positive"));
        }
        let inv = 1.0 / n as f64;
        let generators = (0..n)
            .map(|k| (0..n).map(|m| if m == k { 1.0 - inv } else { -inv }).collect())
            .collect();
        Ok(OrderEmbeddingMap {
            n,
            a,
            space: QuasiMetricSpace::polyhedral_on_span(generators)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> f64 {
        self.a
    }

    /// The polyhedral space with generators `W = {P e_k}`.
    pub fn space(&self) -> &QuasiMetricSpace {
        &self.space
    }

    pub fn phi_ord(&self, x: &[f64]) -> Result<FormalDisk> {
        if x.len() != self.n {
            return Err(invalid(format!("expected {} coordinates, got {}", self.n, x.len())));
        }
        check_orthant(x)?;
        let mean = x.iter().sum::<f64>() / self.n as f64;
        let center = x.iter().map(|c| c - mean).collect();
        Ok(FormalDisk::new(ManifoldPoint::from_vec_unchecked(center), self.a - mean))
    }
}
