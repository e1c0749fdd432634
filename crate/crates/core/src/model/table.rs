use rand::Rng;
use rand_distr::StandardNormal;

use crate::disks::FormalDisk;
use crate::error::{invalid, Error, Result};
use crate::geometry::{GeometryKind, ManifoldPoint, QuasiMetricSpace};

use super::TrainConfig;

/// Node-indexed formal disks sharing one space. Centers are stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    space: QuasiMetricSpace,
    centers: Vec<f64>,
    radii: Vec<f64>,
    node_names: Vec<String>,
}

impl EmbeddingTable {
    pub fn new(space: QuasiMetricSpace, node_names: Vec<String>, disks: Vec<FormalDisk>) -> Result<Self> {
        if node_names.len() != disks.len() {
            return Err(invalid(format!(
                "{} names for {} disks",
                node_names.len(),
                disks.len()
            )));
        }
        let mut centers = Vec::with_capacity(disks.len() * space.dim());
        let mut radii = Vec::with_capacity(disks.len());
        for d in &disks {
            space.check_member(d.center.coords())?;
            if !d.radius.is_finite() {
                return Err(invalid("disk radius must be finite"));
            }
            centers.extend_from_slice(d.center.coords());
            radii.push(d.radius);
        }
        Ok(EmbeddingTable {
            space,
            centers,
            radii,
            node_names,
        })
    }

    pub fn space(&self) -> &QuasiMetricSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    /// Replaces the names; the count must match.
    pub fn with_node_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.len() {
            return Err(invalid(format!(
                "{} names for {} disks",
                names.len(),
                self.len()
            )));
        }
        self.node_names = names;
        Ok(self)
    }

    pub fn center(&self, i: usize) -> &[f64] {
        let d = self.space.dim();
        &self.centers[i * d..(i + 1) * d]
    }

    pub fn radius(&self, i: usize) -> f64 {
        self.radii[i]
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn disk(&self, i: usize) -> Result<FormalDisk> {
        self.check_index(i)?;
        Ok(FormalDisk::new(
            ManifoldPoint::from_vec_unchecked(self.center(i).to_vec()),
            self.radii[i],
        ))
    }

    pub fn set_disk(&mut self, i: usize, disk: &FormalDisk) -> Result<()> {
        self.check_index(i)?;
        self.space.check_member(disk.center.coords())?;
        if !disk.radius.is_finite() {
            return Err(invalid("disk radius must be finite"));
        }
        let d = self.space.dim();
        self.centers[i * d..(i + 1) * d].copy_from_slice(disk.center.coords());
        self.radii[i] = disk.radius;
        Ok(())
    }

    /// Adds `t` to every radius.
    pub fn shift_radii(&mut self, t: f64) {
        self.radii.iter_mut().for_each(|r| *r += t);
    }

    /// Copy with every radius negated.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        out.radii.iter_mut().for_each(|r| *r = -*r);
        out
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            });
        }
        Ok(())
    }

    /// Mutable center `i` and its dimension.
    pub(crate) fn center_mut(&mut self, i: usize) -> &mut [f64] {
        let d = self.space.dim();
        &mut self.centers[i * d..(i + 1) * d]
    }

    pub(crate) fn radius_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.radii[i]
    }

    /// Unchecked energy for pair `(i, j)`: `d(x_j, x_i) - r_j + r_i`.
    pub(crate) fn energy_raw(&self, i: usize, j: usize) -> f64 {
        self.space.distance_raw(self.center(j), self.center(i)) - self.radii[j] + self.radii[i]
    }
}

/// Random initial table for `n_nodes` nodes named `"0"`, `"1"`, ...
pub fn init_embeddings<R: Rng + ?Sized>(
    space: &QuasiMetricSpace,
    n_nodes: usize,
    config: &TrainConfig,
    rng: &mut R,
) -> Result<EmbeddingTable> {
    if n_nodes == 0 {
        return Err(invalid("cannot initialise an empty table"));
    }
    let dim = space.dim();
    let s = config.init_center_scale;
    let mut centers = Vec::with_capacity(n_nodes * dim);
    let mut radii = Vec::with_capacity(n_nodes);
    let mut buf = vec![0.0; dim];
    for _ in 0..n_nodes {
        match space.kind() {
            GeometryKind::Euclidean | GeometryKind::Polyhedral => {
                for c in buf.iter_mut() {
                    *c = if s > 0.0 { rng.random_range(-s..=s) } else { 0.0 };
                }
                space.project_raw(&mut buf);
            }
            GeometryKind::Sphere => loop {
                for c in buf.iter_mut() {
                    *c = rng.sample(StandardNormal);
                }
                if space.project_raw(&mut buf) {
                    break;
                }
            },
            GeometryKind::Lorentz => {
                let mut v = vec![0.0; dim];
                for c in v[1..].iter_mut() {
                    let z: f64 = rng.sample(StandardNormal);
                    *c = s * z;
                }
                buf.fill(0.0);
                buf[0] = 1.0;
                space.exp_map_raw(&mut buf, &v);
            }
        }
        centers.extend_from_slice(&buf);
        let half = config.init_radius.abs() / 2.0;
        let noise = if half > 0.0 { rng.random_range(-half..=half) } else { 0.0 };
        radii.push(config.init_radius + noise);
    }
    Ok(EmbeddingTable {
        space: space.clone(),
        centers,
        radii,
        node_names: (0..n_nodes).map(|i| i.to_string()).collect(),
    })
}
