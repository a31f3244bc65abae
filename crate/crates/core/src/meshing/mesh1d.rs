use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Region1D {
    Layer,
    Coarse,
}

/// Three-element spectral boundary layer mesh `{0, τ, 1-τ, 1}` with
/// `τ = min(κpε, 1/3)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SblMesh1D {
    pub nodes: Vec<f64>,
    pub tau: f64,
    pub kappa: f64,
    pub p: usize,
    pub eps: f64,
    pub regions: Vec<Region1D>,
}

impl SblMesh1D {
    pub fn num_elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn element(&self, j: usize) -> (f64, f64) {
        (self.nodes[j], self.nodes[j + 1])
    }

    pub fn width(&self, j: usize) -> f64 {
        self.nodes[j + 1] - self.nodes[j]
    }

    /// True when `κpε < 1/3`, i.e. the outer elements are genuine layer
    /// elements.
    pub fn has_layer(&self) -> bool {
        self.regions.contains(&Region1D::Layer)
    }

    /// Index of the element containing `x`; nodes belong to the element
    /// on their right except the last one.
    pub fn locate(&self, x: f64) -> Result<usize> {
        if !(0.0..=1.0).contains(&x) || x.is_nan() {
            return Err(Error::OutOfDomain(x));
        }
        let n = self.num_elements();
        Ok((0..n).find(|&j| x < self.nodes[j + 1]).unwrap_or(n - 1))
    }
}

/// Builds the 1D SBL mesh.
pub fn build_mesh_1d(kappa: f64, p: usize, eps: f64) -> Result<SblMesh1D> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "eps",
            value: eps,
            reason: "must lie in (0, 1]",
        });
    }
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter {
            name: "kappa",
            value: kappa,
            reason: "must be positive",
        });
    }
    if p < 1 {
        return Err(Error::InvalidDegree {
            degree: p,
            min: 1,
            what: "SBL mesh",
        });
    }
    let spread = kappa * p as f64 * eps;
    let layered = spread < 1.0 / 3.0;
    let tau = if layered { spread } else { 1.0 / 3.0 };
    let regions = if layered {
        vec![Region1D::Layer, Region1D::Coarse, Region1D::Layer]
    } else {
        vec![Region1D::Coarse; 3]
    };
    Ok(SblMesh1D {
        nodes: vec![0.0, tau, 1.0 - tau, 1.0],
        tau,
        kappa,
        p,
        eps,
        regions,
    })
}
