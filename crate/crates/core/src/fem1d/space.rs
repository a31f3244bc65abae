use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fem1d::problem::Field1D;
use crate::meshing::SblMesh1D;
use crate::polybasis::C1ReferenceBasis;

/// Global numbering of the C¹ space: nodes and elements interleaved
/// (node 0, element 0, node 1, ...), each node carrying value and physical
/// slope, each element its `p - 3` bubbles. The four clamped DOFs are the
/// first two and the last two, so the free DOFs are contiguous.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DofMap1D {
    pub p: usize,
    pub num_elements: usize,
}

impl DofMap1D {
    pub fn new(p: usize, num_elements: usize) -> Self {
        Self { p, num_elements }
    }

    fn stride(&self) -> usize {
        2 + self.p - 3
    }

    pub fn len(&self) -> usize {
        2 * (self.num_elements + 1) + self.num_elements * (self.p - 3)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of DOFs left after eliminating the clamped ones.
    pub fn num_free(&self) -> usize {
        self.len() - 4
    }

    /// Global index of local DOF `a` on element `j`, in the reference
    /// ordering of [`C1ReferenceBasis`].
    pub fn global(&self, j: usize, a: usize) -> usize {
        let base = j * self.stride();
        match a {
            0 | 1 => base + a,
            2 | 3 => base + self.stride() + (a - 2),
            _ => base + 2 + (a - 4),
        }
    }

    /// Free index of a global DOF, `None` for the clamped ones.
    pub fn free(&self, g: usize) -> Option<usize> {
        (g >= 2 && g < self.len() - 2).then(|| g - 2)
    }

    /// Factor turning a physical slope into the reference coefficient.
    pub fn scale(&self, h: f64, a: usize) -> f64 {
        if a == 1 || a == 3 {
            0.5 * h
        } else {
            1.0
        }
    }
}

/// A member of the global C¹ space, stored with all DOFs (clamped ones
/// included).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteField1D {
    pub mesh: SblMesh1D,
    pub p: usize,
    pub dofs: DofMap1D,
    pub coeffs: Vec<f64>,
    basis: C1ReferenceBasis,
}

impl DiscreteField1D {
    pub fn new(mesh: SblMesh1D, p: usize, coeffs: Vec<f64>) -> Result<Self> {
        let basis = C1ReferenceBasis::new(p)?;
        let dofs = DofMap1D::new(p, mesh.num_elements());
        if coeffs.len() != dofs.len() {
            return Err(crate::Error::DimensionMismatch {
                expected: dofs.len(),
                got: coeffs.len(),
            });
        }
        Ok(Self {
            mesh,
            p,
            dofs,
            coeffs,
            basis,
        })
    }

    pub fn zeros(mesh: SblMesh1D, p: usize) -> Result<Self> {
        let n = DofMap1D::new(p.max(3), mesh.num_elements()).len();
        Self::new(mesh, p, vec![0.0; n])
    }

    pub fn basis(&self) -> &C1ReferenceBasis {
        &self.basis
    }

    /// Reference coefficients on element `j`.
    pub fn local_coeffs(&self, j: usize) -> Vec<f64> {
        let h = self.mesh.width(j);
        (0..self.basis.len())
            .map(|a| self.coeffs[self.dofs.global(j, a)] * self.dofs.scale(h, a))
            .collect()
    }

    pub fn set_local_coeffs(&mut self, j: usize, local: &[f64]) {
        let h = self.mesh.width(j);
        for (a, &v) in local.iter().enumerate() {
            let g = self.dofs.global(j, a);
            self.coeffs[g] = v / self.dofs.scale(h, a);
        }
    }

    /// `k`-th derivative (k <= 2) at `x`, evaluated on element `j`.
    pub fn eval_on_element(&self, j: usize, x: f64, k: usize) -> f64 {
        let (a, b) = self.mesh.element(j);
        let h = b - a;
        let t = 2.0 * (x - a) / h - 1.0;
        let vals = self.basis.eval(t);
        let d = vals.derivative(k);
        let mut acc = 0.0;
        for (i, &phi) in d.iter().enumerate() {
            acc += phi * self.coeffs[self.dofs.global(j, i)] * self.dofs.scale(h, i);
        }
        acc * (2.0 / h).powi(k as i32)
    }

    /// `k`-th derivative at `x`; errors outside `[0, 1]`.
    pub fn evaluate(&self, x: f64, k: usize) -> Result<f64> {
        let j = self.mesh.locate(x)?;
        Ok(self.eval_on_element(j, x, k))
    }

    /// Left and right limits of the `k`-th derivative at interior node `i`.
    pub fn node_limits(&self, i: usize, k: usize) -> (f64, f64) {
        let x = self.mesh.nodes[i];
        (
            self.eval_on_element(i - 1, x, k),
            self.eval_on_element(i, x, k),
        )
    }

    /// Largest jump of value or slope over the interior nodes.
    pub fn max_c1_jump(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 1..self.mesh.num_elements() {
            for k in 0..2 {
                let (l, r) = self.node_limits(i, k);
                worst = worst.max((l - r).abs());
            }
        }
        worst
    }

    /// Free coefficients only.
    pub fn free_coeffs(&self) -> &[f64] {
        &self.coeffs[2..self.coeffs.len() - 2]
    }
}

impl Field1D for DiscreteField1D {
    fn derivative(&self, x: f64, k: usize) -> f64 {
        let j = self.mesh.locate(x.clamp(0.0, 1.0)).unwrap_or(0);
        self.eval_on_element(j, x, k)
    }
}
