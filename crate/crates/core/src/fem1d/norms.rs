use serde::{Deserialize, Serialize};

use crate::fem1d::problem::{Field1D, ProblemSpec1D};
use crate::meshing::SblMesh1D;
use crate::polybasis::graded_rule;

/// Gauss points per panel of the graded rule used for all error integrals.
pub const NORM_POINTS_PER_PANEL: usize = 20;
/// Chebyshev sample points per element for the max norms.
pub const MAX_SAMPLES_PER_ELEMENT: usize = 200;

/// Error norms of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub energy: f64,
    pub balanced: f64,
    pub l2: f64,
    pub h1: f64,
    pub h2_seminorm: f64,
    pub max: f64,
    pub c1max: f64,
    pub eps: f64,
    pub p: usize,
    pub kappa: f64,
    pub problem: String,
}

/// Squared integrals of the derivatives 0, 1, 2 of `w` over `[a, b]`,
/// together with the coefficient-weighted energy parts.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Integrals {
    pub d0: f64,
    pub d1: f64,
    pub d2: f64,
    /// `∫ b w'^2`
    pub bd1: f64,
    /// `∫ c w^2`
    pub cd0: f64,
}

impl Integrals {
    fn add(&mut self, o: &Integrals) {
        self.d0 += o.d0;
        self.d1 += o.d1;
        self.d2 += o.d2;
        self.bd1 += o.bd1;
        self.cd0 += o.cd0;
    }

    pub fn seminorm(&self, k: usize) -> f64 {
        match k {
            0 => self.d0.sqrt(),
            1 => self.d1.sqrt(),
            2 => self.d2.sqrt(),
            _ => panic!("seminorm order {k} not tabulated"),
        }
    }
}

/// Squared derivative integrals of `w` over `[a, b]` with a rule graded
/// toward `0` and `1` at scale `eps`.
pub fn integrals(w: &dyn Field1D, problem: &ProblemSpec1D, a: f64, b: f64) -> Integrals {
    let mut out = Integrals::default();
    for (x, wt) in graded_rule(a, b, problem.eps, NORM_POINTS_PER_PANEL) {
        let v0 = w.derivative(x, 0);
        let v1 = w.derivative(x, 1);
        let v2 = w.derivative(x, 2);
        out.d0 += wt * v0 * v0;
        out.d1 += wt * v1 * v1;
        out.d2 += wt * v2 * v2;
        out.bd1 += wt * problem.b.eval(x) * v1 * v1;
        out.cd0 += wt * problem.c.eval(x) * v0 * v0;
    }
    out
}

/// Integrals over all elements of `mesh`, panel breaks aligned with the
/// element boundaries.
pub fn mesh_integrals(w: &dyn Field1D, problem: &ProblemSpec1D, mesh: &SblMesh1D) -> Integrals {
    let mut total = Integrals::default();
    for j in 0..mesh.num_elements() {
        let (a, b) = mesh.element(j);
        total.add(&integrals(w, problem, a, b));
    }
    total
}

/// `(max |w|, max |w'|)` sampled at Chebyshev points of every element.
pub fn sampled_max(w: &dyn Field1D, mesh: &SblMesh1D) -> (f64, f64) {
    let m = MAX_SAMPLES_PER_ELEMENT;
    let mut out: (f64, f64) = (0.0, 0.0);
    for j in 0..mesh.num_elements() {
        let (a, b) = mesh.element(j);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for i in 0..m {
            let x = mid - half * (std::f64::consts::PI * i as f64 / (m - 1) as f64).cos();
            out.0 = out.0.max(w.derivative(x, 0).abs());
            out.1 = out.1.max(w.derivative(x, 1).abs());
        }
    }
    out
}

/// All norms of `w` (typically an error `u - u_p`).
pub fn norms_1d(
    w: &dyn Field1D,
    problem: &ProblemSpec1D,
    mesh: &SblMesh1D,
    kappa: f64,
) -> NormReport {
    let ints = mesh_integrals(w, problem, mesh);
    let eps = problem.eps;
    let (max, dmax) = sampled_max(w, mesh);
    NormReport {
        energy: (eps * eps * ints.d2 + ints.bd1 + ints.cd0).sqrt(),
        balanced: (eps * ints.d2 + ints.d1 + ints.d0).sqrt(),
        l2: ints.d0.sqrt(),
        h1: (ints.d1 + ints.d0).sqrt(),
        h2_seminorm: ints.d2.sqrt(),
        max,
        c1max: max.max(dmax),
        eps,
        p: mesh.p,
        kappa,
        problem: problem.name.clone(),
    }
}

/// Energy norm `B_ε(w, w)^{1/2}` only.
pub fn energy_norm(w: &dyn Field1D, problem: &ProblemSpec1D, mesh: &SblMesh1D) -> f64 {
    let ints = mesh_integrals(w, problem, mesh);
    (problem.eps * problem.eps * ints.d2 + ints.bd1 + ints.cd0).sqrt()
}
