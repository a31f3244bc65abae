//! Energy, balanced and sampled max norms of pairs `(e_u, e_w)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fem2d::problem::{Field2D, ProblemSpec2D};
use crate::fem2d::space::{tabulate, MixedDiscreteField};
use crate::meshing::mesh2d::{det, Point};
use crate::meshing::{ElementTag, SblMesh2D};
use crate::polybasis::{gauss_rule, graded_rule};

/// Extra Gauss points per panel beyond the degree.
const NORM_EXTRA_POINTS: usize = 8;
const MAX_SAMPLES: usize = 20;

/// Squared integrals `‖e_u‖², ‖∇e_u‖², ‖e_w‖²` and sampled maxima.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PairIntegrals {
    pub u0: f64,
    pub u1: f64,
    pub w0: f64,
    pub max_u: f64,
    pub max_w: f64,
}

impl PairIntegrals {
    fn add(mut self, o: Self) -> Self {
        self.u0 += o.u0;
        self.u1 += o.u1;
        self.w0 += o.w0;
        self.max_u = self.max_u.max(o.max_u);
        self.max_w = self.max_w.max(o.max_w);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport2D {
    pub problem: String,
    pub eps: f64,
    pub p: usize,
    pub kappa: f64,
    /// `(‖e_w‖² + b‖∇e_u‖² + c‖e_u‖²)^{1/2}`
    pub energy: f64,
    /// `(ε^{-1}‖e_w‖² + b‖∇e_u‖² + c‖e_u‖²)^{1/2}`
    pub balanced: f64,
    pub l2_u: f64,
    pub h1_u: f64,
    pub l2_w: f64,
    pub max_u: f64,
    pub max_w: f64,
}

impl NormReport2D {
    pub fn from_integrals(ints: &PairIntegrals, eps: f64, b: f64, c: f64) -> Self {
        Self {
            problem: String::new(),
            eps,
            p: 0,
            kappa: f64::NAN,
            energy: (ints.w0 + b * ints.u1 + c * ints.u0).sqrt(),
            balanced: (ints.w0 / eps + b * ints.u1 + c * ints.u0).sqrt(),
            l2_u: ints.u0.sqrt(),
            h1_u: ints.u1.sqrt(),
            l2_w: ints.w0.sqrt(),
            max_u: ints.max_u,
            max_w: ints.max_w,
        }
    }
}

/// Reference rule on element `e`: graded in ξ toward the circle for
/// elements that can carry the layer, tensor Gauss otherwise.
pub fn element_rule(mesh: &SblMesh2D, e: usize, eps: f64, p: usize) -> Vec<(f64, f64, f64)> {
    let el = &mesh.elements[e];
    let n = p + NORM_EXTRA_POINTS;
    let eta = gauss_rule(n);
    let layered = el.boundary_edge.is_some() || el.tag == ElementTag::RegularSplit;
    let xi: Vec<(f64, f64)> = if layered {
        let span = (el.map.xi_range[1] - el.map.xi_range[0]) * mesh.geometry.rho0;
        graded_rule(0.0, 1.0, (eps / span).min(1.0), n)
    } else {
        eta.mapped(0.0, 1.0).collect()
    };
    let mut out = Vec::with_capacity(xi.len() * n);
    for &(x, wx) in &xi {
        for (y, wy) in eta.mapped(0.0, 1.0) {
            out.push((x, y, wx * wy));
        }
    }
    out
}

/// Integrates a pair given element-wise by `eval(e, ξ, η, x) ->
/// (e_u, ∇e_u, e_w)` over the elements selected by `keep`.
pub fn integrate_pair<F>(
    mesh: &SblMesh2D,
    eps: f64,
    p: usize,
    keep: impl Fn(usize) -> bool + Sync,
    eval: F,
) -> PairIntegrals
where
    F: Fn(usize, f64, f64, Point) -> (f64, [f64; 2], f64) + Sync,
{
    (0..mesh.len())
        .into_par_iter()
        .filter(|&e| keep(e))
        .map(|e| {
            let map = &mesh.elements[e].map;
            let mut acc = PairIntegrals::default();
            for (xi, eta, w) in element_rule(mesh, e, eps, p) {
                let (x, jac) = map.eval(xi, eta);
                let (u, g, ww) = eval(e, xi, eta, x);
                let dw = w * det(&jac).abs();
                acc.u0 += dw * u * u;
                acc.u1 += dw * (g[0] * g[0] + g[1] * g[1]);
                acc.w0 += dw * ww * ww;
            }
            for i in 0..MAX_SAMPLES {
                for j in 0..MAX_SAMPLES {
                    let xi = i as f64 / (MAX_SAMPLES - 1) as f64;
                    let eta = j as f64 / (MAX_SAMPLES - 1) as f64;
                    let x = map.point(xi, eta);
                    let (u, _, ww) = eval(e, xi, eta, x);
                    acc.max_u = acc.max_u.max(u.abs());
                    acc.max_w = acc.max_w.max(ww.abs());
                }
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(PairIntegrals::default(), PairIntegrals::add)
}

/// Norms of a pair of closed-form fields over the selected elements.
pub fn field_pair_integrals(
    u: &dyn Field2D,
    w: &dyn Field2D,
    mesh: &SblMesh2D,
    eps: f64,
    p: usize,
    keep: impl Fn(usize) -> bool + Sync,
) -> PairIntegrals {
    integrate_pair(mesh, eps, p, keep, |_, _, _, x| {
        (u.value(x), u.grad(x), w.value(x))
    })
}

/// Integrals of `(u − u_p, w − w_p)` over the selected elements.
pub fn error_integrals(
    exact_u: &dyn Field2D,
    exact_w: &dyn Field2D,
    field: &MixedDiscreteField,
    eps: f64,
    keep: impl Fn(usize) -> bool + Sync,
) -> PairIntegrals {
    let basis = field.basis();
    integrate_pair(&field.mesh, eps, field.p, keep, |e, xi, eta, x| {
        let pb = tabulate(&basis, &field.mesh.elements[e].map, xi, eta, 1.0);
        let (u, g) = field.u.eval_tabulated(&field.dofs, e, &pb);
        let (w, _) = field.w.eval_tabulated(&field.dofs, e, &pb);
        let ge = exact_u.grad(x);
        (
            exact_u.value(x) - u,
            [ge[0] - g[0], ge[1] - g[1]],
            exact_w.value(x) - w,
        )
    })
}

/// Error norms of a discrete solution against the exact solution.
pub fn norms_2d(
    problem: &ProblemSpec2D,
    field: &MixedDiscreteField,
    kappa: f64,
) -> crate::Result<NormReport2D> {
    let exact = problem
        .exact
        .as_ref()
        .ok_or(crate::Error::MissingDecomposition)?;
    let ints = error_integrals(&*exact.u, &*exact.w, field, problem.eps, |_| true);
    let mut report = NormReport2D::from_integrals(&ints, problem.eps, problem.b, problem.c);
    report.problem = problem.name.clone();
    report.p = field.p;
    report.kappa = kappa;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem2d::problem::ZeroField;
    use crate::meshing::build_sbl_mesh_disk;

    #[test]
    fn zero_fields_have_zero_norms() {
        let mesh = build_sbl_mesh_disk(0.5, 4, 1.0, 3, 1e-3).unwrap();
        let ints = field_pair_integrals(&ZeroField, &ZeroField, &mesh, 1e-3, 3, |_| true);
        let r = NormReport2D::from_integrals(&ints, 1e-3, 1.0, 1.0);
        assert_eq!((r.energy, r.balanced, r.max_u), (0.0, 0.0, 0.0));
    }

    #[test]
    fn constant_integrates_to_area() {
        use crate::fem2d::problem::RadialField;
        let mesh = build_sbl_mesh_disk(0.5, 8, 1.0, 4, 1e-4).unwrap();
        let one = RadialField::new(|_| (1.0, 0.0));
        let ints = field_pair_integrals(&one, &ZeroField, &mesh, 1e-4, 4, |_| true);
        assert!((ints.u0 - std::f64::consts::PI).abs() < 1e-10);
    }
}
