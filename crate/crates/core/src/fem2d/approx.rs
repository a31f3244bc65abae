//! Interpolants, regular-region projections and the special
//! representatives `(ũ, w̃)` of the mixed method.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem2d::norms::element_rule;
use crate::fem2d::problem::{Field2D, ProblemSpec2D};
use crate::fem2d::space::{tabulate, DofMap2D, NodalField};
use crate::linsolve::{solve_direct, CsrMatrix, SparseSystem};
use crate::meshing::mesh2d::det;
use crate::meshing::{ElementTag, SblMesh2D};
use crate::polybasis::GaussLobattoBasis;

/// Nodal Gauss–Lobatto interpolant; `zero_trace` forces boundary nodes to 0.
pub fn interpolate_gl(g: &dyn Field2D, dofs: &DofMap2D, zero_trace: bool) -> NodalField {
    let values = dofs
        .coords
        .iter()
        .zip(&dofs.on_boundary)
        .map(|(&x, &b)| if zero_trace && b { 0.0 } else { g.value(x) })
        .collect();
    NodalField { values }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProjectionMode {
    L2,
    WeightedH1 { b: f64, c: f64 },
}

/// Elements of `Ω_REG` (everything but the needles).
pub fn regular_elements(mesh: &SblMesh2D) -> Vec<usize> {
    (0..mesh.len())
        .filter(|&e| mesh.elements[e].tag != ElementTag::Needle)
        .collect()
}

/// Projection onto the discrete space restricted to `Ω_REG`, without
/// boundary conditions. Nodes outside `Ω_REG` get the value 0; the mask
/// marks nodes of `Ω_REG`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularProjection {
    pub field: NodalField,
    pub mask: Vec<bool>,
}

pub fn project_regular(
    g: &dyn Field2D,
    mesh: &SblMesh2D,
    dofs: &DofMap2D,
    mode: ProjectionMode,
    eps: f64,
) -> Result<RegularProjection> {
    let basis = GaussLobattoBasis::new(dofs.p)?;
    let elements = regular_elements(mesh);
    let mut mask = vec![false; dofs.num_nodes()];
    for &e in &elements {
        for &n in &dofs.element_nodes[e] {
            mask[n] = true;
        }
    }
    let mut index = vec![usize::MAX; dofs.num_nodes()];
    let mut count = 0;
    for (n, &m) in mask.iter().enumerate() {
        if m {
            index[n] = count;
            count += 1;
        }
    }
    let (kb, kc) = match mode {
        ProjectionMode::L2 => (0.0, 1.0),
        ProjectionMode::WeightedH1 { b, c } => (b, c),
    };
    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; count];
    for &e in &elements {
        let nodes = &dofs.element_nodes[e];
        let map = &mesh.elements[e].map;
        let n = nodes.len();
        let mut local = vec![vec![0.0; n]; n];
        let mut load = vec![0.0; n];
        for (xi, eta, w) in element_rule(mesh, e, eps, dofs.p) {
            let pb = tabulate(&basis, map, xi, eta, w);
            let gv = g.value(pb.point);
            let gg = g.grad(pb.point);
            for a in 0..n {
                let (va, ga) = (pb.values[a], pb.grads[a]);
                load[a] += pb.weight * (kc * gv * va + kb * (gg[0] * ga[0] + gg[1] * ga[1]));
                for b in 0..n {
                    let (vb, gb) = (pb.values[b], pb.grads[b]);
                    local[a][b] +=
                        pb.weight * (kc * va * vb + kb * (ga[0] * gb[0] + ga[1] * gb[1]));
                }
            }
        }
        for a in 0..n {
            let ia = index[nodes[a]];
            rhs[ia] += load[a];
            for b in 0..n {
                triplets.push((ia, index[nodes[b]], local[a][b]));
            }
        }
    }
    let system = SparseSystem::new(CsrMatrix::from_triplets(count, count, triplets), rhs, true)?;
    let x = solve_direct(&system)?;
    let values = (0..dofs.num_nodes())
        .map(|n| if mask[n] { x[index[n]] } else { 0.0 })
        .collect();
    Ok(RegularProjection {
        field: NodalField { values },
        mask,
    })
}

/// `χ₂` on a needle element as a function of its reference coordinate:
/// `0` on the circle, `1` on the needle/regular interface.
pub fn chi2(xi: f64) -> f64 {
    xi
}

/// `(‖χ₂‖_{0,Ω_BL}, ‖∇χ₂‖_{0,Ω_BL})` by quadrature over the needles.
pub fn chi2_norms(mesh: &SblMesh2D, eps: f64, p: usize) -> Result<(f64, f64)> {
    if !mesh.needle {
        return Err(Error::Unsupported(
            "chi2 lives on needle elements only".into(),
        ));
    }
    let (mut l2, mut h1) = (0.0, 0.0);
    for (e, el) in mesh.elements.iter().enumerate() {
        if el.tag != ElementTag::Needle {
            continue;
        }
        for (xi, eta, w) in element_rule(mesh, e, eps, p) {
            let (_, jac) = el.map.eval(xi, eta);
            let d = det(&jac);
            let it = crate::meshing::mesh2d::inv_transpose(&jac);
            // reference gradient of χ₂ is (1, 0)
            let g = [it[0][0], it[1][0]];
            l2 += w * d.abs() * chi2(xi).powi(2);
            h1 += w * d.abs() * (g[0] * g[0] + g[1] * g[1]);
        }
    }
    Ok((l2.sqrt(), h1.sqrt()))
}

/// `(ũ, w̃)` with the projections they are built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecialRepresentatives2D {
    pub u: NodalField,
    pub w: NodalField,
    pub pi1: RegularProjection,
    pub pi2: RegularProjection,
}

/// Needle nodes take `J_p w − χ₂·(w − π¹_p w^{SR})|_{∂Ω_REG}` (and the
/// analogue for `u` with `I_p` and `π²_p`); the trace is read at the
/// interface node with the same η index. Nodes of `Ω_REG` take the
/// projection values.
pub fn special_representatives_2d(
    problem: &ProblemSpec2D,
    mesh: &SblMesh2D,
    p: usize,
) -> Result<SpecialRepresentatives2D> {
    if !mesh.needle {
        return Err(Error::Unsupported(
            "special representatives need the needle regime (kappa p eps < 1/2)".into(),
        ));
    }
    let parts = problem.decomposition()?;
    let exact = problem.exact.as_ref().ok_or(Error::MissingDecomposition)?;
    let dofs = DofMap2D::new(mesh, p)?;
    let w_sr = SumField(vec![parts.w_smooth.clone(), parts.w_remainder.clone()]);
    let u_sr = SumField(vec![parts.u_smooth.clone(), parts.u_remainder.clone()]);
    let pi1 = project_regular(&w_sr, mesh, &dofs, ProjectionMode::L2, problem.eps)?;
    let pi2 = project_regular(
        &u_sr,
        mesh,
        &dofs,
        ProjectionMode::WeightedH1 {
            b: problem.b,
            c: problem.c,
        },
        problem.eps,
    )?;
    let jw = interpolate_gl(&*exact.w, &dofs, false);
    let iu = interpolate_gl(&*exact.u, &dofs, true);
    let mut u = pi2.field.clone();
    let mut w = pi1.field.clone();
    let n1 = p + 1;
    let basis = GaussLobattoBasis::new(p)?;
    let xi: Vec<f64> = basis.nodes().iter().map(|t| 0.5 * (t + 1.0)).collect();
    for (e, el) in mesh.elements.iter().enumerate() {
        if el.tag != ElementTag::Needle {
            continue;
        }
        let nodes = &dofs.element_nodes[e];
        for j in 0..n1 {
            let iface = nodes[p + n1 * j];
            let dw = jw.values[iface] - pi1.field.values[iface];
            let du = iu.values[iface] - pi2.field.values[iface];
            for i in 0..p {
                let n = nodes[i + n1 * j];
                w.values[n] = jw.values[n] - chi2(xi[i]) * dw;
                u.values[n] = iu.values[n] - chi2(xi[i]) * du;
            }
        }
    }
    Ok(SpecialRepresentatives2D { u, w, pi1, pi2 })
}

/// Sum of shared fields.
pub struct SumField(pub Vec<crate::fem2d::problem::SharedField>);

impl Field2D for SumField {
    fn value(&self, p: [f64; 2]) -> f64 {
        self.0.iter().map(|f| f.value(p)).sum()
    }

    fn grad(&self, p: [f64; 2]) -> [f64; 2] {
        self.0.iter().fold([0.0, 0.0], |acc, f| {
            let g = f.grad(p);
            [acc[0] + g[0], acc[1] + g[1]]
        })
    }
}

/// `ε^{-1}‖u^{BL}‖_{0,Ω∖Ω₀} + ‖w^{BL}‖_{0,Ω∖Ω₀}`, `Ω₀` the boundary ring
/// of the asymptotic mesh.
pub fn bl_size(problem: &ProblemSpec2D, mesh: &SblMesh2D, p: usize) -> Result<f64> {
    let parts = problem.decomposition()?;
    let inner = |e: usize| {
        let el = &mesh.elements[e];
        el.tag == ElementTag::Asymptotic && el.boundary_edge.is_none()
    };
    let ints = crate::fem2d::norms::field_pair_integrals(
        &*parts.u_layer,
        &*parts.w_layer,
        mesh,
        problem.eps,
        p,
        inner,
    );
    Ok(ints.u0.sqrt() / problem.eps + ints.w0.sqrt())
}

/// Integrals of `(g_u − a, g_w − b)` for nodal fields `a`, `b` over the
/// selected elements.
#[allow(clippy::too_many_arguments)]
pub fn nodal_error_integrals(
    g_u: &dyn Field2D,
    g_w: &dyn Field2D,
    a: &NodalField,
    b: &NodalField,
    mesh: &SblMesh2D,
    dofs: &DofMap2D,
    eps: f64,
    keep: impl Fn(usize) -> bool + Sync,
) -> Result<crate::fem2d::norms::PairIntegrals> {
    let basis = GaussLobattoBasis::new(dofs.p)?;
    Ok(crate::fem2d::norms::integrate_pair(
        mesh,
        eps,
        dofs.p,
        keep,
        |e, xi, eta, x| {
            let pb = tabulate(&basis, &mesh.elements[e].map, xi, eta, 1.0);
            let (u, g) = a.eval_tabulated(dofs, e, &pb);
            let (w, _) = b.eval_tabulated(dofs, e, &pb);
            let ge = g_u.grad(x);
            (
                g_u.value(x) - u,
                [ge[0] - g[0], ge[1] - g[1]],
                g_w.value(x) - w,
            )
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem2d::problem::{RadialField, ZeroField};
    use crate::meshing::build_sbl_mesh_disk;

    struct Linear;
    impl Field2D for Linear {
        fn value(&self, p: [f64; 2]) -> f64 {
            p[0] + 2.0 * p[1]
        }
        fn grad(&self, _p: [f64; 2]) -> [f64; 2] {
            [1.0, 2.0]
        }
    }

    #[test]
    fn interpolant_reproduces_bilinear_and_zero_trace() {
        let mesh = build_sbl_mesh_disk(0.5, 8, 1.0, 3, 1e-3).unwrap();
        let dofs = DofMap2D::new(&mesh, 3).unwrap();
        let f = interpolate_gl(&Linear, &dofs, false);
        let basis = GaussLobattoBasis::new(3).unwrap();
        // exact only where the element map is affine: the inner squares
        for e in mesh.len() - 4..mesh.len() {
            let (v, g) = f.eval(&mesh, &dofs, &basis, e, 0.3, 0.7);
            let x = mesh.elements[e].point(0.3, 0.7);
            assert!((v - Linear.value(x)).abs() < 1e-12);
            assert!((g[0] - 1.0).abs() < 1e-11 && (g[1] - 2.0).abs() < 1e-11);
        }
        let one = RadialField::new(|_| (1.0, 0.0));
        let z = interpolate_gl(&one, &dofs, true);
        for (v, b) in z.values.iter().zip(&dofs.on_boundary) {
            assert_eq!(*v, if *b { 0.0 } else { 1.0 });
        }
    }

    #[test]
    fn projection_fixes_discrete_functions() {
        let mesh = build_sbl_mesh_disk(0.5, 4, 1.0, 2, 1e-3).unwrap();
        let dofs = DofMap2D::new(&mesh, 2).unwrap();
        for mode in [
            ProjectionMode::L2,
            ProjectionMode::WeightedH1 { b: 1.0, c: 2.0 },
        ] {
            let one = RadialField::new(|_| (1.0, 0.0));
            let pr = project_regular(&one, &mesh, &dofs, mode, 1e-3).unwrap();
            for (v, m) in pr.field.values.iter().zip(&pr.mask) {
                if *m {
                    assert!((v - 1.0).abs() < 1e-10);
                }
            }
        }
        let z = project_regular(&ZeroField, &mesh, &dofs, ProjectionMode::L2, 1e-3).unwrap();
        assert!(z.field.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn chi2_scaling() {
        let mut rows = Vec::new();
        for eps in [1e-3, 1e-4, 1e-5, 1e-6] {
            let p = 4;
            let mesh = build_sbl_mesh_disk(0.5, 8, 1.0, p, eps).unwrap();
            let (l2, h1) = chi2_norms(&mesh, eps, p).unwrap();
            let t = p as f64 * eps;
            rows.push((l2 / t.sqrt(), h1 * t.sqrt()));
        }
        for r in &rows {
            assert!(r.0 / rows[0].0 < 2.0 && rows[0].0 / r.0 < 2.0);
            assert!(r.1 / rows[0].1 < 2.0 && rows[0].1 / r.1 < 2.0);
        }
    }
}
