use crate::error::Result;
use crate::fem1d::problem::ProblemSpec1D;
use crate::fem1d::space::{DiscreteField1D, DofMap1D};
use crate::linsolve::{solve_direct, CsrMatrix, SparseSystem};
use crate::meshing::{build_mesh_1d, SblMesh1D};
use crate::polybasis::{gauss_rule, graded_rule, C1ReferenceBasis};

/// Gauss points per panel of the graded load rule.
pub const LOAD_POINTS_PER_PANEL: usize = 20;

/// Number of Gauss points used for the element matrices. `p + 3` is exact
/// for constant coefficients; variable coefficients get extra points.
pub fn matrix_points(p: usize, constant: bool) -> usize {
    if constant {
        p + 3
    } else {
        p + 12
    }
}

#[derive(Debug, Clone)]
pub struct Assembled1D {
    pub system: SparseSystem,
    pub dofs: DofMap1D,
}

/// Element matrix of `B_ε` in the reference basis, already scaled to the
/// physical element `[a, b]`.
pub fn element_matrix(
    problem: &ProblemSpec1D,
    basis: &C1ReferenceBasis,
    a: f64,
    b: f64,
) -> Vec<Vec<f64>> {
    let n = basis.len();
    let h = b - a;
    let j = 2.0 / h;
    let rule = gauss_rule(matrix_points(
        basis.degree(),
        problem.has_constant_coefficients(),
    ));
    let eps2 = problem.eps * problem.eps;
    let mut k = vec![vec![0.0; n]; n];
    for (x, w) in rule.mapped(a, b) {
        let t = j * (x - a) - 1.0;
        let v = basis.eval(t);
        let bx = problem.b.eval(x);
        let cx = problem.c.eval(x);
        for r in 0..n {
            let (r0, r1, r2) = (v.d0[r], v.d1[r] * j, v.d2[r] * j * j);
            for s in r..n {
                let val = eps2 * r2 * v.d2[s] * j * j + bx * r1 * v.d1[s] * j + cx * r0 * v.d0[s];
                k[r][s] += w * val;
            }
        }
    }
    for r in 0..n {
        for s in 0..r {
            k[r][s] = k[s][r];
        }
    }
    k
}

/// Element load vector `∫ f φ_a` with a layer-resolving composite rule.
pub fn element_load(problem: &ProblemSpec1D, basis: &C1ReferenceBasis, a: f64, b: f64) -> Vec<f64> {
    let h = b - a;
    let mut out = vec![0.0; basis.len()];
    for (x, w) in graded_rule(a, b, problem.eps, LOAD_POINTS_PER_PANEL) {
        let t = 2.0 * (x - a) / h - 1.0;
        let v = basis.eval(t);
        let fx = (problem.f)(x);
        for (o, phi) in out.iter_mut().zip(&v.d0) {
            *o += w * fx * phi;
        }
    }
    out
}

/// Assembles the clamped Galerkin system on `mesh`.
pub fn assemble_1d(problem: &ProblemSpec1D, mesh: &SblMesh1D, p: usize) -> Result<Assembled1D> {
    problem.validate()?;
    let basis = C1ReferenceBasis::new(p)?;
    let dofs = DofMap1D::new(p, mesh.num_elements());
    let n = dofs.num_free();
    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; n];
    for e in 0..mesh.num_elements() {
        let (a, b) = mesh.element(e);
        let h = b - a;
        let km = element_matrix(problem, &basis, a, b);
        let fl = element_load(problem, &basis, a, b);
        for r in 0..basis.len() {
            let Some(gr) = dofs.free(dofs.global(e, r)) else {
                continue;
            };
            let sr = dofs.scale(h, r);
            rhs[gr] += sr * fl[r];
            for s in 0..basis.len() {
                if let Some(gs) = dofs.free(dofs.global(e, s)) {
                    triplets.push((gr, gs, sr * dofs.scale(h, s) * km[r][s]));
                }
            }
        }
    }
    let matrix = CsrMatrix::from_triplets(n, n, triplets);
    Ok(Assembled1D {
        system: SparseSystem::new(matrix, rhs, true)?,
        dofs,
    })
}

/// Galerkin solution on the SBL mesh for `(κ, p, ε)`.
pub fn solve_1d(problem: &ProblemSpec1D, kappa: f64, p: usize) -> Result<DiscreteField1D> {
    let mesh = build_mesh_1d(kappa, p, problem.eps)?;
    solve_on_mesh(problem, &mesh, p)
}

pub fn solve_on_mesh(
    problem: &ProblemSpec1D,
    mesh: &SblMesh1D,
    p: usize,
) -> Result<DiscreteField1D> {
    let asm = assemble_1d(problem, mesh, p)?;
    let x = solve_direct(&asm.system)?;
    let mut coeffs = vec![0.0; asm.dofs.len()];
    coeffs[2..2 + x.len()].copy_from_slice(&x);
    DiscreteField1D::new(mesh.clone(), p, coeffs)
}

/// `B_ε(w, v)` for two members of the same discrete space, from the
/// assembled element matrices (clamped DOFs included).
pub fn bilinear_discrete(problem: &ProblemSpec1D, w: &DiscreteField1D, v: &DiscreteField1D) -> f64 {
    let basis = w.basis();
    let mut acc = 0.0;
    for e in 0..w.mesh.num_elements() {
        let (a, b) = w.mesh.element(e);
        let km = element_matrix(problem, basis, a, b);
        let (lw, lv) = (w.local_coeffs(e), v.local_coeffs(e));
        for r in 0..lw.len() {
            for s in 0..lv.len() {
                acc += lw[r] * km[r][s] * lv[s];
            }
        }
    }
    acc
}

/// Galerkin orthogonality residual `max_i |B_ε(u − u_p, v_i)|` over the free
/// basis functions, relative to `max_i |B_ε(u, v_i)|`. `B_ε(u, v_i)` is
/// integrated with the graded rule from the exact derivatives.
pub fn galerkin_residual(problem: &ProblemSpec1D, uh: &DiscreteField1D) -> Result<f64> {
    let u = &problem.exact().ok_or(crate::Error::MissingDecomposition)?.u;
    let asm = assemble_1d(problem, &uh.mesh, uh.p)?;
    let basis = uh.basis();
    let dofs = &asm.dofs;
    let eps2 = problem.eps * problem.eps;
    let mut exact = vec![0.0; dofs.num_free()];
    for e in 0..uh.mesh.num_elements() {
        let (a, b) = uh.mesh.element(e);
        let h = b - a;
        let j = 2.0 / h;
        for (x, w) in graded_rule(a, b, problem.eps, LOAD_POINTS_PER_PANEL) {
            let v = basis.eval(j * (x - a) - 1.0);
            let (u0, u1, u2) = (u.derivative(x, 0), u.derivative(x, 1), u.derivative(x, 2));
            let (bx, cx) = (problem.b.eval(x), problem.c.eval(x));
            for r in 0..basis.len() {
                if let Some(g) = dofs.free(dofs.global(e, r)) {
                    let val =
                        eps2 * u2 * v.d2[r] * j * j + bx * u1 * v.d1[r] * j + cx * u0 * v.d0[r];
                    exact[g] += w * dofs.scale(h, r) * val;
                }
            }
        }
    }
    let disc = asm.system.matrix.mul_vec(uh.free_coeffs());
    let scale = exact.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let worst = exact
        .iter()
        .zip(&disc)
        .fold(0.0f64, |m, (a, d)| m.max((a - d).abs()));
    Ok(worst / scale.max(f64::MIN_POSITIVE))
}
