//! Assembly and solution of the mixed system in `(u, w = εΔu)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem2d::problem::ProblemSpec2D;
use crate::fem2d::space::{tabulate, DofMap2D, MixedDiscreteField, NodalField};
use crate::linsolve::{solve_direct, CsrMatrix, SparseSystem};
use crate::meshing::mesh2d::build_sbl_mesh_disk;
use crate::meshing::SblMesh2D;
use crate::polybasis::{gauss_rule, GaussLobattoBasis};

/// Mesh options of the disk.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DiskMeshConfig {
    pub rho0: f64,
    pub n_sectors: usize,
}

impl Default for DiskMeshConfig {
    fn default() -> Self {
        Self {
            rho0: 0.5,
            n_sectors: 8,
        }
    }
}

/// Element stiffness `⟨∇N_a, ∇N_b⟩`, mass `⟨N_a, N_b⟩` and load `⟨f, N_a⟩`.
#[derive(Debug, Clone)]
pub struct ElementMatrices {
    pub stiffness: Vec<Vec<f64>>,
    pub mass: Vec<Vec<f64>>,
    pub load: Vec<f64>,
}

pub fn element_matrices(
    mesh: &SblMesh2D,
    e: usize,
    basis: &GaussLobattoBasis,
    f: &(dyn Fn([f64; 2]) -> f64 + Sync),
) -> ElementMatrices {
    let p = basis.degree();
    let n = (p + 1) * (p + 1);
    let mut stiffness = vec![vec![0.0; n]; n];
    let mut mass = vec![vec![0.0; n]; n];
    let mut load = vec![0.0; n];
    let rule = gauss_rule(p + 3);
    let map = &mesh.elements[e].map;
    for (xi, wx) in rule.mapped(0.0, 1.0) {
        for (eta, wy) in rule.mapped(0.0, 1.0) {
            let pb = tabulate(basis, map, xi, eta, wx * wy);
            let fx = f(pb.point);
            for a in 0..n {
                let (va, ga) = (pb.values[a], pb.grads[a]);
                load[a] += pb.weight * fx * va;
                for b in a..n {
                    let (vb, gb) = (pb.values[b], pb.grads[b]);
                    stiffness[a][b] += pb.weight * (ga[0] * gb[0] + ga[1] * gb[1]);
                    mass[a][b] += pb.weight * va * vb;
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            stiffness[a][b] = stiffness[b][a];
            mass[a][b] = mass[b][a];
        }
    }
    ElementMatrices {
        stiffness,
        mass,
        load,
    }
}

/// Unknown numbering: per node, `u` (interior nodes only) then `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedNumbering {
    pub u: Vec<Option<usize>>,
    pub w: Vec<usize>,
    pub len: usize,
}

impl MixedNumbering {
    pub fn new(dofs: &DofMap2D) -> Self {
        let mut u = Vec::with_capacity(dofs.num_nodes());
        let mut w = Vec::with_capacity(dofs.num_nodes());
        let mut next = 0;
        for &b in &dofs.on_boundary {
            if b {
                u.push(None);
            } else {
                u.push(Some(next));
                next += 1;
            }
            w.push(next);
            next += 1;
        }
        Self { u, w, len: next }
    }
}

#[derive(Debug, Clone)]
pub struct AssembledMixed {
    pub system: SparseSystem,
    pub dofs: DofMap2D,
    pub numbering: MixedNumbering,
}

/// Assembles `A_ε((u, w), (ψ, φ)) = ⟨f, ψ⟩`: `ψ`-rows
/// `b⟨∇u,∇ψ⟩ + c⟨u,ψ⟩ − ε⟨∇w,∇ψ⟩` and `φ`-rows `ε⟨∇u,∇φ⟩ + ⟨w,φ⟩`.
pub fn assemble_mixed(
    problem: &ProblemSpec2D,
    mesh: &SblMesh2D,
    p: usize,
) -> Result<AssembledMixed> {
    if p < 2 {
        return Err(Error::InvalidDegree {
            degree: p,
            min: 2,
            what: "mixed 2D method",
        });
    }
    problem.validate()?;
    let basis = GaussLobattoBasis::new(p)?;
    let dofs = DofMap2D::new(mesh, p)?;
    let numbering = MixedNumbering::new(&dofs);
    let f = problem.f.clone();
    let locals: Vec<ElementMatrices> = (0..mesh.len())
        .into_par_iter()
        .map(|e| element_matrices(mesh, e, &basis, &*f))
        .collect();
    let (eps, b, c) = (problem.eps, problem.b, problem.c);
    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; numbering.len];
    // element order is fixed, so the reduction is deterministic
    for (e, em) in locals.iter().enumerate() {
        let nodes = &dofs.element_nodes[e];
        for (a, &na) in nodes.iter().enumerate() {
            let phi_row = numbering.w[na];
            let psi_row = numbering.u[na];
            if let Some(r) = psi_row {
                rhs[r] += em.load[a];
            }
            for (bb, &nb) in nodes.iter().enumerate() {
                let (k, m) = (em.stiffness[a][bb], em.mass[a][bb]);
                let u_col = numbering.u[nb];
                let w_col = numbering.w[nb];
                if let Some(r) = psi_row {
                    if let Some(col) = u_col {
                        triplets.push((r, col, b * k + c * m));
                    }
                    triplets.push((r, w_col, -eps * k));
                }
                if let Some(col) = u_col {
                    triplets.push((phi_row, col, eps * k));
                }
                triplets.push((phi_row, w_col, m));
            }
        }
    }
    let matrix = CsrMatrix::from_triplets(numbering.len, numbering.len, triplets);
    Ok(AssembledMixed {
        system: SparseSystem::new(matrix, rhs, false)?,
        dofs,
        numbering,
    })
}

/// Solves on a given mesh.
pub fn solve_mixed_on_mesh(
    problem: &ProblemSpec2D,
    mesh: &SblMesh2D,
    p: usize,
) -> Result<MixedDiscreteField> {
    let asm = assemble_mixed(problem, mesh, p)?;
    let x = solve_direct(&asm.system)?;
    if let Some(row) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            row,
            col: usize::MAX,
        });
    }
    Ok(field_from_vector(mesh, p, asm.dofs, &asm.numbering, &x))
}

pub fn field_from_vector(
    mesh: &SblMesh2D,
    p: usize,
    dofs: DofMap2D,
    numbering: &MixedNumbering,
    x: &[f64],
) -> MixedDiscreteField {
    let u = numbering
        .u
        .iter()
        .map(|i| i.map_or(0.0, |i| x[i]))
        .collect();
    let w = numbering.w.iter().map(|&i| x[i]).collect();
    MixedDiscreteField {
        mesh: mesh.clone(),
        p,
        dofs,
        u: NodalField { values: u },
        w: NodalField { values: w },
    }
}

/// Builds the SBL disk mesh for `(κ, p, ε)` and solves.
pub fn solve_mixed(
    problem: &ProblemSpec2D,
    kappa: f64,
    p: usize,
    config: DiskMeshConfig,
) -> Result<MixedDiscreteField> {
    let mesh = build_sbl_mesh_disk(config.rho0, config.n_sectors, kappa, p, problem.eps)?;
    solve_mixed_on_mesh(problem, &mesh, p)
}

/// Vector of unknowns of a discrete pair.
pub fn field_to_vector(field: &MixedDiscreteField, numbering: &MixedNumbering) -> Vec<f64> {
    let mut x = vec![0.0; numbering.len];
    for (n, i) in numbering.u.iter().enumerate() {
        if let Some(i) = i {
            x[*i] = field.u.values[n];
        }
        x[numbering.w[n]] = field.w.values[n];
    }
    x
}

/// Galerkin orthogonality residual `max |A_ε((u − u_p, w − w_p), (ψ, φ))|`
/// over all discrete test functions, relative to `max |A_ε((u, w), ·)|`.
/// The exact-solution part is integrated with the graded norm rule.
pub fn galerkin_residual(problem: &ProblemSpec2D, field: &MixedDiscreteField) -> Result<f64> {
    let exact = problem.exact.as_ref().ok_or(Error::MissingDecomposition)?;
    let asm = assemble_mixed(problem, &field.mesh, field.p)?;
    let numbering = &asm.numbering;
    let basis = field.basis();
    let (eps, b, c) = (problem.eps, problem.b, problem.c);
    let mut a_exact = vec![0.0; numbering.len];
    for e in 0..field.mesh.len() {
        let nodes = &field.dofs.element_nodes[e];
        let map = &field.mesh.elements[e].map;
        for (xi, eta, w) in crate::fem2d::norms::element_rule(&field.mesh, e, eps, field.p) {
            let pb = tabulate(&basis, map, xi, eta, w);
            let (u, gu) = (exact.u.value(pb.point), exact.u.grad(pb.point));
            let (wv, gw) = (exact.w.value(pb.point), exact.w.grad(pb.point));
            for (a, &n) in nodes.iter().enumerate() {
                let (v, g) = (pb.values[a], pb.grads[a]);
                let du = gu[0] * g[0] + gu[1] * g[1];
                let dw = gw[0] * g[0] + gw[1] * g[1];
                if let Some(r) = numbering.u[n] {
                    a_exact[r] += pb.weight * (b * du + c * u * v - eps * dw);
                }
                a_exact[numbering.w[n]] += pb.weight * (eps * du + wv * v);
            }
        }
    }
    let x = field_to_vector(field, numbering);
    let a_disc = asm.system.matrix.mul_vec(&x);
    let scale = a_exact.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let worst = a_exact
        .iter()
        .zip(&a_disc)
        .fold(0.0f64, |m, (a, d)| m.max((a - d).abs()));
    Ok(worst / scale.max(f64::MIN_POSITIVE))
}
