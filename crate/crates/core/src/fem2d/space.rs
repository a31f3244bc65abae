//! Tensor Gauss–Lobatto `Q_p` spaces on the disk mesh.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meshing::mesh2d::{det, inv_transpose, Point};
use crate::meshing::{RefEdge, SblMesh2D};
use crate::polybasis::GaussLobattoBasis;

/// Local index of the `k`-th node along `edge`, following the edge's
/// counterclockwise parameter.
fn edge_node(edge: RefEdge, p: usize, k: usize) -> (usize, usize) {
    match edge {
        RefEdge::Eta0 => (k, 0),
        RefEdge::Xi1 => (p, k),
        RefEdge::Eta1 => (p - k, p),
        RefEdge::Xi0 => (0, p - k),
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Global numbering of the mapped Gauss–Lobatto nodes. Nodes shared by
/// neighboring elements are identified through the edge pairing, not by
/// coordinates, which keeps needle elements of any thickness conforming.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DofMap2D {
    pub p: usize,
    /// Global node of local node `i + (p+1)·j` (`i` along ξ, `j` along η).
    pub element_nodes: Vec<Vec<usize>>,
    pub coords: Vec<Point>,
    pub on_boundary: Vec<bool>,
}

impl DofMap2D {
    pub fn new(mesh: &SblMesh2D, p: usize) -> Result<Self> {
        let basis = GaussLobattoBasis::new(p)?;
        let n1 = p + 1;
        let per = n1 * n1;
        let pairing = mesh.edge_pairing()?;
        let mut parent: Vec<usize> = (0..mesh.len() * per).collect();
        let slot = |e: usize, (i, j): (usize, usize)| e * per + i + n1 * j;
        for (e, sides) in pairing.iter().enumerate() {
            for edge in RefEdge::ALL {
                if let Some((f, other)) = sides[crate::meshing::mesh2d::edge_slot(edge)] {
                    for k in 0..=p {
                        let a = find(&mut parent, slot(e, edge_node(edge, p, k)));
                        let b = find(&mut parent, slot(f, edge_node(other, p, p - k)));
                        if a != b {
                            parent[a.max(b)] = a.min(b);
                        }
                    }
                }
            }
        }
        let xi: Vec<f64> = basis.nodes().iter().map(|t| 0.5 * (t + 1.0)).collect();
        let mut global = vec![usize::MAX; parent.len()];
        let mut coords = Vec::new();
        let mut element_nodes = Vec::with_capacity(mesh.len());
        for (e, el) in mesh.elements.iter().enumerate() {
            let mut nodes = Vec::with_capacity(per);
            let (lo, hi) = (el.point(0.0, 0.0), el.point(1.0, 1.0));
            let diameter = (hi[0] - lo[0]).hypot(hi[1] - lo[1]);
            for j in 0..n1 {
                for i in 0..n1 {
                    let root = find(&mut parent, slot(e, (i, j)));
                    if global[root] == usize::MAX {
                        global[root] = coords.len();
                        coords.push(el.point(xi[i], xi[j]));
                    }
                    let g = global[root];
                    let x = el.point(xi[i], xi[j]);
                    let c = coords[g];
                    // shared edges must be parametrized alike on both sides
                    if (x[0] - c[0]).hypot(x[1] - c[1]) > 1e-9 * diameter {
                        return Err(Error::Unsupported(format!(
                            "element {e} node ({i},{j}) does not match its identified neighbor node"
                        )));
                    }
                    nodes.push(g);
                }
            }
            element_nodes.push(nodes);
        }
        let mut on_boundary = vec![false; coords.len()];
        for (e, sides) in pairing.iter().enumerate() {
            for edge in RefEdge::ALL {
                if sides[crate::meshing::mesh2d::edge_slot(edge)].is_none() {
                    for k in 0..=p {
                        let (i, j) = edge_node(edge, p, k);
                        on_boundary[element_nodes[e][i + n1 * j]] = true;
                    }
                }
            }
        }
        Ok(Self {
            p,
            element_nodes,
            coords,
            on_boundary,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.coords.len()
    }

    pub fn num_interior(&self) -> usize {
        self.on_boundary.iter().filter(|b| !**b).count()
    }
}

/// Basis values and physical gradients at one quadrature point.
#[derive(Debug, Clone)]
pub struct PointBasis {
    pub point: Point,
    /// `|det J|` times the quadrature weight.
    pub weight: f64,
    pub values: Vec<f64>,
    pub grads: Vec<[f64; 2]>,
}

/// Tabulates the `(p+1)²` tensor basis at reference point `(ξ, η) ∈ [0,1]²`
/// of an element, with physical gradients.
pub fn tabulate(
    basis: &GaussLobattoBasis,
    map: &crate::meshing::ElementMap,
    xi: f64,
    eta: f64,
    weight: f64,
) -> PointBasis {
    let (lx, dx) = basis.eval(2.0 * xi - 1.0);
    let (ly, dy) = basis.eval(2.0 * eta - 1.0);
    let (point, jac) = map.eval(xi, eta);
    let it = inv_transpose(&jac);
    let n1 = lx.len();
    let mut values = Vec::with_capacity(n1 * n1);
    let mut grads = Vec::with_capacity(n1 * n1);
    for j in 0..n1 {
        for i in 0..n1 {
            values.push(lx[i] * ly[j]);
            // d/dξ of L(2ξ − 1) is 2 L'
            let g = [2.0 * dx[i] * ly[j], 2.0 * lx[i] * dy[j]];
            grads.push([
                it[0][0] * g[0] + it[0][1] * g[1],
                it[1][0] * g[0] + it[1][1] * g[1],
            ]);
        }
    }
    PointBasis {
        point,
        weight: weight * det(&jac).abs(),
        values,
        grads,
    }
}

/// A scalar `Q_p` field given by nodal values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalField {
    pub values: Vec<f64>,
}

impl NodalField {
    /// Value and physical gradient on element `e` at reference `(ξ, η)`.
    pub fn eval(
        &self,
        mesh: &SblMesh2D,
        dofs: &DofMap2D,
        basis: &GaussLobattoBasis,
        e: usize,
        xi: f64,
        eta: f64,
    ) -> (f64, [f64; 2]) {
        let pb = tabulate(basis, &mesh.elements[e].map, xi, eta, 1.0);
        self.eval_tabulated(dofs, e, &pb)
    }

    pub fn eval_tabulated(&self, dofs: &DofMap2D, e: usize, pb: &PointBasis) -> (f64, [f64; 2]) {
        let mut v = 0.0;
        let mut g = [0.0; 2];
        for (a, &n) in dofs.element_nodes[e].iter().enumerate() {
            let c = self.values[n];
            v += c * pb.values[a];
            g[0] += c * pb.grads[a][0];
            g[1] += c * pb.grads[a][1];
        }
        (v, g)
    }
}

/// Discrete pair `(u_p, w_p)`: `u_p ∈ S₀^p`, `w_p ∈ S^p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedDiscreteField {
    pub mesh: SblMesh2D,
    pub p: usize,
    pub dofs: DofMap2D,
    pub u: NodalField,
    pub w: NodalField,
}

impl MixedDiscreteField {
    pub fn basis(&self) -> GaussLobattoBasis {
        GaussLobattoBasis::new(self.p).expect("degree validated at construction")
    }

    /// `((u, ∇u), (w, ∇w))` on element `e` at reference `(ξ, η)`.
    pub fn eval(&self, e: usize, xi: f64, eta: f64) -> ((f64, [f64; 2]), (f64, [f64; 2])) {
        let basis = self.basis();
        let pb = tabulate(&basis, &self.mesh.elements[e].map, xi, eta, 1.0);
        (
            self.u.eval_tabulated(&self.dofs, e, &pb),
            self.w.eval_tabulated(&self.dofs, e, &pb),
        )
    }

    /// Largest jump of `u` and `w` across interior edges, sampled at
    /// `samples` points per edge.
    pub fn max_trace_jump(&self, samples: usize) -> Result<f64> {
        let pairing = self.mesh.edge_pairing()?;
        let basis = self.basis();
        let mut worst: f64 = 0.0;
        for (e, sides) in pairing.iter().enumerate() {
            for edge in RefEdge::ALL {
                let Some((f, other)) = sides[crate::meshing::mesh2d::edge_slot(edge)] else {
                    continue;
                };
                for s in 0..samples {
                    let t = (s as f64 + 0.5) / samples as f64;
                    let (x1, y1) = edge.point(t);
                    let (x2, y2) = other.point(1.0 - t);
                    for field in [&self.u, &self.w] {
                        let a = field.eval(&self.mesh, &self.dofs, &basis, e, x1, y1).0;
                        let b = field.eval(&self.mesh, &self.dofs, &basis, f, x2, y2).0;
                        worst = worst.max((a - b).abs());
                    }
                }
            }
        }
        Ok(worst)
    }
}

impl MixedDiscreteField {
    /// Per-element `n × n` sample grids as CSV with columns
    /// `element,i,j,x,y,u,w`.
    pub fn to_csv(&self, n: usize) -> String {
        let basis = self.basis();
        let mut out = String::from("element,i,j,x,y,u,w\n");
        let step = 1.0 / (n.max(2) - 1) as f64;
        for e in 0..self.mesh.len() {
            for i in 0..n.max(2) {
                for j in 0..n.max(2) {
                    let (xi, eta) = (i as f64 * step, j as f64 * step);
                    let pb = tabulate(&basis, &self.mesh.elements[e].map, xi, eta, 1.0);
                    let u = self.u.eval_tabulated(&self.dofs, e, &pb).0;
                    let w = self.w.eval_tabulated(&self.dofs, e, &pb).0;
                    out.push_str(&format!(
                        "{e},{i},{j},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                        pb.point[0], pb.point[1], u, w
                    ));
                }
            }
        }
        out
    }
}
