//! Curvilinear quadrilateral meshes of the unit disk.
//!
//! The asymptotic mesh consists of a ring of `n_sectors` annular sectors
//! along the boundary, `n_sectors` Gordon–Hall blended quads between the
//! ring and an inscribed square, and an `m × m` grid of squares inside,
//! with `m = n_sectors / 4`. Boundary elements come first. Each element
//! map sends the reference square `[0,1]²` onto the cell with the reference
//! edge `ξ = 0` on the outer curve.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polybasis::gauss_rule;

pub type Point = [f64; 2];
/// `[[∂x/∂ξ, ∂x/∂η], [∂y/∂ξ, ∂y/∂η]]`
pub type Jacobian = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ElementTag {
    Needle,
    RegularSplit,
    Asymptotic,
}

/// Reference-square edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RefEdge {
    Xi0,
    Xi1,
    Eta0,
    Eta1,
}

impl RefEdge {
    pub const ALL: [RefEdge; 4] = [RefEdge::Eta0, RefEdge::Xi1, RefEdge::Eta1, RefEdge::Xi0];

    /// Reference point at parameter `t ∈ [0,1]`, traversing the boundary of
    /// the square counterclockwise.
    pub fn point(self, t: f64) -> (f64, f64) {
        match self {
            RefEdge::Eta0 => (t, 0.0),
            RefEdge::Xi1 => (1.0, t),
            RefEdge::Eta1 => (1.0 - t, 1.0),
            RefEdge::Xi0 => (0.0, 1.0 - t),
        }
    }
}

/// Closed-form parent maps of the asymptotic mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ParentMap {
    /// Bilinear map of corners given in reference order (0,0), (1,0), (1,1), (0,1).
    Bilinear { corners: [Point; 4] },
    /// Transfinite blend of a circular arc (`ξ = 0`) and a chord (`ξ = 1`).
    Blended {
        radius: f64,
        theta: [f64; 2],
        chord: [Point; 2],
    },
    /// Annular sector: radius `outer - thickness·ξ`, angle linear in `η`.
    Polar {
        outer: f64,
        thickness: f64,
        theta: [f64; 2],
    },
}

impl ParentMap {
    fn eval(&self, xi: f64, eta: f64) -> (Point, Jacobian) {
        match *self {
            ParentMap::Bilinear { corners: c } => {
                let x = |k: usize| {
                    (1.0 - xi) * (1.0 - eta) * c[0][k]
                        + xi * (1.0 - eta) * c[1][k]
                        + xi * eta * c[2][k]
                        + (1.0 - xi) * eta * c[3][k]
                };
                let dxi = |k: usize| (1.0 - eta) * (c[1][k] - c[0][k]) + eta * (c[2][k] - c[3][k]);
                let deta = |k: usize| (1.0 - xi) * (c[3][k] - c[0][k]) + xi * (c[2][k] - c[1][k]);
                ([x(0), x(1)], [[dxi(0), deta(0)], [dxi(1), deta(1)]])
            }
            ParentMap::Blended {
                radius,
                theta,
                chord,
            } => {
                let dth = theta[1] - theta[0];
                let th = theta[0] + dth * eta;
                let (s, c) = th.sin_cos();
                let arc = [radius * c, radius * s];
                let darc = [-radius * dth * s, radius * dth * c];
                let ch = [
                    chord[0][0] + eta * (chord[1][0] - chord[0][0]),
                    chord[0][1] + eta * (chord[1][1] - chord[0][1]),
                ];
                let dch = [chord[1][0] - chord[0][0], chord[1][1] - chord[0][1]];
                let pt = [
                    (1.0 - xi) * arc[0] + xi * ch[0],
                    (1.0 - xi) * arc[1] + xi * ch[1],
                ];
                let jac = [
                    [ch[0] - arc[0], (1.0 - xi) * darc[0] + xi * dch[0]],
                    [ch[1] - arc[1], (1.0 - xi) * darc[1] + xi * dch[1]],
                ];
                (pt, jac)
            }
            ParentMap::Polar {
                outer,
                thickness,
                theta,
            } => {
                let dth = theta[1] - theta[0];
                let th = theta[0] + dth * eta;
                let r = outer - thickness * xi;
                let (s, c) = th.sin_cos();
                (
                    [r * c, r * s],
                    [
                        [-thickness * c, -r * dth * s],
                        [-thickness * s, r * dth * c],
                    ],
                )
            }
        }
    }
}

/// A parent map restricted to a sub-rectangle `[ξ₀, ξ₁] × [0,1]` of the
/// reference square and rescaled back to `[0,1]²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementMap {
    pub parent: ParentMap,
    pub xi_range: [f64; 2],
}

impl ElementMap {
    pub fn whole(parent: ParentMap) -> Self {
        Self {
            parent,
            xi_range: [0.0, 1.0],
        }
    }

    pub fn parent_xi(&self, xi: f64) -> f64 {
        self.xi_range[0] + (self.xi_range[1] - self.xi_range[0]) * xi
    }

    pub fn eval(&self, xi: f64, eta: f64) -> (Point, Jacobian) {
        let scale = self.xi_range[1] - self.xi_range[0];
        let (pt, mut jac) = self.parent.eval(self.parent_xi(xi), eta);
        jac[0][0] *= scale;
        jac[1][0] *= scale;
        (pt, jac)
    }

    pub fn point(&self, xi: f64, eta: f64) -> Point {
        self.eval(xi, eta).0
    }
}

pub fn det(j: &Jacobian) -> f64 {
    j[0][0] * j[1][1] - j[0][1] * j[1][0]
}

/// Inverse transpose of the Jacobian, mapping reference gradients to
/// physical gradients.
pub fn inv_transpose(j: &Jacobian) -> Jacobian {
    let d = det(j);
    [[j[1][1] / d, -j[1][0] / d], [-j[0][1] / d, j[0][0] / d]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element2D {
    pub map: ElementMap,
    pub tag: ElementTag,
    /// Reference edge lying on the unit circle, if any.
    pub boundary_edge: Option<RefEdge>,
    /// Index of the asymptotic element this one was cut from.
    pub parent: usize,
}

impl Element2D {
    pub fn point(&self, xi: f64, eta: f64) -> Point {
        self.map.point(xi, eta)
    }

    pub fn edge_point(&self, edge: RefEdge, t: f64) -> Point {
        let (xi, eta) = edge.point(t);
        self.map.point(xi, eta)
    }

    pub fn is_in_regular_region(&self) -> bool {
        self.tag != ElementTag::Needle
    }
}

/// Neighbor `(element, edge)` across each reference edge, in
/// [`edge_slot`] order; `None` on the boundary.
pub type EdgeNeighbors = [Option<(usize, RefEdge)>; 4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskGeometry {
    pub radius: f64,
    pub rho0: f64,
    pub n_sectors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SblMesh2D {
    pub elements: Vec<Element2D>,
    /// Element count of the asymptotic mesh.
    pub n_asymptotic: usize,
    /// Number of asymptotic elements with an edge on the boundary.
    pub n_boundary: usize,
    /// Whether needle elements are present (`κpε < 1/2`).
    pub needle: bool,
    /// Reference needle thickness `κpε` when needles are present.
    pub needle_width: Option<f64>,
    pub geometry: DiskGeometry,
}

impl SblMesh2D {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Area computed with an `n × n` Gauss rule per element.
    pub fn area(&self, n: usize) -> f64 {
        let rule = gauss_rule(n);
        let mut total = 0.0;
        for el in &self.elements {
            for (xi, wx) in rule.mapped(0.0, 1.0) {
                for (eta, wy) in rule.mapped(0.0, 1.0) {
                    total += wx * wy * det(&el.map.eval(xi, eta).1);
                }
            }
        }
        total
    }

    /// Minimum Jacobian determinant over `n × n` Gauss points of every element.
    pub fn min_jacobian(&self, n: usize) -> f64 {
        let rule = gauss_rule(n);
        let mut min = f64::INFINITY;
        for el in &self.elements {
            for (xi, _) in rule.mapped(0.0, 1.0) {
                for (eta, _) in rule.mapped(0.0, 1.0) {
                    min = min.min(det(&el.map.eval(xi, eta).1));
                }
            }
        }
        min
    }

    /// Pairs every element edge with its neighbor. Interior edges map to
    /// `Some((element, edge))`, boundary edges to `None`. Edges match when
    /// their endpoints and midpoints agree relative to the edge length, so
    /// needle edges of any thickness are resolved.
    pub fn edge_pairing(&self) -> Result<Vec<EdgeNeighbors>> {
        struct Side {
            el: usize,
            edge: RefEdge,
            a: Point,
            b: Point,
            m: Point,
            len: f64,
        }
        let dist = |p: Point, q: Point| (p[0] - q[0]).hypot(p[1] - q[1]);
        let mut sides = Vec::with_capacity(4 * self.len());
        for (e, el) in self.elements.iter().enumerate() {
            for edge in RefEdge::ALL {
                let a = el.edge_point(edge, 0.0);
                let b = el.edge_point(edge, 1.0);
                let m = el.edge_point(edge, 0.5);
                sides.push(Side {
                    el: e,
                    edge,
                    a,
                    b,
                    m,
                    len: dist(a, b).max(dist(a, m)),
                });
            }
        }
        let mut out = vec![[None; 4]; self.elements.len()];
        let mut taken = vec![false; sides.len()];
        for i in 0..sides.len() {
            if taken[i] {
                continue;
            }
            let s = &sides[i];
            for j in i + 1..sides.len() {
                let t = &sides[j];
                if t.el == s.el {
                    continue;
                }
                let tol = 1e-8 * s.len.min(t.len);
                if dist(s.m, t.m) > tol {
                    continue;
                }
                let reversed = dist(s.a, t.b) <= tol && dist(s.b, t.a) <= tol;
                let same = dist(s.a, t.a) <= tol && dist(s.b, t.b) <= tol;
                if same {
                    return Err(Error::Unsupported(format!(
                        "edge shared by elements {} and {} has equal orientation",
                        s.el, t.el
                    )));
                }
                if !reversed {
                    continue;
                }
                if taken[j] {
                    return Err(Error::Unsupported(format!(
                        "edge of element {} is shared by more than two elements",
                        t.el
                    )));
                }
                taken[i] = true;
                taken[j] = true;
                out[s.el][edge_slot(s.edge)] = Some((t.el, t.edge));
                out[t.el][edge_slot(t.edge)] = Some((s.el, s.edge));
                break;
            }
        }
        Ok(out)
    }
}

pub fn edge_slot(e: RefEdge) -> usize {
    match e {
        RefEdge::Eta0 => 0,
        RefEdge::Xi1 => 1,
        RefEdge::Eta1 => 2,
        RefEdge::Xi0 => 3,
    }
}

/// Builds the asymptotic disk mesh with ring thickness `rho0`.
pub fn build_asymptotic_mesh_disk(rho0: f64, n_sectors: usize) -> Result<SblMesh2D> {
    if !(rho0 > 0.0 && rho0 < 1.0) {
        return Err(Error::InvalidParameter {
            name: "rho0",
            value: rho0,
            reason: "ring thickness must lie in (0, 1)",
        });
    }
    if n_sectors < 4 || !n_sectors.is_multiple_of(4) {
        return Err(Error::InvalidParameter {
            name: "n_sectors",
            value: n_sectors as f64,
            reason: "must be a positive multiple of 4",
        });
    }
    let m = n_sectors / 4;
    let inner = 1.0 - rho0;
    let half = 0.5 * inner;
    let dth = 2.0 * PI / n_sectors as f64;
    let mut elements = Vec::with_capacity(n_sectors * 2 + m * m);

    for k in 0..n_sectors {
        let lo = -FRAC_PI_4 + k as f64 * dth;
        elements.push(Element2D {
            map: ElementMap::whole(ParentMap::Polar {
                outer: 1.0,
                thickness: rho0,
                theta: [lo + dth, lo],
            }),
            tag: ElementTag::Asymptotic,
            boundary_edge: Some(RefEdge::Xi0),
            parent: k,
        });
    }
    let n_boundary = elements.len();

    let corner = |angle: f64| {
        let r = half * std::f64::consts::SQRT_2;
        [r * angle.cos(), r * angle.sin()]
    };
    for side in 0..4 {
        let centre = side as f64 * FRAC_PI_2;
        let c_lo = corner(centre - FRAC_PI_4);
        let c_hi = corner(centre + FRAC_PI_4);
        let lerp = |t: f64| {
            [
                c_hi[0] + t * (c_lo[0] - c_hi[0]),
                c_hi[1] + t * (c_lo[1] - c_hi[1]),
            ]
        };
        for j in 0..m {
            let t0 = j as f64 / m as f64;
            let t1 = (j + 1) as f64 / m as f64;
            let hi = centre + FRAC_PI_4 - j as f64 * dth;
            let idx = elements.len();
            elements.push(Element2D {
                map: ElementMap::whole(ParentMap::Blended {
                    radius: inner,
                    theta: [hi, hi - dth],
                    chord: [lerp(t0), lerp(t1)],
                }),
                tag: ElementTag::Asymptotic,
                boundary_edge: None,
                parent: idx,
            });
        }
    }

    let step = 2.0 * half / m as f64;
    for i in 0..m {
        for j in 0..m {
            let x0 = -half + i as f64 * step;
            let y0 = -half + j as f64 * step;
            let idx = elements.len();
            elements.push(Element2D {
                map: ElementMap::whole(ParentMap::Bilinear {
                    corners: [
                        [x0, y0],
                        [x0 + step, y0],
                        [x0 + step, y0 + step],
                        [x0, y0 + step],
                    ],
                }),
                tag: ElementTag::Asymptotic,
                boundary_edge: None,
                parent: idx,
            });
        }
    }

    Ok(SblMesh2D {
        n_asymptotic: elements.len(),
        n_boundary,
        elements,
        needle: false,
        needle_width: None,
        geometry: DiskGeometry {
            radius: 1.0,
            rho0,
            n_sectors,
        },
    })
}

/// Splits every boundary element at reference coordinate `ξ = κpε` into a
/// needle and a regular element when `κpε < 1/2`; otherwise the mesh is
/// returned unchanged.
pub fn apply_needle_split(mesh: &SblMesh2D, kappa: f64, p: usize, eps: f64) -> SblMesh2D {
    let width = kappa * p as f64 * eps;
    if width >= 0.5 || mesh.needle {
        return mesh.clone();
    }
    let boundary: Vec<&Element2D> = mesh.elements[..mesh.n_boundary].iter().collect();
    let mut elements = Vec::with_capacity(mesh.len() + mesh.n_boundary);
    for (i, el) in boundary.iter().enumerate() {
        elements.push(Element2D {
            map: ElementMap {
                parent: el.map.parent.clone(),
                xi_range: [0.0, width],
            },
            tag: ElementTag::Needle,
            boundary_edge: el.boundary_edge,
            parent: i,
        });
    }
    for (i, el) in boundary.iter().enumerate() {
        elements.push(Element2D {
            map: ElementMap {
                parent: el.map.parent.clone(),
                xi_range: [width, 1.0],
            },
            tag: ElementTag::RegularSplit,
            boundary_edge: None,
            parent: i,
        });
    }
    elements.extend(mesh.elements[mesh.n_boundary..].iter().cloned());
    SblMesh2D {
        elements,
        n_asymptotic: mesh.n_asymptotic,
        n_boundary: mesh.n_boundary,
        needle: true,
        needle_width: Some(width),
        geometry: mesh.geometry.clone(),
    }
}

/// Asymptotic disk mesh followed by the needle split.
pub fn build_sbl_mesh_disk(
    rho0: f64,
    n_sectors: usize,
    kappa: f64,
    p: usize,
    eps: f64,
) -> Result<SblMesh2D> {
    let base = build_asymptotic_mesh_disk(rho0, n_sectors)?;
    Ok(apply_needle_split(&base, kappa, p, eps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_area() {
        let m = build_asymptotic_mesh_disk(0.5, 4).unwrap();
        assert_eq!(m.n_asymptotic, 9);
        assert_eq!(m.n_boundary, 4);
        assert!((m.area(16) - PI).abs() < 1e-8);
        let m8 = build_asymptotic_mesh_disk(0.5, 8).unwrap();
        assert!((m8.area(16) - PI).abs() < 1e-8);
    }

    #[test]
    fn ring_edges_on_unit_circle() {
        for &(rho0, n) in &[(0.5, 4), (0.3, 8), (0.7, 12)] {
            let m = build_asymptotic_mesh_disk(rho0, n).unwrap();
            for el in &m.elements[..m.n_boundary] {
                for i in 0..=20 {
                    let p = el.edge_point(RefEdge::Xi0, i as f64 / 20.0);
                    assert!((p[0] * p[0] + p[1] * p[1] - 1.0).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn split_rules() {
        let base = build_asymptotic_mesh_disk(0.5, 4).unwrap();
        let split = apply_needle_split(&base, 1.0, 4, 0.05);
        assert_eq!(split.len(), 13);
        assert!(split.needle);
        let needle = &split.elements[0];
        let p_in = needle.point(1.0, 0.3);
        let r = (p_in[0] * p_in[0] + p_in[1] * p_in[1]).sqrt();
        assert!((1.0 - r - 0.5 * 0.2).abs() < 1e-13);
        let same = apply_needle_split(&base, 1.0, 3, 0.2);
        assert_eq!(same, base);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(build_asymptotic_mesh_disk(0.0, 4).is_err());
        assert!(build_asymptotic_mesh_disk(1.0, 4).is_err());
        assert!(build_asymptotic_mesh_disk(0.5, 6).is_err());
    }
}
