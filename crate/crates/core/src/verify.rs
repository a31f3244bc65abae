//! Named suites of structural checks with a machine-readable summary.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::approx1d::{
    interpolate_c1, inverse_inequality_sweep, markov_sup, orthogonality_residuals,
    special_representative, Corrector, CorrectorKind,
};
use crate::error::Result;
use crate::fem1d::{galerkin_residual, norms_1d, solve_1d, Difference, Field1D};
use crate::fem2d::{
    galerkin_residual as galerkin_residual_2d, interpolate_gl, solve_mixed,
    special_representatives_2d, DiskMeshConfig, DofMap2D, Field2D, MixedDiscreteField,
};
use crate::meshing::{build_asymptotic_mesh_disk, build_mesh_1d, build_sbl_mesh_disk};
use crate::polybasis::{gauss_lobatto_rule, gauss_rule, graded_rule, GaussLobattoBasis};
use crate::problems::{bessel_exact_disk, catalog_1d, Expr, CATALOG_1D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
#[value(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Suite {
    All,
    Quadrature,
    Reproduction,
    Galerkin,
    Continuity,
    MeshArea,
    InverseIneq,
    ChiBounds,
    Interpolant,
}

impl Suite {
    pub const EACH: [Suite; 8] = [
        Suite::Quadrature,
        Suite::Reproduction,
        Suite::Galerkin,
        Suite::Continuity,
        Suite::MeshArea,
        Suite::InverseIneq,
        Suite::ChiBounds,
        Suite::Interpolant,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub value: f64,
    pub bound: f64,
}

impl Check {
    /// Passes when `value <= bound` (and `value` is a number).
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            status: if value <= bound {
                Status::Pass
            } else {
                Status::Fail
            },
            value,
            bound,
        }
    }

    fn error(name: impl Into<String>, err: &crate::Error) -> Self {
        Self {
            name: format!("{}: {err}", name.into()),
            status: Status::Fail,
            value: f64::NAN,
            bound: f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }
}

/// Runs a suite; `ALL` runs every suite in order.
pub fn run(suite: Suite) -> Summary {
    let suites: Vec<Suite> = if suite == Suite::All {
        Suite::EACH.to_vec()
    } else {
        vec![suite]
    };
    let mut checks = Vec::new();
    for s in suites {
        let name = format!("{s:?}");
        match run_one(s) {
            Ok(c) => checks.extend(c),
            Err(e) => checks.push(Check::error(name, &e)),
        }
    }
    Summary { suite, checks }
}

fn run_one(suite: Suite) -> Result<Vec<Check>> {
    match suite {
        Suite::All => unreachable!("expanded by run"),
        Suite::Quadrature => Ok(quadrature()),
        Suite::Reproduction => reproduction(),
        Suite::Galerkin => galerkin(),
        Suite::Continuity => continuity(),
        Suite::MeshArea => mesh_area(),
        Suite::InverseIneq => Ok(inverse_ineq()),
        Suite::ChiBounds => chi_bounds(),
        Suite::Interpolant => interpolant(),
    }
}

fn monomial_integral(d: usize) -> f64 {
    if d % 2 == 1 {
        0.0
    } else {
        2.0 / (d as f64 + 1.0)
    }
}

fn quadrature() -> Vec<Check> {
    let mut gauss: f64 = 0.0;
    let mut lobatto: f64 = 0.0;
    for n in 1..=32 {
        let r = gauss_rule(n);
        for d in 0..2 * n {
            gauss = gauss.max((r.integrate(|x| x.powi(d as i32)) - monomial_integral(d)).abs());
        }
        if n >= 2 {
            let r = gauss_lobatto_rule(n);
            for d in 0..=2 * n - 3 {
                lobatto =
                    lobatto.max((r.integrate(|x| x.powi(d as i32)) - monomial_integral(d)).abs());
            }
        }
    }
    let eps: f64 = 1e-8;
    let graded: f64 = graded_rule(0.0, 1.0, eps, 20)
        .into_iter()
        .map(|(x, w)| w * (-x / eps).exp() / eps)
        .sum();
    vec![
        Check::at_most(
            "gauss rules n<=32 integrate degree 2n-1 exactly",
            gauss,
            1e-13,
        ),
        Check::at_most(
            "gauss-lobatto rules n<=32 integrate degree 2n-3 exactly",
            lobatto,
            1e-13,
        ),
        Check::at_most(
            "graded rule resolves exp(-x/eps)/eps at eps=1e-8",
            (graded - 1.0).abs(),
            1e-12,
        ),
    ]
}

struct Poly2D(usize);

impl Field2D for Poly2D {
    fn value(&self, p: [f64; 2]) -> f64 {
        let q = self.0 as i32;
        p[0].powi(q) * p[1].powi(q) + p[0] - 2.0 * p[1]
    }

    fn grad(&self, p: [f64; 2]) -> [f64; 2] {
        let q = self.0 as i32;
        let qf = self.0 as f64;
        [
            qf * p[0].powi(q - 1) * p[1].powi(q) + 1.0,
            qf * p[0].powi(q) * p[1].powi(q - 1) - 2.0,
        ]
    }
}

fn reproduction() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut worst: f64 = 0.0;
    for p in 3..=10 {
        let mesh = build_mesh_1d(1.0, p, 1e-3)?;
        let coeffs: Vec<f64> = (0..=p).map(|i| ((i * 7 + 3) % 5) as f64 - 2.0).collect();
        let q = Expr::poly(coeffs);
        let ip = interpolate_c1(&q, &mesh, p)?;
        for i in 0..=200 {
            let x = i as f64 / 200.0;
            for k in 0..3 {
                let exact = q.derivative(x, k);
                worst = worst.max((ip.derivative(x, k) - exact).abs() / (1.0 + exact.abs()));
            }
        }
    }
    checks.push(Check::at_most(
        "C1 interpolant reproduces P_p, p=3..10",
        worst,
        1e-10,
    ));
    let mut poly: f64 = 0.0;
    for eps in [1.0, 1e-4] {
        let prob = catalog_1d("poly", eps)?;
        let uh = solve_1d(&prob, 1.0, 4)?;
        let err = Difference(&prob.exact().expect("catalog entry").u, &uh);
        poly = poly.max(norms_1d(&err, &prob, &uh.mesh, 1.0).balanced);
    }
    checks.push(Check::at_most(
        "1D solver reproduces u in the trial space (POLY, p=4)",
        poly,
        1e-9,
    ));
    let mut gl: f64 = 0.0;
    for p in [2, 4, 6] {
        let mesh = build_sbl_mesh_disk(0.5, 8, 1.0, p, 1e-3)?;
        let dofs = DofMap2D::new(&mesh, p)?;
        let f = Poly2D(p);
        let field = interpolate_gl(&f, &dofs, false);
        let basis = GaussLobattoBasis::new(p)?;
        // Q_p is preserved by the affine maps of the inner squares
        for e in mesh.len() - 4..mesh.len() {
            for (xi, eta) in [(0.13, 0.71), (0.5, 0.5), (0.9, 0.2)] {
                let x = mesh.elements[e].point(xi, eta);
                let (v, _) = field.eval(&mesh, &dofs, &basis, e, xi, eta);
                gl = gl.max((v - f.value(x)).abs());
            }
        }
    }
    checks.push(Check::at_most(
        "Gauss-Lobatto interpolant reproduces Q_p on affine elements",
        gl,
        1e-12,
    ));
    Ok(checks)
}

fn galerkin() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (name, eps, p) in [
        ("layered", 1e-4, 8),
        ("varcoef", 1e-6, 6),
        ("poly", 1e-2, 5),
    ] {
        let prob = catalog_1d(name, eps)?;
        let uh = solve_1d(&prob, 1.0, p)?;
        checks.push(Check::at_most(
            format!("1D Galerkin orthogonality {name} eps={eps:e} p={p}"),
            galerkin_residual(&prob, &uh)?,
            1e-8,
        ));
    }
    for (eps, p) in [(1e-3, 4), (1e-5, 3)] {
        let prob = bessel_exact_disk(eps, 1.0, 1.0, 1.0)?;
        let field = solve_mixed(&prob, 1.0, p, DiskMeshConfig::default())?;
        checks.push(Check::at_most(
            format!("2D Galerkin orthogonality bessel eps={eps:e} p={p}"),
            galerkin_residual_2d(&prob, &field)?,
            1e-8,
        ));
    }
    Ok(checks)
}

fn continuity() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut jump: f64 = 0.0;
    let mut rep_jump: f64 = 0.0;
    for name in CATALOG_1D {
        for eps in [1e-2, 1e-6] {
            let prob = catalog_1d(name, eps)?;
            let uh = solve_1d(&prob, 1.0, 6)?;
            let scale = uh.coeffs.iter().fold(1.0f64, |m, c| m.max(c.abs()));
            jump = jump.max(uh.max_c1_jump() / scale);
            let rep = special_representative(&prob, 1.0, 6)?;
            let tau = rep.field.mesh.tau;
            for x in [tau, 1.0 - tau] {
                for k in 0..2 {
                    rep_jump = rep_jump
                        .max((rep.eval_piecewise(x, k) - rep.smooth.derivative(x, k)).abs());
                }
            }
        }
    }
    checks.push(Check::at_most(
        "C1 continuity of u_p at mesh nodes",
        jump,
        1e-10,
    ));
    checks.push(Check::at_most(
        "C1 continuity of the special representative",
        rep_jump,
        1e-10,
    ));
    let prob = bessel_exact_disk(1e-4, 1.0, 1.0, 1.0)?;
    let field = solve_mixed(&prob, 1.0, 4, DiskMeshConfig::default())?;
    checks.push(Check::at_most(
        "C0 traces of (u_p, w_p) across edges",
        field.max_trace_jump(20)?,
        1e-10,
    ));
    let reps = special_representatives_2d(&prob, &field.mesh, 4)?;
    let rep_field = MixedDiscreteField {
        u: reps.u,
        w: reps.w,
        ..field.clone()
    };
    checks.push(Check::at_most(
        "C0 traces of the 2D special representatives",
        rep_field.max_trace_jump(20)?,
        1e-9,
    ));
    let boundary_u = field
        .u
        .values
        .iter()
        .zip(&field.dofs.on_boundary)
        .filter(|(_, b)| **b)
        .fold(0.0f64, |m, (v, _)| m.max(v.abs()));
    checks.push(Check::at_most(
        "u_p vanishes at boundary nodes",
        boundary_u,
        1e-13,
    ));
    Ok(checks)
}

fn mesh_area() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for n in [4, 8, 16] {
        let base = build_asymptotic_mesh_disk(0.5, n)?;
        let split = build_sbl_mesh_disk(0.5, n, 1.0, 4, 1e-6)?;
        for (label, m) in [("asymptotic", &base), ("needle", &split)] {
            checks.push(Check::at_most(
                format!("area = pi, {label} mesh, {n} sectors"),
                (m.area(20) - PI).abs(),
                1e-8,
            ));
            checks.push(Check::at_most(
                format!("positive Jacobians, {label} mesh, {n} sectors"),
                -m.min_jacobian(8),
                0.0,
            ));
        }
    }
    Ok(checks)
}

fn inverse_ineq() -> Vec<Check> {
    let mut checks = Vec::new();
    let a = inverse_inequality_sweep(8, 2, 1000, 11).markov;
    let b = inverse_inequality_sweep(8, 2, 1000, 12).markov;
    checks.push(Check::at_most(
        "Markov ratio max over 1000 random q in P_8, k=2: seed spread",
        (a / b - 1.0).abs(),
        0.05,
    ));
    for k in 1..=3 {
        let c_k = markov_sup(k, k);
        let mut worst_sup: f64 = 0.0;
        let mut worst_random: f64 = 0.0;
        for p in k..=16 {
            let sup = markov_sup(p, k);
            worst_sup = worst_sup.max(sup / c_k);
            let r = inverse_inequality_sweep(p, k, 200, 5 + p as u64).markov;
            worst_random = worst_random.max(r / sup);
        }
        checks.push(Check::at_most(
            format!("uniform Markov constant, k={k}: sup_p ratio / ratio at p=k"),
            worst_sup,
            1.0 + 1e-9,
        ));
        checks.push(Check::at_most(
            format!("random Markov ratios below the exact supremum, k={k}"),
            worst_random,
            1.0 + 1e-9,
        ));
    }
    checks
}

fn chi_bounds() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (i, kind) in [(0, CorrectorKind::Chi0), (1, CorrectorKind::Chi1)] {
        for k in 0..3 {
            let ratios: Vec<f64> = [1e-1, 1e-3, 1e-5]
                .iter()
                .map(|&tau| {
                    let c = Corrector::new(tau, kind)?;
                    Ok(c.seminorm(k) * tau.powf(k as f64 + i as f64 - 1.5))
                })
                .collect::<Result<_>>()?;
            let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
            let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
            checks.push(Check::at_most(
                format!("chi_{i} |.|_{k} scaling spread over tau"),
                hi / lo - 1.0,
                0.01,
            ));
        }
    }
    let mut closed: f64 = 0.0;
    for tau in [1e-1, 1e-3, 1e-5, 0.5] {
        let c = Corrector::new(tau, CorrectorKind::Chi0)?;
        closed = closed.max((c.seminorm(0) - tau.powf(1.5) / 105f64.sqrt()).abs());
    }
    checks.push(Check::at_most(
        "||chi_0||_0 = tau^(3/2)/sqrt(105)",
        closed,
        1e-10,
    ));
    Ok(checks)
}

fn interpolant() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let prob = catalog_1d("layered", 1e-4)?;
    let u = &prob.exact().expect("catalog entry").u;
    let p = 8;
    let mesh = build_mesh_1d(1.0, p, prob.eps)?;
    let ip = interpolate_c1(u, &mesh, p)?;
    let twice = interpolate_c1(&ip, &mesh, p)?;
    let idem = ip
        .coeffs
        .iter()
        .zip(&twice.coeffs)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs() / (1.0 + a.abs())));
    checks.push(Check::at_most(
        "C1 interpolant is a projection",
        idem,
        1e-12,
    ));
    let mut ends: f64 = 0.0;
    for (i, &x) in mesh.nodes.iter().enumerate() {
        for k in 0..2 {
            let scale = 1.0 + u.derivative(x, k).abs();
            let limits = if i == 0 || i + 1 == mesh.nodes.len() {
                let v = ip.derivative(x, k);
                (v, v)
            } else {
                ip.node_limits(i, k)
            };
            ends = ends.max((limits.0 - u.derivative(x, k)).abs() / scale);
            ends = ends.max((limits.1 - u.derivative(x, k)).abs() / scale);
        }
    }
    checks.push(Check::at_most(
        "C1 interpolant matches nodal values and slopes",
        ends,
        1e-11,
    ));
    let res = orthogonality_residuals(u, &ip);
    let mut worst: f64 = 0.0;
    for (j, r) in res.iter().enumerate() {
        let (a, b) = mesh.element(j);
        let semi = crate::fem1d::norms::integrals(u, &prob, a, b).seminorm(2);
        for (k, v) in r.iter().enumerate() {
            // ‖P_k‖_0 on the element
            let qn = ((b - a) / (2.0 * k as f64 + 1.0)).sqrt();
            worst = worst.max(v.abs() / (semi * qn));
        }
    }
    checks.push(Check::at_most(
        "(I_p u - u)'' orthogonal to P_(p-2) on each element",
        worst,
        1e-9,
    ));
    Ok(checks)
}
