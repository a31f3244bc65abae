//! Invariants of meshes, spaces and solvers.

use std::collections::HashSet;
use std::sync::Arc;

use proptest::prelude::*;
use sblfem::approx1d::interpolate_c1;
use sblfem::fem1d::galerkin::element_matrix;
use sblfem::fem1d::{solve_1d, Field1D, ProblemSpec1D};
use sblfem::fem2d::{solve_mixed, DiskMeshConfig, DofMap2D, MixedNumbering, ProblemSpec2D};
use sblfem::meshing::{build_mesh_1d, build_sbl_mesh_disk};
use sblfem::polybasis::{gauss_rule, C1ReferenceBasis};
use sblfem::problems::{bessel_exact_disk, catalog_1d, Expr};
use sblfem::study::{run_study, to_csv, write_report, StudyConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mesh_1d_nodes(kappa in 0.1f64..4.0, p in 1usize..17, log_eps in -10f64..0.0) {
        let eps = 10f64.powf(log_eps);
        let m = build_mesh_1d(kappa, p, eps).unwrap();
        let tau = (kappa * p as f64 * eps).min(1.0 / 3.0);
        prop_assert!((m.tau - tau).abs() <= 1e-15 * tau.max(1e-300) + 1e-300);
        prop_assert!(m.nodes.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(m.nodes[0], 0.0);
        prop_assert_eq!(*m.nodes.last().unwrap(), 1.0);
        for (a, b) in m.nodes.iter().zip(m.nodes.iter().rev()) {
            prop_assert!((a - (1.0 - b)).abs() < 1e-15);
        }
    }

    #[test]
    fn interpolant_reproduces_polynomials(
        p in 3usize..11,
        log_eps in -8f64..0.0,
        coeffs in prop::collection::vec(-2.0f64..2.0, 11),
    ) {
        let eps = 10f64.powf(log_eps);
        let q = Expr::poly(coeffs[..=p].to_vec());
        let mesh = build_mesh_1d(1.0, p, eps).unwrap();
        let ip = interpolate_c1(&q, &mesh, p).unwrap();
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            prop_assert!((ip.derivative(x, 0) - q.eval(x)).abs() < 1e-10);
            prop_assert!((ip.derivative(x, 1) - q.derivative(x, 1)).abs() < 1e-9);
        }
    }

    #[test]
    fn gauss_integrates_random_polynomials(n in 1usize..20, coeffs in prop::collection::vec(-1.0f64..1.0, 40)) {
        let c = &coeffs[..2 * n];
        let rule = gauss_rule(n);
        let got = rule.integrate(|x| c.iter().rev().fold(0.0, |acc, a| acc * x + a));
        let exact: f64 = c.iter().enumerate().filter(|(d, _)| d % 2 == 0).map(|(d, a)| 2.0 * a / (d as f64 + 1.0)).sum();
        prop_assert!((got - exact).abs() < 1e-13);
    }

    #[test]
    fn config_rejects_bad_eps(eps in prop_oneof![-1.0f64..=0.0, 1.0000001f64..10.0]) {
        let cfg = StudyConfig::new_1d("layered", vec![eps], 3, 5);
        prop_assert!(cfg.validate().is_err());
    }
}

#[test]
fn zero_forcing_gives_zero_1d() {
    let problem = ProblemSpec1D::new(
        "zero",
        1e-6,
        Expr::constant(1.0),
        Expr::constant(1.0),
        Arc::new(|_| 0.0),
    )
    .unwrap();
    let uh = solve_1d(&problem, 1.0, 8).unwrap();
    assert!(uh.coeffs.iter().all(|c| *c == 0.0));
}

#[test]
fn zero_forcing_gives_zero_2d() {
    let problem = ProblemSpec2D::new("zero", 1e-4, 1.0, 1.0, Arc::new(|_| 0.0)).unwrap();
    let field = solve_mixed(&problem, 1.0, 3, DiskMeshConfig::default()).unwrap();
    assert!(field
        .u
        .values
        .iter()
        .chain(&field.w.values)
        .all(|v| *v == 0.0));
}

#[test]
#[allow(clippy::needless_range_loop)]
fn element_matrix_is_affine_in_eps_squared() {
    // A(ε) = ε² A4 + A2 with A2 independent of ε
    let basis = C1ReferenceBasis::new(6).unwrap();
    let mats: Vec<Vec<Vec<f64>>> = [1e-1, 1e-2, 1e-3]
        .iter()
        .map(|&eps| element_matrix(&catalog_1d("varcoef", eps).unwrap(), &basis, 0.2, 0.7))
        .collect();
    let (e0, e1, e2) = (1e-2, 1e-4, 1e-6);
    for i in 0..mats[0].len() {
        for j in 0..mats[0].len() {
            let a4 = (mats[0][i][j] - mats[1][i][j]) / (e0 - e1);
            let pred = mats[1][i][j] + a4 * (e2 - e1);
            let scale = mats[0][i][j].abs().max(1.0);
            assert!((pred - mats[2][i][j]).abs() <= 1e-12 * scale, "({i},{j})");
        }
    }
}

#[test]
fn layered_solution_is_mirror_symmetric() {
    let problem = catalog_1d("layered", 1e-5).unwrap();
    let uh = solve_1d(&problem, 1.0, 9).unwrap();
    let scale = uh.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    for i in 0..=100 {
        let x = 0.5 * i as f64 / 100.0;
        assert!(
            (uh.derivative(x, 0) - uh.derivative(1.0 - x, 0)).abs() <= 1e-10 * scale,
            "x = {x}"
        );
    }
}

fn key(p: [f64; 2]) -> (i64, i64) {
    ((p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64)
}

#[test]
fn dimension_count_2d() {
    for (n, p, eps) in [(4, 2, 1e-3), (8, 4, 1e-6), (8, 3, 0.5), (12, 5, 1e-2)] {
        let mesh = build_sbl_mesh_disk(0.5, n, 1.0, p, eps).unwrap();
        let dofs = DofMap2D::new(&mesh, p).unwrap();
        // vertices and edges counted from element corners
        let mut vertices = HashSet::new();
        let mut edges = HashSet::new();
        for el in &mesh.elements {
            let c: Vec<(i64, i64)> = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
                .iter()
                .map(|&(x, y)| key(el.point(x, y)))
                .collect();
            for k in 0..4 {
                vertices.insert(c[k]);
                let (a, b) = (c[k], c[(k + 1) % 4]);
                edges.insert(if a < b { (a, b) } else { (b, a) });
            }
        }
        let (v, e, f) = (vertices.len(), edges.len(), mesh.len());
        let expected = v + e * (p - 1) + f * (p - 1) * (p - 1);
        assert_eq!(dofs.num_nodes(), expected, "n={n} p={p} eps={eps}");
        // Euler characteristic of the disk
        assert_eq!(v as i64 - e as i64 + f as i64, 1);
        let numbering = MixedNumbering::new(&dofs);
        assert_eq!(numbering.len, dofs.num_nodes() + dofs.num_interior());
    }
}

#[test]
fn radial_solution_is_rotation_invariant() {
    let problem = bessel_exact_disk(1e-4, 1.0, 1.0, 1.0).unwrap();
    let field = solve_mixed(&problem, 1.0, 4, DiskMeshConfig::default()).unwrap();
    let index: std::collections::HashMap<(i64, i64), usize> = field
        .dofs
        .coords
        .iter()
        .enumerate()
        .map(|(i, c)| (key(*c), i))
        .collect();
    let scale = field.u.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut matched = 0;
    for (i, c) in field.dofs.coords.iter().enumerate() {
        // quarter turn maps the 8-sector mesh onto itself
        let r = [-c[1], c[0]];
        let j = *index.get(&key(r)).expect("rotated node exists");
        assert!((field.u.values[i] - field.u.values[j]).abs() <= 1e-9 * scale);
        matched += 1;
    }
    assert_eq!(matched, field.dofs.num_nodes());
}

#[test]
fn studies_are_deterministic() {
    let mut cfg = StudyConfig::new_1d("varcoef", vec![1e-3, 1e-7], 3, 9);
    cfg.record_timing = false;
    let a = run_study(&cfg).unwrap();
    let b = run_study(&cfg).unwrap();
    assert_eq!(to_csv(&a.rows), to_csv(&b.rows));
    let (da, db) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    write_report(&a, da.path()).unwrap();
    write_report(&b, db.path()).unwrap();
    for file in ["results.csv", "fit.json", "plot.gp"] {
        let x = std::fs::read(da.path().join(file)).unwrap();
        let y = std::fs::read(db.path().join(file)).unwrap();
        assert_eq!(x, y, "{file}");
    }
    let mut cfg2 = StudyConfig::new_2d("bessel", vec![1e-3], 2, 3);
    cfg2.record_timing = false;
    assert_eq!(
        to_csv(&run_study(&cfg2).unwrap().rows),
        to_csv(&run_study(&cfg2).unwrap().rows)
    );
}

#[test]
fn csv_schema() {
    let mut cfg = StudyConfig::new_1d("poly", vec![1.0], 4, 4);
    cfg.record_timing = false;
    let csv = to_csv(&run_study(&cfg).unwrap().rows);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "problem,eps,p,kappa,energy,balanced,max,c1max,dofs,wall_ms,status"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 11);
    assert_eq!((row[0], row[2], row[10]), ("poly", "4", "ok"));
    assert!(row[5].parse::<f64>().unwrap() <= 1e-9);
}

#[test]
fn unknown_problem_is_rejected() {
    let cfg = StudyConfig::new_1d("nope", vec![1e-2], 3, 4);
    assert!(run_study(&cfg).is_err());
}
