//! Acceptance criteria 1 to 11. Each test prints one PASS/FAIL line and
//! fits its data with the least-squares helper below, not the library's.

use sblfem::approx1d::{
    interpolate_c1, reference_interval_interp_check, special_representative, Corrector,
    CorrectorKind, LayerProfile,
};
use sblfem::fem1d::norms::{integrals, norms_1d};
use sblfem::fem1d::{energy_norm, solve_1d, Difference, DiscreteField1D, Field1D, ProblemSpec1D};
use sblfem::meshing::build_mesh_1d;
use sblfem::problems::{catalog_1d, Expr, CATALOG_1D};
use sblfem::study::{run_study, StudyConfig, StudyRow};
use sblfem::verify::{self, Status, Suite};

const EPS_1D: [f64; 4] = [1e-2, 1e-4, 1e-6, 1e-8];

/// Fit `y = a + s x`; returns `(s, a, R²)`.
fn ls_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let s = sxy / sxx;
    let a = my - s * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    (s, a, r2)
}

/// `(β, R²)` of `ln err = ln C − β p`, skipping the 1e-12 floor.
fn exp_fit(ps: &[usize], errs: &[f64]) -> (f64, f64) {
    let (x, y): (Vec<f64>, Vec<f64>) = ps
        .iter()
        .zip(errs)
        .filter(|(_, e)| e.is_finite() && **e > 1e-12)
        .map(|(p, e)| (*p as f64, e.ln()))
        .unzip();
    let (s, _, r2) = ls_fit(&x, &y);
    (-s, r2)
}

fn spread(v: &[f64]) -> f64 {
    let hi = v.iter().cloned().fold(f64::MIN, f64::max);
    let lo = v.iter().cloned().fold(f64::MAX, f64::min);
    hi / lo
}

fn report(n: usize, ok: bool, detail: String) {
    println!(
        "criterion {n:>2}: {} {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
}

fn envelope(rows: &[StudyRow], norm: impl Fn(&StudyRow) -> f64) -> (Vec<usize>, Vec<f64>) {
    let mut ps: Vec<usize> = rows.iter().map(|r| r.p).collect();
    ps.sort_unstable();
    ps.dedup();
    let env = ps
        .iter()
        .map(|&p| {
            rows.iter()
                .filter(|r| r.p == p)
                .map(&norm)
                .fold(0.0, f64::max)
        })
        .collect();
    (ps, env)
}

fn study_1d() -> Vec<StudyRow> {
    let mut cfg = StudyConfig::new_1d("layered", EPS_1D.to_vec(), 3, 12);
    cfg.record_timing = false;
    let report = run_study(&cfg).expect("1D study");
    assert!(report.rows.iter().all(|r| r.status == "ok"));
    report.rows
}

/// Layer-region seminorms `|e|_{k, (0,τ) ∪ (1−τ,1)}` for k = 0, 1, 2.
fn layer_seminorms(e: &dyn Field1D, problem: &ProblemSpec1D, tau: f64) -> [f64; 3] {
    let l = integrals(e, problem, 0.0, tau);
    let r = integrals(e, problem, 1.0 - tau, 1.0);
    [
        (l.d0 + r.d0).sqrt(),
        (l.d1 + r.d1).sqrt(),
        (l.d2 + r.d2).sqrt(),
    ]
}

#[test]
fn criterion_01_balanced_convergence_1d() {
    let rows = study_1d();
    let (ps, env) = envelope(&rows, |r| r.balanced);
    let (beta, r2) = exp_fit(&ps, &env);
    let last = *env.last().unwrap();
    let ok = beta >= 0.4 && r2 >= 0.97 && last <= 1e-6;
    report(
        1,
        ok,
        format!("balanced envelope beta = {beta:.4} (>= 0.4), R^2 = {r2:.4} (>= 0.97), err(12) = {last:.3e} (<= 1e-6)"),
    );
    assert!(ok);
}

#[test]
fn criterion_02_c1_max_convergence_1d() {
    let rows = study_1d();
    let (ps, env) = envelope(&rows, |r| r.c1max);
    let (beta, r2) = exp_fit(&ps, &env);
    let ok = beta >= 0.4 && r2 >= 0.95;
    report(
        2,
        ok,
        format!("C1 max envelope beta = {beta:.4} (>= 0.4), R^2 = {r2:.4} (>= 0.95)"),
    );
    assert!(ok);
}

#[test]
fn criterion_03_norm_scaling_separation() {
    let eps_list = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];
    let mut energy = Vec::new();
    let mut balanced = Vec::new();
    let mut worst_rel: f64 = 0.0;
    for &eps in &eps_list {
        let problem = catalog_1d("layered", eps).unwrap();
        let bl = Expr::exp_poly(vec![eps], -1.0 / eps, 0.0);
        let mesh = build_mesh_1d(1.0, 8, eps).unwrap();
        let r = norms_1d(&bl, &problem, &mesh, 1.0);
        // b = c = 1; every derivative is a multiple of e^{-x/eps}
        let i = 0.5 * eps * (1.0 - (-2.0 / eps).exp());
        let e_exact = (i * (2.0 + eps * eps)).sqrt();
        let b_exact = (i * (1.0 / eps + 1.0 + eps * eps)).sqrt();
        worst_rel = worst_rel
            .max((r.energy / e_exact - 1.0).abs())
            .max((r.balanced / b_exact - 1.0).abs());
        energy.push(r.energy.ln());
        balanced.push(r.balanced.ln());
    }
    let ln_eps: Vec<f64> = eps_list.iter().map(|e: &f64| e.ln()).collect();
    let (se, _, _) = ls_fit(&ln_eps, &energy);
    let (sb, _, _) = ls_fit(&ln_eps, &balanced);
    let ok = (se - 0.5).abs() <= 0.05 && sb.abs() <= 0.05 && worst_rel <= 1e-10;
    report(
        3,
        ok,
        format!("eps-exponents energy = {se:.4} (0.5 +- 0.05), balanced = {sb:.4} (0 +- 0.05), closed-form rel. dev. = {worst_rel:.2e} (<= 1e-10)"),
    );
    assert!(ok);
}

#[test]
fn criterion_04_interpolant_law() {
    let mut betas = Vec::new();
    let ps: Vec<usize> = (3..=12).collect();
    for &eps in &EPS_1D {
        let problem = catalog_1d("layered", eps).unwrap();
        let u = &problem.exact().unwrap().u;
        let errs: Vec<f64> = ps
            .iter()
            .map(|&p| {
                let mesh = build_mesh_1d(1.0, p, eps).unwrap();
                let ip = interpolate_c1(u, &mesh, p).unwrap();
                let e = Difference(u, &ip);
                let mut d2 = 0.0;
                for j in 0..mesh.num_elements() {
                    let (a, b) = mesh.element(j);
                    d2 += integrals(&e, &problem, a, b).d2;
                }
                eps.sqrt() * d2.sqrt()
            })
            .collect();
        betas.push(exp_fit(&ps, &errs).0);
    }
    let mut scaled = [vec![], vec![], vec![]];
    for &eps in &EPS_1D {
        let problem = catalog_1d("layered", eps).unwrap();
        let u = &problem.exact().unwrap().u;
        let mesh = build_mesh_1d(1.0, 8, eps).unwrap();
        let ip = interpolate_c1(u, &mesh, 8).unwrap();
        let s = layer_seminorms(&Difference(u, &ip), &problem, mesh.tau);
        for k in 0..3 {
            scaled[k].push(s[k] * eps.powf(k as f64 - 1.5));
        }
    }
    let spreads: Vec<f64> = scaled.iter().map(|v| spread(v)).collect();
    let min_beta = betas.iter().cloned().fold(f64::MAX, f64::min);
    let ok = min_beta > 0.0 && spreads.iter().all(|s| *s <= 5.0);
    report(
        4,
        ok,
        format!("min beta of eps^(1/2)|u - I_p u|_2 = {min_beta:.4} (> 0), layer spreads k=0,1,2 = {:.3}, {:.3}, {:.3} (<= 5)", spreads[0], spreads[1], spreads[2]),
    );
    assert!(ok);
}

#[test]
fn criterion_05_best_approximation() {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for name in CATALOG_1D {
        for &eps in &[1.0, 1e-2, 1e-4, 1e-6, 1e-8] {
            let problem = catalog_1d(name, eps).unwrap();
            let u = &problem.exact().unwrap().u;
            for p in 3..=10 {
                let uh: DiscreteField1D = solve_1d(&problem, 1.0, p).unwrap();
                let ip = interpolate_c1(u, &uh.mesh, p).unwrap();
                let eh = energy_norm(&Difference(u, &uh), &problem, &uh.mesh);
                let ei = energy_norm(&Difference(u, &ip), &problem, &uh.mesh);
                // errors at roundoff level on both sides are compared absolutely
                let excess = eh - ei * (1.0 + 1e-8);
                if excess > 1e-13 {
                    count += 1;
                }
                worst = worst.max(excess);
            }
        }
    }
    let ok = count == 0;
    report(
        5,
        ok,
        format!("max of ||u-u_p||_E - (1+1e-8)||u-I_p u||_E = {worst:.2e}, violations = {count}"),
    );
    assert!(ok);
}

#[test]
fn criterion_06_special_representative() {
    let mut scaled = [vec![], vec![], vec![]];
    for &eps in &EPS_1D {
        let problem = catalog_1d("layered", eps).unwrap();
        let rep = special_representative(&problem, 1.0, 6).unwrap();
        let u = &problem.exact().unwrap().u;
        let s = layer_seminorms(&Difference(u, &rep.field), &problem, rep.field.mesh.tau);
        for k in 0..3 {
            scaled[k].push(s[k] * eps.powf(k as f64 - 1.5));
        }
    }
    let spreads: Vec<f64> = scaled.iter().map(|v| spread(v)).collect();
    let ps: Vec<usize> = (3..=12).collect();
    let mut betas = Vec::new();
    for &eps in &[1e-4, 1e-6, 1e-8] {
        let problem = catalog_1d("layered", eps).unwrap();
        let u = &problem.exact().unwrap().u;
        let errs: Vec<f64> = ps
            .iter()
            .map(|&p| {
                let rep = special_representative(&problem, 1.0, p).unwrap();
                let tau = rep.field.mesh.tau;
                let i = integrals(&Difference(u, &rep.field), &problem, tau, 1.0 - tau);
                (i.d0 + i.d1 + i.d2).sqrt()
            })
            .collect();
        betas.push(exp_fit(&ps, &errs).0);
    }
    let min_beta = betas.iter().cloned().fold(f64::MAX, f64::min);
    let ok = spreads.iter().all(|s| *s <= 5.0) && min_beta > 0.0;
    report(
        6,
        ok,
        format!("layer spreads k=0,1,2 = {:.3}, {:.3}, {:.3} (<= 5), coarse H2 min beta = {min_beta:.4} (> 0)", spreads[0], spreads[1], spreads[2]),
    );
    assert!(ok);
}

/// `|χ|_{k,(0,τ)}` by a composite 8-point Gauss rule on 64 panels.
fn corrector_seminorm(c: &Corrector, tau: f64, k: usize) -> f64 {
    let x8 = [
        0.1834346424956498,
        0.525_532_409_916_329,
        0.7966664774136267,
        0.9602898564975363,
    ];
    let w8 = [
        0.362_683_783_378_362,
        0.3137066458778873,
        0.2223810344533745,
        0.1012285362903763,
    ];
    let panels = 64;
    let h = tau / panels as f64;
    let mut acc = 0.0;
    for i in 0..panels {
        let mid = (i as f64 + 0.5) * h;
        for (x, w) in x8.iter().zip(&w8) {
            for s in [-1.0, 1.0] {
                let v = c.derivative(mid + s * x * 0.5 * h, k);
                acc += 0.5 * h * w * v * v;
            }
        }
    }
    acc.sqrt()
}

#[test]
fn criterion_07_corrector_bounds() {
    let taus = [1e-1, 1e-3, 1e-5];
    let mut worst_spread: f64 = 0.0;
    for (i, kind) in [(0, CorrectorKind::Chi0), (1, CorrectorKind::Chi1)] {
        for k in 0..3 {
            let ratios: Vec<f64> = taus
                .iter()
                .map(|&tau| {
                    let c = Corrector::new(tau, kind).unwrap();
                    corrector_seminorm(&c, tau, k) / tau.powf(1.5 - k as f64 - i as f64)
                })
                .collect();
            worst_spread = worst_spread.max(spread(&ratios) - 1.0);
        }
    }
    let mut closed: f64 = 0.0;
    for &tau in &taus {
        let c = Corrector::new(tau, CorrectorKind::Chi0).unwrap();
        closed = closed.max((corrector_seminorm(&c, tau, 0) - tau.powf(1.5) / 105f64.sqrt()).abs());
        closed = closed.max((c.seminorm(0) - tau.powf(1.5) / 105f64.sqrt()).abs());
    }
    let ok = worst_spread <= 0.01 && closed <= 1e-10;
    report(
        7,
        ok,
        format!("max ratio spread over tau = {worst_spread:.2e} (<= 1%), ||chi_0||_0 closed-form dev. = {closed:.2e} (<= 1e-10)"),
    );
    assert!(ok);
}

#[test]
fn criterion_08_reference_interval_estimate() {
    let ps: Vec<usize> = (4..=12).collect();
    let errs: Vec<f64> = ps
        .iter()
        .map(|&p| {
            // h K / p = 1/2
            let v = LayerProfile {
                amplitude: 1.0,
                k: 0.5 * p as f64,
                h: 1.0,
            };
            reference_interval_interp_check(&v, p).unwrap().0
        })
        .collect();
    let x: Vec<f64> = ps.iter().map(|&p| p as f64).collect();
    let y: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let (slope, _, _) = ls_fit(&x, &y);
    let ok = slope <= -0.3;
    report(
        8,
        ok,
        format!("slope of ln ||v - I_p v||_2 vs p = {slope:.4} (<= -0.3)"),
    );
    assert!(ok);
}

fn study_2d() -> Vec<StudyRow> {
    let mut cfg = StudyConfig::new_2d("bessel", vec![1e-2, 1e-4, 1e-6], 2, 8);
    cfg.record_timing = false;
    let report = run_study(&cfg).expect("2D study");
    assert!(report.rows.iter().all(|r| r.status == "ok"));
    report.rows
}

#[test]
fn criteria_09_10_convergence_2d() {
    let rows = study_2d();
    let (ps, env) = envelope(&rows, |r| r.balanced);
    let (beta_b, r2_b) = exp_fit(&ps, &env);
    let ok9 = beta_b > 0.0 && r2_b >= 0.9;
    report(
        9,
        ok9,
        format!("2D balanced envelope beta = {beta_b:.4} (> 0), R^2 = {r2_b:.4} (>= 0.9)"),
    );
    let (ps, env) = envelope(&rows, |r| r.energy);
    let (beta_e, r2_e) = exp_fit(&ps, &env);
    let ok10 = beta_e > 0.0;
    report(
        10,
        ok10,
        format!("2D energy envelope beta = {beta_e:.4} (> 0), R^2 = {r2_e:.4}"),
    );
    assert!(ok9 && ok10);
}

#[test]
fn criterion_11_structural_invariants() {
    let summary = verify::run(Suite::All);
    for c in summary.checks.iter().filter(|c| c.status == Status::Fail) {
        println!(
            "  failed check: {} (value {:e}, bound {:e})",
            c.name, c.value, c.bound
        );
    }
    let ok = summary.passed();
    report(
        11,
        ok,
        format!(
            "verify ALL: {} checks, {} failed",
            summary.checks.len(),
            summary
                .checks
                .iter()
                .filter(|c| c.status == Status::Fail)
                .count()
        ),
    );
    assert!(ok);
}
