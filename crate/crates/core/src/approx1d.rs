//! Analysis-side constructions in 1D, made executable: the C¹ interpolant,
//! the smooth-part projection, the layer correctors, the special
//! representative and the inverse/interpolation inequalities.

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem1d::{DiscreteField1D, Field1D, ProblemSpec1D};
use crate::linsolve::{solve_direct, CsrMatrix, SparseSystem};
use crate::meshing::{build_mesh_1d, Region1D, SblMesh1D};
use crate::polybasis::{gauss_rule, graded_rule, legendre_all, legendre_eval, C1ReferenceBasis};
use crate::problems::Expr;

const MOMENT_POINTS_PER_PANEL: usize = 20;

/// Bubble moments of `w''` on `[a, b]`: `∫ (h/2)² w''(x) P_k(t) dt`,
/// `k = 2..=p-2`.
fn bubble_moments(w: &dyn Field1D, a: f64, b: f64, p: usize, eps: f64) -> Vec<f64> {
    let h = b - a;
    let mut m = vec![0.0; p.saturating_sub(3)];
    if m.is_empty() {
        return m;
    }
    // dt = 2/h dx, so (h/2)^2 w'' dt = (h/2) w'' dx
    for (x, wt) in graded_rule(a, b, eps, MOMENT_POINTS_PER_PANEL) {
        let t = 2.0 * (x - a) / h - 1.0;
        let leg = legendre_all(p - 2, t);
        let g = 0.5 * h * w.derivative(x, 2);
        for (j, mj) in m.iter_mut().enumerate() {
            *mj += wt * g * leg[j + 2];
        }
    }
    m
}

/// The C¹ interpolant `I_p w`: values and slopes at the nodes, and on each
/// element `(I_p w − w)''` orthogonal to `P_{p−2}`.
pub fn interpolate_c1(w: &dyn Field1D, mesh: &SblMesh1D, p: usize) -> Result<DiscreteField1D> {
    let mut field = DiscreteField1D::zeros(mesh.clone(), p)?;
    for j in 0..mesh.num_elements() {
        let (a, b) = mesh.element(j);
        let h = b - a;
        let mut local = vec![0.0; p + 1];
        local[0] = w.derivative(a, 0);
        local[1] = w.derivative(a, 1) * 0.5 * h;
        local[2] = w.derivative(b, 0);
        local[3] = w.derivative(b, 1) * 0.5 * h;
        for (i, m) in bubble_moments(w, a, b, p, mesh.eps).into_iter().enumerate() {
            let k = (i + 2) as f64;
            local[4 + i] = m * ((2.0 * k + 1.0) / 2.0).sqrt();
        }
        field.set_local_coeffs(j, &local);
    }
    Ok(field)
}

/// Orthogonality residuals `∫_{Ω_j} (I_p w − w)'' P_k`, `k = 0..=p-2`, on
/// every element (Legendre polynomials mapped to the element).
pub fn orthogonality_residuals(w: &dyn Field1D, ip: &DiscreteField1D) -> Vec<Vec<f64>> {
    let mesh = &ip.mesh;
    (0..mesh.num_elements())
        .map(|j| {
            let (a, b) = mesh.element(j);
            let mut r = vec![0.0; ip.p - 1];
            for (x, wt) in graded_rule(a, b, mesh.eps, MOMENT_POINTS_PER_PANEL) {
                let t = 2.0 * (x - a) / (b - a) - 1.0;
                let leg = legendre_all(ip.p - 2, t);
                let e = ip.eval_on_element(j, x, 2) - w.derivative(x, 2);
                for (k, rk) in r.iter_mut().enumerate() {
                    *rk += wt * e * leg[k];
                }
            }
            r
        })
        .collect()
}

/// A polynomial of degree `p` on `[0, 1]`: linear lift plus integrated
/// Legendre functions `(P_{k+1} − P_{k−1})/(2k+1)` of `t = 2x − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothPolynomial {
    pub p: usize,
    pub left: f64,
    pub right: f64,
    /// Coefficients of the `p − 1` interior functions.
    pub interior: Vec<f64>,
}

impl SmoothPolynomial {
    fn interior_basis(p: usize, x: f64) -> [Vec<f64>; 3] {
        let t = 2.0 * x - 1.0;
        let leg = legendre_all(p, t);
        let mut v = vec![0.0; p - 1];
        let mut d = vec![0.0; p - 1];
        let mut dd = vec![0.0; p - 1];
        for k in 1..p {
            let kf = k as f64;
            v[k - 1] = (leg[k + 1] - leg[k - 1]) / (2.0 * kf + 1.0);
            d[k - 1] = 2.0 * leg[k];
            dd[k - 1] = 4.0 * legendre_eval(k, t).1;
        }
        [v, d, dd]
    }
}

impl Field1D for SmoothPolynomial {
    fn derivative(&self, x: f64, k: usize) -> f64 {
        let lift = match k {
            0 => self.left * (1.0 - x) + self.right * x,
            1 => self.right - self.left,
            _ => 0.0,
        };
        if k > 2 {
            panic!("smooth polynomial derivatives are tabulated up to order 2");
        }
        let basis = Self::interior_basis(self.p, x);
        lift + basis[k]
            .iter()
            .zip(&self.interior)
            .map(|(a, b)| a * b)
            .sum::<f64>()
    }
}

/// `u_{S,p}`: the `B₀`-projection of `u_S` onto `P_p` with matched end
/// values, `B₀(w, v) = ⟨b w', v'⟩ + ⟨c w, v⟩`.
pub fn project_smooth(us: &dyn Field1D, b: &Expr, c: &Expr, p: usize) -> Result<SmoothPolynomial> {
    if p < 3 {
        return Err(Error::InvalidDegree {
            degree: p,
            min: 3,
            what: "smooth projection",
        });
    }
    let n = p - 1;
    let (left, right) = (us.derivative(0.0, 0), us.derivative(1.0, 0));
    let lift = |x: f64, k: usize| match k {
        0 => left * (1.0 - x) + right * x,
        _ => right - left,
    };
    let mut a = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    let rule = gauss_rule(2 * p + 10);
    for (x, w) in rule.mapped(0.0, 1.0) {
        let [v, d, _] = SmoothPolynomial::interior_basis(p, x);
        let (bx, cx) = (b.eval(x), c.eval(x));
        let r0 = us.derivative(x, 0) - lift(x, 0);
        let r1 = us.derivative(x, 1) - lift(x, 1);
        for i in 0..n {
            rhs[i] += w * (bx * r1 * d[i] + cx * r0 * v[i]);
            for j in 0..n {
                a[i][j] += w * (bx * d[i] * d[j] + cx * v[i] * v[j]);
            }
        }
    }
    let system = SparseSystem::new(CsrMatrix::from_dense(&a), rhs, true)?;
    let interior = solve_direct(&system)?;
    Ok(SmoothPolynomial {
        p,
        left,
        right,
        interior,
    })
}

/// `B₀(w, w)^{1/2}` on `(0, 1)`.
pub fn b0_norm(w: &dyn Field1D, b: &Expr, c: &Expr, points: usize) -> f64 {
    gauss_rule(points)
        .mapped(0.0, 1.0)
        .map(|(x, wt)| {
            let (v, d) = (w.derivative(x, 0), w.derivative(x, 1));
            wt * (b.eval(x) * d * d + c.eval(x) * v * v)
        })
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CorrectorKind {
    Chi0,
    Chi1,
}

/// Cubic correctors on `[0, τ]`: `χ₀ = x²(x−τ)/τ²` has unit slope at `τ`,
/// `χ₁ = 3(x/τ)² − 2(x/τ)³` unit value; both vanish with their slope at 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corrector {
    pub tau: f64,
    pub kind: CorrectorKind,
}

impl Corrector {
    pub fn new(tau: f64, kind: CorrectorKind) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidParameter {
                name: "tau",
                value: tau,
                reason: "must be positive",
            });
        }
        Ok(Self { tau, kind })
    }

    /// `|χ|_{k,(0,τ)}` by Gauss quadrature (exact for the squared cubic).
    pub fn seminorm(&self, k: usize) -> f64 {
        gauss_rule(6)
            .mapped(0.0, self.tau)
            .map(|(x, w)| w * self.derivative(x, k).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// `i` in the bound `|χ_i|_k ≲ τ^{3/2−k−i}`.
    pub fn index(&self) -> i32 {
        match self.kind {
            CorrectorKind::Chi0 => 0,
            CorrectorKind::Chi1 => 1,
        }
    }
}

impl Field1D for Corrector {
    fn derivative(&self, x: f64, k: usize) -> f64 {
        let t = self.tau;
        match (self.kind, k) {
            (CorrectorKind::Chi0, 0) => x * x * (x - t) / (t * t),
            (CorrectorKind::Chi0, 1) => (3.0 * x * x - 2.0 * t * x) / (t * t),
            (CorrectorKind::Chi0, 2) => (6.0 * x - 2.0 * t) / (t * t),
            (CorrectorKind::Chi0, 3) => 6.0 / (t * t),
            (CorrectorKind::Chi1, 0) => {
                let s = x / t;
                3.0 * s * s - 2.0 * s * s * s
            }
            (CorrectorKind::Chi1, 1) => 6.0 * x / (t * t) - 6.0 * x * x / (t * t * t),
            (CorrectorKind::Chi1, 2) => 6.0 / (t * t) - 12.0 * x / (t * t * t),
            (CorrectorKind::Chi1, 3) => -12.0 / (t * t * t),
            _ => 0.0,
        }
    }
}

/// `û_p`: `I_p u` corrected on the layer elements so that it joins
/// `u_{S,p}` in a C¹ way at `τ` and `1 − τ`, and `u_{S,p}` in between.
#[derive(Debug, Clone)]
pub struct SpecialRepresentative {
    /// `û_p` as a member of the discrete space.
    pub field: DiscreteField1D,
    pub interpolant: DiscreteField1D,
    pub smooth: SmoothPolynomial,
    /// `(u_{S,p} − u)` and its slope at `τ`.
    pub left_jump: [f64; 2],
    /// `(u_{S,p} − u)` and its slope at `1 − τ`.
    pub right_jump: [f64; 2],
    chi0: Corrector,
    chi1: Corrector,
}

impl SpecialRepresentative {
    /// Piecewise formula evaluation, independent of [`Self::field`].
    pub fn eval_piecewise(&self, x: f64, k: usize) -> f64 {
        let mesh = &self.interpolant.mesh;
        let tau = mesh.tau;
        if x <= tau {
            let [d, dd] = self.left_jump;
            self.interpolant.eval_on_element(0, x, k)
                + self.chi0.derivative(x, k) * dd
                + self.chi1.derivative(x, k) * d
        } else if x >= 1.0 - tau {
            let [d, dd] = self.right_jump;
            let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
            let y = 1.0 - x;
            self.interpolant.eval_on_element(2, x, k) - sign * self.chi0.derivative(y, k) * dd
                + sign * self.chi1.derivative(y, k) * d
        } else {
            self.smooth.derivative(x, k)
        }
    }
}

/// Builds `û_p` for a problem with a full decomposition on the SBL mesh
/// for `(κ, p, ε)`; requires the layered branch `κpε < 1/3`.
pub fn special_representative(
    problem: &ProblemSpec1D,
    kappa: f64,
    p: usize,
) -> Result<SpecialRepresentative> {
    let parts = problem.decomposition()?;
    let u = &problem.exact().ok_or(Error::MissingDecomposition)?.u;
    let mesh = build_mesh_1d(kappa, p, problem.eps)?;
    if !mesh.has_layer() {
        return Err(Error::Unsupported(
            "the special representative needs layer elements (kappa p eps < 1/3)".into(),
        ));
    }
    let interpolant = interpolate_c1(u, &mesh, p)?;
    let smooth = project_smooth(&parts.smooth, &problem.b, &problem.c, p)?;
    let tau = mesh.tau;
    let jump = |x: f64| {
        [
            smooth.derivative(x, 0) - u.derivative(x, 0),
            smooth.derivative(x, 1) - u.derivative(x, 1),
        ]
    };
    let mut field = interpolant.clone();
    // coarse element: exact expansion of u_{S,p}; this also sets the C¹
    // data at τ and 1 − τ, which is what the correctors add
    let basis = C1ReferenceBasis::new(p)?;
    let (a, b) = mesh.element(1);
    let h = b - a;
    let half = 0.5 * h;
    let rule = gauss_rule(p + 2);
    let local = basis.interpolate(
        [smooth.derivative(a, 0), smooth.derivative(b, 0)],
        [
            smooth.derivative(a, 1) * half,
            smooth.derivative(b, 1) * half,
        ],
        |t| half * half * smooth.derivative(a + (t + 1.0) * half, 2),
        &rule,
    );
    field.set_local_coeffs(1, &local);
    debug_assert_eq!(mesh.regions[1], Region1D::Coarse);
    Ok(SpecialRepresentative {
        field,
        interpolant,
        left_jump: jump(tau),
        right_jump: jump(1.0 - tau),
        smooth,
        chi0: Corrector::new(tau, CorrectorKind::Chi0)?,
        chi1: Corrector::new(tau, CorrectorKind::Chi1)?,
    })
}

/// Legendre coefficients of `q'` from those of `q`.
pub fn legendre_series_derivative(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut b = vec![0.0; n.saturating_sub(1)];
    for (k, bk) in b.iter_mut().enumerate() {
        let mut s = 0.0;
        let mut m = k + 1;
        while m < n {
            s += a[m];
            m += 2;
        }
        *bk = (2.0 * k as f64 + 1.0) * s;
    }
    b
}

fn legendre_series_eval(a: &[f64], t: f64) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    legendre_all(a.len() - 1, t)
        .iter()
        .zip(a)
        .map(|(p, c)| p * c)
        .sum()
}

/// Ratios of one inverse-inequality test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseRatio {
    /// `|q|_k / (p^{2k} |D|^{-k} ‖q‖_0)`
    pub markov: f64,
    /// `|q|_k / ((p!/(p−k)!)² |D|^{-k} ‖q‖_0)`
    pub factorial: f64,
}

/// Inverse-inequality ratios for `q = Σ a_n P_n(t)`, `t` the affine image
/// of `D = (lo, hi)` on `[-1, 1]`, with `p = deg q`.
pub fn check_inverse_inequality(a: &[f64], lo: f64, hi: f64, k: usize) -> InverseRatio {
    let p = a.len().saturating_sub(1);
    let len = hi - lo;
    let mut dk = a.to_vec();
    for _ in 0..k {
        dk = legendre_series_derivative(&dk);
    }
    let rule = gauss_rule(p + 2);
    let jac = 0.5 * len;
    let q0: f64 = rule.integrate(|t| legendre_series_eval(a, t).powi(2)) * jac;
    let qk: f64 = rule.integrate(|t| legendre_series_eval(&dk, t).powi(2))
        * jac
        * (2.0 / len).powi(2 * k as i32);
    let (q0, qk) = (q0.sqrt(), qk.sqrt());
    if qk == 0.0 {
        return InverseRatio {
            markov: 0.0,
            factorial: 0.0,
        };
    }
    let scale = len.powi(-(k as i32)) * q0;
    let fall: f64 = (0..k).map(|j| (p - j) as f64).product();
    InverseRatio {
        markov: qk / ((p as f64).powi(2 * k as i32) * scale),
        factorial: qk / (fall * fall * scale),
    }
}

/// Largest ratios over `trials` random polynomials of degree `p` on `(0, 1)`.
pub fn inverse_inequality_sweep(p: usize, k: usize, trials: usize, seed: u64) -> InverseRatio {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut worst = InverseRatio {
        markov: 0.0,
        factorial: 0.0,
    };
    for _ in 0..trials {
        // standard normal coefficients in the L²-orthonormal Legendre basis
        // give a rotation-invariant distribution of directions
        let a: Vec<f64> = (0..=p)
            .map(|n| {
                let (u1, u2): (f64, f64) = (rng.gen_range(f64::EPSILON..1.0), rng.gen());
                let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                z * ((2 * n + 1) as f64 / 2.0).sqrt()
            })
            .collect();
        let r = check_inverse_inequality(&a, 0.0, 1.0, k);
        worst.markov = worst.markov.max(r.markov);
        worst.factorial = worst.factorial.max(r.factorial);
    }
    worst
}

/// Supremum of the Markov ratio `|q|_k / (p^{2k} ‖q‖_0)` over `q ∈ P_p` on
/// `(0, 1)`: the root of the largest eigenvalue of the Gram matrix of
/// `k`-th derivatives of the orthonormal Legendre basis, by power iteration.
pub fn markov_sup(p: usize, k: usize) -> f64 {
    let n = p + 1;
    let rule = gauss_rule(p + 2);
    let derivs: Vec<Vec<f64>> = (0..n)
        .map(|m| {
            let mut a = vec![0.0; m + 1];
            a[m] = (2.0 * m as f64 + 1.0).sqrt();
            for _ in 0..k {
                a = legendre_series_derivative(&a);
            }
            a.iter().map(|c| c * 2f64.powi(k as i32)).collect()
        })
        .collect();
    let mut g = vec![vec![0.0; n]; n];
    for (&t, &w) in rule.points.iter().zip(&rule.weights) {
        let vals: Vec<f64> = derivs.iter().map(|a| legendre_series_eval(a, t)).collect();
        for i in 0..n {
            for j in 0..n {
                // dx = dt / 2 on (0, 1)
                g[i][j] += 0.5 * w * vals[i] * vals[j];
            }
        }
    }
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
    let mut lambda = 0.0;
    for _ in 0..2000 {
        let gv: Vec<f64> = g
            .iter()
            .map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum())
            .collect();
        let norm = gv.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm / v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v = gv.into_iter().map(|x| x / norm).collect();
        if (next - lambda).abs() <= 1e-14 * next {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda.sqrt() / (p as f64).powi(2 * k as i32)
}

/// C¹ interpolation of `v` on the reference interval and its full H²
/// error, `‖v − I_p v‖_{2,(−1,1)}`.
pub fn reference_interp_error(v: &dyn Field1D, p: usize) -> Result<f64> {
    let basis = C1ReferenceBasis::new(p)?;
    let coeffs = basis.interpolate(
        [v.derivative(-1.0, 0), v.derivative(1.0, 0)],
        [v.derivative(-1.0, 1), v.derivative(1.0, 1)],
        |t| v.derivative(t, 2),
        &gauss_rule(p + 30),
    );
    let err: f64 = gauss_rule(p + 40).integrate(|t| {
        let vals = basis.eval(t);
        (0..3)
            .map(|k| {
                let ip: f64 = vals
                    .derivative(k)
                    .iter()
                    .zip(&coeffs)
                    .map(|(a, b)| a * b)
                    .sum();
                (ip - v.derivative(t, k)).powi(2)
            })
            .sum()
    });
    Ok(err.sqrt())
}

/// Layer profile `v(t) = C e^{−Kh(1+t)/2}` on the reference interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerProfile {
    pub amplitude: f64,
    pub k: f64,
    pub h: f64,
}

impl Field1D for LayerProfile {
    fn derivative(&self, t: f64, k: usize) -> f64 {
        let r = -0.5 * self.k * self.h;
        self.amplitude * r.powi(k as i32) * (r * (1.0 + t)).exp()
    }
}

/// `(‖v − I_p v‖_{2,I}, C_v K^{1/2} h)` for a layer profile.
pub fn reference_interval_interp_check(v: &LayerProfile, p: usize) -> Result<(f64, f64)> {
    let err = reference_interp_error(v, p)?;
    Ok((err, v.amplitude.abs() * v.k.sqrt() * v.h))
}

/// Scaled layer-element terms `((κpε)^{-1}‖e‖₀, |e|₁, κpε|e|₂)` of the
/// interpolation error on the left layer element.
pub fn layer_element_terms(
    u: &dyn Field1D,
    ip: &DiscreteField1D,
    problem: &ProblemSpec1D,
) -> [f64; 3] {
    let (a, b) = ip.mesh.element(0);
    let h = b - a;
    let e = crate::fem1d::Difference(u, ip);
    let ints = crate::fem1d::norms::integrals(&e, problem, a, b);
    [ints.seminorm(0) / h, ints.seminorm(1), h * ints.seminorm(2)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::catalog_1d;

    #[test]
    fn hermite_oracle_for_quartic() {
        let mesh = SblMesh1D {
            nodes: vec![0.0, 1.0],
            tau: 1.0,
            kappa: 1.0,
            p: 3,
            eps: 1.0,
            regions: vec![Region1D::Coarse],
        };
        let w = Expr::poly(vec![0.0, 0.0, 0.0, 0.0, 1.0]);
        let ip = interpolate_c1(&w, &mesh, 3).unwrap();
        for &x in &[0.1, 0.5, 0.8] {
            let oracle = 2.0 * x * x * x - x * x;
            assert!((ip.evaluate(x, 0).unwrap() - oracle).abs() < 1e-14);
        }
    }

    #[test]
    fn corrector_conditions() {
        let c0 = Corrector::new(0.5, CorrectorKind::Chi0).unwrap();
        let c1 = Corrector::new(0.5, CorrectorKind::Chi1).unwrap();
        for c in [c0, c1] {
            assert!(c.derivative(0.0, 0).abs() < 1e-13 && c.derivative(0.0, 1).abs() < 1e-13);
        }
        assert!(c0.value(0.5).abs() < 1e-13 && (c0.derivative(0.5, 1) - 1.0).abs() < 1e-13);
        assert!((c1.value(0.5) - 1.0).abs() < 1e-13 && c1.derivative(0.5, 1).abs() < 1e-13);
        assert!(Corrector::new(0.0, CorrectorKind::Chi0).is_err());
    }

    #[test]
    fn projection_fixes_polynomials() {
        let q = Expr::poly(vec![0.3, -1.0, 0.0, 2.0, 0.5]);
        let b = Expr::poly(vec![1.0, 0.0, 0.5]);
        let c = Expr::constant(2.0);
        let us = project_smooth(&q, &b, &c, 5).unwrap();
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            assert!((us.value(x) - q.eval(x)).abs() < 1e-11);
        }
    }

    #[test]
    fn series_derivative() {
        // P_3' = 5 P_2 + P_0
        assert_eq!(
            legendre_series_derivative(&[0.0, 0.0, 0.0, 1.0]),
            vec![1.0, 0.0, 5.0]
        );
    }

    #[test]
    fn markov_sup_for_linear() {
        // q = x − 1/2 maximizes |q|_1/‖q‖_0 = √12 on P_1
        assert!((markov_sup(1, 1) - 12f64.sqrt()).abs() < 1e-10);
        let r = inverse_inequality_sweep(4, 2, 200, 3);
        assert!(r.markov <= markov_sup(4, 2) * (1.0 + 1e-12));
    }

    #[test]
    fn inverse_ratio_for_linear() {
        let r = check_inverse_inequality(&[0.5, 0.5], 0.0, 1.0, 1);
        // q = x on (0,1): |q|_1 = 1, ‖q‖_0 = 1/√3
        assert!((r.markov - 3f64.sqrt()).abs() < 1e-13);
        let c = check_inverse_inequality(&[1.0], 0.0, 1.0, 1);
        assert_eq!(c.markov, 0.0);
    }

    #[test]
    fn special_representative_is_c1() {
        let prob = catalog_1d("layered", 1e-4).unwrap();
        let rep = special_representative(&prob, 1.0, 6).unwrap();
        let tau = rep.field.mesh.tau;
        for x in [tau, 1.0 - tau] {
            for k in 0..2 {
                let l = rep.eval_piecewise(x, k);
                let r = rep.smooth.derivative(x, k);
                assert!((l - r).abs() < 1e-10);
            }
        }
        assert!(rep.field.max_c1_jump() < 1e-10);
        for i in 0..50 {
            let x = i as f64 / 49.0;
            for k in 0..3 {
                let a = rep.field.derivative(x, k);
                let b = rep.eval_piecewise(x, k);
                assert!(
                    (a - b).abs() <= 1e-8 * (1.0 + a.abs()),
                    "x={x} k={k} {a} {b}"
                );
            }
        }
    }
}
