//! Legendre polynomials, Gauss and Gauss–Lobatto quadrature, and the two
//! reference-element bases used by the solvers: a C¹ hierarchical basis
//! (Hermite cubics plus double-zero bubbles) and the nodal Gauss–Lobatto
//! Lagrange basis.
//!
//! Every reference quantity lives on `[-1, 1]`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

/// Value and first derivative of the Legendre polynomial `P_n` at `x`.
pub fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut p) = (1.0, x);
    let (mut dp_prev, mut dp) = (0.0, 1.0);
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        // P'_{k+1} = P'_{k-1} + (2k+1) P_k
        let dp_next = dp_prev + (2.0 * kf + 1.0) * p;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    (p, dp)
}

/// Values `P_0(x), ..., P_n(x)`.
pub fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(x);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// A quadrature rule on the reference interval `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    /// Highest polynomial degree integrated exactly.
    pub order: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Points and weights transported to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.points
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }
}

/// Gauss–Legendre rule with `n` points, exact up to degree `2n - 1`.
pub fn gauss_rule(n: usize) -> QuadratureRule {
    assert!(n >= 1, "a Gauss rule needs at least one point");
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..NEWTON_MAX_ITER {
            let (p, dp) = legendre_eval(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= NEWTON_TOL {
                break;
            }
        }
        let (_, dp) = legendre_eval(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        points[i] = -x;
        points[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.0;
    }
    QuadratureRule {
        points,
        weights,
        order: 2 * n - 1,
    }
}

/// Gauss–Lobatto–Legendre rule with `n >= 2` points (endpoints included),
/// exact up to degree `2n - 3`.
pub fn gauss_lobatto_rule(n: usize) -> QuadratureRule {
    assert!(n >= 2, "a Gauss-Lobatto rule needs at least two points");
    let deg = n - 1;
    let nf = deg as f64;
    let mut points = vec![0.0; n];
    points[0] = -1.0;
    points[n - 1] = 1.0;
    // interior nodes are the roots of P'_deg
    for i in 1..(n - 1) / 2 + 1 {
        let mut x = (PI * i as f64 / nf).cos();
        for _ in 0..NEWTON_MAX_ITER {
            let (p, dp) = legendre_eval(deg, x);
            let ddp = (2.0 * x * dp - nf * (nf + 1.0) * p) / (1.0 - x * x);
            let dx = dp / ddp;
            x -= dx;
            if dx.abs() <= NEWTON_TOL {
                break;
            }
        }
        points[n - 1 - i] = x;
        points[i] = -x;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.0;
    }
    let weights = points
        .iter()
        .map(|&x| {
            let (p, _) = legendre_eval(deg, x);
            2.0 / (nf * (nf + 1.0) * p * p)
        })
        .collect();
    QuadratureRule {
        points,
        weights,
        order: 2 * n - 3,
    }
}

/// Values, first and second derivatives of all basis functions at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisValues {
    pub d0: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

impl BasisValues {
    pub fn derivative(&self, k: usize) -> &[f64] {
        match k {
            0 => &self.d0,
            1 => &self.d1,
            2 => &self.d2,
            _ => panic!("derivative order {k} is not tabulated"),
        }
    }
}

// Monomial coefficients of the Hermite cubics on [-1, 1], ordered
// (value at -1, slope at -1, value at +1, slope at +1).
const HERMITE: [[f64; 4]; 4] = [
    [0.5, -0.75, 0.0, 0.25],
    [0.25, -0.25, -0.25, 0.25],
    [0.5, 0.75, 0.0, -0.25],
    [-0.25, -0.25, 0.25, 0.25],
];

/// Hierarchical C¹ basis of `P_p` on `[-1, 1]`.
///
/// Local index 0..4 are the Hermite cubics (value/slope at -1, value/slope
/// at +1); index `4 + j` is the bubble whose second derivative is the
/// normalized Legendre polynomial `P_{j+2}`. The bubbles vanish with their
/// slope at both endpoints and are orthonormal in the H² seminorm; the
/// Hermite cubics have linear second derivatives and are therefore
/// H²-orthogonal to all bubbles.
#[derive(Debug, Clone, PartialEq)]
pub struct C1ReferenceBasis {
    p: usize,
}

impl C1ReferenceBasis {
    pub fn new(p: usize) -> Result<Self> {
        if p < 3 {
            return Err(Error::InvalidDegree {
                degree: p,
                min: 3,
                what: "C1 basis",
            });
        }
        Ok(Self { p })
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.p + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn num_bubbles(&self) -> usize {
        self.p - 3
    }

    /// Scale making bubble `j` unit in the H² seminorm.
    fn bubble_norm(j: usize) -> f64 {
        let k = (j + 2) as f64;
        ((2.0 * k + 1.0) / 2.0).sqrt()
    }

    pub fn eval(&self, x: f64) -> BasisValues {
        let n = self.len();
        let mut d0 = vec![0.0; n];
        let mut d1 = vec![0.0; n];
        let mut d2 = vec![0.0; n];
        for (i, c) in HERMITE.iter().enumerate() {
            d0[i] = c[0] + x * (c[1] + x * (c[2] + x * c[3]));
            d1[i] = c[1] + x * (2.0 * c[2] + 3.0 * x * c[3]);
            d2[i] = 2.0 * c[2] + 6.0 * x * c[3];
        }
        if self.p > 3 {
            let leg = legendre_all(self.p, x);
            for j in 0..self.num_bubbles() {
                let k = j + 2;
                let kf = k as f64;
                let s = Self::bubble_norm(j);
                let a = (leg[k + 2] - leg[k]) / (2.0 * kf + 3.0);
                let b = (leg[k] - leg[k - 2]) / (2.0 * kf - 1.0);
                d0[4 + j] = s * (a - b) / (2.0 * kf + 1.0);
                d1[4 + j] = s * (leg[k + 1] - leg[k - 1]) / (2.0 * kf + 1.0);
                d2[4 + j] = s * leg[k];
            }
        }
        BasisValues { d0, d1, d2 }
    }

    /// Coefficients of the C¹ interpolant on the reference interval from
    /// endpoint data and the second derivative: Hermite data is matched
    /// exactly and the bubble coefficients are the Legendre moments of
    /// `second` of degrees `2..=p-2`, which makes the interpolation error's
    /// second derivative orthogonal to `P_{p-2}`.
    pub fn interpolate(
        &self,
        endpoint_values: [f64; 2],
        endpoint_slopes: [f64; 2],
        second: impl Fn(f64) -> f64,
        rule: &QuadratureRule,
    ) -> Vec<f64> {
        let mut coeffs = vec![0.0; self.len()];
        coeffs[0] = endpoint_values[0];
        coeffs[1] = endpoint_slopes[0];
        coeffs[2] = endpoint_values[1];
        coeffs[3] = endpoint_slopes[1];
        if self.p > 3 {
            let mut moments = vec![0.0; self.num_bubbles()];
            for (&t, &w) in rule.points.iter().zip(&rule.weights) {
                let g = second(t);
                let leg = legendre_all(self.p - 2, t);
                for (j, m) in moments.iter_mut().enumerate() {
                    *m += w * g * leg[j + 2];
                }
            }
            for (j, m) in moments.into_iter().enumerate() {
                // bubble'' = s P_k and <P_k, P_k> = 2/(2k+1) = 1/s^2
                let s = Self::bubble_norm(j);
                coeffs[4 + j] = m * s;
            }
        }
        coeffs
    }

    /// Exact expansion of a polynomial of degree `<= p`, given by monomial
    /// coefficients, in this basis.
    pub fn expand_polynomial(&self, monomial: &[f64]) -> Vec<f64> {
        assert!(monomial.len() <= self.p + 1, "polynomial degree exceeds p");
        let eval = |x: f64, k: usize| poly_derivative(monomial, x, k);
        let rule = gauss_rule(self.p + 1);
        self.interpolate(
            [eval(-1.0, 0), eval(1.0, 0)],
            [eval(-1.0, 1), eval(1.0, 1)],
            |x| eval(x, 2),
            &rule,
        )
    }

    pub fn combine(&self, coeffs: &[f64], x: f64, k: usize) -> f64 {
        let v = self.eval(x);
        v.derivative(k).iter().zip(coeffs).map(|(b, c)| b * c).sum()
    }
}

/// `k`-th derivative of a polynomial given by monomial coefficients.
pub fn poly_derivative(monomial: &[f64], x: f64, k: usize) -> f64 {
    let mut acc = 0.0;
    for (i, &c) in monomial.iter().enumerate().skip(k).rev() {
        let mut fall = 1.0;
        for j in 0..k {
            fall *= (i - j) as f64;
        }
        acc = acc * x + c * fall;
    }
    acc
}

/// Composite Gauss rule on `[a, b] ⊂ [0, 1]` whose panels shrink
/// geometrically toward both ends of `[0, 1]`, with the smallest panel of
/// size `scale / 8`. Resolves integrands with `exp(-dist/scale)` layers.
pub fn graded_rule(a: f64, b: f64, scale: f64, points_per_panel: usize) -> Vec<(f64, f64)> {
    let mut breaks = vec![a, b];
    let mut d = scale / 8.0;
    while d < 0.5 {
        for x in [d, 1.0 - d] {
            if x > a && x < b {
                breaks.push(x);
            }
        }
        d *= 2.0;
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let rule = gauss_rule(points_per_panel);
    let mut out = Vec::with_capacity(rule.len() * breaks.len());
    for w in breaks.windows(2) {
        out.extend(rule.mapped(w[0], w[1]));
    }
    out
}

/// Nodal Lagrange basis on the Gauss–Lobatto points of degree `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLobattoBasis {
    p: usize,
    nodes: Vec<f64>,
    // 1 / prod_{m != j} (x_j - x_m)
    scale: Vec<f64>,
}

impl GaussLobattoBasis {
    pub fn new(p: usize) -> Result<Self> {
        if p < 1 {
            return Err(Error::InvalidDegree {
                degree: p,
                min: 1,
                what: "Gauss-Lobatto basis",
            });
        }
        let nodes = gauss_lobatto_rule(p + 1).points;
        let scale = (0..=p)
            .map(|j| {
                let prod: f64 = (0..=p)
                    .filter(|&m| m != j)
                    .map(|m| nodes[j] - nodes[m])
                    .product();
                1.0 / prod
            })
            .collect();
        Ok(Self { p, nodes, scale })
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Cardinal function values and first derivatives at `x`.
    pub fn eval(&self, x: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.p + 1;
        let diffs: Vec<f64> = self.nodes.iter().map(|&xm| x - xm).collect();
        let mut val = vec![0.0; n];
        let mut der = vec![0.0; n];
        for j in 0..n {
            let mut v = 1.0;
            let mut d = 0.0;
            for m in 0..n {
                if m == j {
                    continue;
                }
                // product rule accumulated alongside the product
                d = d * diffs[m] + v;
                v *= diffs[m];
            }
            val[j] = v * self.scale[j];
            der[j] = d * self.scale[j];
        }
        (val, der)
    }
}
