//! Closed-form scalar functions on the line with exact derivatives of any
//! order: finite sums of `q(x − shift)·exp(rate·(x − shift))` and cosine
//! terms. Centring the polynomial at the shift keeps mirrored layer terms
//! free of cancellation near `x = 1`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Term {
    /// `q(x − shift) · exp(rate · (x − shift))`, `q` in monomial
    /// coefficients.
    ExpPoly {
        poly: Vec<f64>,
        rate: f64,
        shift: f64,
    },
    /// `amp · cos(freq · x + phase)`
    Cos { amp: f64, freq: f64, phase: f64 },
}

impl Term {
    fn derivative(&self, x: f64, k: usize) -> f64 {
        match self {
            Term::ExpPoly { poly, rate, shift } => {
                let y = x - shift;
                let e = if *rate == 0.0 { 1.0 } else { (rate * y).exp() };
                if e == 0.0 {
                    return 0.0;
                }
                // Leibniz: sum_j C(k,j) poly^{(j)} rate^{k-j}
                let mut acc = 0.0;
                let mut binom = 1.0;
                for j in 0..=k {
                    if j > 0 {
                        binom *= (k - j + 1) as f64 / j as f64;
                    }
                    if j >= poly.len() {
                        break;
                    }
                    let rk = if k - j == 0 {
                        1.0
                    } else {
                        rate.powi((k - j) as i32)
                    };
                    if rk == 0.0 {
                        continue;
                    }
                    acc += binom * crate::polybasis::poly_derivative(poly, y, j) * rk;
                }
                acc * e
            }
            Term::Cos { amp, freq, phase } => {
                let arg = freq * x + phase + k as f64 * std::f64::consts::FRAC_PI_2;
                amp * freq.powi(k as i32) * arg.cos()
            }
        }
    }

    fn is_constant(&self) -> bool {
        match self {
            Term::ExpPoly { poly, rate, .. } => *rate == 0.0 && poly.len() <= 1,
            Term::Cos { amp, freq, .. } => *amp == 0.0 || *freq == 0.0,
        }
    }
}

/// Sum of [`Term`]s.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Expr {
    pub terms: Vec<Term>,
}

impl Expr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::poly(vec![c])
    }

    pub fn poly(coeffs: Vec<f64>) -> Self {
        Self {
            terms: vec![Term::ExpPoly {
                poly: coeffs,
                rate: 0.0,
                shift: 0.0,
            }],
        }
    }

    pub fn exp_poly(coeffs: Vec<f64>, rate: f64, shift: f64) -> Self {
        Self {
            terms: vec![Term::ExpPoly {
                poly: coeffs,
                rate,
                shift,
            }],
        }
    }

    pub fn cos(amp: f64, freq: f64, phase: f64) -> Self {
        Self {
            terms: vec![Term::Cos { amp, freq, phase }],
        }
    }

    pub fn plus(mut self, other: Expr) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.derivative(x, 0)
    }

    pub fn derivative(&self, x: f64, k: usize) -> f64 {
        self.terms.iter().map(|t| t.derivative(x, k)).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(Term::is_constant)
    }

    /// `x ↦ self(1 − x)`.
    pub fn reflected(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| match t {
                Term::ExpPoly { poly, rate, shift } => Term::ExpPoly {
                    poly: poly
                        .iter()
                        .enumerate()
                        .map(|(i, &c)| if i % 2 == 0 { c } else { -c })
                        .collect(),
                    rate: -rate,
                    shift: 1.0 - shift,
                },
                Term::Cos { amp, freq, phase } => Term::Cos {
                    amp: *amp,
                    freq: -freq,
                    phase: phase + freq,
                },
            })
            .collect();
        Self { terms }
    }
}
