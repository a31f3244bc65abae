use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::fem1d::{Decomposition1D, ExactSolution1D, ProblemSpec1D};
use crate::problems::Expr;

pub const CATALOG_1D: [&str; 3] = ["poly", "layered", "varcoef"];

/// Catalog entry with a note on how its data were produced.
#[derive(Debug, Clone)]
pub struct Catalog1DEntry {
    pub name: &'static str,
    pub spec: ProblemSpec1D,
    pub notes: &'static str,
}

/// `x²(1−x)²`, the clamped quartic.
pub fn quartic_bump() -> Expr {
    Expr::poly(vec![0.0, 0.0, 1.0, -2.0, 1.0])
}

/// `sin²(πx) = (1 − cos 2πx)/2`.
pub fn smooth_sine_squared() -> Expr {
    Expr::constant(0.5).plus(Expr::cos(-0.5, 2.0 * PI, 0.0))
}

/// Left layer `ε·φ(x)·e^{−x/ε}` with `φ(x) = (x/ε)²(1−x)²`: vanishes with
/// its slope at both ends, peaks at `x ≈ 2ε` with height `4e^{−2}ε`.
pub fn left_layer(eps: f64) -> Expr {
    let s = 1.0 / eps;
    Expr::exp_poly(vec![0.0, 0.0, s, -2.0 * s, s], -s, 0.0)
}

fn layered_solution(eps: f64) -> ExactSolution1D {
    let smooth = smooth_sine_squared();
    let left = left_layer(eps);
    let right = left.reflected();
    let u = smooth.clone().plus(left.clone()).plus(right.clone());
    ExactSolution1D {
        u,
        parts: Some(Decomposition1D {
            smooth,
            left,
            right,
            remainder: Expr::zero(),
        }),
    }
}

/// Looks up a 1D catalog problem by (case-insensitive) name.
pub fn catalog_1d(name: &str, eps: f64) -> Result<ProblemSpec1D> {
    Ok(catalog_entry_1d(name, eps)?.spec)
}

pub fn catalog_entry_1d(name: &str, eps: f64) -> Result<Catalog1DEntry> {
    let key = name.to_ascii_lowercase();
    let one = || Expr::constant(1.0);
    let entry = match key.as_str() {
        "poly" => {
            let u = quartic_bump();
            let exact = ExactSolution1D {
                u: u.clone(),
                parts: Some(Decomposition1D {
                    smooth: u,
                    left: Expr::zero(),
                    right: Expr::zero(),
                    remainder: Expr::zero(),
                }),
            };
            Catalog1DEntry {
                name: "poly",
                spec: ProblemSpec1D::manufactured("poly", eps, one(), one(), exact)?,
                notes: "u = x^2(1-x)^2, b = c = 1, f from analytic derivatives",
            }
        }
        "layered" => Catalog1DEntry {
            name: "layered",
            spec: ProblemSpec1D::manufactured("layered", eps, one(), one(), layered_solution(eps))?,
            notes: "u = sin^2(pi x) + eps phi(x) e^{-x/eps} + mirror, phi = (x/eps)^2 (1-x)^2, b = c = 1",
        },
        "varcoef" => {
            let b = Expr::poly(vec![1.0, 0.0, 0.5]);
            let c = Expr::constant(2.0).plus(Expr::cos(0.5, PI, -FRAC_PI_2));
            Catalog1DEntry {
                name: "varcoef",
                spec: ProblemSpec1D::manufactured("varcoef", eps, b, c, layered_solution(eps))?,
                notes: "u as in layered, b = 1 + x^2/2, c = 2 + sin(pi x)/2",
            }
        }
        _ => return Err(Error::UnknownProblem(name.to_string())),
    };
    Ok(entry)
}
