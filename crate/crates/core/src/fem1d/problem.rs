use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::problems::Expr;

/// Anything that can be differentiated pointwise on `[0, 1]`.
pub trait Field1D: Send + Sync {
    fn derivative(&self, x: f64, k: usize) -> f64;

    fn value(&self, x: f64) -> f64 {
        self.derivative(x, 0)
    }
}

impl Field1D for Expr {
    fn derivative(&self, x: f64, k: usize) -> f64 {
        Expr::derivative(self, x, k)
    }
}

impl<T: Field1D + ?Sized> Field1D for &T {
    fn derivative(&self, x: f64, k: usize) -> f64 {
        (**self).derivative(x, k)
    }
}

/// `a - b`, pointwise.
pub struct Difference<A, B>(pub A, pub B);

impl<A: Field1D, B: Field1D> Field1D for Difference<A, B> {
    fn derivative(&self, x: f64, k: usize) -> f64 {
        self.0.derivative(x, k) - self.1.derivative(x, k)
    }
}

/// The zero function.
pub struct Zero;

impl Field1D for Zero {
    fn derivative(&self, _x: f64, _k: usize) -> f64 {
        0.0
    }
}

/// Derivatives of a plain function by central differences with a fixed
/// step. Loses roughly half the digits per derivative order.
pub struct FiniteDifference<F> {
    pub f: F,
    pub step: f64,
}

impl<F: Fn(f64) -> f64 + Send + Sync> Field1D for FiniteDifference<F> {
    fn derivative(&self, x: f64, k: usize) -> f64 {
        let h = self.step;
        let f = &self.f;
        match k {
            0 => f(x),
            // five point stencils
            1 => (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h),
            2 => {
                (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h))
                    / (12.0 * h * h)
            }
            _ => panic!("finite differences are only provided up to order 2"),
        }
    }
}

/// Split `u = u_S + ũ + ū + u_R` into smooth, left layer, right layer and
/// remainder parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition1D {
    pub smooth: Expr,
    pub left: Expr,
    pub right: Expr,
    pub remainder: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution1D {
    pub u: Expr,
    pub parts: Option<Decomposition1D>,
}

impl ExactSolution1D {
    /// Largest violation of the clamped boundary conditions.
    pub fn boundary_residual(&self) -> f64 {
        [(0.0, 0), (0.0, 1), (1.0, 0), (1.0, 1)]
            .iter()
            .map(|&(x, k)| self.u.derivative(x, k).abs())
            .fold(0.0, f64::max)
    }

    /// Largest mismatch between `u` and the sum of its parts on `n` samples.
    pub fn decomposition_residual(&self, n: usize) -> Option<f64> {
        let parts = self.parts.as_ref()?;
        let worst = (0..n)
            .map(|i| {
                let x = i as f64 / (n - 1) as f64;
                let sum = parts.smooth.eval(x)
                    + parts.left.eval(x)
                    + parts.right.eval(x)
                    + parts.remainder.eval(x);
                (sum - self.u.eval(x)).abs()
            })
            .fold(0.0, f64::max);
        Some(worst)
    }
}

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `ε² u'''' − (b u')' + c u = f` on `(0, 1)` with clamped ends.
#[derive(Clone)]
pub struct ProblemSpec1D {
    pub name: String,
    pub eps: f64,
    pub b: Expr,
    pub c: Expr,
    pub f: ScalarFn,
    pub exact: Option<ExactSolution1D>,
}

impl fmt::Debug for ProblemSpec1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec1D")
            .field("name", &self.name)
            .field("eps", &self.eps)
            .field("b", &self.b)
            .field("c", &self.c)
            .field("exact", &self.exact)
            .finish_non_exhaustive()
    }
}

const POSITIVITY_SAMPLES: usize = 1000;

impl ProblemSpec1D {
    pub fn new(name: &str, eps: f64, b: Expr, c: Expr, f: ScalarFn) -> Result<Self> {
        let spec = Self {
            name: name.to_string(),
            eps,
            b,
            c,
            f,
            exact: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds the problem whose forcing is generated from `u` by applying
    /// the differential operator analytically.
    pub fn manufactured(
        name: &str,
        eps: f64,
        b: Expr,
        c: Expr,
        exact: ExactSolution1D,
    ) -> Result<Self> {
        let (bb, cc, uu) = (b.clone(), c.clone(), exact.u.clone());
        let f: ScalarFn = Arc::new(move |x| {
            eps * eps * uu.derivative(x, 4)
                - bb.eval(x) * uu.derivative(x, 2)
                - bb.derivative(x, 1) * uu.derivative(x, 1)
                + cc.eval(x) * uu.eval(x)
        });
        let mut spec = Self::new(name, eps, b, c, f)?;
        spec.exact = Some(exact);
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: self.eps,
                reason: "must lie in (0, 1]",
            });
        }
        for i in 0..POSITIVITY_SAMPLES {
            let x = i as f64 / (POSITIVITY_SAMPLES - 1) as f64;
            for (name, coef) in [("b", &self.b), ("c", &self.c)] {
                let v = coef.eval(x);
                if !(v > 0.0) {
                    return Err(Error::CoefficientNotPositive { name, x, value: v });
                }
            }
        }
        Ok(())
    }

    pub fn exact(&self) -> Option<&ExactSolution1D> {
        self.exact.as_ref()
    }

    pub fn decomposition(&self) -> Result<&Decomposition1D> {
        self.exact
            .as_ref()
            .and_then(|e| e.parts.as_ref())
            .ok_or(Error::MissingDecomposition)
    }

    /// Pointwise residual `ε²u'''' − (bu')' + cu − f` of the exact solution.
    pub fn residual(&self, x: f64) -> Option<f64> {
        let u = &self.exact.as_ref()?.u;
        let lhs = self.eps * self.eps * u.derivative(x, 4)
            - self.b.eval(x) * u.derivative(x, 2)
            - self.b.derivative(x, 1) * u.derivative(x, 1)
            + self.c.eval(x) * u.eval(x);
        Some(lhs - (self.f)(x))
    }

    pub fn has_constant_coefficients(&self) -> bool {
        self.b.is_constant() && self.c.is_constant()
    }
}
