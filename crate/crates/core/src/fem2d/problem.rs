use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::meshing::mesh2d::Point;

/// A scalar field on the plane with its gradient.
pub trait Field2D: Send + Sync {
    fn value(&self, p: Point) -> f64;
    fn grad(&self, p: Point) -> [f64; 2];
}

/// Radially symmetric field given by `r ↦ (g(r), g'(r))`.
#[derive(Clone)]
pub struct RadialField {
    pub profile: Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>,
}

impl RadialField {
    pub fn new(profile: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static) -> Self {
        Self {
            profile: Arc::new(profile),
        }
    }
}

impl Field2D for RadialField {
    fn value(&self, p: Point) -> f64 {
        (self.profile)(p[0].hypot(p[1])).0
    }

    fn grad(&self, p: Point) -> [f64; 2] {
        let r = p[0].hypot(p[1]);
        if r == 0.0 {
            return [0.0, 0.0];
        }
        let d = (self.profile)(r).1;
        [d * p[0] / r, d * p[1] / r]
    }
}

pub struct ZeroField;

impl Field2D for ZeroField {
    fn value(&self, _p: Point) -> f64 {
        0.0
    }

    fn grad(&self, _p: Point) -> [f64; 2] {
        [0.0, 0.0]
    }
}

/// `a - b`, pointwise.
pub struct Difference2D<A, B>(pub A, pub B);

impl<A: Field2D, B: Field2D> Field2D for Difference2D<A, B> {
    fn value(&self, p: Point) -> f64 {
        self.0.value(p) - self.1.value(p)
    }

    fn grad(&self, p: Point) -> [f64; 2] {
        let (a, b) = (self.0.grad(p), self.1.grad(p));
        [a[0] - b[0], a[1] - b[1]]
    }
}

impl<T: Field2D + ?Sized> Field2D for &T {
    fn value(&self, p: Point) -> f64 {
        (**self).value(p)
    }

    fn grad(&self, p: Point) -> [f64; 2] {
        (**self).grad(p)
    }
}

impl<T: Field2D + ?Sized> Field2D for Arc<T> {
    fn value(&self, p: Point) -> f64 {
        (**self).value(p)
    }

    fn grad(&self, p: Point) -> [f64; 2] {
        (**self).grad(p)
    }
}

pub type SharedField = Arc<dyn Field2D>;

/// `u = u^S + u^BL + u^R` and the matching split of `w = εΔu`.
#[derive(Clone)]
pub struct Decomposition2D {
    pub u_smooth: SharedField,
    pub u_layer: SharedField,
    pub u_remainder: SharedField,
    pub w_smooth: SharedField,
    pub w_layer: SharedField,
    pub w_remainder: SharedField,
}

#[derive(Clone)]
pub struct ExactSolution2D {
    pub u: SharedField,
    /// `w = εΔu`
    pub w: SharedField,
    pub parts: Option<Decomposition2D>,
}

pub type ScalarFn2D = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

/// `ε²Δ²u − bΔu + cu = f` on the unit disk, `u = ∂_n u = 0` on the circle.
#[derive(Clone)]
pub struct ProblemSpec2D {
    pub name: String,
    pub eps: f64,
    pub b: f64,
    pub c: f64,
    pub f: ScalarFn2D,
    pub exact: Option<ExactSolution2D>,
}

impl fmt::Debug for ProblemSpec2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec2D")
            .field("name", &self.name)
            .field("eps", &self.eps)
            .field("b", &self.b)
            .field("c", &self.c)
            .field("has_exact", &self.exact.is_some())
            .finish_non_exhaustive()
    }
}

impl ProblemSpec2D {
    pub fn new(name: &str, eps: f64, b: f64, c: f64, f: ScalarFn2D) -> Result<Self> {
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

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: self.eps,
                reason: "must lie in (0, 1]",
            });
        }
        for (name, v) in [("b", self.b), ("c", self.c)] {
            if !(v > 0.0) {
                return Err(Error::CoefficientNotPositive {
                    name,
                    x: f64::NAN,
                    value: v,
                });
            }
        }
        Ok(())
    }

    pub fn decomposition(&self) -> Result<&Decomposition2D> {
        self.exact
            .as_ref()
            .and_then(|e| e.parts.as_ref())
            .ok_or(Error::MissingDecomposition)
    }
}
