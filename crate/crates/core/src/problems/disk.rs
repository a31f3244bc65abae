//! Closed-form radial solutions on the unit disk.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem2d::problem::{
    Decomposition2D, ExactSolution2D, ProblemSpec2D, RadialField, SharedField,
};
use crate::problems::bessel::{ratio_to_i0, BesselOrder};

pub const CATALOG_2D: [&str; 2] = ["bessel", "bump"];

/// Radial solution of `ε²Δ²u − bΔu + cu = f0` with clamped boundary,
/// `u = f0/c + B·I0(k1 r)/I0(k1) + C·I0(k2 r)/I0(k2)` where
/// `k_i² = λ_i` are the roots of `ε²λ² − bλ + c = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselDisk {
    pub eps: f64,
    pub b: f64,
    pub c: f64,
    pub f0: f64,
    pub lambda: [f64; 2],
    pub k: [f64; 2],
    /// `[B, C]`
    pub amp: [f64; 2],
}

impl BesselDisk {
    pub fn new(eps: f64, b: f64, c: f64, f0: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: eps,
                reason: "must lie in (0, 1]",
            });
        }
        if !(b > 0.0 && c > 0.0) {
            return Err(Error::CoefficientNotPositive {
                name: if b > 0.0 { "c" } else { "b" },
                x: f64::NAN,
                value: if b > 0.0 { c } else { b },
            });
        }
        let e2 = eps * eps;
        let disc = b * b - 4.0 * e2 * c;
        if disc < 0.0 {
            return Err(Error::Unsupported(format!(
                "b^2 < 4 eps^2 c (b = {b}, c = {c}, eps = {eps}): the operator has complex roots"
            )));
        }
        let root = disc.sqrt();
        let l1 = (b + root) / (2.0 * e2);
        // product of the roots is c/eps^2; avoids cancellation
        let l2 = 2.0 * c / (b + root);
        let k = [l1.sqrt(), l2.sqrt()];
        let rho = |ki: f64| ratio_to_i0(BesselOrder::One, ki, 1.0);
        let (g1, g2) = (k[0] * rho(k[0]), k[1] * rho(k[1]));
        // B + C = -f0/c and B g1 + C g2 = 0
        let a = f0 / c;
        let bb = a * g2 / (g1 - g2);
        let cc = -a * g1 / (g1 - g2);
        Ok(Self {
            eps,
            b,
            c,
            f0,
            lambda: [l1, l2],
            k,
            amp: [bb, cc],
        })
    }

    fn r0(&self, i: usize, r: f64) -> f64 {
        ratio_to_i0(BesselOrder::Zero, self.k[i], r)
    }

    fn r1(&self, i: usize, r: f64) -> f64 {
        ratio_to_i0(BesselOrder::One, self.k[i], r)
    }

    /// `i`-th exponential mode of `u`: value and radial derivative.
    pub fn mode(&self, i: usize, r: f64) -> (f64, f64) {
        let a = self.amp[i];
        (a * self.r0(i, r), a * self.k[i] * self.r1(i, r))
    }

    /// `i`-th mode of `w = εΔu`: value and radial derivative.
    pub fn w_mode(&self, i: usize, r: f64) -> (f64, f64) {
        let (v, d) = self.mode(i, r);
        let s = self.eps * self.lambda[i];
        (s * v, s * d)
    }

    pub fn u(&self, r: f64) -> (f64, f64) {
        let (a, da) = self.mode(0, r);
        let (b, db) = self.mode(1, r);
        (self.f0 / self.c + a + b, da + db)
    }

    pub fn w(&self, r: f64) -> (f64, f64) {
        let (a, da) = self.w_mode(0, r);
        let (b, db) = self.w_mode(1, r);
        (a + b, da + db)
    }

    /// `Δ` of mode `i` from `I0'' = I0 − I1/x`, i.e. `u_rr + u_r/r`.
    fn mode_laplacian(&self, i: usize, r: f64) -> f64 {
        let k = self.k[i];
        let a = self.amp[i];
        let (r0, r1) = (self.r0(i, r), self.r1(i, r));
        if r == 0.0 {
            // u_rr = u_r / r = k² I0(0)/2 at the origin
            return a * k * k * r0;
        }
        let urr = a * k * k * (r0 - r1 / (k * r));
        let ur = a * k * r1;
        urr + ur / r
    }

    /// `(Δu, Δ²u)` at radius `r`, both through the Bessel identities.
    pub fn laplacians(&self, r: f64) -> (f64, f64) {
        let lap = self.mode_laplacian(0, r) + self.mode_laplacian(1, r);
        // the identity turns Δ(mode_i) into k_i²·mode_i, so Δ²u follows by
        // applying it once more to k_i²·mode_i
        let bilap = (0..2)
            .map(|i| self.lambda[i] * self.mode_laplacian(i, r))
            .sum();
        (lap, bilap)
    }

    /// `ε²Δ²u − bΔu + cu − f0` at radius `r`.
    pub fn pde_residual(&self, r: f64) -> f64 {
        let (lap, bilap) = self.laplacians(r);
        self.eps * self.eps * bilap - self.b * lap + self.c * self.u(r).0 - self.f0
    }

    pub fn into_problem(self) -> Result<ProblemSpec2D> {
        let me = Arc::new(self);
        let f0 = me.f0;
        let mut spec = ProblemSpec2D::new("bessel", me.eps, me.b, me.c, Arc::new(move |_| f0))?;
        let field = |g: Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>| -> SharedField {
            Arc::new(RadialField { profile: g })
        };
        let (m1, m2, m3, m4, m5, m6) = (
            me.clone(),
            me.clone(),
            me.clone(),
            me.clone(),
            me.clone(),
            me.clone(),
        );
        let fc = me.f0 / me.c;
        spec.exact = Some(ExactSolution2D {
            u: field(Arc::new(move |r| m1.u(r))),
            w: field(Arc::new(move |r| m2.w(r))),
            parts: Some(Decomposition2D {
                u_layer: field(Arc::new(move |r| m3.mode(0, r))),
                u_smooth: field(Arc::new(move |r| {
                    let (v, d) = m4.mode(1, r);
                    (fc + v, d)
                })),
                u_remainder: field(Arc::new(|_| (0.0, 0.0))),
                w_layer: field(Arc::new(move |r| m5.w_mode(0, r))),
                w_smooth: field(Arc::new(move |r| m6.w_mode(1, r))),
                w_remainder: field(Arc::new(|_| (0.0, 0.0))),
            }),
        });
        Ok(spec)
    }
}

/// Bessel exact problem on the unit disk.
pub fn bessel_exact_disk(eps: f64, b: f64, c: f64, f0: f64) -> Result<ProblemSpec2D> {
    BesselDisk::new(eps, b, c, f0)?.into_problem()
}

/// `u = (1 − r²)²`, with `f` from `Δu = 16r² − 8`, `Δ²u = 64`.
pub fn bump_disk(eps: f64, b: f64, c: f64) -> Result<ProblemSpec2D> {
    let f = Arc::new(move |p: [f64; 2]| {
        let r2 = p[0] * p[0] + p[1] * p[1];
        eps * eps * 64.0 - b * (16.0 * r2 - 8.0) + c * (1.0 - r2) * (1.0 - r2)
    });
    let mut spec = ProblemSpec2D::new("bump", eps, b, c, f)?;
    let u: SharedField = Arc::new(RadialField::new(|r| {
        let s = 1.0 - r * r;
        (s * s, -4.0 * r * s)
    }));
    let w: SharedField = Arc::new(RadialField::new(move |r| {
        (eps * (16.0 * r * r - 8.0), eps * 32.0 * r)
    }));
    spec.exact = Some(ExactSolution2D { u, w, parts: None });
    Ok(spec)
}

/// Looks up a 2D catalog problem; `f0` is only used by `bessel`.
pub fn catalog_2d(name: &str, eps: f64, b: f64, c: f64, f0: f64) -> Result<ProblemSpec2D> {
    match name.to_ascii_lowercase().as_str() {
        "bessel" => bessel_exact_disk(eps, b, c, f0),
        "bump" => bump_disk(eps, b, c),
        _ => Err(Error::UnknownProblem(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_conditions() {
        for &eps in &[1e-1, 1e-2, 1e-4, 1e-6] {
            let d = BesselDisk::new(eps, 1.0, 1.0, 1.0).unwrap();
            let (u, du) = d.u(1.0);
            assert!(u.abs() <= 1e-12, "eps={eps} u(1)={u}");
            let scale = d.amp[0].abs() * d.k[0] + d.amp[1].abs() * d.k[1];
            assert!(du.abs() <= 1e-10 * scale, "eps={eps} u'(1)={du}");
        }
    }

    #[test]
    fn pde_residual_small() {
        for &eps in &[1e-1, 1e-2, 1e-3] {
            let d = BesselDisk::new(eps, 1.0, 1.0, 1.0).unwrap();
            for &r in &[0.1, 0.5, 0.9] {
                assert!(d.pde_residual(r).abs() <= 1e-8, "eps={eps} r={r}");
            }
        }
    }

    #[test]
    fn w_is_eps_laplacian() {
        let d = BesselDisk::new(1e-2, 1.0, 2.0, 1.5).unwrap();
        for i in 1..20 {
            let r = i as f64 / 20.0;
            let (lap, _) = d.laplacians(r);
            let w = d.w(r).0;
            assert!((w - d.eps * lap).abs() <= 1e-9 * w.abs().max(1e-3));
        }
    }

    #[test]
    fn layer_decay() {
        for &eps in &[1e-3, 1e-4, 1e-5] {
            let d = BesselDisk::new(eps, 1.0, 1.0, 1.0).unwrap();
            let ratio = d.mode(0, 1.0 - 10.0 * eps).0 / d.mode(0, 1.0).0;
            let expect = (-10.0f64).exp();
            assert!(
                (ratio / expect - 1.0).abs() < 0.2,
                "eps={eps} ratio={ratio}"
            );
        }
    }

    #[test]
    fn rejects_complex_roots() {
        assert!(BesselDisk::new(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(matches!(
            catalog_2d("x", 0.1, 1.0, 1.0, 1.0),
            Err(Error::UnknownProblem(_))
        ));
    }
}
