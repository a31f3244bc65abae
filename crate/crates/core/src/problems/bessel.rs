//! Exponentially scaled modified Bessel functions `e^{−x} I_ν(x)`,
//! `ν ∈ {0, 1}`, for `x ≥ 0`.
//!
//! The power series is used below [`SERIES_LIMIT`] and the large-argument
//! asymptotic expansion above it. At the switch point the smallest term of
//! the asymptotic series is about `e^{−2x}`, well below double precision.

/// Largest argument evaluated with the power series.
pub const SERIES_LIMIT: f64 = 20.0;
const MAX_ASYMPTOTIC_TERMS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselOrder {
    Zero,
    One,
}

impl BesselOrder {
    fn nu(self) -> u32 {
        match self {
            BesselOrder::Zero => 0,
            BesselOrder::One => 1,
        }
    }
}

/// `e^{−x} I_ν(x)` by the ascending series.
pub fn scaled_series(order: BesselOrder, x: f64) -> f64 {
    let nu = order.nu();
    let q = 0.25 * x * x;
    let mut term = if nu == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + nu as f64));
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
        k += 1.0;
    }
    sum * (-x).exp()
}

/// `e^{−x} I_ν(x)` by the asymptotic expansion, truncated at its smallest
/// term.
pub fn scaled_asymptotic(order: BesselOrder, x: f64) -> f64 {
    let mu = 4.0 * (order.nu() as f64).powi(2);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..MAX_ASYMPTOTIC_TERMS {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}

/// `e^{−x} I_ν(x)`.
pub fn scaled_bessel(order: BesselOrder, x: f64) -> f64 {
    assert!(
        x >= 0.0,
        "scaled Bessel functions are evaluated for x >= 0 only"
    );
    if x <= SERIES_LIMIT {
        scaled_series(order, x)
    } else {
        scaled_asymptotic(order, x)
    }
}

pub fn scaled_i0(x: f64) -> f64 {
    scaled_bessel(BesselOrder::Zero, x)
}

pub fn scaled_i1(x: f64) -> f64 {
    scaled_bessel(BesselOrder::One, x)
}

/// `I_ν(k r) / I_0(k)` for `0 ≤ r ≤ 1`, computed without overflow.
pub fn ratio_to_i0(order: BesselOrder, k: f64, r: f64) -> f64 {
    let num = scaled_bessel(order, k * r);
    let den = scaled_i0(k);
    (k * (r - 1.0)).exp() * num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // (1/π)∫_0^π e^{x(cos θ − 1)} cos(νθ) dθ, trapezoid rule (spectrally
    // accurate for periodic integrands)
    fn integral_oracle(nu: u32, x: f64) -> f64 {
        let n = 4000;
        let h = PI / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let t = i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            s += w * (x * (t.cos() - 1.0)).exp() * (nu as f64 * t).cos();
        }
        s * h / PI
    }

    #[test]
    fn matches_integral_representation() {
        for &x in &[
            0.0, 0.3, 1.0, 5.0, 8.0, 9.5, 10.0, 11.0, 12.0, 19.0, 25.0, 60.0,
        ] {
            for (nu, ord) in [(0, BesselOrder::Zero), (1, BesselOrder::One)] {
                let a = scaled_bessel(ord, x);
                let b = integral_oracle(nu, x);
                assert!(
                    (a - b).abs() <= 1e-12 * b.abs() + 1e-16,
                    "nu={nu} x={x} {a} {b}"
                );
            }
        }
    }

    #[test]
    fn branches_agree_on_overlap() {
        for i in 0..=20 {
            let x = 20.0 + i as f64 * 0.5;
            for ord in [BesselOrder::Zero, BesselOrder::One] {
                let s = scaled_series(ord, x);
                let a = scaled_asymptotic(ord, x);
                assert!((s - a).abs() <= 1e-13 * s, "x={x}");
            }
        }
    }

    #[test]
    fn range_and_monotonicity() {
        assert!((scaled_i0(0.0) - 1.0).abs() < 1e-16);
        let mut prev = scaled_i0(1.0);
        for i in 2..2000 {
            let v = scaled_i0(i as f64 * 0.7);
            assert!(v > 0.0 && v <= 1.0 && v < prev);
            prev = v;
        }
        assert!(scaled_i0(1e12) > 0.0);
    }

    #[test]
    fn ratio_handles_huge_arguments() {
        let r = ratio_to_i0(BesselOrder::Zero, 1e6, 1.0 - 1e-5);
        assert!((r - (-10.0f64).exp()).abs() < 0.01 * r);
        assert_eq!(ratio_to_i0(BesselOrder::Zero, 1e6, 0.0), 0.0);
    }
}
