//! Standard normal density, distribution and quantile functions.
//!
//! The CDF uses the double-precision rational approximation of Hart (1968)
//! in the form popularised by West (2005), accurate to roughly 1e-14
//! absolute. The quantile starts from Acklam's rational approximation and
//! applies one Halley step against that CDF, which brings it to full
//! double precision over the open unit interval.

use std::f64::consts::PI;

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Standard normal density φ(x).
pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Upper tail probability 1 − Φ(x), computed without cancellation.
pub fn upper_tail(x: f64) -> f64 {
    if x < 0.0 {
        1.0 - lower_tail_abs(-x)
    } else {
        lower_tail_abs(x)
    }
}

/// Standard normal distribution function Φ(x).
pub fn cdf(x: f64) -> f64 {
    if x < 0.0 {
        lower_tail_abs(-x)
    } else {
        1.0 - lower_tail_abs(x)
    }
}

// Φ(−z) for z ≥ 0.
fn lower_tail_abs(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z > 37.0 {
        return 0.0;
    }
    let e = (-0.5 * z * z).exp();
    if z < 7.071_067_811_865_47 {
        let num = horner(
            z,
            &[
                0.035_262_496_599_891_1,
                0.700_383_064_443_688,
                6.373_962_203_531_65,
                33.912_866_078_383,
                112.079_291_497_871,
                221.213_596_169_931,
                220.206_867_912_376,
            ],
        );
        let den = horner(
            z,
            &[
                0.088_388_347_648_318_4,
                1.755_667_163_182_64,
                16.064_177_579_207,
                86.780_732_202_946_1,
                296.564_248_779_674,
                637.333_633_378_831,
                793.826_512_519_948,
                440.413_735_824_752,
            ],
        );
        e * num / den
    } else {
        let b = z + 1.0 / (z + 2.0 / (z + 3.0 / (z + 4.0 / (z + 0.65))));
        e / (b * SQRT_2PI)
    }
}

// Coefficients ordered from the highest power down.
fn horner(x: f64, coefficients: &[f64]) -> f64 {
    coefficients.iter().fold(0.0, |acc, &c| acc * x + c)
}

/// Standard normal quantile Φ⁻¹(p).
///
/// Returns ±∞ at p = 1 / p = 0 and NaN outside [0, 1].
pub fn quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }

    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    // Halley refinement. Work on whichever tail is smaller to keep relative accuracy.
    let err = if p > 0.5 {
        (1.0 - p) - upper_tail(x)
    } else {
        cdf(x) - p
    };
    let u = err * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: composite Simpson quadrature of the density over
    // the tail beyond |x|, which avoids cancellation far from the center.
    fn cdf_by_quadrature(x: f64) -> f64 {
        let n = 20_000;
        let a = x.abs();
        let b = a + 15.0;
        let h = (b - a) / n as f64;
        let mut sum = pdf(a) + pdf(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * pdf(a + i as f64 * h);
        }
        let tail = sum * h / 3.0;
        if x >= 0.0 {
            1.0 - tail
        } else {
            tail
        }
    }

    fn quantile_by_bisection(p: f64) -> f64 {
        let (mut lo, mut hi) = (-10.0, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cdf_by_quadrature(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn cdf_matches_quadrature() {
        let mut x = -6.0;
        while x <= 6.0 {
            let diff = (cdf(x) - cdf_by_quadrature(x)).abs();
            assert!(diff < 1e-10, "x={x} diff={diff}");
            x += 0.173;
        }
    }

    #[test]
    fn tails_are_complementary() {
        for &x in &[-8.0, -3.0, -0.5, 0.0, 0.7, 2.5, 9.0] {
            assert!((cdf(x) + upper_tail(x) - 1.0).abs() < 1e-15);
        }
        assert_eq!(cdf(0.0), 0.5);
        assert!(upper_tail(40.0) == 0.0);
    }

    #[test]
    fn quantile_matches_bisection() {
        for &(p, z) in &[(0.975, 1.959_96), (0.995, 2.575_83)] {
            let q = quantile(p);
            assert!((q - z).abs() < 1e-4);
            assert!((q - quantile_by_bisection(p)).abs() < 1e-8);
        }
        for &p in &[1e-10, 1e-4, 0.01, 0.2, 0.5, 0.77, 0.9999] {
            assert!(
                (quantile(p) - quantile_by_bisection(p)).abs() < 1e-7,
                "p={p}"
            );
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            assert!((cdf(quantile(p)) - p).abs() < 1e-14, "p={p}");
        }
        assert_eq!(quantile(0.0), f64::NEG_INFINITY);
        assert_eq!(quantile(1.0), f64::INFINITY);
        assert!(quantile(1.5).is_nan());
    }
}
