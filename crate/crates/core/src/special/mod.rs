//! Complex log-gamma, the phase function `φ`, and careful unit-circle phases.

mod dd;

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use dd::DoubleDouble;

pub type ComplexValue = Complex64;

/// `B_{2k} / (2k(2k−1))` for k = 1..=12.
const STIRLING: [f64; 12] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
    77683.0 / 5796.0,
    -236364091.0 / 1506960.0,
];

/// Real part below which the argument is shifted up before the asymptotic series.
const SHIFT_THRESHOLD: f64 = 12.0;

const HALF_LN_TAU: f64 = 0.918_938_533_204_672_8;

/// Principal branch of `log Γ(s)`, continuous off the negative real axis.
pub fn log_gamma(s: ComplexValue) -> Result<ComplexValue> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return domain(format!("log_gamma of non-finite argument {s}"));
    }
    if s.im == 0.0 && s.re <= 0.0 && s.re == s.re.floor() {
        return Err(Error::PoleAt { re: s.re, im: 0.0 });
    }
    let mut z = s;
    let mut shift = Complex64::new(0.0, 0.0);
    if z.re < SHIFT_THRESHOLD && z.im.abs() < 4.0 * SHIFT_THRESHOLD {
        // log Γ(s) = log Γ(s + k) − Σ_{j<k} log(s + j)
        let k = (SHIFT_THRESHOLD - z.re).ceil() as usize;
        for _ in 0..k {
            shift += z.ln();
            z += 1.0;
        }
    }
    let out = stirling_series(z) - shift;
    if out.re.is_finite() && out.im.is_finite() {
        Ok(out)
    } else {
        Err(Error::PrecisionExceeded(format!("log_gamma overflow at {s}")))
    }
}

fn stirling_series(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        acc += pow * c;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_TAU + acc
}

pub fn gamma(s: ComplexValue) -> Result<ComplexValue> {
    log_gamma(s).map(|l| l.exp())
}

/// `φ(u) = arsinh(√u) + √(u + u²)`.
pub fn phi(u: f64) -> Result<f64> {
    if !(u >= 0.0) || !u.is_finite() {
        return domain(format!("phi requires finite u ≥ 0, got {u}"));
    }
    if u < 1e-4 {
        // φ(u) = √u Σ binom(1/2, k) u^k 2/(2k+1); truncation error < u^5.5/100
        const C: [f64; 5] = [2.0, 1.0 / 3.0, -1.0 / 20.0, 1.0 / 56.0, -5.0 / 576.0];
        let poly = C.iter().rev().fold(0.0, |acc, &c| acc * u + c);
        return Ok(u.sqrt() * poly);
    }
    let r = u.sqrt();
    Ok(r.asinh() + r * (1.0 + u).sqrt())
}

/// Derivatives of `φ` of order 1 to 3.
pub fn phi_derivatives(u: f64, order: u32) -> Result<f64> {
    if !(u > 0.0) || !u.is_finite() {
        return domain(format!("phi derivatives require u > 0, got {u}"));
    }
    let su = u.sqrt();
    let s1 = (1.0 + u).sqrt();
    match order {
        1 => Ok(s1 / su),
        2 => Ok(-0.5 / (u * su * s1)),
        3 => Ok(0.75 / (u * u * su * s1) + 0.25 / (u * su * s1 * (1.0 + u))),
        _ => domain(format!("phi derivative order must be 1..=3, got {order}")),
    }
}

/// `e(x) = exp(2πix)` with the argument reduced modulo 1 first.
///
/// Reduction goes to the nearest quarter turn so that `e(k/4)` is exact.
pub fn e_unit(x: f64) -> ComplexValue {
    let frac = x - x.round();
    let q = (4.0 * frac).round();
    let r = frac - 0.25 * q;
    let (s, c) = (TAU * r).sin_cos();
    match (q as i64).rem_euclid(4) {
        0 => Complex64::new(c, s),
        1 => Complex64::new(-s, c),
        2 => Complex64::new(-c, -s),
        _ => Complex64::new(s, -c),
    }
}

/// A phase reduced into `[0, 2π)` with a bound on the reduction error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseReduced {
    pub theta: f64,
    pub guard: f64,
}

impl PhaseReduced {
    /// `exp(−iθ)`, i.e. `n^{−it}` when produced by [`power_phase`].
    pub fn unit_conj(&self) -> ComplexValue {
        let (s, c) = self.theta.sin_cos();
        Complex64::new(c, -s)
    }
}

/// Largest `n` accepted by [`power_phase`] (exactly representable).
pub const POWER_PHASE_MAX_N: u64 = 1 << 53;

/// `t·ln n mod 2π` using a double-double logarithm and a double-double 2π.
pub fn power_phase(n: u64, t: f64) -> Result<PhaseReduced> {
    if n == 0 {
        return domain("power_phase requires n ≥ 1");
    }
    if !t.is_finite() {
        return domain(format!("power_phase requires finite t, got {t}"));
    }
    if n >= POWER_PHASE_MAX_N {
        return Err(Error::PrecisionExceeded(format!("n = {n} not exactly representable")));
    }
    if n == 1 || t == 0.0 {
        return Ok(PhaseReduced {
            theta: 0.0,
            guard: 0.0,
        });
    }
    let ln = DoubleDouble::ln_u64(n);
    let p = ln.mul_f64(t);
    let k = (p.hi / TAU).round();
    // each double-double product carries ~2^-104 relative error
    let guard = 8.0 * 2f64.powi(-104) * (p.hi.abs() + (k * TAU).abs()) + 2f64.powi(-52) * TAU;
    if guard > 1e-10 || k.abs() > 2f64.powi(52) {
        return Err(Error::PrecisionExceeded(format!(
            "phase t·ln n = {:e} too large for guaranteed reduction",
            p.hi
        )));
    }
    let r = p - dd::TAU.mul_f64(k);
    let mut theta = r.to_f64();
    if theta < 0.0 {
        theta = (r + dd::TAU).to_f64();
    }
    if theta >= TAU {
        theta = (r - dd::TAU).to_f64().max(0.0);
    }
    Ok(PhaseReduced { theta, guard })
}

/// `n^{−s}` with the oscillating factor taken from [`power_phase`].
pub fn n_pow_minus_s(n: u64, s: ComplexValue) -> Result<ComplexValue> {
    let mag = (n as f64).powf(-s.re);
    Ok(power_phase(n, s.im)?.unit_conj() * mag)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn log_gamma_trivial_points() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-14);
        assert!((log_gamma(c(5.0, 0.0)).unwrap() - c(24f64.ln(), 0.0)).norm() < 1e-14);
        assert!((log_gamma(c(0.5, 0.0)).unwrap().re - 0.5 * PI.ln()).abs() < 1e-14);
        for p in [0.0, -1.0, -2.0, -17.0] {
            assert!(matches!(log_gamma(c(p, 0.0)), Err(Error::PoleAt { .. })));
        }
    }

    #[test]
    fn log_gamma_matches_high_precision_oracle() {
        // mpmath loggamma, 50 digits
        let cases = [
            ((0.5, 10.0), (-14.789024734744293451, 13.030020034911089851)),
            ((-1.5, 20.0), (-36.491569571567917972, 36.675281813553845811)),
            ((3.0, -40.0), (-52.689155060822636631, -111.4051324154599655)),
            ((0.25, 0.1), (1.2078374236857617951, -0.40303113537500863739)),
            ((-7.3, 0.5), (-8.8667804146081666581, -23.517213828496360696)),
            ((1e-3, 1e5), (-157084.45869076347739, 1051291.762668827433)),
            ((20.0, 300.0), (-359.08249635871111476, 1441.1321045871393655)),
        ];
        for ((sr, si), (er, ei)) in cases {
            let got = log_gamma(c(sr, si)).unwrap();
            let want = c(er, ei);
            assert!((got - want).norm() <= 1e-12 * want.norm().max(1.0), "{sr}+{si}i: {got} vs {want}");
        }
        let g = gamma(c(0.5, 10.0)).unwrap();
        assert!((g.norm() - 3.7775321128501089899e-7).abs() < 1e-18);
    }

    #[test]
    fn gamma_reflection_modulus() {
        for i in 0..100 {
            let t = 1.0 + 99.0 * i as f64 / 99.0;
            let lg = log_gamma(c(0.5, t)).unwrap();
            let v = (2.0 * lg.re).exp() * (PI * t).cosh() / PI;
            assert!((v - 1.0).abs() < 1e-9, "t={t} v={v}");
        }
    }

    #[test]
    fn stirling_modulus_law() {
        for (sigma, t) in [(0.5, 200.0), (0.5, 400.0), (2.0, 200.0), (-1.0, 400.0)] {
            let lg = log_gamma(c(sigma, t)).unwrap();
            let model = 0.5 * TAU.ln() + (sigma - 0.5) * f64::ln(t) - PI * t / 2.0;
            assert!(((lg.re - model).exp() - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(0.0).unwrap(), 0.0);
        assert!((phi(1.0).unwrap() - 2.295587149392638074).abs() < 1e-15);
        let r = phi(1e-8).unwrap() / 2e-4;
        assert!((r - 1.0).abs() < 1e-8);
        assert!(phi(-1e-3).is_err());
        // the two branches meet continuously
        let lo = phi(1e-4 * (1.0 - 1e-12)).unwrap();
        let hi = phi(1e-4).unwrap();
        assert!((hi - lo).abs() < 1e-14);
    }

    #[test]
    fn phi_derivative_examples() {
        let u = 1e-6;
        assert!((phi_derivatives(u, 1).unwrap() * u.sqrt() - 1.0).abs() < 1e-5);
        assert!(phi_derivatives(1.0, 0).is_err());
        assert!(phi_derivatives(1.0, 4).is_err());
        assert!(phi_derivatives(0.0, 1).is_err());
    }

    #[test]
    fn phi_derivatives_match_finite_differences() {
        for &u in &[1e-3, 0.3, 1.0, 7.5] {
            let h = 1e-4 * u;
            let fd1 = (phi(u + h).unwrap() - phi(u - h).unwrap()) / (2.0 * h);
            assert!((fd1 / phi_derivatives(u, 1).unwrap() - 1.0).abs() < 1e-7);
            for order in 2..=3 {
                let f = |v| phi_derivatives(v, order - 1).unwrap();
                let fd = (f(u + h) - f(u - h)) / (2.0 * h);
                let exact = phi_derivatives(u, order).unwrap();
                assert!((fd / exact - 1.0).abs() < 1e-6, "u={u} order={order}");
            }
            assert!(phi_derivatives(u, 2).unwrap() < 0.0);
        }
    }

    #[test]
    fn e_unit_exact_points() {
        assert_eq!(e_unit(0.0), c(1.0, 0.0));
        assert_eq!(e_unit(0.5), c(-1.0, 0.0));
        assert_eq!(e_unit(0.25), c(0.0, 1.0));
        assert_eq!(e_unit(-0.25), c(0.0, -1.0));
        for x in [0.1, 0.7, 3.3, -12.9, 1e6 + 0.125] {
            let v = e_unit(x);
            assert!((v.norm() - 1.0).abs() < 1e-15);
            let frac = x - x.floor();
            assert!((v - Complex64::from_polar(1.0, TAU * frac)).norm() < 1e-9);
        }
    }

    #[test]
    fn power_phase_examples() {
        let p = power_phase(1, 123.4).unwrap();
        assert_eq!(p.theta, 0.0);
        // mpmath: (1e5 · ln 1e6) mod 2π
        let p = power_phase(1_000_000, 1e5).unwrap();
        assert!((p.theta - 4.27045377993586446281858).abs() < 1e-10);
        assert!(p.guard <= 1e-10);
        // t = fl(2π/ln 2): exact phase is 4.79e-16
        let t = 2.0 * PI / 2f64.ln();
        assert_eq!(t, 9.064720283654388);
        let p = power_phase(2, t).unwrap();
        let wrapped = p.theta.min(TAU - p.theta);
        assert!(wrapped <= 1e-15, "theta = {}", p.theta);
        // extreme admissible pair, mpmath reference
        let p = power_phase(999_999_999_989, 99_999_999.5).unwrap();
        assert!((p.theta - 0.8084874710712962954371879).abs() < 1e-10);
        assert!(power_phase(0, 1.0).is_err());
    }

    #[test]
    fn power_phase_in_range_and_consistent() {
        for n in [2u64, 3, 17, 1000, 123_456_789] {
            for t in [0.5, 14.13, 1e3, 1e7, -250.0] {
                let p = power_phase(n, t).unwrap();
                assert!((0.0..TAU).contains(&p.theta));
                let direct = (t * (n as f64).ln()).rem_euclid(TAU);
                let diff = (p.theta - direct).abs();
                let diff = diff.min(TAU - diff);
                assert!(diff < 1e-15 * (t * (n as f64).ln()).abs() + 1e-12);
            }
        }
    }
}
