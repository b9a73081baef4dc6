//! Independent oracle for the form x² + y²: ζ_Q(s) = 4ζ(s)L(s, χ₋₄).
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use zeta_gaps::special::log_gamma;

/// B₂, B₄, …, B₂₀.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Hurwitz ζ(s, a) by Euler–Maclaurin with the cut at `N ≈ 30 + |t|`.
pub fn hurwitz(s: Complex64, a: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let n = 30 + s.im.abs().ceil() as usize;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..n {
        sum += (-s * (k as f64 + a).ln()).exp();
    }
    let x = n as f64 + a;
    let xs = (-s * x.ln()).exp();
    sum += xs * x / (s - one) + xs * 0.5;
    // rising factorial s(s+1)…(s+2k−2) and (2k)!
    let mut rising = s;
    let mut fact = 2.0;
    let mut xpow = xs / x;
    for (k, b) in BERNOULLI.iter().enumerate() {
        sum += rising * xpow * (b / fact);
        let j = 2.0 * k as f64 + 1.0;
        rising *= (s + j) * (s + j + 1.0);
        fact *= (j + 2.0) * (j + 3.0);
        xpow /= x * x;
    }
    sum
}

pub fn riemann_zeta(s: Complex64) -> Complex64 {
    hurwitz(s, 1.0)
}

/// `L(s, χ₋₄) = 4^{−s}(ζ(s, 1/4) − ζ(s, 3/4))`
pub fn dirichlet_l4(s: Complex64) -> Complex64 {
    (-s * 4f64.ln()).exp() * (hurwitz(s, 0.25) - hurwitz(s, 0.75))
}

pub fn gaussian_form_zeta(s: Complex64) -> Complex64 {
    riemann_zeta(s) * dirichlet_l4(s) * 4.0
}

/// Hardy's `Z(t)` for ζ.
pub fn z_zeta(t: f64) -> f64 {
    let theta = log_gamma(Complex64::new(0.25, t / 2.0)).unwrap().im - t / 2.0 * PI.ln();
    (Complex64::from_polar(1.0, theta) * riemann_zeta(Complex64::new(0.5, t))).re
}

/// The analogue of `Z(t)` for `L(s, χ₋₄)`.
pub fn z_l4(t: f64) -> f64 {
    let theta = log_gamma(Complex64::new(0.75, t / 2.0)).unwrap().im + t / 2.0 * (4.0 / PI).ln();
    (Complex64::from_polar(1.0, theta) * dirichlet_l4(Complex64::new(0.5, t))).re
}

/// Sign changes of `f` on a grid, bisected to width `tol`.
pub fn sign_change_zeros(f: impl Fn(f64) -> f64, from: f64, to: f64, step: f64, tol: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut a = from;
    let mut fa = f(a);
    while a < to {
        let b = (a + step).min(to);
        let fb = f(b);
        if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm * flo > 0.0 {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    out
}

/// Zeros of `4ζL` on the critical line in `[from, to]`.
pub fn factor_zeros(from: f64, to: f64) -> Vec<f64> {
    let mut z = sign_change_zeros(z_zeta, from, to, 0.01, 1e-10);
    z.extend(sign_change_zeros(z_l4, from, to, 0.01, 1e-10));
    z.sort_by(f64::total_cmp);
    z
}
