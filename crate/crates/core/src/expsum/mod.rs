//! The double exponential sum over an annulus of a form `Q*` and its
//! transformation chain: Weyl differencing, the B-process, rearrangement of
//! the dual sum and the δ-splitting used before van der Corput's bound.
//!
//! Notation. `L = b*x + 2c*y`, `P = √t/√(2πhkΔ₀)`, `ν = n − 4mc*r` and
//! `F_x(y) = L·(r + P·Q*(x,y)^{−1/2})`. Because `4c*Q* = L² + |d|x²`, every
//! quantity along a vertical line depends on `y` only through `L`.

mod bounds;
mod lemmas;
mod stationary;
mod sum;

pub use bounds::*;
pub use lemmas::*;
pub use stationary::*;
pub use sum::*;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qform::QuadraticForm;

/// Comparability constants of the scenario conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparability {
    /// `K/T ≤ c₁·|1/√Δ − h/k|`
    pub c1: f64,
    /// `c₂·√(T/K) ≤ h, k`
    pub c2: f64,
    /// `h, k ≤ c₃·√(T/K)`
    pub c3: f64,
    /// `c₄·T ≤ t`
    pub c4: f64,
    /// `t ≤ c₅·T`
    pub c5: f64,
    /// `N ≤ c₆·K`
    pub c6: f64,
}

impl Default for Comparability {
    fn default() -> Self {
        Comparability {
            c1: 8.0,
            c2: 1.0 / 8.0,
            c3: 8.0,
            c4: 1.0 / 8.0,
            c5: 8.0,
            c6: 8.0,
        }
    }
}

/// Parameters of one exponential-sum instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpSumScenario {
    pub qstar: QuadraticForm,
    pub delta0: u64,
    pub h: u64,
    pub k: u64,
    pub t: f64,
    #[serde(rename = "T")]
    pub big_t: f64,
    #[serde(rename = "K")]
    pub big_k: f64,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "Nprime")]
    pub n_prime: f64,
    /// Derived from `(h, k, Δ₀)`; filled in when absent from a file.
    #[serde(default = "f64_nan")]
    pub r: f64,
    #[serde(rename = "Delta")]
    pub delta: u64,
    #[serde(default)]
    pub constants: Comparability,
}

fn f64_nan() -> f64 {
    f64::NAN
}

fn invalid<T>(invariant: &str, detail: impl Into<String>) -> Result<T> {
    Err(Error::InvalidScenario {
        invariant: invariant.into(),
        detail: detail.into(),
    })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `k`, if it exists, in `[0, k)`.
pub fn mod_inverse(a: u64, k: u64) -> Option<u64> {
    if k == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (k as i128, (a % k) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(k as i128) as u64)
}

/// `inv(hΔ₀ mod k)/k − 1/(2hkΔ₀)`.
pub fn r_value(h: u64, k: u64, delta0: u64) -> Result<f64> {
    let hd = h.checked_mul(delta0).ok_or_else(|| Error::Contract("h·Δ₀ overflows".into()))?;
    let Some(inv) = mod_inverse(hd, k) else {
        return invalid("coprimality", format!("gcd(hΔ₀, k) = gcd({hd}, {k}) ≠ 1"));
    };
    Ok(inv as f64 / k as f64 - 1.0 / (2.0 * h as f64 * k as f64 * delta0 as f64))
}

impl ExpSumScenario {
    /// Fills in `r` and checks every scenario condition.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        qstar: QuadraticForm,
        delta0: u64,
        h: u64,
        k: u64,
        t: f64,
        big_t: f64,
        big_k: f64,
        n: f64,
        n_prime: f64,
        delta: u64,
        constants: Comparability,
    ) -> Result<Self> {
        let mut sc = ExpSumScenario {
            qstar,
            delta0,
            h,
            k,
            t,
            big_t,
            big_k,
            n,
            n_prime,
            r: f64::NAN,
            delta,
            constants,
        };
        sc.r = r_value(h, k, delta0)?;
        sc.validate()?;
        Ok(sc)
    }

    /// Scenario with `t = T`, `Δ₀ = 1` and the smallest admissible `k`
    /// (then `h`) found by direct search of the approximation window.
    pub fn desk(qstar: QuadraticForm, big_t: f64, big_k: f64, n: f64, n_prime: f64, delta: u64) -> Result<Self> {
        let constants = Comparability::default();
        let (h, k) = find_approximation(big_t, big_k, delta, 1, &constants)?;
        Self::new(qstar, 1, h, k, big_t, big_t, big_k, n, n_prime, delta, constants)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut sc: ExpSumScenario = serde_json::from_str(text).map_err(|e| Error::InvalidScenario {
            invariant: "format".into(),
            detail: e.to_string(),
        })?;
        if sc.r.is_nan() {
            sc.r = r_value(sc.h, sc.k, sc.delta0)?;
        }
        sc.validate()?;
        Ok(sc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.constants;
        if [c.c1, c.c2, c.c3, c.c4, c.c5, c.c6].iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return invalid("constants", "comparability constants must be positive");
        }
        if self.delta0 == 0 || self.h == 0 || self.k == 0 || self.delta == 0 {
            return invalid("positivity", "Δ₀, h, k and Δ must be positive integers");
        }
        if gcd(self.h * self.delta0, self.k) != 1 {
            return invalid(
                "coprimality",
                format!("gcd(hΔ₀, k) = gcd({}, {}) ≠ 1", self.h * self.delta0, self.k),
            );
        }
        if self.delta % self.delta0 != 0 {
            return invalid("delta0_divides_delta", format!("Δ₀ = {} does not divide Δ = {}", self.delta0, self.delta));
        }
        if self.qstar.delta() as u64 > self.delta {
            return invalid(
                "discriminant_bound",
                format!("|d| = {} exceeds Δ = {}", self.qstar.delta(), self.delta),
            );
        }
        let (big_t, big_k) = (self.big_t, self.big_k);
        if !(big_t > 0.0 && big_k > 0.0 && big_t.is_finite() && big_k.is_finite()) {
            return invalid("positivity", "T and K must be positive");
        }
        let gap = ((1.0 / (self.delta as f64).sqrt()) - self.h as f64 / self.k as f64).abs();
        if big_k / big_t > c.c1 * gap {
            return invalid(
                "approximation_window_lower",
                format!("K/T = {} > c₁·|1/√Δ − h/k| = {}", big_k / big_t, c.c1 * gap),
            );
        }
        if gap > PI * big_k / (big_t * self.delta as f64) {
            return invalid(
                "approximation_window_upper",
                format!("|1/√Δ − h/k| = {gap} > πK/(TΔ) = {}", PI * big_k / (big_t * self.delta as f64)),
            );
        }
        let scale = (big_t / big_k).sqrt();
        for (name, v) in [("h", self.h), ("k", self.k)] {
            let v = v as f64;
            if v < c.c2 * scale || v > c.c3 * scale {
                return invalid(
                    "hk_size",
                    format!("{name} = {v} outside [c₂, c₃]·√(T/K) = [{}, {}]", c.c2 * scale, c.c3 * scale),
                );
            }
        }
        if !(self.t >= c.c4 * big_t && self.t <= c.c5 * big_t) {
            return invalid("t_size", format!("t = {} outside [c₄T, c₅T]", self.t));
        }
        if !(self.n >= 1.0 && self.n <= self.n_prime && self.n_prime <= 2.0 * self.n) {
            return invalid("n_range", format!("need 1 ≤ N ≤ N' ≤ 2N, got N = {}, N' = {}", self.n, self.n_prime));
        }
        if self.n > c.c6 * big_k {
            return invalid("n_vs_k", format!("N = {} > c₆·K = {}", self.n, c.c6 * big_k));
        }
        let r = r_value(self.h, self.k, self.delta0)?;
        if !((self.r - r).abs() <= 1e-12 * r.abs().max(1.0)) {
            return invalid("r_definition", format!("r = {} but inv(hΔ₀)/k − 1/(2hkΔ₀) = {r}", self.r));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Geometry {
        Geometry::new(self)
    }
}

/// Smallest `k` (then smallest `h`) with `(hΔ₀, k) = 1` inside the
/// approximation window and the size window of the scenario conditions.
pub fn find_approximation(big_t: f64, big_k: f64, delta: u64, delta0: u64, c: &Comparability) -> Result<(u64, u64)> {
    let target = 1.0 / (delta as f64).sqrt();
    let scale = (big_t / big_k).sqrt();
    let lo = big_k / (c.c1 * big_t);
    let hi = PI * big_k / (big_t * delta as f64);
    let k_min = (c.c2 * scale).ceil().max(1.0) as u64;
    let k_max = (c.c3 * scale).floor() as u64;
    for k in k_min..=k_max {
        let centre = (target * k as f64).round() as i64;
        for h in (centre - 2).max(1)..=centre + 2 {
            let h = h as u64;
            let gap = (target - h as f64 / k as f64).abs();
            let size_ok = (h as f64) >= c.c2 * scale && (h as f64) <= c.c3 * scale;
            if size_ok && gap >= lo && gap <= hi && gcd(h * delta0, k) == 1 {
                return Ok((h, k));
            }
        }
    }
    invalid(
        "approximation_window",
        format!("no h/k with k ≤ {k_max} satisfies K/(c₁T) ≤ |1/√Δ − h/k| ≤ πK/(TΔ)"),
    )
}

/// Closed forms attached to a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `|d| = 4a*c* − b*²`
    pub d_abs: f64,
    pub r: f64,
    /// `√t/√(2πhkΔ₀)`
    pub p: f64,
    /// `π/(2hkΔ₀t)`, the scale inside `φ`
    pub alpha: f64,
    pub t: f64,
    pub n: f64,
    pub n_prime: f64,
}

impl Geometry {
    pub fn new(sc: &ExpSumScenario) -> Self {
        let hk = sc.h as f64 * sc.k as f64 * sc.delta0 as f64;
        Geometry {
            a: sc.qstar.a() as f64,
            b: sc.qstar.b() as f64,
            c: sc.qstar.c() as f64,
            d_abs: sc.qstar.delta() as f64,
            r: sc.r,
            p: (sc.t / (2.0 * PI * hk)).sqrt(),
            alpha: PI / (2.0 * hk * sc.t),
            t: sc.t,
            n: sc.n,
            n_prime: sc.n_prime,
        }
    }

    pub fn q(&self, x: f64, y: f64) -> f64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    pub fn l(&self, x: f64, y: f64) -> f64 {
        self.b * x + 2.0 * self.c * y
    }

    /// `Q` on the vertical line through `x` at linear coordinate `L`.
    pub fn q_of_l(&self, x: f64, l: f64) -> f64 {
        (l * l + self.d_abs * x * x) / (4.0 * self.c)
    }

    pub fn y_of_l(&self, x: f64, l: f64) -> f64 {
        (l - self.b * x) / (2.0 * self.c)
    }

    /// Right end of `J = [0, 2√(c*N'/|d|)]`.
    pub fn x_max(&self) -> f64 {
        2.0 * (self.c * self.n_prime / self.d_abs).sqrt()
    }

    /// Range of `L ≥ 0` with `N ≤ Q ≤ N'` on the line through `x`.
    pub fn l_range(&self, x: f64) -> Option<(f64, f64)> {
        let dx = self.d_abs * x * x;
        let hi2 = 4.0 * self.c * self.n_prime - dx;
        if hi2 < 0.0 {
            return None;
        }
        let lo2 = (4.0 * self.c * self.n - dx).max(0.0);
        Some((lo2.sqrt(), hi2.sqrt()))
    }

    /// `F_x(y)`
    pub fn f_big(&self, x: f64, y: f64) -> f64 {
        self.l(x, y) * (self.r + self.p / self.q(x, y).sqrt())
    }

    /// `F′_x(y)`
    pub fn f_big_1(&self, x: f64, y: f64) -> f64 {
        2.0 * self.c * self.r + self.p * self.d_abs * x * x / (2.0 * self.q(x, y).powf(1.5))
    }

    /// `F″_x(y)`
    pub fn f_big_2(&self, x: f64, y: f64) -> f64 {
        let q = self.q(x, y);
        -3.0 * self.p * self.d_abs * x * x * self.l(x, y) / (4.0 * q.powf(2.5))
    }

    /// `F‴_x(y)`
    pub fn f_big_3(&self, x: f64, y: f64) -> f64 {
        let q = self.q(x, y);
        let l = self.l(x, y);
        -0.75 * self.p * self.d_abs * x * x * q.powf(-3.5) * (2.0 * self.c * q - 2.5 * l * l)
    }

    /// `a(x)`
    pub fn a_x(&self, x: f64) -> f64 {
        2.0 * self.c * self.r + self.p * self.d_abs * x * x / (2.0 * self.n_prime.powf(1.5))
    }

    /// `b(x)`
    pub fn b_x(&self, x: f64) -> f64 {
        let q = self.n.max(self.d_abs * x * x / (4.0 * self.c));
        2.0 * self.c * self.r + self.p * self.d_abs * x * x / (2.0 * q.powf(1.5))
    }

    /// `b(x)` in the printed `min{…}` form.
    pub fn b_x_min_form(&self, x: f64) -> f64 {
        let first = self.p * self.d_abs * x * x / (2.0 * self.n.powf(1.5));
        let second = (4.0 * self.c).powf(1.5) * self.p / (2.0 * self.d_abs.sqrt() * x);
        2.0 * self.c * self.r + first.min(second)
    }

    /// `ν = n − 4mc*r`
    pub fn nu(&self, m: u64, n: i64) -> f64 {
        n as f64 - 4.0 * m as f64 * self.c * self.r
    }

    /// `Λ_m = 4c*(mP)^{2/3} = 4c*·m^{2/3}t^{1/3}/(2πhkΔ₀)^{1/3}`
    pub fn lambda_m(&self, m: u64) -> f64 {
        4.0 * self.c * (m as f64 * self.p).powf(2.0 / 3.0)
    }

    /// `X_c = (4c*)^{3/2}mP/(√|d|·ν)`, where the bracket of `G` vanishes.
    pub fn x_critical(&self, m: u64, n: i64) -> f64 {
        (4.0 * self.c).powf(1.5) * m as f64 * self.p / (self.d_abs.sqrt() * self.nu(m, n))
    }

    /// The bracket `Λ_m − ν^{2/3}|d|^{1/3}x^{2/3}` of the closed form of `G`.
    pub fn g_bracket(&self, m: u64, n: i64, x: f64) -> f64 {
        self.lambda_m(m) - self.nu(m, n).powf(2.0 / 3.0) * self.d_abs.cbrt() * x.powf(2.0 / 3.0)
    }

    /// Phase of the summand, `f_x(y) = Q·r + (t/π)·φ(πQ/(2hkΔ₀t))`.
    pub fn f_small(&self, x: f64, y: f64) -> f64 {
        let q = self.q(x, y);
        q * self.r + self.t / PI * crate::special::phi(self.alpha * q).unwrap_or(f64::NAN)
    }
}
