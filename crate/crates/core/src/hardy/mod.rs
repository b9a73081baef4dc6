//! The real function `W(t) = γ(1/2+it) ζ_Q(1/2+it)`, sign-change zero
//! detection, the Gaussian-weighted integral of `W` and zero-gap statistics.

mod quadrature;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::epstein::EpsteinZeta;
use crate::error::{domain, Error, Result};
use crate::qform::QuadraticForm;
use crate::special::{log_gamma, n_pow_minus_s, ComplexValue};
use quadrature::GaussLegendre;

/// Relative realness tolerance for `Im f(1/2+it)`.
pub const REALNESS_TOL: f64 = 1e-8;

/// Bracket width at which bisection stops.
pub const BISECTION_TOL: f64 = 1e-8;

pub const DEFAULT_EPS: f64 = 0.05;

/// `γ(s) = e^{½πi(½−s)} (√Δ/2π)^s Γ(s)`, computed from `log_gamma`.
pub fn gamma_factor(form: &QuadraticForm, s: ComplexValue) -> Result<ComplexValue> {
    Ok(log_gamma_factor(form, s)?.exp())
}

fn log_gamma_factor(form: &QuadraticForm, s: Complex64) -> Result<Complex64> {
    let rot = Complex64::new(0.0, FRAC_PI_2) * (Complex64::new(0.5, 0.0) - s);
    let scale = ((form.delta() as f64).sqrt() / TAU).ln();
    Ok(rot + s * scale + log_gamma(s)?)
}

/// Leading Stirling modulus `(2π)^{1/2} t^{σ−1/2} (√Δ/2π)^σ` of `|γ(σ+it)|`.
pub fn stirling_modulus(form: &QuadraticForm, s: ComplexValue) -> f64 {
    let t = s.im.abs();
    let sigma = s.re;
    TAU.sqrt() * t.powf(sigma - 0.5) * ((form.delta() as f64).sqrt() / TAU).powf(sigma)
}

/// Leading Stirling phase `t log(t√Δ/2π) − t` of `γ(1/2+it)`, for `t > 0`.
pub fn stirling_phase(form: &QuadraticForm, t: f64) -> f64 {
    t * (t * (form.delta() as f64).sqrt() / TAU).ln() - t
}

/// `f(1/2+it)` with its real part and realness diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyValue {
    pub t: f64,
    pub f: ComplexValue,
    pub w: f64,
    /// `|Im f| / |f|`
    pub imag_ratio: f64,
    /// propagated absolute error of `f`
    pub err_estimate: f64,
}

/// Evaluator of `W` sharing one coefficient table across calls.
#[derive(Debug, Clone)]
pub struct Hardy {
    zeta: EpsteinZeta,
}

impl Hardy {
    pub fn new(form: QuadraticForm) -> Self {
        Hardy {
            zeta: EpsteinZeta::new(form),
        }
    }

    pub fn form(&self) -> &QuadraticForm {
        self.zeta.form()
    }

    /// `f(1/2+it)` without the realness check.
    pub fn f_raw(&self, t: f64) -> Result<HardyValue> {
        if !(t >= 2.0) || !t.is_finite() {
            return domain(format!("W(t) needs t ≥ 2, got {t}"));
        }
        let s = Complex64::new(0.5, t);
        let z = self.zeta.theta_continuation_eval(s)?;
        let g = gamma_factor(self.form(), s)?;
        let f = g * z.value;
        let norm = f.norm();
        Ok(HardyValue {
            t,
            f,
            w: f.re,
            imag_ratio: if norm > 0.0 { f.im.abs() / norm } else { 0.0 },
            err_estimate: g.norm() * z.err_estimate + 4.0 * f64::EPSILON * norm,
        })
    }

    /// `f(1/2+it)`; fails when `Im f` exceeds both `10⁻⁸|f|` and the
    /// propagated error, so points next to a zero of `W` are accepted.
    pub fn f(&self, t: f64) -> Result<HardyValue> {
        let v = self.f_raw(t)?;
        let allowed = REALNESS_TOL * v.f.norm() + 10.0 * v.err_estimate;
        if v.f.im.abs() > allowed {
            return Err(Error::PrecisionExceeded(format!(
                "Im f(1/2+{t}i) = {:e} exceeds {allowed:e}",
                v.f.im
            )));
        }
        Ok(v)
    }

    pub fn w(&self, t: f64) -> Result<f64> {
        Ok(self.f(t)?.w)
    }

    /// Sign changes of `W` on the grid `t_from + k·step`, refined by bisection.
    /// Each local minimum of `|W|` on the grid is also searched for a pair of
    /// zeros falling between two grid points.
    pub fn sign_change_scan(&self, t_from: f64, t_to: f64, step: f64) -> Result<Vec<ZeroRecord>> {
        if !(t_from < t_to) {
            return Err(Error::Contract(format!("scan needs t_from < t_to, got [{t_from}, {t_to}]")));
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::Contract(format!("scan step must be positive, got {step}")));
        }
        if !(t_from >= 2.0) {
            return domain(format!("scan needs t_from ≥ 2, got {t_from}"));
        }
        let count = ((t_to - t_from) / step).ceil() as usize;
        let grid: Vec<f64> = (0..=count)
            .map(|k| (t_from + k as f64 * step).min(t_to))
            .collect();
        let values = grid
            .par_iter()
            .map(|&t| self.w(t))
            .collect::<Result<Vec<f64>>>()?;
        // a local minimum of |W| without a sign change may hide a close pair
        let dips: Vec<usize> = (1..grid.len().saturating_sub(1))
            .filter(|&k| {
                let same = (values[k - 1] < 0.0) == (values[k] < 0.0) && (values[k] < 0.0) == (values[k + 1] < 0.0);
                same && values[k].abs() <= values[k - 1].abs() && values[k].abs() <= values[k + 1].abs()
            })
            .collect();
        let splits = dips
            .par_iter()
            .map(|&k| Ok((k, self.split_dip(grid[k - 1], grid[k], grid[k + 1], values[k])?)))
            .collect::<Result<Vec<_>>>()?;
        let mut points: Vec<(f64, f64)> = grid.iter().copied().zip(values.iter().copied()).collect();
        points.extend(splits.into_iter().filter_map(|(_, p)| p));
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let brackets: Vec<(f64, f64, f64, f64)> = points
            .windows(2)
            .filter(|p| (p[0].1 < 0.0) != (p[1].1 < 0.0))
            .map(|p| (p[0].0, p[1].0, p[0].1, p[1].1))
            .collect();
        brackets
            .par_iter()
            .map(|&(lo, hi, wl, wh)| self.bisect(lo, hi, wl, wh))
            .collect()
    }

    /// Golden-section search for a sign flip of `W` between `a` and `c`
    /// around the grid minimum `b`; returns the first point found across.
    fn split_dip(&self, mut a: f64, b: f64, mut c: f64, wb: f64) -> Result<Option<(f64, f64)>> {
        let sign = wb.signum();
        let g = |t: f64| -> Result<f64> { Ok(sign * self.w(t)?) };
        const R: f64 = 0.381_966_011_250_105_1;
        let (mut x, mut fx) = (b, sign * wb);
        while c - a > BISECTION_TOL {
            let u = if x - a > c - x { x - R * (x - a) } else { x + R * (c - x) };
            let fu = g(u)?;
            if fu < 0.0 {
                return Ok(Some((u, sign * fu)));
            }
            if fu < fx {
                if u < x {
                    c = x;
                } else {
                    a = x;
                }
                x = u;
                fx = fu;
            } else if u < x {
                a = u;
            } else {
                c = u;
            }
        }
        Ok(None)
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, mut w_lo: f64, w_hi: f64) -> Result<ZeroRecord> {
        let lo_negative = w_lo < 0.0;
        debug_assert!(lo_negative != (w_hi < 0.0));
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let w = self.w(mid)?;
            if (w < 0.0) == lo_negative {
                lo = mid;
                w_lo = w;
            } else {
                hi = mid;
            }
        }
        let _ = w_lo;
        let gamma = 0.5 * (lo + hi);
        Ok(ZeroRecord {
            t_lo: lo,
            t_hi: hi,
            gamma,
            w_residual: self.w(gamma)?.abs(),
        })
    }

    /// Scan at `step` and again at `step/2`; the two zero counts agree unless
    /// the coarse grid stepped over a close pair.
    pub fn verified_scan(&self, t_from: f64, t_to: f64, step: f64) -> Result<VerifiedScan> {
        let coarse = self.sign_change_scan(t_from, t_to, step)?;
        let fine = self.sign_change_scan(t_from, t_to, 0.5 * step)?;
        Ok(VerifiedScan {
            consistent: coarse.len() == fine.len(),
            coarse,
            fine,
        })
    }

    /// Scan with the default step taken at the upper end of the range.
    pub fn scan_default(&self, t_from: f64, t_to: f64) -> Result<Vec<ZeroRecord>> {
        let step = default_scan_step(self.form(), t_to);
        self.sign_change_scan(t_from, t_to, step)
    }

    pub fn gaussian_integral(&self, cfg: &HardyConfig) -> Result<GaussianIntegral> {
        self.gaussian_integral_with(cfg, &QuadratureOptions::for_config(self.form(), cfg))
    }

    pub fn gaussian_integral_with(&self, cfg: &HardyConfig, opts: &QuadratureOptions) -> Result<GaussianIntegral> {
        cfg.validate()?;
        opts.validate()?;
        let t = cfg.t();
        let h = cfg.h();
        let h0 = cfg.h0();
        let zeros = self.sign_change_scan(t - h, t + h, opts.step)?;
        // panels between consecutive sign changes; on each W keeps its sign
        let mut cuts = vec![-h];
        cuts.extend(zeros.iter().map(|z| z.gamma - t));
        cuts.push(h);
        let low = GaussLegendre::new(opts.order_low);
        let high = GaussLegendre::new(opts.order_high);
        let pieces: Vec<(f64, f64)> = cuts
            .windows(2)
            .flat_map(|w| {
                let (a, b) = (w[0], w[1]);
                let n = ((b - a) / opts.step).ceil().max(1.0) as usize;
                let len = (b - a) / n as f64;
                (0..n).map(move |k| (a + k as f64 * len, if k + 1 == n { b } else { a + (k + 1) as f64 * len }))
            })
            .collect();
        let weight = |u: f64| (-(u / h0) * (u / h0)).exp();
        let evaluated = pieces
            .par_iter()
            .map(|&(a, b)| -> Result<(f64, f64, f64)> {
                let mut hi_sum = 0.0;
                for (u, w) in high.nodes_on(a, b).zip(high.weights_on(a, b)) {
                    hi_sum += w * self.w(t + u)? * weight(u);
                }
                let mut lo_sum = 0.0;
                for (u, w) in low.nodes_on(a, b).zip(low.weights_on(a, b)) {
                    lo_sum += w * self.w(t + u)? * weight(u);
                }
                Ok((a, hi_sum, (hi_sum - lo_sum).abs()))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut panels = Vec::with_capacity(cuts.len() - 1);
        let mut quadrature_tol = 0.0;
        let mut k = 0;
        for w in cuts.windows(2) {
            let mut value = 0.0;
            while k < evaluated.len() && evaluated[k].0 < w[1] {
                value += evaluated[k].1;
                quadrature_tol += evaluated[k].2;
                k += 1;
            }
            panels.push(value);
        }
        let integral: f64 = panels.iter().sum();
        let abs_integral: f64 = panels.iter().map(|p| p.abs()).sum();
        quadrature_tol += 64.0 * f64::EPSILON * abs_integral;
        if quadrature_tol > opts.max_relative_tol * abs_integral.max(f64::MIN_POSITIVE) {
            return Err(Error::QuadratureFailure(format!(
                "Gauss–Legendre orders {} and {} differ by {quadrature_tol:e} on |I| = {abs_integral:e}",
                opts.order_low, opts.order_high
            )));
        }
        let weighted_sum = weighted_sum(self.form(), cfg)?;
        Ok(GaussianIntegral {
            integral,
            abs_integral,
            deficit: abs_integral - integral.abs(),
            lower_ratio: integral.abs() / h0,
            quadrature_tol,
            zeros: zeros.iter().map(|z| z.gamma).collect(),
            panels,
            weighted_sum,
        })
    }
}

/// `π / (8 log(t√Δ/2π))`, with the logarithm floored at 1.
pub fn default_scan_step(form: &QuadraticForm, t: f64) -> f64 {
    let l = (t * (form.delta() as f64).sqrt() / TAU).ln().max(1.0);
    PI / (8.0 * l)
}

/// `Re f(1/2+it)`.
pub fn hardy_w(form: &QuadraticForm, t: f64) -> Result<f64> {
    Hardy::new(*form).w(t)
}

pub fn sign_change_scan(form: &QuadraticForm, t_from: f64, t_to: f64, step: f64) -> Result<Vec<ZeroRecord>> {
    Hardy::new(*form).sign_change_scan(t_from, t_to, step)
}

pub fn gaussian_integral(form: &QuadraticForm, cfg: &HardyConfig) -> Result<GaussianIntegral> {
    Hardy::new(*form).gaussian_integral(cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub t_lo: f64,
    pub t_hi: f64,
    pub gamma: f64,
    pub w_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifiedScan {
    pub coarse: Vec<ZeroRecord>,
    pub fine: Vec<ZeroRecord>,
    pub consistent: bool,
}

/// Parameters `(T, H, ε)` with `H₀ = H T^{−ε}` and `K = T^{1+2ε}/H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyConfig {
    t: f64,
    h: f64,
    eps: f64,
    h0: f64,
    k: f64,
}

impl HardyConfig {
    pub fn new(t: f64, h: f64, eps: f64) -> Result<Self> {
        let cfg = HardyConfig {
            t,
            h,
            eps,
            h0: h * t.powf(-eps),
            k: t.powf(1.0 + 2.0 * eps) / h,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `ε = 0.05`, `H = T^{3/7+ε}`.
    pub fn with_defaults(t: f64) -> Result<Self> {
        Self::new(t, t.powf(3.0 / 7.0 + DEFAULT_EPS), DEFAULT_EPS)
    }

    pub fn validate(&self) -> Result<()> {
        let HardyConfig { t, h, eps, h0, k } = *self;
        if !(eps > 0.0) || !eps.is_finite() {
            return domain(format!("ε must be positive, got {eps}"));
        }
        if !(t.is_finite() && h.is_finite()) || !(t - h >= 2.0) {
            return domain(format!("window [T−H, T+H] must lie in t ≥ 2, got T={t}, H={h}"));
        }
        // a relative slack absorbs the rounding of T^{3ε} and T^{1/2}
        let slack = 1e-12;
        if h < t.powf(3.0 * eps) * (1.0 - slack) || h > t.sqrt() * (1.0 + slack) {
            return domain(format!(
                "H = {h} outside [T^(3ε), T^(1/2)] = [{}, {}]",
                t.powf(3.0 * eps),
                t.sqrt()
            ));
        }
        if h0 != h * t.powf(-eps) || k != t.powf(1.0 + 2.0 * eps) / h {
            return Err(Error::Contract("H₀ and K must be derived from (T, H, ε)".into()));
        }
        Ok(())
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn eta(&self, form: &QuadraticForm) -> WeightEta {
        WeightEta::new(self.t * (form.delta() as f64).sqrt() / TAU, self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    pub step: f64,
    pub order_low: usize,
    pub order_high: usize,
    /// largest accepted `quadrature_tol / abs_integral`
    pub max_relative_tol: f64,
}

impl QuadratureOptions {
    /// Panel length `π / (4 log(T√Δ/2π))`, orders 12 and 20.
    pub fn for_config(form: &QuadraticForm, cfg: &HardyConfig) -> Self {
        QuadratureOptions {
            step: 2.0 * default_scan_step(form, cfg.t() + cfg.h()),
            order_low: 12,
            order_high: 20,
            max_relative_tol: 1e-6,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || self.order_low == 0 || self.order_high <= self.order_low {
            return Err(Error::Contract(format!("bad quadrature options {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianIntegral {
    /// `∫_{−H}^{H} W(T+u) e^{−(u/H₀)²} du`
    pub integral: f64,
    /// `∫ |W(T+u)| e^{−(u/H₀)²} du`
    pub abs_integral: f64,
    pub deficit: f64,
    /// `|I| / H₀`
    pub lower_ratio: f64,
    pub quadrature_tol: f64,
    /// sign changes of `W` inside the window
    pub zeros: Vec<f64>,
    /// integral over each stretch between consecutive sign changes
    pub panels: Vec<f64>,
    /// `Σ η(n) r_Q(n) n^{−1/2−iT}`
    pub weighted_sum: ComplexValue,
}

/// Plateau on `|x − center| ≤ K/2`, support `|x − center| < K`, with the
/// ramp `1 − u + sin(2πu)/2π` in `u = (|x−center| − K/2)/(K/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightEta {
    pub center: f64,
    pub k: f64,
}

impl WeightEta {
    pub fn new(center: f64, k: f64) -> Self {
        WeightEta { center, k }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let half = 0.5 * self.k;
        let d = (x - self.center).abs();
        if d <= half {
            1.0
        } else if d >= self.k {
            0.0
        } else {
            let u = (d - half) / half;
            1.0 - u + (TAU * u).sin() / TAU
        }
    }

    /// Integer range carrying the support.
    pub fn support(&self) -> (i64, i64) {
        ((self.center - self.k).ceil() as i64, (self.center + self.k).floor() as i64)
    }
}

/// `Σ η(n) r_Q(n) n^{−1/2−iT}` by brute force.
pub fn weighted_sum(form: &QuadraticForm, cfg: &HardyConfig) -> Result<ComplexValue> {
    let eta = cfg.eta(form);
    let (lo, hi) = eta.support();
    let lo = lo.max(1) as u64;
    if hi < 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let hi = hi as u64;
    let table = crate::qform::representation_counts_upto(form, hi)?;
    let s = Complex64::new(0.5, cfg.t());
    let mut sum = Complex64::new(0.0, 0.0);
    for n in lo..=hi {
        let r = table.get(n);
        if r != 0 {
            sum += n_pow_minus_s(n, s)? * (r as f64 * eta.eval(n as f64));
        }
    }
    Ok(sum)
}

/// Window law `[T, T + c·T^e·(log T)^p]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapLaw {
    pub name: String,
    pub exponent: f64,
    pub constant: f64,
    pub log_power: f64,
}

impl GapLaw {
    pub fn new(name: impl Into<String>, exponent: f64, constant: f64) -> Self {
        GapLaw {
            name: name.into(),
            exponent,
            constant,
            log_power: 0.0,
        }
    }

    pub fn with_log_power(mut self, p: f64) -> Self {
        self.log_power = p;
        self
    }

    pub fn width(&self, t: f64) -> f64 {
        let lg = if self.log_power == 0.0 { 1.0 } else { t.ln().max(0.0).powf(self.log_power) };
        self.constant * t.powf(self.exponent) * lg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawCheck {
    pub name: String,
    pub exponent: f64,
    pub constant: f64,
    pub log_power: f64,
    pub checked: usize,
    pub passed: usize,
    /// first `(γ_i, γ_{i+1})` whose gap exceeds the window width at `γ_i`
    pub first_violation: Option<(f64, f64)>,
}

impl LawCheck {
    pub fn all_pass(&self) -> bool {
        self.passed == self.checked
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub zeros: Vec<f64>,
    pub max_gap: f64,
    pub law_checks: Vec<LawCheck>,
}

/// Every window `[T, T + w(T)]` with `T` in the span of the zeros contains a
/// zero iff each gap satisfies `γ_{i+1} − γ_i ≤ w(γ_i)` (for increasing `w`).
pub fn gap_report(zeros: &[f64], laws: &[GapLaw]) -> Result<GapReport> {
    if zeros.len() < 2 {
        return Err(Error::Contract(format!("gap report needs at least 2 zeros, got {}", zeros.len())));
    }
    if let Some(w) = zeros.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::Contract(format!("zeros not strictly increasing at {} ≥ {}", w[0], w[1])));
    }
    let max_gap = zeros.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let law_checks = laws
        .iter()
        .map(|law| {
            let mut passed = 0;
            let mut first_violation = None;
            for w in zeros.windows(2) {
                if w[1] - w[0] <= law.width(w[0]) {
                    passed += 1;
                } else if first_violation.is_none() {
                    first_violation = Some((w[0], w[1]));
                }
            }
            LawCheck {
                name: law.name.clone(),
                exponent: law.exponent,
                constant: law.constant,
                log_power: law.log_power,
                checked: zeros.len() - 1,
                passed,
                first_violation,
            }
        })
        .collect();
    Ok(GapReport {
        zeros: zeros.to_vec(),
        max_gap,
        law_checks,
    })
}
