//! Evaluation of the Epstein zeta-function `ζ_Q(s) = Σ r_Q(n) n^{−s}`.
//!
//! Three routes are provided:
//!
//! * [`dirichlet_series_eval`]: the truncated series, valid for `Re s > 1`;
//! * [`theta_continuation_eval`]: the incomplete-gamma expansion of the
//!   completed function `Λ(s) = (√Δ/2π)^s Γ(s) ζ_Q(s)`, valid for all `s ≠ 1`;
//! * [`approx_eval`]: the smoothed approximate formula on the critical line.
//!
//! The continuation integrates the theta series along the ray `arg u = ω`,
//!
//! ```text
//! Λ(s) = δ^s [ Σ r(n) G(s, βnδ) + δ⁻¹ Σ r(n) G(1−s, βn/δ) + δ⁻¹/(s−1) − 1/s ],
//! ```
//!
//! with `δ = e^{iω}`, `β = 2π/√Δ` and `G(a, z) = ∫₁^∞ e^{−zv} v^{a−1} dv`.
//! Taking `ω → ±π/2` as `|t|` grows keeps every term of the bracket of the
//! same size as the result, so nothing cancels catastrophically.

mod incgamma;

use std::f64::consts::{FRAC_PI_2, LN_2, PI};
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::qform::{representation_counts_upto, QuadraticForm, RepCountTable};
use crate::special::{log_gamma, n_pow_minus_s, ComplexValue};
use incgamma::scaled_upper_gamma;

/// Accepted loss factor `e^{c}` from the rotation: `ω = π/2 − c/|t|`.
const ROTATION_SLACK: f64 = 3.0;

/// Target size of the neglected theta tail relative to the bracket terms.
const TAIL_EXPONENT: f64 = 38.0;

/// Default constant in the reported approximate-formula error `C·t·X^{−1/2}`.
pub const DEFAULT_APPROX_CONSTANT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Theta,
    Approx,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: ComplexValue,
    pub method: Method,
    pub err_estimate: f64,
}

/// Cutoff and ordinate for the approximate formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxParams {
    pub x_cutoff: f64,
    pub t: f64,
}

impl ApproxParams {
    /// Upper exponent `A` in `t² ≤ X ≤ t^A`.
    pub const MAX_EXPONENT: f64 = 6.0;

    pub fn new(x_cutoff: f64, t: f64) -> Result<Self> {
        let p = ApproxParams { x_cutoff, t };
        p.validate()?;
        Ok(p)
    }

    /// `X = t³`.
    pub fn cubic(t: f64) -> Result<Self> {
        Self::new(t.powi(3), t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t >= 2.0) || !self.t.is_finite() {
            return domain(format!("approximate formula needs t ≥ 2, got {}", self.t));
        }
        if !(self.x_cutoff >= self.t * self.t) {
            return domain(format!(
                "approximate formula needs X ≥ t² = {}, got {}",
                self.t * self.t,
                self.x_cutoff
            ));
        }
        if self.x_cutoff > self.t.powf(Self::MAX_EXPONENT) {
            return domain(format!("approximate formula needs X ≤ t^6, got {}", self.x_cutoff));
        }
        Ok(())
    }
}

/// Evaluator for one form; caches the representation-count table.
#[derive(Debug)]
pub struct EpsteinZeta {
    form: QuadraticForm,
    table: RwLock<Option<Arc<RepCountTable>>>,
}

impl Clone for EpsteinZeta {
    fn clone(&self) -> Self {
        let table = self.table.read().expect("table lock").clone();
        EpsteinZeta {
            form: self.form,
            table: RwLock::new(table),
        }
    }
}

/// Continuation in factored form, `Λ(s) = exp(s·ln δ) · (regular − 1/s)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ThetaParts {
    pub log_delta: Complex64,
    /// bracket plus `1/s`
    pub regular: Complex64,
    pub bracket_err: f64,
}

impl EpsteinZeta {
    pub fn new(form: QuadraticForm) -> Self {
        EpsteinZeta {
            form,
            table: RwLock::new(None),
        }
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    /// Table of `r_Q(n)` covering at least `n_max`.
    pub fn table(&self, n_max: u64) -> Result<Arc<RepCountTable>> {
        if let Some(t) = self.table.read().expect("table lock").as_ref() {
            if t.x_max() >= n_max {
                return Ok(Arc::clone(t));
            }
        }
        let mut guard = self.table.write().expect("table lock");
        if let Some(t) = guard.as_ref() {
            if t.x_max() >= n_max {
                return Ok(Arc::clone(t));
            }
        }
        let current = guard.as_ref().map_or(0, |t| t.x_max());
        let size = n_max.max(current.saturating_mul(2)).max(64);
        let table = Arc::new(representation_counts_upto(&self.form, size)?);
        *guard = Some(Arc::clone(&table));
        Ok(table)
    }

    fn beta(&self) -> f64 {
        self.form.residue()
    }

    /// Rotation angle `ω` for ordinate `t`.
    fn rotation(t: f64) -> f64 {
        let w = (FRAC_PI_2 - ROTATION_SLACK / t.abs().max(1e-300)).max(0.0);
        w.copysign(t)
    }

    pub(crate) fn theta_parts(&self, s: Complex64) -> Result<ThetaParts> {
        let omega = Self::rotation(s.im);
        let beta = self.beta();
        let delta = Complex64::from_polar(1.0, omega);
        let delta_inv = delta.conj();
        let decay = beta * omega.cos();
        let p = (s.re - 1.0).max(-s.re).max(0.0);
        let n_max = ((TAIL_EXPONENT + p * (TAIL_EXPONENT / decay + 2.0).ln()) / decay).ceil() as u64 + 8;
        let table = self.table(n_max)?;
        let counts = table.as_slice();
        let one_minus_s = Complex64::new(1.0, 0.0) - s;
        let mut direct = Complex64::new(0.0, 0.0);
        let mut dual = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for n in 1..=n_max as usize {
            let r = counts[n];
            if r == 0 {
                continue;
            }
            let x = beta * n as f64;
            let g1 = scaled_upper_gamma(s, delta * x)?;
            let g2 = scaled_upper_gamma(one_minus_s, delta_inv * x)?;
            direct += g1.value * r as f64;
            dual += g2.value * r as f64;
            scale += (g1.scale + g2.scale) * r as f64;
        }
        let x_end = decay * n_max as f64;
        let tail = 2.0 * beta * (-x_end).exp() / (decay * (x_end - p).max(1.0));
        // the −1/s term is kept apart so that s·bracket is regular at s = 0
        let polar = delta_inv / (s - 1.0);
        let regular = direct + delta_inv * dual + polar;
        let bracket_err = 64.0 * f64::EPSILON * (scale + polar.norm()) + tail;
        Ok(ThetaParts {
            log_delta: Complex64::new(0.0, omega),
            regular,
            bracket_err,
        })
    }

    /// `ζ_Q(s)` for any `s ≠ 1`.
    pub fn theta_continuation_eval(&self, s: ComplexValue) -> Result<EvalResult> {
        check_finite(s)?;
        if s == Complex64::new(1.0, 0.0) {
            return Err(Error::PoleAt { re: 1.0, im: 0.0 });
        }
        if s.im == 0.0 && s.re < 0.0 && s.re == s.re.floor() {
            // trivial zeros at the poles of Γ(s)
            return Ok(EvalResult {
                value: Complex64::new(0.0, 0.0),
                method: Method::Theta,
                err_estimate: 0.0,
            });
        }
        let parts = self.theta_parts(s)?;
        // ζ = β^s δ^s · bracket / Γ(s) = β^s δ^s · (s·bracket) / Γ(s+1)
        let log_pref = s * (Complex64::new(self.beta().ln(), 0.0) + parts.log_delta) - log_gamma(s + 1.0)?;
        let pref = log_pref.exp();
        let value = pref * (s * parts.regular - 1.0);
        let err_estimate = pref.norm() * (s.norm() * parts.bracket_err + f64::EPSILON);
        Ok(EvalResult {
            value,
            method: Method::Theta,
            err_estimate,
        })
    }

    pub fn dirichlet_series_eval(&self, s: ComplexValue, n_max: u64) -> Result<EvalResult> {
        check_finite(s)?;
        if !(s.re > 1.0) {
            return domain(format!("Dirichlet series needs Re s > 1, got {}", s.re));
        }
        if n_max == 0 {
            return Err(Error::Contract("n_max must be at least 1".into()));
        }
        let table = self.table(n_max)?;
        let counts = table.as_slice();
        let mut value = Complex64::new(0.0, 0.0);
        for n in (1..=n_max as usize).rev() {
            let r = counts[n];
            if r != 0 {
                value += n_pow_minus_s(n as u64, s)? * r as f64;
            }
        }
        // partial summation with |A(x) − βx| ≤ C√x; C from the table, doubled
        let sigma = s.re;
        let nf = n_max as f64;
        let c = 2.0 * table.lattice_discrepancy_constant();
        let tail = self.beta() * nf.powf(1.0 - sigma) / (sigma - 1.0)
            + c * nf.powf(0.5 - sigma) * (2.0 * sigma - 0.5) / (sigma - 0.5);
        Ok(EvalResult {
            value,
            method: Method::Direct,
            err_estimate: tail + 1e-15 * value.norm() * (nf.ln() + 1.0),
        })
    }

    /// Smoothed approximate formula on `Re s = 1/2`, with the residue term
    /// of the pole at `s = 1` subtracted.
    pub fn approx_eval(&self, s: ComplexValue, params: &ApproxParams) -> Result<EvalResult> {
        self.approx_eval_with_constant(s, params, DEFAULT_APPROX_CONSTANT)
    }

    pub fn approx_eval_with_constant(
        &self,
        s: ComplexValue,
        params: &ApproxParams,
        constant: f64,
    ) -> Result<EvalResult> {
        check_finite(s)?;
        params.validate()?;
        if s.re != 0.5 {
            return domain(format!("approximate formula needs Re s = 1/2, got {}", s.re));
        }
        if s.im != params.t {
            return domain(format!("ordinate {} differs from params.t = {}", s.im, params.t));
        }
        let parts = self.approx_parts(params)?;
        let value = parts.sharp + parts.smoothed - parts.residue_term;
        Ok(EvalResult {
            value,
            method: Method::Approx,
            err_estimate: constant * params.t / params.x_cutoff.sqrt(),
        })
    }

    /// The three explicit pieces of the approximate formula.
    pub fn approx_parts(&self, params: &ApproxParams) -> Result<ApproxParts> {
        params.validate()?;
        let x = params.x_cutoff;
        let s = Complex64::new(0.5, params.t);
        let x_floor = x.floor() as u64;
        let two_x_floor = (2.0 * x).floor() as u64;
        let table = self.table(two_x_floor)?;
        let counts = table.as_slice();
        let mut sharp = Complex64::new(0.0, 0.0);
        for n in 1..=x_floor {
            let r = counts[n as usize];
            if r != 0 {
                sharp += n_pow_minus_s(n, s)? * r as f64;
            }
        }
        let mut smoothed = Complex64::new(0.0, 0.0);
        for n in x_floor + 1..=two_x_floor {
            let r = counts[n as usize];
            if r != 0 {
                let w = (2.0 * x / n as f64).ln() / LN_2;
                smoothed += n_pow_minus_s(n, s)? * (r as f64 * w);
            }
        }
        let one_minus_s = Complex64::new(1.0, 0.0) - s;
        let pow = |y: f64| (one_minus_s * y.ln()).exp();
        let residue_term = (pow(2.0 * x) - pow(x)) / (one_minus_s * one_minus_s)
            * (2.0 * PI / (self.form.delta() as f64).sqrt() / LN_2);
        Ok(ApproxParts {
            sharp,
            smoothed,
            residue_term,
        })
    }

    /// `|Λ(s) − Λ(1−s)| / (|Λ(s)| + |Λ(1−s)|)` with both sides from the
    /// theta continuation and `log_gamma`.
    pub fn functional_equation_residual(&self, s: ComplexValue) -> Result<f64> {
        check_finite(s)?;
        let one = Complex64::new(1.0, 0.0);
        for p in [s, one - s] {
            if p.im == 0.0 && p.re <= 1.0 && p.re == p.re.floor() {
                return Err(Error::PoleAt { re: s.re, im: s.im });
            }
        }
        let completed = |z: Complex64| -> Result<Complex64> {
            let zeta = self.theta_continuation_eval(z)?.value;
            let log_factor = -z * self.beta().ln() + log_gamma(z)?;
            Ok(log_factor.exp() * zeta)
        };
        let lhs = completed(s)?;
        let rhs = completed(one - s)?;
        Ok((lhs - rhs).norm() / (lhs.norm() + rhs.norm()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxParts {
    /// `Σ_{n≤X} r(n) n^{−s}`
    pub sharp: ComplexValue,
    /// `(log 2)⁻¹ Σ_{X<n≤2X} r(n) log(2X/n) n^{−s}`
    pub smoothed: ComplexValue,
    /// `(log 2)⁻¹ 2πΔ^{−1/2} (1−s)^{−2} ((2X)^{1−s} − X^{1−s})`
    pub residue_term: ComplexValue,
}

fn check_finite(s: Complex64) -> Result<()> {
    if s.re.is_finite() && s.im.is_finite() {
        Ok(())
    } else {
        domain(format!("non-finite argument {s}"))
    }
}

pub fn dirichlet_series_eval(form: &QuadraticForm, s: ComplexValue, n_max: u64) -> Result<EvalResult> {
    EpsteinZeta::new(*form).dirichlet_series_eval(s, n_max)
}

pub fn theta_continuation_eval(form: &QuadraticForm, s: ComplexValue) -> Result<EvalResult> {
    EpsteinZeta::new(*form).theta_continuation_eval(s)
}

pub fn approx_eval(form: &QuadraticForm, s: ComplexValue, params: &ApproxParams) -> Result<EvalResult> {
    EpsteinZeta::new(*form).approx_eval(s, params)
}

pub fn functional_equation_residual(form: &QuadraticForm, s: ComplexValue) -> Result<f64> {
    EpsteinZeta::new(*form).functional_equation_residual(s)
}
