//! Numerical checkers for Weyl differencing, the B-process and the
//! second-derivative bound, with seeded trial suites.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stationary::COMPARABILITY_WINDOW;
use crate::error::{Error, Result};
use crate::special::{e_unit, ComplexValue};

/// Sample count used to verify derivative hypotheses.
const HYPOTHESIS_SAMPLES: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub coeff: f64,
    pub exponent: f64,
}

/// `f(x) = Σ cᵢ x^{pᵢ}` for `x > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerPhase {
    pub terms: Vec<PowerTerm>,
}

impl PowerPhase {
    pub fn new(terms: &[(f64, f64)]) -> Self {
        PowerPhase {
            terms: terms
                .iter()
                .map(|&(coeff, exponent)| PowerTerm { coeff, exponent })
                .collect(),
        }
    }

    /// `A·x^p + B·x + C`
    pub fn power_linear(a: f64, p: f64, b: f64, c: f64) -> Self {
        Self::new(&[(a, p), (b, 1.0), (c, 0.0)])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.derivative(x, 0)
    }

    pub fn derivative(&self, x: f64, order: u32) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let mut c = t.coeff;
                for j in 0..order {
                    c *= t.exponent - j as f64;
                }
                if c == 0.0 {
                    0.0
                } else {
                    c * x.powf(t.exponent - order as f64)
                }
            })
            .sum()
    }
}

/// `ξ(n)` on `(a, a + len]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylTrial {
    pub a: i64,
    pub xi: Vec<ComplexValue>,
    pub h: u64,
    pub lambda: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VdcTrial {
    pub phase: PowerPhase,
    pub a: i64,
    pub b: i64,
    /// `λ`; sampled from `f″` when absent
    pub lambda_bound: Option<f64>,
    /// `α`; sampled from `f″` when absent
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BProcessTrial {
    pub phase: PowerPhase,
    pub a: f64,
    pub b: f64,
    /// `N` with `[a, b] ⊆ [N, 2N]`
    pub n_interval: f64,
    /// `F` with `f″ ≍ FN⁻²`
    pub f_scale: f64,
    /// constant `C` of the reported error bound
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LemmaTrial {
    Weyl(WeylTrial),
    Bprocess(BProcessTrial),
    Vdc(VdcTrial),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylCheck {
    /// `|Σξ(n)|²`
    pub lhs: f64,
    /// right side with the weight `1 − λ|h|/H` as printed
    pub rhs: f64,
    pub holds: bool,
    /// right side with the weight clamped at 0
    pub rhs_clamped: f64,
    pub holds_clamped: bool,
}

/// Tolerance of the Weyl inequality, relative to `(Σ|ξ|)²`.
pub const WEYL_TOL: f64 = 1e-9;

pub fn weyl_difference_check(trial: &WeylTrial) -> Result<WeylCheck> {
    let len = trial.xi.len();
    if len == 0 {
        return Err(Error::Contract("Weyl differencing needs a non-empty support".into()));
    }
    if trial.h == 0 || trial.lambda == 0 {
        return Err(Error::Contract("Weyl differencing needs H ≥ 1 and λ ≥ 1".into()));
    }
    let sum: Complex64 = trial.xi.iter().sum();
    let lhs = sum.norm_sqr();
    let hh = trial.h as f64;
    let lam = trial.lambda as i64;
    let mut rhs = 0.0;
    let mut rhs_clamped = 0.0;
    for h in -(trial.h as i64 - 1)..=(trial.h as i64 - 1) {
        let shift = lam * h;
        let mut corr = Complex64::new(0.0, 0.0);
        for i in 0..len as i64 {
            let j = i - shift;
            if j >= 0 && j < len as i64 {
                corr += trial.xi[i as usize] * trial.xi[j as usize].conj();
            }
        }
        let w = 1.0 - trial.lambda as f64 * h.unsigned_abs() as f64 / hh;
        // the ±h terms are conjugate, so the total is real
        rhs += w * corr.re;
        rhs_clamped += w.max(0.0) * corr.re;
    }
    let factor = (len as f64 + hh) / hh;
    let rhs = factor * rhs;
    let rhs_clamped = factor * rhs_clamped;
    let scale: f64 = trial.xi.iter().map(|z| z.norm()).sum::<f64>().powi(2);
    let slack = WEYL_TOL * scale.max(1.0);
    Ok(WeylCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + slack,
        rhs_clamped,
        holds_clamped: lhs <= rhs_clamped + slack,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VdcCheck {
    pub actual: f64,
    pub bound: f64,
    pub ratio: f64,
    pub lambda: f64,
    pub alpha: f64,
}

fn sample_points(a: f64, b: f64) -> impl Iterator<Item = f64> {
    (0..=HYPOTHESIS_SAMPLES).map(move |i| a + (b - a) * i as f64 / HYPOTHESIS_SAMPLES as f64)
}

/// `|Σ_{a≤n≤b} e(f(n))|` against `α(b−a)λ^{1/2} + λ^{−1/2}`.
pub fn vdc_second_derivative_bound(trial: &VdcTrial) -> Result<VdcCheck> {
    if trial.a >= trial.b {
        return Err(Error::Contract(format!("need a < b, got [{}, {}]", trial.a, trial.b)));
    }
    if trial.a <= 0 {
        return Err(Error::Contract("power phases need a ≥ 1".into()));
    }
    let (a, b) = (trial.a as f64, trial.b as f64);
    let f2: Vec<f64> = sample_points(a, b).map(|x| trial.phase.derivative(x, 2)).collect();
    let lo = f2.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    let hi = f2.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let same_sign = f2.iter().all(|v| *v > 0.0) || f2.iter().all(|v| *v < 0.0);
    if !same_sign || !(lo > 0.0) {
        return Err(Error::HypothesisViolated("f″ vanishes or changes sign on [a, b]".into()));
    }
    let lambda = trial.lambda_bound.unwrap_or(lo);
    let alpha = trial.alpha.unwrap_or(hi / lo);
    if !(lambda > 0.0) || !(alpha >= 1.0) {
        return Err(Error::HypothesisViolated(format!("need λ > 0 and α ≥ 1, got λ={lambda}, α={alpha}")));
    }
    let slack = 1e-12;
    if lo < lambda * (1.0 - slack) || hi > alpha * lambda * (1.0 + slack) {
        return Err(Error::HypothesisViolated(format!(
            "sampled |f″| ∈ [{lo:e}, {hi:e}] leaves [λ, αλ] = [{lambda:e}, {:e}]",
            alpha * lambda
        )));
    }
    let actual = (trial.a..=trial.b)
        .map(|n| e_unit(trial.phase.eval(n as f64)))
        .sum::<Complex64>()
        .norm();
    let bound = alpha * (b - a) * lambda.sqrt() + 1.0 / lambda.sqrt();
    Ok(VdcCheck {
        actual,
        bound,
        ratio: actual / bound,
        lambda,
        alpha,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BProcessCheck {
    /// `Σ_{a≤n≤b} e(f(n))`
    pub lhs: ComplexValue,
    /// `Σ_{α≤ν≤β} e(−φ(ν) − 1/8)/|f″(x_ν)|^{1/2}`
    pub rhs: ComplexValue,
    /// `C·(log(FN⁻¹ + 2) + F^{−1/2}N)`
    pub error_bound: f64,
    /// `|lhs − rhs| / (log(FN⁻¹ + 2) + F^{−1/2}N)`
    pub scaled_error: f64,
    /// number of stationary points used
    pub stationary_points: usize,
    /// integers in `[α, β]`
    pub integers_in_range: usize,
}

/// Stationary-phase transform of `Σ e(f(n))` for concave `f`.
pub fn b_process_transform(trial: &BProcessTrial) -> Result<BProcessCheck> {
    let BProcessTrial {
        ref phase,
        a,
        b,
        n_interval: nn,
        f_scale: ff,
        constant,
    } = *trial;
    if !(a < b) || !(nn > 0.0) || !(ff > 0.0) {
        return Err(Error::Contract(format!("need a < b, N > 0, F > 0; got [{a}, {b}], N={nn}, F={ff}")));
    }
    if a < nn || b > 2.0 * nn {
        return Err(Error::HypothesisViolated(format!("[{a}, {b}] ⊄ [N, 2N] with N = {nn}")));
    }
    let (lower, upper) = COMPARABILITY_WINDOW;
    for x in sample_points(a, b) {
        let f2 = phase.derivative(x, 2);
        if !(f2 < 0.0) {
            return Err(Error::HypothesisViolated(format!("f″({x}) = {f2} is not negative")));
        }
        let r2 = f2.abs() * nn * nn / ff;
        let r3 = phase.derivative(x, 3).abs() * nn.powi(3) / ff;
        let r4 = phase.derivative(x, 4).abs() * nn.powi(4) / ff;
        if r2 < lower || r2 > upper || r3 > upper || r4 > upper {
            return Err(Error::HypothesisViolated(format!(
                "derivative sizes at x={x} not comparable to F/N^k: {r2:e}, {r3:e}, {r4:e}"
            )));
        }
    }
    let lhs: Complex64 = ((a.ceil() as i64)..=(b.floor() as i64))
        .map(|n| e_unit(phase.eval(n as f64)))
        .sum();
    let alpha = phase.derivative(b, 1);
    let beta = phase.derivative(a, 1);
    let nus: Vec<i64> = ((alpha.ceil() as i64)..=(beta.floor() as i64)).collect();
    let mut rhs = Complex64::new(0.0, 0.0);
    for &nu in &nus {
        let x = solve_decreasing(|x| phase.derivative(x, 1) - nu as f64, a, b)?;
        let phi = -phase.eval(x) + nu as f64 * x;
        rhs += e_unit(-phi - 0.125) / phase.derivative(x, 2).abs().sqrt();
    }
    let unit = (ff / nn + 2.0).ln() + nn / ff.sqrt();
    Ok(BProcessCheck {
        lhs,
        rhs,
        error_bound: constant * unit,
        scaled_error: (lhs - rhs).norm() / unit,
        stationary_points: nus.len(),
        integers_in_range: nus.len(),
    })
}

fn solve_decreasing(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let (glo, ghi) = (g(lo), g(hi));
    if !(glo >= 0.0 && ghi <= 0.0) {
        return Err(Error::RootFindFailure(format!(
            "f′ − ν not bracketed on [{lo}, {hi}]: {glo:e}, {ghi:e}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Random Weyl trial: uniform complex entries, constants, or quadratic
/// phases, chosen by `index mod 3`.
pub fn random_weyl_trial(seed: u64, index: u64, lambda: u64) -> WeylTrial {
    let mut rng = trial_rng(seed, index);
    let len = rng.gen_range(1..=40usize);
    let a = rng.gen_range(-5..=5);
    let h = rng.gen_range(1..=len as u64 + 3);
    let xi = match index % 3 {
        0 => (0..len)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
        1 => {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            vec![z; len]
        }
        _ => {
            let c2: f64 = rng.gen_range(0.0..1.0);
            let c1: f64 = rng.gen_range(0.0..1.0);
            (0..len).map(|n| e_unit(c2 * (n * n) as f64 + c1 * n as f64)).collect()
        }
    };
    WeylTrial { a, xi, h, lambda }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylSuite {
    pub lambda: u64,
    pub trials: usize,
    pub violations: usize,
    pub violations_clamped: usize,
    /// largest `lhs / rhs` over trials with positive right side
    pub max_ratio: f64,
    pub first_violation: Option<u64>,
}

pub fn weyl_suite(trials: usize, seed: u64, lambda: u64) -> Result<WeylSuite> {
    let checks = (0..trials as u64)
        .into_par_iter()
        .map(|i| Ok((i, weyl_difference_check(&random_weyl_trial(seed, i, lambda))?)))
        .collect::<Result<Vec<_>>>()?;
    let violations = checks.iter().filter(|(_, c)| !c.holds).count();
    Ok(WeylSuite {
        lambda,
        trials,
        violations,
        violations_clamped: checks.iter().filter(|(_, c)| !c.holds_clamped).count(),
        max_ratio: checks
            .iter()
            .filter(|(_, c)| c.rhs > 0.0)
            .map(|(_, c)| c.lhs / c.rhs)
            .fold(0.0, f64::max),
        first_violation: checks.iter().find(|(_, c)| !c.holds).map(|(i, _)| *i),
    })
}

/// Fifty phases `A·x^{3/2} + Bx + C` on `[N, 2N]`, `A` log-spaced.
pub fn vdc_standard_suite() -> Vec<VdcTrial> {
    let lengths = [50i64, 200, 1000];
    (0..50)
        .map(|i| {
            let n = lengths[i % lengths.len()];
            let a = 10f64.powf(-4.0 + 4.0 * i as f64 / 49.0);
            let b = 0.37 * (i as f64).sin();
            VdcTrial {
                phase: PowerPhase::power_linear(a, 1.5, b, 0.1 * i as f64),
                a: n,
                b: 2 * n,
                lambda_bound: None,
                alpha: None,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VdcSuite {
    pub phases: usize,
    pub max_ratio: f64,
    pub ratios: Vec<f64>,
}

pub fn vdc_suite(trials: &[VdcTrial]) -> Result<VdcSuite> {
    let ratios = trials
        .par_iter()
        .map(|t| Ok(vdc_second_derivative_bound(t)?.ratio))
        .collect::<Result<Vec<f64>>>()?;
    Ok(VdcSuite {
        phases: trials.len(),
        max_ratio: ratios.iter().copied().fold(0.0, f64::max),
        ratios,
    })
}

/// Twenty concave phases `f(x) = F·ψ(x/N) + Bx` with `F ∈ [10², 10⁴]`,
/// `N ∈ [10², 10³]`, and `ψ` one of `2√u`, `−u²/2`, `−u^{3/2}`, `u^{0.3}`.
pub fn bprocess_standard_suite(constant: f64) -> Vec<BProcessTrial> {
    (0..20)
        .map(|i| {
            let ff = 10f64.powf(2.0 + 2.0 * ((i * 7) % 20) as f64 / 19.0);
            let nn = (10f64.powf(2.0 + ((i * 3) % 20) as f64 / 19.0)).round();
            let shift = 0.31 * (1.7 * i as f64).sin();
            // exponents p with coefficient F·c·N^{−p}
            let (c, p) = match i % 4 {
                0 => (2.0, 0.5),
                1 => (-0.5, 2.0),
                2 => (-1.0, 1.5),
                _ => (1.0, 0.3),
            };
            let phase = PowerPhase::new(&[(ff * c / nn.powf(p), p), (shift, 1.0)]);
            BProcessTrial {
                phase,
                a: nn,
                b: 2.0 * nn,
                n_interval: nn,
                f_scale: ff,
                constant,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BProcessSuite {
    pub phases: usize,
    pub constant: f64,
    /// largest `|lhs − rhs| / (log(FN⁻¹+2) + F^{−1/2}N)`
    pub max_scaled_error: f64,
    pub all_within: bool,
}

pub fn bprocess_suite(trials: &[BProcessTrial]) -> Result<BProcessSuite> {
    let checks = trials
        .par_iter()
        .map(b_process_transform)
        .collect::<Result<Vec<_>>>()?;
    let constant = trials.first().map_or(0.0, |t| t.constant);
    let max_scaled_error = checks.iter().map(|c| c.scaled_error).fold(0.0, f64::max);
    Ok(BProcessSuite {
        phases: trials.len(),
        constant,
        max_scaled_error,
        all_within: max_scaled_error <= constant,
    })
}
