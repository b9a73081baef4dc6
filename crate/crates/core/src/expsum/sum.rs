use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{mod_inverse, ExpSumScenario, Geometry};
use crate::error::{Error, Result};
use crate::qform::{enumerate_annulus_with_budget, DEFAULT_CAPACITY};
use crate::special::{e_unit, phi, phi_derivatives, ComplexValue};

/// Points per block in the parallel reduction.
const BLOCK: usize = 4096;

/// Largest phase magnitude accepted before rounding exceeds `10⁻¹⁰`.
const MAX_PHASE: f64 = 1e5;

/// Partial sums by sign of `x` and by half of the annulus slice: `y ∈ I(x)`
/// when `b*x + 2c*y ≥ 0`, else `y ∈ I′(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrants {
    pub x_nonneg_i: ComplexValue,
    pub x_nonneg_i_prime: ComplexValue,
    pub x_neg_i: ComplexValue,
    pub x_neg_i_prime: ComplexValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawSum {
    pub total: ComplexValue,
    pub quadrants: Quadrants,
    pub points: usize,
}

/// Phase `Q·r + (t/π)φ(αQ)` of an integer value `Q`, with the rational part
/// reduced modulo 1 exactly.
#[derive(Debug, Clone)]
pub(crate) struct ValuePhase {
    k: u64,
    inv: u64,
    denom: u64,
    t: f64,
    alpha: f64,
}

impl ValuePhase {
    pub fn new(sc: &ExpSumScenario) -> Result<Self> {
        let inv = mod_inverse(sc.h * sc.delta0, sc.k)
            .ok_or_else(|| Error::Contract("hΔ₀ is not invertible modulo k".into()))?;
        Ok(ValuePhase {
            k: sc.k,
            inv,
            denom: 2 * sc.h * sc.k * sc.delta0,
            t: sc.t,
            alpha: Geometry::new(sc).alpha,
        })
    }

    pub fn phase(&self, q: u64) -> Result<f64> {
        let rational = ((q % self.k) * self.inv % self.k) as f64 / self.k as f64
            - (q % self.denom) as f64 / self.denom as f64;
        let smooth = self.t / PI * phi(self.alpha * q as f64)?;
        if smooth.abs() > MAX_PHASE {
            return Err(Error::PrecisionExceeded(format!("phase {smooth:e} too large for f64 reduction")));
        }
        Ok(rational + smooth)
    }
}

/// `Σ_{N ≤ Q*(x,y) ≤ N'} e(Q*(x,y)·r + (t/π)·φ(πQ*(x,y)/(2hkΔ₀t)))`.
pub fn raw_double_sum(sc: &ExpSumScenario) -> Result<RawSum> {
    raw_double_sum_with_budget(sc, DEFAULT_CAPACITY)
}

pub fn raw_double_sum_with_budget(sc: &ExpSumScenario, budget: u64) -> Result<RawSum> {
    sc.validate()?;
    let points = enumerate_annulus_with_budget(&sc.qstar, sc.n, sc.n_prime, budget)?;
    let vp = ValuePhase::new(sc)?;
    let mut values: Vec<i64> = points.iter().map(|p| p.value).collect();
    values.sort_unstable();
    values.dedup();
    let units: HashMap<i64, Complex64> = values
        .iter()
        .map(|&v| Ok((v, e_unit(vp.phase(v as u64)?))))
        .collect::<Result<_>>()?;
    let (b, c) = (sc.qstar.b(), sc.qstar.c());
    let blocks: Vec<[Complex64; 4]> = points
        .par_chunks(BLOCK)
        .map(|chunk| {
            let mut acc = [Complex64::new(0.0, 0.0); 4];
            for p in chunk {
                let upper = b * p.x + 2 * c * p.y >= 0;
                let slot = match (p.x >= 0, upper) {
                    (true, true) => 0,
                    (true, false) => 1,
                    (false, true) => 2,
                    (false, false) => 3,
                };
                acc[slot] += units[&p.value];
            }
            acc
        })
        .collect();
    let mut acc = [Complex64::new(0.0, 0.0); 4];
    for block in blocks {
        for i in 0..4 {
            acc[i] += block[i];
        }
    }
    Ok(RawSum {
        total: acc[0] + acc[1] + acc[2] + acc[3],
        quadrants: Quadrants {
            x_nonneg_i: acc[0],
            x_nonneg_i_prime: acc[1],
            x_neg_i: acc[2],
            x_neg_i_prime: acc[3],
        },
        points: points.len(),
    })
}

/// Phase of a single value, for level-set checks.
pub fn value_phase(sc: &ExpSumScenario, q: u64) -> Result<f64> {
    ValuePhase::new(sc)?.phase(q)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylStepRow {
    pub m: u64,
    /// `Σ_x Σ_{y∈I(x)} e(f_x(y+m) − f_x(y−m))`
    pub direct: ComplexValue,
    /// `Σ_x Σ_{y∈I(x)} e(2mF_x(y))`
    pub linearized: ComplexValue,
    /// largest discrepancy over single lines `x`
    pub max_line_discrepancy: f64,
    /// `mN^{3/2}K^{3/2}/T² + m³K^{1/2}/N^{1/2}`
    pub remainder: f64,
    /// `max_line_discrepancy / remainder`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylStepDiagnostic {
    pub rows: Vec<WeylStepRow>,
    pub max_ratio: f64,
    /// `max |g‴_x(y)|·NT/K^{1/2}` over the lattice points of the slices
    pub g3_scaled_max: f64,
    pub points: usize,
}

/// Integer points `(x, y)` with `x ≥ 0` and `y ∈ I(x)`, grouped by `x`.
pub(crate) fn upper_quadrant_lines(sc: &ExpSumScenario) -> Result<Vec<(i64, Vec<i64>)>> {
    let points = enumerate_annulus_with_budget(&sc.qstar, sc.n, sc.n_prime, DEFAULT_CAPACITY)?;
    let (b, c) = (sc.qstar.b(), sc.qstar.c());
    let mut lines: Vec<(i64, Vec<i64>)> = Vec::new();
    for p in points.iter().filter(|p| p.x >= 0 && b * p.x + 2 * c * p.y >= 0) {
        match lines.last_mut() {
            Some((x, ys)) if *x == p.x => ys.push(p.y),
            _ => lines.push((p.x, vec![p.y])),
        }
    }
    Ok(lines)
}

/// Compares the differenced sums with their linearization `e(2mF_x(y))`.
pub fn weyl_step_diagnostic(sc: &ExpSumScenario, big_m: u64) -> Result<WeylStepDiagnostic> {
    sc.validate()?;
    if big_m as f64 > sc.n {
        return Err(Error::Contract(format!("M = {big_m} exceeds N = {}", sc.n)));
    }
    let g = sc.geometry();
    let lines = upper_quadrant_lines(sc)?;
    let points = lines.iter().map(|(_, ys)| ys.len()).sum();
    let (kk, nn, tt) = (sc.big_k, sc.n, sc.big_t);
    let rows: Vec<WeylStepRow> = (0..=big_m)
        .into_par_iter()
        .map(|m| {
            let mf = m as f64;
            let mut direct = Complex64::new(0.0, 0.0);
            let mut linearized = Complex64::new(0.0, 0.0);
            let mut worst: f64 = 0.0;
            for (x, ys) in &lines {
                let xf = *x as f64;
                let mut d = Complex64::new(0.0, 0.0);
                let mut l = Complex64::new(0.0, 0.0);
                for &y in ys {
                    let yf = y as f64;
                    d += e_unit(g.f_small(xf, yf + mf) - g.f_small(xf, yf - mf));
                    l += e_unit(2.0 * mf * g.f_big(xf, yf));
                }
                worst = worst.max((d - l).norm());
                direct += d;
                linearized += l;
            }
            let remainder = mf * nn.powf(1.5) * kk.powf(1.5) / (tt * tt) + mf.powi(3) * kk.sqrt() / nn.sqrt();
            WeylStepRow {
                m,
                direct,
                linearized,
                max_line_discrepancy: worst,
                remainder,
                ratio: if m == 0 { 0.0 } else { worst / remainder },
            }
        })
        .collect();
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let mut g3_scaled_max: f64 = 0.0;
    for (x, ys) in &lines {
        for &y in ys {
            let g3 = g_third(&g, *x as f64, y as f64)?;
            g3_scaled_max = g3_scaled_max.max(g3.abs() * nn * tt / kk.sqrt());
        }
    }
    Ok(WeylStepDiagnostic {
        rows,
        max_ratio,
        g3_scaled_max,
        points,
    })
}

/// `g‴_x(y)` for `g_x(y) = φ(αQ*(x,y))`.
pub fn g_third(g: &Geometry, x: f64, y: f64) -> Result<f64> {
    let u = g.alpha * g.q(x, y);
    let u1 = g.alpha * g.l(x, y);
    let u2 = 2.0 * g.c * g.alpha;
    Ok(phi_derivatives(u, 3)? * u1.powi(3) + 3.0 * phi_derivatives(u, 2)? * u1 * u2)
}
