use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{raw_double_sum, ExpSumScenario, Quadrants};
use crate::error::Result;

/// An exponent `κ·a + b` of `T` after substituting `K = T^κ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentIdentity {
    pub label: String,
    pub kappa: String,
    pub k_exponent: String,
    pub t_exponent: String,
    pub total: String,
    pub vanishes: bool,
}

pub fn exponent_identity(label: &str, kappa: Ratio<i64>, k_exponent: Ratio<i64>, t_exponent: Ratio<i64>) -> ExponentIdentity {
    let total = kappa * k_exponent + t_exponent;
    ExponentIdentity {
        label: label.to_string(),
        kappa: kappa.to_string(),
        k_exponent: k_exponent.to_string(),
        t_exponent: t_exponent.to_string(),
        total: total.to_string(),
        vanishes: total == Ratio::from_integer(0),
    }
}

/// Thresholds at which the main terms of the two bounds become `T⁰`.
pub fn threshold_identities() -> Vec<ExponentIdentity> {
    vec![
        exponent_identity("trivial", Ratio::new(6, 11), Ratio::new(11, 12), Ratio::new(-1, 2)),
        exponent_identity("improved", Ratio::new(4, 7), Ratio::new(7, 8), Ratio::new(-1, 2)),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub big_t: f64,
    pub big_k: f64,
    pub n: f64,
    pub n_prime: f64,
    pub points: usize,
    pub raw_abs: f64,
    pub quadrants: Quadrants,
    /// `K^{1/4}N^{−1/4}T^{−1/2}·|S|`
    pub normalized: f64,
    /// `K^{11/12}T^{−1/2} + K^{25/12}T^{−3/2}`
    pub trivial_bound: f64,
    /// `K^{7/8}T^{−1/2}·log T + K^{17/8}T^{−3/2}`
    pub improved_bound: f64,
    pub ratio_trivial: f64,
    pub ratio_improved: f64,
    /// `⌊N^{1/3}K^{−1/6}⌋`, at least 1
    pub m_trivial: u64,
    /// `⌊N^{1/2}K^{−1/4}⌋`, at least 1
    pub m_improved: u64,
    pub nontrivial_at_m_trivial: f64,
    pub nontrivial_at_m_improved: f64,
    /// `|S| / nontrivial(M)` at each choice of `M`
    pub raw_over_nontrivial_trivial: f64,
    pub raw_over_nontrivial_improved: f64,
    pub identities: Vec<ExponentIdentity>,
}

/// `MN^{3/2} + N²/M + MN^{5/2}K^{3/2}/T² + M³N^{1/2}K^{1/2} + N²/(M^{1/2}K^{1/4}) + MNK^{1/2}log T`
pub fn nontrivial_rhs(m: f64, n: f64, k: f64, t: f64) -> f64 {
    m * n.powf(1.5)
        + n * n / m
        + m * n.powf(2.5) * k.powf(1.5) / (t * t)
        + m.powi(3) * n.sqrt() * k.sqrt()
        + n * n / (m.sqrt() * k.powf(0.25))
        + m * n * k.sqrt() * t.ln()
}

pub fn bound_report(sc: &ExpSumScenario) -> Result<BoundReport> {
    let s = raw_double_sum(sc)?;
    let (t, k, n) = (sc.big_t, sc.big_k, sc.n);
    let raw_abs = s.total.norm();
    let normalized = k.powf(0.25) * n.powf(-0.25) * t.powf(-0.5) * raw_abs;
    let trivial_bound = k.powf(11.0 / 12.0) / t.sqrt() + k.powf(25.0 / 12.0) * t.powf(-1.5);
    let improved_bound = k.powf(7.0 / 8.0) / t.sqrt() * t.ln() + k.powf(17.0 / 8.0) * t.powf(-1.5);
    let m_trivial = ((n.cbrt() * k.powf(-1.0 / 6.0)).floor() as u64).max(1);
    let m_improved = ((n.sqrt() * k.powf(-0.25)).floor() as u64).max(1);
    let nt = nontrivial_rhs(m_trivial as f64, n, k, t);
    let ni = nontrivial_rhs(m_improved as f64, n, k, t);
    Ok(BoundReport {
        big_t: t,
        big_k: k,
        n,
        n_prime: sc.n_prime,
        points: s.points,
        raw_abs,
        quadrants: s.quadrants,
        normalized,
        trivial_bound,
        improved_bound,
        ratio_trivial: normalized / trivial_bound,
        ratio_improved: normalized / improved_bound,
        m_trivial,
        m_improved,
        nontrivial_at_m_trivial: nt,
        nontrivial_at_m_improved: ni,
        raw_over_nontrivial_trivial: raw_abs / nt,
        raw_over_nontrivial_improved: raw_abs / ni,
        identities: threshold_identities(),
    })
}

const CSV_COLUMNS: [&str; 17] = [
    "T",
    "K",
    "N",
    "Nprime",
    "points",
    "raw_abs",
    "normalized",
    "trivial_bound",
    "improved_bound",
    "ratio_trivial",
    "ratio_improved",
    "M_trivial",
    "M_improved",
    "nontrivial_at_M_trivial",
    "nontrivial_at_M_improved",
    "raw_over_nontrivial_trivial",
    "raw_over_nontrivial_improved",
];

impl BoundReport {
    pub fn csv_header() -> String {
        CSV_COLUMNS.join(",")
    }

    pub fn csv_row(&self) -> String {
        [
            self.big_t,
            self.big_k,
            self.n,
            self.n_prime,
            self.points as f64,
            self.raw_abs,
            self.normalized,
            self.trivial_bound,
            self.improved_bound,
            self.ratio_trivial,
            self.ratio_improved,
            self.m_trivial as f64,
            self.m_improved as f64,
            self.nontrivial_at_m_trivial,
            self.nontrivial_at_m_improved,
            self.raw_over_nontrivial_trivial,
            self.raw_over_nontrivial_improved,
        ]
        .iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(",")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
