//! Integer positive definite binary quadratic forms `Q(x, y) = ax² + bxy + cy²`.
//!
//! All membership decisions are made in exact integer arithmetic; floating
//! point only seeds the candidate ranges, which are then corrected.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on table sizes / enumerated points.
pub const DEFAULT_CAPACITY: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawForm", into = "RawForm")]
pub struct QuadraticForm {
    a: i64,
    b: i64,
    c: i64,
}

#[derive(Serialize, Deserialize)]
struct RawForm {
    a: i64,
    b: i64,
    c: i64,
}

impl TryFrom<RawForm> for QuadraticForm {
    type Error = Error;
    fn try_from(raw: RawForm) -> Result<Self> {
        validate_form(raw.a, raw.b, raw.c)
    }
}

impl From<QuadraticForm> for RawForm {
    fn from(q: QuadraticForm) -> Self {
        RawForm {
            a: q.a,
            b: q.b,
            c: q.c,
        }
    }
}

/// Checks positive definiteness and builds the form.
pub fn validate_form(a: i64, b: i64, c: i64) -> Result<QuadraticForm> {
    let det = 4 * a as i128 * c as i128 - (b as i128) * (b as i128);
    if a <= 0 || c <= 0 || det <= 0 || det > i64::MAX as i128 {
        return Err(Error::NotPositiveDefinite { a, b, c });
    }
    Ok(QuadraticForm { a, b, c })
}

impl QuadraticForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        validate_form(a, b, c)
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    /// `Δ = |4ac − b²|`.
    pub fn delta(&self) -> i64 {
        4 * self.a * self.c - self.b * self.b
    }

    /// Discriminant `d = b² − 4ac` (negative).
    pub fn discriminant(&self) -> i64 {
        -self.delta()
    }

    /// `2π/√Δ`, the residue at `s = 1` and the lattice-point density.
    pub fn residue(&self) -> f64 {
        2.0 * PI / (self.delta() as f64).sqrt()
    }

    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }

    /// Real-valued evaluation for non-lattice arguments.
    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.a as f64 * x * x + self.b as f64 * x * y + self.c as f64 * y * y
    }

    /// Largest `|x|` such that some `y` has `Q(x, y) ≤ bound`.
    fn x_extent(&self, bound: i128) -> i64 {
        if bound < 0 {
            return -1;
        }
        // Q(x, y) ≤ bound has real solutions in y iff Δx² ≤ 4c·bound.
        let lim = 4 * self.c as i128 * bound;
        let delta = self.delta() as i128;
        let mut x = ((lim as f64 / delta as f64).sqrt()) as i128;
        while delta * (x + 1) * (x + 1) <= lim {
            x += 1;
        }
        while x > 0 && delta * x * x > lim {
            x -= 1;
        }
        x as i64
    }

    /// Integer `y` with `Q(x, y) ≤ bound`, as an inclusive range.
    fn y_range(&self, x: i64, bound: i128) -> Option<(i64, i64)> {
        let disc = 4 * self.c as i128 * bound - self.delta() as i128 * (x as i128) * (x as i128);
        if disc < 0 {
            return None;
        }
        let root = (disc as u128).isqrt() as i128;
        let two_c = 2 * self.c as i128;
        let bx = self.b as i128 * x as i128;
        let mut hi = (-bx + root).div_euclid(two_c) as i64;
        let mut lo = (-bx - root).div_euclid(two_c) as i64;
        while self.eval(x, hi + 1) <= bound {
            hi += 1;
        }
        while self.eval(x, hi) > bound && hi >= lo {
            hi -= 1;
        }
        while self.eval(x, lo) > bound && lo <= hi {
            lo += 1;
        }
        while self.eval(x, lo - 1) <= bound {
            lo -= 1;
        }
        (lo <= hi).then_some((lo, hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
    pub value: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepCount {
    pub n: u64,
    pub count: u64,
}

/// `r_Q(n)`, counted exactly by solving the quadratic in `y` for each `x`.
pub fn representation_count(form: &QuadraticForm, n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let n = n as i128;
    let two_c = 2 * form.c as i128;
    let delta = form.delta() as i128;
    let xmax = form.x_extent(n);
    let mut count = 0;
    for x in -xmax..=xmax {
        let disc = 4 * form.c as i128 * n - delta * (x as i128) * (x as i128);
        if disc < 0 {
            continue;
        }
        let root = (disc as u128).isqrt() as i128;
        if root * root != disc {
            continue;
        }
        let bx = form.b as i128 * x as i128;
        if (-bx + root) % two_c == 0 {
            count += 1;
        }
        if root != 0 && (-bx - root) % two_c == 0 {
            count += 1;
        }
    }
    count
}

/// Table of `r_Q(n)` for `0 ≤ n ≤ x_max` built by one sweep over the ellipse.
#[derive(Debug, Clone)]
pub struct RepCountTable {
    form: QuadraticForm,
    counts: Vec<u32>,
}

impl RepCountTable {
    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn x_max(&self) -> u64 {
        (self.counts.len() - 1) as u64
    }

    /// `r_Q(n)`; zero for `n = 0`.
    pub fn get(&self, n: u64) -> u64 {
        self.counts.get(n as usize).copied().unwrap_or(0) as u64
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.counts
    }

    pub fn entries(&self) -> impl Iterator<Item = RepCount> + '_ {
        self.counts
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, &c)| RepCount {
                n: n as u64,
                count: c as u64,
            })
    }

    /// `Σ_{1≤n≤x} r_Q(n)`.
    pub fn cumulative(&self, x: u64) -> u64 {
        let end = (x as usize).min(self.counts.len() - 1);
        self.counts[1..=end].iter().map(|&c| c as u64).sum()
    }

    /// Smallest `C` with `|Σ_{n≤x} r_Q(n) − 2πx/√Δ| ≤ C√x` for all real
    /// `1 ≤ x ≤ x_max`.
    pub fn lattice_discrepancy_constant(&self) -> f64 {
        let density = self.form.residue();
        let mut acc = 0u64;
        let mut worst = 0.0f64;
        let last = self.counts.len() - 1;
        for n in 1..=last {
            acc += self.counts[n] as u64;
            let a = acc as f64;
            let x = n as f64;
            worst = worst.max((a - density * x).abs() / x.sqrt());
            if n < last {
                let x1 = x + 1.0;
                worst = worst.max((a - density * x1).abs() / x1.sqrt());
            }
        }
        worst
    }
}

pub fn representation_counts_upto(form: &QuadraticForm, x_max: u64) -> Result<RepCountTable> {
    representation_counts_upto_with_budget(form, x_max, DEFAULT_CAPACITY)
}

pub fn representation_counts_upto_with_budget(
    form: &QuadraticForm,
    x_max: u64,
    budget: u64,
) -> Result<RepCountTable> {
    if x_max == 0 {
        return Err(Error::Contract("x_max must be at least 1".into()));
    }
    if x_max > budget {
        return Err(Error::CapacityExceeded {
            needed: x_max,
            budget,
        });
    }
    let mut counts = vec![0u32; x_max as usize + 1];
    let bound = x_max as i128;
    let xr = form.x_extent(bound);
    for x in -xr..=xr {
        if let Some((lo, hi)) = form.y_range(x, bound) {
            for y in lo..=hi {
                let q = form.eval(x, y);
                if q > 0 {
                    counts[q as usize] += 1;
                }
            }
        }
    }
    Ok(RepCountTable {
        form: *form,
        counts,
    })
}

pub fn enumerate_annulus(form: &QuadraticForm, n_lo: f64, n_hi: f64) -> Result<Vec<LatticePoint>> {
    enumerate_annulus_with_budget(form, n_lo, n_hi, DEFAULT_CAPACITY)
}

/// Lattice points with `n_lo ≤ Q(x, y) ≤ n_hi`, ordered by `x` then `y`.
pub fn enumerate_annulus_with_budget(
    form: &QuadraticForm,
    n_lo: f64,
    n_hi: f64,
    budget: u64,
) -> Result<Vec<LatticePoint>> {
    if !(n_lo > 0.0 && n_lo <= n_hi && n_hi.is_finite()) {
        return Err(Error::Contract(format!(
            "annulus bounds must satisfy 0 < n_lo ≤ n_hi, got [{n_lo}, {n_hi}]"
        )));
    }
    // ceil/floor are exact on f64, so the integer bounds are the exact
    // integer hull of the real interval.
    let lo = n_lo.ceil() as i128;
    let hi = n_hi.floor() as i128;
    if lo > hi {
        return Ok(Vec::new());
    }
    let estimate = form.residue() * hi as f64 + 8.0 * (hi as f64).sqrt() + 8.0;
    if estimate > budget as f64 {
        return Err(Error::CapacityExceeded {
            needed: estimate as u64,
            budget,
        });
    }
    let mut out = Vec::new();
    let xr = form.x_extent(hi);
    for x in -xr..=xr {
        let Some((olo, ohi)) = form.y_range(x, hi) else {
            continue;
        };
        let inner = form.y_range(x, lo - 1);
        let mut push = |y: i64| {
            let v = form.eval(x, y);
            debug_assert!(v >= lo && v <= hi);
            out.push(LatticePoint {
                x,
                y,
                value: v as i64,
            });
        };
        match inner {
            None => (olo..=ohi).for_each(&mut push),
            Some((ilo, ihi)) => {
                (olo..ilo).for_each(&mut push);
                (ihi + 1..=ohi).for_each(&mut push);
            }
        }
    }
    Ok(out)
}
