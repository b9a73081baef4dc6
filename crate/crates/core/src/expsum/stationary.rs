use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ExpSumScenario, Geometry};
use crate::error::{Error, Result};
use crate::special::{e_unit, ComplexValue};

/// Relative agreement required between the two routes to `G_{m,n}(x)`.
pub const G_ROUTE_TOL: f64 = 1e-9;

/// Two-sided window for every `≍` check.
pub const COMPARABILITY_WINDOW: (f64, f64) = (1.0 / 50.0, 50.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryData {
    pub m: u64,
    pub n: i64,
    pub x: f64,
    /// solution of `2mF′_x(y) = n` in `I(x)`
    pub y_star: f64,
    /// `F″_x(y*)`
    pub fxx: f64,
    /// `G_{m,n}(x) = 2mF_x(y*) − n·y*`
    pub g_value: f64,
    /// the same from the closed form
    pub g_closed: f64,
    /// `G″_{m,n}(x)`; infinite where the bracket of `G` vanishes
    pub g_second: f64,
    /// `|2mF′_x(y*) − n|`
    pub residual: f64,
}

/// Solves `2mF′_x(y) = n` by bisection on `L = b*x + 2c*y ≥ 0`, where
/// `F′_x` is strictly decreasing.
pub fn stationary_solve(sc: &ExpSumScenario, m: u64, n: i64, x: f64) -> Result<StationaryData> {
    let g = sc.geometry();
    if m == 0 || !(x > 0.0) || !x.is_finite() {
        return Err(Error::Contract(format!("stationary_solve needs m ≥ 1 and x > 0, got m={m}, x={x}")));
    }
    let mf = m as f64;
    let (lo, hi) = (2.0 * mf * g.a_x(x), 2.0 * mf * g.b_x(x));
    let Some((l_lo, l_hi)) = g.l_range(x) else {
        return Err(Error::NoStationaryPoint { n, lo, hi });
    };
    let nf = n as f64;
    if nf < lo || nf > hi {
        return Err(Error::NoStationaryPoint { n, lo, hi });
    }
    let h = |l: f64| 2.0 * mf * g.f_big_1(x, g.y_of_l(x, l)) - nf;
    let (mut a, mut b) = (l_lo, l_hi);
    // h(a) ≥ 0 ≥ h(b)
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if h(mid) >= 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let l = if h(a).abs() <= h(b).abs() { a } else { b };
    let y = g.y_of_l(x, l);
    let residual = h(l).abs();
    if residual > G_ROUTE_TOL * nf.abs().max(1.0) {
        return Err(Error::RootFindFailure(format!(
            "stationary residual {residual:e} at m={m}, n={n}, x={x}"
        )));
    }
    let g_value = 2.0 * mf * g.f_big(x, y) - nf * y;
    let g_closed = g_closed_form_geom(&g, m, n, x)?;
    let scale = g_value.abs().max(1.0);
    if (g_value - g_closed).abs() > G_ROUTE_TOL * scale {
        return Err(Error::PrecisionExceeded(format!(
            "G routes disagree at m={m}, n={n}, x={x}: {g_value} vs {g_closed}"
        )));
    }
    let g_second = match g_second_geom(&g, m, n, x) {
        Ok(v) => v,
        Err(Error::SingularPoint { .. }) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    Ok(StationaryData {
        m,
        n,
        x,
        y_star: y,
        fxx: g.f_big_2(x, y),
        g_value,
        g_closed,
        g_second,
        residual,
    })
}

fn check_mnx(g: &Geometry, m: u64, n: i64, x: f64) -> Result<()> {
    if m == 0 || !(x > 0.0) || !x.is_finite() {
        return Err(Error::Contract(format!("need m ≥ 1 and x > 0, got m={m}, x={x}")));
    }
    if !(g.nu(m, n) > 0.0) {
        return Err(Error::NoStationaryPoint {
            n,
            lo: 4.0 * m as f64 * g.c * g.r,
            hi: f64::INFINITY,
        });
    }
    Ok(())
}

fn bracket_checked(g: &Geometry, m: u64, n: i64, x: f64) -> Result<f64> {
    check_mnx(g, m, n, x)?;
    let bracket = g.g_bracket(m, n, x);
    if bracket <= 1e-12 * g.lambda_m(m) {
        return Err(Error::SingularPoint { x, bracket });
    }
    Ok(bracket)
}

/// `G_{m,n}(x) = b*nx/(2c*) + (Λ_m − ν^{2/3}|d|^{1/3}x^{2/3})^{3/2}/(2c*)`.
pub fn g_closed_form(sc: &ExpSumScenario, m: u64, n: i64, x: f64) -> Result<f64> {
    g_closed_form_geom(&sc.geometry(), m, n, x)
}

fn g_closed_form_geom(g: &Geometry, m: u64, n: i64, x: f64) -> Result<f64> {
    check_mnx(g, m, n, x)?;
    let bracket = g.g_bracket(m, n, x);
    if bracket < -1e-12 * g.lambda_m(m) {
        return Err(Error::SingularPoint { x, bracket });
    }
    Ok(g.b * n as f64 * x / (2.0 * g.c) + bracket.max(0.0).powf(1.5) / (2.0 * g.c))
}

/// `G″_{m,n}(x) = ν^{2/3}|d|^{1/3}Λ_m / (6c* x^{4/3} √bracket)`.
pub fn g_second_derivative(sc: &ExpSumScenario, m: u64, n: i64, x: f64) -> Result<f64> {
    g_second_geom(&sc.geometry(), m, n, x)
}

fn g_second_geom(g: &Geometry, m: u64, n: i64, x: f64) -> Result<f64> {
    let bracket = bracket_checked(g, m, n, x)?;
    let dd = g.nu(m, n).powf(2.0 / 3.0) * g.d_abs.cbrt();
    Ok(dd * g.lambda_m(m) / (6.0 * g.c * x.powf(4.0 / 3.0) * bracket.sqrt()))
}

/// The printed variant `−D(Dx^{2/3} + Λ_m)/(6c* x^{4/3} √bracket)`; it is not
/// the second derivative of the closed form and is kept for comparison.
pub fn g_second_printed(sc: &ExpSumScenario, m: u64, n: i64, x: f64) -> Result<f64> {
    let g = sc.geometry();
    let bracket = bracket_checked(&g, m, n, x)?;
    let dd = g.nu(m, n).powf(2.0 / 3.0) * g.d_abs.cbrt();
    Ok(-dd * (dd * x.powf(2.0 / 3.0) + g.lambda_m(m)) / (6.0 * g.c * x.powf(4.0 / 3.0) * bracket.sqrt()))
}

/// Richardson-extrapolated central second difference of the closed-form `G`,
/// with the step halved until successive estimates settle.
pub fn g_second_finite_difference(sc: &ExpSumScenario, m: u64, n: i64, x: f64) -> Result<f64> {
    let g = sc.geometry();
    bracket_checked(&g, m, n, x)?;
    let room = (g.x_critical(m, n) - x).min(x);
    let gg = |x: f64| g_closed_form_geom(&g, m, n, x);
    let second = |h: f64| -> Result<f64> { Ok((gg(x + h)? - 2.0 * gg(x)? + gg(x - h)?) / (h * h)) };
    let mut h = room / 4.0;
    let mut prev_d = second(h)?;
    let mut prev_r = f64::NAN;
    let mut best = (f64::INFINITY, f64::NAN);
    for _ in 0..12 {
        h *= 0.5;
        let d = second(h)?;
        let r = (4.0 * d - prev_d) / 3.0;
        if prev_r.is_finite() {
            let change = (r - prev_r).abs();
            if change < best.0 {
                best = (change, r);
            }
        }
        prev_d = d;
        prev_r = r;
    }
    Ok(best.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn len(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }

    pub fn is_empty(&self) -> bool {
        !(self.hi >= self.lo)
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }
}

/// One piece of the δ-splitting: `S_m(n)` when `delta` is `None`,
/// `S_m(n, δ)` otherwise; both half-open on the left. For `n ∈ J′_m` the
/// single piece is all of `[A_m(n), B_m(n)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SPiece {
    pub delta: Option<f64>,
    pub lo: f64,
    pub hi: f64,
}

/// Intervals of the rearranged dual sum for a fixed `(m, n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSplit {
    pub m: u64,
    pub n: i64,
    pub nu: f64,
    /// `A_m(n)`
    pub a_big: f64,
    /// `B_m(n)`
    pub b_big: f64,
    /// `X_c`, the right end of `S_m(n)`
    pub x_critical: f64,
    /// exact hull `[4c*mr, 4c*mr + 4c*mP/√N]` of the `n` with a stationary point
    pub jm: Interval,
    /// the printed `J_m`, right end `4c*mr + 2c*mPN′/N^{3/2}`
    pub jm_printed: Interval,
    /// whether the printed `J_m` contains the hull
    pub jm_printed_covers: bool,
    /// `J′_m = [4c*mr, 4c*mr + c*mP/√N′)`
    pub jm_prime: Interval,
    /// `J″_m = J_m \ J′_m`
    pub jm_doubleprime: Interval,
    pub in_jm_prime: bool,
    /// `|J_m| / (mK^{1/2}/N^{1/2})`
    pub jm_ratio: f64,
    pub pieces: Vec<SPiece>,
    pub max_delta: f64,
    /// pieces cover `[A_m(n), B_m(n)]`
    pub covers: bool,
    /// `[A_m(n), B_m(n)]` is empty; valid, only flagged
    pub empty: bool,
}

impl DomainSplit {
    pub fn x_interval(&self) -> Interval {
        Interval {
            lo: self.a_big,
            hi: self.b_big,
        }
    }
}

fn jm_intervals(g: &Geometry, m: u64) -> (Interval, Interval, Interval) {
    let (mf, c, p) = (m as f64, g.c, g.p);
    let base = 4.0 * c * mf * g.r;
    let hull = Interval {
        lo: base,
        hi: base + 4.0 * c * mf * p / g.n.sqrt(),
    };
    let printed = Interval {
        lo: base,
        hi: base + 2.0 * c * mf * p * g.n_prime / g.n.powf(1.5),
    };
    let prime = Interval {
        lo: base,
        hi: base + c * mf * p / g.n_prime.sqrt(),
    };
    (hull, printed, prime)
}

pub fn domain_split(sc: &ExpSumScenario, m: u64, n: i64) -> Result<DomainSplit> {
    sc.validate()?;
    if m == 0 {
        return Err(Error::Contract("domain_split needs m ≥ 1".into()));
    }
    let g = sc.geometry();
    let mf = m as f64;
    let nu = g.nu(m, n);
    let (jm, jm_printed, jm_prime) = jm_intervals(&g, m);
    let jm_doubleprime = Interval {
        lo: jm_prime.hi,
        hi: jm.hi,
    };
    let mpd = mf * g.p * g.d_abs;
    let (a_big, b_big, x_critical) = if nu > 0.0 {
        let xc = g.x_critical(m, n);
        let a = nu.sqrt() * g.n.powf(0.75) / mpd.sqrt();
        let b = g.x_max().min(nu.sqrt() * g.n_prime.powf(0.75) / mpd.sqrt()).min(xc);
        (a, b, xc)
    } else {
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY)
    };
    let empty = !(a_big <= b_big);
    let mut pieces = Vec::new();
    let mut max_delta: f64 = 0.0;
    let mut covers = empty;
    let in_jm_prime = (n as f64) >= jm_prime.lo && (n as f64) < jm_prime.hi;
    if !empty && in_jm_prime {
        // G″ has one size on all of [A, B]; no splitting
        pieces.push(SPiece {
            delta: None,
            lo: a_big,
            hi: b_big,
        });
        covers = true;
    } else if !empty {
        let clip = |lo: f64, hi: f64| (lo.max(a_big), hi.min(b_big));
        let (lo, hi) = clip(x_critical - 1.0, x_critical);
        if lo <= hi {
            pieces.push(SPiece { delta: None, lo, hi });
        }
        let mut delta: f64 = 1.0;
        while x_critical - delta > a_big && delta < 1e18 {
            let (lo, hi) = clip(x_critical - 2.0 * delta, x_critical - delta);
            if lo <= hi {
                pieces.push(SPiece { delta: Some(delta), lo, hi });
                max_delta = max_delta.max(delta);
            }
            delta *= 2.0;
        }
        pieces.reverse();
        covers = x_critical - delta <= a_big;
    }
    Ok(DomainSplit {
        m,
        n,
        nu,
        a_big,
        b_big,
        x_critical,
        jm,
        jm_printed,
        jm_printed_covers: jm_printed.hi >= jm.hi,
        jm_prime,
        jm_doubleprime,
        in_jm_prime,
        jm_ratio: jm.len() / (mf * sc.big_k.sqrt() / sc.n.sqrt()),
        pieces,
        max_delta,
        covers,
        empty,
    })
}

/// Whether `2m·a(x) ≤ n ≤ 2m·b(x)`.
pub fn primal_member(g: &Geometry, m: u64, n: i64, x: f64) -> bool {
    let mf = 2.0 * m as f64;
    let nf = n as f64;
    nf >= mf * g.a_x(x) && nf <= mf * g.b_x(x)
}

/// `e(G_{m,n}(x)) / √(2m|F″_x(y*)|)`, from the closed-form stationary point;
/// zero where `F″` vanishes.
fn dual_term(g: &Geometry, m: u64, n: i64, x: f64) -> Complex64 {
    let mf = m as f64;
    let nu = g.nu(m, n);
    let q = (mf * g.p * g.d_abs * x * x / nu).powf(2.0 / 3.0);
    let l = (4.0 * g.c * q - g.d_abs * x * x).max(0.0).sqrt();
    let fxx = 3.0 * g.p * g.d_abs * x * x * l / (4.0 * q.powf(2.5));
    if fxx == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let bracket = g.g_bracket(m, n, x).max(0.0);
    let gv = g.b * n as f64 * x / (2.0 * g.c) + bracket.powf(1.5) / (2.0 * g.c);
    e_unit(gv) / (2.0 * mf * fxx).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReorderCheck {
    pub m: u64,
    /// `Σ_{x∈J} Σ_{2ma(x)≤n≤2mb(x)} w·e(G)`
    pub lhs: ComplexValue,
    /// `Σ_{n∈J_m} Σ_{A_m(n)≤x≤B_m(n)} w·e(G)`
    pub rhs: ComplexValue,
    pub equal: bool,
    pub terms: usize,
    /// `Σ |w|`, the scale of the relative comparison
    pub scale: f64,
    /// lattice `x` where `[A_m(n), B_m(n)]` and the primal predicate disagree
    pub closed_form_mismatches: usize,
    /// whether every `n` met on the left lies in the printed `J_m`
    pub jm_printed_covers: bool,
}

/// Relative tolerance of the reorder identity.
pub const REORDER_TOL: f64 = 1e-10;

/// Both sides of the rearrangement, with membership decided by the primal
/// predicate on each side, so that the two sums share their terms exactly.
pub fn reorder_identity_check(sc: &ExpSumScenario, m: u64) -> Result<ReorderCheck> {
    sc.validate()?;
    if m == 0 {
        return Err(Error::Contract("reorder check needs m ≥ 1".into()));
    }
    let g = sc.geometry();
    let mf = m as f64;
    let x_top = g.x_max().floor() as i64;
    let (jm, jm_printed, _) = jm_intervals(&g, m);
    // x = 0 is excluded: F″ vanishes on the axis
    let mut lhs = Complex64::new(0.0, 0.0);
    let mut terms = 0;
    let mut scale = 0.0;
    let mut printed_covers = true;
    for x in 1..=x_top {
        let xf = x as f64;
        let lo = (2.0 * mf * g.a_x(xf)).ceil() as i64;
        let hi = (2.0 * mf * g.b_x(xf)).floor() as i64;
        for n in lo..=hi {
            if !primal_member(&g, m, n, xf) {
                continue;
            }
            let term = dual_term(&g, m, n, xf);
            lhs += term;
            terms += 1;
            scale += term.norm();
            printed_covers &= jm_printed.contains(n as f64);
        }
    }
    let mut rhs = Complex64::new(0.0, 0.0);
    let mut mismatches = 0;
    for n in (jm.lo.floor() as i64 - 1)..=(jm.hi.ceil() as i64 + 1) {
        let split = domain_split(sc, m, n)?;
        let (xa, xb) = if split.empty {
            (1, 0)
        } else {
            ((split.a_big.floor() as i64 - 2).max(1), (split.b_big.ceil() as i64 + 2).min(x_top))
        };
        for x in 1..=x_top {
            let xf = x as f64;
            let member = primal_member(&g, m, n, xf);
            let closed = !split.empty && xf >= split.a_big && xf <= split.b_big;
            if member != closed {
                mismatches += 1;
            }
            if x >= xa && x <= xb && member {
                rhs += dual_term(&g, m, n, xf);
            }
        }
    }
    Ok(ReorderCheck {
        m,
        lhs,
        rhs,
        equal: (lhs - rhs).norm() <= REORDER_TOL * scale.max(f64::MIN_POSITIVE),
        terms,
        scale,
        closed_form_mismatches: mismatches,
        jm_printed_covers: printed_covers,
    })
}

/// Random `(m, n, x)` with `x ∈ (0, x_max]` and `n ∈ [2ma(x), 2mb(x)]`.
pub fn sample_admissible(sc: &ExpSumScenario, count: usize, m_max: u64, seed: u64) -> Vec<(u64, i64, f64)> {
    let g = sc.geometry();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < 1000 * count.max(1) {
        attempts += 1;
        let m = rng.gen_range(1..=m_max.max(1));
        let x = rng.gen_range(0.05..=1.0) * g.x_max();
        let lo = (2.0 * m as f64 * g.a_x(x)).ceil() as i64;
        let hi = (2.0 * m as f64 * g.b_x(x)).floor() as i64;
        if lo > hi {
            continue;
        }
        let n = rng.gen_range(lo..=hi);
        out.push((m, n, x));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowCheck {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
}

impl WindowCheck {
    fn from_values(name: &str, values: &[f64]) -> Self {
        let (lower, upper) = COMPARABILITY_WINDOW;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        WindowCheck {
            name: name.into(),
            min,
            max,
            count: values.len(),
            lower,
            upper,
            pass: !values.is_empty() && min >= lower && max <= upper,
        }
    }
}

/// Fraction of each range kept away from the degenerate edges when sampling.
pub const BULK_MARGIN: f64 = 0.25;

/// Two-sided ratio checks of the `≍` statements on one scenario.
///
/// `F″` vanishes on the axis `x = 0` and on the curve `L = 0`, so its
/// samples are taken on the central `1 − 2·BULK_MARGIN` of both ranges.
pub fn asymptotic_windows(sc: &ExpSumScenario, m_max: u64, grid: usize) -> Result<Vec<WindowCheck>> {
    sc.validate()?;
    let g = sc.geometry();
    let (kk, nn) = (sc.big_k, sc.n);
    let grid = grid.max(2);
    let frac = |i: usize| BULK_MARGIN + (1.0 - 2.0 * BULK_MARGIN) * i as f64 / (grid - 1) as f64;

    let mut fxx = Vec::new();
    for i in 0..grid {
        let x = frac(i) * g.x_max();
        let Some((l_lo, l_hi)) = g.l_range(x) else { continue };
        for j in 0..grid {
            let l = l_lo + frac(j) * (l_hi - l_lo);
            let y = g.y_of_l(x, l);
            fxx.push(g.f_big_2(x, y).abs() * nn / kk.sqrt());
        }
    }

    let per_m: Vec<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> = (1..=m_max)
        .into_par_iter()
        .map(|m| -> Result<_> {
            let mf = m as f64;
            let (jm, _, jm_prime) = jm_intervals(&g, m);
            let mut gp = Vec::new();
            let mut gd = Vec::new();
            let mut xs = Vec::new();
            for n in (jm.lo.ceil() as i64)..=(jm.hi.floor() as i64) {
                let split = domain_split(sc, m, n)?;
                if split.empty || !(split.nu > 0.0) {
                    continue;
                }
                let (a, b) = (split.a_big, split.b_big);
                let in_prime = (n as f64) < jm_prime.hi;
                for i in 0..grid {
                    let x = a + (b - a) * i as f64 / (grid - 1) as f64;
                    if !(x > 0.0) {
                        continue;
                    }
                    if in_prime {
                        if let Ok(v) = g_second_derivative(sc, m, n, x) {
                            gp.push(v * nn / (mf * kk.sqrt()));
                        }
                    } else {
                        xs.push(x / nn.sqrt());
                    }
                }
                if !in_prime {
                    for piece in split.pieces.iter().filter(|p| p.delta.is_some()) {
                        let delta = piece.delta.unwrap();
                        for i in 0..grid {
                            // left-open piece: stay strictly inside
                            let x = piece.lo + (piece.hi - piece.lo) * (i as f64 + 0.5) / grid as f64;
                            if let Ok(v) = g_second_derivative(sc, m, n, x) {
                                gd.push(v * delta.sqrt() * nn.powf(0.75) / (mf * kk.sqrt()));
                            }
                        }
                    }
                }
            }
            let jm_ratio = vec![jm.len() / (mf * kk.sqrt() / nn.sqrt())];
            Ok((gp, gd, xs, jm_ratio))
        })
        .collect::<Result<_>>()?;
    let mut gp = Vec::new();
    let mut gd = Vec::new();
    let mut xs = Vec::new();
    let mut jr = Vec::new();
    for (a, b, c, d) in per_m {
        gp.extend(a);
        gd.extend(b);
        xs.extend(c);
        jr.extend(d);
    }
    Ok(vec![
        WindowCheck::from_values("F''_x(y) ~ K^(1/2)/N", &fxx),
        WindowCheck::from_values("G'' ~ mK^(1/2)/N on J'_m", &gp),
        WindowCheck::from_values("G'' ~ mK^(1/2)/(delta^(1/2)N^(3/4)) on S_m(n,delta)", &gd),
        WindowCheck::from_values("x ~ N^(1/2) on J''_m", &xs),
        WindowCheck::from_values("|J_m| ~ mK^(1/2)/N^(1/2)", &jr),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expsum::tests::desk;

    #[test]
    fn stationary_residual_and_routes() {
        let sc = desk(64.0, 128.0);
        for (m, n, x) in sample_admissible(&sc, 200, 8, 1) {
            let s = stationary_solve(&sc, m, n, x).unwrap();
            assert!(s.residual <= 1e-9 * (n as f64).abs().max(1.0));
            assert!((s.g_value - s.g_closed).abs() <= 1e-9 * s.g_value.abs().max(1.0));
            assert!(s.fxx < 0.0);
        }
    }

    #[test]
    fn no_stationary_point_outside_range() {
        let sc = desk(64.0, 128.0);
        let g = sc.geometry();
        let x = 6.0;
        let hi = (2.0 * g.b_x(x)).floor() as i64 + 3;
        assert!(matches!(stationary_solve(&sc, 1, hi, x), Err(Error::NoStationaryPoint { .. })));
    }

    #[test]
    fn printed_g_second_disagrees_with_finite_difference() {
        let sc = desk(64.0, 128.0);
        let (m, n, x) = sample_admissible(&sc, 1, 4, 3)[0];
        let fd = g_second_finite_difference(&sc, m, n, x).unwrap();
        let exact = g_second_derivative(&sc, m, n, x).unwrap();
        let printed = g_second_printed(&sc, m, n, x).unwrap();
        assert!((fd - exact).abs() <= 1e-6 * exact.abs());
        assert!((fd - printed).abs() > 0.5 * exact.abs());
    }

    #[test]
    fn split_partitions_and_covers() {
        let sc = desk(64.0, 128.0);
        for m in 1..6 {
            let (jm, _, _) = jm_intervals(&sc.geometry(), m);
            for n in (jm.lo.ceil() as i64)..=(jm.hi.floor() as i64) {
                let s = domain_split(&sc, m, n).unwrap();
                assert_eq!(s.jm_prime.lo, s.jm.lo);
                assert_eq!(s.jm_prime.hi, s.jm_doubleprime.lo);
                assert_eq!(s.jm_doubleprime.hi, s.jm.hi);
                assert!(s.covers);
                // δ ≤ X_c − A, which reaches about 3.5√N at the left end of J″_m
                assert!(s.max_delta <= 4.0 * sc.n.sqrt() || s.empty, "{s:?}");
                assert!(s.empty || s.max_delta <= (s.x_critical - s.a_big).max(0.0));
            }
        }
    }

    #[test]
    fn reorder_identity_small() {
        let sc = desk(64.0, 128.0);
        for m in 1..5 {
            let r = reorder_identity_check(&sc, m).unwrap();
            assert!(r.equal, "{r:?}");
            assert_eq!(r.closed_form_mismatches, 0);
        }
    }
}
