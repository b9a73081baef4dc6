use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;
use zeta_gaps::epstein::{ApproxParams, EpsteinZeta, Method};
use zeta_gaps::expsum::{
    asymptotic_windows, bound_report, bprocess_standard_suite, bprocess_suite, reorder_identity_check,
    vdc_standard_suite, vdc_suite, weyl_suite, BProcessSuite, BoundReport, ExpSumScenario, ReorderCheck, WeylSuite,
    WindowCheck, REORDER_TOL,
};
use zeta_gaps::hardy::{gap_report, GapLaw, Hardy};
use zeta_gaps::qform::{validate_form, QuadraticForm};

use crate::config::RunConfig;

/// Failure of a command, split by exit status.
#[derive(Debug)]
pub enum Failure {
    /// bad arguments; exit 2
    Usage(String),
    /// error raised by the library; exit 1
    Domain(String),
}

impl From<zeta_gaps::Error> for Failure {
    fn from(e: zeta_gaps::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

pub type Outcome = Result<String, Failure>;

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

pub fn parse_form(text: &str) -> Result<QuadraticForm, Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return usage(format!("--form expects a,b,c, got `{text}`"));
    }
    let mut v = [0i64; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| Failure::Usage(format!("--form: `{p}` is not an integer")))?;
    }
    Ok(validate_form(v[0], v[1], v[2])?)
}

pub fn parse_complex(text: &str) -> Result<Complex64, Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| Failure::Usage(format!("--s: `{p}` is not a number")));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => usage(format!("--s expects re,im, got `{text}`")),
    }
}

pub fn parse_methods(text: &str) -> Result<Vec<Method>, Failure> {
    text.split(',')
        .map(|m| match m.trim() {
            "direct" => Ok(Method::Direct),
            "theta" => Ok(Method::Theta),
            "approx" => Ok(Method::Approx),
            other => usage(format!("unknown method `{other}`; use direct, theta or approx")),
        })
        .collect()
}

/// `e:c` or `e:c:p` for the window `c·T^e·(log T)^p`.
pub fn parse_laws(text: &str) -> Result<Vec<GapLaw>, Failure> {
    text.split(',')
        .map(|spec| {
            let nums: Vec<f64> = spec
                .split(':')
                .map(|p| p.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| Failure::Usage(format!("bad law `{spec}`; use e:c or e:c:p")))?;
            match nums.as_slice() {
                [e, c] => Ok(GapLaw::new(spec.trim(), *e, *c)),
                [e, c, p] => Ok(GapLaw::new(spec.trim(), *e, *c).with_log_power(*p)),
                _ => usage(format!("bad law `{spec}`; use e:c or e:c:p")),
            }
        })
        .collect()
}

pub fn default_laws() -> Vec<GapLaw> {
    vec![
        GapLaw::new("1/2", 0.5, 1.0),
        GapLaw::new("5/11", 5.0 / 11.0, 1.0),
        GapLaw::new("3/7", 3.0 / 7.0, 1.0),
    ]
}

pub enum XCutoff {
    Auto,
    Value(f64),
}

pub fn parse_x(text: &str) -> Result<XCutoff, Failure> {
    if text == "auto" {
        return Ok(XCutoff::Auto);
    }
    text.parse()
        .map(XCutoff::Value)
        .map_err(|_| Failure::Usage(format!("--X expects a number or `auto`, got `{text}`")))
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Direct => "direct",
        Method::Theta => "theta",
        Method::Approx => "approx",
    }
}

/// CSV `method,re,im,err_estimate,n_max,x_cutoff`.
pub fn eval(cfg: &RunConfig, form: QuadraticForm, s: Complex64, methods: &[Method], x: &XCutoff) -> Outcome {
    let zeta = EpsteinZeta::new(form);
    let mut out = String::from("method,re,im,err_estimate,n_max,x_cutoff\n");
    for &m in methods {
        let (res, n_max, x_cut) = match m {
            Method::Direct => (zeta.dirichlet_series_eval(s, cfg.n_max)?, Some(cfg.n_max), None),
            Method::Theta => (zeta.theta_continuation_eval(s)?, None, None),
            Method::Approx => {
                let params = match *x {
                    XCutoff::Auto => ApproxParams::cubic(s.im)?,
                    XCutoff::Value(v) => ApproxParams::new(v, s.im)?,
                };
                (zeta.approx_eval(s, &params)?, None, Some(params.x_cutoff))
            }
        };
        writeln!(
            out,
            "{},{:e},{:e},{:e},{},{}",
            method_name(m),
            res.value.re,
            res.value.im,
            res.err_estimate,
            n_max.map_or(String::new(), |n| n.to_string()),
            x_cut.map_or(String::new(), |v| format!("{v:e}")),
        )
        .unwrap();
    }
    Ok(out)
}

/// Zero table, then the gap-law table after a blank line when `laws` is set.
pub fn zeros(cfg: &RunConfig, form: QuadraticForm, from: f64, to: f64, step: Option<f64>, laws: Option<&[GapLaw]>) -> Outcome {
    if !(from < to) {
        return usage(format!("--from {from} must be below --to {to}"));
    }
    if let Some(s) = step {
        if !(s > 0.0) {
            return usage(format!("--step must be positive, got {s}"));
        }
    }
    let hardy = Hardy::new(form);
    let zeros = match step.or(cfg.scan_step) {
        Some(s) => hardy.sign_change_scan(from, to, s)?,
        None => hardy.scan_default(from, to)?,
    };
    let mut out = String::from("gamma,t_lo,t_hi,w_residual\n");
    for z in &zeros {
        writeln!(out, "{:.12},{:.12},{:.12},{:e}", z.gamma, z.t_lo, z.t_hi, z.w_residual).unwrap();
    }
    if let Some(laws) = laws {
        let gammas: Vec<f64> = zeros.iter().map(|z| z.gamma).collect();
        let report = gap_report(&gammas, laws)?;
        out.push_str("\nlaw,exponent,constant,log_power,checked,passed,max_gap,first_violation_lo,first_violation_hi\n");
        for c in &report.law_checks {
            let (lo, hi) = c
                .first_violation
                .map_or((String::new(), String::new()), |(a, b)| (format!("{a:.12}"), format!("{b:.12}")));
            writeln!(
                out,
                "{},{},{},{},{},{},{:.12},{},{}",
                c.name, c.exponent, c.constant, c.log_power, c.checked, c.passed, report.max_gap, lo, hi
            )
            .unwrap();
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct CsvRow {
    header: String,
    row: String,
}

#[derive(Serialize)]
struct ReorderRow {
    #[serde(flatten)]
    check: ReorderCheck,
    tolerance: f64,
}

#[derive(Serialize)]
struct ScenarioReport {
    scenario: ExpSumScenario,
    bound_report: BoundReport,
    bound_report_csv: CsvRow,
    reorder: Vec<ReorderRow>,
    reorder_all_equal: bool,
    windows: Vec<WindowCheck>,
}

pub fn expsum_scenario(cfg: &RunConfig, text: &str) -> Outcome {
    let sc = ExpSumScenario::from_json(text)?;
    let bound = bound_report(&sc)?;
    let reorder = (1..=cfg.m_max)
        .map(|m| {
            Ok(ReorderRow {
                check: reorder_identity_check(&sc, m)?,
                tolerance: REORDER_TOL,
            })
        })
        .collect::<Result<Vec<_>, zeta_gaps::Error>>()?;
    let report = ScenarioReport {
        bound_report_csv: CsvRow {
            header: BoundReport::csv_header(),
            row: bound.csv_row(),
        },
        bound_report: bound,
        reorder_all_equal: reorder.iter().all(|r| r.check.equal),
        reorder,
        windows: asymptotic_windows(&sc, cfg.m_max, cfg.window_grid)?,
        scenario: sc,
    };
    Ok(serde_json::to_string_pretty(&report).expect("report serializes") + "\n")
}

#[derive(Serialize)]
struct VdcSummary {
    phases: usize,
    max_ratio: f64,
    ratio_limit: f64,
}

#[derive(Serialize)]
struct LemmaReport {
    seed: u64,
    weyl: Vec<WeylSuite>,
    bprocess: BProcessSuite,
    vdc: VdcSummary,
}

pub fn expsum_lemmas(cfg: &RunConfig) -> Outcome {
    let weyl = vec![
        weyl_suite(cfg.trials, cfg.seed, 1)?,
        weyl_suite(cfg.trials, cfg.seed, 2)?,
    ];
    let bprocess = bprocess_suite(&bprocess_standard_suite(cfg.bprocess_constant))?;
    let vdc = vdc_suite(&vdc_standard_suite())?;
    let report = LemmaReport {
        seed: cfg.seed,
        weyl,
        bprocess,
        vdc: VdcSummary {
            phases: vdc.phases,
            max_ratio: vdc.max_ratio,
            ratio_limit: 10.0,
        },
    };
    Ok(serde_json::to_string_pretty(&report).expect("report serializes") + "\n")
}
