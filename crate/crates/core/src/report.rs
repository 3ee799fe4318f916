//! Deterministic JSON and CSV emission for solver outputs.
//!
//! Floats are always printed as `{:.16e}` (17 significant digits) and
//! object keys keep insertion order, so identical inputs give
//! byte-identical documents. CSV follows RFC 4180: CRLF row ends, a
//! mandatory header, quoting only where required.

use crate::barriers::{BreakReport, MarginReport, SubSolutionSpec, SuperSolutionSpec};
use crate::conformal::{ClassKind, ClassificationResult};
use crate::eigen::{
    Certificate, EigenMethod, EigenReport, RatioRegime, SharpnessReport, UpperBound, Verdict,
};
use crate::error::{Error, Result};
use crate::geometry::DecayReport;
use crate::num::Scalar;
use crate::yamabe_radial::{boundary_rate_fit, BlowupSolution};

/// JSON document tree with insertion-ordered object keys.
#[derive(Debug, Clone)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

/// The one float format used everywhere: 17 significant digits.
pub fn format_float<T: Scalar>(x: T) -> String {
    format!("{:.16e}", x.to_f64().unwrap_or(f64::NAN))
}

impl Json {
    pub fn num<T: Scalar>(x: T) -> Json {
        Json::Num(x.to_f64().unwrap_or(f64::NAN))
    }

    pub fn numbers<T: Scalar>(xs: &[T]) -> Json {
        Json::Arr(xs.iter().map(|&x| Json::num(x)).collect())
    }

    pub fn opt_num<T: Scalar>(x: Option<T>) -> Json {
        x.map_or(Json::Null, Json::num)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out);
        out
    }

    fn write(&self, out: &mut String) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => out.push_str(&i.to_string()),
            Json::Num(x) => {
                if x.is_finite() {
                    out.push_str(&format!("{x:.16e}"));
                } else {
                    // JSON has no token for these; null keeps documents valid.
                    out.push_str("null");
                }
            }
            Json::Str(s) => write_json_string(s, out),
            Json::Arr(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    item.write(out);
                }
                out.push(']');
            }
            Json::Obj(fields) => {
                out.push('{');
                for (i, (key, value)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    write_json_string(key, out);
                    out.push(':');
                    value.write(out);
                }
                out.push('}');
            }
        }
    }
}

fn write_json_string(s: &str, out: &mut String) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Assembles an RFC 4180 document: header plus rows, CRLF-terminated.
pub fn csv_document(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(
        &header
            .iter()
            .map(|h| csv_field(h))
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push_str("\r\n");
    for row in rows {
        out.push_str(
            &row.iter()
                .map(|f| csv_field(f))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push_str("\r\n");
    }
    out
}

/// Node table of a blow-up solve: radius, solution, regular variable,
/// converged equation residual.
pub fn blowup_csv<T: Scalar>(sol: &BlowupSolution<T>) -> String {
    let rows: Vec<Vec<String>> = (0..sol.grid.len())
        .map(|i| {
            vec![
                format_float(sol.grid[i]),
                format_float(sol.u[i]),
                format_float(sol.v[i]),
                format_float(sol.residuals[i]),
            ]
        })
        .collect();
    csv_document(&["r", "u", "v", "residual"], &rows)
}

/// Headline numbers of a blow-up solve.
pub fn blowup_summary<T: Scalar>(sol: &BlowupSolution<T>) -> Result<Json> {
    let fitted = boundary_rate_fit(sol)?;
    Ok(Json::Obj(vec![
        ("half_width".into(), Json::num(sol.half_width())),
        ("n".into(), Json::Int(sol.dim().n() as i64)),
        ("center_value".into(), Json::num(sol.eval_u(T::zero())?)),
        ("boundary_coeff".into(), Json::num(sol.boundary_coeff)),
        ("fitted_exponent".into(), Json::num(fitted)),
        ("residual_norm".into(), Json::num(sol.residual)),
        ("grid_size".into(), Json::Int(sol.grid.len() as i64)),
    ]))
}

fn method_tag(m: EigenMethod) -> &'static str {
    match m {
        EigenMethod::SturmBisection => "sturm_bisection",
        EigenMethod::ClosedForm => "closed_form",
        EigenMethod::RayleighBound => "rayleigh_bound",
    }
}

pub fn verdict_tag(v: Verdict) -> &'static str {
    match v {
        Verdict::NegativeCertified => "negative_certified",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn regime_tag(r: RatioRegime) -> &'static str {
    match r {
        RatioRegime::RatioHolds => "ratio_holds",
        RatioRegime::RatioFails => "ratio_fails",
    }
}

pub fn eigen_report_json<T: Scalar>(report: &EigenReport<T>) -> Json {
    Json::Obj(vec![
        // The solver works on the radial reduction; say so in the output.
        ("quantity".into(), Json::Str("radial_first_eigenvalue".into())),
        ("lambda".into(), Json::num(report.lambda)),
        ("method".into(), Json::Str(method_tag(report.method).into())),
        ("grid_size".into(), Json::Int(report.grid_size as i64)),
        ("error_estimate".into(), Json::num(report.error_estimate)),
        ("grid".into(), Json::numbers(&report.grid)),
        ("eigenfunction".into(), Json::numbers(&report.eigenfunction)),
    ])
}

pub fn certificate_json<T: Scalar>(cert: &Certificate<T>) -> Json {
    Json::Obj(vec![
        ("verdict".into(), Json::Str(verdict_tag(cert.verdict).into())),
        ("ratio".into(), Json::num(cert.ratio)),
        ("sinh2_bound".into(), Json::num(cert.sinh2_bound)),
        (
            "scalar_condition_ok".into(),
            Json::Bool(cert.scalar_condition_ok),
        ),
        ("lambda_upper".into(), Json::opt_num(cert.lambda_upper)),
        ("lambda_numeric".into(), Json::opt_num(cert.lambda_numeric)),
    ])
}

pub fn upper_bound_json<T: Scalar>(ub: &UpperBound<T>) -> Json {
    Json::Obj(vec![
        ("bound".into(), Json::num(ub.bound)),
        ("regime".into(), Json::Str(regime_tag(ub.regime).into())),
        ("sharp".into(), Json::num(ub.sharp)),
        ("inner_volume".into(), Json::num(ub.inner_volume)),
        ("shell_volume".into(), Json::num(ub.shell_volume)),
        ("outer_volume".into(), Json::num(ub.outer_volume)),
        ("ratio".into(), Json::num(ub.ratio)),
        ("sinh2_bound".into(), Json::num(ub.sinh2_bound)),
        ("h0".into(), Json::num(ub.h0)),
    ])
}

pub fn sharpness_json<T: Scalar>(s: &SharpnessReport<T>) -> Json {
    Json::Obj(vec![
        ("beta".into(), Json::num(s.beta)),
        ("scal".into(), Json::num(s.scal)),
        ("lambda_numeric".into(), Json::num(s.lambda_numeric)),
        ("lower_bound".into(), Json::num(s.lower_bound)),
        ("volume_ratio".into(), Json::num(s.volume_ratio)),
        ("c_fit".into(), Json::num(s.c_fit)),
        ("fit_exponent".into(), Json::num(s.fit_exponent)),
    ])
}

fn break_json<T: Scalar>(b: &BreakReport<T>) -> Json {
    Json::Obj(vec![
        ("location".into(), Json::num(b.location)),
        ("left_slope".into(), Json::num(b.left)),
        ("right_slope".into(), Json::num(b.right)),
        ("pass".into(), Json::Bool(b.pass)),
    ])
}

fn margin_fields<T: Scalar>(margin: &MarginReport<T>, breaks: &[BreakReport<T>]) -> Vec<(String, Json)> {
    vec![
        ("worst_margin".into(), Json::num(margin.worst)),
        ("worst_margin_at".into(), Json::num(margin.at)),
        (
            "piece_margins".into(),
            Json::numbers(&margin.per_piece_worst),
        ),
        (
            "transmission".into(),
            Json::Arr(breaks.iter().map(break_json).collect()),
        ),
    ]
}

pub fn subsolution_json<T: Scalar>(
    spec: &SubSolutionSpec<T>,
    margin: &MarginReport<T>,
    breaks: &[BreakReport<T>],
) -> Json {
    let mut fields = vec![
        ("kind".into(), Json::Str("sub_solution".into())),
        ("n".into(), Json::Int(spec.dim().n() as i64)),
        ("alpha".into(), Json::num(spec.alpha)),
        ("beta".into(), Json::num(spec.beta)),
        ("theta".into(), Json::num(spec.theta)),
        ("delta".into(), Json::num(spec.delta)),
        ("r_theta".into(), Json::num(spec.r_theta)),
        ("r_delta".into(), Json::num(spec.r_delta)),
        ("tail_constant".into(), Json::num(spec.big_c)),
        ("tail_amplitude".into(), Json::num(spec.amplitude)),
    ];
    fields.extend(margin_fields(margin, breaks));
    Json::Obj(fields)
}

pub fn supersolution_json<T: Scalar>(
    spec: &SuperSolutionSpec<T>,
    margin: &MarginReport<T>,
    breaks: &[BreakReport<T>],
) -> Json {
    let mut fields = vec![
        ("kind".into(), Json::Str("super_solution".into())),
        ("n".into(), Json::Int(spec.dim().n() as i64)),
        ("alpha".into(), Json::num(spec.alpha)),
        ("amplitude".into(), Json::num(spec.a)),
        ("switch_radius".into(), Json::num(spec.r_switch)),
    ];
    fields.extend(margin_fields(margin, breaks));
    Json::Obj(fields)
}

pub fn decay_report_json<T: Scalar>(report: &DecayReport<T>) -> Json {
    Json::Obj(vec![
        ("alpha".into(), Json::num(report.alpha)),
        ("order".into(), Json::Int(report.order as i64)),
        ("pass".into(), Json::Bool(report.pass)),
        (
            "components".into(),
            Json::Arr(
                report
                    .fits
                    .iter()
                    .map(|f| {
                        Json::Obj(vec![
                            ("label".into(), Json::Str(f.label.clone())),
                            ("order".into(), Json::Int(f.order as i64)),
                            ("rate".into(), Json::num(f.rate)),
                            ("envelope".into(), Json::num(f.envelope)),
                            ("early".into(), Json::num(f.early)),
                            ("late".into(), Json::num(f.late)),
                            ("pass".into(), Json::Bool(f.pass)),
                        ])
                    })
                    .collect(),
            ),
        ),
    ])
}

fn class_tag(kind: ClassKind) -> &'static str {
    match kind {
        ClassKind::ConformallyLocallyHyperbolic => "conformally_locally_hyperbolic",
        ClassKind::ConformallyFiniteVolume => "conformally_finite_volume",
    }
}

/// Structured text block for a classification outcome.
pub fn classification_text<T: Scalar>(result: &ClassificationResult<T>) -> String {
    let mut out = String::new();
    out.push_str(&format!("class: {}\n", class_tag(result.kind)));
    let line = |name: &str, v: Option<T>| match v {
        Some(x) => format!("{name}: {}\n", format_float(x)),
        None => format!("{name}: n/a\n"),
    };
    out.push_str(&line("reciprocal_integral", result.i_value));
    out.push_str(&match result.k {
        Some(k) => format!("k: {k}\n"),
        None => "k: n/a\n".into(),
    });
    out.push_str(&line("r0", result.r0));
    out.push_str(&line("z0", result.z0));
    out
}

/// Chart table `z, K, K'` on the caller's grid; needs a chart-bearing
/// classification.
pub fn classification_chart_csv<T: Scalar>(
    result: &ClassificationResult<T>,
    zs: &[T],
) -> Result<String> {
    let chart = result.chart.as_ref().ok_or_else(|| {
        Error::InvalidParameter("classification carries no coordinate chart".into())
    })?;
    let mut rows = Vec::with_capacity(zs.len());
    for &z in zs {
        rows.push(vec![
            format_float(z),
            format_float(chart.eval(z)?),
            format_float(chart.d1(z)?),
        ]);
    }
    Ok(csv_document(&["z", "K", "K_prime"], &rows))
}
