//! Command implementations: thin drivers over the core solvers that
//! write the deterministic JSON/CSV artifacts and choose exit codes.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use yamabe_core::barriers::{
    build_subsolution, build_supersolution, verify_differential_inequality, verify_transmission,
    BarrierModel, DEFAULT_BARRIER_NODES,
};
use yamabe_core::conformal::{
    finite_volume_normal_form, hyperbolic_chart, keller_osserman_integral, ClassKind,
    ClassificationResult, KellerOsserman,
};
use yamabe_core::eigen::{first_eigenvalue, negativity_certificate, sharpness_experiment, RadialDomain, Verdict};
use yamabe_core::geometry::{deviation_from_reference, verify_alh_decay, ReferenceHyperbolic};
use yamabe_core::profile::RadialProfile;
use yamabe_core::report::{
    blowup_csv, blowup_summary, certificate_json, classification_chart_csv, classification_text,
    csv_document, decay_report_json, eigen_report_json, format_float, sharpness_json,
    subsolution_json, supersolution_json, verdict_tag, Json,
};
use yamabe_core::yamabe_radial::{solve_blowup, AnnulusBvp};

use crate::config::{self, CommandKind, GridConfig, Params, Scenario};

type OpResult = Result<i32, String>;

const SWEEP_CAP: usize = 10_000;
const DEFAULT_EIGEN_GRID: usize = 512;
const DEFAULT_BVP_GRID: usize = 1025;

pub fn dispatch(scenario: &Scenario, out: &Path, jobs: Option<usize>) -> OpResult {
    match scenario.command {
        CommandKind::Certify => certify(scenario, out),
        CommandKind::Eigen => eigen(scenario, out),
        CommandKind::YamabeAnnulus => yamabe_annulus(scenario, out),
        CommandKind::Barriers => barriers(scenario, out),
        CommandKind::Classify => classify(scenario, out),
        CommandKind::Sharpness => sharpness(scenario, out),
        CommandKind::AlhCheck => alh_check(scenario, out),
        CommandKind::Sweep => sweep(scenario, out, jobs),
    }
}

fn write_artifact(out: &Path, name: &str, contents: &str) -> Result<PathBuf, String> {
    std::fs::create_dir_all(out).map_err(|e| format!("cannot create {}: {e}", out.display()))?;
    let path = out.join(name);
    std::fs::write(&path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(path)
}

fn need<'a, T>(field: &'a Option<T>, what: &str) -> Result<&'a T, String> {
    field.as_ref().ok_or_else(|| format!("{what} is required"))
}

fn spec_of(scenario: &Scenario) -> Result<yamabe_core::geometry::WarpedProductSpec<f64>, String> {
    let cfg = scenario
        .spec
        .as_ref()
        .ok_or_else(|| format!("{}: a [spec] section is required", scenario.command.name()))?;
    config::build_spec(cfg).map_err(|e| e.to_string())
}

fn domain_of(scenario: &Scenario) -> Result<RadialDomain<f64>, String> {
    let cfg = scenario
        .domain
        .as_ref()
        .ok_or_else(|| format!("{}: a [domain] section is required", scenario.command.name()))?;
    let (a, b) = cfg.endpoints().map_err(|e| e.to_string())?;
    RadialDomain::new(a, b, cfg.separation).map_err(|e| e.to_string())
}

fn certify(scenario: &Scenario, out: &Path) -> OpResult {
    let spec = spec_of(scenario)?;
    let domain = domain_of(scenario)?;
    let cert = negativity_certificate(&spec, &domain, scenario.parameters.grid)
        .map_err(|e| e.to_string())?;
    let doc = certificate_json(&cert).render() + "\n";
    let name = scenario.output.json.as_deref().unwrap_or("certificate.json");
    let path = write_artifact(out, name, &doc)?;
    println!(
        "certify: {} (ratio {} vs bound {}); wrote {}",
        verdict_tag(cert.verdict),
        format_float(cert.ratio),
        format_float(cert.sinh2_bound),
        path.display()
    );
    Ok(match cert.verdict {
        Verdict::NegativeCertified => 0,
        Verdict::Inconclusive => 2,
    })
}

fn eigen(scenario: &Scenario, out: &Path) -> OpResult {
    let spec = spec_of(scenario)?;
    let domain = domain_of(scenario)?;
    let grid = scenario.parameters.grid.unwrap_or(DEFAULT_EIGEN_GRID);
    let report = first_eigenvalue(&spec, &domain, grid).map_err(|e| e.to_string())?;
    let doc = eigen_report_json(&report).render() + "\n";
    let name = scenario.output.json.as_deref().unwrap_or("eigen.json");
    let path = write_artifact(out, name, &doc)?;
    println!(
        "eigen: lambda = {} ({} cells, error estimate {}); wrote {}",
        format_float(report.lambda),
        report.grid_size,
        format_float(report.error_estimate),
        path.display()
    );
    Ok(0)
}

fn yamabe_annulus(scenario: &Scenario, out: &Path) -> OpResult {
    let p = &scenario.parameters;
    let n = *need(&p.n, "yamabe-annulus: parameters.n")?;
    let half_width = *need(&p.half_width, "yamabe-annulus: parameters.half_width")?;
    let grid = p.grid.unwrap_or(DEFAULT_BVP_GRID);
    let bvp = match (&p.drift, &p.scal) {
        (Some(drift), Some(scal)) => AnnulusBvp::new(
            half_width,
            n,
            config::parse_profile(drift, "parameters.drift").map_err(|e| e.to_string())?,
            config::parse_profile(scal, "parameters.scal").map_err(|e| e.to_string())?,
        ),
        (None, None) => AnnulusBvp::torus_model(half_width, n),
        _ => {
            return Err(
                "yamabe-annulus: give both `drift` and `scal`, or neither for the model problem"
                    .into(),
            )
        }
    }
    .map_err(|e| e.to_string())?;
    let sol = solve_blowup(&bvp, grid).map_err(|e| e.to_string())?;
    let summary = blowup_summary(&sol).map_err(|e| e.to_string())?.render() + "\n";
    let json_name = scenario.output.json.as_deref().unwrap_or("blowup.json");
    let json_path = write_artifact(out, json_name, &summary)?;
    let csv_name = scenario.output.csv.as_deref().unwrap_or("blowup.csv");
    let csv_path = write_artifact(out, csv_name, &blowup_csv(&sol))?;
    println!(
        "yamabe-annulus: u(0) = {}, residual {}; wrote {} and {}",
        format_float(sol.eval_u(0.0).map_err(|e| e.to_string())?),
        format_float(sol.residual),
        json_path.display(),
        csv_path.display()
    );
    Ok(0)
}

fn barriers(scenario: &Scenario, out: &Path) -> OpResult {
    let p = &scenario.parameters;
    let n = *need(&p.n, "barriers: parameters.n")?;
    let alpha = *need(&p.alpha, "barriers: parameters.alpha")?;
    let beta = need(&p.beta, "barriers: parameters.beta")?
        .scalar("beta")
        .map_err(|e| e.to_string())?;
    let c1 = p.c1.unwrap_or(0.0);
    let q = match &p.drift_ratio {
        Some(text) => {
            config::parse_profile(text, "parameters.drift_ratio").map_err(|e| e.to_string())?
        }
        None => RadialProfile::constant(1.0),
    };
    let nodes = p.nodes.unwrap_or(DEFAULT_BARRIER_NODES);
    let model = BarrierModel::new(n, q, c1, alpha).map_err(|e| e.to_string())?;
    let sub = build_subsolution(&model, beta).map_err(|e| e.to_string())?;
    let sup = build_supersolution(&model).map_err(|e| e.to_string())?;
    let sub_margin = verify_differential_inequality(&sub, &model, nodes).map_err(|e| e.to_string())?;
    let sup_margin = verify_differential_inequality(&sup, &model, nodes).map_err(|e| e.to_string())?;
    let doc = Json::Obj(vec![
        (
            "model".into(),
            Json::Obj(vec![
                ("n".into(), Json::Int(n as i64)),
                ("alpha".into(), Json::num(alpha)),
                ("c1".into(), Json::num(c1)),
                ("nodes".into(), Json::Int(nodes as i64)),
            ]),
        ),
        (
            "sub".into(),
            subsolution_json(&sub, &sub_margin, &verify_transmission(&sub)),
        ),
        (
            "super".into(),
            supersolution_json(&sup, &sup_margin, &verify_transmission(&sup)),
        ),
    ])
    .render()
        + "\n";
    let name = scenario.output.json.as_deref().unwrap_or("barriers.json");
    let path = write_artifact(out, name, &doc)?;
    println!(
        "barriers: worst margins {} (sub) and {} (super); wrote {}",
        format_float(sub_margin.worst),
        format_float(sup_margin.worst),
        path.display()
    );
    Ok(0)
}

fn classify(scenario: &Scenario, out: &Path) -> OpResult {
    let p = &scenario.parameters;
    let warping = need(&p.warping, "classify: parameters.warping")?;
    let f = config::parse_profile(warping, "parameters.warping").map_err(|e| e.to_string())?;
    let zs = p
        .z_grid
        .unwrap_or(GridConfig {
            start: 0.0,
            stop: 8.0,
            count: 33,
        })
        .points("z_grid")
        .map_err(|e| e.to_string())?;

    let (mut text, result) = match keller_osserman_integral(&f).map_err(|e| e.to_string())? {
        KellerOsserman::Finite(_) => {
            let k = *need(&p.k, "classify: parameters.k (target curvature class)")?;
            let result = hyperbolic_chart(&f, k).map_err(|e| e.to_string())?;
            (classification_text(&result), result)
        }
        KellerOsserman::Divergent => {
            let n = *need(&p.n, "classify: parameters.n")?;
            let (chart, volume) =
                finite_volume_normal_form(&f, n, p.fibre_volume.unwrap_or(1.0))
                    .map_err(|e| e.to_string())?;
            let result = ClassificationResult {
                kind: ClassKind::ConformallyFiniteVolume,
                i_value: None,
                k: None,
                r0: None,
                z0: None,
                chart: Some(chart),
            };
            let mut text = classification_text(&result);
            text.push_str(&format!("volume: {}\n", format_float(volume)));
            (text, result)
        }
    };
    let chart_csv = classification_chart_csv(&result, &zs).map_err(|e| e.to_string())?;
    let csv_name = scenario.output.csv.as_deref().unwrap_or("chart.csv");
    let csv_path = write_artifact(out, csv_name, &chart_csv)?;
    text.push_str(&format!("chart_table: {}\n", csv_path.display()));
    let text_name = scenario.output.text.as_deref().unwrap_or("classification.txt");
    let text_path = write_artifact(out, text_name, &text)?;
    print!("{text}");
    println!("report: {}", text_path.display());
    Ok(0)
}

fn sharpness(scenario: &Scenario, out: &Path) -> OpResult {
    let p = &scenario.parameters;
    let beta = need(&p.beta, "sharpness: parameters.beta")?
        .scalar("beta")
        .map_err(|e| e.to_string())?;
    let n = *need(&p.n, "sharpness: parameters.n")?;
    let big_r = *need(&p.big_r, "sharpness: parameters.big_r")?;
    let grid = p.grid.unwrap_or(DEFAULT_EIGEN_GRID);
    let report = sharpness_experiment(beta, n, big_r, grid).map_err(|e| e.to_string())?;
    let doc = sharpness_json(&report).render() + "\n";
    let name = scenario.output.json.as_deref().unwrap_or("sharpness.json");
    let path = write_artifact(out, name, &doc)?;
    println!(
        "sharpness: lambda = {} (lower bound {}); wrote {}",
        format_float(report.lambda_numeric),
        format_float(report.lower_bound),
        path.display()
    );
    Ok(0)
}

fn alh_check(scenario: &Scenario, out: &Path) -> OpResult {
    let p = &scenario.parameters;
    let spec = spec_of(scenario)?;
    let k = *need(&p.k, "alh-check: parameters.k")?;
    let r0 = *need(&p.r0, "alh-check: parameters.r0")?;
    let alpha = *need(&p.alpha, "alh-check: parameters.alpha")?;
    let order = p.order.unwrap_or(1);
    let radii = p
        .radii
        .unwrap_or(GridConfig {
            start: 1.0,
            stop: 10.0,
            count: 33,
        })
        .points("radii")
        .map_err(|e| e.to_string())?;
    let reference = ReferenceHyperbolic::new(k, spec.n().n(), r0, p.fibre_volume.unwrap_or(1.0))
        .map_err(|e| e.to_string())?;
    let components =
        deviation_from_reference(&spec, &reference, &radii, order).map_err(|e| e.to_string())?;
    let report = verify_alh_decay(&components, alpha, order).map_err(|e| e.to_string())?;
    let doc = decay_report_json(&report).render() + "\n";
    let name = scenario.output.json.as_deref().unwrap_or("alh.json");
    let path = write_artifact(out, name, &doc)?;
    println!(
        "alh-check: {} at rate alpha = {}; wrote {}",
        if report.pass { "decay verified" } else { "decay NOT verified" },
        format_float(alpha),
        path.display()
    );
    Ok(0)
}

fn sweep(scenario: &Scenario, out: &Path, jobs: Option<usize>) -> OpResult {
    let p: &Params = &scenario.parameters;
    let n = *need(&p.n, "sweep: parameters.n")?;
    let betas = need(&p.beta, "sweep: parameters.beta")?
        .expand("beta")
        .map_err(|e| e.to_string())?;
    let ws = need(&p.w, "sweep: parameters.w")?
        .expand("w")
        .map_err(|e| e.to_string())?;
    let rs = need(&p.r, "sweep: parameters.r")?
        .expand("r")
        .map_err(|e| e.to_string())?;
    let cap = p.cap.unwrap_or(SWEEP_CAP);
    let count = betas.len() * ws.len() * rs.len();
    if count > cap {
        return Err(format!("sweep has {count} cases, more than the cap {cap}; refusing"));
    }
    let grid = p.grid;

    // Rows in ascending lexicographic (beta, W, R) order.
    let mut cases = Vec::with_capacity(count);
    for &beta in &betas {
        for &w in &ws {
            for &r in &rs {
                cases.push((beta, w, r));
            }
        }
    }
    let compute = |&(beta, w, r): &(f64, f64, f64)| -> Result<Vec<String>, String> {
        let spec = config::torus_for_rate(beta, n).map_err(|e| e.to_string())?;
        let domain = RadialDomain::new(-w, w, r)
            .map_err(|e| format!("case (beta={beta}, W={w}, R={r}): {e}"))?;
        let cert = negativity_certificate(&spec, &domain, grid)
            .map_err(|e| format!("case (beta={beta}, W={w}, R={r}): {e}"))?;
        let opt = |x: Option<f64>| x.map(format_float).unwrap_or_default();
        Ok(vec![
            format_float(beta),
            format_float(w),
            format_float(r),
            format_float(cert.ratio),
            format_float(cert.sinh2_bound),
            opt(cert.lambda_upper),
            opt(cert.lambda_numeric),
            verdict_tag(cert.verdict).to_string(),
        ])
    };
    let run_all = || cases.par_iter().map(compute).collect::<Result<Vec<_>, _>>();
    let rows = match jobs {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| format!("cannot build a {threads}-thread pool: {e}"))?
            .install(run_all),
        None => run_all(),
    }?;
    let header = [
        "beta",
        "W",
        "R",
        "ratio",
        "sinh2_bound",
        "lambda_upper",
        "lambda_numeric",
        "verdict",
    ];
    let doc = csv_document(&header, &rows);
    let name = scenario.output.csv.as_deref().unwrap_or("sweep.csv");
    let path = write_artifact(out, name, &doc)?;
    println!("sweep: {count} cases; wrote {}", path.display());
    Ok(0)
}
