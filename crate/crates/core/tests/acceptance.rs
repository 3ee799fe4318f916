//! End-to-end acceptance checks, one test per headline capability.
//!
//! Each test prints a single PASS/FAIL line (run with `--nocapture` to
//! see them all) and enforces both its numerical tolerance and a
//! wall-clock budget. Tolerances are part of the contract: do not
//! loosen them to make a red test green.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use yamabe_core::barriers::{
    build_subsolution, build_supersolution, verify_differential_inequality, verify_transmission,
    BarrierModel, DEFAULT_BARRIER_NODES,
};
use yamabe_core::conformal::{
    conformal_identity_residual, finite_volume_normal_form, hyperbolic_chart,
    keller_osserman_integral, KellerOsserman,
};
use yamabe_core::eigen::{
    first_eigenvalue, negativity_certificate, sharpness_experiment, sup_norm_objective,
    supnorm_minimize_numeric, supnorm_minimizer_closed_form, RadialDomain, Verdict,
};
use yamabe_core::geometry::{choose_alphas, exp_torus_spec, ReferenceHyperbolic};
use yamabe_core::num::Dimension;
use yamabe_core::profile::RadialProfile;
use yamabe_core::quad::integrate_default;
use yamabe_core::yamabe_radial::{
    blowup_center_scan, boundary_rate_fit, check_decay_condition, limit_ode_residual,
    limit_profile_w, solve_blowup, verify_scaling_property, AnnulusBvp, BlowupSolution,
};

fn report(name: &str, ok: bool, detail: &str, started: Instant, budget_s: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    let status = if ok { "PASS" } else { "FAIL" };
    println!("[{status}] {name}: {detail} [{elapsed:.2} s, budget {budget_s} s]");
    assert!(
        elapsed < budget_s,
        "{name}: took {elapsed:.2} s, budget {budget_s} s"
    );
    assert!(ok, "{name}: {detail}");
}

#[test]
fn reference_ends_have_model_curvature() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let mut samples = 0usize;
    for k in [-1i32, 0, 1] {
        for n in 3..=8usize {
            let target = (n * (n - 1)) as f64;
            for r0 in [0.5f64, 1.0, 2.0] {
                let spec = ReferenceHyperbolic::new(k, n, r0, 1.0)
                    .unwrap()
                    .spec()
                    .unwrap();
                for j in 1..=100 {
                    let r = 0.1 * j as f64;
                    let dev = (spec.scalar_curvature(r).unwrap() + target).abs();
                    worst = worst.max(dev);
                    samples += 1;
                }
            }
        }
    }
    report(
        "reference_ends_have_model_curvature",
        worst <= 1e-9,
        &format!("max |S + n(n-1)| = {worst:.2e} over {samples} samples (tol 1e-9)"),
        t0,
        1.0,
    );
}

#[test]
fn supnorm_minimum_closed_form_vs_shooting() {
    let t0 = Instant::now();
    let mut worst_rel = 0.0f64;
    let mut worst_spread = 0.0f64;
    for n in 3..=6usize {
        let dim = Dimension::new(n).unwrap();
        for big_r in [0.5f64, 1.0, 2.0] {
            let (h0, profile) = supnorm_minimizer_closed_form(n, big_r).unwrap();
            let numeric = supnorm_minimize_numeric(n, big_r, 1e-10).unwrap();
            worst_rel = worst_rel.max((h0 - numeric).abs() / h0);
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for j in 0..=200 {
                let r = big_r * j as f64 / 200.0;
                let f = sup_norm_objective(dim, profile.eval(r).unwrap(), profile.d1(r).unwrap());
                lo = lo.min(f);
                hi = hi.max(f);
            }
            worst_spread = worst_spread.max((hi - lo) / h0);
        }
    }
    report(
        "supnorm_minimum_closed_form_vs_shooting",
        worst_rel <= 1e-8 && worst_spread <= 1e-10,
        &format!(
            "closed form vs shooting rel dev {worst_rel:.2e} (tol 1e-8), \
             objective spread {worst_spread:.2e} (tol 1e-10)"
        ),
        t0,
        5.0,
    );
}

#[test]
fn torus_eigenvalues_match_constant_coefficient_oracle() {
    let t0 = Instant::now();
    let domain = RadialDomain::new(-2.0, 2.0, 2.0).unwrap();
    let length = domain.outer_length();
    assert_eq!(length, 8.0);
    let c_n = Dimension::new(3).unwrap().c_n::<f64>();
    let mut worst = 0.0f64;
    let mut lambdas = Vec::new();
    for beta in [1.0f64, 2.0] {
        let alphas = choose_alphas(beta, 3).unwrap();
        let (spec, s_const) = exp_torus_spec(&alphas).unwrap();
        let oracle = s_const
            + c_n * (beta * beta / 4.0 + std::f64::consts::PI.powi(2) / (length * length));
        let got = first_eigenvalue(&spec, &domain, 512).unwrap().lambda;
        worst = worst.max((got - oracle).abs() / oracle.abs());
        lambdas.push((beta, got, oracle));
    }
    report(
        "torus_eigenvalues_match_constant_coefficient_oracle",
        worst <= 1e-6,
        &format!(
            "beta=1: {:.8} vs {:.8}; beta=2: {:.8} vs {:.8}; worst rel dev {worst:.2e} (tol 1e-6)",
            lambdas[0].1, lambdas[0].2, lambdas[1].1, lambdas[1].2
        ),
        t0,
        10.0,
    );
}

#[test]
fn sharpness_sign_change_window() {
    let t0 = Instant::now();
    // Sweep the total rate over [1, 2] in steps of 0.1 on the annulus
    // of half-width 2R with R = 3. Every run must clear the
    // characteristic-root lower bound (enforced inside the
    // experiment), and the eigenvalue must change sign once, in the
    // window (1.7, 1.8) around sqrt(n(n-2)) = sqrt(3).
    let big_r = 3.0f64;
    let lam = |beta: f64, rr: f64| {
        sharpness_experiment(beta, 3, rr, 512)
            .unwrap()
            .lambda_numeric
    };
    let mut rows = Vec::new();
    for i in 0..=10 {
        let beta = 1.0 + 0.1 * i as f64;
        rows.push((beta, lam(beta, big_r)));
    }
    let brackets: Vec<(f64, f64)> = rows
        .windows(2)
        .filter(|w| w[0].1 < 0.0 && w[1].1 >= 0.0)
        .map(|w| (w[0].0, w[1].0))
        .collect();
    assert_eq!(
        brackets.len(),
        1,
        "expected exactly one sign change, found {brackets:?}"
    );
    let (mut lo, mut hi) = brackets[0];
    for _ in 0..25 {
        let mid = 0.5 * (lo + hi);
        if lam(mid, big_r) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let crossing = 0.5 * (lo + hi);
    let in_window = brackets[0].0 >= 1.7 - 1e-12 && brackets[0].1 <= 1.8 + 1e-12;

    let ok = in_window;
    if !ok {
        // The window (1.7, 1.8) targets the infinite-volume threshold
        // sqrt(3) = 1.7320508. On the bounded annulus |r| <= 2R the
        // Dirichlet term c_n pi^2 / (4R)^2 shifts the zero of
        // lambda(beta) = S + c_n (beta^2/4 + pi^2/(4R)^2) down to
        // beta* = sqrt(3 - pi^2/36) = 1.6510, which is where the sweep
        // sees it. The window only becomes reachable once R is large
        // enough; at R = 6 the predicted crossing is sqrt(3 - pi^2/144)
        // = 1.7122 and the measured sweep agrees.
        let predicted_r3 = (3.0f64 - std::f64::consts::PI.powi(2) / 36.0).sqrt();
        let predicted_r6 = (3.0f64 - std::f64::consts::PI.powi(2) / 144.0).sqrt();
        println!(
            "       analysis: measured crossing beta* = {crossing:.5} at R = 3 \
             (constant-coefficient prediction {predicted_r3:.5});"
        );
        println!(
            "       the infinite-volume threshold is sqrt(3) = {:.7}, approached \
             only as R grows: at R = 6 the crossing sits at lambda(1.7) = {:.4} < 0 \
             < lambda(1.8) = {:.4} (prediction {predicted_r6:.5}), inside (1.7, 1.8).",
            3.0f64.sqrt(),
            lam(1.7, 6.0),
            lam(1.8, 6.0),
        );
        println!(
            "       every swept eigenvalue cleared its characteristic-root lower \
             bound; only the window placement at R = 3 fails."
        );
    }
    report(
        "sharpness_sign_change_window",
        ok,
        &format!(
            "sign change in ({:.1}, {:.1}), required window (1.7, 1.8); \
             crossing beta* = {crossing:.5}",
            brackets[0].0, brackets[0].1
        ),
        t0,
        30.0,
    );
}

#[test]
fn certificate_sweep_is_sound() {
    let t0 = Instant::now();
    let n = 3usize;
    let mut certified = 0usize;
    let mut inconclusive = 0usize;
    let mut unsound = Vec::new();
    let mut count = 0usize;
    for beta in [0.6f64, 1.0, 1.4, 1.8, 2.2] {
        let alphas = if beta <= (n - 1) as f64 {
            choose_alphas(beta, n).unwrap()
        } else {
            vec![beta / (n - 1) as f64; n - 1]
        };
        let (spec, _) = exp_torus_spec(&alphas).unwrap();
        for w in [0.5f64, 1.0] {
            for sep in [1.0f64, 2.0, 3.0, 4.0, 5.0] {
                let domain = RadialDomain::new(-w, w, sep).unwrap();
                let cert = negativity_certificate(&spec, &domain, Some(512)).unwrap();
                count += 1;
                match cert.verdict {
                    Verdict::NegativeCertified => {
                        certified += 1;
                        let lambda = cert.lambda_numeric.unwrap();
                        if !(lambda < 0.0) {
                            unsound.push((beta, w, sep, lambda));
                        }
                    }
                    Verdict::Inconclusive => inconclusive += 1,
                }
            }
        }
    }
    report(
        "certificate_sweep_is_sound",
        count == 50 && certified >= 1 && inconclusive >= 1 && unsound.is_empty(),
        &format!(
            "{count} cases: {certified} certified (all with lambda < 0), \
             {inconclusive} inconclusive; unsound: {unsound:?}"
        ),
        t0,
        60.0,
    );
}

#[test]
fn blowup_boundary_rates_and_scaling() {
    let t0 = Instant::now();
    let solve = |rr: f64, n: usize| -> BlowupSolution<f64> {
        solve_blowup(&AnnulusBvp::torus_model(rr, n).unwrap(), 2049).unwrap()
    };

    // End behaviour u ~ A (R - |r|)^{-(n-2)/2} with A at the
    // dominant-balance value 1 for the model problem.
    let mut rate_dev = 0.0f64;
    let mut coeff_dev = 0.0f64;
    for n in [3usize, 4, 6] {
        let sol = solve(1.0, n);
        let want = -((n - 2) as f64) / 2.0;
        let slope = boundary_rate_fit(&sol).unwrap();
        rate_dev = rate_dev.max((slope - want).abs() / want.abs());
        coeff_dev = coeff_dev.max((sol.boundary_coeff - 1.0).abs());
    }

    // Transport identity across the family, at random (R, S, r).
    let mut rng = StdRng::seed_from_u64(0xacc6);
    let mut cache: Vec<(f64, BlowupSolution<f64>)> = Vec::new();
    let cached = |r: f64, cache: &mut Vec<(f64, BlowupSolution<f64>)>| {
        if let Some((_, s)) = cache.iter().find(|(w, _)| *w == r) {
            return s.clone();
        }
        let s = solve(r, 3);
        cache.push((r, s.clone()));
        s
    };
    let mut scaling_dev = 0.0f64;
    for _ in 0..20 {
        let s = (rng.random_range(1.0f64..4.0) * 4.0).round() / 4.0;
        let target = (rng.random_range(s + 0.5..5.5f64) * 4.0).round() / 4.0;
        let pt = rng.random_range(-0.8..0.8) * target;
        let res = verify_scaling_property(
            &cached(target, &mut cache),
            &cached(s, &mut cache),
            pt,
        )
        .unwrap();
        scaling_dev = scaling_dev.max(res);
    }

    // Monotone relaxation of the center value toward 1.
    let rows = blowup_center_scan(3, &[1.0, 2.0, 4.0, 8.0], 1025).unwrap();
    let decreasing = rows.windows(2).all(|w| w[1].1 < w[0].1);
    let last = rows.last().unwrap().1;

    report(
        "blowup_boundary_rates_and_scaling",
        rate_dev <= 0.02
            && coeff_dev <= 0.02
            && scaling_dev <= 1e-5
            && decreasing
            && last - 1.0 <= 0.05,
        &format!(
            "exponent dev {rate_dev:.2e} (tol 2e-2), coeff dev {coeff_dev:.2e} (tol 2e-2), \
             scaling residual {scaling_dev:.2e} (tol 1e-5), centers decreasing: {decreasing}, \
             u_8(0) - 1 = {:.3e} (tol 5e-2)",
            last - 1.0
        ),
        t0,
        60.0,
    );
}

#[test]
fn barrier_ladders_verify_for_representative_triples() {
    let t0 = Instant::now();
    let mut detail = String::new();
    let mut ok = true;
    for (n, alpha, beta) in [(3usize, 2.0f64, 1.0f64), (4, 3.0, 1.5), (5, 4.0, 2.0)] {
        let model = BarrierModel::new(n, RadialProfile::constant(1.0f64), 1.0, alpha).unwrap();
        let sub = build_subsolution(&model, beta).unwrap();
        let sup = build_supersolution(&model).unwrap();
        let ms = verify_differential_inequality(&sub, &model, DEFAULT_BARRIER_NODES).unwrap();
        let mp = verify_differential_inequality(&sup, &model, DEFAULT_BARRIER_NODES).unwrap();
        let trans_ok = verify_transmission(&sub).iter().all(|b| b.pass)
            && verify_transmission(&sup).iter().all(|b| b.pass);
        ok = ok && ms.worst >= 0.0 && mp.worst >= 0.0 && trans_ok;
        detail.push_str(&format!(
            "({n},{alpha},{beta}): margins {:.2e}/{:.2e}, kinks ok: {trans_ok}; ",
            ms.worst, mp.worst
        ));
    }
    report(
        "barrier_ladders_verify_for_representative_triples",
        ok,
        detail.trim_end_matches("; "),
        t0,
        30.0,
    );
}

#[test]
fn conformal_classification_both_branches() {
    let t0 = Instant::now();

    // Warping cosh: the reciprocal integral converges to pi/2 and the
    // end carries a locally hyperbolic chart.
    let f = RadialProfile::<f64>::cosh_shifted(0.0);
    let i_dev = match keller_osserman_integral(&f).unwrap() {
        KellerOsserman::Finite(v) => (v - std::f64::consts::FRAC_PI_2).abs(),
        KellerOsserman::Divergent => f64::INFINITY,
    };
    let result = hyperbolic_chart(&f, 1).unwrap();
    let chart = result.chart.as_ref().unwrap();
    let r0 = result.r0.unwrap();
    // Independent separable oracle: dK/sinh(K + r0) = dz/f integrates
    // to tanh((K + r0)/2) = tanh(r0/2) e^{H}, H(z) = int_0^z 1/f.
    let mut chart_dev = 0.0f64;
    for j in 0..20 {
        let z = 0.5 * j as f64;
        let h = integrate_default(|s: f64| 1.0 / s.cosh(), 0.0, z).unwrap();
        let oracle = 2.0 * ((r0 / 2.0).tanh() * h.exp()).atanh() - r0;
        chart_dev = chart_dev.max((chart.eval(z).unwrap() - oracle).abs());
    }
    let zs: Vec<f64> = (0..20).map(|i| 0.05 + 2.95 * i as f64 / 19.0).collect();
    let identity_dev = conformal_identity_residual(&f, &result, &zs).unwrap();

    // Warping 1: divergent integral, conformally of finite volume.
    let one = RadialProfile::constant(1.0f64);
    let divergent = matches!(
        keller_osserman_integral(&one).unwrap(),
        KellerOsserman::Divergent
    );
    let (kchart, volume) = finite_volume_normal_form(&one, 3, 1.0).unwrap();
    let mut normal_dev = 0.0f64;
    for j in 0..=10 {
        let z = j as f64;
        // K' = f^{-1} e^{-K} with f = 1.
        normal_dev =
            normal_dev.max((kchart.d1(z).unwrap() - (-kchart.eval(z).unwrap()).exp()).abs());
    }
    let vol_dev = (volume - 1.0 / 2.0).abs();

    report(
        "conformal_classification_both_branches",
        i_dev <= 1e-8
            && chart_dev <= 1e-8
            && identity_dev <= 1e-7
            && divergent
            && normal_dev <= 1e-12
            && vol_dev == 0.0,
        &format!(
            "|I - pi/2| = {i_dev:.2e} (tol 1e-8), chart vs quadrature {chart_dev:.2e} \
             (tol 1e-8), identity residual {identity_dev:.2e} (tol 1e-7); unit warping \
             divergent: {divergent}, normal-form identity {normal_dev:.2e} (tol 1e-12), \
             volume dev {vol_dev:.1e}"
        ),
        t0,
        5.0,
    );
}

#[test]
fn limit_profile_and_decay_threshold() {
    let t0 = Instant::now();
    let mut worst_res = 0.0f64;
    let mut exact_data = true;
    let mut separation = true;
    for n in [3usize, 4, 6] {
        for r in [0.0f64, 1.0, 5.0] {
            worst_res = worst_res.max(limit_ode_residual::<f64>(n, r).unwrap().abs());
        }
        exact_data = exact_data && limit_profile_w::<f64>(n, 0.0).unwrap() == 1.0;
        // Slope at 0 from the two characteristic rates: s1 s2 (e2 - e1)
        // with e1 = e2 = 1, identically zero.
        let (s1, s2) = ((n as f64 - 2.0) / 2.0, n as f64 / 2.0);
        exact_data = exact_data && (-s1 * s2 * 1.0 + s1 * s2 * 1.0) == 0.0;

        let border = RadialProfile::exp_warp(-s1, 0.0, 1.0);
        for shift in [0.5f64, 1.0, 3.0] {
            separation =
                separation && !check_decay_condition(&border, n, shift, 1.0, 20.0).unwrap().pass;
        }
        let slow = RadialProfile::exp_warp(-s1 / 2.0, 0.0, 1.0);
        separation =
            separation && check_decay_condition(&slow, n, 10.0, 1.0, 20.0).unwrap().pass;
    }
    report(
        "limit_profile_and_decay_threshold",
        worst_res <= 1e-12 && exact_data && separation,
        &format!(
            "equation residual {worst_res:.2e} (tol 1e-12), w(0) = 1 and w'(0) = 0 exact: \
             {exact_data}, borderline rate fails / slower passes: {separation}"
        ),
        t0,
        1.0,
    );
}

#[test]
fn volume_growth_asymptotics() {
    let t0 = Instant::now();
    // Exponential growth rate of the shell around a fixed core in the
    // k = 0 reference end: log(ratio)/R -> n - 1.
    let sep = 10.0f64;
    let mut growth_dev = 0.0f64;
    for n in [3usize, 4, 5] {
        let spec = ReferenceHyperbolic::new(0, n, 1.0, 1.0)
            .unwrap()
            .spec()
            .unwrap();
        let vr = spec.volume_ratio_annuli(11.5, 1.0, sep).unwrap();
        let rate = vr.ratio.ln() / sep;
        growth_dev = growth_dev.max((rate - (n - 1) as f64).abs() / (n - 1) as f64);
    }

    // Concentric doubling in the exponential torus: ratio ~ C e^{beta R}.
    let mut fit_dev = 0.0f64;
    let mut amplitude_ok = true;
    for beta in [1.0f64, 1.5] {
        let (spec, _) = exp_torus_spec(&choose_alphas(beta, 3).unwrap()).unwrap();
        let fit = spec
            .concentric_ratio_fit(0.0, &[5.0, 6.0, 7.0, 8.0, 10.0])
            .unwrap();
        fit_dev = fit_dev.max((fit.exponent - beta).abs() / beta);
        amplitude_ok = amplitude_ok && fit.amplitude.is_finite() && fit.amplitude > 0.0;
    }

    report(
        "volume_growth_asymptotics",
        growth_dev <= 0.10 && fit_dev <= 0.05 && amplitude_ok,
        &format!(
            "log(ratio)/R dev {growth_dev:.2e} from n-1 (tol 1e-1), doubling exponent \
             dev {fit_dev:.2e} from beta (tol 5e-2), amplitudes finite: {amplitude_ok}"
        ),
        t0,
        5.0,
    );
}
