//! Acceptance suite. Runs every acceptance criterion at its pinned tolerance
//! and prints one pass/fail line per criterion; exits nonzero if any fails.
//!
//! Reference probabilities for the preset geometries:
//!   fig2 -> (0.1538, 0.6924, 0.1538)
//!   fig3 -> (0.4565, 0.087, 0.4565)
//!   fig1, fig4 -> all three within 0.01 of 1/3

use std::process::ExitCode;
use std::time::Instant;

use cr_sched::presets::preset_scenario;
use cr_sched_core::{
    closed_form_k3, compare_to_analytic, identity_i2, identity_i3, instantaneous_snr,
    quadrature_selection, run_monte_carlo, sample_exponential, select_user,
    selection_probabilities, AlphaVector, AnalyticMethod, PowerMode, PrimarySide,
    QuadratureConfig, REL_GAP_THRESHOLD,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type CriterionOutcome = Result<String, String>;
type CriterionFn = fn() -> CriterionOutcome;

fn main() -> ExitCode {
    let suite_start = Instant::now();
    let criteria: Vec<(&str, CriterionFn)> = vec![
        ("fig2 reproduction", fig2_reproduction),
        ("fig3 reproduction", fig3_reproduction),
        ("fig1/fig4 fairness", fig1_fig4_fairness),
        ("closed form vs quadrature", cross_method_agreement),
        ("integral identities vs quadrature", identity_validation),
        ("normalization and symmetry", normalization_and_symmetry),
        ("coalescence continuity", coalescence_continuity),
        ("simulator determinism", simulator_determinism),
        ("metric equivalence", metric_equivalence),
    ];

    let mut failures = 0usize;
    for (index, (name, criterion)) in criteria.iter().enumerate() {
        match criterion() {
            Ok(detail) => println!("criterion {:>2} ({name}): PASS ({detail})", index + 1),
            Err(reason) => {
                failures += 1;
                println!("criterion {:>2} ({name}): FAIL ({reason})", index + 1);
            }
        }
    }

    let elapsed = suite_start.elapsed().as_secs_f64();
    if elapsed < 60.0 {
        println!("criterion 10 (suite runtime): PASS ({elapsed:.1} s < 60 s)");
    } else {
        failures += 1;
        println!("criterion 10 (suite runtime): FAIL ({elapsed:.1} s >= 60 s)");
    }

    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criterion(s) failed");
        ExitCode::FAILURE
    }
}

fn ensure(cond: bool, reason: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(reason)
    }
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

/// Closed-form probabilities for a preset, the Monte Carlo cross-check at
/// the 3-sigma binomial bound, and the runtime bound shared by the first
/// two criteria.
fn preset_reproduction(preset: &str, reference: [f64; 3], tol: f64) -> CriterionOutcome {
    let start = Instant::now();
    let scenario = preset_scenario(preset).expect("known preset");
    let alphas = scenario.alpha_vector().map_err(|e| e.to_string())?;
    let closed = closed_form_k3(&alphas, &cfg()).map_err(|e| e.to_string())?;
    let probs = closed.probs();

    for (user, (&got, &want)) in probs.iter().zip(&reference).enumerate() {
        ensure(
            (got - want).abs() <= tol,
            format!("{preset} user {user}: closed form {got:.4} vs reference {want:.4} (tol {tol})"),
        )?;
    }

    let report = run_monte_carlo(&scenario).map_err(|e| e.to_string())?;
    let comparison = compare_to_analytic(probs, &report).map_err(|e| e.to_string())?;
    ensure(
        comparison.pass,
        format!("{preset}: simulation outside 3-sigma bound: {:?}", comparison.rows),
    )?;

    let seconds = start.elapsed().as_secs_f64();
    ensure(seconds < 5.0, format!("{preset}: took {seconds:.2} s (bound 5 s)"))?;

    let worst = comparison
        .rows
        .iter()
        .map(|r| r.abs_diff)
        .fold(0.0f64, f64::max);
    Ok(format!(
        "probs ({:.4}, {:.4}, {:.4}), max |analytic-mc| {worst:.1e}, {seconds:.2} s",
        probs[0], probs[1], probs[2]
    ))
}

fn fig2_reproduction() -> CriterionOutcome {
    preset_reproduction("fig2", [0.1538, 0.6924, 0.1538], 0.005)
}

fn fig3_reproduction() -> CriterionOutcome {
    preset_reproduction("fig3", [0.4565, 0.087, 0.4565], 0.005)
}

fn fig1_fig4_fairness() -> CriterionOutcome {
    let third = 1.0 / 3.0;
    let mut worst = 0.0f64;
    for preset in ["fig1", "fig4"] {
        let scenario = preset_scenario(preset).expect("known preset");
        let alphas = scenario.alpha_vector().map_err(|e| e.to_string())?;
        let closed = closed_form_k3(&alphas, &cfg()).map_err(|e| e.to_string())?;
        let report = run_monte_carlo(&scenario).map_err(|e| e.to_string())?;
        for user in 0..3 {
            let analytic = closed.probs()[user];
            let empirical = report.freqs[user];
            worst = worst.max((analytic - third).abs()).max((empirical - third).abs());
            ensure(
                (analytic - third).abs() < 0.01,
                format!("{preset} user {user}: closed form {analytic:.4} not within 0.01 of 1/3"),
            )?;
            ensure(
                (empirical - third).abs() < 0.01,
                format!("{preset} user {user}: frequency {empirical:.4} not within 0.01 of 1/3"),
            )?;
        }
    }
    Ok(format!("worst |p - 1/3| = {worst:.1e} (bound 0.01)"))
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.gen_range(lo..hi))
}

fn distinct_ratios<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    'outer: loop {
        let v: Vec<f64> = (0..k).map(|_| log_uniform(rng, -2.0, 2.0)).collect();
        for i in 0..k {
            for j in (i + 1)..k {
                if (v[i] - v[j]).abs() / v[i].max(v[j]) <= REL_GAP_THRESHOLD {
                    continue 'outer;
                }
            }
        }
        return v;
    }
}

fn cross_method_agreement() -> CriterionOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc4);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let k = if i % 2 == 0 { 2 } else { 3 };
        let alphas = AlphaVector::new(distinct_ratios(&mut rng, k)).unwrap();
        let closed = selection_probabilities(&alphas, AnalyticMethod::ClosedForm, &cfg())
            .map_err(|e| e.to_string())?;
        let quad = selection_probabilities(&alphas, AnalyticMethod::Quadrature, &cfg())
            .map_err(|e| e.to_string())?;
        for (user, (&c, &q)) in closed.probs().iter().zip(quad.probs()).enumerate() {
            let diff = (c - q).abs();
            worst = worst.max(diff);
            ensure(
                diff < 1e-8,
                format!("alphas {:?} user {user}: |closed - quad| = {diff:.2e}", alphas.as_slice()),
            )?;
        }
    }
    Ok(format!("200 vectors, worst |closed - quad| = {worst:.1e} (bound 1e-8)"))
}

// Independent integration oracle: fold [0, inf) onto [0, 1] with
// u = 1/(1 + y) (the integrands become smooth rationals) and integrate by
// recursive adaptive Simpson with Richardson correction.
fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

fn oracle_unit<F: Fn(f64) -> f64>(f: F) -> f64 {
    let rough = adaptive_simpson(&f, 0.0, 1.0, 1e-9, 48);
    adaptive_simpson(&f, 0.0, 1.0, 1e-14 * (1.0 + rough.abs()), 48)
}

fn oracle_i2(a: f64, b: f64) -> f64 {
    oracle_unit(move |u| {
        let om = 1.0 - u;
        let da = u + a * om;
        let db = u + b * om;
        u / (da * da * db)
    })
}

fn oracle_i3(a: f64, b: f64, c: f64) -> f64 {
    oracle_unit(move |u| {
        let om = 1.0 - u;
        let da = u + a * om;
        let db = u + b * om;
        let dc = u + c * om;
        u * u / (da * da * db * dc)
    })
}

fn identity_validation() -> CriterionOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc5);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let v = distinct_ratios(&mut rng, 3);
        let (a, b, c) = (v[0], v[1], v[2]);

        let two = identity_i2(a, b).map_err(|e| e.to_string())?;
        let two_diff = (two - oracle_i2(a, b)).abs();
        ensure(
            two_diff < 1e-10,
            format!("i2({a}, {b}): |closed - quadrature| = {two_diff:.2e}"),
        )?;

        let three = identity_i3(a, b, c).map_err(|e| e.to_string())?;
        let three_diff = (three - oracle_i3(a, b, c)).abs();
        ensure(
            three_diff < 1e-10,
            format!("i3({a}, {b}, {c}): |closed - quadrature| = {three_diff:.2e}"),
        )?;
        worst = worst.max(two_diff).max(three_diff);
    }
    Ok(format!("200 triples, worst |closed - quadrature| = {worst:.1e} (bound 1e-10)"))
}

fn normalization_and_symmetry() -> CriterionOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc6);
    let mut worst_defect = 0.0f64;
    let mut worst_perm = 0.0f64;
    let mut worst_scale = 0.0f64;
    for _ in 0..500 {
        let k = rng.gen_range(2..=6);
        let alphas: Vec<f64> = (0..k).map(|_| log_uniform(&mut rng, -2.0, 2.0)).collect();
        let vector = AlphaVector::new(alphas.clone()).unwrap();
        let base = selection_probabilities(&vector, AnalyticMethod::Quadrature, &cfg())
            .map_err(|e| e.to_string())?;

        let defect = (base.raw_sum() - 1.0).abs();
        worst_defect = worst_defect.max(defect);
        ensure(defect < 1e-8, format!("alphas {alphas:?}: sum defect {defect:.2e}"))?;

        let mut order: Vec<usize> = (0..k).collect();
        order.shuffle(&mut rng);
        let permuted: Vec<f64> = order.iter().map(|&i| alphas[i]).collect();
        let perm = selection_probabilities(
            &AlphaVector::new(permuted).unwrap(),
            AnalyticMethod::Quadrature,
            &cfg(),
        )
        .map_err(|e| e.to_string())?;
        for (slot, &src) in order.iter().enumerate() {
            let diff = (perm.probs()[slot] - base.probs()[src]).abs();
            worst_perm = worst_perm.max(diff);
            ensure(
                diff < 1e-8,
                format!("alphas {alphas:?} order {order:?}: permutation moved an entry by {diff:.2e}"),
            )?;
        }

        let c = log_uniform(&mut rng, -3.0, 3.0);
        let scaled: Vec<f64> = alphas.iter().map(|a| a * c).collect();
        let after = selection_probabilities(
            &AlphaVector::new(scaled).unwrap(),
            AnalyticMethod::Quadrature,
            &cfg(),
        )
        .map_err(|e| e.to_string())?;
        for (&p, &q) in base.probs().iter().zip(after.probs()) {
            let diff = (p - q).abs();
            worst_scale = worst_scale.max(diff);
            ensure(
                diff <= 1e-10,
                format!("alphas {alphas:?} scale {c}: entry moved by {diff:.2e}"),
            )?;
        }
    }
    Ok(format!(
        "500 vectors, worst: sum defect {worst_defect:.1e}, permutation {worst_perm:.1e}, scale {worst_scale:.1e}"
    ))
}

fn coalescence_continuity() -> CriterionOutcome {
    let deltas = [
        1e-4, 5e-5, 2e-5, 1e-5, 5e-6, 3e-6, 2e-6, 1.5e-6, 1.2e-6, 1.05e-6, 1e-6, 9.5e-7, 8e-7,
        5e-7, 2e-7, 1e-7, 1e-8, 1e-9, 0.0,
    ];
    let mut previous: Option<(f64, f64)> = None;
    let mut final_p = 0.0;
    for &d in &deltas {
        let alphas = AlphaVector::new(vec![1.0, 1.0 + d]).unwrap();
        let probs = cr_sched_core::closed_form_k2(&alphas, &cfg()).map_err(|e| e.to_string())?;
        let p = probs.probs()[0];
        if let Some((prev_d, prev_p)) = previous {
            // Allow the function's own drift (slope ~ 1/6 in delta) on top of
            // the 1e-6 continuity budget for the method switch.
            let budget = 1e-6 + (prev_d - d);
            ensure(
                (p - prev_p).abs() < budget,
                format!("jump {:.2e} between delta {prev_d} and {d}", (p - prev_p).abs()),
            )?;
        }
        previous = Some((d, p));
        final_p = p;
    }
    ensure(
        (final_p - 0.5).abs() < 1e-6,
        format!("limit {final_p} not within 1e-6 of 0.5"),
    )?;
    Ok(format!("sweep continuous; limit |p - 1/2| = {:.1e}", (final_p - 0.5).abs()))
}

fn simulator_determinism() -> CriterionOutcome {
    let mut scenario = preset_scenario("fig3").expect("known preset");
    scenario.record_snr = true;
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_monte_carlo(&scenario))
        .map_err(|e| e.to_string())?;
    for workers in [2, 4, 8] {
        let parallel = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .unwrap()
            .install(|| run_monte_carlo(&scenario))
            .map_err(|e| e.to_string())?;
        ensure(
            parallel == single,
            format!("report with {workers} workers differs from single-threaded run"),
        )?;
    }
    Ok("bit-identical reports with 1, 2, 4, and 8 workers".to_string())
}

fn metric_equivalence() -> CriterionOutcome {
    let scenario = preset_scenario("fig2").expect("known preset");
    let primary = PrimarySide::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc9);
    let k = scenario.users.len();
    for trial in 0..10_000 {
        let gains_sd: Vec<f64> = scenario
            .users
            .iter()
            .map(|u| sample_exponential(u.delta_sd_sq, &mut rng).unwrap())
            .collect();
        let gains_sp: Vec<f64> = scenario
            .users
            .iter()
            .map(|u| sample_exponential(u.delta_sp_sq, &mut rng).unwrap())
            .collect();
        let g_pd = sample_exponential(primary.delta_pd_sq, &mut rng).unwrap();

        let by_metric = select_user(&gains_sd, &gains_sp).map_err(|e| e.to_string())?;
        let by_snr = (0..k)
            .max_by(|&i, &j| {
                let snr = |u: usize| {
                    instantaneous_snr(gains_sd[u], gains_sp[u], g_pd, &primary, PowerMode::Approx)
                        .unwrap()
                };
                snr(i).total_cmp(&snr(j))
            })
            .unwrap();
        ensure(
            by_metric == by_snr,
            format!("trial {trial}: metric picks {by_metric}, SNR picks {by_snr}"),
        )?;
    }

    // Sanity that quadrature agrees here too: equivalence is about argmax,
    // not about any particular probability level.
    let alphas = scenario.alpha_vector().map_err(|e| e.to_string())?;
    let _ = quadrature_selection(&alphas, 1, &cfg()).map_err(|e| e.to_string())?;
    Ok("argmax of the gain ratio equals argmax of the SNR in all 10000 trials".to_string())
}
