//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Tolerances and case counts are pinned here; the underlying campaigns live
//! in the library so the CLI `verify` command runs the same checks.

use std::time::Instant;

use uppertail::bounds::{bound_induced, bound_subgraph, SubgraphMode, SubgraphParams};
use uppertail::generators::{self, InstanceProfile};
use uppertail::numeric::for_each_subset;
use uppertail::pattern::{analyze_density, s_param, Exposure, Pattern, SubgraphModel};
use uppertail::sampler::{mc_tail, Regime, TailModel, Target};
use uppertail::verify::{
    bk_campaign, bk_increasing_campaign, bound_validity_campaign, chernoff_campaign,
    decomposition_campaign, mu_consistency_campaign, sparsifier_campaign, VerifySuite,
};

const SEED: u64 = 20240809;

fn conclude(criterion: u32, what: &str, pass: bool) {
    println!("[{}] criterion {criterion}: {what}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {criterion} failed: {what}");
}

#[test]
fn criterion_01_generator_counts() {
    let t0 = Instant::now();
    let ap = generators::gen_ap(10, 3).unwrap();
    let schur = generators::gen_schur(10).unwrap();
    let quad = generators::gen_additive_quadruples(4).unwrap();
    let mut ok = ap.edge_count() == 20 && schur.edge_count() == 20 && quad.edge_count() == 1;
    // independent closed-form oracles
    ok &= generators::ap_count(10, 3) == 20 && generators::schur_count(10) == 20;
    // quadruple oracle: exhaustive scan over 4-subsets of [4]
    let mut brute = 0;
    let verts: Vec<u32> = (1..=4).collect();
    for_each_subset(&verts, 4, |s| {
        let total: u32 = s.iter().sum();
        if total % 2 == 0 {
            let mut hit = false;
            for_each_subset(s, 2, |pair| {
                hit |= 2 * (pair[0] + pair[1]) == total;
            });
            if hit {
                brute += 1;
            }
        }
    });
    ok &= brute == 1;
    // counts match the formulas across a sweep
    for n in 3..=40u32 {
        ok &= generators::gen_ap(n, 3).unwrap().edge_count() as u64 == generators::ap_count(n as u64, 3);
        ok &= generators::gen_schur(n).unwrap().edge_count() as u64 == generators::schur_count(n as u64);
    }
    let elapsed = t0.elapsed();
    ok &= elapsed.as_secs_f64() < 1.0;
    conclude(1, &format!("generator counts match oracles in {elapsed:.2?}"), ok);
}

#[test]
fn criterion_02_parameter_correctness() {
    let rep = mu_consistency_campaign(SEED, 50);
    conclude(
        2,
        &format!(
            "mu profiles equal the conditional-expectation oracle on {} random hypergraphs{}",
            rep.cases,
            rep.violations.first().map(|v| format!(" ({v})")).unwrap_or_default()
        ),
        rep.passed(),
    );
}

#[test]
fn criterion_03_chernoff_exact_desk_scale() {
    let t0 = Instant::now();
    let rep = chernoff_campaign(SEED, 200);
    let elapsed = t0.elapsed();
    conclude(
        3,
        &format!(
            "exact Z_C tails below every bound form on {} instances in {elapsed:.2?}{}",
            rep.cases,
            rep.violations.first().map(|v| format!(" ({v})")).unwrap_or_default()
        ),
        rep.passed() && elapsed.as_secs() < 60,
    );
}

#[test]
fn criterion_04_bk_desk_scale() {
    let t0 = Instant::now();
    let product = bk_campaign(SEED, 10_000);
    let increasing = bk_increasing_campaign(SEED, 2_000);
    let elapsed = t0.elapsed();
    conclude(
        4,
        &format!(
            "disjoint occurrence bounded by the product on {} + {} collections in {elapsed:.2?}",
            product.cases, increasing.cases
        ),
        product.passed() && increasing.passed() && elapsed.as_secs() < 300,
    );
}

#[test]
fn criterion_05_sparsifier_soundness() {
    let rep = sparsifier_campaign(SEED, 1_000);
    conclude(
        5,
        &format!(
            "degree reduction, budgets and maximality on {} fuzz cases{}",
            rep.cases,
            rep.violations.first().map(|v| format!(" ({v})")).unwrap_or_default()
        ),
        rep.passed(),
    );
}

#[test]
fn criterion_06_decomposition_implication() {
    let rep = decomposition_campaign(SEED, 1_000);
    conclude(
        6,
        &format!(
            "good events imply the weight inequality on {} sampled runs{}",
            rep.cases,
            rep.violations.first().map(|v| format!(" ({v})")).unwrap_or_default()
        ),
        rep.passed(),
    );
}

#[test]
fn criterion_07_bound_validity_grid() {
    let t0 = Instant::now();
    let rep = bound_validity_campaign(false);
    let elapsed = t0.elapsed();
    conclude(
        7,
        &format!(
            "exact tails below every applicable bound over {} grid cells in {elapsed:.2?}{}",
            rep.cases,
            rep.violations.first().map(|v| format!(" ({v})")).unwrap_or_default()
        ),
        rep.passed() && elapsed.as_secs() < 600,
    );
}

#[test]
fn criterion_08_exponent_shape_large_n() {
    let t0 = Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    for &n in &[1_000u32, 10_000] {
        let profile = generators::ap_instance_profile(n, 3).unwrap();
        // log-spaced p from 1/n to 0.5
        let lo = (1.0 / n as f64).ln();
        let hi = 0.5f64.ln();
        for i in 0..=8 {
            let p = (lo + (hi - lo) * i as f64 / 8.0).exp();
            let rep = bound_induced(&profile, 1.0, p).unwrap();
            if !rep.applicable() {
                ok = false;
                detail = format!("n={n} p={p:.4}: not applicable");
                break;
            }
            // the balancedness exponent is 1/q = 1/2
            if (rep.constants["alpha"] - 0.5).abs() > 1e-15 {
                ok = false;
                detail = format!("n={n} p={p:.4}: alpha != 1/2");
                break;
            }
            // exponent equals c_final * min(mu, sqrt(mu) log(e/p)) exactly
            let mu = rep.constants["mu"];
            let psi = mu.min(mu.sqrt() * (std::f64::consts::E / p).ln());
            let c = rep.constants["c_final"];
            if (rep.raw_log_bound + c * psi).abs() > 1e-9 * (1.0 + c * psi) {
                ok = false;
                detail = format!("n={n} p={p:.4}: exponent mismatch");
                break;
            }
        }
    }
    let elapsed = t0.elapsed();
    ok &= elapsed.as_secs() < 60;
    conclude(
        8,
        &format!("poisson/clustered exponent shape with alpha = 1/2 in {elapsed:.2?} {detail}"),
        ok,
    );
}

#[test]
fn criterion_09_q_equals_k_exclusion_and_np_scaling() {
    // refusal for complete hosts
    let complete = generators::gen_complete(8, 3).unwrap();
    let prof = InstanceProfile::from_hypergraph(&complete, 3).unwrap();
    let refused = bound_induced(&prof, 1.0, 0.3).is_err();
    // measured tail exponent scales like N p across hosts
    let p = 0.3;
    let mut t_of_n = Vec::new();
    for &n in &[40u32, 60, 80] {
        let h = generators::gen_complete(n, 3).unwrap();
        let mu = h.mu_profile(p).unwrap().mu;
        let model = TailModel {
            target: Target::Hyper(h),
            regime: Regime::VertexBinomial { p },
            seed: SEED,
        };
        let est = mc_tail(&model, 2.0 * mu, 100_000, 0.95).unwrap();
        assert!(est.successes > 0, "tail immeasurably small at N = {n}");
        t_of_n.push((n, -est.estimate.ln()));
    }
    let mut scaling_ok = true;
    for i in 0..t_of_n.len() {
        for j in i + 1..t_of_n.len() {
            let (n1, t1) = t_of_n[i];
            let (n2, t2) = t_of_n[j];
            let measured = t2 / t1;
            let predicted = n2 as f64 / n1 as f64; // same p, so Np ratio
            if measured < predicted / 2.0 || measured > predicted * 2.0 {
                scaling_ok = false;
            }
        }
    }
    conclude(
        9,
        &format!(
            "q = k refused; measured exponents {:?} scale like N p within factor 2",
            t_of_n.iter().map(|(n, t)| format!("N={n}:{t:.3}")).collect::<Vec<_>>()
        ),
        refused && scaling_ok,
    );
}

#[test]
fn criterion_10_subgraph_spot_check() {
    // density analyzer classifications
    let k3 = analyze_density(&Pattern::complete(3), 8).unwrap();
    let mm = analyze_density(&Pattern::matching(2), 8).unwrap();
    let classes_ok = k3.strictly_balanced
        && (k3.beta - 1.0).abs() < 1e-12
        && s_param(&Pattern::complete(3)) == 2
        && mm.two_balanced
        && !mm.strictly_balanced;
    // Monte Carlo tails stay below every applicable bound
    let n = 14usize;
    let mut checked = 0;
    let mut ok = classes_ok;
    let mut detail = String::new();
    for pattern in [Pattern::star(2), Pattern::complete(3)] {
        for &p in &[0.05f64, 0.1] {
            let model =
                SubgraphModel::new(pattern.clone(), Exposure::Edge, n).unwrap();
            let mu = model.mu(p);
            let tail_model = TailModel {
                target: Target::Graph { pattern: pattern.clone(), n },
                regime: Regime::EdgeBinomial { p },
                seed: SEED ^ 0x10,
            };
            for &eps in &[0.5f64, 1.0, 2.0] {
                let threshold = (1.0 + eps) * mu;
                let est = mc_tail(&tail_model, threshold, 1_000_000, 0.95).unwrap();
                for mode in [SubgraphMode::Small, SubgraphMode::Gauss, SubgraphMode::Large] {
                    let params = SubgraphParams {
                        eps,
                        t: eps * mu,
                        ..Default::default()
                    };
                    let rep = bound_subgraph(&pattern, n, p, mode, &params).unwrap();
                    if let Some(value) = rep.bound_value() {
                        checked += 1;
                        if est.estimate > value * (1.0 + 1e-9) {
                            ok = false;
                            detail = format!(
                                "{}: estimate {} above bound {value} (p={p} eps={eps})",
                                rep.theorem, est.estimate
                            );
                        }
                    }
                }
            }
        }
    }
    ok &= checked > 0;
    conclude(
        10,
        &format!("density classes match; MC tails below {checked} applicable bounds {detail}"),
        ok,
    );
}

#[test]
fn criterion_11_reproducibility() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let suite = VerifySuite::run(SEED, false);
            (suite.to_csv(), suite.to_json(), suite.passed())
        })
    };
    let first = run(8);
    let second = run(8);
    let single = run(1);
    let ok = first.2
        && first.0 == second.0
        && first.1 == second.1
        && first.0 == single.0
        && first.1 == single.1;
    conclude(
        11,
        "full verify suite byte-identical across repeated runs and thread counts 1 vs 8",
        ok,
    );
}
