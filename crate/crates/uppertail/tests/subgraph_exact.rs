//! Exact validation of the subgraph-count evaluators: at small host size the
//! edge-exposure encoding makes the copy-count distribution exactly
//! enumerable, so every applicable bound mode can be checked against the
//! true tail rather than Monte Carlo.

use uppertail::bounds::{bound_subgraph, SubgraphMode, SubgraphParams};
use uppertail::generators::InstanceProfile;
use uppertail::oracle::exact_distribution;
use uppertail::pattern::{encode_edge_exposure, Exposure, Pattern, SubgraphModel};
use uppertail::sampler::Regime;
use uppertail::verify::evaluate_theorems;

#[test]
fn subgraph_bounds_dominate_exact_tails_via_encoding() {
    let n = 6usize;
    let mut checked = 0u32;
    for pattern in [Pattern::star(2), Pattern::complete(3)] {
        let enc = encode_edge_exposure(&pattern, n).unwrap();
        let model = SubgraphModel::new(pattern.clone(), Exposure::Edge, n).unwrap();
        for &p in &[0.1f64, 0.3] {
            // vertex-sampling the encoding is exactly edge-sampling the host
            let dist = exact_distribution(&enc, Regime::VertexBinomial { p }).unwrap();
            let mu = model.mu(p);
            assert!((dist.mean - mu).abs() < 1e-9);
            for &eps in &[0.5f64, 1.0, 2.0] {
                let exact = dist.tail((1.0 + eps) * mu);
                for mode in [SubgraphMode::Small, SubgraphMode::Gauss, SubgraphMode::Large] {
                    let params = SubgraphParams { eps, t: eps * mu, ..Default::default() };
                    let rep = bound_subgraph(&pattern, n, p, mode, &params).unwrap();
                    if let Some(value) = rep.bound_value() {
                        checked += 1;
                        assert!(
                            exact <= value * (1.0 + 1e-9) + 1e-12,
                            "{} {:?} p={p} eps={eps}: exact {exact} > bound {value}",
                            rep.theorem,
                            mode
                        );
                    }
                }
            }
        }
    }
    assert!(checked >= 12, "only {checked} applicable mode cells");
}

#[test]
fn balanced_variant_dominates_exact_tails_for_perfect_matching() {
    // 2K_2 is balanced but not strictly balanced: only the balanced variant
    // (and, for small p, the sub-Gaussian mode) may produce numbers
    let pattern = Pattern::matching(2);
    let n = 6usize;
    let enc = encode_edge_exposure(&pattern, n).unwrap();
    let model = SubgraphModel::new(pattern.clone(), Exposure::Edge, n).unwrap();
    let mut applicable = 0u32;
    for &p in &[0.05f64, 0.3] {
        let dist = exact_distribution(&enc, Regime::VertexBinomial { p }).unwrap();
        let mu = model.mu(p);
        for &eps in &[1.0f64, 2.0] {
            let exact = dist.tail((1.0 + eps) * mu);
            for mode in [SubgraphMode::Gauss, SubgraphMode::LargeBalanced] {
                let params = SubgraphParams { eps, t: eps * mu, ..Default::default() };
                let rep = bound_subgraph(&pattern, n, p, mode, &params).unwrap();
                if let Some(value) = rep.bound_value() {
                    applicable += 1;
                    assert!(
                        exact <= value * (1.0 + 1e-9) + 1e-12,
                        "{} {:?} p={p} eps={eps}: exact {exact} > bound {value}",
                        rep.theorem,
                        mode
                    );
                }
            }
            // the strictly-balanced modes must refuse the pattern
            let rep = bound_subgraph(
                &pattern,
                n,
                p,
                SubgraphMode::Large,
                &SubgraphParams { eps, ..Default::default() },
            )
            .unwrap();
            assert!(!rep.applicable());
        }
    }
    assert!(applicable >= 4, "only {applicable} applicable cells");
}

#[test]
fn encoding_flows_through_the_standard_battery() {
    // the encoding is an ordinary hypergraph: the whole theorem battery must
    // stay valid on it
    let pattern = Pattern::complete(3);
    let n = 6usize;
    let enc = encode_edge_exposure(&pattern, n).unwrap();
    let q = pattern.e() + 1 - pattern.min_degree();
    let profile = InstanceProfile::from_hypergraph(&enc, q).unwrap();
    for &p in &[0.1f64, 0.25] {
        let dist = exact_distribution(&enc, Regime::VertexBinomial { p }).unwrap();
        let mu = profile.mu(p);
        for &eps in &[0.5f64, 1.0] {
            let exact = dist.tail((1.0 + eps) * mu);
            for rep in evaluate_theorems(&enc, &profile, p, eps).unwrap() {
                if let Some(value) = rep.bound_value() {
                    assert!(
                        exact <= value * (1.0 + 1e-9) + 1e-12,
                        "{} p={p} eps={eps}: exact {exact} > bound {value}",
                        rep.theorem
                    );
                }
            }
        }
    }
}
