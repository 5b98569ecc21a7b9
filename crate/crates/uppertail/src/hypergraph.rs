//! Weighted uniform hypergraphs and their structural parameters: the edge
//! neighbourhoods `Γ_U`, the maximum `j`-degrees `Δ_j`, and the averaged
//! profile `μ, μ_1..μ_k` of a random induced subhypergraph at vertex survival
//! probability `p`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{for_each_subset, KahanSum};

/// A weighted hypergraph on the dense vertex set `{1, .., n}`. Edges are
/// strictly increasing label tuples of size at most `k`, weights lie in
/// `[0, weight_cap]`. Immutable after construction; share freely across
/// threads.
#[derive(Clone, Debug)]
pub struct Hypergraph {
    n: u32,
    k: usize,
    weight_cap: f64,
    edges: Vec<Vec<u32>>,
    weights: Vec<f64>,
    incidence: Vec<Vec<u32>>,
}

/// Canonical JSON interchange shape shared by all modules and the CLI.
#[derive(Serialize, Deserialize)]
struct HypergraphJson {
    n: u32,
    k: usize,
    #[serde(rename = "L")]
    weight_cap: f64,
    edges: Vec<Vec<u32>>,
    weights: Vec<f64>,
}

/// Maximum `j`-degrees `Δ_1..Δ_k` together with the smallest `j` whose degree
/// stays under a supplied cap.
#[derive(Clone, Debug, Serialize)]
pub struct DegreeProfile {
    /// `deltas[j-1]` is `Δ_j`.
    pub deltas: Vec<u64>,
    /// The cap `D` the profile was computed against.
    pub cap: f64,
    /// Smallest `j` with `Δ_j <= cap`, if any.
    pub q: Option<usize>,
}

/// Expected weight `μ` of the random induced subhypergraph and the maximum
/// average-effect vector `μ_1..μ_k` at inclusion probability `p`.
#[derive(Clone, Debug, Serialize)]
pub struct MuProfile {
    pub p: f64,
    pub mu: f64,
    /// `mu_j[j-1]` is `μ_j`.
    pub mu_j: Vec<f64>,
}

/// One clause of an assumption checklist.
#[derive(Clone, Debug, Serialize)]
pub struct ChecklistItem {
    pub clause: String,
    pub pass: bool,
    pub lhs: f64,
    pub rhs: f64,
}

/// Per-clause verdicts for the structural assumptions of a bound evaluation.
#[derive(Clone, Debug, Serialize)]
pub struct Checklist {
    pub items: Vec<ChecklistItem>,
    pub pass: bool,
}

impl Checklist {
    pub fn new(items: Vec<ChecklistItem>) -> Self {
        let pass = items.iter().all(|c| c.pass);
        Checklist { items, pass }
    }
}

impl Hypergraph {
    pub fn new(
        n: u32,
        k: usize,
        weight_cap: f64,
        edges: Vec<Vec<u32>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::input("edge size bound k must be >= 1"));
        }
        if !(weight_cap >= 0.0) {
            return Err(Error::input("weight cap L must be nonnegative"));
        }
        if edges.len() != weights.len() {
            return Err(Error::input(format!(
                "{} edges but {} weights",
                edges.len(),
                weights.len()
            )));
        }
        let mut seen: HashMap<&[u32], usize> = HashMap::with_capacity(edges.len());
        for (i, f) in edges.iter().enumerate() {
            if f.is_empty() || f.len() > k {
                return Err(Error::input(format!(
                    "edge {i} has size {} outside [1, {k}]",
                    f.len()
                )));
            }
            if !f.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::input(format!("edge {i} is not strictly increasing")));
            }
            if f[0] < 1 || *f.last().unwrap() > n {
                return Err(Error::input(format!("edge {i} has labels outside [1, {n}]")));
            }
            if seen.insert(f.as_slice(), i).is_some() {
                return Err(Error::input(format!("duplicate edge {f:?}")));
            }
            let w = weights[i];
            if !(0.0..=weight_cap).contains(&w) {
                return Err(Error::input(format!(
                    "weight {w} of edge {i} outside [0, {weight_cap}]"
                )));
            }
        }
        drop(seen);
        let mut incidence = vec![Vec::new(); n as usize + 1];
        for (i, f) in edges.iter().enumerate() {
            for &v in f {
                incidence[v as usize].push(i as u32);
            }
        }
        Ok(Hypergraph { n, k, weight_cap, edges, weights, incidence })
    }

    /// Unit-weight hypergraph with `L = 1`.
    pub fn unit(n: u32, k: usize, edges: Vec<Vec<u32>>) -> Result<Self> {
        let m = edges.len();
        Hypergraph::new(n, k, 1.0, edges, vec![1.0; m])
    }

    /// Same edge set with every weight replaced by `w` (and `L = w`).
    /// Generators emit unit weights; this is the constant multiplier used to
    /// switch to ordered counting conventions.
    pub fn with_uniform_weight(&self, w: f64) -> Result<Self> {
        Hypergraph::new(self.n, self.k, w, self.edges.clone(), vec![w; self.edges.len()])
    }

    pub fn n_vertices(&self) -> u32 {
        self.n
    }

    pub fn max_edge_size(&self) -> usize {
        self.k
    }

    pub fn weight_cap(&self) -> f64 {
        self.weight_cap
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, i: usize) -> &[u32] {
        &self.edges[i]
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn incident_edges(&self, v: u32) -> &[u32] {
        &self.incidence[v as usize]
    }

    pub fn total_weight(&self) -> f64 {
        let mut s = KahanSum::new();
        for &w in &self.weights {
            s.add(w);
        }
        s.value()
    }

    pub fn min_weight(&self) -> Option<f64> {
        self.weights.iter().cloned().reduce(f64::min)
    }

    pub fn max_weight(&self) -> Option<f64> {
        self.weights.iter().cloned().reduce(f64::max)
    }

    pub fn is_uniform(&self, k: usize) -> bool {
        self.edges.iter().all(|f| f.len() == k)
    }

    /// `Γ_U`: indices of every edge containing all of `u`, sorted ascending.
    pub fn gamma(&self, u: &[u32]) -> Result<Vec<usize>> {
        if u.is_empty() {
            return Err(Error::input("gamma: U must be nonempty"));
        }
        for &v in u {
            if v < 1 || v > self.n {
                return Err(Error::input(format!("gamma: vertex {v} outside [1, {}]", self.n)));
            }
        }
        let mut set: Vec<u32> = u.to_vec();
        set.sort_unstable();
        set.dedup();
        // scan the shortest incidence list among the members of U
        let pivot = *set
            .iter()
            .min_by_key(|&&v| self.incidence[v as usize].len())
            .unwrap();
        let mut out = Vec::new();
        'edges: for &ei in &self.incidence[pivot as usize] {
            let f = &self.edges[ei as usize];
            for &v in &set {
                if f.binary_search(&v).is_err() {
                    continue 'edges;
                }
            }
            out.push(ei as usize);
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Maximum over `j`-sets `U` of `Σ_{f ∈ Γ_U} term(f)`. Only `U` inside an
    /// edge can contribute, so the scan walks `j`-subsets of edges grouped by
    /// their minimum vertex instead of all `C(N, j)` vertex subsets.
    fn max_over_edge_subsets(&self, j: usize, term: impl Fn(&[u32]) -> f64) -> f64 {
        let mut best = 0.0f64;
        if j == 1 {
            for v in 1..=self.n as usize {
                if self.incidence[v].is_empty() {
                    continue;
                }
                let mut s = KahanSum::new();
                for &ei in &self.incidence[v] {
                    s.add(term(&self.edges[ei as usize]));
                }
                best = best.max(s.value());
            }
            return best;
        }
        // group keys by the minimum vertex of U to keep the per-round map small
        let mut acc: HashMap<Vec<u32>, KahanSum> = HashMap::new();
        let mut rest: Vec<u32> = Vec::new();
        for v in 1..=self.n {
            acc.clear();
            for &ei in &self.incidence[v as usize] {
                let f = &self.edges[ei as usize];
                rest.clear();
                rest.extend(f.iter().copied().filter(|&u| u > v));
                if rest.len() + 1 < j {
                    continue;
                }
                let t = term(f);
                for_each_subset(&rest, j - 1, |s| {
                    acc.entry(s.to_vec()).or_default().add(t);
                });
            }
            for kah in acc.values() {
                best = best.max(kah.value());
            }
        }
        best
    }

    /// `Δ_j`: the maximum number of edges containing a fixed `j`-set.
    pub fn delta(&self, j: usize) -> Result<u64> {
        if j == 0 || j > self.k {
            return Err(Error::input(format!("delta: j = {j} outside [1, {}]", self.k)));
        }
        Ok(self.max_over_edge_subsets(j, |_| 1.0).round() as u64)
    }

    /// All of `Δ_1..Δ_k` plus the smallest `j` with `Δ_j <= cap`.
    pub fn degree_profile(&self, cap: f64) -> DegreeProfile {
        let deltas: Vec<u64> = (1..=self.k).map(|j| self.delta(j).unwrap()).collect();
        let q = deltas.iter().position(|&d| (d as f64) <= cap).map(|i| i + 1);
        DegreeProfile { deltas, cap, q }
    }

    /// `μ = E w(H_p)` and `μ_j = max_U Σ_{f ∈ Γ_U} p^{|f|-j}` for `j = 1..k`.
    pub fn mu_profile(&self, p: f64) -> Result<MuProfile> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::input(format!("mu_profile: p = {p} outside [0, 1]")));
        }
        let mut mu = KahanSum::new();
        for (f, &w) in self.edges.iter().zip(&self.weights) {
            mu.add(w * p.powi(f.len() as i32));
        }
        let mu_j = (1..=self.k)
            .map(|j| self.max_over_edge_subsets(j, |f| p.powi((f.len() - j) as i32)))
            .collect();
        Ok(MuProfile { p, mu: mu.value(), mu_j })
    }

    /// Checklist for the structural assumptions: edge sizes under `k`, weights
    /// under `l`, vertex count under `n_cap`, and `Δ_q <= d` for the supplied
    /// `(q, d)` pair. The empty hypergraph passes vacuously.
    pub fn validate_assumptions(
        &self,
        k: usize,
        l: f64,
        n_cap: u32,
        q: usize,
        d: f64,
    ) -> Result<Checklist> {
        let max_size = self.edges.iter().map(|f| f.len()).max().unwrap_or(0);
        let max_w = self.max_weight().unwrap_or(0.0);
        let delta_q = if q >= 1 && q <= self.k { self.delta(q)? } else { 0 };
        Ok(Checklist::new(vec![
            ChecklistItem {
                clause: "max |f| <= k".into(),
                pass: max_size <= k,
                lhs: max_size as f64,
                rhs: k as f64,
            },
            ChecklistItem {
                clause: "max w_f <= L".into(),
                pass: max_w <= l,
                lhs: max_w,
                rhs: l,
            },
            ChecklistItem {
                clause: "v(H) <= N".into(),
                pass: self.n <= n_cap,
                lhs: self.n as f64,
                rhs: n_cap as f64,
            },
            ChecklistItem {
                clause: "delta_q <= D".into(),
                pass: delta_q as f64 <= d,
                lhs: delta_q as f64,
                rhs: d,
            },
        ]))
    }

    /// Sub-hypergraph consisting of the listed edges (host vertex set kept).
    pub fn induced_by_edges(&self, idxs: &[usize]) -> Hypergraph {
        let edges: Vec<Vec<u32>> = idxs.iter().map(|&i| self.edges[i].clone()).collect();
        let weights: Vec<f64> = idxs.iter().map(|&i| self.weights[i]).collect();
        Hypergraph::new(self.n, self.k, self.weight_cap, edges, weights)
            .expect("edge subset of a valid hypergraph is valid")
    }

    /// Edges fully contained in `verts`, as (sub-hypergraph, original edge
    /// indices). `verts` must be sorted ascending.
    pub fn induced_by_vertices(&self, verts: &[u32]) -> (Hypergraph, Vec<usize>) {
        debug_assert!(verts.windows(2).all(|w| w[0] < w[1]));
        let mut keep = Vec::new();
        let mut mark = vec![false; self.n as usize + 1];
        for &v in verts {
            mark[v as usize] = true;
        }
        for (i, f) in self.edges.iter().enumerate() {
            if f.iter().all(|&v| mark[v as usize]) {
                keep.push(i);
            }
        }
        (self.induced_by_edges(&keep), keep)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&HypergraphJson {
            n: self.n,
            k: self.k,
            weight_cap: self.weight_cap,
            edges: self.edges.clone(),
            weights: self.weights.clone(),
        })
        .expect("hypergraph serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: HypergraphJson =
            serde_json::from_str(s).map_err(|e| Error::input(format!("bad hypergraph JSON: {e}")))?;
        Hypergraph::new(raw.n, raw.k, raw.weight_cap, raw.edges, raw.weights)
    }
}
