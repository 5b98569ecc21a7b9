//! Fixed pattern graphs for subgraph counting in random graphs: density and
//! balancedness analysis, and the two hypergraph encodings of the count — one
//! whose vertices are the edges of `K_n` (edge exposure), one whose vertices
//! are `[n]` (vertex exposure) — together with their structural profiles.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::numeric::{falling_factorial, KahanSum};

/// A small simple graph on `{0, .., v-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    v: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<u16>,
}

impl Pattern {
    pub fn new(v: usize, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        if v == 0 || v > 12 {
            return Err(Error::input("pattern: vertex count must be in [1, 12]"));
        }
        for e in edges.iter_mut() {
            if e.0 == e.1 || e.0 >= v || e.1 >= v {
                return Err(Error::input(format!("pattern: bad edge {e:?}")));
            }
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let mut adj = vec![0u16; v];
        for &(a, b) in &edges {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        Ok(Pattern { v, edges, adj })
    }

    pub fn complete(v: usize) -> Pattern {
        let edges = (0..v)
            .flat_map(|a| (a + 1..v).map(move |b| (a, b)))
            .collect();
        Pattern::new(v, edges).unwrap()
    }

    /// `K_{1,r}`: centre 0, leaves 1..=r.
    pub fn star(r: usize) -> Pattern {
        Pattern::new(r + 1, (1..=r).map(|i| (0, i)).collect()).unwrap()
    }

    /// Perfect matching with `m` disjoint edges.
    pub fn matching(m: usize) -> Pattern {
        Pattern::new(2 * m, (0..m).map(|i| (2 * i, 2 * i + 1)).collect()).unwrap()
    }

    pub fn path(v: usize) -> Pattern {
        Pattern::new(v, (0..v.saturating_sub(1)).map(|i| (i, i + 1)).collect()).unwrap()
    }

    pub fn cycle(v: usize) -> Pattern {
        Pattern::new(v, (0..v).map(|i| (i, (i + 1) % v)).collect()).unwrap()
    }

    pub fn by_name(name: &str) -> Result<Pattern> {
        match name {
            "k2" => Ok(Pattern::complete(2)),
            "k3" | "triangle" => Ok(Pattern::complete(3)),
            "k4" => Ok(Pattern::complete(4)),
            "k12" | "cherry" => Ok(Pattern::star(2)),
            "k13" => Ok(Pattern::star(3)),
            "2k2" => Ok(Pattern::matching(2)),
            "p4" => Ok(Pattern::path(4)),
            "c4" => Ok(Pattern::cycle(4)),
            other => Err(Error::input(format!("unknown pattern name: {other}"))),
        }
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn e(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] & (1 << b) != 0
    }

    pub fn degree(&self, x: usize) -> usize {
        self.adj[x].count_ones() as usize
    }

    pub fn min_degree(&self) -> usize {
        (0..self.v).map(|x| self.degree(x)).min().unwrap_or(0)
    }

    /// Number of automorphisms, by permutation enumeration.
    pub fn aut_count(&self) -> u64 {
        let mut count = 0;
        let mut perm: Vec<usize> = (0..self.v).collect();
        permute(&mut perm, 0, &mut |p| {
            let ok = self
                .edges
                .iter()
                .all(|&(a, b)| self.has_edge(p[a], p[b]));
            if ok {
                count += 1;
            }
        });
        count
    }

    /// Exact number of copies (subgraphs isomorphic to this pattern) in `K_n`.
    pub fn copies_in_complete(&self, n: u64) -> u128 {
        if (n as usize) < self.v {
            return 0;
        }
        falling_factorial(n as u128, self.v as u128) / self.aut_count() as u128
    }

    /// Number of edges of the induced subgraph on the vertex bitmask.
    fn induced_edge_count(&self, mask: u16) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| mask & (1 << a) != 0 && mask & (1 << b) != 0)
            .count()
    }
}

fn permute(perm: &mut Vec<usize>, i: usize, visit: &mut impl FnMut(&[usize])) {
    if i == perm.len() {
        visit(perm);
        return;
    }
    for j in i..perm.len() {
        perm.swap(i, j);
        permute(perm, i + 1, visit);
        perm.swap(i, j);
    }
}

/// Densities over subgraph classes plus the balancedness flags. `beta` is the
/// margin `min (v_J e/v - e_J)` over proper subgraphs with at least one edge;
/// `beta_dual` is the companion margin `min (v_J - e_J v/e)`.
#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub v: usize,
    pub e: usize,
    pub d: f64,
    pub d2: f64,
    pub balanced: bool,
    pub strictly_balanced: bool,
    pub two_balanced: bool,
    pub strictly_two_balanced: bool,
    pub beta: f64,
    pub beta_dual: f64,
    /// (v_J, e_J) of every induced proper subgraph with e_J >= 1.
    pub proper_subgraphs: Vec<(usize, usize)>,
}

/// Exhaustive density analysis; refuses patterns above the vertex cap.
pub fn analyze_density(p: &Pattern, cap: usize) -> Result<DensityReport> {
    if p.e() == 0 {
        return Err(Error::input("analyze_density: pattern needs at least one edge"));
    }
    if p.v() > cap {
        return Err(Error::too_large(format!(
            "analyze_density: pattern has {} vertices, cap is {cap}",
            p.v()
        )));
    }
    let (v, e) = (p.v(), p.e());
    let d = e as f64 / v as f64;
    let d2 = if v >= 3 {
        (e as f64 - 1.0) / (v as f64 - 2.0)
    } else {
        f64::INFINITY
    };
    let mut balanced = true;
    let mut strictly_balanced = true;
    let mut two_balanced = e >= 2;
    let mut strictly_two_balanced = e >= 2;
    let mut beta = f64::INFINITY;
    let mut beta_dual = f64::INFINITY;
    let mut proper = Vec::new();
    // induced subgraphs on proper vertex subsets dominate every density
    // comparison; spanning proper subgraphs only matter for the beta margins
    let full: u16 = (1 << v) - 1;
    for mask in 1..full {
        let vj = mask.count_ones() as usize;
        let ej = p.induced_edge_count(mask);
        if ej >= 1 {
            proper.push((vj, ej));
            beta = beta.min(vj as f64 * d - ej as f64);
            beta_dual = beta_dual.min(vj as f64 - ej as f64 / d);
        }
        let dj = ej as f64 / vj as f64;
        if dj > d + 1e-12 {
            balanced = false;
        }
        if dj >= d - 1e-12 {
            strictly_balanced = false;
        }
        if vj >= 3 {
            let dj2 = (ej as f64 - 1.0) / (vj as f64 - 2.0);
            if dj2 > d2 + 1e-12 {
                two_balanced = false;
            }
            if dj2 >= d2 - 1e-12 {
                strictly_two_balanced = false;
            }
        }
    }
    if e >= 2 {
        // spanning subgraph with one edge removed
        beta = beta.min(1.0);
        beta_dual = beta_dual.min(v as f64 / e as f64);
    }
    if e == 0 || !balanced {
        strictly_balanced = false;
    }
    proper.sort_unstable();
    proper.dedup();
    Ok(DensityReport {
        v,
        e,
        d,
        d2,
        balanced,
        strictly_balanced,
        two_balanced,
        strictly_two_balanced,
        beta,
        beta_dual,
        proper_subgraphs: proper,
    })
}

/// `s = min{v - 1, e - δ + 1}`, the exponent scale of the small-expectation
/// subgraph bounds.
pub fn s_param(p: &Pattern) -> usize {
    (p.v() - 1).min(p.e() + 1 - p.min_degree())
}

/// Which hypergraph encoding of the subgraph count is in force.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Exposure {
    /// Vertices of the host hypergraph are the edges of `K_n`; hyperedges are
    /// pattern copies. `k = e`, `N = n^2`, `ℓ = 1`.
    Edge,
    /// Vertices of the host hypergraph are `[n]`; the variable of a `v`-set
    /// counts copies on it. `k = v`, `N = n`, `ℓ = 2`.
    Vertex,
}

/// A pattern-count model at a concrete host size `n`, under one exposure.
#[derive(Clone, Debug)]
pub struct SubgraphModel {
    pub pattern: Pattern,
    pub exposure: Exposure,
    pub n: usize,
}

impl SubgraphModel {
    pub fn new(pattern: Pattern, exposure: Exposure, n: usize) -> Result<Self> {
        if n < pattern.v() {
            return Err(Error::input(format!(
                "subgraph model: host n = {n} below pattern order {}",
                pattern.v()
            )));
        }
        if pattern.e() == 0 {
            return Err(Error::input("subgraph model: pattern needs edges"));
        }
        if pattern.min_degree() == 0 {
            return Err(Error::input("subgraph model: pattern has isolated vertices"));
        }
        Ok(SubgraphModel { pattern, exposure, n })
    }

    pub fn ell(&self) -> usize {
        match self.exposure {
            Exposure::Edge => 1,
            Exposure::Vertex => 2,
        }
    }

    pub fn k(&self) -> usize {
        match self.exposure {
            Exposure::Edge => self.pattern.e(),
            Exposure::Vertex => self.pattern.v(),
        }
    }

    /// Default reduction order: `e - δ + 1` under edge exposure (that many
    /// edges pin the vertex set), `v` under vertex exposure.
    pub fn q(&self) -> usize {
        match self.exposure {
            Exposure::Edge => self.pattern.e() + 1 - self.pattern.min_degree(),
            Exposure::Vertex => self.pattern.v(),
        }
    }

    pub fn big_n(&self) -> f64 {
        match self.exposure {
            Exposure::Edge => (self.n as f64) * (self.n as f64),
            Exposure::Vertex => self.n as f64,
        }
    }

    pub fn s(&self) -> usize {
        s_param(&self.pattern)
    }

    /// `L`: the variable cap. 1 under edge exposure; the number of pattern
    /// copies on a full `v`-set under vertex exposure.
    pub fn l_cap(&self) -> f64 {
        match self.exposure {
            Exposure::Edge => 1.0,
            Exposure::Vertex => {
                (falling_factorial(self.pattern.v() as u128, self.pattern.v() as u128)
                    / self.pattern.aut_count() as u128) as f64
            }
        }
    }

    /// Exact `Δ_q` of the encoding hypergraph at the model's `q`.
    pub fn d_cap(&self) -> Result<f64> {
        match self.exposure {
            Exposure::Vertex => Ok(1.0),
            Exposure::Edge => {
                let q = self.q();
                let mut best = 0u128;
                for cls in self.edge_subset_classes()? {
                    if cls.e_j == q {
                        best = best.max(cls.extension_count(self.n as u64, &self.pattern));
                    }
                }
                Ok(best as f64)
            }
        }
    }

    /// Exact expected copy count at edge probability `p`.
    pub fn mu(&self, p: f64) -> f64 {
        self.pattern.copies_in_complete(self.n as u64) as f64 * p.powi(self.pattern.e() as i32)
    }

    /// Upper bounds on `μ_j` for `j = 1..k`, by the exact extension counts of
    /// the subgraph classes (edge exposure: classes with `e_J = j`; vertex
    /// exposure: induced classes with `v_J = j`).
    pub fn mu_j_bounds(&self, p: f64) -> Result<Vec<f64>> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::input(format!("mu_j_bounds: p = {p} outside [0, 1]")));
        }
        match self.exposure {
            Exposure::Edge => {
                let classes = self.edge_subset_classes()?;
                let e = self.pattern.e();
                Ok((1..=e)
                    .map(|j| {
                        let mut s = KahanSum::new();
                        for cls in classes.iter().filter(|c| c.e_j == j) {
                            s.add(
                                cls.extension_count(self.n as u64, &self.pattern) as f64
                                    * p.powi((e - j) as i32),
                            );
                        }
                        s.value()
                    })
                    .collect())
            }
            Exposure::Vertex => {
                let v = self.pattern.v();
                let e = self.pattern.e();
                let aut = self.pattern.aut_count() as f64;
                Ok((1..=v)
                    .map(|j| {
                        let mut s = KahanSum::new();
                        let full: u16 = (1 << v) - 1;
                        for mask in 1u16..=full {
                            if mask.count_ones() as usize != j {
                                continue;
                            }
                            let ej = self.pattern.induced_edge_count(mask);
                            let ways = falling_factorial(j as u128, j as u128)
                                * falling_factorial((self.n - j) as u128, (v - j) as u128);
                            s.add(ways as f64 / aut * p.powi((e - ej) as i32));
                        }
                        s.value()
                    })
                    .collect())
            }
        }
    }

    /// Isomorphism classes of the pattern's edge subsets.
    fn edge_subset_classes(&self) -> Result<Vec<EdgeSubsetClass>> {
        let e = self.pattern.e();
        if e > 16 {
            return Err(Error::too_large("edge subset enumeration capped at 16 edges"));
        }
        let mut classes: Vec<EdgeSubsetClass> = Vec::new();
        for mask in 1u32..(1 << e) {
            let sub = self.subgraph_of_edges(mask);
            let canon = canonical_code(&sub);
            match classes.iter_mut().find(|c| c.canon == canon) {
                Some(c) => c.count += 1,
                None => classes.push(EdgeSubsetClass {
                    e_j: sub.e(),
                    v_j: sub.v(),
                    aut_j: sub.aut_count(),
                    count: 1,
                    canon,
                }),
            }
        }
        Ok(classes)
    }

    /// The graph spanned by an edge subset, vertices relabelled densely.
    fn subgraph_of_edges(&self, mask: u32) -> Pattern {
        let mut verts: Vec<usize> = Vec::new();
        let mut es = Vec::new();
        for (i, &(a, b)) in self.pattern.edges().iter().enumerate() {
            if mask & (1 << i) != 0 {
                for x in [a, b] {
                    if !verts.contains(&x) {
                        verts.push(x);
                    }
                }
                es.push((a, b));
            }
        }
        verts.sort_unstable();
        let relabel = |x: usize| verts.iter().position(|&y| y == x).unwrap();
        Pattern::new(
            verts.len(),
            es.into_iter().map(|(a, b)| (relabel(a), relabel(b))).collect(),
        )
        .unwrap()
    }
}

/// The edge-exposure encoding as an explicit hypergraph: vertices are the
/// `C(n,2)` pair slots of the host (labelled lexicographically), edges are
/// the pattern copies. Sampling its vertices with probability `p` reproduces
/// the subgraph count in a random graph exactly.
pub fn encode_edge_exposure(pattern: &Pattern, n: usize) -> Result<Hypergraph> {
    if n < pattern.v() || pattern.e() == 0 {
        return Err(Error::input("encode_edge_exposure: host too small or no edges"));
    }
    let copies = pattern.copies_in_complete(n as u64);
    if copies > 2_000_000 {
        return Err(Error::too_large(format!(
            "encode_edge_exposure: {copies} copies exceed the enumeration cap"
        )));
    }
    let pair_label = |a: u32, b: u32| -> u32 {
        // lexicographic rank of (a, b), a < b, 1-based
        (a - 1) * n as u32 - a * (a - 1) / 2 + (b - a)
    };
    let mut edges: BTreeSet<Vec<u32>> = BTreeSet::new();
    let v = pattern.v();
    let mut assignment = vec![0u32; v];
    let mut used = vec![false; n + 1];
    fn rec(
        pattern: &Pattern,
        n: usize,
        depth: usize,
        assignment: &mut [u32],
        used: &mut [bool],
        pair_label: &impl Fn(u32, u32) -> u32,
        edges: &mut BTreeSet<Vec<u32>>,
    ) {
        if depth == assignment.len() {
            let mut tuple: Vec<u32> = pattern
                .edges()
                .iter()
                .map(|&(x, y)| {
                    let (a, b) = (assignment[x], assignment[y]);
                    pair_label(a.min(b), a.max(b))
                })
                .collect();
            tuple.sort_unstable();
            edges.insert(tuple);
            return;
        }
        for cand in 1..=n as u32 {
            if !used[cand as usize] {
                used[cand as usize] = true;
                assignment[depth] = cand;
                rec(pattern, n, depth + 1, assignment, used, pair_label, edges);
                used[cand as usize] = false;
            }
        }
    }
    rec(pattern, n, 0, &mut assignment, &mut used, &pair_label, &mut edges);
    Hypergraph::unit(
        (n * (n - 1) / 2) as u32,
        pattern.e(),
        edges.into_iter().collect(),
    )
}

#[derive(Clone, Debug)]
struct EdgeSubsetClass {
    e_j: usize,
    v_j: usize,
    aut_j: u64,
    count: u64,
    canon: Vec<u16>,
}

impl EdgeSubsetClass {
    /// Exact number of pattern copies in `K_n` containing a fixed placement
    /// of this subgraph class.
    fn extension_count(&self, n: u64, pattern: &Pattern) -> u128 {
        let numer = self.count as u128
            * self.aut_j as u128
            * falling_factorial((n as usize - self.v_j) as u128, (pattern.v() - self.v_j) as u128);
        let aut_h = pattern.aut_count() as u128;
        debug_assert_eq!(numer % aut_h, 0, "extension count must be integral");
        numer / aut_h
    }
}

/// Canonical adjacency code: lexicographically minimal row list over all
/// vertex permutations. Fine for the tiny patterns in scope.
fn canonical_code(p: &Pattern) -> Vec<u16> {
    let v = p.v();
    let mut best: Option<Vec<u16>> = None;
    let mut perm: Vec<usize> = (0..v).collect();
    permute(&mut perm, 0, &mut |pm| {
        let mut rows = vec![0u16; v];
        for &(a, b) in p.edges() {
            let (x, y) = (pm[a], pm[b]);
            rows[x] |= 1 << y;
            rows[y] |= 1 << x;
        }
        if best.as_ref().map_or(true, |b| rows < *b) {
            best = Some(rows);
        }
    });
    best.unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k3_density_report() {
        let r = analyze_density(&Pattern::complete(3), 8).unwrap();
        assert!(r.strictly_balanced && r.balanced);
        assert!(r.two_balanced);
        assert!((r.beta - 1.0).abs() < 1e-12);
        assert_eq!(s_param(&Pattern::complete(3)), 2);
    }

    #[test]
    fn k2_vacuously_strictly_balanced() {
        let r = analyze_density(&Pattern::complete(2), 8).unwrap();
        assert!(r.strictly_balanced);
        assert!(r.beta.is_infinite());
        assert_eq!(s_param(&Pattern::complete(2)), 1);
    }

    #[test]
    fn perfect_matching_is_2_balanced_not_strictly_balanced() {
        let r = analyze_density(&Pattern::matching(2), 8).unwrap();
        assert!(r.two_balanced);
        assert!(r.balanced);
        assert!(!r.strictly_balanced);
    }

    #[test]
    fn stars_are_strictly_balanced() {
        for r in 1..=5 {
            let rep = analyze_density(&Pattern::star(r), 8).unwrap();
            assert!(rep.strictly_balanced, "K_1_{r}");
        }
    }

    #[test]
    fn density_cap_refuses_large_patterns() {
        assert!(analyze_density(&Pattern::complete(9), 8).is_err());
        assert!(analyze_density(&Pattern::new(3, vec![]).unwrap(), 8).is_err());
    }

    #[test]
    fn aut_counts() {
        assert_eq!(Pattern::complete(3).aut_count(), 6);
        assert_eq!(Pattern::complete(4).aut_count(), 24);
        assert_eq!(Pattern::star(2).aut_count(), 2);
        assert_eq!(Pattern::matching(2).aut_count(), 8);
        assert_eq!(Pattern::path(4).aut_count(), 2);
    }

    #[test]
    fn copy_counts_in_complete_host() {
        assert_eq!(Pattern::complete(3).copies_in_complete(5), 10);
        assert_eq!(Pattern::star(2).copies_in_complete(4), 12); // 4 * C(3,2) ... centre choice times leaf pair
        assert_eq!(Pattern::complete(2).copies_in_complete(6), 15);
    }

    #[test]
    fn triangle_edge_exposure_mu_bounds() {
        let m = SubgraphModel::new(Pattern::complete(3), Exposure::Edge, 20).unwrap();
        let p = 0.25f64;
        let b = m.mu_j_bounds(p).unwrap();
        // j = 1: a fixed edge of K_n lies in n - 2 triangles
        assert!((b[0] - 18.0 * p * p).abs() < 1e-12);
        // j = 2: a fixed cherry lies in exactly one triangle
        assert!((b[1] - p).abs() < 1e-12);
        // j = 3 = e: the copy itself
        assert!((b[2] - 1.0).abs() < 1e-12);
        // j = q: no n or p factor left
        assert_eq!(m.q(), 2);
        assert_eq!(m.d_cap().unwrap(), 1.0);
        // p = 0 kills every j < e term
        let z = m.mu_j_bounds(0.0).unwrap();
        assert_eq!(z[0], 0.0);
        assert_eq!(z[2], 1.0);
    }

    #[test]
    fn triangle_vertex_exposure_shape() {
        let m = SubgraphModel::new(Pattern::complete(3), Exposure::Vertex, 20).unwrap();
        assert_eq!(m.q(), 3);
        assert_eq!(m.ell(), 2);
        assert_eq!(m.l_cap(), 1.0);
        let p = 0.25f64;
        let b = m.mu_j_bounds(p).unwrap();
        // j = 2: three vertex pairs, each inducing one edge (e_J = 1):
        // 3 * 2! * (n-2) / aut * p^{e-1}
        assert!((b[1] - 3.0 * 2.0 * 18.0 / 6.0 * p * p).abs() < 1e-12);
        // j = v: exactly one copy class with all edges inside
        assert!((b[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mu_is_exact_copy_count_times_p_power() {
        let m = SubgraphModel::new(Pattern::complete(3), Exposure::Edge, 10).unwrap();
        assert!((m.mu(0.5) - 120.0 * 0.125).abs() < 1e-12);
    }

    #[test]
    fn edge_exposure_encoding_counts_triangles() {
        let h = encode_edge_exposure(&Pattern::complete(3), 6).unwrap();
        assert_eq!(h.n_vertices(), 15);
        assert_eq!(h.edge_count(), 20); // C(6,3) triangles
        assert!(h.is_uniform(3));
        // degree structure: a fixed pair slot lies in n - 2 triangles
        assert_eq!(h.delta(1).unwrap(), 4);
        // two K_n-edges sharing a triangle pin it: delta_2 = 1
        assert_eq!(h.delta(2).unwrap(), 1);
        // the encoding's mu matches the model's
        let m = SubgraphModel::new(Pattern::complete(3), Exposure::Edge, 6).unwrap();
        let prof = h.mu_profile(0.3).unwrap();
        assert!((prof.mu - m.mu(0.3)).abs() < 1e-12);
    }
}
