//! Construction of the additive-combinatorics example families: arithmetic
//! progressions, Schur triples and their `ℓ`-sum variants, additive
//! quadruples, `(r,s)`-sums, solutions of rank-checked linear systems, and
//! complete hypergraphs. All families use unit weights and unordered edges.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::numeric::{binomial, for_each_subset};

/// `k`-term arithmetic progressions `{a, a+d, .., a+(k-1)d}` in `[n]`, `d >= 1`.
/// `n < k` yields the empty hypergraph.
pub fn gen_ap(n: u32, k: usize) -> Result<Hypergraph> {
    if k < 3 {
        return Err(Error::input("gen_ap: progression length k must be >= 3"));
    }
    let mut edges = Vec::new();
    if n as usize >= k {
        let span = (k - 1) as u32;
        for d in 1..=(n.saturating_sub(1)) / span {
            for a in 1..=n - span * d {
                edges.push((0..k as u32).map(|i| a + i * d).collect());
            }
        }
    }
    Hypergraph::unit(n, k, edges)
}

/// Closed-form count of `k`-term progressions in `[n]`.
pub fn ap_count(n: u64, k: u64) -> u64 {
    let span = k - 1;
    (1..=n / span.max(1))
        .map(|d| n.saturating_sub(span * d))
        .sum()
}

/// Schur triples `{x, y, z} ⊆ [n]` with `x + y = z` and `x != y`.
pub fn gen_schur(n: u32) -> Result<Hypergraph> {
    gen_ell_sum(n, 1)
}

/// Closed-form Schur triple count.
pub fn schur_count(n: u64) -> u64 {
    (3..=n).map(|z| (z - 1) / 2).sum()
}

/// Triples `{x, y, z} ⊆ [n]` of distinct elements with `x + y = ℓz` for some
/// assignment. `ℓ = 1` recovers the Schur triples.
pub fn gen_ell_sum(n: u32, ell: u32) -> Result<Hypergraph> {
    if ell == 0 {
        return Err(Error::input("gen_ell_sum: ell must be >= 1"));
    }
    let mut set: BTreeSet<[u32; 3]> = BTreeSet::new();
    for z in 1..=n {
        let s = ell as u64 * z as u64;
        let mut x = 1u64;
        while 2 * x < s {
            let y = s - x;
            if y <= n as u64 {
                let (x32, y32) = (x as u32, y as u32);
                if x32 != z && y32 != z {
                    let mut t = [x32, y32, z];
                    t.sort_unstable();
                    set.insert(t);
                }
            }
            x += 1;
        }
    }
    Hypergraph::unit(n, 3, set.into_iter().map(|t| t.to_vec()).collect())
}

/// Additive quadruples: 4-sets `{x1, x2, y1, y2} ⊆ [n]` of distinct elements
/// with `x1 + x2 = y1 + y2` under some pairing.
pub fn gen_additive_quadruples(n: u32) -> Result<Hypergraph> {
    // bucket pairs by sum; two disjoint pairs in a bucket form an edge
    let mut by_sum: Vec<Vec<(u32, u32)>> = vec![Vec::new(); 2 * n as usize + 1];
    for a in 1..=n {
        for b in a + 1..=n {
            by_sum[(a + b) as usize].push((a, b));
        }
    }
    let mut set: BTreeSet<[u32; 4]> = BTreeSet::new();
    for bucket in &by_sum {
        for (i, &(a, b)) in bucket.iter().enumerate() {
            for &(c, d) in &bucket[i + 1..] {
                if a != c && a != d && b != c && b != d {
                    let mut t = [a, b, c, d];
                    t.sort_unstable();
                    set.insert(t);
                }
            }
        }
    }
    Hypergraph::unit(n, 4, set.into_iter().map(|t| t.to_vec()).collect())
}

/// `(r,s)`-sums: `(r+s)`-sets of distinct elements admitting a split into an
/// `r`-part and an `s`-part with equal sums. Membership is brute-forced over
/// the `C(r+s, r)` side assignments of each candidate set.
pub fn gen_rs_sums(n: u32, r: usize, s: usize) -> Result<Hypergraph> {
    if r < 1 || s < 1 || r + s < 3 {
        return Err(Error::input("gen_rs_sums: need r, s >= 1 and r + s >= 3"));
    }
    let k = r + s;
    if binomial(n as u64, k as u64) > 20_000_000 {
        return Err(Error::too_large(format!(
            "gen_rs_sums: C({n}, {k}) candidate sets exceed the enumeration cap"
        )));
    }
    let items: Vec<u32> = (1..=n).collect();
    let mut edges = Vec::new();
    for_each_subset(&items, k, |cand| {
        let total: u64 = cand.iter().map(|&v| v as u64).sum();
        if total % 2 != 0 {
            return;
        }
        // an r-side with sum(left) = sum(right) carries exactly half the total
        let mut hit = false;
        for_each_subset(cand, r, |left| {
            if !hit {
                let ls: u64 = left.iter().map(|&v| v as u64).sum();
                hit = 2 * ls == total;
            }
        });
        if hit {
            edges.push(cand.to_vec());
        }
    });
    Hypergraph::unit(n, k, edges)
}

/// Solutions `{x_1, .., x_k} ⊆ [n]` (distinct values, unordered) of the
/// homogeneous system `A x = 0`. Every `r x r` submatrix of `A` must have
/// full rank.
pub fn gen_linear_system(n: u32, a: &[Vec<i64>]) -> Result<Hypergraph> {
    let r = a.len();
    if r == 0 {
        return Err(Error::input("gen_linear_system: empty matrix"));
    }
    let k = a[0].len();
    if a.iter().any(|row| row.len() != k) {
        return Err(Error::input("gen_linear_system: ragged matrix"));
    }
    if k < r + 2 {
        return Err(Error::input("gen_linear_system: need k >= r + 2 columns"));
    }
    // full-rank requirement on every r x r column submatrix
    let cols: Vec<usize> = (0..k).collect();
    let mut rank_ok = true;
    for_each_subset(&cols, r, |sel| {
        if det_int(a, sel) == 0 {
            rank_ok = false;
        }
    });
    if !rank_ok {
        return Err(Error::input(
            "gen_linear_system: some r x r column submatrix is singular",
        ));
    }
    if binomial(n as u64, k as u64) > 5_000_000 {
        return Err(Error::too_large(format!(
            "gen_linear_system: C({n}, {k}) candidate sets exceed the enumeration cap"
        )));
    }
    let items: Vec<u32> = (1..=n).collect();
    let mut edges = Vec::new();
    for_each_subset(&items, k, |cand| {
        if has_solving_permutation(a, cand) {
            edges.push(cand.to_vec());
        }
    });
    Hypergraph::unit(n, k, edges)
}

/// Complete `k`-uniform hypergraph on `[n]`.
pub fn gen_complete(n: u32, k: usize) -> Result<Hypergraph> {
    if k == 0 {
        return Err(Error::input("gen_complete: k must be >= 1"));
    }
    if binomial(n as u64, k as u64) > 20_000_000 {
        return Err(Error::too_large(format!(
            "gen_complete: C({n}, {k}) edges exceed the enumeration cap"
        )));
    }
    let items: Vec<u32> = (1..=n).collect();
    let mut edges = Vec::new();
    for_each_subset(&items, k, |s| edges.push(s.to_vec()));
    Hypergraph::unit(n, k, edges)
}

/// Exact integer determinant of the column selection `sel` of `a` (Bareiss).
fn det_int(a: &[Vec<i64>], sel: &[usize]) -> i128 {
    let r = a.len();
    let mut m: Vec<Vec<i128>> = (0..r)
        .map(|i| sel.iter().map(|&c| a[i][c] as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for col in 0..r {
        // pivot
        let Some(pr) = (col..r).find(|&i| m[i][col] != 0) else {
            return 0;
        };
        if pr != col {
            m.swap(pr, col);
            sign = -sign;
        }
        for i in col + 1..r {
            for j in col + 1..r {
                m[i][j] = (m[i][j] * m[col][col] - m[i][col] * m[col][j]) / prev;
            }
            m[i][col] = 0;
        }
        prev = m[col][col];
    }
    sign * m[r - 1][r - 1]
}

fn has_solving_permutation(a: &[Vec<i64>], cand: &[u32]) -> bool {
    let k = cand.len();
    let mut perm: Vec<usize> = (0..k).collect();
    // Heap's algorithm, iterative
    let mut c = vec![0usize; k];
    if solves(a, cand, &perm) {
        return true;
    }
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if solves(a, cand, &perm) {
                return true;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    false
}

fn solves(a: &[Vec<i64>], cand: &[u32], perm: &[usize]) -> bool {
    a.iter().all(|row| {
        let s: i64 = row
            .iter()
            .zip(perm)
            .map(|(&coef, &pi)| coef * cand[pi] as i64)
            .sum();
        s == 0
    })
}

/// Structural profile of an instance, sufficient to evaluate every bound
/// without holding the edge list. `mu_j` follows the maximum-average-effect
/// definition at the stored `p`.
#[derive(Clone, Debug)]
pub struct InstanceProfile {
    pub n_vertices: u32,
    pub k: usize,
    pub q: usize,
    pub edge_count: u64,
    pub total_weight: f64,
    pub min_weight: f64,
    pub max_weight: f64,
    pub delta_q: f64,
    pub deltas: Vec<u64>,
}

impl InstanceProfile {
    pub fn from_hypergraph(h: &Hypergraph, q: usize) -> Result<Self> {
        if q == 0 || q > h.max_edge_size() {
            return Err(Error::input(format!("profile: q = {q} out of range")));
        }
        let deltas: Vec<u64> = (1..=h.max_edge_size())
            .map(|j| h.delta(j).unwrap())
            .collect();
        Ok(InstanceProfile {
            n_vertices: h.n_vertices(),
            k: h.max_edge_size(),
            q,
            edge_count: h.edge_count() as u64,
            total_weight: h.total_weight(),
            min_weight: h.min_weight().unwrap_or(0.0),
            max_weight: h.max_weight().unwrap_or(0.0),
            delta_q: deltas[q - 1] as f64,
            deltas,
        })
    }

    /// `μ` for `k`-uniform instances: `w(H) p^k`.
    pub fn mu(&self, p: f64) -> f64 {
        self.total_weight * p.powi(self.k as i32)
    }

    /// `μ_j = Δ_j p^{k-j}` for `k`-uniform unit-weight instances.
    pub fn mu_j(&self, j: usize, p: f64) -> f64 {
        self.deltas[j - 1] as f64 * p.powi((self.k - j) as i32)
    }
}

/// Degree deltas of the `k`-AP family computed by streaming the progressions
/// instead of materialising the edge list; needed at `n = 10^4` where the
/// edge list would hold tens of millions of tuples.
pub fn ap_instance_profile(n: u32, k: usize) -> Result<InstanceProfile> {
    if k != 3 {
        return Err(Error::input(
            "ap_instance_profile: streamed profile implemented for k = 3 only",
        ));
    }
    let span = (k - 1) as u32;
    let edge_count = ap_count(n as u64, k as u64);
    // delta_1: per-vertex progression counts
    let mut deg = vec![0u64; n as usize + 1];
    if n >= span {
        for d in 1..=n.saturating_sub(1) / span {
            for a in 1..=n - span * d {
                for i in 0..k as u32 {
                    deg[(a + i * d) as usize] += 1;
                }
            }
        }
    }
    let delta_1 = deg.iter().copied().max().unwrap_or(0);
    // delta_2: for each vertex v, count progressions through (v, u) for u > v
    // with a reusable counter array
    let mut delta_2 = 0u64;
    let mut cnt = vec![0u64; n as usize + 1];
    let mut touched: Vec<u32> = Vec::new();
    if n >= span {
        for v in 1..=n {
            touched.clear();
            for d in 1..=n.saturating_sub(1) / span {
                for pos in 0..k as u32 {
                    // progression with v at position pos
                    if v < 1 + pos * d {
                        continue;
                    }
                    let a = v - pos * d;
                    if a + span * d > n {
                        continue;
                    }
                    for i in 0..k as u32 {
                        let u = a + i * d;
                        if u > v {
                            if cnt[u as usize] == 0 {
                                touched.push(u);
                            }
                            cnt[u as usize] += 1;
                        }
                    }
                }
            }
            for &u in &touched {
                delta_2 = delta_2.max(cnt[u as usize]);
                cnt[u as usize] = 0;
            }
        }
    }
    // edges are distinct 3-sets, so delta_3 = 1 whenever any edge exists
    let deltas = vec![delta_1, delta_2, if edge_count > 0 { 1 } else { 0 }];
    Ok(InstanceProfile {
        n_vertices: n,
        k,
        q: 2,
        edge_count,
        total_weight: edge_count as f64,
        min_weight: if edge_count > 0 { 1.0 } else { 0.0 },
        max_weight: if edge_count > 0 { 1.0 } else { 0.0 },
        delta_q: delta_2 as f64,
        deltas,
    })
}
