//! The combinatorial sparsification machinery: stars (a centre set plus
//! degree-bounded spikes), greedy maximal star matchings under vertex or
//! overlap disjointness, degree reduction by deleting everything a matching
//! touches, the nested degree-reduction decomposition, and sample-level
//! checkers for the degree and sparsification events.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::numeric::{binomial, for_each_subset};

/// Disjointness notion between the spike sets of distinct stars.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DisjointnessMode {
    /// Spike edges of distinct stars share no vertex.
    Vertex,
    /// Spike edges of distinct stars overlap in fewer than `ell` vertices.
    Overlap { ell: usize },
}

impl DisjointnessMode {
    fn conflicts(&self, e: &[u32], f: &[u32]) -> bool {
        let shared = sorted_intersection_size(e, f);
        match self {
            DisjointnessMode::Vertex => shared >= 1,
            DisjointnessMode::Overlap { ell } => shared >= *ell,
        }
    }

    pub fn ell(&self) -> usize {
        match self {
            DisjointnessMode::Vertex => 1,
            DisjointnessMode::Overlap { ell } => *ell,
        }
    }
}

fn sorted_intersection_size(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// A star: centre `U` of size `j` plus `ceil(x)` spike edges through `U`
/// whose mutual `(j+1)`-degree stays under `y`.
#[derive(Clone, Debug, Serialize)]
pub struct Star {
    pub centre: Vec<u32>,
    /// Edge indices into the host.
    pub spikes: Vec<usize>,
}

/// A pairwise-disjoint collection of stars.
#[derive(Clone, Debug, Serialize)]
pub struct StarMatching {
    pub stars: Vec<Star>,
    pub mode: DisjointnessMode,
    pub j: usize,
    pub x: f64,
    pub y: f64,
    /// False when the per-centre feasibility search hit its node budget, in
    /// which case maximality is no longer certified.
    pub search_exhausted: bool,
}

/// `Δ_m` of the sub-hypergraph formed by the listed edges.
pub fn delta_of_edges(h: &Hypergraph, idxs: &[usize], m: usize) -> u64 {
    if m == 0 {
        return idxs.len() as u64;
    }
    let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
    let mut best = 0u64;
    for &i in idxs {
        let f = h.edge(i);
        if f.len() < m {
            continue;
        }
        for_each_subset(f, m, |u| {
            let c = counts.entry(u.to_vec()).or_insert(0);
            *c += 1;
            best = best.max(*c);
        });
    }
    best
}

/// Re-verify a star against its host: spike count, containment, and the
/// spike-set degree cap.
pub fn verify_star(h: &Hypergraph, star: &Star, j: usize, x: f64, y: f64) -> bool {
    if star.centre.len() != j || star.spikes.len() != x.ceil() as usize {
        return false;
    }
    for &i in &star.spikes {
        let f = h.edge(i);
        if !star.centre.iter().all(|v| f.binary_search(v).is_ok()) {
            return false;
        }
    }
    delta_of_edges(h, &star.spikes, j + 1) as f64 <= y
}

const SPIKE_SEARCH_BUDGET: usize = 200_000;

/// Deterministic search for `need` spikes among `candidates` (ascending edge
/// indices) with `Δ_{j+1}` of the chosen set at most `y`. Tries the greedy
/// prefix first, then backtracks, so the result equals plain greedy whenever
/// greedy succeeds. Returns None when no feasible spike set exists (or the
/// node budget ran out, reported separately).
fn find_spikes(
    h: &Hypergraph,
    candidates: &[usize],
    j: usize,
    need: usize,
    y: f64,
    budget: &mut usize,
) -> Option<Vec<usize>> {
    fn rec(
        h: &Hypergraph,
        candidates: &[usize],
        start: usize,
        j: usize,
        need: usize,
        y: f64,
        chosen: &mut Vec<usize>,
        counts: &mut HashMap<Vec<u32>, u64>,
        budget: &mut usize,
    ) -> bool {
        if chosen.len() == need {
            return true;
        }
        if candidates.len() - start < need - chosen.len() || *budget == 0 {
            return false;
        }
        for ci in start..candidates.len() {
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            let e = candidates[ci];
            let f = h.edge(e);
            // feasible iff no (j+1)-subset count would exceed y
            let mut ok = true;
            for_each_subset(f, j + 1, |u| {
                if ok && (counts.get(u).copied().unwrap_or(0) + 1) as f64 > y {
                    ok = false;
                }
            });
            if !ok {
                continue;
            }
            for_each_subset(f, j + 1, |u| {
                *counts.entry(u.to_vec()).or_insert(0) += 1;
            });
            chosen.push(e);
            if rec(h, candidates, ci + 1, j, need, y, chosen, counts, budget) {
                return true;
            }
            chosen.pop();
            for_each_subset(f, j + 1, |u| {
                *counts.get_mut(u).unwrap() -= 1;
            });
        }
        false
    }
    let mut chosen = Vec::new();
    let mut counts = HashMap::new();
    rec(h, candidates, 0, j, need, y, &mut chosen, &mut counts, budget).then_some(chosen)
}

/// Greedy maximal star matching: centres scanned in lexicographic order,
/// spikes chosen in edge-index order (with bounded backtracking so a feasible
/// spike set is never missed at small scale).
pub fn greedy_star_matching(
    h: &Hypergraph,
    j: usize,
    x: f64,
    y: f64,
    mode: DisjointnessMode,
) -> Result<StarMatching> {
    if j == 0 || j >= h.max_edge_size() {
        return Err(Error::input(format!(
            "greedy_star_matching: need 1 <= j < k, got j = {j}"
        )));
    }
    if !(x > 0.0) || !(y > 0.0) {
        return Err(Error::input("greedy_star_matching: x and y must be > 0"));
    }
    if j < mode.ell() {
        return Err(Error::input("greedy_star_matching: overlap mode needs j >= ell"));
    }
    let need = x.ceil() as usize;
    // candidate centres: j-subsets of edges, in lexicographic order
    let mut centres: BTreeSet<Vec<u32>> = BTreeSet::new();
    for f in h.edges() {
        for_each_subset(f, j, |u| {
            centres.insert(u.to_vec());
        });
    }
    let mut blocked = vec![false; h.edge_count()];
    let mut stars: Vec<Star> = Vec::new();
    let mut search_exhausted = true;
    for centre in centres {
        let gamma = h.gamma(&centre)?;
        let avail: Vec<usize> = gamma.into_iter().filter(|&i| !blocked[i]).collect();
        if avail.len() < need {
            continue;
        }
        let mut budget = SPIKE_SEARCH_BUDGET;
        let found = find_spikes(h, &avail, j, need, y, &mut budget);
        if budget == 0 {
            search_exhausted = false;
        }
        let Some(spikes) = found else {
            continue;
        };
        // block every edge that conflicts with the new spikes
        for (i, slot) in blocked.iter_mut().enumerate() {
            if *slot {
                continue;
            }
            let f = h.edge(i);
            if spikes.iter().any(|&sp| mode.conflicts(h.edge(sp), f)) {
                *slot = true;
            }
        }
        stars.push(Star { centre, spikes });
    }
    Ok(StarMatching { stars, mode, j, x, y, search_exhausted })
}

/// Exhaustive addability check: is there any star in the host, disjoint from
/// the given matching, certifying non-maximality? Intended for hosts with few
/// edges.
pub fn addable_star_exists(h: &Hypergraph, m: &StarMatching) -> Result<bool> {
    let need = m.x.ceil() as usize;
    let mut blocked = vec![false; h.edge_count()];
    for star in &m.stars {
        for (i, slot) in blocked.iter_mut().enumerate() {
            if !*slot
                && star
                    .spikes
                    .iter()
                    .any(|&sp| m.mode.conflicts(h.edge(sp), h.edge(i)))
            {
                *slot = true;
            }
        }
    }
    let mut centres: BTreeSet<Vec<u32>> = BTreeSet::new();
    for f in h.edges() {
        for_each_subset(f, m.j, |u| {
            centres.insert(u.to_vec());
        });
    }
    for centre in centres {
        let gamma = h.gamma(&centre)?;
        let avail: Vec<usize> = gamma.into_iter().filter(|&i| !blocked[i]).collect();
        if avail.len() < need {
            continue;
        }
        let mut budget = usize::MAX;
        if find_spikes(h, &avail, m.j, need, m.y, &mut budget).is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Result of one degree-reduction round.
#[derive(Clone, Debug, Serialize)]
pub struct SparsifyOutcome {
    /// Surviving edge indices.
    pub kept: Vec<usize>,
    pub deleted: Vec<usize>,
    pub matching: StarMatching,
    /// The deletion budget `|M| ceil(x) C(k,ℓ) Δ_ℓ(G)` (vertex mode: ℓ = 1,
    /// so `|M| ceil(x) k Δ_1(G)`).
    pub budget: f64,
    /// `Δ_{j+1}(G) <= y`; the reduction guarantee is only promised under it.
    pub precondition_met: bool,
    /// `Δ_j(J) <= ceil(x) - 1` on the surviving edges.
    pub postcondition_met: bool,
}

/// Deletes every edge that overlaps the greedy matching's spikes (in the
/// mode's sense). Under `Δ_{j+1}(G) <= y`, maximality forces
/// `Δ_j(J) <= ceil(x) - 1`; the deletion count obeys the stated budget.
pub fn sparsify(
    h: &Hypergraph,
    j: usize,
    x: f64,
    y: f64,
    mode: DisjointnessMode,
) -> Result<SparsifyOutcome> {
    let matching = greedy_star_matching(h, j, x, y, mode)?;
    let mut deleted_mark = vec![false; h.edge_count()];
    for star in &matching.stars {
        for (i, slot) in deleted_mark.iter_mut().enumerate() {
            if !*slot
                && star
                    .spikes
                    .iter()
                    .any(|&sp| mode.conflicts(h.edge(sp), h.edge(i)))
            {
                *slot = true;
            }
        }
    }
    let kept: Vec<usize> = (0..h.edge_count()).filter(|&i| !deleted_mark[i]).collect();
    let deleted: Vec<usize> = (0..h.edge_count()).filter(|&i| deleted_mark[i]).collect();
    let ell = mode.ell();
    let k = h.max_edge_size();
    let all: Vec<usize> = (0..h.edge_count()).collect();
    let delta_ell = delta_of_edges(h, &all, ell) as f64;
    let budget = matching.stars.len() as f64
        * x.ceil()
        * binomial(k as u64, ell as u64) as f64
        * delta_ell;
    let precondition_met = delta_of_edges(h, &all, j + 1) as f64 <= y;
    let postcondition_met = delta_of_edges(h, &kept, j) as f64 <= x.ceil() - 1.0;
    Ok(SparsifyOutcome { kept, deleted, matching, budget, precondition_met, postcondition_met })
}

/// Sample-level degree event: is there `K ⊆ Γ_U` with `|K| >= x` and
/// `Δ_{|U|+1}(K) <= y`? Exact (by backtracking) when `Γ_U` is small; above
/// the cap a greedy witness certifies `true` while `false` stays heuristic.
#[derive(Clone, Debug, Serialize)]
pub struct EventCheck {
    pub holds: bool,
    pub certified: bool,
    pub witness: Option<Vec<usize>>,
}

const DEGREE_EVENT_EXACT_CAP: usize = 20;

pub fn check_degree_event(h: &Hypergraph, u: &[u32], x: f64, y: f64) -> Result<EventCheck> {
    if x <= 0.0 {
        return Ok(EventCheck { holds: true, certified: true, witness: Some(vec![]) });
    }
    let gamma = h.gamma(u)?;
    let j = {
        let mut set = u.to_vec();
        set.sort_unstable();
        set.dedup();
        set.len()
    };
    let need = x.ceil() as usize;
    if gamma.len() < need {
        return Ok(EventCheck { holds: false, certified: true, witness: None });
    }
    if y >= gamma.len() as f64 {
        // the degree constraint cannot bind
        return Ok(EventCheck {
            holds: true,
            certified: true,
            witness: Some(gamma[..need].to_vec()),
        });
    }
    if gamma.len() <= DEGREE_EVENT_EXACT_CAP {
        let mut budget = usize::MAX;
        let found = find_spikes(h, &gamma, j, need, y, &mut budget);
        return Ok(EventCheck { holds: found.is_some(), certified: true, witness: found });
    }
    // greedy-only witness search above the cap
    let mut budget = gamma.len() + 1;
    let found = find_spikes(h, &gamma, j, need, y, &mut budget);
    Ok(EventCheck { certified: found.is_some(), holds: found.is_some(), witness: found })
}

/// Verdict for the sparsification event "every degree-bounded `G` can be
/// thinned to `Δ_j <= x` by at most `r` deletions".
#[derive(Clone, Debug, Serialize)]
pub struct SparsEventCheck {
    pub holds: bool,
    pub certified: bool,
    pub method: String,
    pub matching_size: usize,
    pub matching_threshold: f64,
}

const SPARS_EVENT_EXACT_EDGE_CAP: usize = 12;

/// Sufficient check: a maximal star matching of size at most
/// `r / (C(k,ℓ) ceil(x) z)` certifies the event — deleting all edges that
/// touch the matching thins every qualifying `G` at once. Falls back to the
/// exhaustive all-subhypergraphs check on hosts with at most 12 edges.
pub fn check_sparsification_event(
    h: &Hypergraph,
    j: usize,
    ell: usize,
    x: f64,
    r: f64,
    y: f64,
    z: f64,
) -> Result<SparsEventCheck> {
    if ell == 0 || j < ell || j >= h.max_edge_size() {
        return Err(Error::input("check_sparsification_event: need 1 <= ell <= j < k"));
    }
    if !(x > 0.0) || !(r >= 0.0) || !(y > 0.0) || !(z > 0.0) {
        return Err(Error::input("check_sparsification_event: need x, y, z > 0 and r >= 0"));
    }
    if h.edge_count() == 0 || r >= h.edge_count() as f64 {
        return Ok(SparsEventCheck {
            holds: true,
            certified: true,
            method: "trivial".into(),
            matching_size: 0,
            matching_threshold: f64::INFINITY,
        });
    }
    let mode = if ell == 1 { DisjointnessMode::Vertex } else { DisjointnessMode::Overlap { ell } };
    let matching = greedy_star_matching(h, j, x, y, mode)?;
    let threshold = r / (binomial(h.max_edge_size() as u64, ell as u64) as f64 * x.ceil() * z);
    if matching.search_exhausted && matching.stars.len() as f64 <= threshold {
        return Ok(SparsEventCheck {
            holds: true,
            certified: true,
            method: "matching".into(),
            matching_size: matching.stars.len(),
            matching_threshold: threshold,
        });
    }
    if h.edge_count() <= SPARS_EVENT_EXACT_EDGE_CAP {
        let holds = exact_sparsification_event(h, j, ell, x, r, y, z);
        return Ok(SparsEventCheck {
            holds,
            certified: true,
            method: "exhaustive".into(),
            matching_size: matching.stars.len(),
            matching_threshold: threshold,
        });
    }
    Ok(SparsEventCheck {
        holds: false,
        certified: false,
        method: "matching-inconclusive".into(),
        matching_size: matching.stars.len(),
        matching_threshold: threshold,
    })
}

/// Exhaustive check over every `G` with `Δ_{j+1}(G) <= y` and
/// `Δ_ℓ(G) <= z`: can `G` lose at most `r` edges and reach `Δ_j <= x`?
pub fn exact_sparsification_event(
    h: &Hypergraph,
    j: usize,
    ell: usize,
    x: f64,
    r: f64,
    y: f64,
    z: f64,
) -> bool {
    let m = h.edge_count();
    debug_assert!(m <= SPARS_EVENT_EXACT_EDGE_CAP);
    // min_deletions depends only on the edge set, so one memo serves every G
    let mut memo: HashMap<u32, u32> = HashMap::new();
    for set in 0u32..(1u32 << m) {
        let g: Vec<usize> = (0..m).filter(|&i| set & (1 << i) != 0).collect();
        if g.is_empty() {
            continue;
        }
        if delta_of_edges(h, &g, j + 1) as f64 > y || delta_of_edges(h, &g, ell) as f64 > z {
            continue;
        }
        let needed = min_deletions(h, set, j, x, &mut memo);
        if needed as f64 > r {
            return false;
        }
    }
    true
}

/// Minimum deletions bringing `Δ_j` of the edge set down to `x`: branch on
/// the members of a violating neighbourhood.
fn min_deletions(h: &Hypergraph, set: u32, j: usize, x: f64, memo: &mut HashMap<u32, u32>) -> u32 {
    if let Some(&v) = memo.get(&set) {
        return v;
    }
    let g: Vec<usize> = (0..h.edge_count()).filter(|&i| set & (1 << i) != 0).collect();
    // find a violating j-set, lexicographically first
    let mut counts: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
    for &i in &g {
        for_each_subset(h.edge(i), j, |u| {
            counts.entry(u.to_vec()).or_default().push(i);
        });
    }
    let violating = counts
        .into_iter()
        .filter(|(_, members)| members.len() as f64 > x)
        .min_by(|a, b| a.0.cmp(&b.0));
    let result = match violating {
        None => 0,
        Some((_, members)) => {
            // some member must go
            let mut best = u32::MAX;
            for &i in &members {
                let next = set & !(1 << i);
                best = best.min(1 + min_deletions(h, next, j, x, memo));
            }
            best
        }
    };
    memo.insert(set, result);
    result
}

/// Which construction rule produced a level of the decomposition chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StepRule {
    /// `Q_j >= R_j`: keep everything.
    Keep,
    /// `Q_j < R_j`, `Q_{j+1} > D_{j+1}`: keep everything, the sharpened
    /// degree bound is inherited.
    KeepSharp,
    /// `Q_j < R_j`, `Q_{j+1} = D_{j+1}`: sparsify.
    Sparsify,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionStep {
    pub j: usize,
    pub rule: StepRule,
    pub deleted: usize,
    /// `Δ_i` of the level for `i = ell..=q`.
    pub degrees: Vec<u64>,
    /// Degree targets met: `Δ_i <= R_i` below the level, `<= min(Q_i, R_i)`
    /// at and above it.
    pub degree_pattern_ok: bool,
    /// Deleted edge count within `t/(2Lq)`.
    pub deletion_budget_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GoodEventFailure {
    pub label: char,
    pub j: usize,
    pub detail: String,
}

/// Trace of the nested degree-reduction chain `J_q ⊇ ... ⊇ J_ell`.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionTrace {
    pub ell: usize,
    pub q: usize,
    pub chain_sizes: Vec<usize>,
    pub steps: Vec<DecompositionStep>,
    pub failures: Vec<GoodEventFailure>,
    pub total_weight: f64,
    pub final_weight: f64,
    pub mu_plus_t: f64,
    /// Set when every good event held: did `w(G) < mu + t` come out?
    pub weight_ok: Option<bool>,
    pub all_events_hold: bool,
}

/// Degree/deletion schedule for the decomposition, indexed `j = ell..=q`.
#[derive(Clone, Debug)]
pub struct DecompositionSchedule {
    pub ell: usize,
    pub q: usize,
    pub r: Vec<f64>,
    pub d: Vec<f64>,
    pub s: Vec<f64>,
}

impl DecompositionSchedule {
    fn r_at(&self, j: usize) -> f64 {
        self.r[j - self.ell]
    }

    fn d_at(&self, j: usize) -> f64 {
        self.d[j - self.ell]
    }

    fn q_at(&self, j: usize) -> f64 {
        if j == self.q {
            self.d_at(j)
        } else {
            self.s[j - self.ell].max(self.d_at(j))
        }
    }
}

/// Runs the three-case nested construction on a realized sample `g` (an
/// edge-materialized subhypergraph) and records, per level, which good event
/// was exercised and whether it held. When every event holds, the final
/// weight inequality `w(G) < mu + t` is checked against the supplied `mu`.
pub fn decompose(
    g: &Hypergraph,
    sched: &DecompositionSchedule,
    t: f64,
    l_cap: f64,
    mu: f64,
) -> Result<DecompositionTrace> {
    let (ell, q) = (sched.ell, sched.q);
    if ell < 1 || ell > q || q > g.max_edge_size() {
        return Err(Error::input("decompose: need 1 <= ell <= q <= k"));
    }
    let len = q - ell + 1;
    if sched.r.len() != len || sched.d.len() != len || sched.s.len() != len {
        return Err(Error::input("decompose: schedule must cover j = ell..=q"));
    }
    if !(t > 0.0) || !(l_cap > 0.0) {
        return Err(Error::input("decompose: need t > 0 and L > 0"));
    }
    let deletion_cap = t / (2.0 * l_cap * q as f64);
    let mut failures: Vec<GoodEventFailure> = Vec::new();
    let mut steps: Vec<DecompositionStep> = Vec::new();
    let mut chain_sizes = Vec::new();
    let all: Vec<usize> = (0..g.edge_count()).collect();
    // hypothesis of the whole chain
    let delta_q = delta_of_edges(g, &all, q);
    if delta_q as f64 > sched.d_at(q) {
        failures.push(GoodEventFailure {
            label: 'b',
            j: q,
            detail: format!("delta_q = {delta_q} exceeds D_q = {}", sched.d_at(q)),
        });
    }
    let mut current: Vec<usize> = all.clone();
    chain_sizes.push(current.len());
    // base level: the iterated degree events must already cap every Δ_i by R_i
    for i in ell..q {
        let di = delta_of_edges(g, &current, i);
        if di as f64 > sched.r_at(i) {
            failures.push(GoodEventFailure {
                label: 'b',
                j: i,
                detail: format!("delta_{i}(J_q) = {di} exceeds R_{i} = {}", sched.r_at(i)),
            });
        }
    }
    let record_step = |g: &Hypergraph,
                       edges: &[usize],
                       j: usize,
                       rule: StepRule,
                       deleted: usize,
                       sched: &DecompositionSchedule|
     -> DecompositionStep {
        let degrees: Vec<u64> = (ell..=q).map(|i| delta_of_edges(g, edges, i)).collect();
        let mut pattern_ok = true;
        for (off, &di) in degrees.iter().enumerate() {
            let i = ell + off;
            let cap = if i < j {
                sched.r_at(i)
            } else {
                sched.q_at(i).min(sched.r_at(i))
            };
            if di as f64 > cap {
                pattern_ok = false;
            }
        }
        DecompositionStep {
            j,
            rule,
            deleted,
            degrees,
            degree_pattern_ok: pattern_ok,
            deletion_budget_ok: (deleted as f64) <= deletion_cap,
        }
    };
    let mode = if ell == 1 { DisjointnessMode::Vertex } else { DisjointnessMode::Overlap { ell } };
    for j in (ell..q).rev() {
        let qj = sched.q_at(j);
        let rj = sched.r_at(j);
        let (rule, next, deleted) = if qj >= rj {
            (StepRule::Keep, current.clone(), 0usize)
        } else if sched.q_at(j + 1) > sched.d_at(j + 1) {
            (StepRule::KeepSharp, current.clone(), 0usize)
        } else {
            // sparsification round at level j
            let sub = g.induced_by_edges(&current);
            let out = sparsify(&sub, j, qj, sched.d_at(j + 1), mode)?;
            let next: Vec<usize> = out.kept.iter().map(|&i| current[i]).collect();
            let deleted = out.deleted.len();
            (StepRule::Sparsify, next, deleted)
        };
        let step = record_step(g, &next, j, rule, deleted, sched);
        // classify failures by the good event each rule leans on
        if !step.degree_pattern_ok {
            let label = match rule {
                StepRule::Keep => 'b',
                StepRule::KeepSharp => 'c',
                StepRule::Sparsify => 'd',
            };
            failures.push(GoodEventFailure {
                label,
                j,
                detail: format!("degree pattern violated at level {j} under rule {rule:?}"),
            });
        }
        if rule == StepRule::Sparsify && !step.deletion_budget_ok {
            failures.push(GoodEventFailure {
                label: 'd',
                j,
                detail: format!(
                    "deleted {} edges, budget t/(2Lq) = {deletion_cap}",
                    step.deleted
                ),
            });
        }
        steps.push(step);
        current = next;
        chain_sizes.push(current.len());
    }
    let total_weight = g.total_weight();
    let final_weight: f64 = current.iter().map(|&i| g.weight(i)).sum();
    // good event (a): the fully reduced level has small weight
    if final_weight >= mu + t / 2.0 {
        failures.push(GoodEventFailure {
            label: 'a',
            j: ell,
            detail: format!("w(J_ell) = {final_weight} not below mu + t/2 = {}", mu + t / 2.0),
        });
    }
    let all_events_hold = failures.is_empty();
    let weight_ok = all_events_hold.then_some(total_weight < mu + t);
    Ok(DecompositionTrace {
        ell,
        q,
        chain_sizes,
        steps,
        failures,
        total_weight,
        final_weight,
        mu_plus_t: mu + t,
        weight_ok,
        all_events_hold,
    })
}
