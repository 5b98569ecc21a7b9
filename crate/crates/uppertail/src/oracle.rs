//! Exact small-instance ground truth: the full distribution of the induced
//! weight by subset enumeration, the constrained maximum `Z_C` over
//! bounded-dependency families, exhaustive disjoint-occurrence checks on
//! finite product spaces, greedy clustered lower-bound witnesses, and the
//! falling-moment certificates for degree tail weights.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::chernoff_log_forms;
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::numeric::{binomial, for_each_subset, KahanSum};
use crate::sampler::Regime;

/// Exact distribution of the induced weight `X`: sorted support with point
/// masses, mean and variance, and exact tails.
#[derive(Clone, Debug)]
pub struct ExactDistribution {
    /// Ascending distinct values of X.
    pub values: Vec<f64>,
    pub probs: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
}

impl ExactDistribution {
    /// `Pr(X >= t)`, summed from the top of the support.
    pub fn tail(&self, t: f64) -> f64 {
        let mut s = KahanSum::new();
        for i in (0..self.values.len()).rev() {
            if self.values[i] >= t {
                s.add(self.probs[i]);
            } else {
                break;
            }
        }
        s.value()
    }

    pub fn total_mass(&self) -> f64 {
        let mut s = KahanSum::new();
        for &p in &self.probs {
            s.add(p);
        }
        s.value()
    }
}

const EXACT_VERTEX_CAP: u32 = 24;

/// Exact distribution of `X = w(H[V])` under the vertex regimes, by full
/// subset enumeration. Refuses hosts above 24 vertices.
pub fn exact_distribution(h: &Hypergraph, regime: Regime) -> Result<ExactDistribution> {
    let n = h.n_vertices();
    if n > EXACT_VERTEX_CAP {
        return Err(Error::too_large(format!(
            "exact_distribution: {n} vertices exceed the 2^{EXACT_VERTEX_CAP} enumeration cap"
        )));
    }
    let (p, m_filter) = match regime {
        Regime::VertexBinomial { p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::input("exact_distribution: p outside [0, 1]"));
            }
            (p, None)
        }
        Regime::VertexUniform { m } => {
            if m as u32 > n {
                return Err(Error::input("exact_distribution: m exceeds vertex count"));
            }
            (0.0, Some(m as u32))
        }
        _ => return Err(Error::input("exact_distribution: vertex regimes only")),
    };
    let masks: Vec<u32> = h
        .edges()
        .iter()
        .map(|f| f.iter().fold(0u32, |acc, &v| acc | 1 << (v - 1)))
        .collect();
    let weights = h.weights().to_vec();
    // log-space subset weights keep p near 0 or 1 exact
    let total = 1u64 << n;
    let n_chunks = 64usize.min(total as usize);
    let chunk = total.div_ceil(n_chunks as u64);
    let partials: Vec<HashMap<u64, (f64, f64)>> = (0..n_chunks as u64)
        .into_par_iter()
        .map(|ci| {
            let mut acc: HashMap<u64, (f64, f64)> = HashMap::new();
            let lo = ci * chunk;
            let hi = ((ci + 1) * chunk).min(total);
            for set in lo..hi {
                let set = set as u32;
                let prob = match m_filter {
                    Some(m) => {
                        if set.count_ones() != m {
                            continue;
                        }
                        1.0 / binomial(n as u64, m as u64) as f64
                    }
                    None => {
                        let ones = set.count_ones() as i32;
                        p.powi(ones) * (1.0 - p).powi(n as i32 - ones)
                    }
                };
                let mut x = 0.0;
                for (mask, w) in masks.iter().zip(&weights) {
                    if set & mask == *mask {
                        x += w;
                    }
                }
                let slot = acc.entry(x.to_bits()).or_insert((0.0, 0.0));
                // Kahan update in place
                let y = prob - slot.1;
                let t = slot.0 + y;
                slot.1 = (t - slot.0) - y;
                slot.0 = t;
            }
            acc
        })
        .collect();
    // merge chunks in index order so the result is thread-count independent
    let mut merged: HashMap<u64, KahanSum> = HashMap::new();
    for part in partials {
        let mut entries: Vec<(u64, (f64, f64))> = part.into_iter().collect();
        entries.sort_unstable_by_key(|e| e.0);
        for (bits, (v, _)) in entries {
            merged.entry(bits).or_default().add(v);
        }
    }
    let mut pairs: Vec<(f64, f64)> = merged
        .into_iter()
        .map(|(bits, s)| (f64::from_bits(bits), s.value()))
        .collect();
    pairs.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let values: Vec<f64> = pairs.iter().map(|e| e.0).collect();
    let probs: Vec<f64> = pairs.iter().map(|e| e.1).collect();
    let mut mean = KahanSum::new();
    let mut second = KahanSum::new();
    for (v, pr) in values.iter().zip(&probs) {
        mean.add(v * pr);
        second.add(v * v * pr);
    }
    let mean = mean.value();
    Ok(ExactDistribution { values, probs, mean, variance: second.value() - mean * mean })
}

/// A finite product space with independent coordinates.
#[derive(Clone, Debug)]
pub struct ProductSpace {
    sizes: Vec<u8>,
    probs: Vec<Vec<f64>>,
}

impl ProductSpace {
    pub fn new(probs: Vec<Vec<f64>>) -> Result<Self> {
        if probs.is_empty() || probs.len() > 12 {
            return Err(Error::too_large("product space: need 1..=12 coordinates"));
        }
        let mut sizes = Vec::new();
        let mut total: usize = 1;
        for (i, f) in probs.iter().enumerate() {
            if f.is_empty() || f.len() > 4 {
                return Err(Error::input(format!("factor {i}: size must be 1..=4")));
            }
            let s: f64 = f.iter().sum();
            if (s - 1.0).abs() > 1e-12 || f.iter().any(|&x| x < 0.0) {
                return Err(Error::input(format!("factor {i}: probabilities must sum to 1")));
            }
            sizes.push(f.len() as u8);
            total = total.checked_mul(f.len()).unwrap();
        }
        if total > 1 << 16 {
            return Err(Error::too_large("product space: over 2^16 outcomes"));
        }
        Ok(ProductSpace { sizes, probs })
    }

    /// Uniform binary space on `m` coordinates.
    pub fn uniform_bits(m: usize) -> Result<Self> {
        ProductSpace::new(vec![vec![0.5, 0.5]; m])
    }

    pub fn coords(&self) -> usize {
        self.sizes.len()
    }

    pub fn outcome_count(&self) -> usize {
        self.sizes.iter().map(|&s| s as usize).product()
    }

    pub fn digits(&self, mut idx: usize, out: &mut [u8]) {
        for (i, &s) in self.sizes.iter().enumerate() {
            out[i] = (idx % s as usize) as u8;
            idx /= s as usize;
        }
    }

    pub fn digit(&self, idx: usize, coord: usize) -> u8 {
        let mut rem = idx;
        for &s in &self.sizes[..coord] {
            rem /= s as usize;
        }
        (rem % self.sizes[coord] as usize) as u8
    }

    pub fn pr(&self, idx: usize) -> f64 {
        let mut digits = vec![0u8; self.coords()];
        self.digits(idx, &mut digits);
        digits
            .iter()
            .enumerate()
            .map(|(i, &d)| self.probs[i][d as usize])
            .product()
    }
}

/// One variable of a bounded-dependency family: a nonnegative function of a
/// few coordinates, tabulated over its local sub-space.
#[derive(Clone, Debug)]
pub struct DepVar {
    pub coords: Vec<usize>,
    /// Value per local outcome index (mixed radix over `coords` in order).
    pub table: Vec<f64>,
}

/// An explicit family `(Y_α)` over a product space, with a symmetric
/// reflexive dependency relation under which unrelated variables read
/// disjoint coordinates.
#[derive(Clone, Debug)]
pub struct DependencyInstance {
    pub space: ProductSpace,
    pub vars: Vec<DepVar>,
    /// relation[α] has bit β set iff α ~ β.
    pub relation: Vec<u16>,
    pub cap: f64,
}

impl DependencyInstance {
    /// Derives `α ~ β` iff the coordinate sets intersect (plus reflexivity).
    pub fn from_vars(space: ProductSpace, vars: Vec<DepVar>, cap: f64) -> Result<Self> {
        if vars.len() > 12 {
            return Err(Error::too_large("dependency instance: at most 12 variables"));
        }
        if !(cap > 0.0) {
            return Err(Error::input("dependency instance: cap must be > 0"));
        }
        for (i, v) in vars.iter().enumerate() {
            let local: usize = v.coords.iter().map(|&c| space.sizes[c] as usize).product();
            if v.coords.iter().any(|&c| c >= space.coords()) {
                return Err(Error::input(format!("variable {i}: coordinate out of range")));
            }
            if v.table.len() != local {
                return Err(Error::input(format!(
                    "variable {i}: table size {} != local outcomes {local}",
                    v.table.len()
                )));
            }
            if v.table.iter().any(|&y| y < 0.0) {
                return Err(Error::input(format!("variable {i}: values must be >= 0")));
            }
        }
        let mut relation = vec![0u16; vars.len()];
        for a in 0..vars.len() {
            for b in 0..vars.len() {
                let related =
                    a == b || vars[a].coords.iter().any(|c| vars[b].coords.contains(c));
                if related {
                    relation[a] |= 1 << b;
                }
            }
        }
        Ok(DependencyInstance { space, vars, relation, cap })
    }

    /// Y values of every variable at the outcome.
    pub fn values_at(&self, outcome: usize) -> Vec<f64> {
        let mut digits = vec![0u8; self.space.coords()];
        self.space.digits(outcome, &mut digits);
        self.vars
            .iter()
            .map(|v| {
                let mut idx = 0usize;
                let mut mult = 1usize;
                for &c in &v.coords {
                    idx += digits[c] as usize * mult;
                    mult *= self.space.sizes[c] as usize;
                }
                v.table[idx]
            })
            .collect()
    }

    /// `E Y_α` for every variable, exactly (over the local marginals).
    pub fn expectations(&self) -> Vec<f64> {
        self.vars
            .iter()
            .map(|v| {
                let mut acc = KahanSum::new();
                let local: usize = v.coords.iter().map(|&c| self.space.sizes[c] as usize).product();
                for li in 0..local {
                    let mut idx = li;
                    let mut pr = 1.0;
                    for &c in &v.coords {
                        let s = self.space.sizes[c] as usize;
                        pr *= self.space.probs[c][idx % s];
                        idx /= s;
                    }
                    acc.add(pr * v.table[li]);
                }
                acc.value()
            })
            .collect()
    }

    /// `Z_C` at one outcome: maximum of `Σ_{α∈J} Y_α` over `J` whose internal
    /// dependency loads stay under the cap. Branch and bound over inclusion.
    pub fn zc_at(&self, y: &[f64]) -> f64 {
        // order by descending value for effective pruning
        let mut order: Vec<usize> = (0..y.len()).collect();
        order.sort_by(|&a, &b| y[b].partial_cmp(&y[a]).unwrap().then(a.cmp(&b)));
        let suffix: Vec<f64> = {
            let mut s = vec![0.0; y.len() + 1];
            for i in (0..y.len()).rev() {
                s[i] = s[i + 1] + y[order[i]];
            }
            s
        };
        let mut best = 0.0f64;
        let mut loads = vec![0.0f64; y.len()];
        let mut chosen: Vec<usize> = Vec::new();
        self.zc_rec(y, &order, &suffix, 0, 0.0, &mut loads, &mut chosen, &mut best);
        best
    }

    /// Invariant: `loads[b] = Σ_{a ∈ chosen, a ~ b} y[a]` for every index b.
    /// A prefix whose internal loads already break the cap can never recover
    /// (values are nonnegative), so pruning on the running loads is sound.
    #[allow(clippy::too_many_arguments)]
    fn zc_rec(
        &self,
        y: &[f64],
        order: &[usize],
        suffix: &[f64],
        depth: usize,
        sum: f64,
        loads: &mut [f64],
        chosen: &mut Vec<usize>,
        best: &mut f64,
    ) {
        if sum > *best {
            *best = sum;
        }
        if depth == order.len() || sum + suffix[depth] <= *best {
            return;
        }
        let alpha = order[depth];
        let ya = y[alpha];
        // include alpha if every affected load stays under the cap
        let mut feasible = loads[alpha] + ya <= self.cap + 1e-12;
        if feasible {
            for &b in chosen.iter() {
                if self.relation[alpha] & (1 << b) != 0 && loads[b] + ya > self.cap + 1e-12 {
                    feasible = false;
                    break;
                }
            }
        }
        if feasible {
            for b in 0..y.len() {
                if self.relation[alpha] & (1 << b) != 0 {
                    loads[b] += ya;
                }
            }
            chosen.push(alpha);
            self.zc_rec(y, order, suffix, depth + 1, sum + ya, loads, chosen, best);
            chosen.pop();
            for b in 0..y.len() {
                if self.relation[alpha] & (1 << b) != 0 {
                    loads[b] -= ya;
                }
            }
        }
        // exclude alpha
        self.zc_rec(y, order, suffix, depth + 1, sum, loads, chosen, best);
    }

    /// Plain enumeration over all subsets; the branch-and-bound cross-check.
    pub fn zc_at_enumerated(&self, y: &[f64]) -> f64 {
        let n = y.len();
        let mut best = 0.0f64;
        'subsets: for set in 0u32..(1 << n) {
            let mut sum = 0.0;
            for b in 0..n {
                if set & (1 << b) == 0 {
                    continue;
                }
                let mut load = 0.0;
                for a in 0..n {
                    if set & (1 << a) != 0 && self.relation[b] & (1 << a) != 0 {
                        load += y[a];
                    }
                }
                if load > self.cap + 1e-12 {
                    continue 'subsets;
                }
                sum += y[b];
            }
            best = best.max(sum);
        }
        best
    }

    /// Exact `Pr(Z_C >= threshold)`.
    pub fn pr_zc_ge(&self, threshold: f64) -> f64 {
        let count = self.space.outcome_count();
        let mut acc = KahanSum::new();
        for idx in 0..count {
            let y = self.values_at(idx);
            if self.zc_at(&y) >= threshold {
                acc.add(self.space.pr(idx));
            }
        }
        acc.value()
    }
}

/// Verdict of an exact Chernoff comparison: the four bound forms, the exact
/// probability, and whether the bound holds.
#[derive(Clone, Debug, Serialize)]
pub struct ChernoffCheck {
    pub mu: f64,
    pub t: f64,
    pub cap: f64,
    pub exact: f64,
    pub log_forms: [f64; 4],
    pub orderings_ok: bool,
    pub holds: bool,
}

impl ChernoffCheck {
    /// Interchange shape shared by all oracle verdicts.
    pub fn report_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": "chernoff",
            "inputs": {"mu": self.mu, "t": self.t, "cap": self.cap},
            "holds": self.holds,
            "lhs": self.exact,
            "rhs": self.log_forms[0].exp(),
        })
    }
}

/// Compares the exact `Pr(Z_C >= mu + t)` with every bound form. `mu` must
/// dominate the exact total expectation (verified).
pub fn check_chernoff(inst: &DependencyInstance, mu: f64, t: f64) -> Result<ChernoffCheck> {
    if !(t > 0.0) {
        return Err(Error::input("check_chernoff: t must be > 0"));
    }
    let total: f64 = inst.expectations().iter().sum();
    if total > mu * (1.0 + 1e-12) + 1e-12 {
        return Err(Error::input(format!(
            "check_chernoff: sum of expectations {total} exceeds mu = {mu}"
        )));
    }
    let exact = inst.pr_zc_ge(mu + t);
    let log_forms = chernoff_log_forms(mu, inst.cap, t);
    let min23 = log_forms[1].min(log_forms[2]);
    let orderings_ok = log_forms[0] <= min23 + 1e-12 && min23 <= log_forms[3] + 1e-12;
    let holds = exact <= log_forms[0].exp() * (1.0 + 1e-9) + 1e-300;
    Ok(ChernoffCheck { mu, t, cap: inst.cap, exact, log_forms, orderings_ok, holds })
}

/// An event over a product space, as an explicit outcome set.
#[derive(Clone, Debug)]
pub struct EventSet {
    pub members: Vec<bool>,
}

impl EventSet {
    pub fn from_predicate(space: &ProductSpace, pred: impl Fn(usize) -> bool) -> Self {
        EventSet { members: (0..space.outcome_count()).map(pred).collect() }
    }

    pub fn probability(&self, space: &ProductSpace) -> f64 {
        let mut acc = KahanSum::new();
        for (idx, &inside) in self.members.iter().enumerate() {
            if inside {
                acc.add(space.pr(idx));
            }
        }
        acc.value()
    }

    /// Is the event increasing in the binary order (needs a binary space)?
    pub fn is_increasing(&self, space: &ProductSpace) -> bool {
        let m = space.coords();
        for idx in 0..self.members.len() {
            if !self.members[idx] {
                continue;
            }
            for c in 0..m {
                if space.digit(idx, c) == 0 {
                    // flipping coordinate c from 0 to 1 adds its stride
                    let stride: usize = space.sizes[..c].iter().map(|&s| s as usize).product();
                    if !self.members[idx + stride] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Upward closure of the event in the binary order.
    pub fn increasing_closure(&self, space: &ProductSpace) -> EventSet {
        let m = space.coords();
        let mut members = self.members.clone();
        // repeatedly push membership up one coordinate at a time
        for c in 0..m {
            let stride: usize = space.sizes[..c].iter().map(|&s| s as usize).product();
            for idx in 0..members.len() {
                if members[idx] && space.digit(idx, c) == 0 {
                    members[idx + stride] = true;
                }
            }
        }
        EventSet { members }
    }
}

/// How outcomes are weighted in a disjoint-occurrence check.
#[derive(Clone, Copy, Debug)]
pub enum Measure {
    /// The product measure of the space itself.
    Product,
    /// Uniform over binary outcomes with exactly `m` ones.
    ExactOnes(usize),
}

/// Result of one disjoint-occurrence comparison.
#[derive(Clone, Debug, Serialize)]
pub struct BkCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub box_count: usize,
}

impl BkCheck {
    pub fn report_json(&self, n_events: usize) -> serde_json::Value {
        serde_json::json!({
            "kind": "disjoint_occurrence",
            "inputs": {"events": n_events, "box_outcomes": self.box_count},
            "holds": self.holds,
            "lhs": self.lhs,
            "rhs": self.rhs,
        })
    }
}

/// Decides `Pr(all events occur disjointly) <= Π Pr(event)` by exhaustive
/// evaluation: an outcome is in the disjoint-occurrence event iff pairwise
/// disjoint coordinate sets exist, one per event, each of which pins the
/// outcome inside its event.
pub fn check_bk(space: &ProductSpace, events: &[EventSet], measure: Measure) -> Result<BkCheck> {
    if events.is_empty() || events.len() > 4 {
        return Err(Error::too_large("check_bk: 1..=4 events"));
    }
    let m = space.coords();
    if m > 12 {
        return Err(Error::too_large("check_bk: at most 12 coordinates"));
    }
    let count = space.outcome_count();
    for ev in events {
        if ev.members.len() != count {
            return Err(Error::input("check_bk: event size mismatch"));
        }
    }
    // For each event and coordinate mask I, mark the outcomes whose cylinder
    // through I lies inside the event: the restriction of the event to I.
    let restricted: Vec<Vec<Vec<bool>>> = events
        .par_iter()
        .map(|ev| restrictions(space, ev))
        .collect();
    // minimal witness masks per event and outcome
    let minimal: Vec<Vec<Vec<u16>>> = restricted
        .par_iter()
        .map(|per_mask| {
            (0..count)
                .map(|idx| {
                    let mut mins = Vec::new();
                    for mask in 0u16..(1 << m) {
                        if !per_mask[mask as usize][idx] {
                            continue;
                        }
                        let mut is_min = true;
                        for c in 0..m {
                            if mask & (1 << c) != 0 && per_mask[(mask & !(1 << c)) as usize][idx] {
                                is_min = false;
                                break;
                            }
                        }
                        if is_min {
                            mins.push(mask);
                        }
                    }
                    mins
                })
                .collect()
        })
        .collect();
    let mut in_box = vec![false; count];
    let mut box_count = 0usize;
    for idx in 0..count {
        if disjoint_assignment_exists(&minimal, idx, 0, 0) {
            in_box[idx] = true;
            box_count += 1;
        }
    }
    let weight = |idx: usize| -> f64 {
        match measure {
            Measure::Product => space.pr(idx),
            Measure::ExactOnes(mm) => {
                let ones = (0..m).filter(|&c| space.digit(idx, c) == 1).count();
                if ones == mm {
                    1.0 / binomial(m as u64, mm as u64) as f64
                } else {
                    0.0
                }
            }
        }
    };
    let mut lhs = KahanSum::new();
    for idx in 0..count {
        if in_box[idx] {
            lhs.add(weight(idx));
        }
    }
    let mut rhs = 1.0;
    for ev in events {
        let mut pr = KahanSum::new();
        for idx in 0..count {
            if ev.members[idx] {
                pr.add(weight(idx));
            }
        }
        rhs *= pr.value();
    }
    let lhs = lhs.value();
    Ok(BkCheck { lhs, rhs, holds: lhs <= rhs * (1.0 + 1e-9) + 1e-12, box_count })
}

/// `restrictions[mask][outcome]` = does knowing the coordinates in `mask`
/// already force the event?
fn restrictions(space: &ProductSpace, ev: &EventSet) -> Vec<Vec<bool>> {
    let m = space.coords();
    let count = space.outcome_count();
    let mut out = Vec::with_capacity(1 << m);
    let mut digits = vec![0u8; m];
    for mask in 0u16..(1 << m) {
        // group outcomes by their projection onto the mask: a group is good
        // iff every outcome in it lies inside the event
        let mut good: HashMap<u64, bool> = HashMap::new();
        for idx in 0..count {
            space.digits(idx, &mut digits);
            let mut key = 0u64;
            for c in 0..m {
                if mask & (1 << c) != 0 {
                    key = key * 4 + digits[c] as u64;
                }
            }
            let entry = good.entry(key).or_insert(true);
            *entry &= ev.members[idx];
        }
        let mut row = vec![false; count];
        for (idx, slot) in row.iter_mut().enumerate() {
            space.digits(idx, &mut digits);
            let mut key = 0u64;
            for c in 0..m {
                if mask & (1 << c) != 0 {
                    key = key * 4 + digits[c] as u64;
                }
            }
            *slot = ev.members[idx] && good[&key];
        }
        out.push(row);
    }
    out
}

fn disjoint_assignment_exists(
    minimal: &[Vec<Vec<u16>>],
    idx: usize,
    event: usize,
    used: u16,
) -> bool {
    if event == minimal.len() {
        return true;
    }
    for &w in &minimal[event][idx] {
        if w & used == 0 && disjoint_assignment_exists(minimal, idx, event + 1, used | w) {
            return true;
        }
    }
    false
}

/// A clustered lower-bound witness: a vertex set whose induced weight reaches
/// the target, certifying `Pr(X >= target) >= p^{|U|}`.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub vertices: Vec<u32>,
    pub achieved_weight: f64,
    pub log_bound: f64,
}

impl Witness {
    pub fn report_json(&self, p: f64, target: f64) -> serde_json::Value {
        serde_json::json!({
            "kind": "clustered_witness",
            "inputs": {"p": p, "target": target, "vertices": self.vertices},
            "holds": true,
            "lhs": self.log_bound,
            "rhs": self.achieved_weight,
        })
    }
}

/// Greedy densest-first selection until the induced weight reaches `target`.
/// The certificate is valid for any vertex set, so greedy suboptimality only
/// weakens the lower bound, never invalidates it.
pub fn lower_bound_witness(h: &Hypergraph, p: f64, target: f64) -> Result<Witness> {
    if !(0.0 < p && p <= 1.0) {
        return Err(Error::input("lower_bound_witness: p must lie in (0, 1]"));
    }
    if target > h.total_weight() + 1e-12 {
        return Err(Error::Unreachable(format!(
            "target {target} exceeds total weight {}",
            h.total_weight()
        )));
    }
    let n = h.n_vertices();
    let mut inside = vec![false; n as usize + 1];
    let mut chosen: Vec<u32> = Vec::new();
    let mut weight = 0.0f64;
    while weight < target {
        let mut best: Option<(f64, f64, u32)> = None; // (gain, potential, vertex)
        for v in 1..=n {
            if inside[v as usize] {
                continue;
            }
            let mut gain = 0.0;
            let mut potential = 0.0;
            for &ei in h.incident_edges(v) {
                let f = h.edge(ei as usize);
                let missing = f.iter().filter(|&&u| u != v && !inside[u as usize]).count();
                if missing == 0 {
                    gain += h.weight(ei as usize);
                }
                potential += h.weight(ei as usize) * 0.5f64.powi(missing as i32);
            }
            let cand = (gain, potential, v);
            let better = match &best {
                None => true,
                Some((g, pt, bv)) => {
                    gain > *g + 1e-15
                        || ((gain - g).abs() <= 1e-15
                            && (potential > *pt + 1e-15
                                || ((potential - pt).abs() <= 1e-15 && v < *bv)))
                }
            };
            if better {
                best = Some(cand);
            }
        }
        let (gain, _, v) = best.expect("target is reachable, so vertices remain");
        inside[v as usize] = true;
        chosen.push(v);
        weight += gain;
    }
    chosen.sort_unstable();
    Ok(Witness { vertices: chosen.clone(), achieved_weight: weight, log_bound: chosen.len() as f64 * p.ln() })
}

/// Exact falling-moment certificate for the degree tail weight: finds
/// `(d, x0)` with `Σ_U Pr(|Γ_U(H_p)| >= x) <= N^{-d x^{1/s}}` for all
/// integer `x >= x0`, or None when no positive `d` works. The per-threshold
/// estimates are rigorous union/moment bounds, independent of the bound
/// evaluators they certify.
pub fn psi_certificate(h: &Hypergraph, p: f64, ell: usize, s: f64) -> Option<(f64, f64)> {
    let delta_ell = h.delta(ell).ok()? as usize;
    if delta_ell == 0 || h.n_vertices() < 2 {
        return None;
    }
    let ln_n = (h.n_vertices() as f64).ln();
    // collect the centres: ell-subsets of edges
    let mut centres: Vec<Vec<u32>> = Vec::new();
    {
        let mut seen = std::collections::BTreeSet::new();
        for f in h.edges() {
            for_each_subset(f, ell, |u| {
                if seen.insert(u.to_vec()) {
                    centres.push(u.to_vec());
                }
            });
        }
    }
    // Per-centre falling moments E[(Z_U)_r] = sum over ordered r-tuples of
    // distinct edges of p^{|union|}, computed once and reused against every
    // threshold. Higher moments are skipped above the work caps (the
    // certificate only weakens).
    struct CentreMoments {
        degree: usize,
        m: [f64; 3],
    }
    let moments: Vec<CentreMoments> = centres
        .iter()
        .map(|u| {
            let gamma = h.gamma(u).expect("valid centre");
            let mut m = [0.0f64, f64::INFINITY, f64::INFINITY];
            for &i in &gamma {
                m[0] += p.powi(h.edge(i).len() as i32);
            }
            if gamma.len() <= 1_500 {
                let mut m2 = 0.0f64;
                for &i in &gamma {
                    let fi = h.edge(i);
                    for &j in &gamma {
                        if i != j {
                            let shared = fi
                                .iter()
                                .filter(|v| h.edge(j).binary_search(v).is_ok())
                                .count();
                            m2 += p.powi((fi.len() + h.edge(j).len() - shared) as i32);
                        }
                    }
                }
                m[1] = m2;
            }
            if gamma.len() <= 40 {
                let mut m3 = 0.0f64;
                for &i in &gamma {
                    for &j in &gamma {
                        for &l in &gamma {
                            if i != j && j != l && i != l {
                                m3 += p.powi(union_size(h, &[i, j, l]) as i32);
                            }
                        }
                    }
                }
                m[2] = m3;
            }
            CentreMoments { degree: gamma.len(), m }
        })
        .collect();
    let psi_bound = |a: usize| -> f64 {
        let mut total = KahanSum::new();
        for cm in &moments {
            if cm.degree < a {
                continue;
            }
            let mut best = f64::INFINITY;
            let mut denom = 1.0f64;
            for r in 1..=3usize.min(a) {
                denom *= (a + 1 - r) as f64;
                if cm.m[r - 1].is_finite() {
                    best = best.min(cm.m[r - 1] / denom);
                }
            }
            total.add(best.min(1.0));
        }
        total.value()
    };
    let mut x0: Option<usize> = None;
    let mut d = f64::INFINITY;
    for a in 1..=delta_ell {
        let bound = psi_bound(a);
        if x0.is_none() {
            if bound < 1.0 {
                x0 = Some(a);
            } else {
                continue;
            }
        }
        if bound > 0.0 {
            let da = -bound.ln() / (ln_n * (a as f64).powf(1.0 / s));
            if da <= 0.0 {
                return None;
            }
            d = d.min(da);
        }
    }
    let x0 = x0? as f64;
    if !d.is_finite() {
        // every threshold from x0 on has zero mass; any d certifies
        d = 1.0;
    }
    Some((d, x0))
}

fn union_size(h: &Hypergraph, idxs: &[usize]) -> usize {
    let mut verts: Vec<u32> = idxs.iter().flat_map(|&i| h.edge(i).iter().copied()).collect();
    verts.sort_unstable();
    verts.dedup();
    verts.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::sampler::trial_rng;
    use rand::Rng;

    #[test]
    fn exact_single_edge() {
        let h = Hypergraph::unit(2, 2, vec![vec![1, 2]]).unwrap();
        let d = exact_distribution(&h, Regime::VertexBinomial { p: 0.5 }).unwrap();
        assert!((d.tail(1.0) - 0.25).abs() < 1e-15);
        assert!((d.tail(0.0) - 1.0).abs() < 1e-12);
        assert!((d.mean - 0.25).abs() < 1e-15);
    }

    #[test]
    fn exact_ap6_mean() {
        // 3-term progressions in [6]: 4 with gap 1, 2 with gap 2
        let h = generators::gen_ap(6, 3).unwrap();
        assert_eq!(h.edge_count(), 6);
        let d = exact_distribution(&h, Regime::VertexBinomial { p: 0.5 }).unwrap();
        assert!((d.mean - 0.75).abs() < 1e-12);
        assert!((d.total_mass() - 1.0).abs() < 1e-9);
        let mp = h.mu_profile(0.5).unwrap();
        assert!((d.mean - mp.mu).abs() < 1e-9);
    }

    #[test]
    fn exact_variance_of_bernoulli_edge() {
        let h = Hypergraph::unit(2, 2, vec![vec![1, 2]]).unwrap();
        let d = exact_distribution(&h, Regime::VertexBinomial { p: 0.5 }).unwrap();
        // X ~ Bernoulli(1/4)
        assert!((d.variance - 0.25 * 0.75).abs() < 1e-15);
    }

    #[test]
    fn exact_uniform_regime() {
        let h = generators::gen_schur(8).unwrap();
        let d = exact_distribution(&h, Regime::VertexUniform { m: 4 }).unwrap();
        assert!((d.total_mass() - 1.0).abs() < 1e-9);
        // brute cross-check of the mean: average over all C(8,4) subsets
        let verts: Vec<u32> = (1..=8).collect();
        let mut acc = 0.0;
        let mut cnt = 0u64;
        for_each_subset(&verts, 4, |s| {
            let (sub, _) = h.induced_by_vertices(s);
            acc += sub.total_weight();
            cnt += 1;
        });
        assert!((d.mean - acc / cnt as f64).abs() < 1e-12);
    }

    #[test]
    fn exact_distribution_refuses_large() {
        let h = generators::gen_ap(25, 3).unwrap();
        assert!(exact_distribution(&h, Regime::VertexBinomial { p: 0.5 }).is_err());
    }

    fn random_instance(seed: u64, n_vars: usize, coords: usize) -> DependencyInstance {
        let mut rng = trial_rng(seed, 0);
        let space = ProductSpace::uniform_bits(coords).unwrap();
        let vars: Vec<DepVar> = (0..n_vars)
            .map(|_| {
                let n_c = 1 + rng.random_range(0..2usize);
                let mut cs: Vec<usize> = Vec::new();
                while cs.len() < n_c {
                    let c = rng.random_range(0..coords);
                    if !cs.contains(&c) {
                        cs.push(c);
                    }
                }
                cs.sort_unstable();
                let table = (0..(1 << cs.len())).map(|_| rng.random::<f64>()).collect();
                DepVar { coords: cs, table }
            })
            .collect();
        let cap = 0.5 + rng.random::<f64>() * 2.0;
        DependencyInstance::from_vars(space, vars, cap).unwrap()
    }

    #[test]
    fn zc_branch_and_bound_matches_enumeration() {
        for seed in 0..30u64 {
            let inst = random_instance(seed, 8, 6);
            for outcome in [0usize, 1, 17, 33, 63] {
                let y = inst.values_at(outcome);
                let fast = inst.zc_at(&y);
                let slow = inst.zc_at_enumerated(&y);
                assert!((fast - slow).abs() < 1e-10, "seed {seed} outcome {outcome}");
            }
        }
    }

    #[test]
    fn zc_classical_reduction() {
        // independent indicators, self-related only, cap 1: Z_C is the plain sum
        let space = ProductSpace::uniform_bits(5).unwrap();
        let vars: Vec<DepVar> = (0..5)
            .map(|c| DepVar { coords: vec![c], table: vec![0.0, 1.0] })
            .collect();
        let inst = DependencyInstance::from_vars(space, vars, 1.0).unwrap();
        for outcome in 0..32usize {
            let y = inst.values_at(outcome);
            let sum: f64 = y.iter().sum();
            assert_eq!(inst.zc_at(&y), sum);
        }
    }

    #[test]
    fn zc_cap_extremes() {
        let inst = random_instance(3, 6, 5);
        for outcome in 0..16usize {
            let y = inst.values_at(outcome);
            let sum: f64 = y.iter().sum();
            // huge cap: constraint never binds
            let mut big = inst.clone();
            big.cap = sum + 1.0;
            assert!((big.zc_at(&y) - sum).abs() < 1e-12);
            // tiny cap: only variables with Y = 0 fit, plus nothing positive
            let mut tiny = inst.clone();
            tiny.cap = 1e-15;
            let z = tiny.zc_at(&y);
            assert!(z < 1e-9, "z = {z}");
        }
    }

    #[test]
    fn chernoff_check_validates_mu() {
        let inst = random_instance(11, 6, 6);
        let total: f64 = inst.expectations().iter().sum();
        assert!(check_chernoff(&inst, total * 0.5, 1.0).is_err());
        let chk = check_chernoff(&inst, total, 1.0).unwrap();
        assert!(chk.holds && chk.orderings_ok);
    }

    #[test]
    fn bk_single_event_and_disjoint_product() {
        let space = ProductSpace::uniform_bits(4).unwrap();
        // event on coordinates {0}: x0 = 1
        let e0 = EventSet::from_predicate(&space, |idx| space.digit(idx, 0) == 1);
        let chk = check_bk(&space, &[e0.clone()], Measure::Product).unwrap();
        assert!(chk.holds);
        assert!((chk.lhs - 0.5).abs() < 1e-12);
        // two events on disjoint coordinates multiply exactly
        let e1 = EventSet::from_predicate(&space, |idx| space.digit(idx, 2) == 1);
        let chk = check_bk(&space, &[e0, e1], Measure::Product).unwrap();
        assert!(chk.holds);
        assert!((chk.lhs - chk.rhs).abs() < 1e-12);
    }

    #[test]
    fn bk_same_coordinate_events_cannot_cooccur_disjointly() {
        let space = ProductSpace::uniform_bits(3).unwrap();
        let e = EventSet::from_predicate(&space, |idx| space.digit(idx, 0) == 1);
        // the same nontrivial event twice: any witnesses must both use
        // coordinate 0, so the disjoint-occurrence set is empty
        let chk = check_bk(&space, &[e.clone(), e], Measure::Product).unwrap();
        assert_eq!(chk.box_count, 0);
        assert!(chk.holds);
    }

    #[test]
    fn oracle_reports_share_the_interchange_shape() {
        let inst = random_instance(2, 5, 5);
        let total: f64 = inst.expectations().iter().sum();
        let chk = check_chernoff(&inst, total, 1.0).unwrap();
        let js = chk.report_json();
        for key in ["kind", "inputs", "holds", "lhs", "rhs"] {
            assert!(js.get(key).is_some(), "missing {key}");
        }
        let space = ProductSpace::uniform_bits(3).unwrap();
        let e = EventSet::from_predicate(&space, |idx| space.digit(idx, 0) == 1);
        let bk = check_bk(&space, &[e], Measure::Product).unwrap().report_json(1);
        assert_eq!(bk["kind"], "disjoint_occurrence");
        assert!(bk["holds"].as_bool().unwrap());
    }

    #[test]
    fn witness_trivial_and_symmetric_cases() {
        let h = generators::gen_complete(7, 3).unwrap();
        let w = lower_bound_witness(&h, 0.5, 0.0).unwrap();
        assert!(w.vertices.is_empty());
        assert_eq!(w.log_bound, 0.0);
        // target C(5,3) needs exactly 5 vertices on the complete host
        let w = lower_bound_witness(&h, 0.5, 10.0).unwrap();
        assert_eq!(w.vertices.len(), 5);
        assert!(w.achieved_weight >= 10.0);
        assert!(lower_bound_witness(&h, 0.5, 36.0).is_err());
    }

    #[test]
    fn witness_ap_full_target_needs_every_vertex() {
        let h = generators::gen_ap(10, 3).unwrap();
        let w = lower_bound_witness(&h, 0.3, 20.0).unwrap();
        assert_eq!(w.vertices, (1..=10).collect::<Vec<u32>>());
        assert!((w.log_bound - 10.0 * 0.3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn psi_certificate_is_sound_on_small_instance() {
        let h = generators::gen_ap(12, 3).unwrap();
        let p = 0.15;
        let (d, x0) = psi_certificate(&h, p, 1, 1.0).unwrap();
        assert!(d > 0.0);
        // brute-force the exact tail weight and verify the certified decay
        let n = h.n_vertices();
        let ln_n = (n as f64).ln();
        for a in x0 as usize..=h.delta(1).unwrap() as usize {
            let mut psi = 0.0f64;
            for v in 1..=n {
                // exact Pr(|Gamma_v(H_p)| >= a) over the relevant vertex set
                let gamma = h.gamma(&[v]).unwrap();
                if gamma.len() < a {
                    continue;
                }
                let mut rel: Vec<u32> = gamma
                    .iter()
                    .flat_map(|&i| h.edge(i).iter().copied())
                    .filter(|&u| u != v)
                    .collect();
                rel.sort_unstable();
                rel.dedup();
                let mut pr = 0.0f64;
                for set in 0u32..(1 << rel.len()) {
                    let mut count = 0;
                    for &ei in &gamma {
                        let ok = h.edge(ei).iter().all(|&u| {
                            u == v || set & (1 << rel.binary_search(&u).unwrap()) != 0
                        });
                        if ok {
                            count += 1;
                        }
                    }
                    if count >= a {
                        let ones = set.count_ones() as i32;
                        pr += p.powi(ones) * (1.0 - p).powi(rel.len() as i32 - ones);
                    }
                }
                psi += pr * p; // the centre itself must survive
            }
            let certified = (-d * (a as f64).powf(1.0) * ln_n).exp();
            assert!(
                psi <= certified * (1.0 + 1e-9),
                "a = {a}: exact {psi} vs certified {certified}"
            );
        }
    }
}
