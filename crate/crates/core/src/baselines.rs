//! Exact and heuristic comparison algorithms.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::DistanceMatrix;
use crate::matroid::MatroidKind;
use crate::{tol, Error, Instance, Result};

/// Largest ground set accepted by [`brute_force_opt`].
pub const BRUTE_FORCE_MAX: usize = 20;

/// Retry cap for [`randomized_round_cardinality`].
pub const MAX_RETRIES: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Sorted elements.
    pub set: Vec<usize>,
    pub value: f64,
}

fn improves(candidate: f64, incumbent: f64) -> bool {
    candidate > incumbent + 1e-12 * (1.0 + incumbent.abs())
}

/// Maximizes `g(χ^S)` over every independent set by depth-first enumeration
/// (pruned at dependent sets). Ties keep the lexicographically smallest set.
pub fn brute_force_opt(inst: &Instance) -> Result<Selection> {
    let n = inst.n();
    if n > BRUTE_FORCE_MAX {
        return Err(Error::TooLarge(n, BRUTE_FORCE_MAX));
    }
    let mut search = Search {
        inst,
        set: Vec::new(),
        best: Selection {
            set: Vec::new(),
            value: 0.0,
        },
    };
    search.descend(0, 0.0);
    Ok(search.best)
}

struct Search<'a> {
    inst: &'a Instance,
    set: Vec<usize>,
    best: Selection,
}

impl Search<'_> {
    // Visits sets in lexicographic order: each extension of `set` by a larger
    // element before moving on.
    fn descend(&mut self, next: usize, value: f64) {
        let d = self.inst.distance();
        let w = self.inst.scores();
        for e in next..self.inst.n() {
            self.set.push(e);
            if self.inst.matroid().rank_distinct(&self.set) == self.set.len() {
                let gain = 2.0 * self.set[..self.set.len() - 1].iter().map(|&s| d.get(s, e)).sum::<f64>()
                    + w.map_or(0.0, |w| w[e]);
                let v = value + gain;
                if improves(v, self.best.value) {
                    self.best = Selection {
                        set: self.set.clone(),
                        value: v,
                    };
                }
                self.descend(e + 1, v);
            }
            self.set.pop();
        }
    }
}

/// Builds a basis by repeatedly adding the element with the largest marginal
/// gain that keeps the set independent; ties go to the lowest index.
pub fn greedy_insertion(inst: &Instance) -> Selection {
    let n = inst.n();
    let d = inst.distance();
    let w = inst.scores();
    let mut set: Vec<usize> = Vec::new();
    let mut in_set = vec![false; n];
    // gain[e] = 2·Σ_{s∈S} d(s,e) + w_e
    let mut gain: Vec<f64> = (0..n).map(|e| w.map_or(0.0, |w| w[e])).collect();
    let mut value = 0.0;
    let m = inst.matroid();
    while set.len() < m.full_rank() {
        let mut pick: Option<usize> = None;
        for e in 0..n {
            if in_set[e] || pick.is_some_and(|p| gain[e] <= gain[p]) {
                continue;
            }
            set.push(e);
            if m.rank_distinct(&set) == set.len() {
                pick = Some(e);
            }
            set.pop();
        }
        let Some(e) = pick else { break };
        value += gain[e];
        set.push(e);
        in_set[e] = true;
        for (f, g) in gain.iter_mut().enumerate() {
            *g += 2.0 * d.get(e, f);
        }
    }
    set.sort_unstable();
    Selection { set, value }
}

/// Single-swap local search over bases.
///
/// `seed` is first extended to a basis (lowest indices first). Then, while
/// some exchange `S − a + b` stays a basis and improves the value, the best
/// such exchange is applied; ties go to the lexicographically first `(a, b)`.
pub fn local_search(inst: &Instance, seed: &[usize]) -> Result<Selection> {
    let n = inst.n();
    let m = inst.matroid();
    if !m.is_independent(seed)? {
        return Err(Error::param("local search seed must be independent"));
    }
    let mut set: Vec<usize> = seed.to_vec();
    set.sort_unstable();
    set.dedup();
    for e in 0..n {
        if set.len() == m.full_rank() {
            break;
        }
        if !set.contains(&e) {
            set.push(e);
            if m.rank_distinct(&set) != set.len() {
                set.pop();
            }
        }
    }
    set.sort_unstable();
    let mut value = inst.set_value(&set);
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for a in 0..set.len() {
            for b in 0..n {
                if set.contains(&b) {
                    continue;
                }
                let delta = swap_delta(inst.distance(), inst.scores(), &set, a, b);
                if !improves(value + delta, value) || best.is_some_and(|(_, _, bd)| delta <= bd) {
                    continue;
                }
                let mut trial = set.clone();
                trial[a] = b;
                if m.rank_distinct(&trial) == trial.len() {
                    best = Some((a, b, delta));
                }
            }
        }
        let Some((a, b, _)) = best else { break };
        set[a] = b;
        set.sort_unstable();
        value = inst.set_value(&set);
    }
    Ok(Selection { set, value })
}

fn swap_delta(d: &DistanceMatrix, w: Option<&[f64]>, set: &[usize], a: usize, b: usize) -> f64 {
    let out = set[a];
    let mut delta = 0.0;
    for (idx, &s) in set.iter().enumerate() {
        if idx != a {
            delta += 2.0 * (d.get(s, b) - d.get(s, out));
        }
    }
    delta + w.map_or(0.0, |w| w[b] - w[out])
}

/// One draw including element `i` independently with probability `y_i`.
pub fn independent_draw<R: Rng + ?Sized>(y: &[f64], rng: &mut R) -> Vec<usize> {
    (0..y.len()).filter(|&i| rng.gen::<f64>() < y[i]).collect()
}

/// Scales `x*` by `1 − ε` and rounds every coordinate independently,
/// redrawing until at most `k` elements are chosen. Cardinality constraints
/// only. The stream is ChaCha8 keyed by `seed`.
pub fn randomized_round_cardinality(x_star: &[f64], k: usize, eps: f64, seed: u64) -> Result<Vec<usize>> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::param("scaling epsilon must lie in [0, 1]"));
    }
    let mass: f64 = x_star.iter().sum();
    if (mass - k as f64).abs() > tol::TIGHT * (k as f64).max(1.0) {
        return Err(Error::NotInBasePolytope { mass, rank: k });
    }
    let y: Vec<f64> = x_star.iter().map(|v| (1.0 - eps) * v).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RETRIES {
        let draw = independent_draw(&y, &mut rng);
        if draw.len() <= k {
            return Ok(draw);
        }
    }
    Err(Error::RetryCapExceeded(MAX_RETRIES))
}

/// `randomized_round_cardinality` for an instance with a uniform matroid.
pub fn randomized_round(inst: &Instance, x_star: &[f64], eps: f64, seed: u64) -> Result<Selection> {
    let MatroidKind::Uniform { k } = *inst.matroid().kind() else {
        return Err(Error::param("randomized rounding needs a uniform matroid"));
    };
    let set = randomized_round_cardinality(x_star, k, eps, seed)?;
    Ok(Selection {
        value: inst.set_value(&set),
        set,
    })
}
