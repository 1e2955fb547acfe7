//! Deterministic rounding of a base-polytope point to a basis.
//!
//! The point is kept on the minimal face containing it, described by a
//! maximal chain of tight sets `∅ = S₀ ⊊ S₁ ⊊ … ⊊ S_p = support(x)`. The
//! differences `R_l = S_l ∖ S_{l−1}` (rings) each have integral mass and are
//! either one integral element or at least two fractional ones. Every
//! iteration picks, among fractional pairs sharing a ring, the pair with the
//! smallest `x_i·x_j·d(i,j)`, moves mass between them in the direction that
//! does not decrease the rest of the objective, and stops when an element
//! drops to zero (erased) or a new tight set appears (inserted into the
//! chain). The loss of an iteration is at most `2·x_i·x_j·d(i,j)`.

use alloc::format;
use alloc::vec::Vec;

use crate::matroid::{indicator, Matroid};
use crate::{guarantee_factor, tol, Error, Problem, RelaxationResult, Result};

/// Chain of tight sets stored as one ordering of the support plus the end
/// offset of every ring: `S_l = order[..ends[l-1]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainState {
    order: Vec<usize>,
    ends: Vec<usize>,
}

impl ChainState {
    pub fn ring_count(&self) -> usize {
        self.ends.len()
    }

    fn start(&self, l: usize) -> usize {
        if l == 0 {
            0
        } else {
            self.ends[l - 1]
        }
    }

    /// Ring `l` (0-based), i.e. `S_{l+1} ∖ S_l`.
    pub fn ring(&self, l: usize) -> &[usize] {
        &self.order[self.start(l)..self.ends[l]]
    }

    /// Union of the rings before `l`.
    pub fn prefix(&self, l: usize) -> &[usize] {
        &self.order[..self.start(l)]
    }

    /// The chain set that closes ring `l`.
    pub fn set(&self, l: usize) -> &[usize] {
        &self.order[..self.ends[l]]
    }

    pub fn rings(&self) -> impl Iterator<Item = &[usize]> + '_ {
        (0..self.ring_count()).map(move |l| self.ring(l))
    }

    pub fn support(&self) -> &[usize] {
        &self.order
    }

    pub fn ring_of(&self, e: usize) -> Option<usize> {
        let pos = self.order.iter().position(|&v| v == e)?;
        Some(self.ends.partition_point(|&end| end <= pos))
    }

    /// Puts `first` at the front of ring `l` and closes a new set after it.
    fn split(&mut self, l: usize, first: &[usize]) {
        let (start, end) = (self.start(l), self.ends[l]);
        let ring = &mut self.order[start..end];
        ring.sort_by_key(|e| (!first.contains(e), *e));
        self.ends.insert(l, start + first.len());
    }

    fn erase(&mut self, e: usize) {
        let pos = self
            .order
            .iter()
            .position(|&v| v == e)
            .expect("erased element is in the chain");
        self.order.remove(pos);
        for end in &mut self.ends {
            if *end > pos {
                *end -= 1;
            }
        }
        self.ends.dedup();
        if self.ends.first() == Some(&0) {
            self.ends.remove(0);
        }
    }
}

#[inline]
fn is_fractional(v: f64) -> bool {
    v > 0.0 && v < 1.0
}

fn snap(v: &mut f64) {
    if *v < tol::TIGHT {
        *v = 0.0;
    } else if *v > 1.0 - tol::TIGHT {
        *v = 1.0;
    }
}

/// Builds a maximal chain of tight sets for `x` on the base polytope.
///
/// Starts from `(∅, support)` and splits rings until no ring holds an
/// integral element next to others or a tight proper subset.
pub fn build_chain(m: &Matroid, x: &[f64]) -> Result<ChainState> {
    if x.len() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            got: x.len(),
        });
    }
    if x.iter()
        .any(|v| !(v.is_finite() && (0.0..=1.0 + tol::TIGHT).contains(v)))
    {
        return Err(Error::param("point must lie in [0, 1]^n"));
    }
    let mass: f64 = x.iter().sum();
    let rank = m.full_rank();
    if (mass - rank as f64).abs() > tol::TIGHT * (rank as f64).max(1.0) {
        return Err(Error::NotInBasePolytope { mass, rank });
    }
    let order: Vec<usize> = (0..m.n()).filter(|&i| x[i] > 0.0).collect();
    let ends = if order.is_empty() {
        Vec::new()
    } else {
        alloc::vec![order.len()]
    };
    let mut chain = ChainState { order, ends };
    refine(m, x, &mut chain, 0, usize::MAX)?;
    Ok(chain)
}

/// Splits rings `from..=last` until each of them is maximal. A split turns
/// one ring into two, so `last` moves along.
fn refine(m: &Matroid, x: &[f64], chain: &mut ChainState, from: usize, mut last: usize) -> Result<()> {
    let mut l = from;
    while l <= last && l < chain.ring_count() {
        if try_split(m, x, chain, l)? {
            last = last.saturating_add(1);
        } else {
            l += 1;
        }
    }
    Ok(())
}

fn try_split(m: &Matroid, x: &[f64], chain: &mut ChainState, l: usize) -> Result<bool> {
    let ring = chain.ring(l).to_vec();
    if ring.len() <= 1 {
        return Ok(false);
    }
    if let Some(&i) = ring.iter().filter(|&&e| x[e] >= 1.0).min() {
        chain.split(l, &[i]);
        return Ok(true);
    }
    // Any proper nonempty T either contains the smallest element r0 and
    // misses some j, or misses r0 and contains some i.
    let prefix = chain.prefix(l).to_vec();
    let r0 = *ring.iter().min().expect("ring is nonempty");
    let candidates = ring
        .iter()
        .filter(|&&e| e != r0)
        .map(|&j| (r0, j))
        .chain(ring.iter().filter(|&&e| e != r0).map(|&i| (i, r0)));
    for (inc, exc) in candidates {
        let s = m.slack_minimize(x, &prefix, &ring, inc, Some(exc))?;
        if s.min_slack <= tol::TIGHT {
            chain.split(l, &s.argmin);
            return Ok(true);
        }
    }
    Ok(false)
}

/// `(f, q)`: fractional elements and rings holding fractional elements.
pub fn fractional_counts(x: &[f64], chain: &ChainState) -> (usize, usize) {
    let f = chain.support().iter().filter(|&&e| is_fractional(x[e])).count();
    let q = chain.rings().filter(|r| r.iter().any(|&e| is_fractional(x[e]))).count();
    (f, q)
}

/// Checks tightness of every chain set, integrality of ring masses and the
/// ring structure. Returns a description of the first violation.
pub fn check_chain(m: &Matroid, x: &[f64], chain: &ChainState) -> Result<(), alloc::string::String> {
    let mut prev_rank = 0usize;
    for l in 0..chain.ring_count() {
        let set = chain.set(l);
        let rank = m.rank_distinct(set);
        let mass: f64 = set.iter().map(|&e| x[e]).sum();
        if (rank as f64 - mass).abs() > tol::TIGHT {
            return Err(format!("chain set {l} has slack {}", rank as f64 - mass));
        }
        if rank <= prev_rank {
            return Err(format!(
                "ring {l} has non-positive mass {}",
                rank as i64 - prev_rank as i64
            ));
        }
        prev_rank = rank;
        let ring = chain.ring(l);
        let integral = ring.iter().filter(|&&e| x[e] >= 1.0).count();
        if integral > 0 && ring.len() > 1 {
            return Err(format!("ring {l} mixes an integral element with others"));
        }
        if ring.iter().any(|&e| x[e] <= 0.0) {
            return Err(format!("ring {l} holds a zero element"));
        }
    }
    if prev_rank != m.full_rank() {
        return Err(format!(
            "chain closes at rank {prev_rank}, matroid rank is {}",
            m.full_rank()
        ));
    }
    Ok(())
}

/// Among fractional pairs inside one ring, the pair minimizing
/// `x_i·x_j·d(i,j)`; ties go to the lexicographically smallest `(i, j)`.
pub fn select_pair(p: &Problem, x: &[f64], chain: &ChainState) -> Result<(usize, usize)> {
    let d = p.distance();
    let mut frac: Vec<(usize, usize)> = Vec::new();
    for (l, ring) in chain.rings().enumerate() {
        frac.extend(ring.iter().filter(|&&e| is_fractional(x[e])).map(|&e| (e, l)));
    }
    frac.sort_unstable();
    let mut best: Option<((usize, usize), f64)> = None;
    for (a, &(i, li)) in frac.iter().enumerate() {
        for &(j, lj) in &frac[a + 1..] {
            if li != lj {
                continue;
            }
            let cost = x[i] * x[j] * d.get(i, j);
            if best.is_none_or(|(_, c)| cost < c) {
                best = Some(((i, j), cost));
            }
        }
    }
    best.map(|(pair, _)| pair).ok_or(Error::AlreadyIntegral)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepEvent {
    /// The decreased element reached zero and left the support.
    Erased,
    /// A new tight set split the ring.
    Refined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// Element whose value was increased.
    pub inc: usize,
    /// Element whose value was decreased.
    pub dec: usize,
    pub eps: f64,
    pub event: StepEvent,
    pub value_before: f64,
    pub value_after: f64,
    /// `value_before − value_after`; may be negative.
    pub loss: f64,
    /// `2·x_i·x_j·d(i,j)` before the move, an upper bound on `loss`.
    pub pair_cost: f64,
    /// The tight set inserted into the chain, for refining steps.
    pub new_tight: Option<Vec<usize>>,
    /// `f − q` before and after the step.
    pub progress_before: usize,
    pub progress_after: usize,
}

/// Performs one iteration on `(x, chain)` in place.
pub fn round_step(p: &Problem, x: &mut [f64], chain: &mut ChainState) -> Result<StepRecord> {
    let d = p.distance();
    let m = p.matroid();
    let (a, b) = select_pair(p, x, chain)?;
    let l = chain
        .ring_of(a)
        .ok_or_else(|| Error::internal("selected element is not in the chain"))?;
    let (f0, q0) = fractional_counts(x, chain);

    // Apart from 2·x_a·x_b·d(a,b), g is linear along e_a − e_b with this slope.
    let mut slope = 0.0;
    let mut scale = 0.0;
    for &e in chain.support() {
        if e != a && e != b {
            let t = 2.0 * x[e] * (d.get(e, a) - d.get(e, b));
            slope += t;
            scale += t.abs();
        }
    }
    if let Some(w) = p.scores() {
        slope += w[a] - w[b];
        scale += w[a] + w[b];
    }
    let (inc, dec) = if slope >= -tol::NUM * (1.0 + scale) {
        (a, b)
    } else {
        (b, a)
    };

    let value_before = p.value(x);
    let pair_cost = 2.0 * x[a] * x[b] * d.get(a, b);
    let room = 1.0 - x[inc];
    let step = m.max_feasible_step(x, chain.prefix(l), chain.ring(l), inc, dec)?;
    let eps = step.eps;
    x[inc] += eps;
    x[dec] -= eps;
    snap(&mut x[inc]);

    let (event, new_tight) = if x[dec] <= tol::TIGHT {
        x[dec] = 0.0;
        chain.erase(dec);
        refine(m, x, chain, l, l)?;
        (StepEvent::Erased, None)
    } else {
        let tight = if step.slack.min_slack <= room + tol::TIGHT {
            step.slack.argmin
        } else {
            alloc::vec![inc]
        };
        chain.split(l, &tight);
        let set = chain.set(l);
        let slack = m.rank_distinct(set) as f64 - set.iter().map(|&e| x[e]).sum::<f64>();
        if slack.abs() > tol::TIGHT {
            return Err(Error::internal(format!(
                "step of {eps} created no tight set (slack {slack})"
            )));
        }
        let full = set.to_vec();
        refine(m, x, chain, l, l + 1)?;
        (StepEvent::Refined, Some(full))
    };

    let value_after = p.value(x);
    let (f1, q1) = fractional_counts(x, chain);
    Ok(StepRecord {
        inc,
        dec,
        eps,
        event,
        value_before,
        value_after,
        loss: value_before - value_after,
        pair_cost,
        new_tight,
        progress_before: f0 - q0,
        progress_after: f1 - q1,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoundOptions {
    /// Re-check the chain after every step and fail on any violation.
    pub validate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundingTrace {
    pub steps: Vec<StepRecord>,
    pub total_loss: f64,
    /// `g(x*)`.
    pub start_value: f64,
    /// `x*ᵀDx*`, the quantity the per-iteration bounds scale with.
    pub start_quadratic: f64,
    pub final_value: f64,
    pub rank: usize,
}

impl RoundingTrace {
    /// Number of iterations remaining when step `t` (0-based, forward) began.
    pub fn reverse_index(&self, t: usize) -> usize {
        self.steps.len() - t
    }

    /// `min(2/(m·k), 2/m²) · x*ᵀDx*` for step `t`.
    pub fn step_bound(&self, t: usize) -> f64 {
        let m = self.reverse_index(t) as f64;
        let k = self.rank.max(1) as f64;
        (2.0 / (m * k)).min(2.0 / (m * m)) * self.start_quadratic
    }

    pub fn step_bounds(&self) -> Vec<f64> {
        (0..self.steps.len()).map(|t| self.step_bound(t)).collect()
    }

    /// True if every step loss is within its reverse-index bound plus `slack`.
    pub fn step_bounds_hold(&self, slack: f64) -> bool {
        self.steps
            .iter()
            .enumerate()
            .all(|(t, s)| s.loss <= self.step_bound(t) + slack)
    }

    /// `g(x*) − ((4 + 2 ln k)/k) · x*ᵀDx*`; without scores this is
    /// `(1 − (4 + 2 ln k)/k) · x*ᵀDx*`.
    pub fn guaranteed_value(&self) -> f64 {
        self.start_value - (1.0 - guarantee_factor(self.rank)) * self.start_quadratic
    }

    pub fn guarantee_holds(&self, slack: f64) -> bool {
        self.final_value >= self.guaranteed_value() - slack
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundingResult {
    /// Sorted basis elements.
    pub basis: Vec<usize>,
    pub value: f64,
    pub trace: RoundingTrace,
}

/// Step-by-step driver; [`round`] runs it to completion.
pub struct Rounder<'a> {
    p: &'a Problem,
    x: Vec<f64>,
    chain: ChainState,
    steps: Vec<StepRecord>,
    start_value: f64,
    start_quadratic: f64,
    validate: bool,
}

impl<'a> Rounder<'a> {
    /// `x_star` must lie on the base polytope; see [`Matroid::lift_to_base`].
    pub fn new(p: &'a Problem, x_star: &[f64], opts: &RoundOptions) -> Result<Self> {
        if x_star.len() != p.n() {
            return Err(Error::DimensionMismatch {
                expected: p.n(),
                got: x_star.len(),
            });
        }
        let mut x = x_star.to_vec();
        x.iter_mut().for_each(snap);
        let chain = build_chain(p.matroid(), &x)?;
        let r = Self {
            p,
            start_value: p.value(x_star),
            start_quadratic: p.instance().quadratic_value(x_star),
            x,
            chain,
            steps: Vec::new(),
            validate: opts.validate,
        };
        if r.validate {
            check_chain(p.matroid(), &r.x, &r.chain).map_err(Error::Internal)?;
        }
        Ok(r)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn chain(&self) -> &ChainState {
        &self.chain
    }

    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    pub fn is_integral(&self) -> bool {
        !self.x.iter().any(|&v| is_fractional(v))
    }

    /// Runs one iteration; `None` once the point is integral.
    pub fn step(&mut self) -> Result<Option<&StepRecord>> {
        if self.is_integral() {
            return Ok(None);
        }
        if self.steps.len() > self.p.n() {
            return Err(Error::internal("rounding exceeded n iterations"));
        }
        let rec = round_step(self.p, &mut self.x, &mut self.chain)?;
        if self.validate {
            let m = self.p.matroid();
            check_chain(m, &self.x, &self.chain).map_err(Error::Internal)?;
            if rec.progress_after >= rec.progress_before {
                return Err(Error::internal("f − q did not decrease"));
            }
            if rec.loss > rec.pair_cost + tol::NUM * (1.0 + rec.value_before.abs()) {
                return Err(Error::internal(format!(
                    "loss {} exceeds pair cost {}",
                    rec.loss, rec.pair_cost
                )));
            }
            let fresh = build_chain(m, &self.x)?;
            if fresh.ring_count() != self.chain.ring_count() {
                return Err(Error::internal(format!(
                    "incremental chain has {} rings, rebuilt chain has {}",
                    self.chain.ring_count(),
                    fresh.ring_count()
                )));
            }
        }
        self.steps.push(rec);
        Ok(self.steps.last())
    }

    pub fn finish(mut self) -> Result<RoundingResult> {
        while self.step()?.is_some() {}
        let basis: Vec<usize> = (0..self.p.n()).filter(|&i| self.x[i] == 1.0).collect();
        let m = self.p.matroid();
        if basis.len() != m.full_rank() || !m.is_independent(&basis)? {
            return Err(Error::internal(format!(
                "rounded set of size {} is not a basis",
                basis.len()
            )));
        }
        let value = self.p.value(&indicator(self.p.n(), &basis));
        let total_loss = self.steps.iter().map(|s| s.loss).sum();
        Ok(RoundingResult {
            basis,
            value,
            trace: RoundingTrace {
                steps: self.steps,
                total_loss,
                start_value: self.start_value,
                start_quadratic: self.start_quadratic,
                final_value: value,
                rank: m.full_rank(),
            },
        })
    }
}

/// Rounds a base-polytope point to a basis.
pub fn round(p: &Problem, x_star: &[f64], opts: &RoundOptions) -> Result<RoundingResult> {
    Rounder::new(p, x_star, opts)?.finish()
}

/// Lifts the best slice of a relaxation to the base polytope and rounds it.
/// Returns the lifted point alongside the result.
pub fn round_relaxation(
    p: &Problem,
    relaxation: &RelaxationResult,
    opts: &RoundOptions,
) -> Result<(Vec<f64>, RoundingResult)> {
    let x_star = p.matroid().lift_to_base(&relaxation.best().x)?;
    let result = round(p, &x_star, opts)?;
    Ok((x_star, result))
}
