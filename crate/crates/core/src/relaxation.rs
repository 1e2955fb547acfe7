//! The per-slice concave relaxation.
//!
//! On the slice `Σx = α` the dispersion equals `2α·cᵀx − 2·xᵀQx`, which is
//! concave when `Q` is PSD. Each slice is maximized over
//! `P(M) ∩ {Σx = α}` (the base polytope of the rank-`α` truncation) by an
//! away-step conditional-gradient method whose linear oracle is the matroid
//! greedy algorithm. The Frank–Wolfe gap certifies an upper bound on the
//! slice optimum; the maximum over all slices bounds the integer optimum.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::dot;
use crate::matroid::indicator;
use crate::{Error, Problem, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SliceOptions {
    /// Stop once the Frank–Wolfe gap is at most `gap_tol · max(1, |value|)`.
    pub gap_tol: f64,
    /// Iteration cap; defaults to `50 · n · α`.
    pub max_iter: Option<usize>,
    /// Keep the objective value of every iterate.
    pub record_history: bool,
}

impl Default for SliceOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-6,
            max_iter: None,
            record_history: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SliceSolution {
    pub alpha: usize,
    pub x: Vec<f64>,
    /// `g(x) = xᵀDx + wᵀx`, evaluated directly.
    pub value: f64,
    /// Final Frank–Wolfe gap, never negative.
    pub gap: f64,
    /// Certified bound on the slice maximum.
    pub upper_bound: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationResult {
    best: usize,
    pub slices: Vec<SliceSolution>,
    pub opt_upper_bound: f64,
}

impl RelaxationResult {
    /// Assembles slices solved elsewhere (e.g. in parallel), in any order.
    pub fn from_slices(mut slices: Vec<SliceSolution>) -> Result<Self> {
        if slices.is_empty() {
            return Err(Error::param("at least one slice is required"));
        }
        slices.sort_by_key(|s| s.alpha);
        let mut best = 0;
        for (i, s) in slices.iter().enumerate() {
            if s.value > slices[best].value {
                best = i;
            }
        }
        let opt_upper_bound = slices.iter().map(|s| s.upper_bound).fold(0.0, f64::max);
        Ok(Self {
            best,
            slices,
            opt_upper_bound,
        })
    }

    pub fn best(&self) -> &SliceSolution {
        &self.slices[self.best]
    }
}

/// Maximizes `g` over `P(M) ∩ {Σx = α}`.
pub fn solve_slice(p: &Problem, alpha: usize, opts: &SliceOptions) -> Result<SliceSolution> {
    let n = p.n();
    let rank = p.rank();
    if alpha > rank {
        return Err(Error::AlphaOutOfRange { alpha, rank });
    }
    if alpha == 0 {
        return Ok(SliceSolution {
            alpha,
            x: vec![0.0; n],
            value: 0.0,
            gap: 0.0,
            upper_bound: 0.0,
            iterations: 0,
            converged: true,
            history: Vec::new(),
        });
    }
    let mut fw = FrankWolfe::new(p, alpha)?;
    let cap = opts.max_iter.unwrap_or(50 * n * alpha).max(1);
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    loop {
        let (value, gap) = fw.evaluate()?;
        if opts.record_history {
            history.push(value);
        }
        if gap <= opts.gap_tol * value.abs().max(1.0) {
            converged = true;
            break;
        }
        if iterations == cap {
            break;
        }
        fw.step();
        iterations += 1;
        if iterations % 64 == 0 {
            fw.resync();
        }
    }
    fw.resync();
    let (form_value, gap) = fw.evaluate()?;
    let gap = gap.max(0.0);
    let value = p.value(&fw.x);
    Ok(SliceSolution {
        alpha,
        value,
        gap,
        upper_bound: value.max(form_value) + gap,
        iterations,
        converged,
        history,
        x: fw.x,
    })
}

/// Solves every slice `α = 1..=r(X)` sequentially.
pub fn sweep_slices(p: &Problem, opts: &SliceOptions) -> Result<RelaxationResult> {
    let rank = p.rank();
    let slices = if rank == 0 {
        vec![solve_slice(p, 0, opts)?]
    } else {
        (1..=rank)
            .map(|a| solve_slice(p, a, opts))
            .collect::<Result<Vec<_>>>()?
    };
    RelaxationResult::from_slices(slices)
}

struct FrankWolfe<'a> {
    p: &'a Problem,
    alpha: usize,
    // 2α·c + w
    linear: Vec<f64>,
    x: Vec<f64>,
    qx: Vec<f64>,
    grad: Vec<f64>,
    active: Vec<(Vec<usize>, f64)>,
    // LMO vertex for the current gradient
    toward: Vec<usize>,
}

impl<'a> FrankWolfe<'a> {
    fn new(p: &'a Problem, alpha: usize) -> Result<Self> {
        let n = p.n();
        let form = p.form();
        let a = alpha as f64;
        let linear: Vec<f64> = (0..n)
            .map(|i| 2.0 * a * form.c()[i] + p.scores().map_or(0.0, |w| w[i]))
            .collect();
        let start = p.matroid().greedy_basis(alpha, &linear)?;
        let x = indicator(n, &start);
        let mut fw = Self {
            p,
            alpha,
            linear,
            x,
            qx: vec![0.0; n],
            grad: vec![0.0; n],
            active: vec![(start, 1.0)],
            toward: Vec::new(),
        };
        fw.resync();
        Ok(fw)
    }

    fn q_of_vertex(&self, v: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; self.x.len()];
        for &e in v {
            for (o, q) in out.iter_mut().zip(self.p.form().q_row(e)) {
                *o += q;
            }
        }
        out
    }

    /// Rebuilds `x` from the active set and `Qx` from `x`, discarding drift.
    fn resync(&mut self) {
        let total: f64 = self.active.iter().map(|(_, l)| l).sum();
        self.x.iter_mut().for_each(|v| *v = 0.0);
        for (v, l) in &mut self.active {
            *l /= total;
            for &e in v.iter() {
                self.x[e] += *l;
            }
        }
        let form = self.p.form();
        for i in 0..self.x.len() {
            self.qx[i] = dot(form.q_row(i), &self.x);
        }
    }

    /// Objective value and Frank–Wolfe gap at the current iterate.
    fn evaluate(&mut self) -> Result<(f64, f64)> {
        for i in 0..self.x.len() {
            self.grad[i] = self.linear[i] - 4.0 * self.qx[i];
        }
        let value = dot(&self.linear, &self.x) - 2.0 * dot(&self.x, &self.qx);
        self.toward = self.p.matroid().greedy_basis(self.alpha, &self.grad)?;
        let toward_score: f64 = self.toward.iter().map(|&e| self.grad[e]).sum();
        Ok((value, toward_score - dot(&self.grad, &self.x)))
    }

    fn step(&mut self) {
        let n = self.x.len();
        let gx = dot(&self.grad, &self.x);
        let fw_gap = self.toward.iter().map(|&e| self.grad[e]).sum::<f64>() - gx;
        let (away_idx, away_score) = self
            .active
            .iter()
            .enumerate()
            .map(|(i, (v, _))| (i, v.iter().map(|&e| self.grad[e]).sum::<f64>()))
            .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
        let away_gap = gx - away_score;

        let toward_step = fw_gap >= away_gap;
        let (d, qd, max_step) = if toward_step {
            let mut d: Vec<f64> = self.x.iter().map(|v| -v).collect();
            for &e in &self.toward {
                d[e] += 1.0;
            }
            let qs = self.q_of_vertex(&self.toward);
            let qd: Vec<f64> = (0..n).map(|i| qs[i] - self.qx[i]).collect();
            (d, qd, 1.0)
        } else {
            let (v, lambda) = &self.active[away_idx];
            let mut d = self.x.clone();
            for &e in v {
                d[e] -= 1.0;
            }
            let qa = self.q_of_vertex(v);
            let qd: Vec<f64> = (0..n).map(|i| self.qx[i] - qa[i]).collect();
            (d, qd, lambda / (1.0 - lambda))
        };
        let slope = dot(&self.grad, &d);
        let curvature = dot(&d, &qd);
        let gamma = if curvature > 0.0 {
            (slope / (4.0 * curvature)).min(max_step)
        } else {
            max_step
        };
        let gamma = gamma.max(0.0);
        if gamma == 0.0 {
            return;
        }
        for i in 0..n {
            self.x[i] += gamma * d[i];
            self.qx[i] += gamma * qd[i];
        }

        if toward_step {
            if gamma >= 1.0 {
                self.active.clear();
                self.active.push((core::mem::take(&mut self.toward), 1.0));
                return;
            }
            for (_, l) in &mut self.active {
                *l *= 1.0 - gamma;
            }
            match self.active.iter_mut().find(|(v, _)| *v == self.toward) {
                Some((_, l)) => *l += gamma,
                None => self.active.push((self.toward.clone(), gamma)),
            }
        } else {
            for (_, l) in &mut self.active {
                *l *= 1.0 + gamma;
            }
            self.active[away_idx].1 -= gamma;
            if gamma >= max_step || self.active[away_idx].1 <= 1e-15 {
                self.active.swap_remove(away_idx);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DistanceMatrix;
    use crate::{Instance, Matroid};
    use approx::assert_abs_diff_eq;

    fn all_ones(n: usize, k: usize) -> Problem {
        let d = DistanceMatrix::from_pairs(n, |_, _| 1.0);
        Problem::certify(Instance::new(d, Matroid::uniform(n, k).unwrap(), None).unwrap()).unwrap()
    }

    #[test]
    fn symmetric_maximizer_on_gap_instance() {
        let p = all_ones(4, 2);
        let s = solve_slice(&p, 2, &SliceOptions::default()).unwrap();
        assert!(s.converged);
        assert_abs_diff_eq!(s.value, 3.0, epsilon = 1e-5);
        for v in &s.x {
            assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-3);
        }
        assert!(s.upper_bound >= 3.0 - 1e-12);
    }

    #[test]
    fn unit_slice_spreads_mass() {
        // 1 − Σx² on Σx = 1 peaks at the uniform point with value 1 − 1/n.
        let p = all_ones(4, 2);
        let s = solve_slice(&p, 1, &SliceOptions::default()).unwrap();
        assert_abs_diff_eq!(s.value, 0.75, epsilon = 1e-5);
        assert!(s.value <= 0.75 + 1e-12);
    }

    #[test]
    fn single_point_slice() {
        let d = DistanceMatrix::from_rows(&[vec![0.0, 2.5], vec![2.5, 0.0]]).unwrap();
        let p = Problem::certify(Instance::new(d, Matroid::uniform(2, 2).unwrap(), None).unwrap()).unwrap();
        let s = solve_slice(&p, 2, &SliceOptions::default()).unwrap();
        assert_eq!(s.x, vec![1.0, 1.0]);
        assert_abs_diff_eq!(s.value, 5.0);
        assert_eq!(s.gap, 0.0);
        let r = sweep_slices(&p, &SliceOptions::default()).unwrap();
        assert_eq!(r.best().alpha, 2);
    }

    #[test]
    fn alpha_range() {
        let p = all_ones(4, 2);
        assert!(matches!(
            solve_slice(&p, 3, &SliceOptions::default()),
            Err(Error::AlphaOutOfRange { .. })
        ));
        let s = solve_slice(&p, 0, &SliceOptions::default()).unwrap();
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn values_never_decrease() {
        let pts: Vec<Vec<f64>> = (0..9)
            .map(|i| vec![(i * 7 % 5) as f64, (i * 3 % 4) as f64 * 0.7])
            .collect();
        let d = crate::geometry::point_distances(&pts, crate::geometry::PointMetric::L2).unwrap();
        let m = Matroid::partition_even(9, 3, 1).unwrap();
        let p = Problem::certify(Instance::new(d, m, None).unwrap()).unwrap();
        let opts = SliceOptions {
            record_history: true,
            gap_tol: 1e-9,
            ..SliceOptions::default()
        };
        for alpha in 1..=3 {
            let s = solve_slice(&p, alpha, &opts).unwrap();
            for w in s.history.windows(2) {
                assert!(w[1] >= w[0] - 1e-9 * (1.0 + w[0].abs()), "{} then {}", w[0], w[1]);
            }
            assert_abs_diff_eq!(s.x.iter().sum::<f64>(), alpha as f64, epsilon = 1e-9);
            assert!(p.matroid().min_slack_exhaustive(&s.x).unwrap() >= -1e-9);
            assert_abs_diff_eq!(p.form().slice_value(&s.x), s.value, epsilon = 1e-9 * (1.0 + s.value));
        }
    }
}
